#include "gaprec/multiprecision.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace gaprec {

double log10_abs(mpfr_srcptr x) {
  if (mpfr_zero_p(x)) return -std::numeric_limits<double>::infinity();
  long exp2 = 0;
  const double mant = mpfr_get_d_2exp(&exp2, x, MPFR_RNDN);
  return std::log10(std::abs(mant)) + static_cast<double>(exp2) * std::log10(2.0);
}

std::string MpReal::to_string(int digits) const {
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v_);
  return buf.data();
}

}  // namespace gaprec
