#pragma once

#include <mpfr.h>

#include <string>
#include <utility>

namespace gaprec {

/// log10|x|, -inf for zero. Finite even when the value overflows a double.
double log10_abs(mpfr_srcptr x);

/// Owning mpfr_t with value semantics.
class MpReal {
 public:
  explicit MpReal(mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  MpReal(mpfr_prec_t bits, double x) { mpfr_init2(v_, bits); mpfr_set_d(v_, x, MPFR_RNDN); }
  MpReal(const MpReal& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  MpReal(MpReal&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  MpReal& operator=(const MpReal& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  MpReal& operator=(MpReal&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~MpReal() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  double log10_abs() const { return gaprec::log10_abs(v_); }
  std::string to_string(int digits = 20) const;

 private:
  mpfr_t v_;
};

}  // namespace gaprec
