#include "gaprec/errors.hpp"
#include "gaprec/gap.hpp"
#include "gaprec/harness.hpp"
#include "gaprec/kernels.hpp"
#include "gaprec/patterns.hpp"
#include "gaprec/recovery.hpp"
#include "gaprec/spectral.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

using namespace gaprec;

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::string format = "csv";
  unsigned parallel = 1;
};

struct GapArgs {
  std::string center = "pi";
  double delta = 0.5;

  SpectralGap gap() const { return gap_from_json(nlohmann::json{{"center", parse_center()}, {"delta", delta}}); }

 private:
  nlohmann::json parse_center() const {
    if (center == "pi" || center == "zero") return center;
    try {
      return std::stod(center);
    } catch (const std::exception&) {
      throw ConfigError("gap center must be pi, zero or radians, got " + center);
    }
  }
};

void add_gap_options(CLI::App* cmd, GapArgs& g) {
  cmd->add_option("--center", g.center, "gap center: pi, zero or radians");
  cmd->add_option("--delta", g.delta, "chord radius of the gap");
}

// Runs `write` on the --out file, or on stdout when no path is given.
template <class F>
void with_output(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write(os);
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  try {
    nlohmann::json j;
    is >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

nlohmann::json parse_json_arg(const std::string& text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gap-spectrum signal recovery from sparse observations"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "JSON experiment spec");
  app.add_option("--out", g.out, "output path (stdout when omitted)");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--parallel", g.parallel, "worker threads")->check(CLI::PositiveNumber);

  // kernel synth | freq-error
  auto* kernel = app.add_subcommand("kernel", "predictor kernels");
  kernel->require_subcommand(1);
  int k_m = 1;
  double k_gamma = 20.0, k_rhat = 1.0;
  std::size_t k_n = 512, k_grid = 4096;
  bool k_unmasked = false;
  GapArgs k_gap;
  auto* synth = kernel->add_subcommand("synth", "synthesize taps (CSV j,tap plus a JSON sidecar)");
  synth->add_option("--m", k_m, "horizon")->check(CLI::NonNegativeNumber);
  synth->add_option("--gamma", k_gamma);
  synth->add_option("--r-hat", k_rhat);
  synth->add_option("--N", k_n, "tap count");
  synth->add_flag("--unmasked", k_unmasked, "do not zero the transfer inside the gap");
  add_gap_options(synth, k_gap);
  auto* ferr = kernel->add_subcommand("freq-error", "sup distance of H_m to the m-step shift off the gap");
  ferr->add_option("--m", k_m)->check(CLI::NonNegativeNumber);
  ferr->add_option("--gamma", k_gamma);
  ferr->add_option("--r-hat", k_rhat);
  ferr->add_option("--G", k_grid, "grid size");
  add_gap_options(ferr, k_gap);

  // project
  auto* project = app.add_subcommand("project", "gap-project a signal CSV (t,re,im)");
  std::string p_in;
  std::size_t p_grid = 1024;
  GapArgs p_gap;
  project->add_option("--in", p_in, "input signal CSV")->required();
  project->add_option("--G", p_grid, "grid size");
  add_gap_options(project, p_gap);

  // patterns show
  auto* patterns = app.add_subcommand("patterns", "observation patterns");
  patterns->require_subcommand(1);
  auto* show = patterns->add_subcommand("show", "print the tau table and the case");
  std::string s_pattern, s_targets;
  Index s_theta = 0, s_depth = 8;
  show->add_option("--pattern", s_pattern, "pattern JSON, e.g. {\"kind\":\"periodic\",\"m\":3}");
  show->add_option("--targets", s_targets, "target set JSON (array or class)");
  show->add_option("--theta", s_theta);
  show->add_option("--depth", s_depth)->check(CLI::PositiveNumber);

  // recover
  auto* recov = app.add_subcommand("recover", "one recovery from the first sweep point of --config");
  std::optional<double> r_gamma, r_rho;
  std::optional<std::size_t> r_n;
  std::optional<std::uint64_t> r_seed;
  recov->add_option("--gamma", r_gamma);
  recov->add_option("--N", r_n);
  recov->add_option("--rho", r_rho);
  recov->add_option("--seed", r_seed);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run the (gamma, N, rho, seed) grid of --config");
  double w_tol = 1e-3;
  sweep->add_option("--witness-tol", w_tol, "sup_error bound for the reported witness row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::cout << std::setprecision(17);
    if (*synth) {
      std::optional<SpectralGap> mask;
      if (!k_unmasked) mask = k_gap.gap();
      const Kernel k = synth_kernel(k_m, PredictorParams(k_gamma, k_rhat), k_n, mask);
      with_output(g.out, [&](std::ostream& os) { write_kernel_csv(os, k); });
      const auto side = kernel_sidecar_json(k).dump(2);
      if (g.out.empty()) {
        std::cerr << side << '\n';
      } else {
        std::ofstream(g.out + ".json") << side << '\n';
      }
    } else if (*ferr) {
      std::cout << freq_error(PredictorParams(k_gamma, k_rhat), k_m, k_gap.gap(), k_grid) << '\n';
    } else if (*project) {
      const SpectralGap gap = p_gap.gap();
      const Signal y = project_gap(load_signal_csv(p_in), gap, p_grid);
      with_output(g.out, [&](std::ostream& os) { write_signal_csv(os, y); });
      std::cerr << "residual_energy " << gap_residual_energy(y, gap, p_grid) << '\n';
    } else if (*show) {
      nlohmann::json cfg = g.config.empty() ? nlohmann::json::object() : read_json_file(g.config);
      if (!s_pattern.empty()) cfg["pattern"] = parse_json_arg(s_pattern, "--pattern");
      if (!s_targets.empty()) cfg["targets"] = parse_json_arg(s_targets, "--targets");
      if (!cfg.contains("pattern")) throw ConfigError("patterns show needs --pattern or a config with a pattern");
      const ObservationPattern pat = pattern_from_json(cfg["pattern"]);
      if (cfg.contains("target_class")) {
        std::cout << "case " << to_string(pattern_case(pat, target_set_from_json(cfg["target_class"]))) << '\n';
      } else if (cfg.contains("targets")) {
        std::cout << "case " << to_string(pattern_case(pat, target_set_from_json(cfg["targets"]))) << '\n';
      }
      const TauMap tau = build_tau_at(pat, s_theta, s_depth);
      std::cout << "k,tau\n";
      for (Index k = tau.k_lo(); k <= s_theta; ++k) std::cout << k << ',' << tau(k) << '\n';
    } else if (*recov) {
      if (g.config.empty()) throw ConfigError("recover needs --config");
      const ExperimentSpec spec = load_spec(g.config);
      PreparedTask prep = prepare_task(spec, r_gamma.value_or(spec.gammas.front()), r_n.value_or(spec.n_taps.front()),
                                       r_rho.value_or(spec.rhos.front()), r_seed.value_or(spec.noise_seeds.front()));
      RecoveryReport rep = recover(prep.task);
      rep.attach_truth(prep.truth);
      with_output(g.out, [&](std::ostream& os) {
        if (g.format == "json") {
          os << report_to_json(rep).dump(2) << '\n';
          return;
        }
        os << std::setprecision(17) << "target,estimate,error,l2_norm\n";
        for (std::size_t i = 0; i < rep.targets.size(); ++i) {
          os << rep.targets[i] << ',' << rep.estimates[i].real() << ',' << rep.errors[i] << ','
             << rep.kernels[i].l2_norm << '\n';
        }
      });
      std::cerr << "case " << to_string(rep.pattern_case) << " sup_error " << *rep.sup_error << '\n';
    } else if (*sweep) {
      if (g.config.empty()) throw ConfigError("sweep needs --config");
      const ExperimentSpec spec = load_spec(g.config);
      const auto rows = run_sweep(spec, g.parallel);
      const std::string path = g.out.empty() ? spec.output : g.out;
      const auto fmt = report_format_from(g.format);
      if (path.empty()) {
        if (fmt == ReportFormat::csv) {
          write_rows_csv(std::cout, rows);
        } else {
          std::cout << rows_to_json(rows).dump(2) << '\n';
        }
      } else {
        const auto meta = report_metadata(spec);
        emit_report(rows, fmt, path, &meta);
      }
      if (const auto w = find_witness(rows, w_tol)) {
        std::cerr << "witness gamma=" << w->gamma << " N=" << w->n_taps << " rho=" << w->rho
                  << " sup_error=" << w->sup_error << '\n';
      } else {
        std::cerr << "no witness row with rho > 0 and sup_error <= " << w_tol << '\n';
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
