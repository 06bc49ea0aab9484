#ifndef ESML_RUNNER_HPP
#define ESML_RUNNER_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "esml/analysis.hpp"
#include "esml/config_io.hpp"
#include "esml/copula_report.hpp"
#include "esml/diagnostics.hpp"
#include "esml/simulate.hpp"
#include "esml/trace_io.hpp"
#include "esml/version.hpp"

namespace esml::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumeric = 2;

/// Write-then-rename so readers never observe a partial artifact.
inline void write_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

inline json provenance(const ExperimentConfig& cfg, const std::string& subcommand) {
  return json{{"tool", "esml"},
              {"version", kVersion},
              {"subcommand", subcommand},
              {"config_hash", to_hex(cfg.config_hash)},
              {"seed", cfg.es.seed},
              {"mc_seed", cfg.quadrature.mc_seed},
              {"stream_derivation", kStreamDerivation}};
}

inline json to_json(const DriftPoint& p) {
  return json{{"alpha", p.alpha},
              {"delta", p.delta},
              {"value", p.value},
              {"ratio", p.ratio},
              {"mc_stderr", p.mc_stderr}};
}

namespace detail {

inline std::string replica_filename(int r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "trace_r%04d.csv", r);
  return buf;
}

inline void run_simulate(const ExperimentConfig& cfg, const fs::path& out, int jobs) {
  RunOptions opt;
  opt.jobs = jobs;
  opt.log_x = cfg.simulate.log_x;
  opt.config_hash = cfg.config_hash;
  const auto traces = run_chain(cfg.es, cfg.simulate.t, cfg.simulate.replicas, opt);
  json manifest = {{"provenance", provenance(cfg, "simulate")},
                   {"T", cfg.simulate.t},
                   {"replicas", cfg.simulate.replicas},
                   {"log_x", cfg.simulate.log_x},
                   {"artifacts", json::array()}};
  for (std::size_t r = 0; r < traces.size(); ++r) {
    std::ostringstream os;
    write_trace_csv(os, traces[r]);
    const std::string name = replica_filename(static_cast<int>(r));
    write_atomic(out / name, os.str());
    manifest["artifacts"].push_back(name);
  }
  write_atomic(out / "simulate.json", manifest.dump(2) + "\n");
}

inline void run_kernel(const ExperimentConfig& cfg, const fs::path& out, int /*jobs*/) {
  require_analysis_lambda(cfg, "kernel");
  const auto& es = cfg.es;
  const auto& spec = cfg.quadrature;
  json total = json::array();
  double mass_err = 0.0;
  for (double d : cfg.kernel.delta_grid) {
    const double p = transition_prob(es.movement, es.n, es.lambda, d, 0.0,
                                     std::numeric_limits<double>::infinity(), spec);
    mass_err = std::max(mass_err, std::fabs(p - 1.0));
    total.push_back({{"delta", d}, {"p_total", p}, {"mass_error", std::fabs(p - 1.0)}});
  }
  const double probe_p =
      transition_prob(es.movement, es.n, es.lambda, cfg.kernel.probe_delta,
                      cfg.kernel.interval_lo, cfg.kernel.interval_hi, spec);
  json cont = json::array();
  const auto rows =
      kernel_continuity_probe(es.movement, es.n, es.lambda, cfg.kernel.probe_delta,
                              cfg.kernel.interval_lo, cfg.kernel.interval_hi,
                              cfg.kernel.eps_list, spec);
  for (const auto& r : rows)
    cont.push_back({{"eps", r.eps}, {"diff_plus", r.diff_plus}, {"diff_minus", r.diff_minus}});
  json doc = {{"provenance", provenance(cfg, "kernel")},
              {"total_mass", total},
              {"kernel_mass_error", mass_err},
              {"probe",
               {{"delta", cfg.kernel.probe_delta},
                {"interval", {cfg.kernel.interval_lo, cfg.kernel.interval_hi}},
                {"p", probe_p}}},
              {"continuity", cont}};
  write_atomic(out / "kernel.json", doc.dump(2) + "\n");
}

inline void run_drift(const ExperimentConfig& cfg, const fs::path& out, int /*jobs*/) {
  require_analysis_lambda(cfg, "drift");
  const auto& es = cfg.es;
  json curve = json::array();
  std::ostringstream csv;
  csv << "# esml-drift v1\n";
  csv << "# config_hash=" << to_hex(cfg.config_hash) << "\n";
  csv << "# seed=" << cfg.es.seed << "\n";
  csv << "# mc_seed=" << cfg.quadrature.mc_seed << "\n";
  csv << "# stream=" << kStreamDerivation << "\n";
  csv << "alpha,delta,value,ratio,mc_stderr\n";
  for (double alpha : cfg.drift.alphas) {
    for (int i = 0; i < cfg.drift.delta_points; ++i) {
      const double frac = cfg.drift.delta_points == 1
                              ? 0.0
                              : static_cast<double>(i) / (cfg.drift.delta_points - 1);
      const double delta = cfg.drift.delta_lo + frac * (cfg.drift.delta_hi - cfg.drift.delta_lo);
      const DriftPoint p = drift(es.movement, es.n, es.lambda, alpha, delta, cfg.quadrature);
      curve.push_back(to_json(p));
      csv << fmt17(p.alpha) << ',' << fmt17(p.delta) << ',' << fmt17(p.value) << ','
          << fmt17(p.ratio) << ',' << fmt17(p.mc_stderr) << "\n";
    }
  }
  json doc = {{"provenance", provenance(cfg, "drift")}, {"curve", curve}};
  write_atomic(out / "drift.json", doc.dump(2) + "\n");
  write_atomic(out / "drift.csv", csv.str());
}

inline void run_delta_inf(const ExperimentConfig& cfg, const fs::path& out, int /*jobs*/) {
  require_analysis_lambda(cfg, "delta-inf");
  const auto r =
      delta_infinity(cfg.es.movement, cfg.es.n, cfg.es.lambda, cfg.quadrature);
  json doc = {{"provenance", provenance(cfg, "delta-inf")},
              {"estimate", r.estimate},
              {"mc_estimate", r.mc_estimate},
              {"ci", r.ci},
              {"gain_limit", r.gain_limit},
              {"mc_samples", cfg.quadrature.mc_samples}};
  write_atomic(out / "delta_inf.json", doc.dump(2) + "\n");
}

inline void run_validate_copula(const ExperimentConfig& cfg, const fs::path& out, int /*jobs*/) {
  const auto rep = copula_validation(cfg.es.movement, cfg.copula_check.grid_points,
                                     cfg.copula_check.tau_samples, cfg.quadrature);
  json doc = {{"provenance", provenance(cfg, "validate-copula")},
              {"density_integral", rep.density_integral},
              {"max_fd_rel_error", rep.max_fd_rel_error},
              {"uniform_marginal_max_err", rep.uniform_marginal_max_err},
              {"tau_quadrature", rep.tau_quadrature},
              {"tau_empirical", rep.tau_empirical},
              {"tau_samples", rep.tau_samples},
              {"monotonicity", {{"order", rep.monotonicity_order}, {"pass", rep.monotonicity_pass}}}};
  auto put_optional = [&doc](const char* key, double v) {
    if (std::isnan(v))
      doc[key] = nullptr;
    else
      doc[key] = v;
  };
  put_optional("product_copula_max_dev", rep.product_copula_max_dev);
  put_optional("psi_ratio_density_max_rel_dev", rep.psi_ratio_density_max_rel_dev);
  put_optional("closed_form_density_max_rel_dev", rep.closed_form_density_max_rel_dev);
  write_atomic(out / "copula.json", doc.dump(2) + "\n");
}

inline void run_diagnose(const ExperimentConfig& cfg, const fs::path& out, int jobs) {
  require_analysis_lambda(cfg, "diagnose");
  const auto& es = cfg.es;
  const auto& spec = cfg.quadrature;

  RunOptions opt;
  opt.jobs = jobs;
  opt.config_hash = cfg.config_hash;
  const auto traces = run_chain(es, cfg.diagnose.t, cfg.diagnose.replicas, opt);
  DiagnosticsReport rep = ergodicity_diagnostics(traces, cfg.diagnose.alpha, cfg.diagnose.burn_in);

  const auto di = delta_infinity(es.movement, es.n, es.lambda, spec);
  rep.delta_infinity = di.estimate;
  rep.delta_infinity_ci = di.ci;
  rep.gain_limit = di.gain_limit;

  std::string beta_note;
  try {
    rep.beta = find_beta(es.movement, es.n, es.lambda, spec).beta;
  } catch (const no_beta_found& e) {
    beta_note = e.what();
  }
  for (int i = 0; i < cfg.drift.delta_points; ++i) {
    const double frac = cfg.drift.delta_points == 1
                            ? 0.0
                            : static_cast<double>(i) / (cfg.drift.delta_points - 1);
    const double delta = cfg.drift.delta_lo + frac * (cfg.drift.delta_hi - cfg.drift.delta_lo);
    rep.drift_curve.push_back(
        drift(es.movement, es.n, es.lambda, cfg.diagnose.alpha, delta, spec));
  }
  double mass_err = 0.0;
  for (double d : cfg.kernel.delta_grid) {
    const double p = transition_prob(es.movement, es.n, es.lambda, d, 0.0,
                                     std::numeric_limits<double>::infinity(), spec);
    mass_err = std::max(mass_err, std::fabs(p - 1.0));
  }
  rep.kernel_mass_error = mass_err;

  json curve = json::array();
  for (const auto& p : rep.drift_curve) curve.push_back(to_json(p));
  json doc = {{"provenance", provenance(cfg, "diagnose")},
              {"delta_infinity", {{"estimate", rep.delta_infinity},
                                  {"ci", rep.delta_infinity_ci},
                                  {"gain_limit", rep.gain_limit}}},
              {"beta", std::isnan(rep.beta) ? json(nullptr) : json(rep.beta)},
              {"beta_note", beta_note},
              {"drift_curve", curve},
              {"kernel_mass_error", rep.kernel_mass_error},
              {"ks_stationarity", rep.ks_stationarity},
              {"geometric_rate_fit", {{"rate", rep.geometric_rate_fit.rate},
                                      {"r_squared", rep.geometric_rate_fit.r_squared}}},
              {"d_mean", rep.d_mean},
              {"d_mean_se", rep.d_mean_se},
              {"slices", {{"t1", rep.slice_t1}, {"t2", rep.slice_t2}, {"window", rep.window}}},
              {"burn_in", rep.burn_in},
              {"alpha", rep.alpha},
              {"convergent", rep.convergent},
              {"assessment", rep.assessment},
              {"T", cfg.diagnose.t},
              {"replicas", cfg.diagnose.replicas}};
  write_atomic(out / "diagnostics.json", doc.dump(2) + "\n");
}

}  // namespace detail

/// Dispatch a subcommand, writing artifacts under out_dir. Exit status: 0 on
/// success, 1 on validation failure, 2 on numeric inconsistency. Failures
/// also emit a one-line machine-readable error record on stderr.
inline int run_subcommand(const ExperimentConfig& cfg, const std::string& name,
                          const fs::path& out_dir, int jobs = 1) {
  auto emit = [](const std::string& type, const std::string& message,
                 const std::vector<std::string>& violations = {}) {
    json err = {{"error", {{"type", type}, {"message", message}}}};
    if (!violations.empty()) err["error"]["violations"] = violations;
    std::cerr << err.dump() << "\n";
  };
  try {
    fs::create_directories(out_dir);
    if (name == "simulate")
      detail::run_simulate(cfg, out_dir, jobs);
    else if (name == "kernel")
      detail::run_kernel(cfg, out_dir, jobs);
    else if (name == "drift")
      detail::run_drift(cfg, out_dir, jobs);
    else if (name == "delta-inf")
      detail::run_delta_inf(cfg, out_dir, jobs);
    else if (name == "validate-copula")
      detail::run_validate_copula(cfg, out_dir, jobs);
    else if (name == "diagnose")
      detail::run_diagnose(cfg, out_dir, jobs);
    else {
      emit("usage", "unknown subcommand '" + name + "'");
      return kExitValidation;
    }
    return kExitOk;
  } catch (const config_error& e) {
    emit("validation", "config rejected", e.violations());
    return kExitValidation;
  } catch (const numeric_error& e) {
    emit("numeric", e.what());
    return kExitNumeric;
  } catch (const divergent_moment& e) {
    emit("numeric", e.what());
    return kExitNumeric;
  } catch (const std::domain_error& e) {
    emit("validation", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    emit("internal", e.what());
    return kExitValidation;
  }
}

}  // namespace esml::cli

#endif  // ESML_RUNNER_HPP
