#ifndef ESML_CONFIG_IO_HPP
#define ESML_CONFIG_IO_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "esml/errors.hpp"
#include "esml/hash.hpp"
#include "esml/quadrature.hpp"
#include "esml/simulate.hpp"

namespace esml {

struct SimulateParams {
  long long t = 100;
  int replicas = 1;
  bool log_x = false;
};

struct KernelParams {
  std::vector<double> delta_grid{0.1, 1.0, 5.0};
  double probe_delta = 1.0;
  double interval_lo = 0.0;
  double interval_hi = 1.0;
  std::vector<double> eps_list{1e-1, 1e-2, 1e-3, 1e-4};
};

struct DriftParams {
  std::vector<double> alphas{0.01, 0.05, 0.1, 0.2};
  double delta_lo = 2.0;
  double delta_hi = 10.0;
  int delta_points = 20;
};

struct CopulaCheckParams {
  int grid_points = 9;
  long long tau_samples = 100'000;
};

struct DiagnoseParams {
  long long t = 2000;
  int replicas = 1000;
  long long burn_in = -1;  // default: T/2
  double alpha = 0.1;
};

/// Everything a subcommand needs: the process definition plus per-subcommand
/// parameters, the parsed document, and its fingerprint.
struct ExperimentConfig {
  int version = 1;
  ESConfig es;
  QuadratureSpec quadrature;
  SimulateParams simulate;
  KernelParams kernel;
  DriftParams drift;
  CopulaCheckParams copula_check;
  DiagnoseParams diagnose;
  std::uint64_t config_hash = 0;
  nlohmann::json raw;
};

namespace detail {

// Collects violations instead of stopping at the first problem.
class ConfigReader {
 public:
  explicit ConfigReader(std::vector<std::string>& errs) : errs_(errs) {}

  bool has(const nlohmann::json& j, const char* key) const { return j.contains(key); }

  double number(const nlohmann::json& j, const std::string& path, const char* key,
                double fallback, bool required = false) {
    if (!j.contains(key)) {
      if (required) errs_.push_back("missing-field: " + path + "." + key);
      return fallback;
    }
    if (!j[key].is_number()) {
      errs_.push_back("type-mismatch: " + path + "." + key + " must be a number");
      return fallback;
    }
    return j[key].get<double>();
  }

  long long integer(const nlohmann::json& j, const std::string& path, const char* key,
                    long long fallback, bool required = false) {
    if (!j.contains(key)) {
      if (required) errs_.push_back("missing-field: " + path + "." + key);
      return fallback;
    }
    if (!j[key].is_number_integer()) {
      errs_.push_back("type-mismatch: " + path + "." + key + " must be an integer");
      return fallback;
    }
    return j[key].get<long long>();
  }

  bool boolean(const nlohmann::json& j, const std::string& path, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) {
      errs_.push_back("type-mismatch: " + path + "." + key + " must be a boolean");
      return fallback;
    }
    return j[key].get<bool>();
  }

  std::string text(const nlohmann::json& j, const std::string& path, const char* key,
                   const std::string& fallback, bool required = false) {
    if (!j.contains(key)) {
      if (required) errs_.push_back("missing-field: " + path + "." + key);
      return fallback;
    }
    if (!j[key].is_string()) {
      errs_.push_back("type-mismatch: " + path + "." + key + " must be a string");
      return fallback;
    }
    return j[key].get<std::string>();
  }

  std::vector<double> number_array(const nlohmann::json& j, const std::string& path,
                                   const char* key, std::vector<double> fallback,
                                   bool required = false) {
    if (!j.contains(key)) {
      if (required) errs_.push_back("missing-field: " + path + "." + key);
      return fallback;
    }
    if (!j[key].is_array()) {
      errs_.push_back("type-mismatch: " + path + "." + key + " must be an array of numbers");
      return fallback;
    }
    std::vector<double> out;
    for (const auto& e : j[key]) {
      if (!e.is_number()) {
        errs_.push_back("type-mismatch: " + path + "." + key + " must contain only numbers");
        return fallback;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  void error(std::string msg) { errs_.push_back(std::move(msg)); }

 private:
  std::vector<std::string>& errs_;
};

inline Marginal1D parse_marginal(const nlohmann::json& j, const std::string& path,
                                 ConfigReader& r) {
  const std::string family = r.text(j, path, "family", "gaussian");
  if (family != "gaussian") {
    r.error("unknown-family: " + path + ".family '" + family + "' (expected 'gaussian')");
    return Marginal1D::standard_gaussian();
  }
  const double mean = r.number(j, path, "mean", 0.0);
  const double sd = r.number(j, path, "stddev", 1.0);
  if (!(sd > 0.0)) {
    r.error("marginal-stddev: " + path + ".stddev must be positive");
    return Marginal1D::standard_gaussian();
  }
  return Marginal1D::gaussian(mean, sd);
}

inline Copula parse_copula(const nlohmann::json& j, const std::string& path, ConfigReader& r) {
  const std::string kind = r.text(j, path, "kind", "", true);
  if (kind == "product") return Copula::product();
  if (kind == "gumbel") {
    const double theta = r.number(j, path, "theta", 1.0, true);
    if (!(theta >= 1.0)) {
      r.error("gumbel-theta: " + path + ".theta must be >= 1");
      return Copula::product();
    }
    return Copula::gumbel(theta);
  }
  if (kind == "gaussian_copula") {
    const double rho = r.number(j, path, "rho", 0.0, true);
    if (!(rho > -1.0 && rho < 1.0)) {
      r.error("gaussian-copula-rho: " + path + ".rho must be in (-1,1)");
      return Copula::product();
    }
    return Copula::gaussian(rho);
  }
  if (!kind.empty())
    r.error("unknown-copula: " + path + ".kind '" + kind +
            "' (expected product|gumbel|gaussian_copula)");
  return Copula::product();
}

inline MovementDistribution parse_movement(const nlohmann::json& j, const std::string& path,
                                           ConfigReader& r) {
  const std::string kind = r.text(j, path, "kind", "", true);
  if (kind == "bivariate_gaussian") {
    auto mean = r.number_array(j, path, "mean", {0.0, 0.0});
    if (mean.size() != 2) {
      r.error("movement-mean: " + path + ".mean must have 2 components");
      mean = {0.0, 0.0};
    }
    Matrix2 cov{{{1.0, 0.0}, {0.0, 1.0}}};
    if (r.has(j, "cov")) {
      const auto& c = j["cov"];
      bool ok = c.is_array() && c.size() == 2 && c[0].is_array() && c[1].is_array() &&
                c[0].size() == 2 && c[1].size() == 2;
      if (ok)
        for (int i = 0; i < 2; ++i)
          for (int k = 0; k < 2; ++k) {
            if (!c[i][k].is_number()) ok = false;
          }
      if (!ok) {
        r.error("movement-cov: " + path + ".cov must be a 2x2 numeric matrix");
      } else {
        for (int i = 0; i < 2; ++i)
          for (int k = 0; k < 2; ++k) cov[i][k] = c[i][k].get<double>();
        const double det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
        if (cov[0][1] != cov[1][0] || !(cov[0][0] > 0.0 && det > 0.0)) {
          r.error("movement-cov: " + path + ".cov must be symmetric positive definite");
          cov = {{{1.0, 0.0}, {0.0, 1.0}}};
        }
      }
    }
    auto m = MovementDistribution::bivariate_gaussian({mean[0], mean[1]}, cov);
    if (r.has(j, "tail")) m = m.with_tail(parse_marginal(j["tail"], path + ".tail", r));
    return m;
  }
  if (kind == "composed") {
    Marginal1D m1 = r.has(j, "marginal1") ? parse_marginal(j["marginal1"], path + ".marginal1", r)
                                          : Marginal1D::standard_gaussian();
    Marginal1D m2 = r.has(j, "marginal2") ? parse_marginal(j["marginal2"], path + ".marginal2", r)
                                          : Marginal1D::standard_gaussian();
    Copula c = Copula::product();
    if (r.has(j, "copula"))
      c = parse_copula(j["copula"], path + ".copula", r);
    else
      r.error("missing-field: " + path + ".copula");
    auto m = MovementDistribution::composed(m1, m2, std::move(c));
    if (r.has(j, "tail")) m = m.with_tail(parse_marginal(j["tail"], path + ".tail", r));
    return m;
  }
  if (!kind.empty())
    r.error("unknown-movement: " + path + ".kind '" + kind +
            "' (expected bivariate_gaussian|composed)");
  return MovementDistribution::standard_gaussian();
}

inline StepSizeRule parse_step(const nlohmann::json& j, const std::string& path, ConfigReader& r,
                               double& sigma0) {
  const std::string kind = r.text(j, path, "kind", "constant");
  if (kind == "constant") {
    const double sigma = r.number(j, path, "sigma", 1.0, true);
    if (!(sigma > 0.0)) {
      r.error("step-size: " + path + ".sigma must be > 0");
      sigma0 = 1.0;
      return StepSizeRule::constant(1.0);
    }
    sigma0 = sigma;
    return StepSizeRule::constant(sigma);
  }
  if (kind == "scale") {
    const double factor = r.number(j, path, "factor", 1.0, true);
    sigma0 = r.number(j, path, "sigma0", 1.0, true);
    if (!(factor > 0.0)) {
      r.error("step-scale: " + path + ".factor must be > 0");
      return StepSizeRule::constant(1.0);
    }
    if (!(sigma0 > 0.0)) {
      r.error("step-size: " + path + ".sigma0 must be > 0");
      sigma0 = 1.0;
    }
    return StepSizeRule::scale(factor);
  }
  r.error("unknown-step-rule: " + path + ".kind '" + kind + "' (expected constant|scale)");
  sigma0 = 1.0;
  return StepSizeRule::constant(1.0);
}

}  // namespace detail

/// Parse and validate a config document. Collects every violation and throws
/// a single config_error listing all of them.
inline ExperimentConfig parse_config_json(const nlohmann::json& doc) {
  std::vector<std::string> errs;
  detail::ConfigReader r(errs);
  ExperimentConfig cfg;
  cfg.raw = doc;

  cfg.version = static_cast<int>(r.integer(doc, "", "version", 1, true));
  if (cfg.version != 1) r.error("unsupported-version: expected version 1");

  if (!doc.contains("es") || !doc["es"].is_object()) {
    r.error("missing-field: es (process definition)");
    throw config_error(std::move(errs));
  }
  const auto& es = doc["es"];
  cfg.es.d = static_cast<int>(r.integer(es, "es", "d", 2, true));
  cfg.es.lambda = static_cast<int>(r.integer(es, "es", "lambda", 2, true));
  const auto nvec = r.number_array(es, "es", "n", {1.0, 0.0}, true);
  const auto nviol = ConstraintNormal::structure_violations(nvec);
  for (const auto& v : nviol) errs.push_back(v);
  if (nviol.empty()) cfg.es.n = ConstraintNormal(nvec);
  if (es.contains("movement") && es["movement"].is_object())
    cfg.es.movement = detail::parse_movement(es["movement"], "es.movement", r);
  else
    r.error("missing-field: es.movement");
  if (es.contains("step") && es["step"].is_object())
    cfg.es.step = detail::parse_step(es["step"], "es.step", r, cfg.es.sigma0);
  else
    r.error("missing-field: es.step");
  cfg.es.x0 = r.number_array(es, "es", "x0", {-1.0, 0.0}, true);
  cfg.es.resample_cap = r.integer(es, "es", "resample_cap", 1'000'000);
  cfg.es.seed = static_cast<std::uint64_t>(r.integer(es, "es", "seed", 0, true));

  for (auto& v : cfg.es.violations())
    if (std::find(errs.begin(), errs.end(), v) == errs.end()) errs.push_back(v);

  if (doc.contains("quadrature")) {
    const auto& q = doc["quadrature"];
    cfg.quadrature.abs_tol = r.number(q, "quadrature", "abs_tol", cfg.quadrature.abs_tol);
    cfg.quadrature.rel_tol = r.number(q, "quadrature", "rel_tol", cfg.quadrature.rel_tol);
    cfg.quadrature.max_subdivisions = static_cast<int>(
        r.integer(q, "quadrature", "max_subdivisions", cfg.quadrature.max_subdivisions));
    cfg.quadrature.mc_samples =
        r.integer(q, "quadrature", "mc_samples", cfg.quadrature.mc_samples);
    cfg.quadrature.mc_seed = static_cast<std::uint64_t>(r.integer(
        q, "quadrature", "mc_seed", static_cast<long long>(cfg.quadrature.mc_seed)));
    if (!(cfg.quadrature.abs_tol > 0.0 && cfg.quadrature.rel_tol > 0.0))
      r.error("quadrature-tolerance: abs_tol and rel_tol must be positive");
  }

  if (doc.contains("simulate")) {
    const auto& s = doc["simulate"];
    cfg.simulate.t = r.integer(s, "simulate", "T", cfg.simulate.t);
    cfg.simulate.replicas = static_cast<int>(r.integer(s, "simulate", "replicas", 1));
    cfg.simulate.log_x = r.boolean(s, "simulate", "log_x", false);
    if (cfg.simulate.t < 1) r.error("simulate-horizon: simulate.T must be >= 1");
    if (cfg.simulate.replicas < 1) r.error("simulate-replicas: must be >= 1");
  }
  if (doc.contains("kernel")) {
    const auto& k = doc["kernel"];
    cfg.kernel.delta_grid = r.number_array(k, "kernel", "delta_grid", cfg.kernel.delta_grid);
    cfg.kernel.probe_delta = r.number(k, "kernel", "probe_delta", cfg.kernel.probe_delta);
    cfg.kernel.interval_lo = r.number(k, "kernel", "interval_lo", cfg.kernel.interval_lo);
    cfg.kernel.interval_hi = r.number(k, "kernel", "interval_hi", cfg.kernel.interval_hi);
    cfg.kernel.eps_list = r.number_array(k, "kernel", "eps_list", cfg.kernel.eps_list);
    for (double d : cfg.kernel.delta_grid)
      if (!(d > 0.0)) r.error("kernel-grid: delta grid values must be positive");
  }
  if (doc.contains("drift")) {
    const auto& d = doc["drift"];
    cfg.drift.alphas = r.number_array(d, "drift", "alpha_list", cfg.drift.alphas);
    cfg.drift.delta_lo = r.number(d, "drift", "delta_lo", cfg.drift.delta_lo);
    cfg.drift.delta_hi = r.number(d, "drift", "delta_hi", cfg.drift.delta_hi);
    cfg.drift.delta_points =
        static_cast<int>(r.integer(d, "drift", "delta_points", cfg.drift.delta_points));
    for (double a : cfg.drift.alphas)
      if (!(a > 0.0)) r.error("drift-alpha: alpha values must be positive");
    if (!(cfg.drift.delta_lo > 0.0 && cfg.drift.delta_hi > cfg.drift.delta_lo))
      r.error("drift-grid: need 0 < delta_lo < delta_hi");
    if (cfg.drift.delta_points < 1) r.error("drift-grid: delta_points must be >= 1");
  }
  if (doc.contains("validate_copula")) {
    const auto& v = doc["validate_copula"];
    cfg.copula_check.grid_points =
        static_cast<int>(r.integer(v, "validate_copula", "grid_points", 9));
    cfg.copula_check.tau_samples = r.integer(v, "validate_copula", "tau_samples", 100'000);
    if (cfg.copula_check.grid_points < 2) r.error("copula-grid: grid_points must be >= 2");
  }
  if (doc.contains("diagnose")) {
    const auto& g = doc["diagnose"];
    cfg.diagnose.t = r.integer(g, "diagnose", "T", cfg.diagnose.t);
    cfg.diagnose.replicas = static_cast<int>(r.integer(g, "diagnose", "replicas", 1000));
    cfg.diagnose.burn_in = r.integer(g, "diagnose", "burn_in", -1);
    cfg.diagnose.alpha = r.number(g, "diagnose", "alpha", 0.1);
    if (cfg.diagnose.t < 2) r.error("diagnose-horizon: diagnose.T must be >= 2");
    if (!(cfg.diagnose.alpha > 0.0)) r.error("diagnose-alpha: must be positive");
  }

  if (!errs.empty()) throw config_error(std::move(errs));
  cfg.config_hash = fnv1a64(doc.dump());
  return cfg;
}

inline ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error({"config-file: cannot open '" + path.string() + "'"});
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/true,
                                /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error({std::string("config-syntax: ") + e.what()});
  }
  return parse_config_json(doc);
}

/// lambda >= 2 is required by every operation built on the selected-movement
/// law; simulate alone accepts lambda = 1.
inline void require_analysis_lambda(const ExperimentConfig& cfg, const std::string& subcommand) {
  if (cfg.es.lambda < 2)
    throw config_error({"analysis-population: lambda must be >= 2 for subcommand '" + subcommand +
                        "' (selection law is built on the best of lambda >= 2 offspring)"});
}

}  // namespace esml

#endif  // ESML_CONFIG_IO_HPP
