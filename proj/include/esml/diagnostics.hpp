#ifndef ESML_DIAGNOSTICS_HPP
#define ESML_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "esml/analysis.hpp"
#include "esml/errors.hpp"
#include "esml/simulate.hpp"
#include "esml/stats.hpp"

namespace esml {

struct RateFit {
  double rate = std::numeric_limits<double>::quiet_NaN();
  double r_squared = 0.0;
};

/// Statistical ergodicity diagnostics plus the analytic quantities the
/// diagnose subcommand attaches (delta-infinity, beta, drift curve, kernel
/// mass error). Fields not computed by a given path stay NaN/empty.
struct DiagnosticsReport {
  double delta_infinity = std::numeric_limits<double>::quiet_NaN();
  double delta_infinity_ci = std::numeric_limits<double>::quiet_NaN();
  double gain_limit = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  DriftCurve drift_curve;
  double kernel_mass_error = std::numeric_limits<double>::quiet_NaN();

  double ks_stationarity = std::numeric_limits<double>::quiet_NaN();
  RateFit geometric_rate_fit;
  double d_mean = std::numeric_limits<double>::quiet_NaN();
  double d_mean_se = std::numeric_limits<double>::quiet_NaN();
  long long slice_t1 = 0, slice_t2 = 0;
  long long window = 0;
  long long burn_in = 0;
  double alpha = 0.0;
  bool convergent = false;
  std::string assessment;
};

/// Convergence proxies from simulated constant-sigma traces:
///  - two-sample KS between pooled D-windows ending at T/2 and at T,
///  - a geometric fit of |E V_alpha(D_t) - tail mean| over the late run,
///  - the long-run mean of D with a cross-replica standard error.
/// A chain is flagged non-convergent when the KS distance stays large or the
/// fitted rate reaches 1.
inline DiagnosticsReport ergodicity_diagnostics(std::span<const Trace> traces, double alpha,
                                                long long burn_in = -1) {
  if (traces.empty()) throw sample_size_error("ergodicity_diagnostics: no traces");
  const long long T = static_cast<long long>(traces.front().rows.size());
  for (const auto& tr : traces) {
    if (static_cast<long long>(tr.rows.size()) != T)
      throw std::domain_error("ergodicity_diagnostics: traces must have equal length");
    if (!tr.rows.empty() && tr.rows.front().resample_counts.size() < 2)
      throw std::domain_error("ergodicity_diagnostics: traces must come from lambda >= 2 runs");
  }
  const double sigma0 = traces.front().rows.front().sigma;
  for (const auto& tr : traces)
    for (const auto& row : tr.rows)
      if (row.sigma != sigma0)
        throw std::domain_error("ergodicity_diagnostics: step size must be constant");

  if (burn_in < 0) burn_in = T / 2;
  DiagnosticsReport rep;
  rep.alpha = alpha;
  rep.burn_in = burn_in;

  const long long w = std::max<long long>(1, T / 20);
  rep.window = w;
  rep.slice_t1 = T / 2;
  rep.slice_t2 = T;
  const long long min_samples = 1000;
  const long long slice_samples = w * static_cast<long long>(traces.size());
  if (slice_samples < min_samples)
    throw sample_size_error("ergodicity_diagnostics: fewer than 1000 samples per time slice");

  std::vector<double> slice1, slice2;
  slice1.reserve(static_cast<std::size_t>(slice_samples));
  slice2.reserve(static_cast<std::size_t>(slice_samples));
  for (const auto& tr : traces) {
    for (long long t = rep.slice_t1 - w; t < rep.slice_t1; ++t)
      slice1.push_back(tr.rows[static_cast<std::size_t>(t)].D);
    for (long long t = rep.slice_t2 - w; t < rep.slice_t2; ++t)
      slice2.push_back(tr.rows[static_cast<std::size_t>(t)].D);
  }
  rep.ks_stationarity = stats::ks_statistic_2sample(slice1, slice2);

  // E V_alpha(D_t) over replicas, per generation
  std::vector<double> ev(static_cast<std::size_t>(T), 0.0);
  for (const auto& tr : traces)
    for (long long t = 0; t < T; ++t)
      ev[static_cast<std::size_t>(t)] += std::exp(alpha * tr.rows[static_cast<std::size_t>(t)].D);
  for (auto& v : ev) v /= static_cast<double>(traces.size());

  const long long tail_start = T - std::max<long long>(1, T / 10);
  double tail_mean = 0.0;
  for (long long t = tail_start; t < T; ++t) tail_mean += ev[static_cast<std::size_t>(t)];
  tail_mean /= static_cast<double>(T - tail_start);

  std::vector<double> ts, ys;
  for (long long t = T / 2; t < tail_start; ++t) {
    const double diff = std::fabs(ev[static_cast<std::size_t>(t)] - tail_mean);
    ts.push_back(static_cast<double>(t));
    ys.push_back(std::log(std::max(diff, 1e-300)));
  }
  if (ts.size() >= 3) {
    const auto fit = stats::linear_fit(ts, ys);
    rep.geometric_rate_fit.rate = std::exp(fit.slope);
    rep.geometric_rate_fit.r_squared = fit.r_squared;
  }

  // long-run mean of D: per-replica time averages, spread across replicas
  std::vector<double> replica_means;
  replica_means.reserve(traces.size());
  for (const auto& tr : traces) {
    double s = 0.0;
    long long cnt = 0;
    for (long long t = burn_in; t < T; ++t) {
      s += tr.rows[static_cast<std::size_t>(t)].D;
      ++cnt;
    }
    if (cnt > 0) replica_means.push_back(s / static_cast<double>(cnt));
  }
  const auto mv = stats::mean_var(replica_means);
  rep.d_mean = mv.mean;
  rep.d_mean_se = mv.stderr_;

  const bool ks_ok = rep.ks_stationarity < 0.05;
  const bool rate_ok =
      !(rep.geometric_rate_fit.rate >= 1.01);  // NaN rate does not flag by itself
  rep.convergent = ks_ok && rate_ok;
  if (rep.convergent) {
    rep.assessment = "stationary within tolerance: KS=" + std::to_string(rep.ks_stationarity) +
                     ", rate=" + std::to_string(rep.geometric_rate_fit.rate);
  } else {
    rep.assessment = std::string("non-convergent: ") +
                     (!ks_ok ? "KS distance between late slices not small; " : "") +
                     (!rate_ok ? "fitted rate >= 1; " : "");
  }
  return rep;
}

}  // namespace esml

#endif  // ESML_DIAGNOSTICS_HPP
