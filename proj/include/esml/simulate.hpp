#ifndef ESML_SIMULATE_HPP
#define ESML_SIMULATE_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "esml/constraint.hpp"
#include "esml/errors.hpp"
#include "esml/movement.hpp"
#include "esml/rng.hpp"

namespace esml {

/// Step-size update rule: Sigma_t = eta(generation movements) * Sigma_{t-1}.
/// Constant keeps Sigma = sigma forever (eta == 1, Sigma_0 = sigma), which is
/// the regime the analytic layer covers. Scale multiplies by a fixed factor
/// each generation. Custom receives the lambda raw first-attempt movements of
/// the generation and must return a strictly positive factor.
class StepSizeRule {
 public:
  enum class Kind { Constant, Scale, Custom };
  using EtaFn = std::function<double(std::span<const std::vector<double>>)>;

  static StepSizeRule constant(double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("StepSizeRule: sigma must be positive");
    StepSizeRule r;
    r.kind_ = Kind::Constant;
    r.sigma_ = sigma;
    return r;
  }
  static StepSizeRule scale(double factor) {
    if (!(factor > 0.0)) throw std::domain_error("StepSizeRule: factor must be positive");
    StepSizeRule r;
    r.kind_ = Kind::Scale;
    r.factor_ = factor;
    return r;
  }
  static StepSizeRule custom(EtaFn fn) {
    StepSizeRule r;
    r.kind_ = Kind::Custom;
    r.fn_ = std::move(fn);
    return r;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_constant() const noexcept { return kind_ == Kind::Constant; }
  double sigma() const noexcept { return sigma_; }
  double factor() const noexcept { return factor_; }

  double eta(std::span<const std::vector<double>> first_attempts) const {
    switch (kind_) {
      case Kind::Constant:
        return 1.0;
      case Kind::Scale:
        return factor_;
      case Kind::Custom: {
        const double e = fn_(first_attempts);
        if (!(e > 0.0)) throw std::domain_error("StepSizeRule: eta must return a positive value");
        return e;
      }
    }
    return 1.0;
  }

 private:
  Kind kind_ = Kind::Constant;
  double sigma_ = 1.0;
  double factor_ = 1.0;
  EtaFn fn_;
};

/// Full process parameters for one experiment.
struct ESConfig {
  int d = 2;
  int lambda = 2;
  ConstraintNormal n{std::vector<double>{1.0, 0.0}};
  MovementDistribution movement = MovementDistribution::standard_gaussian();
  StepSizeRule step = StepSizeRule::constant(1.0);
  std::vector<double> x0{-1.0, 0.0};
  double sigma0 = 1.0;
  long long resample_cap = 1'000'000;
  std::uint64_t seed = 0;

  /// All rule violations (empty means valid).
  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    if (d < 2) v.push_back("dimension: d must be >= 2");
    if (lambda < 1) v.push_back("population-size: lambda must be >= 1");
    auto nv = ConstraintNormal::structure_violations(n.components());
    v.insert(v.end(), nv.begin(), nv.end());
    if (n.dim() != static_cast<std::size_t>(d))
      v.push_back("constraint-normal-dimension: n must have exactly d components");
    if (x0.size() != static_cast<std::size_t>(d))
      v.push_back("initial-point-dimension: x0 must have exactly d components");
    else if (!(n.dot(x0) < 0.0))
      v.push_back("initial-feasibility: -n.x0 must be > 0");
    if (!(sigma0 > 0.0)) v.push_back("step-size: sigma0 must be > 0");
    if (step.is_constant() && sigma0 != step.sigma())
      v.push_back("step-size-consistency: sigma0 must equal sigma under the constant rule");
    if (resample_cap < 1) v.push_back("resample-cap: must be >= 1");
    return v;
  }
  void validate() const {
    auto v = violations();
    if (!v.empty()) throw config_error(std::move(v));
  }
};

/// Point of the normalized chain: D = -n.X/Sigma and the current step size.
struct ChainState {
  double D;
  double sigma;
};

struct Offspring {
  std::vector<double> movement;
  int attempts;  // j >= 1, number of draws used
};

struct GenerationRecord {
  long long t = 0;
  double D = 0.0;
  double sigma = 0.0;
  int selected = 0;  // 0-based offspring index
  std::vector<int> resample_counts;
  long long j_total = 0;
  double n_dot_move = 0.0;
  std::vector<double> selected_movement;
  std::vector<double> x;  // X_t, filled when requested
};

/// One simulated chain plus everything needed to reproduce it.
struct Trace {
  std::uint64_t master_seed = 0;
  std::uint64_t replica = 0;
  std::uint64_t stream_seed = 0;
  std::string stream_derivation = kStreamDerivation;
  std::uint64_t config_hash = 0;
  bool has_x = false;
  std::vector<GenerationRecord> rows;
};

namespace detail {

template <class Draw>
inline std::pair<std::vector<double>, int> resample_from(std::vector<double> first,
                                                         const ConstraintNormal& n, double delta,
                                                         long long cap, const Draw& draw) {
  if (n.dot(first) < delta) return {std::move(first), 1};
  for (long long j = 2; j <= cap; ++j) {
    std::vector<double> x = draw();
    if (n.dot(x) < delta) return {std::move(x), static_cast<int>(j)};
  }
  throw resample_exhausted(cap, delta);
}

}  // namespace detail

/// Draw movements until one lands in the feasible half-space n.x < delta.
/// Returns the accepted movement and the number of draws used (geometric with
/// success probability halfspace_mass(m, n, delta)).
inline std::pair<std::vector<double>, int> resample_movement(const MovementDistribution& m,
                                                             const ConstraintNormal& n,
                                                             double delta, long long cap,
                                                             RandomStream& rng) {
  if (!(delta > 0.0)) throw std::domain_error("resample_movement: delta must be positive");
  if (cap < 1) throw std::domain_error("resample_movement: cap must be >= 1");
  const int d = static_cast<int>(n.dim());
  auto draw = [&] { return m.sample(d, rng); };
  return detail::resample_from(draw(), n, delta, cap, draw);
}

/// lambda independently resampled movements at threshold state.D.
inline std::vector<Offspring> generate_offspring(const ChainState& state, const ESConfig& cfg,
                                                 RandomStream& rng) {
  std::vector<Offspring> out;
  out.reserve(static_cast<std::size_t>(cfg.lambda));
  for (int i = 0; i < cfg.lambda; ++i) {
    auto [x, j] = resample_movement(cfg.movement, cfg.n, state.D, cfg.resample_cap, rng);
    out.push_back({std::move(x), j});
  }
  return out;
}

/// Index of the candidate with the largest first coordinate; ties go to the
/// lowest index.
inline std::size_t select_best(std::span<const std::vector<double>> candidates) {
  if (candidates.empty()) throw std::domain_error("select_best: empty candidate list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (candidates[i][0] > candidates[best][0]) best = i;
  return best;
}

/// One generation of the normalized chain. Under the constant rule the
/// update is exactly D' = D - n.M* with Sigma' = sigma; for scale/custom
/// rules the raw first attempts are drawn up front (they feed eta before
/// any feasibility test), the threshold is rescaled, and each offspring's
/// resampling continues from its first attempt.
inline std::pair<ChainState, GenerationRecord> step(const ChainState& state, const ESConfig& cfg,
                                                    RandomStream& rng) {
  if (!(state.D > 0.0 && state.sigma > 0.0))
    throw std::domain_error("step: state must have D > 0 and sigma > 0");

  std::vector<std::vector<double>> firsts;
  firsts.reserve(static_cast<std::size_t>(cfg.lambda));
  for (int i = 0; i < cfg.lambda; ++i) firsts.push_back(cfg.movement.sample(cfg.d, rng));

  const double eta = cfg.step.eta(firsts);
  const double sigma_g = state.sigma * eta;
  const double delta_g = state.D / eta;

  GenerationRecord rec;
  rec.D = delta_g;
  rec.sigma = sigma_g;
  rec.resample_counts.reserve(firsts.size());

  std::vector<std::vector<double>> movements;
  movements.reserve(firsts.size());
  auto draw = [&] { return cfg.movement.sample(cfg.d, rng); };
  for (auto& f : firsts) {
    auto [x, j] = detail::resample_from(std::move(f), cfg.n, delta_g, cfg.resample_cap, draw);
    movements.push_back(std::move(x));
    rec.resample_counts.push_back(j);
    rec.j_total += j;
  }

  const std::size_t sel = select_best(movements);
  rec.selected = static_cast<int>(sel);
  rec.selected_movement = movements[sel];
  rec.n_dot_move = cfg.n.dot(rec.selected_movement);

  const ChainState next{delta_g - rec.n_dot_move, sigma_g};
  return {next, rec};
}

struct RunOptions {
  int jobs = 1;
  bool log_x = false;
  std::uint64_t config_hash = 0;
};

namespace detail {

inline Trace simulate_one(const ESConfig& cfg, long long T, std::uint64_t replica,
                          const RunOptions& opt) {
  RandomStream rng = RandomStream::derived(cfg.seed, replica);
  Trace tr;
  tr.master_seed = cfg.seed;
  tr.replica = replica;
  tr.stream_seed = rng.seed();
  tr.config_hash = opt.config_hash;
  tr.has_x = opt.log_x;
  tr.rows.reserve(static_cast<std::size_t>(T));

  std::vector<double> x = cfg.x0;
  ChainState state{-cfg.n.dot(x) / cfg.sigma0, cfg.sigma0};
  for (long long t = 0; t < T; ++t) {
    try {
      auto [next, rec] = step(state, cfg, rng);
      rec.t = t;
      for (std::size_t k = 0; k < x.size(); ++k)
        x[k] += rec.sigma * rec.selected_movement[k];
      if (opt.log_x) rec.x = x;
      tr.rows.push_back(std::move(rec));
      state = next;
    } catch (const resample_exhausted& e) {
      throw resample_exhausted(e.attempts(), e.threshold(),
                               "replica " + std::to_string(replica) + ", generation " +
                                   std::to_string(t));
    }
  }
  return tr;
}

}  // namespace detail

/// Independent replicas of the chain; replica r uses the stream derived from
/// (seed, r), so results are identical for equal inputs regardless of the
/// worker count.
inline std::vector<Trace> run_chain(const ESConfig& cfg, long long T, int replicas,
                                    const RunOptions& opt = {}) {
  if (T < 1) throw std::domain_error("run_chain: T must be >= 1");
  if (replicas < 1) throw std::domain_error("run_chain: replicas must be >= 1");
  cfg.validate();

  std::vector<Trace> traces(static_cast<std::size_t>(replicas));
  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1 || replicas == 1) {
    for (int r = 0; r < replicas; ++r)
      traces[static_cast<std::size_t>(r)] =
          detail::simulate_one(cfg, T, static_cast<std::uint64_t>(r), opt);
    return traces;
  }

  std::exception_ptr error;
  std::vector<std::thread> workers;
  std::atomic<int> next_replica{0};
  std::mutex error_mutex;
  for (int w = 0; w < std::min(jobs, replicas); ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const int r = next_replica.fetch_add(1);
        if (r >= replicas) return;
        try {
          traces[static_cast<std::size_t>(r)] =
              detail::simulate_one(cfg, T, static_cast<std::uint64_t>(r), opt);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
  return traces;
}

/// One full-dimensional trajectory with every X_t logged.
inline Trace run_full_es(const ESConfig& cfg, long long T, RandomStream& rng) {
  if (T < 1) throw std::domain_error("run_full_es: T must be >= 1");
  cfg.validate();
  Trace tr;
  tr.master_seed = rng.seed();
  tr.stream_seed = rng.seed();
  tr.has_x = true;
  tr.rows.reserve(static_cast<std::size_t>(T));
  std::vector<double> x = cfg.x0;
  ChainState state{-cfg.n.dot(x) / cfg.sigma0, cfg.sigma0};
  for (long long t = 0; t < T; ++t) {
    auto [next, rec] = step(state, cfg, rng);
    rec.t = t;
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += rec.sigma * rec.selected_movement[k];
    rec.x = x;
    tr.rows.push_back(std::move(rec));
    state = next;
  }
  return tr;
}

}  // namespace esml

#endif  // ESML_SIMULATE_HPP
