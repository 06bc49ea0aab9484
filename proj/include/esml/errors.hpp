#ifndef ESML_ERRORS_HPP
#define ESML_ERRORS_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace esml {

/// Input outside an operation's documented domain. Plain std::domain_error is
/// used directly where no payload is needed; this alias keeps call sites uniform.
using domain_error = std::domain_error;

/// Two independent numeric routes (quadrature vs Monte Carlo, or a root
/// finder that must converge) disagree beyond their combined tolerance.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Resampling hit the configured attempt cap. Carries the attempt count so a
/// pathologically small feasible mass is diagnosable rather than a hang.
class resample_exhausted : public std::runtime_error {
 public:
  resample_exhausted(long long attempts, double delta, const std::string& context = {})
      : std::runtime_error("resampling exhausted after " + std::to_string(attempts) +
                           " attempts at threshold " + std::to_string(delta) +
                           (context.empty() ? "" : " (" + context + ")")),
        attempts_(attempts),
        delta_(delta) {}
  long long attempts() const noexcept { return attempts_; }
  double threshold() const noexcept { return delta_; }

 private:
  long long attempts_;
  double delta_;
};

/// The exponential-moment integrand failed the tail-decay test on expanding
/// domains: successive shell contributions stopped shrinking.
class divergent_moment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No threshold on the search grid keeps the conditional mean inside the
/// target bracket.
class no_beta_found : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few samples for a statistical diagnostic to be meaningful.
class sample_size_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config parsing/validation failure. Collects every violation, not just the
/// first, each prefixed with the name of the rule it breaks.
class config_error : public std::runtime_error {
 public:
  explicit config_error(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid config:";
    for (const auto& s : v) {
      out += "\n  - ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace esml

#endif  // ESML_ERRORS_HPP
