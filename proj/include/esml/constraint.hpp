#ifndef ESML_CONSTRAINT_HPP
#define ESML_CONSTRAINT_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace esml {

/// Normal vector of the linear constraint n.x < 0 (feasible side is
/// -n.x > 0). Structural rule: when both leading components are positive
/// and d >= 3, every later component must be zero -- the constraint then
/// lives entirely in the first two coordinates, which is what the analytic
/// layer works with.
class ConstraintNormal {
 public:
  explicit ConstraintNormal(std::vector<double> n) : n_(std::move(n)) {
    const auto violations = structure_violations(n_);
    if (!violations.empty()) throw std::domain_error(violations.front());
  }

  /// Rule checks usable by config validation (collects all problems).
  static std::vector<std::string> structure_violations(const std::vector<double>& n) {
    std::vector<std::string> v;
    if (n.size() < 2) {
      v.push_back("constraint-normal-dimension: n must have at least 2 components");
      return v;
    }
    bool all_zero = true;
    for (double c : n)
      if (c != 0.0) all_zero = false;
    if (all_zero) v.push_back("constraint-normal-nonzero: n must not be the zero vector");
    if (n[0] > 0.0 && n[1] > 0.0) {
      for (std::size_t k = 2; k < n.size(); ++k) {
        if (n[k] != 0.0) {
          v.push_back(
              "constraint-normal-structure: component " + std::to_string(k + 1) +
              " must be zero when the first two components are positive");
        }
      }
    }
    return v;
  }

  std::size_t dim() const noexcept { return n_.size(); }
  double operator[](std::size_t i) const { return n_[i]; }
  const std::vector<double>& components() const noexcept { return n_; }

  double n1() const noexcept { return n_[0]; }
  double n2() const noexcept { return n_[1]; }

  /// Full-dimensional dot product (the simulation's feasibility test).
  double dot(std::span<const double> x) const {
    double s = 0.0;
    const std::size_t m = std::min(n_.size(), x.size());
    for (std::size_t i = 0; i < m; ++i) s += n_[i] * x[i];
    return s;
  }

  /// Dot product restricted to the first two components (the analytic
  /// layer's half-space geometry).
  double dot2(double x1, double x2) const noexcept { return n_[0] * x1 + n_[1] * x2; }

 private:
  std::vector<double> n_;
};

}  // namespace esml

#endif  // ESML_CONSTRAINT_HPP
