#ifndef ESML_MARGINAL_HPP
#define ESML_MARGINAL_HPP

#include <stdexcept>

#include "esml/normal.hpp"

namespace esml {

/// One-dimensional marginal with a continuous strictly positive density.
/// Currently the Gaussian family; the enum leaves room for more.
class Marginal1D {
 public:
  enum class Family { Gaussian };

  static Marginal1D gaussian(double mean, double stddev) {
    if (!(stddev > 0.0)) throw std::domain_error("Marginal1D: stddev must be positive");
    return Marginal1D(Family::Gaussian, mean, stddev);
  }
  static Marginal1D standard_gaussian() { return gaussian(0.0, 1.0); }

  Family family() const noexcept { return family_; }
  double mean() const noexcept { return mean_; }
  double stddev() const noexcept { return stddev_; }

  double pdf(double x) const noexcept { return norm_pdf((x - mean_) / stddev_) / stddev_; }
  double cdf(double x) const noexcept { return norm_cdf((x - mean_) / stddev_); }

  /// Inverse CDF on (0,1).
  double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("Marginal1D::quantile: u must be in (0,1)");
    return mean_ + stddev_ * norm_quantile(u);
  }

  bool operator==(const Marginal1D&) const = default;

 private:
  Marginal1D(Family f, double mean, double stddev) : family_(f), mean_(mean), stddev_(stddev) {}
  Family family_;
  double mean_;
  double stddev_;
};

}  // namespace esml

#endif  // ESML_MARGINAL_HPP
