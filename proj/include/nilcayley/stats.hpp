#pragma once

#include <ostream>
#include <utility>
#include <vector>

namespace nilcayley {

/// Sorted sample with its right-continuous empirical CDF.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  explicit EmpiricalDistribution(std::vector<double> samples);

  std::size_t count() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  const std::vector<double>& values() const noexcept { return values_; }

  /// F(x) = #{v <= x} / n.
  double cdf(double x) const;
  /// Smallest sample v with F(v) >= p, p in (0, 1].
  double quantile(double p) const;
  double mean() const;

  /// Step points (value, F(value)) at each distinct sample value.
  std::vector<std::pair<double, double>> cdf_table() const;

 private:
  std::vector<double> values_;
};

/// sup_x |F_A(x) - F_B(x)|, exact, by a sweep over the merged samples.
double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

}  // namespace nilcayley
