#include "nilcayley/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nilcayley/errors.hpp"

namespace nilcayley {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples) : values_(std::move(samples)) {
  for (double v : values_)
    if (std::isnan(v)) throw PreconditionError("NaN in empirical sample");
  std::sort(values_.begin(), values_.end());
}

double EmpiricalDistribution::cdf(double x) const {
  if (values_.empty()) throw PreconditionError("cdf of an empty sample");
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EmpiricalDistribution::quantile(double p) const {
  if (values_.empty()) throw PreconditionError("quantile of an empty sample");
  if (!(p > 0 && p <= 1)) throw PreconditionError("quantile level must lie in (0, 1]");
  const auto n = static_cast<double>(values_.size());
  auto idx = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
  idx = std::clamp<std::size_t>(idx, 1, values_.size());
  return values_[idx - 1];
}

double EmpiricalDistribution::mean() const {
  if (values_.empty()) throw PreconditionError("mean of an empty sample");
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

std::vector<std::pair<double, double>> EmpiricalDistribution::cdf_table() const {
  std::vector<std::pair<double, double>> out;
  const auto n = static_cast<double>(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i + 1 < values_.size() && values_[i + 1] == values_[i]) continue;
    out.emplace_back(values_[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  if (a.empty() || b.empty()) throw PreconditionError("ks_distance needs two nonempty samples");
  const auto& x = a.values();
  const auto& y = b.values();
  const auto na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double sup = 0;
  while (i < x.size() || j < y.size()) {
    // next distinct value in the union; consume all copies on both sides
    double v;
    if (j == y.size() || (i < x.size() && x[i] <= y[j]))
      v = x[i];
    else
      v = y[j];
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    sup = std::max(sup, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

}  // namespace nilcayley
