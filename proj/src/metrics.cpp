#include "mhspectral/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mhs {

WeightVector::WeightVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw DomainError("weight vector must not be empty");
  for (double v : entries_)
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("weights must be strictly positive");
}

WeightVector WeightVector::uniform(std::size_t d) {
  return WeightVector(std::vector<double>(d, 1.0 / static_cast<double>(d)));
}

bool WeightVector::normalized() const {
  return std::abs(std::accumulate(entries_.begin(), entries_.end(), 0.0) - 1.0) <= 1e-12;
}

WeightVector WeightVector::normalized_copy() const {
  const double s = std::accumulate(entries_.begin(), entries_.end(), 0.0);
  std::vector<double> out(entries_);
  for (double& v : out) v /= s;
  return WeightVector(std::move(out));
}

namespace {

// Blockwise max and min of log(x) - log(y).
void log_ratio_extrema(const ProductVector& x, const ProductVector& y, std::vector<double>& hi,
                       std::vector<double>& lo) {
  require_same_shape(x.shape(), y.shape(), "ratio_extrema");
  const std::size_t d = x.blocks();
  hi.assign(d, -std::numeric_limits<double>::infinity());
  lo.assign(d, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < d; ++i) {
    auto xb = x.block(i);
    auto yb = y.block(i);
    for (std::size_t j = 0; j < xb.size(); ++j) {
      const double r = std::log(xb[j]) - std::log(yb[j]);
      hi[i] = std::max(hi[i], r);
      lo[i] = std::min(lo[i], r);
    }
  }
}

void require_metric_domain(const ProductVector& v, const char* what) {
  for (double e : v.flat())
    if (!(e > kMetricFloor) || !std::isfinite(e))
      throw DomainError(std::string(what) + ": metrics are defined on strictly positive vectors");
}

}  // namespace

RatioExtrema ratio_extrema(const ProductVector& x, const ProductVector& y) {
  if (!y.pos()) throw DomainError("ratio_extrema: denominator must be strictly positive");
  if (!x.nonneg()) throw DomainError("ratio_extrema: numerator must be nonnegative");
  require_same_shape(x.shape(), y.shape(), "ratio_extrema");
  std::vector<double> hi(x.blocks(), 0.0), lo(x.blocks(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < x.blocks(); ++i) {
    auto xb = x.block(i);
    auto yb = y.block(i);
    for (std::size_t j = 0; j < xb.size(); ++j) {
      const double r = xb[j] / yb[j];
      hi[i] = std::max(hi[i], r);
      lo[i] = std::min(lo[i], r);
    }
  }
  return {BlockScaling(std::move(hi)), BlockScaling(std::move(lo))};
}

double hilbert_metric(const ProductVector& x, const ProductVector& y, const WeightVector& b) {
  require_metric_domain(x, "hilbert_metric");
  require_metric_domain(y, "hilbert_metric");
  if (b.size() != x.blocks()) throw ShapeError("hilbert_metric: one weight per block");
  std::vector<double> hi, lo;
  log_ratio_extrema(x, y, hi, lo);
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += b[i] * (hi[i] - lo[i]);
  return s;
}

double thompson_metric(const ProductVector& x, const ProductVector& y, const WeightVector& b) {
  require_metric_domain(x, "thompson_metric");
  require_metric_domain(y, "thompson_metric");
  if (b.size() != x.blocks()) throw ShapeError("thompson_metric: one weight per block");
  std::vector<double> hi, lo;
  log_ratio_extrema(x, y, hi, lo);
  // M_i(y/x) = 1 / m_i(x/y)
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += b[i] * std::max({hi[i], -lo[i], 0.0});
  return s;
}

}  // namespace mhs
