#pragma once

// Blockwise ratio extrema and the weighted Hilbert / Thompson metrics on K_{++}.

#include <span>
#include <vector>

#include "mhspectral/cone.hpp"

namespace mhs {

/// Strictly positive per-block weights b.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> entries);
  WeightVector(std::initializer_list<double> entries)
      : WeightVector(std::vector<double>(entries)) {}
  static WeightVector uniform(std::size_t d);

  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<double>& values() const { return entries_; }
  operator std::span<const double>() const { return entries_; }

  /// Sum equals one within 1e-12.
  bool normalized() const;
  /// Rescaled copy lying in the open simplex.
  WeightVector normalized_copy() const;

 private:
  std::vector<double> entries_;
};

/// M(x/y) and m(x/y): blockwise maxima and minima of entry ratios.
struct RatioExtrema {
  BlockScaling maxima;
  BlockScaling minima;
};

/// Entries at or below this are nonpositive for the metrics.
inline constexpr double kMetricFloor = 1e-300;

/// Requires y in K_{++} and x in K_+.
RatioExtrema ratio_extrema(const ProductVector& x, const ProductVector& y);

/// mu_b(x, y) = sum_i b_i ln(M_i(x/y) / m_i(x/y)).
double hilbert_metric(const ProductVector& x, const ProductVector& y, const WeightVector& b);

/// bar-mu_b(x, y) = sum_i b_i ln max(M_i(x/y), M_i(y/x)).
double thompson_metric(const ProductVector& x, const ProductVector& y, const WeightVector& b);

}  // namespace mhs
