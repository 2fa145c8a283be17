#pragma once

// Analysis of the homogeneity matrix A: spectral radius, Perron and contraction weights,
// Lipschitz constant, irreducibility and primitivity of nonnegative patterns.

#include "mhspectral/cone.hpp"
#include "mhspectral/metrics.hpp"

namespace mhs {

/// Nonnegative d x d matrix with a positive entry in every row.
class HomogeneityMatrix {
 public:
  HomogeneityMatrix() = default;
  explicit HomogeneityMatrix(Matrix entries);
  HomogeneityMatrix(std::initializer_list<std::initializer_list<double>> rows);

  const Matrix& matrix() const { return entries_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  Matrix entries_;
};

/// rho(A) of a nonnegative square matrix.
double spectral_radius(const Matrix& A);

/// Left Perron vector: b in the open simplex with A^T b = rho(A) b.
/// Throws NumericalError when A^T has no positive eigenvector for rho(A).
WeightVector perron_weights(const Matrix& A);

struct WeightSearchResult {
  WeightVector b;
  double r = 0.0;     ///< A^T b <= r b componentwise
  bool exact = false; ///< r = rho(A) attained by a true Perron vector
};

/// Weights b with A^T b <= r b and r in [rho(A), 1). Requires rho(A) < 1.
WeightSearchResult contraction_weights(const Matrix& A);

/// C = max_i (A^T b)_i / b_i.
double lipschitz_bound(const Matrix& A, const WeightVector& b);

inline constexpr double kPatternThreshold = 1e-12;

/// Boolean pattern of `M`: entries strictly above `threshold`.
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> pattern(const Matrix& M,
                                                            double threshold = kPatternThreshold);

bool is_irreducible(const Matrix& A, double threshold = kPatternThreshold);
bool is_primitive(const Matrix& A, double threshold = kPatternThreshold);

}  // namespace mhs
