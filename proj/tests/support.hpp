#pragma once

#include <cmath>
#include <random>

#include <doctest.h>

#include "mhspectral/cone.hpp"

namespace testing {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline mhs::Matrix random_positive_matrix(std::mt19937_64& rng, Eigen::Index rows,
                                          Eigen::Index cols, double lo = 0.05, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  mhs::Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = dist(rng);
  return M;
}

inline double max_abs_diff(const mhs::ProductVector& a, const mhs::ProductVector& b) {
  return (a.as_eigen() - b.as_eigen()).cwiseAbs().maxCoeff();
}

}  // namespace testing
