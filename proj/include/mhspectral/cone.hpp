#pragma once

// Product-cone vectors K_+ = R^{n_1}_+ x ... x R^{n_d}_+ and the blockwise scaling algebra.

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mhspectral/error.hpp"

namespace mhs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Block structure (n_1, ..., n_d) of the product space.
class Shape {
 public:
  Shape() = default;
  explicit Shape(std::vector<std::size_t> sizes);
  Shape(std::initializer_list<std::size_t> sizes) : Shape(std::vector<std::size_t>(sizes)) {}

  std::size_t blocks() const { return sizes_.size(); }
  std::size_t size(std::size_t block) const { return sizes_.at(block); }
  std::size_t offset(std::size_t block) const { return offsets_.at(block); }
  std::size_t total() const { return offsets_.empty() ? 0 : offsets_.back(); }
  const std::vector<std::size_t>& sizes() const { return sizes_; }

  /// Block index owning flat coordinate `flat`.
  std::size_t block_of(std::size_t flat) const;

  bool operator==(const Shape& other) const { return sizes_ == other.sizes_; }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
};

void require_same_shape(const Shape& a, const Shape& b, const char* what);

/// One scale per block: alpha, beta, lambda, theta of the blockwise algebra.
class BlockScaling {
 public:
  BlockScaling() = default;
  explicit BlockScaling(std::vector<double> values) : values_(std::move(values)) {}
  BlockScaling(std::initializer_list<double> values) : values_(values) {}
  static BlockScaling constant(std::size_t d, double value) {
    return BlockScaling(std::vector<double>(d, value));
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  bool positive() const;
  bool nonnegative() const;

  /// Entrywise product alpha o beta.
  friend BlockScaling operator*(const BlockScaling& a, const BlockScaling& b);
  bool operator==(const BlockScaling& other) const = default;

 private:
  std::vector<double> values_;
};

/// A point of V = R^{n_1} x ... x R^{n_d}, stored block-major in one flat buffer.
class ProductVector {
 public:
  ProductVector() = default;
  explicit ProductVector(Shape shape, double fill = 0.0);
  ProductVector(Shape shape, std::vector<double> flat);
  static ProductVector from_blocks(const std::vector<std::vector<double>>& blocks);
  static ProductVector ones(const Shape& shape) { return ProductVector(shape, 1.0); }

  const Shape& shape() const { return shape_; }
  std::size_t blocks() const { return shape_.blocks(); }

  std::span<const double> block(std::size_t i) const;
  std::span<double> block(std::size_t i);
  double operator()(std::size_t i, std::size_t j) const { return data_[shape_.offset(i) + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[shape_.offset(i) + j]; }

  std::span<const double> flat() const { return data_; }
  std::span<double> flat() { return data_; }
  Eigen::Map<const Vector> as_eigen() const {
    return Eigen::Map<const Vector>(data_.data(), static_cast<Eigen::Index>(data_.size()));
  }

  std::vector<std::vector<double>> to_blocks() const;

  /// Membership in K_+ (all entries >= 0).
  bool nonneg() const;
  /// Membership in K_{+,0} (nonnegative and every block has a nonzero entry).
  bool semipos() const;
  /// Membership in K_{++} (all entries > 0).
  bool pos() const;
  /// Diagnostic positivity check: every entry above `floor`.
  bool approx_pos(double floor = 1e-14) const;
  bool finite() const;

  bool operator==(const ProductVector& other) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Per-block monotonic norm: a p-norm with p in [1, inf] or the functional <x_i, phi_i>.
class BlockNorm {
 public:
  static BlockNorm p_norm(double p);
  static BlockNorm weighted_l1(std::vector<double> phi);
  static BlockNorm infinity() { return p_norm(std::numeric_limits<double>::infinity()); }

  double operator()(std::span<const double> x) const;

  bool is_p_norm() const { return std::holds_alternative<double>(kind_); }
  double p() const { return std::get<double>(kind_); }
  const std::vector<double>& phi() const { return std::get<std::vector<double>>(kind_); }

  bool operator==(const BlockNorm& other) const = default;

 private:
  explicit BlockNorm(std::variant<double, std::vector<double>> kind) : kind_(std::move(kind)) {}
  std::variant<double, std::vector<double>> kind_;
};

class NormSpec {
 public:
  NormSpec() = default;
  explicit NormSpec(std::vector<BlockNorm> norms) : norms_(std::move(norms)) {}
  static NormSpec uniform(std::size_t d, double p = 2.0);

  std::size_t size() const { return norms_.size(); }
  const BlockNorm& operator[](std::size_t i) const { return norms_.at(i); }
  const std::vector<BlockNorm>& norms() const { return norms_; }

  /// Throws if the spec does not fit `shape` (block count, phi lengths).
  void check(const Shape& shape) const;

  bool operator==(const NormSpec& other) const = default;

 private:
  std::vector<BlockNorm> norms_;
};

/// alpha (x) x: block i scaled by alpha_i.
ProductVector scale_blocks(const BlockScaling& alpha, const ProductVector& x);

/// alpha^B with component i equal to prod_k alpha_k^{B_{i,k}}, evaluated in log space.
BlockScaling matrix_power_scale(const BlockScaling& alpha, const Matrix& B);

/// (||x_1||, ..., ||x_d||).
BlockScaling block_norms(const ProductVector& x, const NormSpec& norms);

/// Projects x in K_{+,0} onto S_+ by blockwise rescaling.
ProductVector normalize(const ProductVector& x, const NormSpec& norms);

/// prod_i ||x_i||^{b_i}. `weights` must be strictly positive.
double weighted_norm_product(const ProductVector& x, std::span<const double> weights,
                             const NormSpec& norms);

enum class Order { eq, lt, lneq, gt, gneq, incomparable };

/// Relation of x to y in the order induced by K_+ (lt means y - x in K_{++}).
Order partial_order_compare(const ProductVector& x, const ProductVector& y);

/// x <=_K y.
bool leq(const ProductVector& x, const ProductVector& y);

const char* to_string(Order order);

}  // namespace mhs
