#include "mhspectral/cone.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mhs {

Shape::Shape(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw DomainError("shape needs at least one block");
  offsets_.reserve(sizes_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t n : sizes_) {
    if (n == 0) throw DomainError("every block needs at least one coordinate");
    offsets_.push_back(offsets_.back() + n);
  }
}

std::size_t Shape::block_of(std::size_t flat) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), flat);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (!(a == b)) throw ShapeError(std::string(what) + ": shape mismatch");
}

bool BlockScaling::positive() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
}

bool BlockScaling::nonnegative() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

BlockScaling operator*(const BlockScaling& a, const BlockScaling& b) {
  if (a.size() != b.size()) throw ShapeError("blockwise product: length mismatch");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return BlockScaling(std::move(out));
}

ProductVector::ProductVector(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_.total(), fill) {}

ProductVector::ProductVector(Shape shape, std::vector<double> flat)
    : shape_(std::move(shape)), data_(std::move(flat)) {
  if (data_.size() != shape_.total()) throw ShapeError("flat data does not match shape");
}

ProductVector ProductVector::from_blocks(const std::vector<std::vector<double>>& blocks) {
  std::vector<std::size_t> sizes;
  std::vector<double> flat;
  for (const auto& b : blocks) {
    sizes.push_back(b.size());
    flat.insert(flat.end(), b.begin(), b.end());
  }
  return ProductVector(Shape(std::move(sizes)), std::move(flat));
}

std::span<const double> ProductVector::block(std::size_t i) const {
  return std::span<const double>(data_).subspan(shape_.offset(i), shape_.size(i));
}

std::span<double> ProductVector::block(std::size_t i) {
  return std::span<double>(data_).subspan(shape_.offset(i), shape_.size(i));
}

std::vector<std::vector<double>> ProductVector::to_blocks() const {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < blocks(); ++i) {
    auto b = block(i);
    out.emplace_back(b.begin(), b.end());
  }
  return out;
}

bool ProductVector::nonneg() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v >= 0.0; });
}

bool ProductVector::semipos() const {
  if (!nonneg()) return false;
  for (std::size_t i = 0; i < blocks(); ++i) {
    auto b = block(i);
    if (std::none_of(b.begin(), b.end(), [](double v) { return v != 0.0; })) return false;
  }
  return true;
}

bool ProductVector::pos() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v > 0.0; });
}

bool ProductVector::approx_pos(double floor) const {
  return std::all_of(data_.begin(), data_.end(), [floor](double v) { return v > floor; });
}

bool ProductVector::finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

BlockNorm BlockNorm::p_norm(double p) {
  if (!(p >= 1.0)) throw DomainError("p-norm exponent must lie in [1, inf]");
  return BlockNorm(p);
}

BlockNorm BlockNorm::weighted_l1(std::vector<double> phi) {
  if (phi.empty() || std::any_of(phi.begin(), phi.end(), [](double v) { return !(v > 0.0); }))
    throw DomainError("weighted l1 functional needs a strictly positive weight vector");
  return BlockNorm(std::move(phi));
}

double BlockNorm::operator()(std::span<const double> x) const {
  if (!is_p_norm()) {
    const auto& w = phi();
    if (w.size() != x.size()) throw ShapeError("weighted l1 functional: length mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * std::abs(x[j]);
    return s;
  }
  const double q = p();
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (std::isinf(q) || scale == 0.0) return scale;
  if (q == 1.0) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
  }
  // Scaled to keep |v|^q representable.
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v) / scale, q);
  return scale * std::pow(s, 1.0 / q);
}

NormSpec NormSpec::uniform(std::size_t d, double p) {
  return NormSpec(std::vector<BlockNorm>(d, BlockNorm::p_norm(p)));
}

void NormSpec::check(const Shape& shape) const {
  if (norms_.size() != shape.blocks()) throw ShapeError("norm spec: one norm per block required");
  for (std::size_t i = 0; i < norms_.size(); ++i) {
    if (!norms_[i].is_p_norm() && norms_[i].phi().size() != shape.size(i))
      throw ShapeError("norm spec: phi length does not match block size");
  }
}

ProductVector scale_blocks(const BlockScaling& alpha, const ProductVector& x) {
  if (alpha.size() != x.blocks()) throw ShapeError("scale_blocks: one scale per block required");
  ProductVector out = x;
  for (std::size_t i = 0; i < x.blocks(); ++i)
    for (double& v : out.block(i)) v *= alpha[i];
  return out;
}

BlockScaling matrix_power_scale(const BlockScaling& alpha, const Matrix& B) {
  const auto n = static_cast<Eigen::Index>(alpha.size());
  if (B.rows() != n || B.cols() != n) throw ShapeError("matrix_power_scale: dimension mismatch");
  std::vector<double> out(alpha.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    double log_sum = 0.0;
    bool zero = false;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double e = B(i, k);
      const double a = alpha[static_cast<std::size_t>(k)];
      if (e == 0.0) continue;  // 0^0 = 1
      if (a < 0.0) throw DomainError("matrix_power_scale: negative base");
      if (a == 0.0) {
        if (e < 0.0) throw DomainError("matrix_power_scale: zero base with negative exponent");
        zero = true;
        continue;
      }
      log_sum += e * std::log(a);
    }
    out[static_cast<std::size_t>(i)] = zero ? 0.0 : std::exp(log_sum);
  }
  return BlockScaling(std::move(out));
}

BlockScaling block_norms(const ProductVector& x, const NormSpec& norms) {
  norms.check(x.shape());
  std::vector<double> out(x.blocks());
  for (std::size_t i = 0; i < x.blocks(); ++i) out[i] = norms[i](x.block(i));
  return BlockScaling(std::move(out));
}

ProductVector normalize(const ProductVector& x, const NormSpec& norms) {
  BlockScaling n = block_norms(x, norms);
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(n[i] > 0.0) || !std::isfinite(n[i]))
      throw DomainError("normalize: block " + std::to_string(i) + " is zero or not finite");
    n[i] = 1.0 / n[i];
  }
  return scale_blocks(n, x);
}

double weighted_norm_product(const ProductVector& x, std::span<const double> weights,
                             const NormSpec& norms) {
  if (weights.size() != x.blocks()) throw ShapeError("weighted_norm_product: one weight per block");
  const BlockScaling n = block_norms(x, norms);
  double log_sum = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(weights[i] > 0.0)) throw DomainError("weighted_norm_product: weights must be positive");
    if (n[i] == 0.0) return 0.0;
    log_sum += weights[i] * std::log(n[i]);
  }
  return std::exp(log_sum);
}

Order partial_order_compare(const ProductVector& x, const ProductVector& y) {
  require_same_shape(x.shape(), y.shape(), "partial_order_compare");
  std::size_t below = 0, above = 0, equal = 0;
  auto xs = x.flat();
  auto ys = y.flat();
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (xs[k] < ys[k]) ++below;
    else if (xs[k] > ys[k]) ++above;
    else ++equal;
  }
  if (below == 0 && above == 0) return Order::eq;
  if (above == 0) return equal == 0 ? Order::lt : Order::lneq;
  if (below == 0) return equal == 0 ? Order::gt : Order::gneq;
  return Order::incomparable;
}

bool leq(const ProductVector& x, const ProductVector& y) {
  const Order o = partial_order_compare(x, y);
  return o == Order::eq || o == Order::lt || o == Order::lneq;
}

const char* to_string(Order order) {
  switch (order) {
    case Order::eq: return "eq";
    case Order::lt: return "lt";
    case Order::lneq: return "lneq";
    case Order::gt: return "gt";
    case Order::gneq: return "gneq";
    case Order::incomparable: return "incomparable";
  }
  return "?";
}

}  // namespace mhs
