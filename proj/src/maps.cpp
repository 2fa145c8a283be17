#include "mhspectral/maps.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mhs {

MapInstance::MapInstance(Parts parts) {
  if (!parts.evaluator) throw DomainError("map instance needs an evaluator");
  if (parts.A.size() != parts.shape.blocks())
    throw ShapeError("homogeneity matrix size does not match the block count");
  parts_ = std::make_shared<const Parts>(std::move(parts));
}

MapInstance MapInstance::custom(Shape shape, HomogeneityMatrix A, Evaluator evaluator,
                                std::string label) {
  Parts p;
  p.shape = std::move(shape);
  p.A = std::move(A);
  p.evaluator = std::move(evaluator);
  p.smooth = false;
  p.label = std::move(label);
  return MapInstance(std::move(p));
}

ProductVector MapInstance::operator()(const ProductVector& x) const { return evaluate(*this, x); }

Matrix MapInstance::analytic_jacobian(const ProductVector& u) const {
  if (!parts_->jacobian) throw DomainError(label() + ": no analytic Jacobian");
  require_same_shape(u.shape(), shape(), "analytic_jacobian");
  return parts_->jacobian(u);
}

EdgeSet MapInstance::oracle_edges() const {
  if (!parts_->edges) throw DomainError(label() + ": no edge oracle");
  return parts_->edges();
}

EdgeSet MapInstance::oracle_dual_edges() const {
  if (!parts_->dual_edges) throw DomainError(label() + ": no dual edge oracle");
  return parts_->dual_edges();
}

ProductVector evaluate(const MapInstance& F, const ProductVector& x) {
  require_same_shape(x.shape(), F.shape(), "evaluate");
  if (!x.nonneg()) throw DomainError(F.label() + ": input has negative entries");
  if (F.positive_only() && !x.pos())
    throw DomainError(F.label() + ": evaluation is restricted to strictly positive vectors");
  ProductVector y = F.parts().evaluator(x);
  require_same_shape(y.shape(), F.shape(), "evaluate (output)");
  return y;
}

// ---- helpers ---------------------------------------------------------------------------

namespace {

void require_nonnegative(const Matrix& M, const char* what) {
  if (M.size() == 0) throw DomainError(std::string(what) + ": empty matrix");
  if ((M.array() < 0.0).any() || !M.allFinite())
    throw DomainError(std::string(what) + ": matrix must be finite and nonnegative");
}

void require_positive_rows(const Matrix& M, const char* what) {
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    if (!(M.row(i).maxCoeff() > 0.0))
      throw DomainError(std::string(what) + ": row " + std::to_string(i) + " is zero");
}

void require_positive_cols(const Matrix& M, const char* what) {
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    if (!(M.col(j).maxCoeff() > 0.0))
      throw DomainError(std::string(what) + ": column " + std::to_string(j) + " is zero");
}

Vector block_vec(const ProductVector& x, std::size_t i) {
  auto b = x.block(i);
  return Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
}

void set_block(ProductVector& x, std::size_t i, const Vector& v) {
  auto b = x.block(i);
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = v(static_cast<Eigen::Index>(j));
}

Matrix matrix_of(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Edges (k, l) -> (i, j) from the positive pattern of a block matrix (row (k,l), column (i,j)).
EdgeSet edges_from_pattern(const Shape& shape, const Matrix& P) {
  EdgeSet edges;
  for (Eigen::Index r = 0; r < P.rows(); ++r)
    for (Eigen::Index c = 0; c < P.cols(); ++c)
      if (P(r, c) > 0.0) {
        const auto rk = shape.block_of(static_cast<std::size_t>(r));
        const auto ci = shape.block_of(static_cast<std::size_t>(c));
        edges.insert({{rk, static_cast<std::size_t>(r) - shape.offset(rk)},
                      {ci, static_cast<std::size_t>(c) - shape.offset(ci)}});
      }
  return edges;
}

// Coordinate r vanishes along a one-coordinate probe iff its row has a single positive entry
// (sums of nonnegative terms) - used for linear-type families.
Matrix single_support_rows(const Matrix& P) {
  Matrix out = Matrix::Zero(P.rows(), P.cols());
  for (Eigen::Index r = 0; r < P.rows(); ++r) {
    Eigen::Index count = 0, at = 0;
    for (Eigen::Index c = 0; c < P.cols(); ++c)
      if (P(r, c) > 0.0) {
        ++count;
        at = c;
      }
    if (count == 1) out(r, at) = 1.0;
  }
  return out;
}

Matrix bipartite(const Matrix& M) {
  const Eigen::Index m = M.rows(), n = M.cols();
  Matrix P = Matrix::Zero(m + n, m + n);
  P.topRightCorner(m, n) = M;
  P.bottomLeftCorner(n, m) = M.transpose();
  return P;
}

}  // namespace

// ---- families --------------------------------------------------------------------------

MapInstance linear_map(const Matrix& M) {
  require_nonnegative(M, "linear_map");
  if (M.rows() != M.cols()) throw ShapeError("linear_map: matrix must be square");
  require_positive_rows(M, "linear_map");
  const Shape shape{static_cast<std::size_t>(M.rows())};
  MapInstance::Parts p;
  p.shape = shape;
  p.A = HomogeneityMatrix{{1.0}};
  p.evaluator = [M, shape](const ProductVector& x) {
    ProductVector y(shape);
    set_block(y, 0, M * block_vec(x, 0));
    return y;
  };
  p.jacobian = [M](const ProductVector&) { return M; };
  p.edges = [M, shape] { return edges_from_pattern(shape, M); };
  p.dual_edges = [M, shape] { return edges_from_pattern(shape, single_support_rows(M)); };
  p.label = "linear";
  return MapInstance(std::move(p));
}

namespace {

MapInstance singular_family(const Matrix& M, double p_exp, double q_exp, std::string label) {
  require_nonnegative(M, label.c_str());
  require_positive_rows(M, label.c_str());
  require_positive_cols(M, label.c_str());
  const auto m = static_cast<std::size_t>(M.rows());
  const auto n = static_cast<std::size_t>(M.cols());
  const Shape shape{m, n};
  const double e1 = 1.0 / (p_exp - 1.0);
  const double e2 = 1.0 / (q_exp - 1.0);
  MapInstance::Parts p;
  p.shape = shape;
  p.A = HomogeneityMatrix(matrix_of({{0.0, e1}, {e2, 0.0}}));
  p.evaluator = [M, shape, e1, e2](const ProductVector& x) {
    ProductVector y(shape);
    set_block(y, 0, (M * block_vec(x, 1)).array().pow(e1).matrix());
    set_block(y, 1, (M.transpose() * block_vec(x, 0)).array().pow(e2).matrix());
    return y;
  };
  p.jacobian = [M, shape, e1, e2](const ProductVector& u) {
    const auto mi = static_cast<Eigen::Index>(shape.size(0));
    const auto ni = static_cast<Eigen::Index>(shape.size(1));
    const Vector My = M * block_vec(u, 1);
    const Vector Mtx = M.transpose() * block_vec(u, 0);
    Matrix J = Matrix::Zero(mi + ni, mi + ni);
    J.topRightCorner(mi, ni) = (e1 * My.array().pow(e1 - 1.0)).matrix().asDiagonal() * M;
    J.bottomLeftCorner(ni, mi) =
        (e2 * Mtx.array().pow(e2 - 1.0)).matrix().asDiagonal() * M.transpose();
    return J;
  };
  p.edges = [M, shape] { return edges_from_pattern(shape, bipartite(M)); };
  p.dual_edges = [M, shape] { return edges_from_pattern(shape, single_support_rows(bipartite(M))); };
  p.label = std::move(label);
  return MapInstance(std::move(p));
}

}  // namespace

MapInstance singular_map(const Matrix& M) { return singular_family(M, 2.0, 2.0, "singular"); }

MapInstance pq_singular_map(const Matrix& M, double p, double q) {
  if (!(p > 1.0) || !(q > 1.0)) throw DomainError("pq_singular_map: p and q must exceed 1");
  return singular_family(M, p, q, "pq_singular");
}

double CubicalTensor::at(std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (std::size_t k : idx) flat = flat * dim + k;
  return entries.at(flat);
}

CubicalTensor CubicalTensor::constant(std::size_t order, std::size_t dim, double value) {
  std::size_t count = 1;
  for (std::size_t k = 0; k < order; ++k) count *= dim;
  return {order, dim, std::vector<double>(count, value)};
}

namespace {

// Visits every multi-index (i, j_2, ..., j_m) with its flat offset.
template <class Fn>
void for_each_index(const CubicalTensor& T, Fn&& fn) {
  std::vector<std::size_t> idx(T.order, 0);
  for (std::size_t flat = 0; flat < T.entries.size(); ++flat) {
    fn(idx, T.entries[flat]);
    for (std::size_t pos = T.order; pos-- > 0;) {
      if (++idx[pos] < T.dim) break;
      idx[pos] = 0;
    }
  }
}

}  // namespace

MapInstance tensor_eigen_map(const CubicalTensor& T, double p) {
  if (T.order < 2 || T.dim == 0) throw DomainError("tensor_eigen_map: order >= 2 and dim >= 1");
  std::size_t count = 1;
  for (std::size_t k = 0; k < T.order; ++k) count *= T.dim;
  if (T.entries.size() != count) throw ShapeError("tensor_eigen_map: entry count mismatch");
  if (!(p > 1.0)) throw DomainError("tensor_eigen_map: p must exceed 1");
  std::vector<double> slice(T.dim, 0.0);
  for_each_index(T, [&](const std::vector<std::size_t>& idx, double v) {
    if (v < 0.0 || !std::isfinite(v)) throw DomainError("tensor_eigen_map: negative entry");
    slice[idx[0]] += v;
  });
  for (std::size_t i = 0; i < T.dim; ++i)
    if (!(slice[i] > 0.0))
      throw DomainError("tensor_eigen_map: slice " + std::to_string(i) + " is degenerate");

  const Shape shape{T.dim};
  const double e = 1.0 / (p - 1.0);
  const double degree = static_cast<double>(T.order - 1);
  auto contract = [T](const ProductVector& x) {
    Vector s = Vector::Zero(static_cast<Eigen::Index>(T.dim));
    for_each_index(T, [&](const std::vector<std::size_t>& idx, double v) {
      if (v == 0.0) return;
      double term = v;
      for (std::size_t k = 1; k < idx.size(); ++k) term *= x(0, idx[k]);
      s(static_cast<Eigen::Index>(idx[0])) += term;
    });
    return s;
  };

  MapInstance::Parts parts;
  parts.shape = shape;
  parts.A = HomogeneityMatrix(Matrix::Constant(1, 1, degree * e));
  parts.evaluator = [shape, contract, e](const ProductVector& x) {
    ProductVector y(shape);
    set_block(y, 0, contract(x).array().pow(e).matrix());
    return y;
  };
  parts.jacobian = [T, contract, e](const ProductVector& u) {
    const auto n = static_cast<Eigen::Index>(T.dim);
    Matrix dS = Matrix::Zero(n, n);
    for_each_index(T, [&](const std::vector<std::size_t>& idx, double v) {
      if (v == 0.0) return;
      for (std::size_t pos = 1; pos < idx.size(); ++pos) {
        double term = v;
        for (std::size_t k = 1; k < idx.size(); ++k)
          if (k != pos) term *= u(0, idx[k]);
        dS(static_cast<Eigen::Index>(idx[0]), static_cast<Eigen::Index>(idx[pos])) += term;
      }
    });
    const Vector s = contract(u);
    return Matrix((e * s.array().pow(e - 1.0)).matrix().asDiagonal() * dS);
  };
  // Probing j diverges F_i iff some positive entry of slice i involves j; it vanishes iff
  // every positive entry of slice i involves j.
  auto involvement = [T] {
    const auto n = static_cast<Eigen::Index>(T.dim);
    Matrix any = Matrix::Zero(n, n);
    Matrix all = Matrix::Ones(n, n);
    for_each_index(T, [&](const std::vector<std::size_t>& idx, double v) {
      if (v == 0.0) return;
      const auto i = static_cast<Eigen::Index>(idx[0]);
      for (Eigen::Index j = 0; j < n; ++j) {
        const bool uses =
            std::find(idx.begin() + 1, idx.end(), static_cast<std::size_t>(j)) != idx.end();
        if (uses) any(i, j) = 1.0;
        else all(i, j) = 0.0;
      }
    });
    return std::pair{any, all};
  };
  parts.edges = [shape, involvement] { return edges_from_pattern(shape, involvement().first); };
  parts.dual_edges = [shape, involvement] {
    return edges_from_pattern(shape, involvement().second);
  };
  parts.label = "tensor_eigen";
  return MapInstance(std::move(parts));
}

MapInstance max_example_map(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("max_example_map: eps must lie in (0, 1)");
  const Shape shape{3};
  MapInstance::Parts p;
  p.shape = shape;
  p.A = HomogeneityMatrix{{1.0}};
  p.evaluator = [shape, eps](const ProductVector& x) {
    const double a = x(0, 0), b = x(0, 1), c = x(0, 2);
    return ProductVector(shape, {std::max({a, b, c}), std::max(eps * a, b), std::max(eps * b, c)});
  };
  p.edges = [shape] {
    return edges_from_pattern(shape, matrix_of({{1, 1, 1}, {1, 1, 0}, {0, 1, 1}}));
  };
  p.dual_edges = [] { return EdgeSet{}; };
  p.smooth = false;
  p.label = "max_example";
  return MapInstance(std::move(p));
}

MapInstance motivating_map() {
  const Shape shape{2, 2};
  MapInstance::Parts p;
  p.shape = shape;
  p.A = HomogeneityMatrix{{0.0, 2.0}, {0.125, 0.0}};
  p.evaluator = [shape](const ProductVector& x) {
    const double s = x(0, 0), t = x(0, 1), u = x(1, 0), v = x(1, 1);
    return ProductVector(shape, {u * u, v * v, std::pow(s, 0.125), std::pow(t, 0.125)});
  };
  p.jacobian = [](const ProductVector& x) {
    const double s = x(0, 0), t = x(0, 1), u = x(1, 0), v = x(1, 1);
    Matrix J = Matrix::Zero(4, 4);
    J(0, 2) = 2.0 * u;
    J(1, 3) = 2.0 * v;
    J(2, 0) = 0.125 * std::pow(s, -0.875);
    J(3, 1) = 0.125 * std::pow(t, -0.875);
    return J;
  };
  const Matrix pat = matrix_of({{0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}});
  p.edges = [shape, pat] { return edges_from_pattern(shape, pat); };
  p.dual_edges = [shape, pat] { return edges_from_pattern(shape, pat); };
  p.label = "motivating";
  return MapInstance(std::move(p));
}

MapInstance nonirr_map(bool use_min) {
  const Shape shape{2, 2};
  MapInstance::Parts p;
  p.shape = shape;
  p.A = HomogeneityMatrix{{1.0, 0.0}, {0.5, 0.5}};
  p.evaluator = [shape, use_min](const ProductVector& x) {
    const double s = x(0, 0), t = x(0, 1), u = x(1, 0), v = x(1, 1);
    const double a = use_min ? std::min(s, v) : std::max(s, v);
    const double b = use_min ? std::min(t, u) : std::max(t, u);
    return ProductVector(shape, {s, t, std::sqrt(a), std::sqrt(b)});
  };
  // Coordinates s, t, u, v; a max diverges when either argument does, a min vanishes when
  // either argument does.
  const Matrix either = matrix_of({{1, 0, 0, 0}, {0, 1, 0, 0}, {1, 0, 0, 1}, {0, 1, 1, 0}});
  const Matrix loops = matrix_of({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
  p.edges = [shape, use_min, either, loops] {
    return edges_from_pattern(shape, use_min ? loops : either);
  };
  p.dual_edges = [shape, use_min, either, loops] {
    return edges_from_pattern(shape, use_min ? either : loops);
  };
  p.smooth = false;
  p.label = use_min ? "nonirr_min" : "nonirr";
  return MapInstance(std::move(p));
}

MapInstance irrex_map() {
  const Shape shape{2, 2};
  MapInstance::Parts p;
  p.shape = shape;
  p.A = HomogeneityMatrix{{0.5, 0.5}, {0.0, 1.0}};
  p.evaluator = [shape](const ProductVector& x) {
    const double s = x(0, 0), t = x(0, 1), u = x(1, 0), v = x(1, 1);
    const double st = std::pow(s * t, 0.25);
    const double uv = std::sqrt(u * v);
    return ProductVector(shape, {st * std::sqrt(u), st * std::sqrt(v), uv, uv});
  };
  p.jacobian = [](const ProductVector& x) {
    const double s = x(0, 0), t = x(0, 1), u = x(1, 0), v = x(1, 1);
    const double st = std::pow(s * t, 0.25);
    const double f1 = st * std::sqrt(u), f2 = st * std::sqrt(v), g = std::sqrt(u * v);
    Matrix J = Matrix::Zero(4, 4);
    J.row(0) << 0.25 * f1 / s, 0.25 * f1 / t, 0.5 * f1 / u, 0.0;
    J.row(1) << 0.25 * f2 / s, 0.25 * f2 / t, 0.0, 0.5 * f2 / v;
    J.row(2) << 0.0, 0.0, 0.5 * g / u, 0.5 * g / v;
    J.row(3) = J.row(2);
    return J;
  };
  const Matrix pat = matrix_of({{1, 1, 1, 0}, {1, 1, 0, 1}, {0, 0, 1, 1}, {0, 0, 1, 1}});
  p.edges = [shape, pat] { return edges_from_pattern(shape, pat); };
  p.dual_edges = [shape, pat] { return edges_from_pattern(shape, pat); };
  p.label = "irrex";
  return MapInstance(std::move(p));
}

MapInstance tight_map(const HomogeneityMatrix& A, const std::vector<std::size_t>& sizes) {
  if (sizes.size() != A.size()) throw ShapeError("tight_map: one block size per row of A");
  for (std::size_t n : sizes)
    if (n < 2) throw DomainError("tight_map: every block needs at least two coordinates");
  const Shape shape(sizes);
  const Matrix Am = A.matrix();
  const std::size_t d = sizes.size();
  MapInstance::Parts p;
  p.shape = shape;
  p.A = A;
  p.evaluator = [shape, Am, d](const ProductVector& x) {
    ProductVector y(shape);
    for (std::size_t i = 0; i < d; ++i) {
      double v = 1.0;
      for (std::size_t l = 0; l < d; ++l) {
        const double e = Am(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
        if (e != 0.0) v *= std::pow(x(l, 0), e);
      }
      for (double& out : y.block(i)) out = v;
    }
    return y;
  };
  p.jacobian = [shape, Am, d](const ProductVector& x) {
    const auto N = static_cast<Eigen::Index>(shape.total());
    Matrix J = Matrix::Zero(N, N);
    for (std::size_t i = 0; i < d; ++i) {
      double v = 1.0;
      for (std::size_t l = 0; l < d; ++l) {
        const double e = Am(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
        if (e != 0.0) v *= std::pow(x(l, 0), e);
      }
      for (std::size_t j = 0; j < shape.size(i); ++j)
        for (std::size_t l = 0; l < d; ++l) {
          const double e = Am(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
          if (e != 0.0)
            J(static_cast<Eigen::Index>(shape.offset(i) + j),
              static_cast<Eigen::Index>(shape.offset(l))) = e * v / x(l, 0);
        }
    }
    return J;
  };
  auto pat = [shape, Am, d] {
    const auto N = static_cast<Eigen::Index>(shape.total());
    Matrix P = Matrix::Zero(N, N);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < shape.size(i); ++j)
        for (std::size_t l = 0; l < d; ++l)
          if (Am(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) > 0.0)
            P(static_cast<Eigen::Index>(shape.offset(i) + j),
              static_cast<Eigen::Index>(shape.offset(l))) = 1.0;
    return edges_from_pattern(shape, P);
  };
  p.edges = pat;
  p.dual_edges = pat;
  p.label = "tight";
  return MapInstance(std::move(p));
}

}  // namespace mhs
