#pragma once

// Order-preserving multi-homogeneous mappings F: K_+ -> K_+ with declared homogeneity matrix,
// the built-in families, closure operations, and randomized property audits.

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mhspectral/cone.hpp"
#include "mhspectral/homogeneity.hpp"

namespace mhs {

/// Coordinate (i, j_i) of the index set I, zero-based.
struct Node {
  std::size_t block = 0;
  std::size_t index = 0;
  auto operator<=>(const Node&) const = default;
};

/// Directed edges (from, to) between coordinates.
using EdgeSet = std::set<std::pair<Node, Node>>;

class MapInstance {
 public:
  using Evaluator = std::function<ProductVector(const ProductVector&)>;
  using Jacobian = std::function<Matrix(const ProductVector&)>;
  using EdgeOracle = std::function<EdgeSet()>;

  struct Parts {
    Shape shape;
    HomogeneityMatrix A;
    Evaluator evaluator;
    Jacobian jacobian;        ///< optional analytic Jacobian at positive points
    EdgeOracle edges;         ///< optional exact adjacency of the divergence graph
    EdgeOracle dual_edges;    ///< optional exact adjacency of the vanishing graph
    bool smooth = true;       ///< false for max/min-type maps
    bool positive_only = false;  ///< evaluation restricted to K_{++}
    std::string label;
  };

  explicit MapInstance(Parts parts);

  /// Wraps an arbitrary evaluator without any structural validation (used for audits).
  static MapInstance custom(Shape shape, HomogeneityMatrix A, Evaluator evaluator,
                            std::string label = "custom");

  const Shape& shape() const { return parts_->shape; }
  const HomogeneityMatrix& A() const { return parts_->A; }
  const std::string& label() const { return parts_->label; }
  bool smooth() const { return parts_->smooth; }
  bool positive_only() const { return parts_->positive_only; }
  bool has_jacobian() const { return static_cast<bool>(parts_->jacobian); }
  bool has_edge_oracle() const { return static_cast<bool>(parts_->edges); }
  bool has_dual_edge_oracle() const { return static_cast<bool>(parts_->dual_edges); }

  ProductVector operator()(const ProductVector& x) const;
  Matrix analytic_jacobian(const ProductVector& u) const;
  EdgeSet oracle_edges() const;
  EdgeSet oracle_dual_edges() const;

  const Parts& parts() const { return *parts_; }

 private:
  std::shared_ptr<const Parts> parts_;
};

/// F(x); rejects negative inputs and (for dual maps) boundary points.
ProductVector evaluate(const MapInstance& F, const ProductVector& x);

// ---- built-in families ----------------------------------------------------------------

/// F(x) = M x on R^n_+.
MapInstance linear_map(const Matrix& M);

/// G(x, y) = (M y, M^T x) on R^m_+ x R^n_+ for an m x n matrix M.
MapInstance singular_map(const Matrix& M);

/// H(x, y) = ((M y)^{1/(p-1)}, (M^T x)^{1/(q-1)}) entrywise.
MapInstance pq_singular_map(const Matrix& M, double p, double q);

/// Cubical tensor of order m >= 2 and dimension n, stored row-major (first index slowest).
struct CubicalTensor {
  std::size_t order = 0;
  std::size_t dim = 0;
  std::vector<double> entries;

  double at(std::span<const std::size_t> idx) const;
  static CubicalTensor constant(std::size_t order, std::size_t dim, double value);
};

/// F_i(x) = (sum T_{i, j_2..j_m} x_{j_2} ... x_{j_m})^{1/(p-1)}.
MapInstance tensor_eigen_map(const CubicalTensor& T, double p);

/// F(a, b, c) = (max(a, b, c), max(eps a, b), max(eps b, c)).
MapInstance max_example_map(double eps);

/// F((s, t), (u, v)) = ((u^2, v^2), (s^{1/8}, t^{1/8})).
MapInstance motivating_map();

/// F((s, t), (u, v)) = ((s, t), (max(s, v)^{1/2}, max(t, u)^{1/2})); `use_min` swaps max for min.
MapInstance nonirr_map(bool use_min = false);

/// F((s, t), (u, v)) = (((st)^{1/4} u^{1/2}, (st)^{1/4} v^{1/2}), ((uv)^{1/2}, (uv)^{1/2})).
MapInstance irrex_map();

/// F_{i, j}(x) = prod_l x_{l,1}^{A_{i,l}}; every block needs at least two coordinates.
MapInstance tight_map(const HomogeneityMatrix& A, const std::vector<std::size_t>& sizes);

// ---- closure operations ---------------------------------------------------------------

/// F o G, homogeneity matrix A_F A_G.
MapInstance compose(const MapInstance& F, const MapInstance& G);
/// F(x) o G(x) entrywise, homogeneity matrix A_F + A_G.
MapInstance hadamard(const MapInstance& F, const MapInstance& G);

/// Order-preserving functional xi_i acting on block i, 1-homogeneous and positive off zero.
using BlockFunctional = std::function<double(std::size_t block, std::span<const double> x)>;

/// N(x)^{D-A} (x) F(x) + N(x)^{D-B} (x) G(x) with N the block norms of `norms`.
MapInstance weighted_sum(const MapInstance& F, const MapInstance& G, const HomogeneityMatrix& D,
                         const NormSpec& norms);
/// Same with user functionals; they must pass a homogeneity and monotonicity spot check.
MapInstance weighted_sum(const MapInstance& F, const MapInstance& G, const HomogeneityMatrix& D,
                         BlockFunctional xi, std::string xi_label = "custom");

/// F(x) + delta (||x_1||, ..., ||x_d||)^A (x) 1.
MapInstance shifted(const MapInstance& F, double delta, const NormSpec& norms);

/// tau o F o tau with tau the entrywise inverse; defined on K_{++} only.
MapInstance dual(const MapInstance& F);

/// F^k by repeated composition.
MapInstance iterate(const MapInstance& F, int k);

// ---- audits ---------------------------------------------------------------------------

struct VerificationReport {
  bool passed = true;
  double max_deviation = 0.0;
  std::size_t samples = 0;
  std::size_t failures = 0;
  std::string detail;
};

VerificationReport verify_multihomogeneous(const MapInstance& F, std::size_t samples, double tol,
                                           std::uint64_t seed = 1);
VerificationReport verify_order_preserving(const MapInstance& F, std::size_t samples, double tol,
                                           std::uint64_t seed = 2);
/// F(K_{++}) subset K_{++} on random samples.
VerificationReport verify_positivity(const MapInstance& F, std::size_t samples,
                                     std::uint64_t seed = 3);

/// Central finite-difference Jacobian at u in K_{++}, size (sum n_i) x (sum n_i).
Matrix numeric_jacobian(const MapInstance& F, const ProductVector& u);

/// Analytic Jacobian when the instance carries one, otherwise numeric.
Matrix jacobian(const MapInstance& F, const ProductVector& u);

/// True when forward and backward difference quotients disagree by more than `rel_tol`.
bool has_kink(const MapInstance& F, const ProductVector& u, double rel_tol = 1e-3);

/// max over (k, l, i) of |<row of D_i F_k(x), x_i> - A_{k,i} F_{k,l}(x)| / |F_{k,l}(x)|.
double euler_residual(const MapInstance& F, const ProductVector& x);

/// Random point of K_{++} with entries uniform in (lo, hi).
ProductVector random_positive(const Shape& shape, std::mt19937_64& rng, double lo = 0.5,
                              double hi = 1.5);

}  // namespace mhs
