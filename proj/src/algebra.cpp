#include "mhspectral/maps.hpp"

#include <cmath>
#include <random>
#include <string>

namespace mhs {

namespace {

void require_same_domain(const MapInstance& F, const MapInstance& G, const char* what) {
  require_same_shape(F.shape(), G.shape(), what);
}

}  // namespace

MapInstance compose(const MapInstance& F, const MapInstance& G) {
  require_same_domain(F, G, "compose");
  MapInstance::Parts p;
  p.shape = F.shape();
  p.A = HomogeneityMatrix(Matrix(F.A().matrix() * G.A().matrix()));
  p.evaluator = [F, G](const ProductVector& x) { return evaluate(F, evaluate(G, x)); };
  if (F.has_jacobian() && G.has_jacobian())
    p.jacobian = [F, G](const ProductVector& u) {
      return Matrix(F.analytic_jacobian(evaluate(G, u)) * G.analytic_jacobian(u));
    };
  p.smooth = F.smooth() && G.smooth();
  p.positive_only = F.positive_only() || G.positive_only();
  p.label = "compose(" + F.label() + ", " + G.label() + ")";
  return MapInstance(std::move(p));
}

MapInstance hadamard(const MapInstance& F, const MapInstance& G) {
  require_same_domain(F, G, "hadamard");
  MapInstance::Parts p;
  p.shape = F.shape();
  p.A = HomogeneityMatrix(Matrix(F.A().matrix() + G.A().matrix()));
  p.evaluator = [F, G](const ProductVector& x) {
    ProductVector y = evaluate(F, x);
    const ProductVector z = evaluate(G, x);
    auto yf = y.flat();
    auto zf = z.flat();
    for (std::size_t k = 0; k < yf.size(); ++k) yf[k] *= zf[k];
    return y;
  };
  if (F.has_jacobian() && G.has_jacobian())
    p.jacobian = [F, G](const ProductVector& u) {
      const Vector fu = evaluate(F, u).as_eigen();
      const Vector gu = evaluate(G, u).as_eigen();
      return Matrix(gu.asDiagonal() * F.analytic_jacobian(u) +
                    fu.asDiagonal() * G.analytic_jacobian(u));
    };
  // Products of nonnegative limits diverge when either factor does (the other stays
  // bounded below on the probe) and vanish when either factor vanishes.
  if (F.has_edge_oracle() && G.has_edge_oracle())
    p.edges = [F, G] {
      EdgeSet e = F.oracle_edges();
      e.merge(G.oracle_edges());
      return e;
    };
  if (F.has_dual_edge_oracle() && G.has_dual_edge_oracle())
    p.dual_edges = [F, G] {
      EdgeSet e = F.oracle_dual_edges();
      e.merge(G.oracle_dual_edges());
      return e;
    };
  p.smooth = F.smooth() && G.smooth();
  p.positive_only = F.positive_only() || G.positive_only();
  p.label = "hadamard(" + F.label() + ", " + G.label() + ")";
  return MapInstance(std::move(p));
}

namespace {

MapInstance weighted_sum_impl(const MapInstance& F, const MapInstance& G,
                              const HomogeneityMatrix& D, BlockFunctional xi,
                              std::string xi_label) {
  require_same_domain(F, G, "weighted_sum");
  if (D.size() != F.A().size()) throw ShapeError("weighted_sum: D has the wrong size");
  const Matrix DA = D.matrix() - F.A().matrix();
  const Matrix DB = D.matrix() - G.A().matrix();
  if ((DA.array() < 0.0).any()) throw DomainError("weighted_sum: D must dominate A_F entrywise");
  if ((DB.array() < 0.0).any()) throw DomainError("weighted_sum: D must dominate A_G entrywise");

  MapInstance::Parts p;
  p.shape = F.shape();
  p.A = D;
  p.evaluator = [F, G, DA, DB, xi](const ProductVector& x) {
    const std::size_t d = x.blocks();
    std::vector<double> n(d);
    for (std::size_t i = 0; i < d; ++i) n[i] = xi(i, x.block(i));
    const BlockScaling N(std::move(n));
    ProductVector y = scale_blocks(matrix_power_scale(N, DA), evaluate(F, x));
    const ProductVector z = scale_blocks(matrix_power_scale(N, DB), evaluate(G, x));
    auto yf = y.flat();
    auto zf = z.flat();
    for (std::size_t k = 0; k < yf.size(); ++k) yf[k] += zf[k];
    return y;
  };
  p.smooth = false;
  p.positive_only = F.positive_only() || G.positive_only();
  p.label = "weighted_sum(" + F.label() + ", " + G.label() + ", " + xi_label + ")";
  return MapInstance(std::move(p));
}

void spot_check_functional(const BlockFunctional& xi, const Shape& shape) {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 64; ++trial) {
    const ProductVector x = random_positive(shape, rng);
    ProductVector y = x;
    for (double& v : y.flat()) v += 0.5 * scale(rng) * (trial % 2);
    const double c = scale(rng);
    for (std::size_t i = 0; i < shape.blocks(); ++i) {
      const double fx = xi(i, x.block(i));
      const double fy = xi(i, y.block(i));
      std::vector<double> cx(x.block(i).begin(), x.block(i).end());
      for (double& v : cx) v *= c;
      const double fcx = xi(i, cx);
      if (!(fx > 0.0) || !std::isfinite(fx))
        throw DomainError("weighted_sum: functional is not positive on block " +
                          std::to_string(i));
      if (std::abs(fcx - c * fx) > 1e-9 * c * fx)
        throw DomainError("weighted_sum: functional is not 1-homogeneous on block " +
                          std::to_string(i));
      if (fx > fy * (1.0 + 1e-12))
        throw DomainError("weighted_sum: functional is not order-preserving on block " +
                          std::to_string(i));
    }
  }
}

}  // namespace

MapInstance weighted_sum(const MapInstance& F, const MapInstance& G, const HomogeneityMatrix& D,
                         const NormSpec& norms) {
  norms.check(F.shape());
  BlockFunctional xi = [norms](std::size_t i, std::span<const double> x) { return norms[i](x); };
  return weighted_sum_impl(F, G, D, std::move(xi), "norms");
}

MapInstance weighted_sum(const MapInstance& F, const MapInstance& G, const HomogeneityMatrix& D,
                         BlockFunctional xi, std::string xi_label) {
  if (!xi) throw DomainError("weighted_sum: empty functional");
  spot_check_functional(xi, F.shape());
  return weighted_sum_impl(F, G, D, std::move(xi), std::move(xi_label));
}

MapInstance shifted(const MapInstance& F, double delta, const NormSpec& norms) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw DomainError("shifted: delta must be positive");
  norms.check(F.shape());
  const Matrix A = F.A().matrix();
  MapInstance::Parts p;
  p.shape = F.shape();
  p.A = F.A();
  p.evaluator = [F, delta, norms, A](const ProductVector& x) {
    const BlockScaling shift = matrix_power_scale(block_norms(x, norms), A);
    ProductVector y = evaluate(F, x);
    for (std::size_t i = 0; i < y.blocks(); ++i)
      for (double& v : y.block(i)) v += delta * shift[i];
    return y;
  };
  const Shape shape = F.shape();
  if (F.has_edge_oracle())
    p.edges = [F, A, shape] {
      EdgeSet e = F.oracle_edges();
      for (std::size_t k = 0; k < shape.blocks(); ++k)
        for (std::size_t i = 0; i < shape.blocks(); ++i)
          if (A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) > 0.0)
            for (std::size_t l = 0; l < shape.size(k); ++l)
              for (std::size_t j = 0; j < shape.size(i); ++j) e.insert({{k, l}, {i, j}});
      return e;
    };
  // The norm factor only vanishes when a single-coordinate block is probed.
  if (F.has_dual_edge_oracle())
    p.dual_edges = [F, A, shape] {
      EdgeSet e;
      for (const auto& edge : F.oracle_dual_edges()) {
        const auto [from, to] = edge;
        if (shape.size(to.block) == 1 &&
            A(static_cast<Eigen::Index>(from.block), static_cast<Eigen::Index>(to.block)) > 0.0)
          e.insert(edge);
      }
      return e;
    };
  p.smooth = false;
  p.positive_only = F.positive_only();
  p.label = "shifted(" + F.label() + ", " + std::to_string(delta) + ")";
  return MapInstance(std::move(p));
}

MapInstance dual(const MapInstance& F) {
  auto tau = [](ProductVector x) {
    for (double& v : x.flat()) v = 1.0 / v;
    return x;
  };
  MapInstance::Parts p;
  p.shape = F.shape();
  p.A = F.A();
  p.evaluator = [F, tau](const ProductVector& x) { return tau(evaluate(F, tau(x))); };
  if (F.has_jacobian())
    p.jacobian = [F, tau](const ProductVector& u) {
      const ProductVector v = tau(u);
      const Vector fv = evaluate(F, v).as_eigen();
      const Vector left = fv.array().square().inverse();
      const Vector right = v.as_eigen().array().square();
      return Matrix(left.asDiagonal() * F.analytic_jacobian(v) * right.asDiagonal());
    };
  if (F.has_dual_edge_oracle()) p.edges = [F] { return F.oracle_dual_edges(); };
  if (F.has_edge_oracle()) p.dual_edges = [F] { return F.oracle_edges(); };
  p.smooth = F.smooth();
  p.positive_only = true;
  p.label = "dual(" + F.label() + ")";
  return MapInstance(std::move(p));
}

MapInstance iterate(const MapInstance& F, int k) {
  if (k < 1) throw DomainError("iterate: k must be at least 1");
  MapInstance out = F;
  for (int i = 1; i < k; ++i) out = compose(F, out);
  return out;
}

}  // namespace mhs
