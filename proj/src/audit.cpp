#include "mhspectral/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mhs {

ProductVector random_positive(const Shape& shape, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  ProductVector x(shape);
  for (double& v : x.flat()) v = dist(rng);
  return x;
}

namespace {

double rel_dev(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
  return std::abs(a - b) / scale;
}

void note_failure(VerificationReport& r, double dev, double tol, const std::string& what) {
  r.max_deviation = std::max(r.max_deviation, dev);
  if (!(dev <= tol)) {
    ++r.failures;
    r.passed = false;
    if (r.detail.empty()) r.detail = what;
  }
}

}  // namespace

VerificationReport verify_multihomogeneous(const MapInstance& F, std::size_t samples, double tol,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_alpha(-2.0, 2.0);
  const Shape& shape = F.shape();
  VerificationReport r;
  for (std::size_t s = 0; s < samples; ++s) {
    const ProductVector x = random_positive(shape, rng);
    std::vector<double> a(shape.blocks());
    for (double& v : a) v = std::exp(log_alpha(rng));
    const BlockScaling alpha(a);
    const ProductVector lhs = evaluate(F, scale_blocks(alpha, x));
    const ProductVector rhs = scale_blocks(matrix_power_scale(alpha, F.A().matrix()), evaluate(F, x));
    double dev = 0.0;
    for (std::size_t k = 0; k < lhs.flat().size(); ++k)
      dev = std::max(dev, rel_dev(lhs.flat()[k], rhs.flat()[k]));
    if (!std::isfinite(dev)) dev = std::numeric_limits<double>::infinity();
    ++r.samples;
    std::ostringstream msg;
    msg << "sample " << s << ": relative deviation " << dev;
    note_failure(r, dev, tol, msg.str());
  }
  return r;
}

VerificationReport verify_order_preserving(const MapInstance& F, std::size_t samples, double tol,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> bump(0.0, 1.0);
  std::bernoulli_distribution keep(0.5);
  const Shape& shape = F.shape();
  VerificationReport r;
  for (std::size_t s = 0; s < samples; ++s) {
    const ProductVector x = random_positive(shape, rng);
    ProductVector y = x;
    for (double& v : y.flat())
      if (!keep(rng)) v += bump(rng);
    const ProductVector fx = evaluate(F, x);
    const ProductVector fy = evaluate(F, y);
    double dev = 0.0;
    for (std::size_t k = 0; k < fx.flat().size(); ++k) {
      const double excess = fx.flat()[k] - fy.flat()[k];
      dev = std::max(dev, excess / std::max(1.0, std::abs(fy.flat()[k])));
    }
    if (!std::isfinite(dev)) dev = std::numeric_limits<double>::infinity();
    ++r.samples;
    std::ostringstream msg;
    msg << "sample " << s << ": F(x) exceeds F(y) by " << dev;
    note_failure(r, dev, tol, msg.str());
  }
  return r;
}

VerificationReport verify_positivity(const MapInstance& F, std::size_t samples,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  VerificationReport r;
  for (std::size_t s = 0; s < samples; ++s) {
    const ProductVector fx = evaluate(F, random_positive(F.shape(), rng));
    ++r.samples;
    if (!fx.pos() || !fx.finite()) {
      ++r.failures;
      r.passed = false;
      if (r.detail.empty()) r.detail = "sample " + std::to_string(s) + " left K_{++}";
    }
  }
  return r;
}

namespace {

double step_for(double u) {
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(u));
  return std::min(h, 0.5 * u);
}

}  // namespace

Matrix numeric_jacobian(const MapInstance& F, const ProductVector& u) {
  require_same_shape(u.shape(), F.shape(), "numeric_jacobian");
  if (!u.pos()) throw DomainError("numeric_jacobian: u must be strictly positive");
  const auto N = static_cast<Eigen::Index>(u.flat().size());
  Matrix J(N, N);
  for (Eigen::Index c = 0; c < N; ++c) {
    const double uc = u.flat()[static_cast<std::size_t>(c)];
    const double h = step_for(uc);
    ProductVector up = u, dn = u;
    up.flat()[static_cast<std::size_t>(c)] = uc + h;
    dn.flat()[static_cast<std::size_t>(c)] = uc - h;
    const ProductVector fp = evaluate(F, up);
    const ProductVector fm = evaluate(F, dn);
    if (!fp.finite() || !fm.finite())
      throw NumericalError("numeric_jacobian: non-finite evaluation near u");
    J.col(c) = (fp.as_eigen() - fm.as_eigen()) / (2.0 * h);
  }
  return J;
}

Matrix jacobian(const MapInstance& F, const ProductVector& u) {
  return F.has_jacobian() ? F.analytic_jacobian(u) : numeric_jacobian(F, u);
}

bool has_kink(const MapInstance& F, const ProductVector& u, double rel_tol) {
  require_same_shape(u.shape(), F.shape(), "has_kink");
  if (!u.pos()) throw DomainError("has_kink: u must be strictly positive");
  const ProductVector f0 = evaluate(F, u);
  const double fscale = f0.as_eigen().cwiseAbs().maxCoeff();
  for (std::size_t c = 0; c < u.flat().size(); ++c) {
    const double uc = u.flat()[c];
    const double h = step_for(uc);
    ProductVector up = u, dn = u;
    up.flat()[c] = uc + h;
    dn.flat()[c] = uc - h;
    const Vector fwd = (evaluate(F, up).as_eigen() - f0.as_eigen()) / h;
    const Vector bwd = (f0.as_eigen() - evaluate(F, dn).as_eigen()) / h;
    for (Eigen::Index k = 0; k < fwd.size(); ++k) {
      const double scale = std::max({std::abs(fwd(k)), std::abs(bwd(k)), 1e-8 * fscale / uc});
      if (std::abs(fwd(k) - bwd(k)) > rel_tol * scale) return true;
    }
  }
  return false;
}

double euler_residual(const MapInstance& F, const ProductVector& x) {
  const Matrix J = jacobian(F, x);
  const ProductVector fx = evaluate(F, x);
  const Shape& shape = F.shape();
  double worst = 0.0;
  for (std::size_t k = 0; k < shape.blocks(); ++k)
    for (std::size_t l = 0; l < shape.size(k); ++l) {
      const auto row = static_cast<Eigen::Index>(shape.offset(k) + l);
      const double f = fx(k, l);
      for (std::size_t i = 0; i < shape.blocks(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < shape.size(i); ++j)
          s += J(row, static_cast<Eigen::Index>(shape.offset(i) + j)) * x(i, j);
        const double dev = std::abs(s - F.A()(k, i) * f) /
                           std::max(std::abs(f), std::numeric_limits<double>::min());
        worst = std::max(worst, dev);
      }
    }
  return worst;
}

}  // namespace mhs
