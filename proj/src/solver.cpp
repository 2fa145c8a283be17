#include "mhspectral/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "mhspectral/homogeneity.hpp"

namespace mhs {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::strict_contraction: return "strict_contraction";
    case Regime::non_expansive: return "non_expansive";
    case Regime::expansive: return "expansive";
  }
  return "?";
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::bracket_converged_cycling: return "bracket_converged_cycling";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::diverged: return "diverged";
  }
  return "?";
}

const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::contraction: return "contraction";
    case CertificateKind::jacobian_irreducible: return "jacobian_irreducible";
    case CertificateKind::kernel_dim_one: return "kernel_dim_one";
    case CertificateKind::dirr: return "dirr";
    case CertificateKind::none: return "none";
  }
  return "?";
}

Regime classify_regime(double rho) {
  if (rho < 1.0 - 1e-9) return Regime::strict_contraction;
  if (rho > 1.0 + 1e-9) return Regime::expansive;
  return Regime::non_expansive;
}

std::vector<double> DeltaSchedule::values() const {
  if (!(start > 0.0) || !(factor > 0.0 && factor < 1.0) || !(floor > 0.0) || floor > start)
    throw DomainError("delta schedule needs start >= floor > 0 and factor in (0, 1)");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double v = start * std::pow(factor, k);
    if (v < floor * (1.0 - 1e-9)) break;
    out.push_back(v);
  }
  return out;
}

NormSpec resolve_norms(const NormSpec& norms, const Shape& shape) {
  if (norms.size() == 0) return NormSpec::uniform(shape.blocks());
  norms.check(shape);
  return norms;
}

WeightSelection select_weights(const HomogeneityMatrix& A,
                               const std::optional<WeightVector>& explicit_b) {
  WeightSelection sel;
  sel.rho = spectral_radius(A.matrix());
  sel.regime = classify_regime(sel.rho);
  if (explicit_b) {
    if (explicit_b->size() != A.size()) throw ShapeError("weights: one entry per block");
    sel.b = *explicit_b;
    sel.lipschitz = lipschitz_bound(A.matrix(), sel.b);
    if (sel.lipschitz > 1.0 + 1e-12) {
      std::ostringstream msg;
      msg << "no positive weights with A^T b <= b: the given b has max (A^T b)_i / b_i = "
          << sel.lipschitz;
      throw DomainError(msg.str());
    }
    sel.exact = std::abs(sel.lipschitz - sel.rho) <= 1e-9;
    return sel;
  }
  switch (sel.regime) {
    case Regime::strict_contraction: {
      WeightSearchResult w = contraction_weights(A.matrix());
      sel.b = std::move(w.b);
      sel.lipschitz = w.r;
      sel.exact = w.exact;
      return sel;
    }
    case Regime::non_expansive:
      try {
        sel.b = perron_weights(A.matrix());
      } catch (const NumericalError&) {
        throw DomainError("no positive weights with A^T b = b (rho(A) = 1, reducible Perron "
                          "structure); supply explicit weights");
      }
      sel.lipschitz = lipschitz_bound(A.matrix(), sel.b);
      sel.exact = true;
      return sel;
    case Regime::expansive: {
      std::ostringstream msg;
      msg << "rho(A) = " << sel.rho
          << " > 1: the expansive regime is not covered; no positive weights with A^T b <= b";
      throw DomainError(msg.str());
    }
  }
  return sel;
}

namespace {

// Bracket from x and y = F(x), both of the same shape.
Bracket bracket_of(const ProductVector& x, const ProductVector& y, const WeightVector& b) {
  double log_lo = 0.0, log_hi = 0.0;
  bool upper_finite = true;
  for (std::size_t i = 0; i < x.blocks(); ++i) {
    auto xb = x.block(i);
    auto yb = y.block(i);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t j = 0; j < xb.size(); ++j) {
      if (xb[j] > 0.0) {
        const double r = std::log(yb[j]) - std::log(xb[j]);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        any = true;
      } else {
        upper_finite = false;
      }
    }
    if (!any) throw DomainError("cw_bounds: x has a zero block");
    log_lo += b[i] * lo;
    log_hi += b[i] * hi;
  }
  return {std::exp(log_lo),
          upper_finite ? std::exp(log_hi) : std::numeric_limits<double>::infinity()};
}

double product_weighted(const BlockScaling& lambda, const WeightVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += b[i] * std::log(lambda[i]);
  return std::exp(s);
}

double max_abs_diff(const ProductVector& a, const ProductVector& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.flat().size(); ++k)
    m = std::max(m, std::abs(a.flat()[k] - b.flat()[k]));
  return m;
}

bool closed(const Bracket& br, double tol) {
  return std::isfinite(br.upper) && br.lower > 0.0 &&
         std::log(br.upper) - std::log(br.lower) < tol;
}

}  // namespace

Bracket cw_bounds(const MapInstance& F, const ProductVector& x, const WeightVector& b) {
  if (b.size() != x.blocks()) throw ShapeError("cw_bounds: one weight per block");
  if (!x.semipos()) throw DomainError("cw_bounds: x must lie in K_{+,0}");
  return bracket_of(x, evaluate(F, x), b);
}

double residual(const MapInstance& F, const ProductVector& x, const BlockScaling& lambda,
                const NormSpec& norms) {
  const NormSpec n = resolve_norms(norms, x.shape());
  const ProductVector y = evaluate(F, x);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.blocks(); ++i) {
    std::vector<double> diff(x.shape().size(i));
    for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = y(i, j) - lambda[i] * x(i, j);
    worst = std::max(worst, n[i](diff) / std::max(lambda[i], 1e-300));
  }
  return worst;
}

SolveReport power_method(const MapInstance& F, const ProductVector& x0, const SolverConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw DomainError("power_method: tol must be positive");
  if (cfg.max_iter < 1) throw DomainError("power_method: max_iter must be at least 1");
  require_same_shape(x0.shape(), F.shape(), "power_method");
  if (!x0.pos()) throw DomainError("power_method: x0 must be strictly positive");
  const NormSpec norms = resolve_norms(cfg.norms, F.shape());
  const WeightSelection sel = select_weights(F.A(), cfg.weights);
  const WeightVector& b = sel.b;

  SolveReport rep;
  rep.weights = b;
  const bool contraction = sel.lipschitz < 1.0;
  const std::size_t window = static_cast<std::size_t>(std::max(cfg.cycle_window, 1));

  ProductVector x = normalize(x0, norms);
  std::vector<ProductVector> history;
  std::deque<ProductVector> recent;
  if (contraction) history.push_back(x);
  recent.push_back(x);

  ProductVector fx;
  int k = 0;
  for (; k < cfg.max_iter; ++k) {
    fx = evaluate(F, x);
    if (!fx.finite() || !fx.semipos()) {
      rep.status = SolveStatus::diverged;
      rep.message = "iterate left K_{+,0} or became non-finite at step " + std::to_string(k);
      break;
    }
    const Bracket br = bracket_of(x, fx, b);
    rep.bracket_trace.push_back(br);
    if (closed(br, cfg.tol)) {
      rep.status = SolveStatus::converged;
      break;
    }
    ProductVector next = normalize(fx, norms);

    if (window >= 2 && recent.size() >= window) {
      const ProductVector& lagged = recent[recent.size() - window];
      const double d_cycle = max_abs_diff(next, lagged);
      const double d_step = max_abs_diff(next, x);
      if (d_cycle < 1e-6 && d_step > 10.0 * d_cycle) {
        ProductVector avg = next;
        for (std::size_t w = recent.size() - window + 1; w < recent.size(); ++w)
          for (std::size_t c = 0; c < avg.flat().size(); ++c) avg.flat()[c] += recent[w].flat()[c];
        avg = normalize(avg, norms);
        const ProductVector favg = evaluate(F, avg);
        if (favg.finite() && favg.semipos()) {
          const Bracket bavg = bracket_of(avg, favg, b);
          if (closed(bavg, cfg.tol)) {
            rep.status = SolveStatus::bracket_converged_cycling;
            rep.message = "iterates cycle with period " + std::to_string(window) +
                          "; the cycle average closes the bracket";
            x = std::move(avg);
            fx = favg;
            ++k;
            break;
          }
        }
      }
    }

    x = std::move(next);
    recent.push_back(x);
    if (recent.size() > window) recent.pop_front();
    if (contraction) history.push_back(x);
  }
  rep.iterations = k;
  if (k == cfg.max_iter) {
    rep.status = SolveStatus::max_iter;
    rep.message = "bracket did not close within max_iter";
  }

  rep.eigenpair.x = x;
  if (rep.status != SolveStatus::diverged) {
    if (k == cfg.max_iter) fx = evaluate(F, x);
    rep.eigenpair.lambda = block_norms(fx, norms);
    rep.eigenpair.r_b = product_weighted(rep.eigenpair.lambda, b);
    rep.residual = residual(F, x, rep.eigenpair.lambda, norms);
  } else {
    rep.eigenpair.lambda = BlockScaling::constant(F.shape().blocks(),
                                                  std::numeric_limits<double>::quiet_NaN());
    rep.eigenpair.r_b = std::numeric_limits<double>::quiet_NaN();
    rep.residual = std::numeric_limits<double>::quiet_NaN();
  }

  if (contraction) {
    rep.rate_factor = sel.lipschitz;
    const bool done = rep.status == SolveStatus::converged ||
                      rep.status == SolveStatus::bracket_converged_cycling;
    if (done && x.pos() &&
        std::all_of(history.begin(), history.end(), [](const ProductVector& v) { return v.pos(); })) {
      const double C = sel.lipschitz;
      // x only meets tol; the traces are measured against the fixed point to machine precision.
      ProductVector u = x;
      for (int extra = 0; extra < 2000; ++extra) {
        const ProductVector fu = evaluate(F, u);
        if (!fu.finite() || !fu.pos()) break;
        ProductVector next = normalize(fu, norms);
        const double step = hilbert_metric(next, u, b);
        u = std::move(next);
        if (step <= 1e-15) break;
      }
      bool holds = true;
      double d0 = 0.0;
      for (std::size_t j = 0; j < history.size(); ++j) {
        const double d = hilbert_metric(history[j], u, b);
        if (j == 0) d0 = d;
        rep.distance_trace.push_back(d);
        if (d > std::pow(C, static_cast<double>(j)) * d0 / (1.0 - C) + 1e-9) holds = false;
      }
      rep.envelope_holds = holds;
    }
  }
  return rep;
}

double bonsall_estimate(const MapInstance& F, const ProductVector& x, const WeightVector& b,
                        int m, const NormSpec& norms) {
  if (m < 1) throw DomainError("bonsall_estimate: m must be at least 1");
  require_same_shape(x.shape(), F.shape(), "bonsall_estimate");
  if (!x.pos()) throw DomainError("bonsall_estimate: x must be strictly positive");
  if (b.size() != x.blocks()) throw ShapeError("bonsall_estimate: one weight per block");
  const NormSpec n = resolve_norms(norms, F.shape());
  const Matrix& A = F.A().matrix();
  const auto d = static_cast<Eigen::Index>(x.blocks());

  // The true iterate is exp(sigma) (x) z with z in S_+.
  Vector sigma(d);
  const BlockScaling n0 = block_norms(x, n);
  for (Eigen::Index i = 0; i < d; ++i) sigma(i) = std::log(n0[static_cast<std::size_t>(i)]);
  ProductVector z = normalize(x, n);
  for (int k = 0; k < m; ++k) {
    const ProductVector y = evaluate(F, z);
    const BlockScaling nu = block_norms(y, n);
    Vector next = A * sigma;
    for (Eigen::Index i = 0; i < d; ++i) next(i) += std::log(nu[static_cast<std::size_t>(i)]);
    if (!next.allFinite()) throw NumericalError("bonsall_estimate: growth overflowed");
    sigma = next;
    z = normalize(y, n);
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) s += b[static_cast<std::size_t>(i)] * sigma(i);
  return std::exp(s / m);
}

}  // namespace mhs
