#include "mhspectral/solver.hpp"

#include <algorithm>
#include <cmath>

namespace mhs {

SolveReport delta_continuation(const MapInstance& F, const ProductVector& x0,
                               const SolverConfig& cfg) {
  require_same_shape(x0.shape(), F.shape(), "delta_continuation");
  if (!x0.pos()) throw DomainError("delta_continuation: x0 must be strictly positive");
  const NormSpec norms = resolve_norms(cfg.norms, F.shape());
  const WeightSelection sel = select_weights(F.A(), cfg.weights);
  const WeightVector& b = sel.b;
  const std::vector<double> schedule = cfg.delta_schedule.values();

  SolveReport rep;
  rep.weights = b;
  rep.status = SolveStatus::converged;
  ProductVector x = normalize(x0, norms);
  SolveReport last;
  bool have_last = false;
  int total_iterations = 0;

  for (double delta : schedule) {
    SolverConfig inner = cfg;
    inner.norms = norms;
    inner.weights = b;
    inner.tol = std::max(cfg.tol * delta / schedule.front(), 1e-13);
    SolveReport step = power_method(shifted(F, delta, norms), x, inner);
    total_iterations += step.iterations;

    DeltaStep ds;
    ds.delta = delta;
    ds.iterations = step.iterations;
    ds.status = step.status;
    ds.r = step.eigenpair.r_b;
    ds.x = step.eigenpair.x;
    const bool ok = step.status == SolveStatus::converged ||
                    step.status == SolveStatus::bracket_converged_cycling;
    if (ok) ds.lower = cw_bounds(F, step.eigenpair.x, b).lower;
    rep.delta_trace.push_back(ds);
    if (!ok) {
      rep.status = step.status;
      rep.message = "inner solve failed at delta = " + std::to_string(delta) + ": " + step.message;
      break;
    }
    x = step.eigenpair.x;
    last = std::move(step);
    have_last = true;
  }
  rep.iterations = total_iterations;

  bool monotone = true;
  for (std::size_t k = 1; k < rep.delta_trace.size(); ++k)
    if (rep.delta_trace[k].status == SolveStatus::converged ||
        rep.delta_trace[k].status == SolveStatus::bracket_converged_cycling)
      if (!(rep.delta_trace[k].r < rep.delta_trace[k - 1].r)) monotone = false;
  rep.delta_monotone = monotone;

  if (!have_last) {
    rep.eigenpair.x = x;
    rep.eigenpair.lambda = block_norms(evaluate(F, x), norms);
    rep.eigenpair.r_b = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }

  // Completed steps only.
  std::vector<const DeltaStep*> done;
  for (const auto& s : rep.delta_trace)
    if (s.status == SolveStatus::converged || s.status == SolveStatus::bracket_converged_cycling)
      done.push_back(&s);

  Bracket bounds{0.0, done.back()->r};
  for (const DeltaStep* s : done) bounds.lower = std::max(bounds.lower, s->lower);
  rep.radius_bracket = bounds;

  // Richardson step assuming r(delta) and x(delta) are linear in delta near zero.
  double r_ex = done.back()->r;
  ProductVector x_ex = done.back()->x;
  if (done.size() >= 2) {
    const DeltaStep& a = *done[done.size() - 2];
    const DeltaStep& c = *done.back();
    const double f = c.delta / a.delta;
    r_ex = (c.r - f * a.r) / (1.0 - f);
    ProductVector cand = c.x;
    for (std::size_t j = 0; j < cand.flat().size(); ++j)
      cand.flat()[j] = (c.x.flat()[j] - f * a.x.flat()[j]) / (1.0 - f);
    if (cand.semipos()) x_ex = normalize(cand, norms);
  }
  rep.extrapolated_r = std::clamp(r_ex, bounds.lower, bounds.upper);

  rep.eigenpair.x = x_ex;
  rep.eigenpair.lambda = block_norms(evaluate(F, x_ex), norms);
  rep.eigenpair.r_b = *rep.extrapolated_r;
  rep.bracket_trace = last.bracket_trace;

  if (cfg.polish && x_ex.pos()) {
    SolverConfig pc = cfg;
    pc.norms = norms;
    pc.weights = b;
    SolveReport polish = power_method(F, x_ex, pc);
    rep.iterations += polish.iterations;
    if (polish.status == SolveStatus::converged ||
        polish.status == SolveStatus::bracket_converged_cycling) {
      rep.eigenpair = polish.eigenpair;
      rep.bracket_trace = polish.bracket_trace;
      rep.polished = true;
    }
  }
  rep.residual = residual(F, rep.eigenpair.x, rep.eigenpair.lambda, norms);
  return rep;
}

}  // namespace mhs
