#pragma once

// Normalized power method with Collatz-Wielandt brackets, Bonsall-radius estimation,
// delta-continuation toward maximal eigenpairs, and uniqueness/maximality certificates.

#include <optional>
#include <string>
#include <vector>

#include "mhspectral/maps.hpp"
#include "mhspectral/metrics.hpp"

namespace mhs {

struct DeltaSchedule {
  double start = 1.0;
  double factor = 0.5;
  double floor = 1e-8;

  std::vector<double> values() const;
};

struct SolverConfig {
  double tol = 1e-10;                  ///< on ln(upper) - ln(lower)
  int max_iter = 10000;
  NormSpec norms;                      ///< empty: 2-norm on every block
  std::optional<WeightVector> weights; ///< empty: automatic selection
  int cycle_window = 2;
  DeltaSchedule delta_schedule;
  bool polish = true;                  ///< continuation: try a final solve on F itself
};

enum class Regime { strict_contraction, non_expansive, expansive };
enum class SolveStatus { converged, bracket_converged_cycling, max_iter, diverged };
enum class CertificateKind { contraction, jacobian_irreducible, kernel_dim_one, dirr, none };

const char* to_string(Regime r);
const char* to_string(SolveStatus s);
const char* to_string(CertificateKind k);

/// rho(A) < 1 - 1e-9, |rho(A) - 1| <= 1e-9, or rho(A) > 1 + 1e-9.
Regime classify_regime(double rho);

struct WeightSelection {
  WeightVector b;
  double rho = 0.0;
  double lipschitz = 0.0;  ///< C = max (A^T b)_i / b_i
  Regime regime = Regime::non_expansive;
  bool exact = false;      ///< b is a left Perron vector of A
};

/// Automatic: contraction weights when rho(A) < 1, Perron weights when rho(A) = 1.
/// Throws DomainError when no admissible weights exist (rho(A) > 1 without explicit b) or when
/// explicit weights violate A^T b <= b.
WeightSelection select_weights(const HomogeneityMatrix& A,
                               const std::optional<WeightVector>& explicit_b);

struct EigenPair {
  ProductVector x;
  BlockScaling lambda;
  double r_b = 0.0;
};

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};

struct DeltaStep {
  double delta = 0.0;
  double r = 0.0;      ///< r_b of the shifted map
  double lower = 0.0;  ///< Collatz-Wielandt lower bound of F at the shifted eigenvector
  int iterations = 0;
  SolveStatus status = SolveStatus::converged;
  ProductVector x;     ///< eigenvector of the shifted map
};

struct Certificate {
  CertificateKind kind = CertificateKind::none;
  std::string reason;
  double rho_A = 0.0;
  std::optional<double> rho_L;
  std::optional<bool> irreducible;      ///< pattern of L
  std::optional<double> rank_gap;       ///< sigma_{N-1} / sigma_N of I - L
  std::optional<std::size_t> dirr_block;
  std::optional<int> dirr_tau;
  Matrix pattern;                        ///< 0/1 pattern of L when computed
};

struct SolveReport {
  EigenPair eigenpair;
  SolveStatus status = SolveStatus::max_iter;
  int iterations = 0;
  std::vector<Bracket> bracket_trace;
  WeightVector weights;
  double residual = 0.0;
  std::optional<double> rate_factor;      ///< C < 1 in the contraction regime
  std::vector<double> distance_trace;     ///< mu_b(x^k, u), contraction regime only
  std::optional<bool> envelope_holds;     ///< distance_trace <= C^k mu_b(x^0, u) / (1 - C)
  std::vector<DeltaStep> delta_trace;     ///< continuation only
  std::optional<bool> delta_monotone;
  std::optional<Bracket> radius_bracket;  ///< continuation: bounds on r_b(F)
  std::optional<double> extrapolated_r;   ///< continuation: Richardson limit of r_b(F^{(delta)})
  bool polished = false;                  ///< continuation: final solve on F closed its bracket
  Certificate certificate;
  std::string message;
};

/// (lower, upper) Collatz-Wielandt bounds at x; upper is +inf unless x is positive.
Bracket cw_bounds(const MapInstance& F, const ProductVector& x, const WeightVector& b);

/// max_i ||F_i(x) - lambda_i x_i|| / max(lambda_i, 1e-300).
double residual(const MapInstance& F, const ProductVector& x, const BlockScaling& lambda,
                const NormSpec& norms);

/// Normalized power iteration x^{k+1} = normalize(F(x^k)).
SolveReport power_method(const MapInstance& F, const ProductVector& x0, const SolverConfig& cfg);

/// |||F^m(x)|||_b^{1/m} with block scales carried in log space.
double bonsall_estimate(const MapInstance& F, const ProductVector& x, const WeightVector& b,
                        int m, const NormSpec& norms = {});

/// Power method on F + delta ||x||^A (x) 1 along a decreasing schedule, warm-started.
SolveReport delta_continuation(const MapInstance& F, const ProductVector& x0,
                               const SolverConfig& cfg);

/// Block i of sum_{k=1}^{tau} L^k w is positive for every nonzero w >= 0 (pattern level).
bool check_dirr(const Matrix& L, const Shape& shape, std::size_t block, int tau);

/// Strongest certificate that validates at the report's eigenpair.
Certificate certify_uniqueness(const MapInstance& F, const SolveReport& report);

/// Resolved norms: the 2-norm on every block when `norms` is empty.
NormSpec resolve_norms(const NormSpec& norms, const Shape& shape);

}  // namespace mhs
