#include "mhspectral/homogeneity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

namespace mhs {

namespace {

void require_nonnegative_square(const Matrix& A, const char* what) {
  if (A.rows() != A.cols()) throw ShapeError(std::string(what) + ": matrix must be square");
  if ((A.array() < 0.0).any() || !A.allFinite())
    throw DomainError(std::string(what) + ": matrix must be finite and nonnegative");
}

double shift_for(const Matrix& A) {
  const double s = A.rowwise().sum().maxCoeff();
  return s > 0.0 ? s : 1.0;
}

constexpr int kPowerIterations = 20000;

// Kahn's algorithm on the positive pattern; rho(A) > 0 iff the digraph has a cycle.
bool has_cycle(const Matrix& A) {
  const Eigen::Index n = A.rows();
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (A(i, j) > 0.0) ++indeg[static_cast<std::size_t>(j)];
  std::deque<Eigen::Index> ready;
  for (Eigen::Index j = 0; j < n; ++j)
    if (indeg[static_cast<std::size_t>(j)] == 0) ready.push_back(j);
  Eigen::Index removed = 0;
  while (!ready.empty()) {
    const Eigen::Index i = ready.front();
    ready.pop_front();
    ++removed;
    for (Eigen::Index j = 0; j < n; ++j)
      if (A(i, j) > 0.0 && --indeg[static_cast<std::size_t>(j)] == 0) ready.push_back(j);
  }
  return removed < n;
}

}  // namespace

HomogeneityMatrix::HomogeneityMatrix(Matrix entries) : entries_(std::move(entries)) {
  require_nonnegative_square(entries_, "homogeneity matrix");
  if (entries_.rows() == 0) throw DomainError("homogeneity matrix must not be empty");
  for (Eigen::Index i = 0; i < entries_.rows(); ++i)
    if (!(entries_.row(i).maxCoeff() > 0.0))
      throw DomainError("homogeneity matrix row " + std::to_string(i) +
                        " has no positive entry");
}

HomogeneityMatrix::HomogeneityMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw ShapeError("homogeneity matrix must be square");
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  *this = HomogeneityMatrix(std::move(m));
}

double spectral_radius(const Matrix& A) {
  require_nonnegative_square(A, "spectral_radius");
  const Eigen::Index n = A.rows();
  if (n == 0 || !has_cycle(A)) return 0.0;

  // Power iteration on A + sI; the shift makes the Perron root strictly dominant.
  const double s = shift_for(A);
  Matrix B = A;
  B.diagonal().array() += s;

  Vector x = Vector::Ones(n);
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kPowerIterations; ++it) {
    Vector y = B * x;
    const Vector ratio = y.cwiseQuotient(x);
    lo = std::max(lo, ratio.minCoeff());
    hi = std::min(hi, ratio.maxCoeff());
    if (hi - lo <= 1e-15 * hi) break;
    x = y / y.maxCoeff();
  }
  if (hi - lo <= 1e-13 * hi) return std::max(0.0, 0.5 * (lo + hi) - s);

  // Slow (defective) cases: the Collatz-Wielandt bracket stays valid, refine inside it.
  Eigen::EigenSolver<Matrix> es(A, false);
  const double eig = es.eigenvalues().cwiseAbs().maxCoeff();
  return std::clamp(eig, std::max(0.0, lo - s), hi - s);
}

WeightVector perron_weights(const Matrix& A) {
  require_nonnegative_square(A, "perron_weights");
  const Eigen::Index n = A.rows();
  if (n == 0) throw DomainError("perron_weights: empty matrix");
  const double rho = spectral_radius(A);
  const double s = shift_for(A);
  Matrix Bt = A.transpose();
  Bt.diagonal().array() += s;

  Vector b = Vector::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 5 * kPowerIterations; ++it) {
    Vector next = Bt * b;
    next /= next.sum();
    const double change = (next - b).cwiseAbs().maxCoeff();
    b = next;
    if (change <= 1e-16) break;
  }
  const double residual = (A.transpose() * b - rho * b).cwiseAbs().maxCoeff();
  if (!(b.minCoeff() > 1e-9 * b.maxCoeff()) || residual > 1e-10)
    throw NumericalError("perron_weights: A^T has no positive eigenvector for rho(A)");
  return WeightVector(std::vector<double>(b.data(), b.data() + n));
}

double lipschitz_bound(const Matrix& A, const WeightVector& b) {
  require_nonnegative_square(A, "lipschitz_bound");
  if (static_cast<std::size_t>(A.rows()) != b.size())
    throw ShapeError("lipschitz_bound: weight length mismatch");
  const Vector bv = Eigen::Map<const Vector>(b.values().data(), A.rows());
  return (A.transpose() * bv).cwiseQuotient(bv).maxCoeff();
}

WeightSearchResult contraction_weights(const Matrix& A) {
  const double rho = spectral_radius(A);
  if (!(rho < 1.0))
    throw DomainError("contraction_weights: rho(A) = " + std::to_string(rho) +
                      " is not below 1");
  try {
    WeightVector b = perron_weights(A);
    const double r = lipschitz_bound(A, b);
    if (r < 1.0) return {std::move(b), r, true};
  } catch (const NumericalError&) {
  }

  // Positive perturbation A(t) = A + t 11^T has a positive left Perron vector.
  const Eigen::Index n = A.rows();
  const Matrix ones = Matrix::Ones(n, n);
  const double target = 0.5 * (1.0 + rho);
  double t_lo = 0.0;
  double t_hi = 1.0 / static_cast<double>(n);  // rho(A(t_hi)) >= 1
  for (int it = 0; it < 200 && t_hi - t_lo > 1e-300; ++it) {
    const double t = 0.5 * (t_lo + t_hi);
    if (spectral_radius(A + t * ones) <= target) t_lo = t;
    else t_hi = t;
    if (t_lo > 0.0 && it >= 60) break;
  }
  if (!(t_lo > 0.0)) throw NumericalError("contraction_weights: bisection failed");
  WeightVector b = perron_weights(A + t_lo * ones);
  const double r = lipschitz_bound(A, b);
  if (!(r < 1.0)) throw NumericalError("contraction_weights: search did not reach r < 1");
  return {std::move(b), r, false};
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> pattern(const Matrix& M, double threshold) {
  return (M.array() > threshold).matrix();
}

namespace {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Reflexive-transitive closure of a digraph given by its adjacency pattern.
BoolMatrix reach_closure(const BoolMatrix& adj) {
  const Eigen::Index n = adj.rows();
  BoolMatrix reach = BoolMatrix::Constant(n, n, false);
  for (Eigen::Index src = 0; src < n; ++src) {
    std::deque<Eigen::Index> queue{src};
    reach(src, src) = true;
    while (!queue.empty()) {
      const Eigen::Index u = queue.front();
      queue.pop_front();
      for (Eigen::Index v = 0; v < n; ++v)
        if (adj(u, v) && !reach(src, v)) {
          reach(src, v) = true;
          queue.push_back(v);
        }
    }
  }
  return reach;
}

BoolMatrix bool_product(const BoolMatrix& a, const BoolMatrix& b) {
  const Eigen::Index n = a.rows();
  BoolMatrix out = BoolMatrix::Constant(n, b.cols(), false);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k)
      if (a(i, k))
        for (Eigen::Index j = 0; j < b.cols(); ++j) out(i, j) = out(i, j) || b(k, j);
  return out;
}

}  // namespace

bool is_irreducible(const Matrix& A, double threshold) {
  if (A.rows() != A.cols()) throw ShapeError("is_irreducible: matrix must be square");
  return reach_closure(pattern(A, threshold)).all();
}

bool is_primitive(const Matrix& A, double threshold) {
  if (A.rows() != A.cols()) throw ShapeError("is_primitive: matrix must be square");
  const BoolMatrix p = pattern(A, threshold);
  const Eigen::Index n = p.rows();
  const Eigen::Index wielandt = (n - 1) * (n - 1) + 1;
  BoolMatrix power = p;
  for (Eigen::Index k = 1; k <= wielandt; ++k) {
    if (power.all()) return true;
    power = bool_product(power, p);
  }
  return false;
}

}  // namespace mhs
