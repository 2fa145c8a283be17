#include "mhspectral/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mhspectral/homogeneity.hpp"

namespace mhs {

namespace {

Matrix zero_one(const Matrix& L, double threshold) {
  return (L.array() > threshold).cast<double>().matrix();
}

Matrix sign_of(const Matrix& M) { return (M.array() > 0.0).cast<double>().matrix(); }

// Pattern of sum_{k=1}^{tau} P^k for tau = 1, 2, ...; visit(tau, S) stops on true.
template <class Visit>
void walk_pattern_sums(const Matrix& P, int max_tau, Visit&& visit) {
  Matrix power = P;
  Matrix sum = P;
  for (int tau = 1; tau <= max_tau; ++tau) {
    if (visit(tau, sum)) return;
    power = sign_of(power * P);
    sum = sign_of(sum + power);
  }
}

bool block_rows_positive(const Matrix& S, const Shape& shape, std::size_t block) {
  const auto off = static_cast<Eigen::Index>(shape.offset(block));
  const auto n = static_cast<Eigen::Index>(shape.size(block));
  return (S.middleRows(off, n).array() > 0.0).all();
}

}  // namespace

bool check_dirr(const Matrix& L, const Shape& shape, std::size_t block, int tau) {
  if (L.rows() != L.cols() || static_cast<std::size_t>(L.rows()) != shape.total())
    throw ShapeError("check_dirr: L must be square of size sum n_i");
  if (block >= shape.blocks()) throw DomainError("check_dirr: block index out of range");
  if (tau < 1) throw DomainError("check_dirr: tau must be at least 1");
  if ((L.array() < 0.0).any()) throw DomainError("check_dirr: L must be nonnegative");
  bool result = false;
  walk_pattern_sums(sign_of(L), tau, [&](int t, const Matrix& S) {
    if (t < tau) return false;
    result = block_rows_positive(S, shape, block);
    return true;
  });
  return result;
}

Certificate certify_uniqueness(const MapInstance& F, const SolveReport& report) {
  Certificate cert;
  cert.rho_A = spectral_radius(F.A().matrix());
  const Regime regime = classify_regime(cert.rho_A);
  if (regime == Regime::strict_contraction) {
    cert.kind = CertificateKind::contraction;
    cert.reason = "rho(A) < 1: F is a strict contraction and its positive eigenvector is unique";
    return cert;
  }
  if (report.status != SolveStatus::converged &&
      report.status != SolveStatus::bracket_converged_cycling) {
    cert.reason = "report carries no converged eigenpair";
    return cert;
  }
  if (regime == Regime::expansive) {
    cert.reason = "rho(A) > 1: no certificate covers the expansive regime";
    return cert;
  }
  const ProductVector& u = report.eigenpair.x;
  const BlockScaling& lambda = report.eigenpair.lambda;
  if (!u.pos()) {
    cert.reason = "eigenvector is not strictly positive";
    return cert;
  }
  if (!lambda.positive()) {
    cert.reason = "eigenvalue vector is not strictly positive";
    return cert;
  }
  if (has_kink(F, u)) {
    cert.reason = "F is not differentiable at u (kink detected)";
    return cert;
  }

  const Shape& shape = F.shape();
  Matrix L = jacobian(F, u);
  for (std::size_t k = 0; k < shape.blocks(); ++k)
    L.middleRows(static_cast<Eigen::Index>(shape.offset(k)),
                 static_cast<Eigen::Index>(shape.size(k))) /= lambda[k];
  if (!L.allFinite()) {
    cert.reason = "Jacobian is not finite at u";
    return cert;
  }
  L = L.cwiseMax(0.0);

  Eigen::EigenSolver<Matrix> es(L, false);
  cert.rho_L = es.eigenvalues().cwiseAbs().maxCoeff();
  const double threshold = 1e-9 * std::max(L.maxCoeff(), 1.0);
  cert.pattern = zero_one(L, threshold);
  if (std::abs(*cert.rho_L - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "rho(L) = " << *cert.rho_L << " differs from 1";
    cert.reason = msg.str();
    return cert;
  }

  cert.irreducible = is_irreducible(cert.pattern, 0.5);
  if (*cert.irreducible) {
    cert.kind = CertificateKind::jacobian_irreducible;
    cert.reason = "DF(u) is irreducible";
    return cert;
  }

  if (is_irreducible(F.A().matrix())) {
    const Matrix IminusL = Matrix::Identity(L.rows(), L.cols()) - L;
    Eigen::JacobiSVD<Matrix> svd(IminusL);
    const Vector& s = svd.singularValues();
    const Eigen::Index N = s.size();
    if (N >= 2) {
      // Below eps * sigma_1 a singular value is roundoff; a double kernel gives a gap near 1.
      const double floor = std::numeric_limits<double>::epsilon() * std::max(s(0), 1e-300);
      const double gap = s(N - 2) / std::max(s(N - 1), floor);
      cert.rank_gap = gap;
      if (gap > 1e6) {
        cert.kind = CertificateKind::kernel_dim_one;
        cert.reason = "dim ker(I - L) = 1";
        return cert;
      }
    }
  }

  const Eigen::Index N = L.rows();
  const int max_tau = static_cast<int>(N);
  for (std::size_t i = 0; i < shape.blocks(); ++i) {
    int found = 0;
    walk_pattern_sums(cert.pattern, max_tau, [&](int tau, const Matrix& S) {
      if (block_rows_positive(S, shape, i)) {
        found = tau;
        return true;
      }
      return false;
    });
    if (found > 0) {
      cert.kind = CertificateKind::dirr;
      cert.dirr_block = i;
      cert.dirr_tau = found;
      std::ostringstream msg;
      msg << "block " << i + 1 << " of sum_{k<=" << found
          << "} DF(u)^k w is positive for every w: no boundary eigenvector reaches r_b";
      cert.reason = msg.str();
      return cert;
    }
  }
  cert.reason = "no certificate validated";
  return cert;
}

}  // namespace mhs
