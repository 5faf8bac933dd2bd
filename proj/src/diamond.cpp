#include "birkhoff/diamond.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace birkhoff {

namespace {

using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// y = (A (x) 1) psi, computed as A X with X the d x d reshaping of psi.
ComplexVector act_on_system(const ComplexMatrix& a, const ComplexVector& psi, int d) {
  Eigen::Map<const RowMajor> x(psi.data(), d, d);
  RowMajor y = a * x;
  return Eigen::Map<const ComplexVector>(y.data(), d * d);
}

// (A^dag (x) 1) S (A (x) 1).
ComplexMatrix conjugate_by_system(const ComplexMatrix& a, const ComplexMatrix& s, int d) {
  const ComplexMatrix lifted = tensor(a, ComplexMatrix::Identity(d, d));
  return lifted.adjoint() * s * lifted;
}

ComplexVector haar_state(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = cplx(normal(rng), normal(rng));
  return v.normalized();
}

}  // namespace

HermitianPreservingMap::HermitianPreservingMap(KrausChannel minuend, KrausChannel subtrahend)
    : minuend_(std::move(minuend)), subtrahend_(std::move(subtrahend)) {
  if (minuend_.dim() != subtrahend_.dim()) throw DimensionError("map difference: dimension mismatch");
  choi_ = minuend_.choi() - subtrahend_.choi();
}

ComplexMatrix HermitianPreservingMap::apply_extended(const ComplexVector& psi) const {
  const int d = dim();
  if (psi.size() != d * d) throw DimensionError("extended input must live on C^d (x) C^d");
  ComplexMatrix out = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& a : minuend_.operators()) {
    const ComplexVector v = act_on_system(a, psi, d);
    out.noalias() += v * v.adjoint();
  }
  for (const auto& b : subtrahend_.operators()) {
    const ComplexVector v = act_on_system(b, psi, d);
    out.noalias() -= v * v.adjoint();
  }
  return out;
}

ComplexMatrix HermitianPreservingMap::adjoint_extended(const ComplexMatrix& s) const {
  const int d = dim();
  ComplexMatrix out = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& a : minuend_.operators()) out += conjugate_by_system(a, s, d);
  for (const auto& b : subtrahend_.operators()) out -= conjugate_by_system(b, s, d);
  return out;
}

double diamond_lower_bound(const HermitianPreservingMap& delta, const ComplexVector& psi) {
  return trace_norm(delta.apply_extended(psi));
}

ComplexVector maximally_entangled(int d) {
  ComplexVector v = ComplexVector::Zero(d * d);
  for (int i = 0; i < d; ++i) v[i * d + i] = 1.0 / std::sqrt(static_cast<double>(d));
  return v;
}

DiamondResult diamond_ascent(const HermitianPreservingMap& delta, ComplexVector psi,
                             double gain_tol, int max_iterations) {
  DiamondResult res;
  res.value = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> out_eig(delta.apply_extended(psi));
    const auto& lam = out_eig.eigenvalues();
    Eigen::VectorXd signs(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k) signs[k] = lam[k] >= 0.0 ? 1.0 : -1.0;
    const double value = lam.cwiseAbs().sum();
    ComplexMatrix s = out_eig.eigenvectors() * signs.asDiagonal() * out_eig.eigenvectors().adjoint();
    if (value > res.value) {
      res.value = value;
      res.state = psi;
      res.sign = s;
    }
    res.iterations = it + 1;

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> in_eig(delta.adjoint_extended(s));
    const Eigen::Index top = in_eig.eigenvalues().size() - 1;
    const double bound = in_eig.eigenvalues()[top];
    psi = in_eig.eigenvectors().col(top);
    if (bound - value <= gain_tol) {
      res.converged = true;
      break;
    }
  }
  // The last eigenvector step is never worse than the previous iterate.
  const double last = diamond_lower_bound(delta, psi);
  if (last > res.value) {
    res.value = last;
    res.state = psi;
  }
  return res;
}

DiamondResult diamond_norm(const HermitianPreservingMap& delta, const DiamondOptions& opt) {
  const int d = delta.dim();
  std::mt19937_64 rng(opt.seed);
  DiamondResult best;
  best.value = -1.0;
  bool all_converged = true;
  // Slow linear phases make the per-sweep gain understate the remaining gap.
  const double gain_tol = opt.tol * 1e-5;
  for (int s = 0; s < std::max(1, opt.starts); ++s) {
    ComplexVector psi = s == 0 ? maximally_entangled(d) : haar_state(d * d, rng);
    DiamondResult r = diamond_ascent(delta, std::move(psi), gain_tol, opt.max_iterations);
    all_converged = all_converged && r.converged;
    if (r.value > best.value) {
      const int its = best.iterations + r.iterations;
      best = std::move(r);
      best.iterations = its;
    } else {
      best.iterations += r.iterations;
    }
  }
  best.converged = all_converged;
  return best;
}

namespace {

SchurDiamondResult schur_evaluate(const ComplexMatrix& d, const Eigen::VectorXd& a) {
  const ComplexMatrix m = a.asDiagonal() * d * a.asDiagonal();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  const auto& lam = es.eigenvalues();
  Eigen::VectorXd signs(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) signs[k] = lam[k] >= 0.0 ? 1.0 : -1.0;
  SchurDiamondResult r;
  r.value = lam.cwiseAbs().sum();
  r.weights = a;
  r.sign = es.eigenvectors() * signs.asDiagonal() * es.eigenvectors().adjoint();
  return r;
}

}  // namespace

SchurDiamondResult schur_diamond_ascent(const ComplexMatrix& d, Eigen::VectorXd a, double gain_tol,
                                        int max_iterations) {
  if (d.rows() != d.cols()) throw DimensionError("Schur multiplier must be square");
  if (a.size() != d.rows()) throw DimensionError("Schur ascent: weight vector size mismatch");
  if (!is_hermitian(d, 1e-10)) throw ValidationError("Schur multiplier must be Hermitian");
  SchurDiamondResult best = schur_evaluate(d, a.cwiseAbs().normalized());
  for (int it = 0; it < max_iterations; ++it) {
    best.iterations = it + 1;
    const Eigen::MatrixXd b = d.cwiseProduct(best.sign.transpose()).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    const Eigen::Index top = b.rows() - 1;
    // Gap between the best a for the current sign and the current a; zero
    // exactly at a fixed point of the alternation.
    const double gap = es.eigenvalues()[top] - best.value;
    SchurDiamondResult next = schur_evaluate(d, es.eigenvectors().col(top).cwiseAbs());
    if (next.value > best.value) {
      next.iterations = best.iterations;
      best = std::move(next);
    }
    if (gap <= gain_tol) {
      best.converged = true;
      break;
    }
  }
  return best;
}

SchurDiamondResult schur_diamond_norm(const ComplexMatrix& d, const DiamondOptions& opt) {
  const auto n = d.rows();
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  SchurDiamondResult best;
  best.value = -1.0;
  bool all_converged = true;
  int iterations = 0;
  for (int s = 0; s < std::max(1, opt.starts); ++s) {
    Eigen::VectorXd a(n);
    if (s == 0) {
      a.setOnes();
    } else {
      for (Eigen::Index i = 0; i < n; ++i) a[i] = uniform(rng);
    }
    SchurDiamondResult r = schur_diamond_ascent(d, a.normalized(), opt.tol * 1e-3, opt.max_iterations);
    all_converged = all_converged && r.converged;
    iterations += r.iterations;
    if (r.value > best.value) best = std::move(r);
  }
  best.converged = all_converged;
  best.iterations = iterations;
  return best;
}

}  // namespace birkhoff
