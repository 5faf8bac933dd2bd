#include "birkhoff/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace birkhoff {

namespace {
Tolerances g_tolerances;
}

const Tolerances& tolerances() { return g_tolerances; }
void set_tolerances(const Tolerances& tol) { g_tolerances = tol; }

namespace pauli {
ComplexMatrix identity(int dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

ComplexMatrix raising() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

ComplexMatrix lowering() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}
}  // namespace pauli

PureState::PureState(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw ValidationError("pure state must have positive dimension");
  const double n = amps_.norm();
  if (std::abs(n - 1.0) > tolerances().normalization)
    throw ValidationError("pure state not normalized: norm = " + std::to_string(n));
}

PureState PureState::normalized(ComplexVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0)) throw ValidationError("cannot normalize the zero vector");
  amplitudes /= n;
  return PureState(std::move(amplitudes));
}

PureState PureState::basis(int dim, int index) {
  if (index < 0 || index >= dim) throw DimensionError("basis index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v[index] = 1.0;
  return PureState(std::move(v));
}

DensityMatrix::DensityMatrix(ComplexMatrix mat) : mat_(std::move(mat)) {
  const auto& tol = tolerances();
  if (mat_.rows() != mat_.cols() || mat_.rows() == 0)
    throw DimensionError("density matrix must be square and non-empty");
  if (!is_hermitian(mat_, tol.hermitian)) throw ValidationError("density matrix not Hermitian");
  const double tr = mat_.trace().real();
  if (std::abs(tr - 1.0) > tol.trace)
    throw ValidationError("density matrix trace = " + std::to_string(tr));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(mat_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol.positivity)
    throw ValidationError("density matrix has negative eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()));
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.projector());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

HermitianEigen hermitian_eigen(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) throw DimensionError("eigendecomposition needs a square matrix");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  HermitianEigen out{es.eigenvalues(), es.eigenvectors()};
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    auto col = out.vectors.col(c);
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      const double mag = std::abs(col[r]);
      if (mag > 1e-12) {
        col *= std::conj(col[r]) / mag;
        col[r] = mag;
        break;
      }
    }
  }
  return out;
}

double max_abs(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  return a.rows() == a.cols() && max_abs(a - a.adjoint()) <= tol;
}

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())) <= tol;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix tensor(std::span<const ComplexMatrix> factors) {
  if (factors.empty()) return ComplexMatrix::Identity(1, 1);
  ComplexMatrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = tensor(out, factors[k]);
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& op, std::span<const int> dims,
                            std::span<const int> keep) {
  const int n_sys = static_cast<int>(dims.size());
  long total = 1;
  for (int d : dims) {
    if (d <= 0) throw DimensionError("subsystem dimensions must be positive");
    total *= d;
  }
  if (op.rows() != op.cols() || op.rows() != total)
    throw DimensionError("partial_trace: operator dimension " + std::to_string(op.rows()) +
                         " does not match product of subsystem dims " + std::to_string(total));

  std::vector<bool> kept(n_sys, false);
  for (int k : keep) {
    if (k < 0 || k >= n_sys) throw DimensionError("partial_trace: keep index out of range");
    kept[k] = true;
  }

  // Row-major strides: subsystem 0 is the most significant digit.
  std::vector<long> stride(n_sys, 1);
  for (int s = n_sys - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  long kept_dim = 1;
  for (int s = 0; s < n_sys; ++s)
    if (kept[s]) kept_dim *= dims[s];

  ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
  std::vector<int> digits(n_sys);
  auto split = [&](long index, long& kept_index, long& traced_index) {
    kept_index = 0;
    traced_index = 0;
    for (int s = 0; s < n_sys; ++s) {
      const int digit = static_cast<int>((index / stride[s]) % dims[s]);
      if (kept[s]) kept_index = kept_index * dims[s] + digit;
      else traced_index = traced_index * dims[s] + digit;
    }
  };
  std::vector<long> row_kept(total), row_traced(total);
  for (long i = 0; i < total; ++i) split(i, row_kept[i], row_traced[i]);
  for (long i = 0; i < total; ++i)
    for (long j = 0; j < total; ++j)
      if (row_traced[i] == row_traced[j]) out(row_kept[i], row_kept[j]) += op(i, j);
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> dims,
                            std::span<const int> keep) {
  return DensityMatrix(partial_trace(rho.matrix(), dims, keep));
}

ComplexMatrix expm_unitary(const ComplexMatrix& h, double t) {
  if (!is_hermitian(h, tolerances().hermitian * std::max(1.0, max_abs(h))))
    throw ValidationError("expm_unitary requires a Hermitian generator");
  const auto eig = hermitian_eigen(h);
  ComplexVector phases(eig.values.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k)
    phases[k] = std::exp(-kI * (eig.values[k] * t));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

BlochVector bloch_from_state(const PureState& psi) {
  if (psi.dim() != 2) throw DimensionError("Bloch vectors need a qubit state");
  const cplx a = psi[0];
  const cplx b = psi[1];
  const cplx ab = std::conj(a) * b;
  return {2.0 * ab.real(), 2.0 * ab.imag(), std::norm(a) - std::norm(b)};
}

PureState state_from_bloch(const BlochVector& b) {
  const Eigen::Vector3d v = b.vec().normalized();
  const double theta = std::acos(std::clamp(v[2], -1.0, 1.0));
  const double phi = std::atan2(v[1], v[0]);
  ComplexVector amps(2);
  amps << std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi);
  return PureState::normalized(std::move(amps));
}

double purity(const ComplexMatrix& rho) {
  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho.squaredNorm();
}

double purity(const DensityMatrix& rho) { return purity(rho.matrix()); }

double trace_norm(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("trace_norm needs a square matrix");
  if (is_hermitian(a, 1e-14 * std::max(1.0, max_abs(a)))) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues().sum();
}

ComplexMatrix matrix_unit(int d, int i, int j) {
  ComplexMatrix e = ComplexMatrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

}  // namespace birkhoff
