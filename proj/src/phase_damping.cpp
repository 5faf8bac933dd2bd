#include "birkhoff/phase_damping.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace birkhoff {

PhaseDampingChannel::PhaseDampingChannel(ComplexMatrix gram)
    : PhaseDampingChannel(std::move(gram), tolerances().gram_diagonal, tolerances().positivity) {}

PhaseDampingChannel::PhaseDampingChannel(ComplexMatrix gram, double diag_tol, double psd_tol)
    : gram_(std::move(gram)) {
  if (gram_.rows() != gram_.cols() || gram_.rows() == 0)
    throw DimensionError("gram matrix must be square and non-empty");
  if (!is_hermitian(gram_, std::max(tolerances().hermitian, diag_tol)))
    throw ValidationError("gram matrix not Hermitian");
  for (Eigen::Index n = 0; n < gram_.rows(); ++n)
    if (std::abs(gram_(n, n) - 1.0) > diag_tol)
      throw ValidationError("gram diagonal entry " + std::to_string(n) + " differs from 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -psd_tol)
    throw ValidationError("gram matrix not positive semidefinite: min eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()));
}

PhaseDampingChannel PhaseDampingChannel::identity(int d) {
  return PhaseDampingChannel(ComplexMatrix::Ones(d, d));
}

ComplexMatrix PhaseDampingChannel::apply(const ComplexMatrix& x) const {
  if (x.rows() != gram_.rows() || x.cols() != gram_.cols())
    throw DimensionError("channel dimension " + std::to_string(dim()) +
                         " does not match operator dimension " + std::to_string(x.rows()));
  return gram_.cwiseProduct(x);
}

DensityMatrix PhaseDampingChannel::apply(const DensityMatrix& rho) const {
  return DensityMatrix(apply(rho.matrix()));
}

KrausChannel::KrausChannel(std::vector<ComplexMatrix> kraus) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw ValidationError("Kraus channel needs at least one operator");
  const auto d = kraus_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& k : kraus_) {
    if (k.rows() != d || k.cols() != d) throw DimensionError("Kraus operators must be d x d");
    sum += k.adjoint() * k;
  }
  if (max_abs(sum - ComplexMatrix::Identity(d, d)) > tolerances().unitarity)
    throw ValidationError("Kraus operators are not trace preserving");
}

KrausChannel KrausChannel::unchecked(std::vector<ComplexMatrix> kraus) {
  if (kraus.empty()) throw ValidationError("Kraus channel needs at least one operator");
  KrausChannel ch;
  ch.kraus_ = std::move(kraus);
  return ch;
}

ComplexMatrix KrausChannel::apply(const ComplexMatrix& x) const {
  if (x.rows() != dim() || x.cols() != dim()) throw DimensionError("Kraus apply: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(dim(), dim());
  for (const auto& k : kraus_) out.noalias() += k * x * k.adjoint();
  return out;
}

ComplexMatrix KrausChannel::choi() const {
  const int d = dim();
  ComplexMatrix j = ComplexMatrix::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      j += tensor(apply(matrix_unit(d, a, b)), matrix_unit(d, a, b));
  return j;
}

RUChannel::RUChannel(std::vector<RUComponent> components) : components_(std::move(components)) {
  const auto& tol = tolerances();
  if (components_.empty()) throw ValidationError("RU channel needs at least one component");
  const auto d = components_.front().unitary.rows();
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0)) throw ValidationError("RU weights must be positive");
    if (c.unitary.rows() != d) throw DimensionError("RU unitaries must share a dimension");
    if (!is_unitary(c.unitary, tol.unitarity)) throw ValidationError("RU component not unitary");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > tol.probability_sum)
    throw ValidationError("RU weights sum to " + std::to_string(total));
}

ComplexMatrix RUChannel::apply(const ComplexMatrix& x) const {
  ComplexMatrix out = ComplexMatrix::Zero(dim(), dim());
  for (const auto& c : components_) out.noalias() += c.weight * (c.unitary * x * c.unitary.adjoint());
  return out;
}

KrausChannel RUChannel::to_kraus() const {
  std::vector<ComplexMatrix> ops;
  ops.reserve(components_.size());
  for (const auto& c : components_) ops.push_back(std::sqrt(c.weight) * c.unitary);
  return KrausChannel(std::move(ops));
}

PhaseDampingChannel from_relative_states(std::span<const PureState> states) {
  if (states.empty()) throw ValidationError("need at least one relative state");
  const int r = states.front().dim();
  const auto d = static_cast<Eigen::Index>(states.size());
  ComplexMatrix a(r, d);  // column n holds |a_n>
  for (Eigen::Index n = 0; n < d; ++n) {
    if (states[n].dim() != r) throw DimensionError("relative states must share a dimension");
    a.col(n) = states[n].amplitudes();
  }
  // (A^dag A)(n, m) = <a_n|a_m>; the convention needs the transpose of that.
  ComplexMatrix gram = (a.adjoint() * a).transpose();
  for (Eigen::Index n = 0; n < d; ++n) gram(n, n) = 1.0;
  return PhaseDampingChannel(std::move(gram));
}

KrausChannel kraus_from_gram(const PhaseDampingChannel& ch) {
  const auto eig = hermitian_eigen(ch.gram());
  const double cutoff = tolerances().rank_cutoff * eig.values.maxCoeff();
  std::vector<ComplexMatrix> ops;
  // Largest eigenvalue first so the dominant operator leads.
  for (Eigen::Index i = eig.values.size() - 1; i >= 0; --i) {
    if (eig.values[i] <= cutoff) continue;
    ComplexVector diag = std::sqrt(eig.values[i]) * eig.vectors.col(i);
    ops.emplace_back(diag.asDiagonal());
  }
  return KrausChannel(std::move(ops));
}

ComplexMatrix gram_from_diagonal_kraus(const KrausChannel& ch) {
  const int d = ch.dim();
  ComplexMatrix gram = ComplexMatrix::Zero(d, d);
  for (const auto& k : ch.operators()) {
    const ComplexVector v = k.diagonal();
    gram += v * v.adjoint();
  }
  return gram;
}

bool is_doubly_stochastic(const KrausChannel& ch, double tol) {
  const int d = ch.dim();
  ComplexMatrix tp = ComplexMatrix::Zero(d, d);
  ComplexMatrix unital = ComplexMatrix::Zero(d, d);
  for (const auto& k : ch.operators()) {
    tp += k.adjoint() * k;
    unital += k * k.adjoint();
  }
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  return max_abs(tp - id) <= tol && max_abs(unital - id) <= tol;
}

double fsov_volume(std::span<const BlochVector, 4> blochs) {
  Eigen::Matrix4d m;
  for (int n = 0; n < 4; ++n) m.col(n) << 1.0, blochs[n].x, blochs[n].y, blochs[n].z;
  return m.determinant() / 6.0;
}

RUChannel single_qubit_ru(double phi0, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("single_qubit_ru: p outside [0, 1]");
  const ComplexMatrix u = expm_unitary(pauli::z(), phi0);
  std::vector<RUComponent> comps;
  if (p > 0.0) comps.push_back({p, u});
  if (p < 1.0) comps.push_back({1.0 - p, u * pauli::z()});
  return RUChannel(std::move(comps));
}

NotCoplanarError::NotCoplanarError(double volume)
    : std::domain_error("Bloch vectors are not coplanar: |V| = " + std::to_string(std::abs(volume))),
      volume_(volume) {}

namespace {

// SU(2) element whose adjoint action carries `normal` onto +z.
ComplexMatrix rotation_to_north(const Eigen::Vector3d& normal) {
  const Eigen::Vector3d n = normal.normalized();
  const double theta = std::acos(std::clamp(n[2], -1.0, 1.0));
  const double phi = std::atan2(n[1], n[0]);
  // R_y(-theta) R_z(-phi) with R_a(x) = exp(-i x sigma_a / 2).
  return expm_unitary(pauli::y(), -theta / 2.0) * expm_unitary(pauli::z(), -phi / 2.0);
}

double phase_of(cplx z) { return std::abs(z) > 1e-15 ? std::arg(z) : 0.0; }

}  // namespace

RUChannel coplanar_ru_decomposition(std::span<const PureState> states, double coplanar_tol) {
  if (states.size() != 4) throw DimensionError("coplanar decomposition needs four states");
  std::array<BlochVector, 4> b;
  for (int n = 0; n < 4; ++n) b[n] = bloch_from_state(states[n]);
  const double volume = fsov_volume(b);
  if (std::abs(volume) > coplanar_tol) throw NotCoplanarError(volume);

  // Least-squares plane: the normal is the direction of least spread of the
  // centered points. Collinear sets yield some valid plane through them.
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& v : b) centroid += v.vec();
  centroid /= 4.0;
  Eigen::Matrix<double, 3, 4> centered;
  for (int n = 0; n < 4; ++n) centered.col(n) = b[n].vec() - centroid;
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(centered, Eigen::ComputeFullU);
  // Coincident points: tilt their common direction to the pole, so every
  // state becomes |0> up to phase and one unitary suffices.
  const Eigen::Vector3d normal =
      svd.singularValues()[0] < 1e-12 ? Eigen::Vector3d(centroid) : Eigen::Vector3d(svd.matrixU().col(2));
  const ComplexMatrix w = rotation_to_north(normal);

  double p = 0.0;
  std::array<ComplexVector, 4> rotated;
  for (int n = 0; n < 4; ++n) {
    rotated[n] = w * states[n].amplitudes();
    p += std::norm(rotated[n][1]);
  }
  p /= 4.0;

  ComplexVector first(4), second(4);
  for (int n = 0; n < 4; ++n) {
    first[n] = std::polar(1.0, phase_of(rotated[n][0]));
    second[n] = std::polar(1.0, phase_of(rotated[n][1]));
  }
  std::vector<RUComponent> comps;
  constexpr double kNegligible = 1e-14;
  if (p < kNegligible) {
    comps.push_back({1.0, first.asDiagonal()});
  } else if (p > 1.0 - kNegligible) {
    comps.push_back({1.0, second.asDiagonal()});
  } else {
    comps.push_back({1.0 - p, first.asDiagonal()});
    comps.push_back({p, second.asDiagonal()});
  }
  return RUChannel(std::move(comps));
}

RUChannel coplanar_ru_decomposition(std::span<const PureState> states) {
  return coplanar_ru_decomposition(states, tolerances().coplanar);
}

}  // namespace birkhoff
