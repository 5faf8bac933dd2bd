#pragma once

// Dense complex linear algebra for the small (2, 4, 8, 16 dimensional)
// operators that appear in two-qubit channel work: states, Pauli algebra,
// tensor products, partial traces, exponentials, norms, Bloch maps.

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace birkhoff {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical thresholds used across the library. One record so property
/// tests and the CLI tune a single place.
struct Tolerances {
  double hermitian = 1e-12;
  double trace = 1e-10;
  double positivity = 1e-10;
  double normalization = 1e-12;
  double unitarity = 1e-10;
  double bloch_norm = 1e-10;
  double gram_diagonal = 1e-12;
  double rank_cutoff = 1e-10;   // relative to the largest eigenvalue
  double coplanar = 1e-9;       // on |V|
  double ru_equality = 1e-8;
  double probability_sum = 1e-12;
};

const Tolerances& tolerances();
void set_tolerances(const Tolerances& tol);

namespace pauli {
ComplexMatrix identity(int dim = 2);
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
/// |0><1|, maps |1> to |0>.
ComplexMatrix raising();
/// |1><0|, maps |0> to |1>.
ComplexMatrix lowering();
}  // namespace pauli

class PureState {
 public:
  /// Throws ValidationError unless the amplitudes have unit norm.
  explicit PureState(ComplexVector amplitudes);
  /// Rescales to unit norm; throws on the zero vector.
  static PureState normalized(ComplexVector amplitudes);
  static PureState basis(int dim, int index);

  int dim() const { return static_cast<int>(amps_.size()); }
  const ComplexVector& amplitudes() const { return amps_; }
  cplx operator[](int i) const { return amps_[i]; }
  ComplexMatrix projector() const { return amps_ * amps_.adjoint(); }

 private:
  ComplexVector amps_;
};

class DensityMatrix {
 public:
  /// Throws ValidationError unless the matrix is a unit-trace Hermitian
  /// positive semidefinite operator.
  explicit DensityMatrix(ComplexMatrix mat);
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const ComplexMatrix& matrix() const { return mat_; }

 private:
  ComplexMatrix mat_;
};

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static BlochVector from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
  double norm() const { return vec().norm(); }
};

/// Eigenpairs of a Hermitian matrix. Values ascend; each eigenvector has its
/// first non-negligible component rotated to the positive real axis.
struct HermitianEigen {
  Eigen::VectorXd values;
  ComplexMatrix vectors;  // columns
};

HermitianEigen hermitian_eigen(const ComplexMatrix& h);

bool is_hermitian(const ComplexMatrix& a, double tol);
bool is_unitary(const ComplexMatrix& u, double tol);
double max_abs(const ComplexMatrix& a);

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix tensor(std::span<const ComplexMatrix> factors);

/// Reduced operator on the subsystems listed in `keep` (ascending order of
/// subsystems is preserved). Works for any square operator, not only states.
ComplexMatrix partial_trace(const ComplexMatrix& op, std::span<const int> dims,
                            std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> dims,
                            std::span<const int> keep);

/// exp(-i h t) for Hermitian h.
ComplexMatrix expm_unitary(const ComplexMatrix& h, double t);

BlochVector bloch_from_state(const PureState& psi);
PureState state_from_bloch(const BlochVector& b);

double purity(const DensityMatrix& rho);
double purity(const ComplexMatrix& rho);
double trace_norm(const ComplexMatrix& a);

/// |i><j| of dimension d.
ComplexMatrix matrix_unit(int d, int i, int j);

}  // namespace birkhoff
