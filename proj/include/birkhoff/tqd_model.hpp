#pragma once

// Two system qubits A, B dephased by a single reservoir qubit R:
//
//   H = W1 sz(A) + W2 sz(B) + k1 sz(A) sz(R) + k2 sz(B) sz(R) + G . sigma(R)
//
// Basis order is A (x) B (x) R with sz|0> = +|0>. System index n runs over
// |00>, |01>, |10>, |11>, i.e. (sA, sB) = (+,+), (+,-), (-,+), (-,-).

#include <array>
#include <span>
#include <vector>

#include "birkhoff/core.hpp"
#include "birkhoff/phase_damping.hpp"
#include "birkhoff/timeseries.hpp"

namespace birkhoff {

struct ModelParams {
  double omega1 = 1.0;
  double omega2 = 0.5;
  double kappa1 = 1.0;
  double kappa2 = 0.5;
  Eigen::Vector3d field{1.0, 0.0, 0.5};  // (Gx, Gy, Gz)
  PureState psi0 = PureState::basis(2, 0);

  /// Demonstration defaults; they satisfy all three extremality conditions.
  static ModelParams defaults() { return {}; }
};

using ConditionalHamiltonians = std::array<ComplexMatrix, 4>;

/// Spin signs (sA, sB) of system basis state n.
std::array<int, 2> system_signs(int n);

ConditionalHamiltonians conditional_hamiltonians(const ModelParams& p);

/// The 8 x 8 Hamiltonian assembled term by term from Pauli tensor products.
ComplexMatrix full_hamiltonian(const ModelParams& p);

std::array<PureState, 4> relative_states(const ModelParams& p, double t);

PhaseDampingChannel channel_at(const ModelParams& p, double t);

double volume_at(const ModelParams& p, double t);

struct ExtremalityReport {
  bool asymmetric_coupling;  // k1 != 0, k2 != 0, k1 != k2
  bool transverse_field;     // Gx != 0 or Gy != 0
  bool longitudinal_field;   // Gz != 0
  bool all() const { return asymmetric_coupling && transverse_field && longitudinal_field; }
};

/// Exact-zero tests on the configured parameter values.
ExtremalityReport extremality_conditions(const ModelParams& p);

/// V_t on every grid point. Grid must be non-empty and strictly increasing.
TimeSeries volume_time_series(const ModelParams& p, std::span<const double> grid);

namespace reference {
/// Serial evaluation of volume_time_series, kept for cross-checking.
TimeSeries volume_time_series(const ModelParams& p, std::span<const double> grid);
}  // namespace reference

}  // namespace birkhoff
