#pragma once

// Reservoir qubit coupled to a zero-temperature bath:
//
//   d/dt rho = -i[H, rho] + (gamma/2)(2 s- rho s+ - s+ s- rho - rho s+ s-)
//
// with s- = |1><0| acting on R. The ground state of R is |1> (sz = -1);
// s- carries the excited state |0> to it.
//
// H is block diagonal in the system basis and the dissipator acts on R
// only, so each 2 x 2 block chi_mn of rho_tot evolves on its own:
//
//   d/dt chi = -i(H_m chi - chi H_n) + (gamma/2)(2 s- chi s+ - s+ s- chi - chi s+ s-)
//
// and the induced dephasing factor is c(m, n) = tr chi_mn(t).

#include <span>
#include <stdexcept>
#include <vector>

#include "birkhoff/core.hpp"
#include "birkhoff/integrator.hpp"
#include "birkhoff/phase_damping.hpp"
#include "birkhoff/timeseries.hpp"
#include "birkhoff/tqd_model.hpp"

namespace birkhoff {

struct LindbladParams {
  ModelParams model;
  double gamma = 0.0;
};

class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 1e-3 * min(1, 1/gamma, 1/|G|), zero rates ignored.
double default_dt_max(const LindbladParams& p);

ComplexMatrix lindblad_rhs(const LindbladParams& p, const ComplexMatrix& rho_tot);

/// Propagates any 8 x 8 operator (linear dynamics; no state checks).
ComplexMatrix propagate_full(const LindbladParams& p, const ComplexMatrix& x0, double t,
                             const IntegratorOptions& opt = {});

/// Density-matrix propagation with trace, Hermiticity and positivity
/// checks on the result.
DensityMatrix integrate_full(const LindbladParams& p, const DensityMatrix& rho0_tot, double t,
                             const IntegratorOptions& opt = {});

using DephasingCoefficients = ComplexMatrix;

DephasingCoefficients dephasing_coefficients(const LindbladParams& p, double t,
                                             const IntegratorOptions& opt = {});

/// Coefficients on every grid point, one pass per block along the grid.
std::vector<DephasingCoefficients> dephasing_coefficients_series(const LindbladParams& p,
                                                                 std::span<const double> grid,
                                                                 const IntegratorOptions& opt = {});

/// Coefficients by process tomography on the full 8 x 8 dynamics: propagate
/// |m><n| (x) |psi0><psi0| and trace out R.
DephasingCoefficients dephasing_coefficients_full(const LindbladParams& p, double t,
                                                  const IntegratorOptions& opt = {});

/// Throws IntegrityError if the coefficients are not a valid channel
/// (unit diagonal within 1e-10, PSD within 1e-8).
PhaseDampingChannel damped_channel_at(const LindbladParams& p, double t,
                                      const IntegratorOptions& opt = {});
std::vector<PhaseDampingChannel> damped_channel_series(const LindbladParams& p,
                                                       std::span<const double> grid,
                                                       const IntegratorOptions& opt = {});
PhaseDampingChannel as_channel(const DephasingCoefficients& c);

TimeSeries purity_series(const LindbladParams& p, const DensityMatrix& rho0,
                         std::span<const double> grid, const IntegratorOptions& opt = {});

namespace reference {
/// Serial block integration, kept for cross-checking the parallel path.
std::vector<DephasingCoefficients> dephasing_coefficients_series(const LindbladParams& p,
                                                                 std::span<const double> grid,
                                                                 const IntegratorOptions& opt = {});
}  // namespace reference

}  // namespace birkhoff
