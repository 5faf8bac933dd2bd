#include "birkhoff/tqd_model.hpp"

#include <array>

namespace birkhoff {

std::array<int, 2> system_signs(int n) {
  if (n < 0 || n > 3) throw DimensionError("system index must be in 0..3");
  return {(n & 2) ? -1 : 1, (n & 1) ? -1 : 1};
}

ConditionalHamiltonians conditional_hamiltonians(const ModelParams& p) {
  const ComplexMatrix field_term =
      p.field[0] * pauli::x() + p.field[1] * pauli::y() + p.field[2] * pauli::z();
  ConditionalHamiltonians h;
  for (int n = 0; n < 4; ++n) {
    const auto [sa, sb] = system_signs(n);
    h[n] = (p.omega1 * sa + p.omega2 * sb) * pauli::identity() +
           (p.kappa1 * sa + p.kappa2 * sb) * pauli::z() + field_term;
  }
  return h;
}

ComplexMatrix full_hamiltonian(const ModelParams& p) {
  const ComplexMatrix id = pauli::identity();
  const ComplexMatrix sz = pauli::z();
  auto op3 = [](const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& r) {
    return tensor(tensor(a, b), r);
  };
  return p.omega1 * op3(sz, id, id) + p.omega2 * op3(id, sz, id) +
         p.kappa1 * op3(sz, id, sz) + p.kappa2 * op3(id, sz, sz) +
         op3(id, id, p.field[0] * pauli::x() + p.field[1] * pauli::y() + p.field[2] * sz);
}

std::array<PureState, 4> relative_states(const ModelParams& p, double t) {
  const auto h = conditional_hamiltonians(p);
  auto evolve = [&](int n) {
    return PureState::normalized(expm_unitary(h[n], t) * p.psi0.amplitudes());
  };
  return {evolve(0), evolve(1), evolve(2), evolve(3)};
}

PhaseDampingChannel channel_at(const ModelParams& p, double t) {
  const auto states = relative_states(p, t);
  return from_relative_states(states);
}

double volume_at(const ModelParams& p, double t) {
  const auto states = relative_states(p, t);
  std::array<BlochVector, 4> b;
  for (int n = 0; n < 4; ++n) b[n] = bloch_from_state(states[n]);
  return fsov_volume(b);
}

ExtremalityReport extremality_conditions(const ModelParams& p) {
  return {
      p.kappa1 != 0.0 && p.kappa2 != 0.0 && p.kappa1 != p.kappa2,
      p.field[0] != 0.0 || p.field[1] != 0.0,
      p.field[2] != 0.0,
  };
}

TimeSeries volume_time_series(const ModelParams& p, std::span<const double> grid) {
  check_grid(grid);
  TimeSeries series = make_series(grid);
  const auto n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) series.records[i].volume = volume_at(p, grid[i]);
  return series;
}

namespace reference {
TimeSeries volume_time_series(const ModelParams& p, std::span<const double> grid) {
  check_grid(grid);
  TimeSeries series = make_series(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) series.records[i].volume = volume_at(p, grid[i]);
  return series;
}
}  // namespace reference

}  // namespace birkhoff
