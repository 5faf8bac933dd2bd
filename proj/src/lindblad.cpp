#include "birkhoff/lindblad.hpp"

#include <array>
#include <exception>
#include <cmath>
#include <limits>

namespace birkhoff {

namespace {

using Block = Eigen::Matrix2cd;
using Full = Eigen::Matrix<cplx, 8, 8>;

struct BlockGenerator {
  Block h_left;
  Block h_right;
  double gamma;

  Block operator()(const Block& chi) const {
    // s- = |1><0|, s+ s- = |0><0|
    Block out = -kI * (h_left * chi - chi * h_right);
    if (gamma != 0.0) {
      Block jump = Block::Zero();
      jump(1, 1) = chi(0, 0);  // s- chi s+
      Block decay = Block::Zero();
      decay.row(0) += chi.row(0);  // s+ s- chi
      decay.col(0) += chi.col(0);  // chi s+ s-
      out += (gamma / 2.0) * (2.0 * jump - decay);
    }
    return out;
  }
};

struct FullGenerator {
  Full h;
  Full lower;  // 1 (x) 1 (x) s-
  Full number; // 1 (x) 1 (x) s+ s-
  double gamma;

  Full operator()(const Full& rho) const {
    Full out = -kI * (h * rho - rho * h);
    if (gamma != 0.0)
      out += (gamma / 2.0) *
             (2.0 * lower * rho * lower.adjoint() - number * rho - rho * number);
    return out;
  }
};

FullGenerator full_generator(const LindbladParams& p) {
  const ComplexMatrix id4 = ComplexMatrix::Identity(4, 4);
  const ComplexMatrix lower = tensor(id4, pauli::lowering());
  FullGenerator g;
  g.h = full_hamiltonian(p.model);
  g.lower = lower;
  g.number = lower.adjoint() * lower;
  g.gamma = p.gamma;
  return g;
}

IntegratorOptions resolve(const LindbladParams& p, IntegratorOptions opt) {
  if (!(opt.dt_max > 0.0)) opt.dt_max = default_dt_max(p);
  return opt;
}

void check_params(const LindbladParams& p) {
  if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma))
    throw ValidationError("decay rate gamma must be finite and non-negative");
}

std::array<std::pair<int, int>, 10> upper_blocks() {
  std::array<std::pair<int, int>, 10> b;
  int k = 0;
  for (int m = 0; m < 4; ++m)
    for (int n = m; n < 4; ++n) b[k++] = {m, n};
  return b;
}

std::vector<cplx> block_traces(const LindbladParams& p, const ConditionalHamiltonians& h, int m,
                               int n, std::span<const double> grid, const IntegratorOptions& opt) {
  BlockGenerator gen{h[m], h[n], p.gamma};
  const Block chi0 = p.model.psi0.projector();
  const auto states = integrate_adaptive<Block>(gen, chi0, grid, opt);
  std::vector<cplx> tr(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) tr[i] = states[i].trace();
  return tr;
}

template <bool Parallel>
std::vector<DephasingCoefficients> coefficients_series(const LindbladParams& p,
                                                       std::span<const double> grid,
                                                       const IntegratorOptions& options) {
  check_params(p);
  check_grid(grid);
  if (grid.front() < 0.0) throw std::invalid_argument("times must be non-negative");
  const IntegratorOptions opt = resolve(p, options);
  const auto h = conditional_hamiltonians(p.model);
  const auto blocks = upper_blocks();
  std::array<std::vector<cplx>, 10> traces;
  // Exceptions must not escape an OpenMP region; collect and rethrow.
  std::array<std::exception_ptr, 10> errors{};
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (int b = 0; b < 10; ++b) {
    try {
      traces[b] = block_traces(p, h, blocks[b].first, blocks[b].second, grid, opt);
    } catch (...) {
      errors[b] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<DephasingCoefficients> out(grid.size(), DephasingCoefficients::Zero(4, 4));
  for (int b = 0; b < 10; ++b) {
    const auto [m, n] = blocks[b];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out[i](m, n) = traces[b][i];
      out[i](n, m) = std::conj(traces[b][i]);
    }
  }
  // Diagonal blocks are trace-preserving evolutions; their traces are real.
  for (auto& c : out)
    for (int m = 0; m < 4; ++m) c(m, m) = c(m, m).real();
  return out;
}

}  // namespace

double default_dt_max(const LindbladParams& p) {
  double scale = 1.0;
  if (p.gamma > 0.0) scale = std::min(scale, 1.0 / p.gamma);
  const double field = p.model.field.norm();
  if (field > 0.0) scale = std::min(scale, 1.0 / field);
  return 1e-3 * scale;
}

ComplexMatrix lindblad_rhs(const LindbladParams& p, const ComplexMatrix& rho_tot) {
  check_params(p);
  if (rho_tot.rows() != 8 || rho_tot.cols() != 8)
    throw DimensionError("lindblad_rhs expects an 8 x 8 operator");
  const Full rho = rho_tot;
  return full_generator(p)(rho);
}

ComplexMatrix propagate_full(const LindbladParams& p, const ComplexMatrix& x0, double t,
                             const IntegratorOptions& options) {
  check_params(p);
  if (x0.rows() != 8 || x0.cols() != 8) throw DimensionError("full propagation expects 8 x 8");
  if (t < 0.0) throw std::invalid_argument("time must be non-negative");
  const IntegratorOptions opt = resolve(p, options);
  const FullGenerator gen = full_generator(p);
  const Full y0 = x0;
  const double times[] = {t};
  return integrate_adaptive<Full>(gen, y0, times, opt).front();
}

DensityMatrix integrate_full(const LindbladParams& p, const DensityMatrix& rho0_tot, double t,
                             const IntegratorOptions& opt) {
  if (rho0_tot.dim() != 8) throw DimensionError("integrate_full expects an 8-dimensional state");
  ComplexMatrix rho = propagate_full(p, rho0_tot.matrix(), t, opt);
  if (std::abs(rho.trace().real() - 1.0) > 1e-8)
    throw IntegrityError("trace drifted during integration");
  if (!is_hermitian(rho, 1e-10)) throw IntegrityError("Hermiticity lost during integration");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-7) throw IntegrityError("positivity lost during integration");
  // Symmetrize away roundoff before handing out a validated state.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho));
}

DephasingCoefficients dephasing_coefficients(const LindbladParams& p, double t,
                                             const IntegratorOptions& opt) {
  const double grid[] = {t};
  return dephasing_coefficients_series(p, grid, opt).front();
}

std::vector<DephasingCoefficients> dephasing_coefficients_series(const LindbladParams& p,
                                                                 std::span<const double> grid,
                                                                 const IntegratorOptions& opt) {
  return coefficients_series<true>(p, grid, opt);
}

DephasingCoefficients dephasing_coefficients_full(const LindbladParams& p, double t,
                                                  const IntegratorOptions& opt) {
  const ComplexMatrix sigma = p.model.psi0.projector();
  const int dims[] = {4, 2};
  const int keep[] = {0};
  DephasingCoefficients c(4, 4);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      const ComplexMatrix out = propagate_full(p, tensor(matrix_unit(4, m, n), sigma), t, opt);
      c(m, n) = partial_trace(out, dims, keep)(m, n);
    }
  return c;
}

PhaseDampingChannel as_channel(const DephasingCoefficients& c) {
  try {
    return PhaseDampingChannel(c, 1e-10, 1e-8);
  } catch (const ValidationError& e) {
    throw IntegrityError(std::string("damped coefficients are not a valid channel: ") + e.what());
  }
}

PhaseDampingChannel damped_channel_at(const LindbladParams& p, double t,
                                      const IntegratorOptions& opt) {
  return as_channel(dephasing_coefficients(p, t, opt));
}

std::vector<PhaseDampingChannel> damped_channel_series(const LindbladParams& p,
                                                       std::span<const double> grid,
                                                       const IntegratorOptions& opt) {
  std::vector<PhaseDampingChannel> out;
  out.reserve(grid.size());
  for (const auto& c : dephasing_coefficients_series(p, grid, opt)) out.push_back(as_channel(c));
  return out;
}

TimeSeries purity_series(const LindbladParams& p, const DensityMatrix& rho0,
                         std::span<const double> grid, const IntegratorOptions& opt) {
  if (rho0.dim() != 4) throw DimensionError("purity_series expects a two-qubit state");
  TimeSeries series = make_series(grid);
  const auto channels = damped_channel_series(p, grid, opt);
  for (std::size_t i = 0; i < grid.size(); ++i)
    series.records[i].purity = purity(channels[i].apply(rho0.matrix()));
  return series;
}

namespace reference {
std::vector<DephasingCoefficients> dephasing_coefficients_series(const LindbladParams& p,
                                                                 std::span<const double> grid,
                                                                 const IntegratorOptions& opt) {
  return coefficients_series<false>(p, grid, opt);
}
}  // namespace reference

}  // namespace birkhoff
