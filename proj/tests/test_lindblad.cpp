#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "birkhoff/integrator.hpp"
#include "birkhoff/lindblad.hpp"
#include "oracles.hpp"

using namespace birkhoff;

namespace {

ComplexMatrix random_state(int d, std::mt19937_64& rng) {
  const ComplexVector a = oracle::haar_state(d, rng);
  const ComplexVector b = oracle::haar_state(d, rng);
  return 0.6 * a * a.adjoint() + 0.4 * b * b.adjoint();
}

ModelParams silent() {
  ModelParams p;
  p.omega1 = p.omega2 = p.kappa1 = p.kappa2 = 0.0;
  p.field = Eigen::Vector3d::Zero();
  return p;
}

}  // namespace

TEST_CASE("integrator") {
  using Vec = Eigen::VectorXd;
  const auto decay = [](const Vec& y) { return Vec(-y); };
  const std::vector<double> times{0.0, 0.5, 2.0};
  const auto out = integrate_adaptive(decay, Vec(Vec::Ones(1)), times, IntegratorOptions{.dt_max = 0.1});
  REQUIRE(out.size() == 3);
  CHECK(out[0][0] == 1.0);
  CHECK(std::abs(out[2][0] - std::exp(-2.0)) < 1e-10);

  const auto blowup = [](const Vec& y) { return Vec(y.cwiseProduct(y)); };
  const std::vector<double> past{2.0};
  try {
    integrate_adaptive(blowup, Vec(Vec::Ones(1)), past, IntegratorOptions{.dt_max = 0.01});
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.t_reached() > 0.9);
    CHECK(e.t_reached() < 1.0);
  }
  CHECK_THROWS_AS(integrate_adaptive(decay, Vec(Vec::Ones(1)), past, IntegratorOptions{}), std::invalid_argument);
}

TEST_CASE("default dt_max") {
  LindbladParams p{ModelParams::defaults(), 0.0};
  const double field = p.model.field.norm();
  CHECK(default_dt_max(p) == doctest::Approx(1e-3 * std::min(1.0, 1.0 / field)));
  p.gamma = 4.0;
  CHECK(default_dt_max(p) == doctest::Approx(2.5e-4));
  p.model.field.setZero();
  p.gamma = 0.0;
  CHECK(default_dt_max(p) == doctest::Approx(1e-3));
}

TEST_CASE("lindblad_rhs") {
  std::mt19937_64 rng(21);
  const ModelParams m = oracle::random_params(rng);
  const ComplexMatrix rho = random_state(8, rng);
  const ComplexMatrix h = oracle::hamiltonian(m);
  const ComplexMatrix unitary = cplx(0, -1) * (h * rho - rho * h);
  CHECK(max_abs(lindblad_rhs({m, 0.0}, rho) - unitary) < 1e-13);

  const LindbladParams lp{m, 0.8};
  for (int i = 0; i < 5; ++i) {
    const ComplexMatrix r = random_state(8, rng);
    const ComplexMatrix d = lindblad_rhs(lp, r);
    CHECK(std::abs(d.trace()) <= 1e-13);
    CHECK(is_hermitian(d, 1e-13));
  }

  const ComplexMatrix rho_s = random_state(4, rng);
  const ComplexMatrix excited = matrix_unit(2, 0, 0);
  const ComplexMatrix d = lindblad_rhs({silent(), 2.0}, tensor(rho_s, excited));
  const std::vector<int> dims{4, 2};
  const std::vector<int> keep_r{1};
  const ComplexMatrix dr = partial_trace(d, dims, keep_r);
  CHECK(std::abs(d.trace()) < 1e-15);
  CHECK(dr(0, 0).real() == doctest::Approx(-2.0));
  CHECK(dr(1, 1).real() == doctest::Approx(2.0));
}

TEST_CASE("integrate_full") {
  std::mt19937_64 rng(22);
  const ModelParams m = oracle::random_params(rng);
  const DensityMatrix rho0(random_state(8, rng));
  CHECK(max_abs(integrate_full({m, 0.5}, rho0, 0.0).matrix() - rho0.matrix()) < 1e-15);

  const ComplexMatrix u = (ComplexMatrix(oracle::hamiltonian(m) * cplx(0.0, -2.0))).exp();
  const ComplexMatrix exact = u * rho0.matrix() * u.adjoint();
  CHECK(max_abs(integrate_full({m, 0.0}, rho0, 2.0).matrix() - exact) <= 1e-8);

  // The transverse field keeps R off its ground state: coherence O(G / gamma),
  // excited population O((G / gamma)^2).
  ModelParams excited = ModelParams::defaults();
  excited.psi0 = PureState::basis(2, 0);
  const DensityMatrix start(tensor(random_state(4, rng), excited.psi0.projector()));
  const DensityMatrix late = integrate_full({excited, 50.0}, start, 1.0);
  const std::vector<int> dims{4, 2};
  const std::vector<int> keep_r{1};
  const ComplexMatrix r = partial_trace(late.matrix(), dims, keep_r);
  CHECK(r(0, 0).real() < 2e-3);
  CHECK(std::abs(r(0, 1)) < 2.0 * excited.field.norm() / 50.0);
  CHECK(std::abs(late.matrix().trace() - 1.0) < 1e-8);

  CHECK_THROWS_AS(integrate_full({m, 0.0}, DensityMatrix::maximally_mixed(4), 1.0), DimensionError);
  CHECK_THROWS_AS(integrate_full({m, -1.0}, rho0, 1.0), ValidationError);
}

TEST_CASE("dephasing coefficients") {
  std::mt19937_64 rng(23);
  const ModelParams m = oracle::random_params(rng);
  CHECK(max_abs(dephasing_coefficients({m, 0.7}, 0.0) - ComplexMatrix::Ones(4, 4)) == 0.0);
  for (double t : {0.4, 3.1}) CHECK(max_abs(dephasing_coefficients({m, 0.0}, t) - channel_at(m, t).gram()) <= 1e-8);

  SUBCASE("16-unit process tomography on the full dynamics") {
    for (double gamma : {0.0, 0.3, 1.0}) {
      const LindbladParams p{oracle::random_params(rng), gamma};
      const double t = 1.5;
      const ComplexMatrix block = dephasing_coefficients(p, t);
      const ComplexMatrix full = dephasing_coefficients_full(p, t);
      CHECK(max_abs(block - full) <= 1e-8);
      CHECK(max_abs(block - oracle::damped_gram_full(p, t)) <= 1e-8);
    }
  }

  SUBCASE("parallel series matches the serial reference") {
    const LindbladParams p{m, 0.5};
    const auto grid = uniform_grid(5.0, 50);
    const auto par = dephasing_coefficients_series(p, grid);
    const auto ser = reference::dephasing_coefficients_series(p, grid);
    REQUIRE(par.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(max_abs(par[i] - ser[i]) == 0.0);
    CHECK(max_abs(par.back() - dephasing_coefficients(p, 5.0)) <= 1e-10);
  }
}

TEST_CASE("damped channel") {
  const ModelParams m = ModelParams::defaults();
  CHECK(max_abs(damped_channel_at({m, 0.0}, 2.0).gram() - channel_at(m, 2.0).gram()) <= 1e-8);
  CHECK(max_abs(damped_channel_at({m, 1.0}, 0.0).gram() - ComplexMatrix::Ones(4, 4)) == 0.0);

  const PhaseDampingChannel strong = damped_channel_at({m, 100.0}, 5.0);
  CHECK(max_abs(ComplexMatrix(strong.gram().diagonal()) - ComplexMatrix::Ones(4, 1)) <= 1e-10);
  CHECK(hermitian_eigen(strong.gram()).values.minCoeff() >= -1e-8);
  // Strong damping pins R near its ground state, so the system dephases
  // slowly: coherences stay far from zero.
  CHECK(std::abs(strong.gram()(0, 3)) > 0.5);
}

TEST_CASE("purity series") {
  const ModelParams m = ModelParams::defaults();
  const auto grid = uniform_grid(10.0, 200);
  for (const auto& r : purity_series({m, 0.5}, DensityMatrix::maximally_mixed(4), grid).records)
    CHECK(std::abs(*r.purity - 0.25) < 1e-14);

  const DensityMatrix pure = DensityMatrix::from_pure(PureState(ComplexVector::Constant(4, 0.5)));
  const TimeSeries rev = purity_series({m, 0.0}, pure, grid);
  CHECK(*rev[0].purity == doctest::Approx(1.0).epsilon(1e-14));
  int rises = 0, falls = 0;
  for (std::size_t i = 1; i < rev.size(); ++i) {
    CHECK(*rev[i].purity >= 0.25 - 1e-12);
    CHECK(*rev[i].purity <= 1.0 + 1e-12);
    rises += *rev[i].purity > *rev[i - 1].purity;
    falls += *rev[i].purity < *rev[i - 1].purity;
  }
  CHECK(rises > 10);
  CHECK(falls > 10);
  CHECK_THROWS_AS(purity_series({m, 0.0}, DensityMatrix::maximally_mixed(2), grid), DimensionError);
}
