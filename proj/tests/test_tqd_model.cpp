#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "birkhoff/tqd_model.hpp"
#include "oracles.hpp"

using namespace birkhoff;

namespace {

ModelParams zero_params() {
  ModelParams p;
  p.omega1 = p.omega2 = p.kappa1 = p.kappa2 = 0.0;
  p.field = Eigen::Vector3d::Zero();
  return p;
}

}  // namespace

TEST_CASE("conditional Hamiltonians") {
  ModelParams p = zero_params();
  p.field = {0, 0, 1};
  for (const auto& h : conditional_hamiltonians(p)) CHECK(max_abs(h - pauli::z()) == 0.0);

  p = zero_params();
  p.kappa1 = p.kappa2 = 0.7;
  const auto hk = conditional_hamiltonians(p);
  CHECK(max_abs(hk[0] - 1.4 * pauli::z()) < 1e-15);
  CHECK(max_abs(hk[1]) < 1e-15);
  CHECK(max_abs(hk[2]) < 1e-15);
  CHECK(max_abs(hk[3] + 1.4 * pauli::z()) < 1e-15);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelParams q = oracle::random_params(rng);
    const auto h = conditional_hamiltonians(q);
    ComplexMatrix assembled = ComplexMatrix::Zero(8, 8);
    for (int n = 0; n < 4; ++n) assembled += tensor(matrix_unit(4, n, n), h[n]);
    CHECK(max_abs(assembled - oracle::hamiltonian(q)) <= 1e-12);
    CHECK(max_abs(full_hamiltonian(q) - oracle::hamiltonian(q)) <= 1e-12);
  }
}

TEST_CASE("relative states") {
  const ModelParams p = ModelParams::defaults();
  for (const auto& s : relative_states(p, 0.0)) CHECK(max_abs(s.amplitudes() - p.psi0.amplitudes()) == 0.0);

  ModelParams q = p;
  q.field = {0, 0, 0.5};
  ComplexVector v(2);
  v << 0.6, cplx(0, 0.8);
  q.psi0 = PureState(v);
  for (const auto& s : relative_states(q, 3.3)) {
    CHECK(std::abs(std::abs(s[0]) - 0.6) < 1e-14);
    CHECK(std::abs(std::abs(s[1]) - 0.8) < 1e-14);
  }

  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelParams r = oracle::random_params(rng);
    const auto states = relative_states(r, 1.0);
    for (int n = 0; n < 4; ++n) {
      const auto [sa, sb] = system_signs(n);
      const double a = sa * r.omega1 + sb * r.omega2;
      const Eigen::Vector3d field = r.field + Eigen::Vector3d(0, 0, sa * r.kappa1 + sb * r.kappa2);
      const ComplexVector want = oracle::rodrigues(a, field, 1.0) * r.psi0.amplitudes();
      CHECK(max_abs(states[n].amplitudes() - want) < 1e-13);
    }
  }
}

TEST_CASE("channel_at") {
  const ModelParams p = ModelParams::defaults();
  CHECK(max_abs(channel_at(p, 0.0).gram() - ComplexMatrix::Ones(4, 4)) < 1e-15);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> time(0.0, 10.0);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelParams r = oracle::random_params(rng);
    const double t = time(rng);
    CHECK(max_abs(channel_at(r, t).gram() - oracle::channel_gram(r, t)) < 1e-10);
  }

  ModelParams sym = p;
  sym.kappa2 = sym.kappa1;
  sym.omega2 = sym.omega1;
  const ComplexMatrix g = channel_at(sym, 2.3).gram();
  CHECK(max_abs(g.row(1) - g.row(2)) < 1e-14);
  CHECK(max_abs(g.col(1) - g.col(2)) < 1e-14);
}

TEST_CASE("volume") {
  const ModelParams p = ModelParams::defaults();
  CHECK(volume_at(p, 0.0) == 0.0);
  ModelParams sym = p;
  sym.kappa2 = sym.kappa1;
  ModelParams longitudinal = p;
  longitudinal.field = {0, 0, 0.5};
  for (double t : {0.5, 1.7, 4.2, 8.9}) {
    CHECK(std::abs(volume_at(sym, t)) < 1e-15);
    CHECK(std::abs(volume_at(longitudinal, t)) < 1e-15);
  }
}

TEST_CASE("extremality conditions") {
  const auto all = extremality_conditions(ModelParams::defaults());
  CHECK(all.asymmetric_coupling);
  CHECK(all.transverse_field);
  CHECK(all.longitudinal_field);
  CHECK(all.all());
  ModelParams p;
  p.kappa1 = p.kappa2 = 1.0;
  CHECK_FALSE(extremality_conditions(p).asymmetric_coupling);
  p = ModelParams{};
  p.field = {0, 0, 1};
  CHECK_FALSE(extremality_conditions(p).transverse_field);
  CHECK(extremality_conditions(p).longitudinal_field);
  p = ModelParams{};
  p.kappa2 = 0.0;
  CHECK_FALSE(extremality_conditions(p).asymmetric_coupling);
}

TEST_CASE("volume time series") {
  const ModelParams p = ModelParams::defaults();
  const std::vector<double> zero{0.0};
  const TimeSeries one = volume_time_series(p, zero);
  REQUIRE(one.size() == 1);
  CHECK(*one[0].volume == 0.0);
  CHECK_THROWS_AS(volume_time_series(p, std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(volume_time_series(p, std::vector<double>{1.0, 1.0}), std::invalid_argument);

  const auto grid = uniform_grid(10.0, 1000);
  const TimeSeries par = volume_time_series(p, grid);
  const TimeSeries ser = reference::volume_time_series(p, grid);
  REQUIRE(par.size() == 1001);
  int positive = 0, negative = 0;
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(*par[i].volume == *ser[i].volume);
    CHECK(par[i].t == grid[i]);
    positive += *par[i].volume > 1e-3;
    negative += *par[i].volume < -1e-3;
  }
  CHECK(positive > 0);
  CHECK(negative > 0);

  ModelParams sym = p;
  sym.kappa2 = sym.kappa1;
  for (const auto& r : volume_time_series(sym, grid).records) CHECK(std::abs(*r.volume) < 1e-15);
}
