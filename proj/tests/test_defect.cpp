#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "birkhoff/defect.hpp"
#include "oracles.hpp"

using namespace birkhoff;

namespace {

DefectConfig small(int k = 4, int starts = 4) {
  DefectConfig cfg;
  cfg.k = k;
  cfg.starts = starts;
  return cfg;
}

RUChannel random_diagonal_ru(int d, int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) total += x = u(rng);
  std::vector<RUComponent> comps;
  for (int i = 0; i < k; ++i) comps.push_back({w[i] / total, oracle::random_diagonal_unitary(d, rng)});
  return RUChannel(comps);
}

PhaseDampingChannel channel_of(const RUChannel& ru) {
  const int d = ru.dim();
  ComplexMatrix g(d, d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) g(m, n) = ru.apply(matrix_unit(d, m, n))(m, n);
  return PhaseDampingChannel(g, 1e-12, 1e-12);
}

}  // namespace

TEST_CASE("identity channel") {
  const DefectResult r = nearest_ru(PhaseDampingChannel::identity(4), small());
  CHECK(r.d_b <= 1e-6);
  const ComplexMatrix g = channel_of(r.witness).gram();
  CHECK(max_abs(g - ComplexMatrix::Ones(4, 4)) <= 1e-6);
}

TEST_CASE("RU channels by construction") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 4; ++trial) {
    const RUChannel ru = random_diagonal_ru(4, 1 + trial, rng);
    const DefectResult r = nearest_ru(channel_of(ru), small());
    CHECK(r.d_b <= 1e-5);
    CHECK(r.lower_bound <= r.d_b + 1e-9);
    CHECK(ru_distance(channel_of(ru), ru) <= 1e-6);
  }
}

TEST_CASE("coplanar model channel") {
  ModelParams p = ModelParams::defaults();
  p.kappa2 = p.kappa1;
  const PhaseDampingChannel ch = channel_at(p, 3.7);
  const DefectResult r = nearest_ru(ch, small());
  CHECK(r.d_b <= 1e-4);
  const auto states = relative_states(p, 3.7);
  const RUChannel constructive = coplanar_ru_decomposition(std::vector<PureState>(states.begin(), states.end()));
  const ComplexMatrix diff = channel_of(r.witness).gram() - channel_of(constructive).gram();
  CHECK(schur_diamond_norm(diff).value <= 2e-4);
}

TEST_CASE("extremal model channel") {
  const PhaseDampingChannel ch = channel_at(ModelParams::defaults(), 5.31);
  const DefectResult r = nearest_ru(ch, small(8, 8));
  CHECK(r.d_b > 0.01);
  CHECK(r.lower_bound > 0.01);
  CHECK(r.lower_bound <= r.d_b + 1e-9);
  REQUIRE(r.per_start.size() == 8);
  double worst = 0.0;
  for (double v : r.per_start) worst = std::max(worst, v);
  CHECK(worst - r.d_b < 1e-3);
  // The reported value is the diamond distance to the witness.
  CHECK(std::abs(ru_distance(ch, r.witness) - r.d_b) <= 1e-6);
}

TEST_CASE("determinism and the reference path") {
  const PhaseDampingChannel ch = channel_at(ModelParams::defaults(), 2.0);
  const DefectConfig cfg = small(3, 3);
  const DefectResult a = nearest_ru(ch, cfg);
  const DefectResult b = nearest_ru(ch, cfg);
  const DefectResult s = reference::nearest_ru(ch, cfg);
  CHECK(a.d_b == b.d_b);
  CHECK(a.d_b == s.d_b);
  CHECK(a.per_start == s.per_start);
}

TEST_CASE("nesting in k") {
  const PhaseDampingChannel ch = channel_at(ModelParams::defaults(), 7.0);
  const DefectResult two = nearest_ru(ch, small(2, 3));
  const std::vector<RUChannel> seed{two.witness};
  const DefectResult four = nearest_ru(ch, small(4, 3), seed);
  CHECK(four.d_b <= two.d_b);
}

TEST_CASE("argument errors") {
  const PhaseDampingChannel ch = PhaseDampingChannel::identity(4);
  DefectConfig bad = small();
  bad.k = 0;
  CHECK_THROWS_AS(nearest_ru(ch, bad), std::invalid_argument);
  std::mt19937_64 rng(42);
  const std::vector<RUChannel> dense{RUChannel({{1.0, oracle::haar_unitary(4, rng)}})};
  CHECK_THROWS_AS(nearest_ru(ch, small(), dense), std::invalid_argument);
}

TEST_CASE("defect series") {
  const LindbladParams p{ModelParams::defaults(), 0.0};
  const std::vector<double> zero{0.0};
  const TimeSeries one = defect_series(p, zero, small());
  REQUIRE(one.size() == 1);
  REQUIRE(one[0].defect.has_value());
  CHECK(*one[0].defect <= 1e-6);

  const std::vector<double> grid{0.0, 0.5, 1.0};
  const TimeSeries warm = defect_series(p, grid, small(3, 2));
  const TimeSeries cold = defect_series(p, grid, small(3, 2), {.warm_start = false});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    REQUIRE(warm[i].defect.has_value());
    REQUIRE(cold[i].defect.has_value());
    CHECK(*warm[i].defect >= 0.0);
    CHECK(std::abs(*warm[i].defect - *cold[i].defect) < 1e-3);
  }
}
