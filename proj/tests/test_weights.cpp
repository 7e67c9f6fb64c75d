#include <doctest.h>

#include <cmath>
#include <limits>

#include "dphase/weights.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace dphase;

using oracle::brute_force_aq;

TEST_CASE("make_weight presets") {
  const auto sq = build_grid(2, 16, Shape::square);
  const auto c1 = make_weight(WeightPreset::constant, {.c = 1.0}, sq);
  for (double v : c1.values) CHECK(v == 1.0);
  CHECK(c1.lipschitz_estimate == 0.0);
  CHECK(c1.boundary_min == 1.0);
  CHECK(c1.preset_name == "constant");

  const auto line = build_grid(1, 64, Shape::interval);
  WeightParams par{.c = 4.0, .center = Point{0.5, 0.0, 0.0}};
  CHECK(weight_value(WeightPreset::parabola, par, {0.5, 0, 0}, 1) == 0.0);
  CHECK(weight_value(WeightPreset::parabola, par, {0.0, 0, 0}, 1) == 1.0);
  CHECK(weight_value(WeightPreset::parabola, par, {1.0, 0, 0}, 1) == 1.0);
  const auto parab = make_weight(WeightPreset::parabola, par, line);
  CHECK(parab.values.front() == doctest::Approx(4.0 * std::pow(0.5 - 0.5 / 64, 2)));
  CHECK(parab.values.back() == doctest::Approx(parab.values.front()));
  // the p-phase is the central cell band
  const double central = *std::min_element(parab.values.begin(), parab.values.end());
  CHECK(central <= 4.0 * std::pow(0.5 / 64, 2) * (1 + 1e-12));

  const auto disk = build_grid(2, 64, Shape::disk);
  const auto ring = make_weight(WeightPreset::ring, {.c = 1.0, .k = 4.0, .r0 = 0.25}, disk);
  for (std::size_t c = 0; c < disk->cell_count(); ++c) {
    const auto x = disk->cell_center(c);
    const double r = std::hypot(x[0], x[1]);
    if (r <= 0.25) CHECK(ring.values[c] == 0.0);
    if (disk->cell_touches_boundary(c)) CHECK(ring.values[c] == 1.0);
  }
  CHECK(ring.boundary_min == 1.0);
  CHECK(ring.lipschitz_estimate == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("make_weight rejects bad parameters") {
  const auto disk = build_grid(2, 32, Shape::disk);
  CHECK_THROWS_AS(make_weight(WeightPreset::constant, {.c = 0.0}, disk), std::invalid_argument);
  CHECK_THROWS_AS(make_weight(WeightPreset::ring, {.c = 1.0, .k = -1.0}, disk), std::invalid_argument);
  // a ring that never switches on before the boundary vanishes there
  CHECK_THROWS_AS(make_weight(WeightPreset::ring, {.c = 1.0, .k = 4.0, .r0 = 1.0}, disk), std::invalid_argument);
  CHECK_THROWS_AS(parse_weight_preset("gaussian"), std::invalid_argument);
}

TEST_CASE("lipschitz estimate converges under refinement") {
  for (int N : {64, 128, 256}) {
    const auto line = build_grid(1, N, Shape::interval);
    // |a'| = 8 |x - 1/2| <= 4
    CHECK(make_weight(WeightPreset::parabola, {.c = 4.0}, line).lipschitz_estimate == doctest::Approx(4.0).epsilon(0.1));
    const auto disk = build_grid(2, N, Shape::disk);
    CHECK(make_weight(WeightPreset::ring, {.c = 1.0, .k = 3.0, .r0 = 0.2}, disk).lipschitz_estimate ==
          doctest::Approx(3.0).epsilon(0.1));
  }
}

TEST_CASE("A_q constant of constant weights is exactly one") {
  for (double q : {1.1, 1.3, 1.4, 2.0, 5.0}) {
    for (const auto& g : {build_grid(1, 33, Shape::interval), build_grid(2, 20, Shape::disk), build_grid(3, 6, Shape::square)}) {
      CHECK(aq_constant(testing::constant_weight(g, 2.5), q) == 1.0);
      CHECK(aq_constant(testing::constant_weight(g, 2.5), q, {.family = CubeFamily::dyadic}) == 1.0);
    }
  }
}

TEST_CASE("A_q constant matches exhaustive windows") {
  for (int N : {8, 37, 128, 256}) {
    const auto line = build_grid(1, N, Shape::interval);
    const auto a = make_weight(WeightPreset::parabola, {.c = 4.0}, line);
    const double fast = aq_constant(a, 1.4);
    const double slow = brute_force_aq(a, 1.4, 1e-8);
    CHECK(std::abs(fast - slow) <= 1e-12 * slow);
  }
  // 2D, including a masked domain and a zero region that hits the floor
  const auto disk = build_grid(2, 14, Shape::disk);
  const auto ring = make_weight(WeightPreset::ring, {.c = 1.0, .k = 4.0, .r0 = 0.3}, disk);
  CHECK(std::abs(aq_constant(ring, 1.4) - brute_force_aq(ring, 1.4, 1e-8)) <= 1e-12 * brute_force_aq(ring, 1.4, 1e-8));
  const auto sq = build_grid(2, 12, Shape::square);
  const auto par = make_weight(WeightPreset::parabola, {.c = 4.0}, sq);
  CHECK(std::abs(aq_constant(par, 1.7) - brute_force_aq(par, 1.7, 1e-8)) <= 1e-12 * brute_force_aq(par, 1.7, 1e-8));
}

TEST_CASE("A_q constant: Jensen, scaling, flooring") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = build_grid(trial % 2 ? 2 : 1, 16, trial % 2 ? Shape::square : Shape::interval);
    std::vector<double> v(g->cell_count());
    for (double& x : v) x = u(rng);
    const auto a = WeightField::from_values(g, v, "random");
    const double q = 1.1 + 0.2 * (trial % 5);
    const double base = aq_constant(a, q);
    CHECK(base >= 1.0);
    for (double& x : v) x *= 37.5;
    CHECK(std::abs(aq_constant(WeightField::from_values(g, v, "scaled"), q) - base) <= 1e-12 * base);
    CHECK(aq_constant(a, q, {.family = CubeFamily::dyadic}) <= base);
  }

  const auto disk = build_grid(2, 32, Shape::disk);
  const auto ring = make_weight(WeightPreset::ring, {.c = 1.0, .k = 4.0, .r0 = 0.25}, disk);
  const double tight = aq_constant(ring, 1.4, {.floor_relative = 1e-8});
  const double loose = aq_constant(ring, 1.4, {.floor_relative = 1e-4});
  CHECK(std::isfinite(tight));
  CHECK(tight >= loose);

  CHECK(aq_constant(testing::constant_weight(disk, 0.0), 1.4) == std::numeric_limits<double>::infinity());
}

TEST_CASE("check_h0") {
  const auto cube = build_grid(3, 6, Shape::square);
  const auto r = check_h0(testing::constant_weight(cube, 1.0), 1.3, 3, 1.01);
  CHECK(r.exponent_ratio_ok);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.aq_constant == 1.0);

  const auto sq = build_grid(2, 16, Shape::square);
  const auto w = check_h0(make_weight(WeightPreset::parabola, {.c = 4.0}, sq), 1.6, 2, 1.01);
  CHECK_FALSE(w.ratio_condition);
  CHECK_FALSE(w.exponent_ratio_ok);
  CHECK(w.verdict == Verdict::warn);

  // q >= n alone also downgrades to a warning
  const auto line = build_grid(1, 16, Shape::interval);
  const auto qn = check_h0(testing::constant_weight(line, 1.0), 1.3, 1, 1.25);
  CHECK_FALSE(qn.q_below_n);
  CHECK(qn.verdict == Verdict::warn);

  // ring with r0 beyond the inradius: zero on the boundary
  const auto disk = build_grid(2, 32, Shape::disk);
  std::vector<double> v(disk->cell_count());
  const WeightParams wide{.c = 1.0, .k = 4.0, .r0 = 1.0};
  for (std::size_t c = 0; c < v.size(); ++c) v[c] = weight_value(WeightPreset::ring, wide, disk->cell_center(c), 2);
  const auto f = check_h0(WeightField::from_values(disk, v, "ring"), 1.3, 2, 1.1);
  CHECK(f.boundary_min == 0.0);
  CHECK(f.verdict == Verdict::fail);

  CHECK_THROWS_AS(check_h0(testing::constant_weight(sq, 1.0), 1.3, 2, 1.5), std::invalid_argument);
}
