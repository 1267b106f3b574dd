#include <doctest.h>

#include <cmath>

#include "cfser/common.hpp"
#include "cfser/geometry.hpp"

using namespace cfser;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("wrap distance pinned values") {
  CHECK(wrap_distance({0, 0}, {99, 0}, 100, 4) ==
        doctest::Approx(std::sqrt(1.0 + 16.0)).epsilon(1e-12));
  CHECK(wrap_distance({12, 34}, {12, 34}, 100, 4) == doctest::Approx(4.0));
  CHECK(wrap_distance({0, 0}, {50, 50}, 100, 0) ==
        doctest::Approx(std::sqrt(5000.0)).epsilon(1e-12));
}

TEST_CASE("wrap distance properties") {
  Rng rng(31);
  const double side = 100.0;
  for (int it = 0; it < 500; ++it) {
    Point2 a{rng.uniform(0, side), rng.uniform(0, side)};
    Point2 b{rng.uniform(0, side), rng.uniform(0, side)};
    const double d = wrap_distance_2d(a, b, side);
    CHECK(d == doctest::Approx(wrap_distance_2d(b, a, side)).epsilon(1e-12));
    // planar component can never exceed half the square diagonal
    CHECK(d <= side * std::sqrt(2.0) / 2.0 + 1e-12);
    // toroidal translation of both points leaves the metric unchanged
    const double sx = side * double(int(rng.next_u64() % 3) - 1);
    const double sy = side * double(int(rng.next_u64() % 3) - 1);
    auto wrap = [side](double v) {
      double r = std::fmod(v, side);
      return r < 0 ? r + side : r;
    };
    Point2 a2{wrap(a.x + sx), wrap(a.y + sy)};
    Point2 b2{wrap(b.x + sx), wrap(b.y + sy)};
    CHECK(wrap_distance_2d(a2, b2, side) == doctest::Approx(d).epsilon(1e-9));
  }
}

TEST_CASE("generate_deployment ranges and determinism") {
  const Deployment d = generate_deployment(64, 4, 100.0, 4.0, 77);
  REQUIRE(d.num_aps() == 64);
  REQUIRE(d.num_users() == 4);
  for (const auto& p : d.ap_positions) {
    CHECK(p.x >= 0.0);
    CHECK(p.x < 100.0);
    CHECK(p.y >= 0.0);
    CHECK(p.y < 100.0);
  }
  const Deployment d2 = generate_deployment(64, 4, 100.0, 4.0, 77);
  for (int i = 0; i < 64; ++i) {
    CHECK(d.ap_positions[i].x == d2.ap_positions[i].x);
    CHECK(d.ap_positions[i].y == d2.ap_positions[i].y);
  }
  const Deployment d3 = generate_deployment(64, 4, 100.0, 4.0, 78);
  CHECK(d.ap_positions[0].x != d3.ap_positions[0].x);
}

TEST_CASE("generate_deployment rejects degenerate input") {
  CHECK_THROWS_AS(generate_deployment(1, 1, 0.0, 4.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_deployment(0, 1, 100.0, 4.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_deployment(1, 0, 100.0, 4.0, 1), std::invalid_argument);
}

TEST_SUITE_END();
