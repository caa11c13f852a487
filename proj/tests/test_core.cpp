#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "slelab/core.hpp"
#include "slelab/error.hpp"

using namespace slelab;

namespace {

PointConfig config(std::vector<Complex> z, std::vector<double> r) {
  return PointConfig::from_complex(z, r);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("derived parameters") {
  const auto p = derive_params(8.0 / 3.0);
  CHECK(p.d == doctest::Approx(4.0 / 3.0));
  CHECK(p.alpha == doctest::Approx(2.0));
  const auto q = derive_params(2.0);
  CHECK(q.d == doctest::Approx(1.25));
  CHECK(q.alpha == doctest::Approx(3.0));
  CHECK_THROWS_AS(derive_params(0.0), Error);
  CHECK_THROWS_AS(derive_params(8.0), Error);
  CHECK_THROWS_AS(derive_params(-1.0), Error);
  CHECK_THROWS_AS(derive_params(std::nan("")), Error);
}

TEST_CASE("half-plane points and configurations") {
  CHECK_THROWS_AS(HalfPlanePoint(0.0, -0.1), Error);
  CHECK(HalfPlanePoint(1.0, 0.0).on_boundary());
  // z_0 = 0 is the first neighbour of every point
  const auto c = config({{0, 1}, {0, 2}, {1, 1}}, {0.1, 0.1, 0.1});
  CHECK(c.gap(0) == doctest::Approx(1.0));
  CHECK(c.gap(1) == doctest::Approx(1.0));
  CHECK(c.gap(2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(config({{0, 0}}, {0.1}), Error);           // the origin
  CHECK_THROWS_AS(config({{0, 1}, {0, 1}}, {0.1, 0.1}), Error);  // repeated point
  CHECK_THROWS_AS(config({{0, 1}}, {0.0}), Error);
  CHECK_THROWS_AS(config({{0, 1}}, {0.1, 0.2}), Error);
}

TEST_CASE("p_scaling examples") {
  const auto k2 = derive_params(2.0);
  // boundary point: the x >= y branch always applies
  CHECK(p_scaling(0.0, 0.3, k2) == doctest::Approx(std::pow(0.3, 3.0)));
  // both branches agree at x = y
  CHECK(p_scaling(0.7, 0.7, k2) == doctest::Approx(std::pow(0.7, 3.0)));
  CHECK(p_scaling(1.0, 0.5, k2) == doctest::Approx(0.5946035575013605).epsilon(1e-12));
  CHECK(p_scaling(1.0, 0.0, k2) == 0.0);
  CHECK(p_scaling(0.0, 0.0, k2) == 0.0);
  CHECK_THROWS_AS(p_scaling(-1.0, 0.5, k2), Error);
  CHECK_THROWS_AS(p_scaling(1.0, -0.5, k2), Error);
}

TEST_CASE("p_ratio examples") {
  const auto k2 = derive_params(2.0);
  CHECK(p_ratio(0.5, 3.0, 2.0, k2) == 1.0);
  CHECK(p_ratio(0.0, 0.1, 0.4, k2) == doctest::Approx(std::pow(0.25, 3.0)));
  CHECK(p_ratio(2.0, 0.1, 1.0, k2) == doctest::Approx(std::pow(0.1, 0.75)));
  CHECK_THROWS_AS(p_ratio(1.0, 0.1, 0.0, k2), Error);
  CHECK_THROWS_AS(p_ratio(1.0, 0.0, 1.0, k2), Error);
}

TEST_CASE("p_scaling continuity, monotonicity and sandwich on random triples") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double kappa : {1.0, 2.0, 8.0 / 3.0, 4.0, 6.0}) {
    const auto p = derive_params(kappa);
    for (int i = 0; i < 2000; ++i) {
      const double y = u(rng) < 0.1 ? 0.0 : 3.0 * u(rng);
      double x1 = 3.0 * u(rng), x2 = 3.0 * u(rng);
      if (x1 > x2) std::swap(x1, x2);
      if (x1 == x2) continue;
      const double a = p_scaling(y, x1, p), b = p_scaling(y, x2, p);
      REQUIRE(a < b);
      if (x1 > 0.0) {
        const double ratio = a / b, s = x1 / x2;
        CHECK(ratio >= std::pow(s, p.alpha) * (1.0 - 1e-12));
        CHECK(ratio <= std::pow(s, 2.0 - p.d) * (1.0 + 1e-12));
      }
    }
    for (double y : {0.1, 1.0, 7.5}) {
      const double lo = y * (1.0 - 1e-9), hi = y * (1.0 + 1e-9);
      CHECK(rel(p_scaling(y, lo, p), p_scaling(y, hi, p)) < 1e-8);
      // exact agreement of the two branch formulas at x = y
      const double inner = std::pow(y, p.alpha - (2.0 - p.d)) * std::pow(y, 2.0 - p.d);
      CHECK(rel(inner, std::pow(y, p.alpha)) < 1e-12);
    }
  }
}

TEST_CASE("half-plane Green's function") {
  const auto k2 = derive_params(2.0);
  for (double kappa : {1.0, 8.0 / 3.0, 6.0})
    CHECK(green_halfplane({0, 1}, derive_params(kappa)) == doctest::Approx(1.0));
  const double th = 0.4;
  CHECK(green_halfplane(std::polar(1.0, th), k2) ==
        doctest::Approx(green_halfplane(std::polar(1.0, std::numbers::pi - th), k2)));
  CHECK(green_halfplane({0, 2}, k2) == doctest::Approx(std::pow(2.0, -0.75)));
  CHECK_THROWS_AS(green_halfplane({1, 0}, k2), Error);
  CHECK_THROWS_AS(green_halfplane({0, 0}, k2), Error);
  CHECK_THROWS_AS(green_halfplane({0, -1}, k2), Error);
}

TEST_CASE("Green's function under half-plane automorphisms") {
  const auto p = derive_params(8.0 / 3.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const Complex z(u(rng), std::abs(u(rng)) + 1e-3);
    CHECK(green_domain(z, MobiusMap::identity(), p) ==
          doctest::Approx(green_halfplane(z, p)).epsilon(1e-13));
  }
  // dilation by 2
  CHECK(green_domain({0, 2}, MobiusMap(2, 0, 0, 1), p) ==
        doctest::Approx(std::pow(2.0, p.d - 2.0)));
  // translation by 1
  CHECK(green_domain({1, 1}, MobiusMap(1, 1, 0, 1), p) == doctest::Approx(1.0));
  CHECK_THROWS_AS(MobiusMap(1, 0, 0, -1), Error);
  CHECK_THROWS_AS(green_domain({1, 0}, MobiusMap::identity(), p), Error);
}

TEST_CASE("multi-point interior bound") {
  const auto k2 = derive_params(2.0);
  const auto k83 = derive_params(8.0 / 3.0);
  CHECK(multipoint_interior_bound(config({{0, 1}}, {2.0}), k2) == 1.0);
  CHECK(multipoint_interior_bound(config({{1, 0}}, {0.1}), k83) ==
        doctest::Approx(0.01));
  CHECK(multipoint_interior_bound(config({{0, 1}, {0, 2}}, {0.1, 0.1}), k2) ==
        doctest::Approx(std::pow(10.0, -1.5)).epsilon(1e-12));
}

TEST_CASE("multi-point bound: scaling, monotonicity, truncation") {
  const auto p = derive_params(8.0 / 3.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(u(rng) * 4);
    std::vector<Complex> z;
    std::vector<double> r;
    for (int k = 0; k < n; ++k) {
      z.emplace_back(4 * u(rng) - 2, u(rng) < 0.2 ? 0.0 : 2 * u(rng) + 0.01);
      r.push_back(std::pow(10.0, -3 * u(rng)));
    }
    PointConfig c;
    try {
      c = config(z, r);
    } catch (const Error&) {
      continue;
    }
    const double b = multipoint_interior_bound(c, p);
    CHECK(b > 0.0);
    CHECK(b <= 1.0);
    const double lambda = 0.1 + 5 * u(rng);
    CHECK(rel(multipoint_interior_bound(c.scaled(lambda), p), b) < 1e-10);
    auto bigger = r;
    bigger[trial % n] *= 1.5;
    CHECK(multipoint_interior_bound(c.with_radii(bigger), p) >= b * (1 - 1e-14));
    auto clipped = r;
    for (int k = 0; k < n; ++k) clipped[k] = std::min(r[k], c.gap(k));
    CHECK(multipoint_interior_bound(c.with_radii(clipped), p) == doctest::Approx(b));
  }
}

TEST_CASE("multi-point Green upper bound") {
  const auto k2 = derive_params(2.0);
  CHECK(multipoint_green_upper(config({{0, 1}}, {0.1}), k2) == doctest::Approx(1.0));
  for (double y : {0.3, 1.0, 4.0})
    CHECK(multipoint_green_upper(config({{0, y}}, {0.1}), k2) ==
          doctest::Approx(std::pow(y, k2.d - 2.0)));
  CHECK(multipoint_green_upper(config({{0, 1}, {0, 2}}, {0.1, 0.1}), k2) ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(multipoint_green_upper(config({{1, 0}}, {0.1}), k2), Error);
}

TEST_CASE("boundary Green upper bound") {
  const auto p = derive_params(8.0 / 3.0);
  const std::vector<double> one{1.0}, two{2.0}, pair{1.0, 1.1};
  CHECK(boundary_green_upper(one, p) == doctest::Approx(1.0));
  CHECK(boundary_green_upper(two, p) == doctest::Approx(0.25));
  CHECK(boundary_green_upper(pair, p) == doctest::Approx(std::pow(0.1, -2.0)));
  const std::vector<double> zero{0.0}, repeated{1.0, 1.0};
  CHECK_THROWS_AS(boundary_green_upper(zero, p), Error);
  CHECK_THROWS_AS(boundary_green_upper(repeated, p), Error);
}
