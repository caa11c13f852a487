#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "slelab/error.hpp"
#include "slelab/geometry.hpp"

using namespace slelab;

namespace {

PointConfig config(std::vector<Complex> z, std::vector<double> r) {
  return PointConfig::from_complex(z, r);
}

// Random configuration with a share of boundary points; invalid draws
// (repeated points) are retried.
PointConfig random_config(std::mt19937_64& rng, int max_n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const int n = 1 + static_cast<int>(u(rng) * max_n);
    std::vector<Complex> z;
    for (int k = 0; k < n; ++k)
      z.emplace_back(4 * u(rng) - 2, u(rng) < 0.2 ? 0.0 : 2 * u(rng) + 0.01);
    try {
      PointConfig c = config(z, std::vector<double>(n, 1.0));
      std::vector<double> r;
      for (int k = 0; k < n; ++k)
        r.push_back(c.gap(k) * std::pow(10.0, -4.0 + 4.3 * u(rng)));
      return c.with_radii(r);
    } catch (const Error&) {
    }
  }
}

}  // namespace

TEST_CASE("quantized levels") {
  const auto at = [](double r) {
    return quantize_radii(config({{0, 1}}, {r})).at(0);
  };
  CHECK(at(1.0 / 16.0) == 2);
  CHECK(at(0.1) == 2);
  CHECK(at(1.0) == 1);
  CHECK(at(5.0) == 1);
  CHECK(at(0.25) == 1);
  CHECK(at(0.2) == 2);
  CHECK(at(1.0 / 1024.0) == 5);
}

TEST_CASE("circle construction") {
  const auto one = config({{0, 1}}, {1.0 / 16.0});
  const auto circles = build_circles(one, {2});
  REQUIRE(circles.size() == 2);
  CHECK(circles[0].radius == doctest::Approx(0.25));
  CHECK(circles[1].radius == doctest::Approx(1.0 / 16.0));
  CHECK(circles[0].center == Complex(0, 1));

  const auto two = config({{0, 1}, {0.5, 1}}, {0.25, 0.125});
  const auto c2 = build_circles(two, {1, 1});
  REQUIRE(c2.size() == 2);
  CHECK(c2[0].radius == doctest::Approx(0.25));
  CHECK(c2[1].radius == doctest::Approx(0.125));
  CHECK(c2[1].owner == 1);

  CHECK(build_circles(PointConfig(), {}).empty());
}

TEST_CASE("conflict pruning") {
  // far apart: nothing removed
  const auto far = config({{0, 1}, {10, 1}}, {1e-3, 1e-3});
  const auto lv = quantize_radii(far);
  const auto all = build_circles(far, lv);
  CHECK(prune_conflicts(all, far).size() == all.size());

  // the level-1 circle at i meets the inner disk of i + 0.3
  const auto near = config({{0, 1}, {0.3, 1}}, {1.0 / 64.0, 0.3 / 16.0});
  const auto lv2 = quantize_radii(near);
  CHECK(lv2[0] == 3);
  std::vector<int> removed;
  const auto pruned = prune_conflicts(build_circles(near, lv2), near, &removed);
  CHECK(removed[0 * 2 + 1] == 1);
  bool level1_left = false;
  for (const auto& c : pruned)
    if (c.owner == 0 && c.level == 1) level1_left = true;
  CHECK_FALSE(level1_left);

  // a single point is returned unchanged
  const auto single = config({{0, 1}}, {1e-3});
  const auto cs = build_circles(single, quantize_radii(single));
  CHECK(prune_conflicts(cs, single).size() == cs.size());
}

TEST_CASE("run partition") {
  const auto single = config({{0, 1}}, {1.0 / 256.0});
  const auto fam = build_family(single);
  REQUIRE(fam.runs.size() == 1);
  CHECK(fam.runs[0].count == 4);
  CHECK(fam.runs[0].outer_radius == doctest::Approx(0.25));
  CHECK(fam.runs[0].inner_radius == doctest::Approx(1.0 / 256.0));

  // removing a mid-chain circle splits the chain (a distant second point
  // leaves room for the extra run)
  const auto pair = config({{0, 1}, {10, 1}}, {1.0 / 256.0, 1.0 / 256.0});
  std::vector<Circle> chain = build_circles(pair, {4, 4});
  chain.erase(chain.begin() + 1);
  const auto split = partition_runs(chain, pair, {4, 4});
  int owner0_runs = 0;
  for (const auto& r : split.runs) owner0_runs += r.owner == 0;
  CHECK(owner0_runs == 2);

  // the pruned pair: owner 0 loses level 1, its remaining levels form one run
  const auto near = config({{0, 1}, {0.3, 1}}, {1.0 / 64.0, 0.3 / 16.0});
  const auto fn = build_family(near);
  int owner0 = 0;
  for (const auto& r : fn.runs) owner0 += r.owner == 0;
  CHECK(owner0 >= 1);
  CHECK(owner0 <= 1 + 3 * 1);
  CHECK(fn.owners[0].removed == 1);
}

TEST_CASE("family bound product") {
  const auto p = derive_params(8.0 / 3.0);
  CircleFamily fam;
  fam.runs.push_back({0, {0, 1}, 0.25, 0.25, 1, 1});
  CHECK(family_bound_product(fam, p) == 1.0);

  const auto single = config({{0, 1}}, {1.0 / 256.0});
  CHECK(family_bound_product(build_family(single), p) ==
        doctest::Approx(p_scaling(1.0, 1.0 / 256.0, p) / p_scaling(1.0, 0.25, p)));

  CircleFamily two;
  two.runs.push_back({0, {0, 1}, 0.25, 1.0 / 16.0, 1, 2});
  two.runs.push_back({0, {0, 1}, 1.0 / 64.0, 1.0 / 256.0, 3, 2});
  const double prod = family_bound_product(two, p);
  const double expected = p_ratio(1.0, 1.0 / 16.0, 0.25, p) * p_ratio(1.0, 1.0 / 256.0, 1.0 / 64.0, p);
  CHECK(prod == doctest::Approx(expected));
  CHECK(prod >= p_ratio(1.0, 1.0 / 256.0, 0.25, p));
}

TEST_CASE("circle family invariants on random configurations") {
  std::mt19937_64 rng(2024);
  for (double kappa : {2.0, 8.0 / 3.0, 6.0}) {
    const auto p = derive_params(kappa);
    for (int trial = 0; trial < 350; ++trial) {
      const auto cfg = random_config(rng, 6);
      const std::size_t n = cfg.size();
      const auto levels = quantize_radii(cfg);
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(cfg.gap(j) / std::pow(4.0, levels[j]) <= cfg.radius(j) * (1 + 1e-12));
        CHECK(levels[j] >= 1);
      }
      std::vector<int> removed;
      const auto pruned = prune_conflicts(build_circles(cfg, levels), cfg, &removed);
      for (int v : removed) CHECK(v <= 1);
      for (std::size_t a = 0; a < pruned.size(); ++a) {
        CHECK(std::abs(pruned[a].center) > pruned[a].radius);
        for (std::size_t b = a + 1; b < pruned.size(); ++b)
          CHECK(circles_disjoint(pruned[a], pruned[b]));
      }
      const auto fam = partition_runs(pruned, cfg, levels);
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(fam.owners[j].runs <= 1 + 3 * static_cast<int>(n - 1 - j));
        CHECK(fam.owners[j].skipped_annuli <= 1 + 2 * static_cast<int>(n - 1 - j));
      }
      CHECK(fam.runs.size() <= n + 3 * n * (n - 1) / 2);
      for (const auto& run : fam.runs)
        CHECK(run.inner_radius * std::pow(4.0, run.count - 1) ==
              doctest::Approx(run.outer_radius));
      const double limit = std::pow(4.0, p.alpha * n * n) *
                           multipoint_interior_bound(quantized_config(cfg, levels), p);
      CHECK(family_bound_product(fam, p) <= limit * (1 + 1e-12));
    }
  }
}

TEST_CASE("closed-set predicates") {
  const Circle c{{0, 1}, 0.25, 0, 1};
  CHECK(circle_meets_disk(c, {0.3, 1}, 0.05));    // tangency counts
  CHECK_FALSE(circle_meets_disk(c, {0.4, 1}, 0.1));
  CHECK(circle_meets_disk(c, {0.0, 1}, 0.3));     // disk contains the circle
  const Circle d{{0, 1}, 0.0625, 0, 2};
  CHECK(circles_disjoint(c, d));
  CHECK_FALSE(circles_disjoint(c, Circle{{0.5, 1}, 0.25, 1, 1}));
  CHECK(circle_meets_annulus(Circle{{0.1, 1}, 0.05, 1, 1}, {0, 1}, 0.0625, 0.25));
  CHECK_FALSE(circle_meets_annulus(Circle{{3, 1}, 0.05, 1, 1}, {0, 1}, 0.0625, 0.25));
}
