#include "slelab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slelab/error.hpp"

namespace slelab {

namespace {

// Relative slack for comparing a power-of-four radius against r_j; gap/4^h
// is exact in binary, r_j may carry one rounding.
constexpr double kQuantizeSlack = 1e-12;

double level_radius(double gap, int level) {
  return std::ldexp(gap, -2 * level);
}

}  // namespace

bool circle_meets_disk(const Circle& c, Complex center, double radius) {
  const double dist = std::abs(c.center - center);
  return std::abs(dist - c.radius) <= radius;
}

bool circles_disjoint(const Circle& a, const Circle& b) {
  const double dist = std::abs(a.center - b.center);
  if (dist == 0.0) return a.radius != b.radius;
  return dist > a.radius + b.radius || dist < std::abs(a.radius - b.radius);
}

bool circle_meets_annulus(const Circle& c, Complex center, double inner,
                          double outer) {
  const double dist = std::abs(c.center - center);
  const double nearest = std::abs(dist - c.radius);
  const double farthest = dist + c.radius;
  return nearest <= outer && farthest >= inner;
}

std::vector<int> quantize_radii(const PointConfig& cfg) {
  std::vector<int> levels;
  levels.reserve(cfg.size());
  for (std::size_t j = 0; j < cfg.size(); ++j) {
    const double gap = cfg.gap(j);
    const double r = cfg.radius(j);
    int h = 1;
    while (level_radius(gap, h) > r * (1.0 + kQuantizeSlack)) ++h;
    levels.push_back(h);
  }
  return levels;
}

std::vector<Circle> build_circles(const PointConfig& cfg,
                                  const std::vector<int>& levels) {
  require(levels.size() == cfg.size(), "one level per marked point expected");
  std::vector<Circle> out;
  for (std::size_t j = 0; j < cfg.size(); ++j) {
    require(levels[j] >= 1, "levels must be at least 1");
    for (int s = 1; s <= levels[j]; ++s)
      out.push_back({cfg.point(j).z(), level_radius(cfg.gap(j), s), j, s});
  }
  return out;
}

std::vector<Circle> prune_conflicts(const std::vector<Circle>& circles,
                                    const PointConfig& cfg,
                                    std::vector<int>* removed_per_pair) {
  const std::size_t n = cfg.size();
  std::vector<int> pair_count(n * n, 0);
  std::vector<Circle> kept;
  kept.reserve(circles.size());
  for (const Circle& c : circles) {
    bool removed = false;
    for (std::size_t k = c.owner + 1; k < n; ++k) {
      if (circle_meets_disk(c, cfg.point(k).z(), cfg.gap(k) / 4.0)) {
        ++pair_count[c.owner * n + k];
        removed = true;
      }
    }
    if (!removed) kept.push_back(c);
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k)
      if (pair_count[j * n + k] > 1)
        fail(ErrorCode::Internal,
             "conflict set I_{" + std::to_string(j + 1) + "," +
                 std::to_string(k + 1) + "} has " +
                 std::to_string(pair_count[j * n + k]) + " elements");
  if (removed_per_pair) *removed_per_pair = std::move(pair_count);
  return kept;
}

CircleFamily partition_runs(const std::vector<Circle>& pruned,
                            const PointConfig& cfg,
                            const std::vector<int>& levels) {
  const std::size_t n = cfg.size();
  require(levels.size() == n, "one level per marked point expected");
  CircleFamily fam;
  fam.circles = pruned;
  std::sort(fam.circles.begin(), fam.circles.end(),
            [](const Circle& a, const Circle& b) {
              return a.owner != b.owner ? a.owner < b.owner
                                        : a.level < b.level;
            });
  fam.run_of.assign(fam.circles.size(), -1);
  fam.owners.assign(n, OwnerStats{});

  for (std::size_t j = 0; j < n; ++j) {
    OwnerStats& st = fam.owners[j];
    st.levels = levels[j];
    st.removed = levels[j];
    int edges = 0;
    const Circle* prev = nullptr;
    std::size_t prev_idx = 0;
    for (std::size_t i = 0; i < fam.circles.size(); ++i) {
      const Circle& c = fam.circles[i];
      if (c.owner != j) continue;
      --st.removed;
      bool linked = false;
      if (prev && prev->level + 1 == c.level) {
        linked = true;
        for (const Circle& other : fam.circles) {
          if (other.owner == j) continue;
          if (circle_meets_annulus(other, c.center, c.radius, prev->radius)) {
            linked = false;
            break;
          }
        }
      }
      if (linked) {
        ++edges;
        const int run = fam.run_of[prev_idx];
        fam.run_of[i] = run;
        Run& r = fam.runs[static_cast<std::size_t>(run)];
        r.inner_radius = c.radius;
        ++r.count;
      } else {
        fam.run_of[i] = static_cast<int>(fam.runs.size());
        fam.runs.push_back({j, c.center, c.radius, c.radius, c.level, 1});
        ++st.runs;
      }
      prev = &c;
      prev_idx = i;
    }
    st.skipped_annuli = levels[j] - edges;

    const int later = static_cast<int>(n - 1 - j);
    if (st.runs > 1 + 3 * later)
      fail(ErrorCode::Internal, "owner " + std::to_string(j + 1) + " has " +
                                    std::to_string(st.runs) +
                                    " runs, above 1 + 3(n - j)");
    if (st.skipped_annuli > 1 + 2 * later)
      fail(ErrorCode::Internal, "owner " + std::to_string(j + 1) + " skips " +
                                    std::to_string(st.skipped_annuli) +
                                    " annuli, above 1 + 2(n - j)");
  }
  return fam;
}

CircleFamily build_family(const PointConfig& cfg) {
  const std::vector<int> levels = quantize_radii(cfg);
  const auto circles = build_circles(cfg, levels);
  return partition_runs(prune_conflicts(circles, cfg), cfg, levels);
}

double family_bound_product(const CircleFamily& fam, const SleParams& p) {
  double prod = 1.0;
  for (const Run& r : fam.runs) {
    const double y = r.center.imag();
    prod *= p_scaling(y, r.inner_radius, p) / p_scaling(y, r.outer_radius, p);
  }
  return prod;
}

PointConfig quantized_config(const PointConfig& cfg,
                             const std::vector<int>& levels) {
  require(levels.size() == cfg.size(), "one level per marked point expected");
  std::vector<double> radii;
  radii.reserve(cfg.size());
  for (std::size_t j = 0; j < cfg.size(); ++j)
    radii.push_back(level_radius(cfg.gap(j), levels[j]));
  return cfg.with_radii(std::move(radii));
}

}  // namespace slelab
