#pragma once

// Concentric circle families around marked points: radii l_j / 4^s,
// conflict pruning against the inner disks of later points, and the
// partition of the survivors into geometric runs.

#include <cstddef>
#include <vector>

#include "slelab/core.hpp"

namespace slelab {

struct Circle {
  Complex center;
  double radius = 0.0;
  std::size_t owner = 0;  // 0-based index j of z_j
  int level = 0;          // s >= 1, radius = gap(owner) / 4^s
};

struct Run {
  std::size_t owner = 0;
  Complex center;
  double outer_radius = 0.0;  // R_e
  double inner_radius = 0.0;  // r_e
  int top_level = 0;          // level of the outer circle
  int count = 0;              // circles in the run
};

/// Per-owner bookkeeping from the partition, kept for invariant checks.
struct OwnerStats {
  int levels = 0;           // h_j
  int removed = 0;          // circles pruned from this owner
  int runs = 0;             // |E_j|
  int skipped_annuli = 0;   // |N_{h_j} \ S_j|
};

struct CircleFamily {
  std::vector<Circle> circles;  // pruned circles, sorted by (owner, level)
  std::vector<Run> runs;
  std::vector<int> run_of;      // run index of each circle
  std::vector<OwnerStats> owners;
};

/// Integer levels h_j >= 1 with gap_j / 4^{h_j} <= r_j, h_j minimal.
std::vector<int> quantize_radii(const PointConfig& cfg);

/// All circles xi_j^s, 1 <= s <= h_j, ordered by owner then level.
std::vector<Circle> build_circles(const PointConfig& cfg,
                                  const std::vector<int>& levels);

/// Removes every circle of owner j meeting the closed disk
/// {|z - z_k| <= gap_k / 4} for some k > j. At most one circle per (j, k)
/// pair can be removed; anything else throws ErrorCode::Internal.
/// `removed_per_pair`, when given, receives an n*n matrix (row j, column k).
std::vector<Circle> prune_conflicts(const std::vector<Circle>& circles,
                                    const PointConfig& cfg,
                                    std::vector<int>* removed_per_pair = nullptr);

/// Groups the pruned circles of each owner into runs of consecutive levels
/// whose open annulus meets no circle of another owner.
CircleFamily partition_runs(const std::vector<Circle>& pruned,
                            const PointConfig& cfg,
                            const std::vector<int>& levels);

/// Full pipeline: quantize, build, prune, partition.
CircleFamily build_family(const PointConfig& cfg);

/// prod_e P_{y_e}(r_e) / P_{y_e}(R_e).
double family_bound_product(const CircleFamily& fam, const SleParams& p);

/// Copy of cfg with r_j replaced by gap_j / 4^{h_j}.
PointConfig quantized_config(const PointConfig& cfg,
                             const std::vector<int>& levels);

/// Closed-set predicates used by pruning and by the invariant checks.
bool circle_meets_disk(const Circle& c, Complex center, double radius);
bool circles_disjoint(const Circle& a, const Circle& b);
bool circle_meets_annulus(const Circle& c, Complex center, double inner,
                          double outer);

}  // namespace slelab
