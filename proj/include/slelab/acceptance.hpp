#pragma once

// The acceptance suite: each criterion runs at its pinned tolerance and
// reports one PASS/FAIL result. Shared by the acceptance test binary and the
// `verify` subcommand.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "slelab/loewner.hpp"

namespace slelab {

enum class AcceptanceScale { Full, Smoke };

struct AcceptanceOptions {
  AcceptanceScale scale = AcceptanceScale::Full;
  std::vector<int> only;  // empty: every criterion
  unsigned workers = 1;
  std::string out_dir = "acceptance-out";
  std::uint64_t seed = 20260101;
  SimConfig sim;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Ids and short names of all criteria, in order.
std::vector<std::pair<int, std::string>> acceptance_criteria();

/// Runs the selected criteria; `on_result` is called as each one finishes.
/// A criterion that throws is reported as failed with the error text.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& opts,
    const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS [4] interior exponent (12.3 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace slelab
