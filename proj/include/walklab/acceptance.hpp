#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "walklab/io.hpp"

namespace walklab {

enum class Level { Quick, Desk };

struct AcceptanceOptions {
  double p = 0.75;
  Level level = Level::Desk;
  std::uint64_t seed = 42;
  unsigned threads = 1;
  /// Criterion ids to run; empty runs all.
  std::vector<int> only;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string measured;
  std::string expected;
  double seconds = 0;
  Json details = Json::object();
};

inline constexpr int kCriterionCount = 10;

CriterionResult run_criterion(int id, const AcceptanceOptions& options);

/// Runs the selected criteria in order, reporting each as it finishes.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options,
    const std::function<void(const CriterionResult&)>& on_result = {});

/// "[PASS] 3 title | measured: ... | expected: ... | 1.2 s"
std::string format_result_line(const CriterionResult& r);

Json to_json(const CriterionResult& r);

}  // namespace walklab
