#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stc/assignment.hpp"
#include "stc/dp.hpp"

namespace stc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // verify found a failing property
inline constexpr int kExitParse = 2;
inline constexpr int kExitDomain = 3;

// Environment variable naming the default output directory of `run`.
inline constexpr const char* kOutDirEnv = "STC_OUT_DIR";

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  int parallel = 1;
};

// Writes <out>/runs.csv and <out>/summary.json.
int cmd_run(const std::filesystem::path& spec_file, const RunOptions& opts, std::ostream& out,
            std::ostream& err);

enum class VerifyLevel { Fast, Full };

struct VerifyHooks {
  std::function<Configuration(const WeightMatrix&)> matcher = min_weight_assignment;
};

struct PropertyResult {
  std::string name;
  bool passed = true;
  // Reported but not counted toward the exit status.
  bool informational = false;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string counterexample;
};

std::vector<PropertyResult> verify_properties(VerifyLevel level, const VerifyHooks& hooks = {});

// Prints a JSON report; exit status 1 iff a non-informational property fails.
int cmd_verify(VerifyLevel level, const VerifyHooks& hooks, std::ostream& report,
               std::ostream& err);

struct RegionParams {
  int n = 3;
  std::int64_t horizon = 40;
  std::int64_t slot = 30;
  // One entry per meta-queue; exactly the unset ones span the slice.
  std::vector<std::optional<std::int64_t>> fixed{std::nullopt, std::nullopt, 8};
  double p = 0.1;
  std::uint64_t seed = 1;
  std::size_t state_budget = kDefaultStateBudget;
};

// Bernoulli(p) target profiles per meta-queue, quadratic costs.
ServerDPProblem make_region_problem(const RegionParams& params);

int cmd_dp_regions(const RegionParams& params, std::ostream& csv, std::ostream& err);

// Full command line entry point (subcommands run, verify, dp-regions).
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stc::cli
