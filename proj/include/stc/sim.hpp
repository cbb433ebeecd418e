#pragma once

// Time-slotted simulation of an N x N switch under a service trace control
// policy, with the loading scenarios and deviation metrics used to compare
// policies.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stc/config.hpp"
#include "stc/core.hpp"
#include "stc/policies.hpp"
#include "stc/profiles.hpp"

namespace stc {

enum class ScenarioKind { UniformIid, ParallelHeavy, CrossHeavy, UniformPeriodic, Custom };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& name);

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::Custom;
  int n = 2;
  std::int64_t horizon = 0;
  // Scenario parameters, kept for reporting; the profiles are authoritative.
  double lambda = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::int64_t delta = 0;
  std::vector<ProfileSpec> profiles;  // one per VOQ
  PolicySpec policy;
  std::uint64_t seed = 0;

  // Serve the policy's complete base configuration when
  // 2<d - x, v> + N <= 0 and idle otherwise; partial extraction is skipped.
  bool complete_only = false;
  // Keep the per-slot deviation series.
  bool keep_series = true;
  std::size_t divergence_windows = 10;
};

// Every VOQ Bernoulli(lambda / N): per-input load lambda.
Scenario uniform_iid_scenario(int n, std::int64_t horizon, double lambda, PolicySpec policy,
                              std::uint64_t seed);
// lambda1 on VOQs i -> i, lambda2 elsewhere.
Scenario parallel_heavy_scenario(int n, std::int64_t horizon, double lambda1, double lambda2,
                                 PolicySpec policy, std::uint64_t seed);
// lambda1 on i -> i + 1 for odd 1-based inputs i and on i -> i - 1 for even
// ones, lambda2 elsewhere. N must be even.
Scenario cross_heavy_scenario(int n, std::int64_t horizon, double lambda1, double lambda2,
                              PolicySpec policy, std::uint64_t seed);
// Every VOQ periodic with period delta and an offset drawn uniformly from
// {0, ..., delta - 1}.
Scenario uniform_periodic_scenario(int n, std::int64_t horizon, std::int64_t delta,
                                   PolicySpec policy, std::uint64_t seed);
// Bernoulli streams with the rates of an arbitrary load matrix.
Scenario load_matrix_scenario(const LoadMatrix& load, std::int64_t horizon, PolicySpec policy,
                              std::uint64_t seed);

// The generator of the cross-heavy "criss-cross" subset: input i (0-based)
// to i + 1 for even i, i - 1 for odd i.
Configuration cross_configuration(int n);

// Nominal per-VOQ rates of the scenario's profiles.
LoadMatrix scenario_load(const Scenario& s);

struct RunSummary {
  double avg_dev = 0.0;
  // Per-VOQ temporal variance, averaged across VOQs.
  double avg_var = 0.0;
  // Variance across VOQs in one slot, averaged across slots.
  double cross_var = 0.0;
  Deviation max_dev = 0;
  Deviation min_dev = 0;
  // Mean over slots of sum_q (-d_q).
  double avg_lag_sum = 0.0;
  bool diverged = false;
};

struct RunResult {
  int n = 0;
  std::int64_t horizon = 0;
  std::string policy_name;
  // d^t after slot t, t = 1..T, flattened slot-major (empty unless kept).
  std::vector<std::int32_t> series;
  // Smallest deviation across VOQs after each slot.
  std::vector<Deviation> slot_min;
  std::vector<std::int64_t> services;       // per VOQ
  std::vector<std::int64_t> target_totals;  // S^T per VOQ
  DeviationVector final_deviation;
  RunSummary summary;
  double wall_seconds = 0.0;

  std::size_t voqs() const { return static_cast<std::size_t>(n) * n; }
  // Deviation of VOQ q after slot t (1-based). Requires the series.
  Deviation deviation(std::int64_t t, std::size_t q) const;
};

// RS policies receive the decomposition of scenario_load(s); their sampling
// stream is derived from the scenario seed.
RunResult run(const Scenario& s);

struct Metrics {
  double avg_dev = 0.0;
  double avg_var = 0.0;
  double cross_var = 0.0;
};

// series[t][q]: deviation of VOQ q after slot t. Throws ArgumentError when
// empty or ragged.
Metrics metrics(const std::vector<std::vector<Deviation>>& series);

// Splits the per-slot minimum deviation into equal windows and flags growth:
// the mean lag magnitude of the last window must be at least five times that
// of the first (floored at 1) and above the one before it.
bool divergence_check(std::span<const Deviation> slot_min, std::size_t windows = 10);

}  // namespace stc
