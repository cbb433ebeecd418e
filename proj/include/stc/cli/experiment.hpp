#pragma once

// Experiment files: a flat key = value format with optional [name] sections.
//
//   # keys before the first section are defaults for every section
//   horizon.t = 50000
//   seed = 1, 2, 3
//
//   [uniform-iid]
//   switch.n = 16
//   load.kind = uniform-iid
//   load.lambda = 0.1, 0.2, 0.3
//   policy.kind = MSL, MSL-SS, LLF-SS
//
// Comma-separated values are sweeps; every combination of sweep point,
// policy and seed is one run.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "stc/errors.hpp"
#include "stc/policies.hpp"
#include "stc/sim.hpp"

namespace stc::cli {

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ExperimentEntry {
  std::string name;
  int n = 16;
  std::int64_t horizon = 50000;
  // uniform-iid, parallel-heavy, cross-heavy, uniform-periodic, custom or
  // uniform-mmb.
  std::string load_kind = "uniform-iid";
  // The swept load parameter: lambda, lambda1, delta or a matrix scale.
  std::vector<double> sweep;
  double lambda2 = 0.0;
  std::vector<double> matrix;  // custom loads, row-major N x N
  std::vector<double> mmb_rates;  // multipliers of the per-VOQ mean rate
  std::vector<double> mmb_transition;
  std::vector<PolicySpec> policies;
  std::vector<std::uint64_t> seeds;
  bool complete_only = false;
  std::size_t windows = 10;
};

struct ExperimentSpec {
  std::vector<ExperimentEntry> experiments;
};

ExperimentSpec parse_experiment(const std::string& text);
ExperimentSpec load_experiment(const std::filesystem::path& path);

struct RunRequest {
  std::string scenario;
  double load = 0.0;  // per-input-port load of the sweep point
  Scenario spec;
};

// One request per (entry, sweep point, policy, seed), in file order.
std::vector<RunRequest> expand(const ExperimentSpec& spec);

struct RunRecord {
  std::string scenario;
  std::string policy;
  double load = 0.0;
  std::uint64_t seed = 0;
  RunSummary summary;
};

// Runs every request on up to `parallel` threads. Records are sorted by
// (scenario, policy, load, seed) whatever the thread count.
std::vector<RunRecord> run_all(const std::vector<RunRequest>& requests, int parallel = 1);

inline constexpr const char* kCsvHeader =
    "scenario,policy,load,seed,avg_dev,avg_var,max_dev,min_dev,diverged";

void write_csv(std::ostream& out, const std::vector<RunRecord>& records);
// Per-curve means over seeds as a JSON document.
std::string summary_json(const std::vector<RunRecord>& records);

}  // namespace stc::cli
