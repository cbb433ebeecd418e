#pragma once

// Exact finite-horizon dynamic programs.
//
// The switch program chooses, in every slot, a complete configuration or
// idles the switch, minimizing the summed deviation cost over T slots. The
// single-server program schedules one of N meta-queues (or the dummy
// meta-queue 0, i.e. idling) per slot.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "stc/config.hpp"
#include "stc/core.hpp"

namespace stc {

class Policy;

inline constexpr std::size_t kDefaultStateBudget = 4'000'000;

struct SwitchDPProblem {
  int n = 2;
  std::int64_t horizon = 0;
  // One target profile per VOQ, each at least `horizon` long.
  std::vector<BitVector> targets;
  CostVector costs;
  // Zero when empty.
  std::vector<Deviation> initial;
  std::size_t state_budget = kDefaultStateBudget;
  // Enumerate idle first and configurations in reverse order.
  bool reverse_action_order = false;
  // Without idling the action set is the N! complete configurations only.
  bool allow_idle = true;
};

// nullopt means idle.
using SwitchAction = std::optional<Configuration>;

namespace detail {
struct VectorHash {
  std::size_t operator()(const std::vector<Deviation>& v) const noexcept;
};
}  // namespace detail

class SwitchDPSolution {
 public:
  Cost optimal_cost() const { return optimal_cost_; }
  std::int64_t horizon() const { return static_cast<std::int64_t>(levels_.size()) - 1; }
  std::size_t state_count() const;

  // Cost-to-go V^t(d) for slot t in 1..T+1. Throws StateError if (t, d) was
  // not reached.
  Cost value(std::int64_t t, const DeviationVector& d) const;
  // Optimal action for slot t in 1..T.
  SwitchAction action(std::int64_t t, const DeviationVector& d) const;

 private:
  friend SwitchDPSolution solve_switch_dp(const SwitchDPProblem& p);
  struct Entry {
    Cost value;
    int action = -1;  // index into configs_, -1 = idle
  };
  using Level = std::unordered_map<std::vector<Deviation>, Entry, detail::VectorHash>;
  const Entry& entry(std::int64_t t, const DeviationVector& d) const;

  Cost optimal_cost_{0};
  std::vector<Configuration> configs_;
  std::vector<Level> levels_;  // levels_[t - 1] holds slot t
};

// Throws CapabilityError when the reachable state count exceeds the budget.
SwitchDPSolution solve_switch_dp(const SwitchDPProblem& p);

// argmin over complete configurations and idle of Phi(d + v - x). Serving
// wins ties against idling; among configurations the lowest lexicographic
// index wins. N <= 8.
SwitchAction myopic_decide(const DeviationVector& d, std::span<const Bit> x,
                           const CostVector& costs, bool allow_idle = true);

// Quadratic-cost closed form: the min-weight configuration on d - x if
// 2<d - x, v> + N <= 0, otherwise idle. Any N.
SwitchAction myopic_quadratic_decide(const DeviationVector& d, std::span<const Bit> x);

// Decision in state d for slot t (1..T) with target bits x.
using SwitchRule =
    std::function<SwitchAction(const DeviationVector& d, std::span<const Bit> x, std::int64_t t)>;

// Total cost of following `rule` from the initial state for T slots.
Cost switch_rollout_cost(const SwitchDPProblem& p, const SwitchRule& rule);
Cost myopic_rollout_cost(const SwitchDPProblem& p);

// Rollout of a policy restricted to the DP action set: a decision serving at
// least one VOQ is replaced by its complete base configuration.
Cost policy_complete_rollout_cost(const SwitchDPProblem& p, Policy& policy);

// Rollout with partial configurations as the policy returns them.
Cost policy_rollout_cost(const SwitchDPProblem& p, Policy& policy);

struct ServerDPProblem {
  int n = 1;  // physical meta-queues; the dummy one is implicit
  std::int64_t horizon = 0;
  std::vector<BitVector> targets;  // one per physical meta-queue
  CostVector costs;
  std::vector<Deviation> initial;  // zero when empty
  std::size_t state_budget = kDefaultStateBudget;
  bool reverse_action_order = false;
  // Without idling meta-queue 0 is never scheduled, by the program or by
  // the greedy rule.
  bool allow_idle = true;
};

// Service counts n_1..n_N at the beginning of a slot.
using ServiceCounts = std::vector<std::int64_t>;

class ServerDPSolution {
 public:
  int n() const { return n_; }
  std::int64_t horizon() const { return horizon_; }
  bool allow_idle() const { return allow_idle_; }
  std::size_t state_count() const;

  // Whether n is a state of slot t, i.e. n >= 0 and sum(n) <= t - 1.
  bool contains(std::int64_t t, const ServiceCounts& counts) const;
  // V~^t(n) for t in 1..T+1.
  Cost value(std::int64_t t, const ServiceCounts& counts) const;
  // Optimal meta-queue 0..N for slot t in 1..T; 0 idles.
  int action(std::int64_t t, const ServiceCounts& counts) const;

  // Deviation after serving meta-queue i in slot t from state n.
  std::vector<Deviation> next_deviation(std::int64_t t, const ServiceCounts& counts, int i) const;
  // Psi(d0 + n + e_i - X^t).
  Cost instantaneous_cost(std::int64_t t, const ServiceCounts& counts, int i) const;
  // Omega^{t+1}(n + e_i) with Omega^{t+1}(m) = V~^{t+1}(m) + Psi(d0 + m - X^t).
  Cost omega_after(std::int64_t t, const ServiceCounts& counts, int i) const;

 private:
  friend ServerDPSolution solve_server_dp(const ServerDPProblem& p);
  struct Entry {
    Cost value;
    int action = 0;
  };
  using Level = std::unordered_map<std::uint64_t, Entry>;
  std::uint64_t pack(const ServiceCounts& counts) const;
  Cost psi(const std::vector<Deviation>& dev) const;

  int n_ = 0;
  std::int64_t horizon_ = 0;
  bool allow_idle_ = true;
  std::vector<std::vector<std::int64_t>> cumulative_;  // [queue][t] = X^t, X^0 = 0
  CostVector costs_;
  std::vector<Deviation> initial_;
  std::vector<Level> levels_;  // levels_[t - 1] holds slot t
};

// N <= 4 and T <= 250. Throws CapabilityError past the state budget.
ServerDPSolution solve_server_dp(const ServerDPProblem& p);

// gamma_ij^t(n) = Omega^{t+1}(n + e_i) - Omega^{t+1}(n + e_j), e_0 = 0.
// ArgumentError when i == j or an index is outside 0..N; StateError when
// (t, n) is not a solved state.
Cost gamma_ij(const ServerDPSolution& s, int i, int j, std::int64_t t, const ServiceCounts& counts);

// Greedy rule argmin_j Psi(n + e_j - X^t), lowest j on ties; j >= 1 when
// the program forbids idling.
int server_myopic_decide(const ServerDPSolution& s, std::int64_t t, const ServiceCounts& counts);
Cost server_myopic_rollout_cost(const ServerDPSolution& s);
Cost server_optimal_cost(const ServerDPSolution& s);

struct MonotonicityReport {
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::string first_violation;
};

// For every slot, reachable state and ordered pair i != j: gamma_ij must not
// decrease when n_i grows and must not increase when n_j grows. Only
// physical coordinates (index >= 1) can grow.
MonotonicityReport check_gamma_monotonicity(const ServerDPSolution& s);

struct RegionCell {
  std::int64_t a = 0;  // first free coordinate
  std::int64_t b = 0;  // second free coordinate
  int action = 0;
};

struct RegionSlice {
  int first_axis = 0;   // 0-based meta-queue index of coordinate a
  int second_axis = 1;  // 0-based meta-queue index of coordinate b
  std::vector<RegionCell> cells;  // sorted by (a, b)

  std::size_t count(int action) const;
};

// Optimal actions on the plane (or line) of slot t spanned by the unset
// entries of `fixed`; one or two may be unset. Cells cover every state of
// slot t on it. With one free coordinate, b is 0 and second_axis is -1.
RegionSlice decision_region_slice(const ServerDPSolution& s, std::int64_t t,
                                  const std::vector<std::optional<std::int64_t>>& fixed);

// Along every axis line, once an action is left it never reappears.
bool has_switch_over_property(const RegionSlice& slice);

// CSV with header n<a>,n<b>,action (coordinates 1-based in the header).
// The n<b> column is omitted for a line slice.
void write_region_csv(std::ostream& out, const RegionSlice& slice);

}  // namespace stc
