#include "stc/dp.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

#include "stc/assignment.hpp"
#include "stc/policies.hpp"

namespace stc {
namespace {

constexpr int kMaxServerQueues = 4;
constexpr std::int64_t kMaxServerHorizon = 250;

void validate_targets(const std::vector<BitVector>& targets, std::size_t count,
                      std::int64_t horizon) {
  if (horizon < 0) throw ArgumentError("horizon must be non-negative");
  if (targets.size() != count) throw DimensionError("one target profile per queue is required");
  for (const auto& bits : targets) {
    if (bits.size() < static_cast<std::size_t>(horizon)) {
      throw DimensionError("target profile shorter than the horizon");
    }
  }
}

std::vector<Deviation> initial_or_zero(const std::vector<Deviation>& initial, std::size_t count) {
  if (initial.empty()) return std::vector<Deviation>(count, 0);
  if (initial.size() != count) throw DimensionError("initial deviation has the wrong length");
  return initial;
}

BitVector slot_bits(const std::vector<BitVector>& targets, std::int64_t t) {
  BitVector x(targets.size());
  for (std::size_t q = 0; q < targets.size(); ++q) x[q] = targets[q][static_cast<std::size_t>(t - 1)];
  return x;
}

Cost phi_sum(std::span<const Deviation> d, const CostVector& costs) {
  Cost s(0);
  for (std::size_t q = 0; q < d.size(); ++q) s += costs[q](d[q]);
  return s;
}

}  // namespace

std::size_t detail::VectorHash::operator()(const std::vector<Deviation>& v) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (Deviation x : v) {
    h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::size_t SwitchDPSolution::state_count() const {
  std::size_t s = 0;
  for (const auto& l : levels_) s += l.size();
  return s;
}

const SwitchDPSolution::Entry& SwitchDPSolution::entry(std::int64_t t,
                                                       const DeviationVector& d) const {
  if (t < 1 || t > static_cast<std::int64_t>(levels_.size())) {
    throw StateError("slot outside the solved horizon");
  }
  const auto& level = levels_[static_cast<std::size_t>(t - 1)];
  const std::vector<Deviation> key(d.values().begin(), d.values().end());
  auto it = level.find(key);
  if (it == level.end()) throw StateError("state was not reached by the program");
  return it->second;
}

Cost SwitchDPSolution::value(std::int64_t t, const DeviationVector& d) const {
  return entry(t, d).value;
}

SwitchAction SwitchDPSolution::action(std::int64_t t, const DeviationVector& d) const {
  if (t > horizon()) throw StateError("no decision after the last slot");
  const int a = entry(t, d).action;
  if (a < 0) return std::nullopt;
  return configs_[static_cast<std::size_t>(a)];
}

SwitchDPSolution solve_switch_dp(const SwitchDPProblem& p) {
  const auto nn = static_cast<std::size_t>(p.n) * p.n;
  validate_targets(p.targets, nn, p.horizon);
  if (p.costs.size() != nn) throw DimensionError("one cost function per VOQ is required");

  SwitchDPSolution sol;
  sol.configs_ = all_configurations(p.n);
  const auto& configs = sol.configs_;

  std::vector<int> order;
  for (int k = 0; k < static_cast<int>(configs.size()); ++k) order.push_back(k);
  if (p.allow_idle) order.push_back(-1);
  if (p.reverse_action_order) std::reverse(order.begin(), order.end());

  std::vector<std::vector<std::size_t>> served(configs.size());
  for (std::size_t k = 0; k < configs.size(); ++k) served[k] = served_voqs(configs[k]);

  const auto T = static_cast<std::size_t>(p.horizon);
  sol.levels_.resize(T + 1);
  sol.levels_[0].emplace(initial_or_zero(p.initial, nn), SwitchDPSolution::Entry{});

  auto successor = [&](const std::vector<Deviation>& d, const BitVector& x, int a) {
    std::vector<Deviation> next(d);
    for (std::size_t q = 0; q < nn; ++q) next[q] -= x[q];
    if (a >= 0) {
      for (auto q : served[static_cast<std::size_t>(a)]) ++next[q];
    }
    return next;
  };

  // Forward pass: enumerate reachable states.
  std::size_t total = 1;
  for (std::size_t t = 1; t <= T; ++t) {
    const BitVector x = slot_bits(p.targets, static_cast<std::int64_t>(t));
    auto& next_level = sol.levels_[t];
    for (const auto& [d, e] : sol.levels_[t - 1]) {
      for (int a : order) {
        if (next_level.try_emplace(successor(d, x, a)).second && ++total > p.state_budget) {
          throw CapabilityError("switch DP state budget exceeded");
        }
      }
    }
  }

  // Backward pass.
  for (std::size_t t = T; t >= 1; --t) {
    const BitVector x = slot_bits(p.targets, static_cast<std::int64_t>(t));
    const auto& next_level = sol.levels_[t];
    for (auto& [d, e] : sol.levels_[t - 1]) {
      bool first = true;
      for (int a : order) {
        const auto next = successor(d, x, a);
        const Cost c = next_level.at(next).value + phi_sum(next, p.costs);
        if (first || c < e.value) {
          e.value = c;
          e.action = a;
          first = false;
        }
      }
    }
  }
  sol.optimal_cost_ = sol.levels_[0].begin()->second.value;
  return sol;
}

SwitchAction myopic_decide(const DeviationVector& d, std::span<const Bit> x,
                           const CostVector& costs, bool allow_idle) {
  if (costs.size() != d.size()) throw DimensionError("one cost function per VOQ is required");
  const auto u = updated_deviation(d, x);
  const Cost idle_cost = phi_sum(u, costs);
  std::optional<std::size_t> best;
  Cost best_cost(0);
  const auto configs = all_configurations(d.n());
  for (std::size_t k = 0; k < configs.size(); ++k) {
    Cost c = idle_cost;
    for (int i = 0; i < d.n(); ++i) {
      const auto q = configs[k].voq_at(i);
      c += costs[q](u[q] + 1) - costs[q](u[q]);
    }
    if (!best || c < best_cost) {
      best = k;
      best_cost = c;
    }
  }
  if (allow_idle && idle_cost < best_cost) return std::nullopt;
  return configs[*best];
}

SwitchAction myopic_quadratic_decide(const DeviationVector& d, std::span<const Bit> x) {
  const auto u = updated_deviation(d, x);
  const Configuration v =
      min_weight_assignment(WeightMatrix(d.n(), std::vector<std::int64_t>(u.begin(), u.end())));
  if (2 * v.inner<Deviation>(u) + d.n() <= 0) return v;
  return std::nullopt;
}

Cost switch_rollout_cost(const SwitchDPProblem& p, const SwitchRule& rule) {
  const auto nn = static_cast<std::size_t>(p.n) * p.n;
  validate_targets(p.targets, nn, p.horizon);
  if (p.costs.size() != nn) throw DimensionError("one cost function per VOQ is required");
  DeviationVector d(p.n, initial_or_zero(p.initial, nn));
  Cost total(0);
  for (std::int64_t t = 1; t <= p.horizon; ++t) {
    const BitVector x = slot_bits(p.targets, t);
    const SwitchAction a = rule(d, x, t);
    const BitVector served = a ? a->as_vector() : BitVector(nn, 0);
    d = step_deviation(d, served, x);
    total += total_cost(d, p.costs);
  }
  return total;
}

Cost myopic_rollout_cost(const SwitchDPProblem& p) {
  return switch_rollout_cost(
      p, [&](const DeviationVector& d, std::span<const Bit> x, std::int64_t) {
        return myopic_decide(d, x, p.costs, p.allow_idle);
      });
}

Cost policy_complete_rollout_cost(const SwitchDPProblem& p, Policy& policy) {
  return switch_rollout_cost(
      p, [&](const DeviationVector& d, std::span<const Bit> x, std::int64_t t) -> SwitchAction {
        const auto pc = policy.decide(d, x, t - 1);
        if (pc.is_idle()) return std::nullopt;
        return pc.base();
      });
}

Cost policy_rollout_cost(const SwitchDPProblem& p, Policy& policy) {
  const auto nn = static_cast<std::size_t>(p.n) * p.n;
  validate_targets(p.targets, nn, p.horizon);
  if (p.costs.size() != nn) throw DimensionError("one cost function per VOQ is required");
  DeviationVector d(p.n, initial_or_zero(p.initial, nn));
  Cost total(0);
  for (std::int64_t t = 1; t <= p.horizon; ++t) {
    const BitVector x = slot_bits(p.targets, t);
    const auto pc = policy.decide(d, x, t - 1);
    d = step_deviation(d, pc.as_vector(), x);
    total += total_cost(d, p.costs);
  }
  return total;
}

// ---- single-server program ----

std::size_t ServerDPSolution::state_count() const {
  std::size_t s = 0;
  for (const auto& l : levels_) s += l.size();
  return s;
}

std::uint64_t ServerDPSolution::pack(const ServiceCounts& counts) const {
  std::uint64_t key = 0;
  for (int k = n_ - 1; k >= 0; --k) key = (key << 8) | static_cast<std::uint64_t>(counts[static_cast<std::size_t>(k)]);
  return key;
}

Cost ServerDPSolution::psi(const std::vector<Deviation>& dev) const { return phi_sum(dev, costs_); }

bool ServerDPSolution::contains(std::int64_t t, const ServiceCounts& counts) const {
  if (t < 1 || t > horizon_ + 1) return false;
  if (counts.size() != static_cast<std::size_t>(n_)) return false;
  std::int64_t sum = 0;
  for (auto c : counts) {
    if (c < 0) return false;
    sum += c;
  }
  return sum <= t - 1;
}

Cost ServerDPSolution::value(std::int64_t t, const ServiceCounts& counts) const {
  if (!contains(t, counts)) throw StateError("not a state of the requested slot");
  return levels_[static_cast<std::size_t>(t - 1)].at(pack(counts)).value;
}

int ServerDPSolution::action(std::int64_t t, const ServiceCounts& counts) const {
  if (t > horizon_) throw StateError("no decision after the last slot");
  if (!contains(t, counts)) throw StateError("not a state of the requested slot");
  return levels_[static_cast<std::size_t>(t - 1)].at(pack(counts)).action;
}

std::vector<Deviation> ServerDPSolution::next_deviation(std::int64_t t, const ServiceCounts& counts,
                                                        int i) const {
  std::vector<Deviation> dev(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) {
    const auto q = static_cast<std::size_t>(k);
    dev[q] = initial_[q] + counts[q] + (i == k + 1 ? 1 : 0) - cumulative_[q][static_cast<std::size_t>(t)];
  }
  return dev;
}

Cost ServerDPSolution::instantaneous_cost(std::int64_t t, const ServiceCounts& counts,
                                          int i) const {
  return psi(next_deviation(t, counts, i));
}

Cost ServerDPSolution::omega_after(std::int64_t t, const ServiceCounts& counts, int i) const {
  ServiceCounts next = counts;
  if (i >= 1) ++next[static_cast<std::size_t>(i - 1)];
  return value(t + 1, next) + instantaneous_cost(t, counts, i);
}

namespace {

// Calls f on every n >= 0 with sum(n) <= limit, in lexicographic order.
template <class F>
void for_each_counts(int n, std::int64_t limit, F&& f) {
  ServiceCounts c(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int k, std::int64_t left) -> void {
    if (k == n) {
      f(c);
      return;
    }
    for (std::int64_t v = 0; v <= left; ++v) {
      c[static_cast<std::size_t>(k)] = v;
      self(self, k + 1, left - v);
    }
    c[static_cast<std::size_t>(k)] = 0;
  };
  rec(rec, 0, limit);
}

}  // namespace

ServerDPSolution solve_server_dp(const ServerDPProblem& p) {
  if (p.n < 1 || p.n > kMaxServerQueues) {
    throw CapabilityError("single-server program supports 1 to 4 meta-queues");
  }
  if (p.horizon > kMaxServerHorizon) throw CapabilityError("single-server horizon limited to 250");
  const auto n = static_cast<std::size_t>(p.n);
  validate_targets(p.targets, n, p.horizon);
  if (p.costs.size() != n) throw DimensionError("one cost function per meta-queue is required");

  ServerDPSolution s;
  s.n_ = p.n;
  s.horizon_ = p.horizon;
  s.allow_idle_ = p.allow_idle;
  s.costs_ = p.costs;
  s.initial_ = initial_or_zero(p.initial, n);
  s.cumulative_.assign(n, std::vector<std::int64_t>(static_cast<std::size_t>(p.horizon) + 1, 0));
  for (std::size_t q = 0; q < n; ++q) {
    for (std::int64_t t = 1; t <= p.horizon; ++t) {
      s.cumulative_[q][static_cast<std::size_t>(t)] =
          s.cumulative_[q][static_cast<std::size_t>(t - 1)] + p.targets[q][static_cast<std::size_t>(t - 1)];
    }
  }

  std::vector<int> order;
  for (int i = p.allow_idle ? 0 : 1; i <= p.n; ++i) order.push_back(i);
  if (p.reverse_action_order) std::reverse(order.begin(), order.end());

  const auto T = static_cast<std::size_t>(p.horizon);
  s.levels_.resize(T + 1);
  std::size_t total = 0;
  for_each_counts(p.n, p.horizon, [&](const ServiceCounts& c) {
    s.levels_[T].emplace(s.pack(c), ServerDPSolution::Entry{});
    if (++total > p.state_budget) throw CapabilityError("single-server DP state budget exceeded");
  });
  for (std::size_t t = T; t >= 1; --t) {
    auto& level = s.levels_[t - 1];
    for_each_counts(p.n, static_cast<std::int64_t>(t) - 1, [&](const ServiceCounts& c) {
      if (++total > p.state_budget) throw CapabilityError("single-server DP state budget exceeded");
      ServerDPSolution::Entry e;
      bool first = true;
      for (int i : order) {
        const Cost v = s.omega_after(static_cast<std::int64_t>(t), c, i);
        if (first || v < e.value) {
          e.value = v;
          e.action = i;
          first = false;
        }
      }
      level.emplace(s.pack(c), e);
    });
  }
  return s;
}

Cost gamma_ij(const ServerDPSolution& s, int i, int j, std::int64_t t, const ServiceCounts& counts) {
  if (i == j) throw ArgumentError("gamma_ij needs i != j");
  if (i < 0 || j < 0 || i > s.n() || j > s.n()) throw ArgumentError("meta-queue index out of range");
  if (t < 1 || t > s.horizon() || !s.contains(t, counts)) {
    throw StateError("gamma_ij requested outside the solved table");
  }
  return s.omega_after(t, counts, i) - s.omega_after(t, counts, j);
}

int server_myopic_decide(const ServerDPSolution& s, std::int64_t t, const ServiceCounts& counts) {
  int best = s.allow_idle() ? 0 : 1;
  Cost best_cost = s.instantaneous_cost(t, counts, best);
  for (int i = best + 1; i <= s.n(); ++i) {
    const Cost c = s.instantaneous_cost(t, counts, i);
    if (c < best_cost) {
      best = i;
      best_cost = c;
    }
  }
  return best;
}

namespace {

Cost server_rollout(const ServerDPSolution& s, bool optimal) {
  ServiceCounts c(static_cast<std::size_t>(s.n()), 0);
  Cost total(0);
  for (std::int64_t t = 1; t <= s.horizon(); ++t) {
    const int i = optimal ? s.action(t, c) : server_myopic_decide(s, t, c);
    ServiceCounts next = c;
    if (i >= 1) ++next[static_cast<std::size_t>(i - 1)];
    total += s.instantaneous_cost(t, c, i);
    c = std::move(next);
  }
  return total;
}

}  // namespace

Cost server_myopic_rollout_cost(const ServerDPSolution& s) { return server_rollout(s, false); }
Cost server_optimal_cost(const ServerDPSolution& s) {
  return s.value(1, ServiceCounts(static_cast<std::size_t>(s.n()), 0));
}

MonotonicityReport check_gamma_monotonicity(const ServerDPSolution& s) {
  MonotonicityReport r;
  const int n = s.n();
  for (std::int64_t t = 1; t <= s.horizon(); ++t) {
    // States n with n + e_k also a state of slot t.
    for_each_counts(n, t - 2, [&](const ServiceCounts& c) {
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
          if (i == j) continue;
          const Cost base = gamma_ij(s, i, j, t, c);
          for (int grow : {i, j}) {
            if (grow == 0) continue;
            ServiceCounts up = c;
            ++up[static_cast<std::size_t>(grow - 1)];
            const Cost moved = gamma_ij(s, i, j, t, up);
            ++r.checks;
            const bool ok = grow == i ? moved >= base : moved <= base;
            if (!ok) {
              if (r.violations == 0) {
                std::ostringstream os;
                os << "t=" << t << " i=" << i << " j=" << j << " grow=" << grow << " n=(";
                for (std::size_t k = 0; k < c.size(); ++k) os << (k ? "," : "") << c[k];
                os << ") gamma " << base << " -> " << moved;
                r.first_violation = os.str();
              }
              ++r.violations;
            }
          }
        }
      }
    });
  }
  return r;
}

std::size_t RegionSlice::count(int action) const {
  return static_cast<std::size_t>(std::count_if(
      cells.begin(), cells.end(), [&](const RegionCell& c) { return c.action == action; }));
}

RegionSlice decision_region_slice(const ServerDPSolution& s, std::int64_t t,
                                  const std::vector<std::optional<std::int64_t>>& fixed) {
  if (fixed.size() != static_cast<std::size_t>(s.n())) {
    throw DimensionError("one entry per meta-queue is required");
  }
  if (t < 1 || t > s.horizon()) throw StateError("slot outside the solved horizon");
  std::vector<int> free_axes;
  std::int64_t fixed_sum = 0;
  for (int k = 0; k < s.n(); ++k) {
    if (fixed[static_cast<std::size_t>(k)]) {
      fixed_sum += *fixed[static_cast<std::size_t>(k)];
    } else {
      free_axes.push_back(k);
    }
  }
  if (free_axes.empty() || free_axes.size() > 2) {
    throw ArgumentError("a slice needs one or two free coordinates");
  }
  RegionSlice slice;
  slice.first_axis = free_axes[0];
  slice.second_axis = free_axes.size() == 2 ? free_axes[1] : -1;
  const std::int64_t budget = t - 1 - fixed_sum;
  ServiceCounts c(static_cast<std::size_t>(s.n()), 0);
  for (int k = 0; k < s.n(); ++k) {
    if (fixed[static_cast<std::size_t>(k)]) c[static_cast<std::size_t>(k)] = *fixed[static_cast<std::size_t>(k)];
  }
  for (std::int64_t a = 0; a <= budget; ++a) {
    const std::int64_t b_max = slice.second_axis >= 0 ? budget - a : 0;
    for (std::int64_t b = 0; b <= b_max; ++b) {
      c[static_cast<std::size_t>(slice.first_axis)] = a;
      if (slice.second_axis >= 0) c[static_cast<std::size_t>(slice.second_axis)] = b;
      slice.cells.push_back({a, b, s.action(t, c)});
    }
  }
  return slice;
}

bool has_switch_over_property(const RegionSlice& slice) {
  auto line_ok = [](const std::vector<int>& actions) {
    std::vector<int> abandoned;
    for (std::size_t k = 0; k < actions.size(); ++k) {
      if (std::find(abandoned.begin(), abandoned.end(), actions[k]) != abandoned.end()) return false;
      if (k + 1 < actions.size() && actions[k + 1] != actions[k]) abandoned.push_back(actions[k]);
    }
    return true;
  };
  std::map<std::int64_t, std::vector<int>> rows, cols;
  for (const auto& c : slice.cells) {
    rows[c.a].push_back(c.action);  // cells are sorted by (a, b)
    cols[c.b].push_back(c.action);
  }
  for (const auto& [k, v] : rows) {
    if (!line_ok(v)) return false;
  }
  for (const auto& [k, v] : cols) {
    if (!line_ok(v)) return false;
  }
  return true;
}

void write_region_csv(std::ostream& out, const RegionSlice& slice) {
  out << 'n' << slice.first_axis + 1;
  if (slice.second_axis >= 0) out << ",n" << slice.second_axis + 1;
  out << ",action\n";
  for (const auto& c : slice.cells) {
    out << c.a;
    if (slice.second_axis >= 0) out << ',' << c.b;
    out << ',' << c.action << '\n';
  }
}

}  // namespace stc
