#include <gtest/gtest.h>

#include <sstream>

#include "stc/dp.hpp"
#include "stc/errors.hpp"
#include "stc/policies.hpp"
#include "stc/profiles.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace {

using namespace stc;
using stc::testing::Rng;

SwitchDPProblem random_switch_problem(Rng& rng, int n, std::int64_t horizon, double p) {
  SwitchDPProblem pr;
  pr.n = n;
  pr.horizon = horizon;
  const auto nn = static_cast<std::size_t>(n) * n;
  for (std::size_t q = 0; q < nn; ++q) {
    pr.targets.push_back(stc::testing::random_bits(rng, static_cast<std::size_t>(horizon), p));
  }
  pr.costs = uniform_costs(nn, CostFunction::quadratic());
  return pr;
}

ServerDPProblem random_server_problem(Rng& rng, int n, std::int64_t horizon, double p) {
  ServerDPProblem pr;
  pr.n = n;
  pr.horizon = horizon;
  for (int q = 0; q < n; ++q) {
    pr.targets.push_back(stc::testing::random_bits(rng, static_cast<std::size_t>(horizon), p));
  }
  pr.costs = uniform_costs(static_cast<std::size_t>(n), CostFunction::quadratic());
  return pr;
}

TEST(SwitchDp, SingleSlotHandEnumeration) {
  SwitchDPProblem p;
  p.n = 2;
  p.horizon = 1;
  p.targets = {{1}, {0}, {0}, {0}};
  p.costs = uniform_costs(4, CostFunction::quadratic());
  const auto s = solve_switch_dp(p);
  EXPECT_EQ(s.optimal_cost(), Cost(1));
  EXPECT_EQ(s.value(1, DeviationVector(2)), Cost(1));
  EXPECT_EQ(s.value(2, DeviationVector(2, {-1, 0, 0, 0})), Cost(0));
}

TEST(SwitchDp, ZeroHorizon) {
  SwitchDPProblem p;
  p.n = 2;
  p.targets.assign(4, BitVector{});
  p.costs = uniform_costs(4, CostFunction::quadratic());
  EXPECT_EQ(solve_switch_dp(p).optimal_cost(), Cost(0));
  EXPECT_EQ(myopic_rollout_cost(p), Cost(0));
}

TEST(SwitchDp, MatchesExhaustiveSearch) {
  Rng rng(100);
  for (int k = 0; k < 40; ++k) {
    const int n = k % 4 == 3 ? 3 : 2;
    const std::int64_t horizon = n == 2 ? stc::testing::uniform_int(rng, 1, 6) : 3;
    auto p = random_switch_problem(rng, n, horizon, stc::testing::uniform_real(rng, 0.1, 0.9));
    if (k % 5 == 4) p.costs = uniform_costs(p.targets.size(), CostFunction::absolute());
    for (bool idle : {true, false}) {
      p.allow_idle = idle;
      ASSERT_EQ(solve_switch_dp(p).optimal_cost(),
                stc::testing::oracle_switch_optimum(n, p.targets, horizon, p.costs, idle))
          << "instance " << k << " idle=" << idle;
    }
  }
}

TEST(SwitchDp, ActionOrderDoesNotChangeValues) {
  Rng rng(101);
  for (int k = 0; k < 10; ++k) {
    auto p = random_switch_problem(rng, 2, 7, 0.5);
    const auto a = solve_switch_dp(p);
    p.reverse_action_order = true;
    const auto b = solve_switch_dp(p);
    ASSERT_EQ(a.optimal_cost(), b.optimal_cost());
    ASSERT_EQ(a.state_count(), b.state_count());
  }
}

TEST(SwitchDp, OptimalActionsAchieveOptimalCost) {
  Rng rng(102);
  for (int k = 0; k < 10; ++k) {
    const auto p = random_switch_problem(rng, 2, 8, 0.5);
    const auto s = solve_switch_dp(p);
    const auto cost = switch_rollout_cost(p, [&](const DeviationVector& d, std::span<const Bit>,
                                                 std::int64_t t) { return s.action(t, d); });
    ASSERT_EQ(cost, s.optimal_cost());
  }
}

TEST(SwitchDp, UnreachedStateAndBudget) {
  Rng rng(103);
  auto p = random_switch_problem(rng, 2, 4, 0.5);
  const auto s = solve_switch_dp(p);
  EXPECT_THROW(s.value(2, DeviationVector(2, {9, 9, 9, 9})), StateError);
  p.state_budget = 3;
  EXPECT_THROW(solve_switch_dp(p), CapabilityError);
}

TEST(Myopic, QuadraticExamples) {
  const auto a = myopic_decide(DeviationVector(2, {-1, 0, 0, 0}), BitVector(4, 0),
                               uniform_costs(4, CostFunction::quadratic()));
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(*a, Configuration::identity(2));
  EXPECT_EQ(myopic_quadratic_decide(DeviationVector(2, {-1, 0, 0, 0}), BitVector(4, 0)), a);
  EXPECT_FALSE(myopic_decide(DeviationVector(2, {0, 1, 0, 2}), BitVector(4, 0),
                             uniform_costs(4, CostFunction::quadratic())).has_value());
}

TEST(Myopic, AgreesWithClosedFormAndEnumeration) {
  Rng rng(104);
  for (int k = 0; k < 10000; ++k) {
    const int n = static_cast<int>(stc::testing::uniform_int(rng, 1, 3));
    const auto nn = static_cast<std::size_t>(n) * n;
    const auto costs = uniform_costs(nn, CostFunction::quadratic());
    const auto d = stc::testing::random_deviation(rng, n, -4, 2);
    const auto x = stc::testing::random_bits(rng, nn, 0.5);
    const auto a = myopic_decide(d, x, costs);
    ASSERT_EQ(myopic_quadratic_decide(d, x), a);
    Cost best = total_cost(step_deviation(d, BitVector(nn, 0), x), costs);
    for (const auto& c : all_configurations(n)) {
      best = std::min(best, total_cost(step_deviation(d, c.as_vector(), x), costs));
    }
    const BitVector v = a ? a->as_vector() : BitVector(nn, 0);
    ASSERT_EQ(total_cost(step_deviation(d, v, x), costs), best);
  }
}

TEST(MyopicOptimality, NeverIdleMyopicIsOptimal) {
  Rng rng(105);
  for (int k = 0; k < 150; ++k) {
    const std::int64_t horizon = stc::testing::uniform_int(rng, 4, 9);
    auto p = random_switch_problem(rng, 2, horizon, 0.1 * static_cast<double>(1 + k % 9));
    p.allow_idle = false;
    if (k % 2 == 1) p.costs = uniform_costs(4, CostFunction::absolute());
    ASSERT_EQ(solve_switch_dp(p).optimal_cost(), myopic_rollout_cost(p)) << "instance " << k;
  }
}

TEST(MyopicOptimality, IdleActionBreaksMyopicOptimality) {
  // With idling allowed the myopic rule can be strictly suboptimal.
  auto bits = [](const std::string& s) {
    BitVector b;
    for (char c : s) b.push_back(c == '1' ? 1 : 0);
    return b;
  };
  SwitchDPProblem p;
  p.n = 2;
  p.horizon = 9;
  p.targets = {bits("100101100"), bits("110100110"), bits("100001101"), bits("110001111")};
  p.costs = uniform_costs(4, CostFunction::quadratic());
  EXPECT_EQ(solve_switch_dp(p).optimal_cost(), Cost(20));
  EXPECT_EQ(myopic_rollout_cost(p), Cost(24));
  EXPECT_EQ(stc::testing::oracle_switch_optimum(2, p.targets, 9, p.costs), Cost(20));
}

TEST(SwitchDp, NoPolicyBeatsTheOptimum) {
  Rng rng(106);
  const LoadMatrix load(2, std::vector<double>(4, 0.25));
  for (int k = 0; k < 20; ++k) {
    const auto p = random_switch_problem(rng, 2, 7, 0.5);
    const Cost opt = solve_switch_dp(p).optimal_cost();
    for (auto kind : all_policy_kinds()) {
      PolicySpec s;
      s.kind = kind;
      s.period = 2;
      auto policy = make_policy(s, 2, &load);
      ASSERT_LE(opt, policy_complete_rollout_cost(p, *policy)) << to_string(kind);
    }
  }
}

TEST(ServerDp, SingleQueueServesIffLagging) {
  Rng rng(107);
  auto p = random_server_problem(rng, 1, 30, 0.4);
  const auto s = solve_server_dp(p);
  for (std::int64_t t = 1; t <= 30; ++t) {
    for (std::int64_t m = 0; m <= t - 1; ++m) {
      const ServiceCounts n{m};
      const Deviation u = m - cumulative_prefix(p.targets[0])[static_cast<std::size_t>(t - 1)];
      ASSERT_EQ(s.action(t, n), u < 0 ? 1 : 0) << "t=" << t << " n=" << m;
    }
  }
}

TEST(ServerDp, MatchesExhaustiveSearch) {
  Rng rng(108);
  for (int k = 0; k < 30; ++k) {
    const int n = k % 3 == 2 ? 3 : 2;
    const std::int64_t horizon = n == 2 ? 7 : 5;
    const auto p = random_server_problem(rng, n, horizon, stc::testing::uniform_real(rng, 0.1, 0.6));
    ASSERT_EQ(server_optimal_cost(solve_server_dp(p)),
              stc::testing::oracle_server_optimum(p.targets, horizon, p.costs));
  }
}

TEST(ServerDp, NeverIdleGreedyOptimalForTwoQueues) {
  Rng rng(109);
  for (int k = 0; k < 100; ++k) {
    auto p = random_server_problem(rng, 2, 20, stc::testing::uniform_real(rng, 0.1, 0.6));
    p.allow_idle = false;
    const auto s = solve_server_dp(p);
    ASSERT_EQ(server_myopic_rollout_cost(s), server_optimal_cost(s)) << "instance " << k;
  }
  for (int k = 0; k < 30; ++k) {
    auto p = random_server_problem(rng, 2, 7, 0.4);
    p.allow_idle = false;
    ASSERT_EQ(server_optimal_cost(solve_server_dp(p)),
              stc::testing::oracle_server_optimum(p.targets, 7, p.costs, false));
  }
}

TEST(ServerDp, IdleOptionBreaksGreedyOptimality) {
  // Serving ahead of a target (a lead of one) beats the greedy rule, which
  // never creates a lead.
  auto bits = [](const std::string& s) {
    BitVector b;
    for (char c : s) b.push_back(c == '1' ? 1 : 0);
    return b;
  };
  ServerDPProblem p;
  p.n = 2;
  p.horizon = 20;
  p.targets = {bits("00111101101000110000"), bits("10100000000000010011")};
  p.costs = uniform_costs(2, CostFunction::quadratic());
  const auto s = solve_server_dp(p);
  EXPECT_EQ(server_optimal_cost(s), Cost(2));
  EXPECT_EQ(server_myopic_rollout_cost(s), Cost(5));
  EXPECT_EQ(s.action(2, ServiceCounts{0, 1}), 1);
  EXPECT_EQ(server_myopic_decide(s, 2, ServiceCounts{0, 1}), 0);
}

TEST(ServerDp, Capability) {
  ServerDPProblem p;
  p.n = 5;
  p.horizon = 3;
  p.targets.assign(5, BitVector(3, 0));
  p.costs = uniform_costs(5, CostFunction::quadratic());
  EXPECT_THROW(solve_server_dp(p), CapabilityError);
  p.n = 1;
  p.horizon = 251;
  p.targets.assign(1, BitVector(251, 0));
  p.costs = uniform_costs(1, CostFunction::quadratic());
  EXPECT_THROW(solve_server_dp(p), CapabilityError);
  Rng rng(110);
  auto q = random_server_problem(rng, 3, 30, 0.3);
  q.state_budget = 100;
  EXPECT_THROW(solve_server_dp(q), CapabilityError);
}

TEST(Gamma, BoundaryAndErrors) {
  Rng rng(111);
  const auto p = random_server_problem(rng, 2, 10, 0.5);
  const auto s = solve_server_dp(p);
  const ServiceCounts n{2, 3};
  const std::int64_t T = 10;
  for (int i = 0; i <= 2; ++i) {
    for (int j = 0; j <= 2; ++j) {
      if (i == j) {
        EXPECT_THROW(gamma_ij(s, i, j, T, n), ArgumentError);
        continue;
      }
      EXPECT_EQ(gamma_ij(s, i, j, T, n), s.instantaneous_cost(T, n, i) - s.instantaneous_cost(T, n, j));
    }
  }
  EXPECT_THROW(gamma_ij(s, 0, 3, T, n), ArgumentError);
  EXPECT_THROW(gamma_ij(s, 0, 1, 3, ServiceCounts{3, 3}), StateError);
}

TEST(Gamma, MonotoneOnSmallInstances) {
  Rng rng(112);
  for (int k = 0; k < 5; ++k) {
    const auto p = random_server_problem(rng, 3, 10, stc::testing::uniform_real(rng, 0.1, 0.5));
    const auto report = check_gamma_monotonicity(solve_server_dp(p));
    ASSERT_GT(report.checks, 0u);
    ASSERT_EQ(report.violations, 0u) << report.first_violation;
  }
}

TEST(Regions, SingleQueueHasTwoBands) {
  Rng rng(113);
  const auto p = random_server_problem(rng, 1, 20, 0.5);
  const auto s = solve_server_dp(p);
  const auto slice = decision_region_slice(s, 15, {std::nullopt});
  EXPECT_EQ(slice.second_axis, -1);
  ASSERT_EQ(slice.cells.size(), 15u);
  EXPECT_GT(slice.count(1), 0u);
  EXPECT_GT(slice.count(0), 0u);
  EXPECT_TRUE(has_switch_over_property(slice));
  std::ostringstream csv;
  write_region_csv(csv, slice);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "n1,action");
}

TEST(Regions, PlaneSliceHasSwitchOverProperty) {
  Rng rng(114);
  const auto p = random_server_problem(rng, 3, 24, 0.2);
  const auto s = solve_server_dp(p);
  const auto slice = decision_region_slice(s, 18, {std::nullopt, std::nullopt, 3});
  EXPECT_EQ(slice.first_axis, 0);
  EXPECT_EQ(slice.second_axis, 1);
  for (const auto& c : slice.cells) ASSERT_LE(c.a + c.b + 3, 17);
  EXPECT_TRUE(has_switch_over_property(slice));
  std::ostringstream csv;
  write_region_csv(csv, slice);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "n1,n2,action");
  EXPECT_THROW(decision_region_slice(s, 18, {1, 2, 3}), Error);
}

TEST(Regions, SwitchOverDetectsReturningAction) {
  RegionSlice bad;
  bad.second_axis = -1;
  bad.cells = {{0, 0, 1}, {1, 0, 0}, {2, 0, 1}};
  EXPECT_FALSE(has_switch_over_property(bad));
}

}  // namespace
