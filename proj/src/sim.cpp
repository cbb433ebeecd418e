#include "stc/sim.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>

namespace stc {
namespace {

constexpr std::uint64_t kProfileTag = 0x70726f66;
constexpr std::uint64_t kOffsetTag = 0x6f666673;
constexpr std::uint64_t kPolicyTag = 0x706f6c69;

void check_switch(int n, std::int64_t horizon) {
  if (n < 1) throw ArgumentError("switch size must be positive");
  if (horizon < 0) throw ArgumentError("horizon must be non-negative");
}

void check_rate(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw ArgumentError("stream rates must lie in [0, 1]");
}

Scenario base_scenario(ScenarioKind kind, int n, std::int64_t horizon, PolicySpec policy,
                       std::uint64_t seed) {
  check_switch(n, horizon);
  Scenario s;
  s.kind = kind;
  s.name = to_string(kind);
  s.n = n;
  s.horizon = horizon;
  s.policy = std::move(policy);
  s.seed = seed;
  return s;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::UniformIid:
      return "uniform-iid";
    case ScenarioKind::ParallelHeavy:
      return "parallel-heavy";
    case ScenarioKind::CrossHeavy:
      return "cross-heavy";
    case ScenarioKind::UniformPeriodic:
      return "uniform-periodic";
    case ScenarioKind::Custom:
      return "custom";
  }
  return "?";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  std::string key = name;
  for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto k : {ScenarioKind::UniformIid, ScenarioKind::ParallelHeavy, ScenarioKind::CrossHeavy,
                 ScenarioKind::UniformPeriodic, ScenarioKind::Custom}) {
    if (to_string(k) == key) return k;
  }
  throw ArgumentError("unknown load kind '" + name + "'");
}

Scenario uniform_iid_scenario(int n, std::int64_t horizon, double lambda, PolicySpec policy,
                              std::uint64_t seed) {
  Scenario s = base_scenario(ScenarioKind::UniformIid, n, horizon, std::move(policy), seed);
  const double rate = lambda / n;
  check_rate(rate);
  s.lambda = lambda;
  s.profiles.assign(static_cast<std::size_t>(n) * n, BernoulliSpec{rate});
  return s;
}

Scenario parallel_heavy_scenario(int n, std::int64_t horizon, double lambda1, double lambda2,
                                 PolicySpec policy, std::uint64_t seed) {
  Scenario s = base_scenario(ScenarioKind::ParallelHeavy, n, horizon, std::move(policy), seed);
  check_rate(lambda1);
  check_rate(lambda2);
  s.lambda1 = lambda1;
  s.lambda2 = lambda2;
  s.lambda = lambda1 + (n - 1) * lambda2;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s.profiles.emplace_back(BernoulliSpec{i == j ? lambda1 : lambda2});
  }
  return s;
}

Configuration cross_configuration(int n) {
  if (n < 2 || n % 2 != 0) throw ArgumentError("the cross pattern needs an even switch size");
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i % 2 == 0 ? i + 1 : i - 1;
  return Configuration(std::move(perm));
}

Scenario cross_heavy_scenario(int n, std::int64_t horizon, double lambda1, double lambda2,
                              PolicySpec policy, std::uint64_t seed) {
  Scenario s = base_scenario(ScenarioKind::CrossHeavy, n, horizon, std::move(policy), seed);
  check_rate(lambda1);
  check_rate(lambda2);
  const Configuration cross = cross_configuration(n);
  s.lambda1 = lambda1;
  s.lambda2 = lambda2;
  s.lambda = lambda1 + (n - 1) * lambda2;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s.profiles.emplace_back(BernoulliSpec{cross.output_of(i) == j ? lambda1 : lambda2});
    }
  }
  return s;
}

Scenario uniform_periodic_scenario(int n, std::int64_t horizon, std::int64_t delta,
                                   PolicySpec policy, std::uint64_t seed) {
  Scenario s = base_scenario(ScenarioKind::UniformPeriodic, n, horizon, std::move(policy), seed);
  if (delta < 1) throw ArgumentError("period must be at least 1");
  s.delta = delta;
  s.lambda = static_cast<double>(n) / static_cast<double>(delta);
  auto rng = make_stream_rng(seed, 0, kOffsetTag);
  std::uniform_int_distribution<std::int64_t> offset(0, delta - 1);
  for (std::size_t q = 0; q < static_cast<std::size_t>(n) * n; ++q) {
    s.profiles.emplace_back(PeriodicSpec{delta, offset(rng)});
  }
  return s;
}

Scenario load_matrix_scenario(const LoadMatrix& load, std::int64_t horizon, PolicySpec policy,
                              std::uint64_t seed) {
  Scenario s = base_scenario(ScenarioKind::Custom, load.n(), horizon, std::move(policy), seed);
  for (double r : load.rates()) {
    check_rate(r);
    s.profiles.emplace_back(BernoulliSpec{r});
  }
  s.lambda = load.max_line_sum();
  return s;
}

LoadMatrix scenario_load(const Scenario& s) {
  const auto nn = static_cast<std::size_t>(s.n) * s.n;
  if (s.profiles.size() != nn) throw DimensionError("scenario needs one profile per VOQ");
  std::vector<double> rates(nn);
  for (std::size_t q = 0; q < nn; ++q) rates[q] = nominal_rate(s.profiles[q]);
  return LoadMatrix(s.n, std::move(rates));
}

Deviation RunResult::deviation(std::int64_t t, std::size_t q) const {
  if (series.empty()) throw StateError("run did not keep its deviation series");
  if (t < 1 || t > horizon || q >= voqs()) throw ArgumentError("series index out of range");
  return series[static_cast<std::size_t>(t - 1) * voqs() + q];
}

RunResult run(const Scenario& s) {
  check_switch(s.n, s.horizon);
  const auto start = std::chrono::steady_clock::now();
  const int n = s.n;
  const auto nn = static_cast<std::size_t>(n) * n;
  const LoadMatrix load = scenario_load(s);

  PolicySpec ps = s.policy;
  ps.seed = make_stream_rng(s.seed, nn, kPolicyTag)();
  const auto policy = make_policy(ps, n, &load);

  std::vector<ProfileGenerator> gens;
  gens.reserve(nn);
  for (std::size_t q = 0; q < nn; ++q) {
    gens.emplace_back(s.profiles[q], make_stream_rng(s.seed, q, kProfileTag)());
  }

  RunResult r;
  r.n = n;
  r.horizon = s.horizon;
  r.policy_name = policy->name();
  r.services.assign(nn, 0);
  r.target_totals.assign(nn, 0);
  r.slot_min.reserve(static_cast<std::size_t>(s.horizon));
  if (s.keep_series) r.series.reserve(static_cast<std::size_t>(s.horizon) * nn);

  std::vector<std::int64_t> sum(nn, 0);
  std::vector<long double> sum_sq(nn, 0.0L);
  long double cross_var_total = 0.0L;
  long double lag_total = 0.0L;
  Deviation max_dev = std::numeric_limits<Deviation>::min();
  Deviation min_dev = std::numeric_limits<Deviation>::max();

  DeviationVector d(n);
  BitVector x(nn);
  for (std::int64_t t = 1; t <= s.horizon; ++t) {
    for (std::size_t q = 0; q < nn; ++q) {
      x[q] = gens[q].next_bit();
      r.target_totals[q] += x[q];
    }
    const PartialConfiguration pc = policy->decide(d, x, t - 1);
    BitVector served;
    if (s.complete_only) {
      const auto u = updated_deviation(d, x);
      const bool serve = 2 * pc.base().inner<Deviation>(u) + n <= 0;
      served = serve ? pc.base().as_vector() : BitVector(nn, 0);
    } else {
      served = pc.as_vector();
    }
    for (std::size_t q = 0; q < nn; ++q) {
      r.services[q] += served[q];
      d[q] += static_cast<Deviation>(served[q]) - static_cast<Deviation>(x[q]);
    }

    Deviation slot_lo = d[0];
    std::int64_t slot_sum = 0;
    long double slot_sq = 0.0L;
    for (std::size_t q = 0; q < nn; ++q) {
      const Deviation v = d[q];
      slot_lo = std::min(slot_lo, v);
      max_dev = std::max(max_dev, v);
      slot_sum += v;
      slot_sq += static_cast<long double>(v) * v;
      sum[q] += v;
      sum_sq[q] += static_cast<long double>(v) * v;
      if (s.keep_series) r.series.push_back(static_cast<std::int32_t>(v));
    }
    min_dev = std::min(min_dev, slot_lo);
    r.slot_min.push_back(slot_lo);
    const long double mean = static_cast<long double>(slot_sum) / nn;
    cross_var_total += slot_sq / nn - mean * mean;
    lag_total += -static_cast<long double>(slot_sum);
  }
  r.final_deviation = d;

  if (s.horizon > 0) {
    const auto T = static_cast<long double>(s.horizon);
    long double dev_total = 0.0L, var_total = 0.0L;
    for (std::size_t q = 0; q < nn; ++q) {
      const long double m = static_cast<long double>(sum[q]) / T;
      dev_total += static_cast<long double>(sum[q]);
      var_total += sum_sq[q] / T - m * m;
    }
    r.summary.avg_dev = static_cast<double>(dev_total / (T * nn));
    r.summary.avg_var = static_cast<double>(var_total / nn);
    r.summary.cross_var = static_cast<double>(cross_var_total / T);
    r.summary.avg_lag_sum = static_cast<double>(lag_total / T);
    r.summary.max_dev = max_dev;
    r.summary.min_dev = min_dev;
    if (r.slot_min.size() >= s.divergence_windows && s.divergence_windows >= 2) {
      r.summary.diverged = divergence_check(r.slot_min, s.divergence_windows);
    }
  }
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Metrics metrics(const std::vector<std::vector<Deviation>>& series) {
  if (series.empty() || series.front().empty()) throw ArgumentError("metrics need a non-empty series");
  const std::size_t q_count = series.front().size();
  const auto T = static_cast<long double>(series.size());
  std::vector<long double> sum(q_count, 0.0L), sum_sq(q_count, 0.0L);
  long double cross = 0.0L;
  for (const auto& slot : series) {
    if (slot.size() != q_count) throw ArgumentError("metrics need equally long slots");
    long double s1 = 0.0L, s2 = 0.0L;
    for (std::size_t q = 0; q < q_count; ++q) {
      const auto v = static_cast<long double>(slot[q]);
      sum[q] += v;
      sum_sq[q] += v * v;
      s1 += v;
      s2 += v * v;
    }
    const long double m = s1 / q_count;
    cross += s2 / q_count - m * m;
  }
  Metrics out;
  long double dev = 0.0L, var = 0.0L;
  for (std::size_t q = 0; q < q_count; ++q) {
    const long double m = sum[q] / T;
    dev += sum[q];
    var += sum_sq[q] / T - m * m;
  }
  out.avg_dev = static_cast<double>(dev / (T * q_count));
  out.avg_var = static_cast<double>(var / q_count);
  out.cross_var = static_cast<double>(cross / T);
  return out;
}

bool divergence_check(std::span<const Deviation> slot_min, std::size_t windows) {
  if (windows < 2) throw ArgumentError("divergence check needs at least two windows");
  if (slot_min.size() < windows) throw ArgumentError("series shorter than the window count");
  const std::size_t len = slot_min.size() / windows;
  auto window_lag = [&](std::size_t w) {
    // The last window absorbs the remainder.
    const std::size_t begin = w * len;
    const std::size_t end = w + 1 == windows ? slot_min.size() : begin + len;
    long double total = 0.0L;
    for (std::size_t k = begin; k < end; ++k) total += slot_min[k] < 0 ? -slot_min[k] : 0;
    return static_cast<double>(total / static_cast<long double>(end - begin));
  };
  const double first = window_lag(0);
  const double prev = window_lag(windows - 2);
  const double last = window_lag(windows - 1);
  return last >= 5.0 * std::max(first, 1.0) && last > prev;
}

}  // namespace stc
