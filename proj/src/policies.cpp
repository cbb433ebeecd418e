#include "stc/policies.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "stc/assignment.hpp"
#include "stc/profiles.hpp"

namespace stc {
namespace {

WeightMatrix weights_from(int n, std::span<const Deviation> updated) {
  return WeightMatrix(n, std::vector<std::int64_t>(updated.begin(), updated.end()));
}

std::size_t argmin_index(std::span<const Deviation> values) {
  return static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
}

void check_subset(const DeviationVector& d, const ConfigurationSubset& subset) {
  if (subset.n() != d.n()) throw DimensionError("subset size does not match the switch");
}

}  // namespace

PartialConfiguration extract_partial(const Configuration& v, std::span<const Deviation> updated,
                                     Deviation lead_cap) {
  const int n = v.n();
  if (updated.size() != static_cast<std::size_t>(n) * n) {
    throw DimensionError("extract_partial: updated deviation must have N^2 entries");
  }
  BitVector mask(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) mask[static_cast<std::size_t>(i)] = updated[v.voq_at(i)] < lead_cap;
  return {v, std::move(mask)};
}

PartialConfiguration msl_decide(const DeviationVector& d, std::span<const Bit> x,
                                Deviation lead_cap) {
  const auto u = updated_deviation(d, x);
  const Configuration best = min_weight_assignment(weights_from(d.n(), u));
  return extract_partial(best, u, lead_cap);
}

PartialConfiguration msl_exact_decide(const DeviationVector& d, std::span<const Bit> x) {
  const auto u = updated_deviation(d, x);
  std::vector<std::int64_t> gain(u.size());
  for (std::size_t q = 0; q < u.size(); ++q) gain[q] = u[q] < 0 ? 2 * u[q] + 1 : 0;
  return extract_partial(min_weight_assignment(WeightMatrix(d.n(), std::move(gain))), u, 0);
}

PartialConfiguration msl_ss_decide(const DeviationVector& d, std::span<const Bit> x,
                                   const ConfigurationSubset& subset, Deviation lead_cap) {
  check_subset(d, subset);
  const auto u = updated_deviation(d, x);
  std::size_t best = 0;
  Deviation best_value = std::numeric_limits<Deviation>::max();
  for (std::size_t k = 0; k < subset.size(); ++k) {
    const Deviation value = subset.member(k).inner<Deviation>(u);
    if (value < best_value) {
      best_value = value;
      best = k;
    }
  }
  return extract_partial(subset.member(best), u, lead_cap);
}

PartialConfiguration llf_ss_decide(const DeviationVector& d, std::span<const Bit> x,
                                   const ConfigurationSubset& subset, Deviation lead_cap) {
  check_subset(d, subset);
  const auto u = updated_deviation(d, x);
  const std::size_t voq = argmin_index(u);
  return extract_partial(subset.member(subset.member_serving(voq)), u, lead_cap);
}

Deviation metaqueue_deviation(const MetaQueueMapping& gamma, std::span<const Deviation> d,
                              std::span<const std::size_t> members) {
  if (members.empty()) throw ArgumentError("meta-queue needs at least one member");
  switch (gamma.kind) {
    case GammaKind::Sum: {
      Deviation s = 0;
      for (auto q : members) s += d[q];
      return s;
    }
    case GammaKind::Min: {
      Deviation m = std::numeric_limits<Deviation>::max();
      for (auto q : members) m = std::min(m, d[q]);
      return m;
    }
    case GammaKind::Weighted: {
      if (gamma.weights.size() < d.size()) {
        throw DimensionError("weighted meta-queue mapping needs one weight per VOQ");
      }
      Deviation s = 0;
      for (auto q : members) s += gamma.weights[q] * d[q];
      return s;
    }
  }
  return 0;
}

PartialConfiguration metaqueue_ss_decide(const MetaQueueMapping& gamma, const DeviationVector& d,
                                         std::span<const Bit> x,
                                         const ConfigurationSubset& subset,
                                         Deviation lead_cap) {
  check_subset(d, subset);
  const auto u = updated_deviation(d, x);
  std::size_t best = 0;
  Deviation best_value = std::numeric_limits<Deviation>::max();
  for (std::size_t k = 0; k < subset.size(); ++k) {
    const auto members = served_voqs(subset.member(k));
    const Deviation value = metaqueue_deviation(gamma, u, members);
    if (value < best_value) {
      best_value = value;
      best = k;
    }
  }
  return extract_partial(subset.member(best), u, lead_cap);
}

PartialConfiguration single_subset_decide(InnerRule rule, const DeviationVector& d,
                                          std::span<const Bit> x,
                                          const ConfigurationSubset& subset, Deviation lead_cap) {
  return rule == InnerRule::MaxSumOfLags ? msl_ss_decide(d, x, subset, lead_cap)
                                         : llf_ss_decide(d, x, subset, lead_cap);
}

Configuration llf_full_configuration(int n, std::span<const Deviation> updated) {
  if (updated.size() != static_cast<std::size_t>(n) * n) {
    throw DimensionError("llf_full_configuration: updated deviation must have N^2 entries");
  }
  const std::size_t voq = argmin_index(updated);
  const int forced_in = static_cast<int>(voq / static_cast<std::size_t>(n));
  const int forced_out = static_cast<int>(voq % static_cast<std::size_t>(n));
  if (n == 1) return Configuration::identity(1);

  std::vector<int> rows, cols;
  for (int k = 0; k < n; ++k) {
    if (k != forced_in) rows.push_back(k);
    if (k != forced_out) cols.push_back(k);
  }
  const int m = n - 1;
  std::vector<std::int64_t> reduced(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      reduced[static_cast<std::size_t>(i) * m + j] =
          updated[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)]) * n +
                  cols[static_cast<std::size_t>(j)]];
    }
  }
  const Configuration sub = min_weight_assignment(WeightMatrix(m, std::move(reduced)));
  std::vector<int> perm(static_cast<std::size_t>(n));
  perm[static_cast<std::size_t>(forced_in)] = forced_out;
  for (int i = 0; i < m; ++i) {
    perm[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])] =
        cols[static_cast<std::size_t>(sub.output_of(i))];
  }
  return Configuration(std::move(perm));
}

std::size_t sample_subset(const BVDecomposition& bv, std::mt19937_64& rng) {
  if (bv.subset_probs.empty()) throw DomainError("decomposition has no subsets to sample");
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < bv.subset_probs.size(); ++k) {
    acc += bv.subset_probs[k].probability;
    if (u < acc) return k;
  }
  return bv.subset_probs.size() - 1;
}

PartialConfiguration rs_decide(const DeviationVector& d, std::span<const Bit> x,
                               const BVDecomposition& bv, InnerRule inner, Deviation lead_cap,
                               std::mt19937_64& rng) {
  if (bv.n != d.n()) throw DimensionError("decomposition size does not match the switch");
  const std::size_t k = sample_subset(bv, rng);
  return single_subset_decide(inner, d, x, bv.subset_probs[k].subset, lead_cap);
}

PartialConfiguration psel_decide(PselState& state, const DeviationVector& d,
                                 std::span<const Bit> x, std::int64_t t, Deviation lead_cap) {
  if (state.period < 1) throw ArgumentError("pSEL period must be at least 1");
  check_subset(d, state.subset);
  if (t % state.period != 0) {
    return single_subset_decide(state.inner, d, x, state.subset, lead_cap);
  }
  const auto u = updated_deviation(d, x);
  const Configuration chosen = state.inner == InnerRule::MaxSumOfLags
                                   ? min_weight_assignment(weights_from(d.n(), u))
                                   : llf_full_configuration(d.n(), u);
  ++state.refreshes;
  if (!state.subset.contains(chosen)) {
    state.subset = generate_subset(chosen);
    ++state.subset_switches;
  }
  return extract_partial(chosen, u, lead_cap);
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Msl:
      return "MSL";
    case PolicyKind::MslSs:
      return "MSL-SS";
    case PolicyKind::LlfSs:
      return "LLF-SS";
    case PolicyKind::MslRs:
      return "MSL-RS";
    case PolicyKind::LlfRs:
      return "LLF-RS";
    case PolicyKind::MslPsel:
      return "MSL-pSEL";
    case PolicyKind::LlfPsel:
      return "LLF-pSEL";
  }
  return "?";
}

const std::vector<PolicyKind>& all_policy_kinds() {
  static const std::vector<PolicyKind> kinds{PolicyKind::Msl,    PolicyKind::MslSs,
                                             PolicyKind::LlfSs,  PolicyKind::MslRs,
                                             PolicyKind::LlfRs,  PolicyKind::MslPsel,
                                             PolicyKind::LlfPsel};
  return kinds;
}

PolicyKind parse_policy_kind(const std::string& name) {
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  const std::string key = lower(name);
  for (PolicyKind k : all_policy_kinds()) {
    if (lower(to_string(k)) == key) return k;
  }
  throw ArgumentError("unknown policy kind '" + name + "'");
}

std::string policy_label(const PolicySpec& spec) {
  std::string s = to_string(spec.kind);
  if (spec.kind == PolicyKind::MslPsel || spec.kind == PolicyKind::LlfPsel) {
    s += "(" + std::to_string(spec.period) + ")";
  }
  if (spec.lead_cap != 0) s += "[l=" + std::to_string(spec.lead_cap) + "]";
  return s;
}

namespace {

class MslPolicy final : public Policy {
 public:
  using Policy::Policy;
  PartialConfiguration decide(const DeviationVector& d, std::span<const Bit> x,
                              std::int64_t) override {
    return msl_decide(d, x, spec().lead_cap);
  }
};

class SingleSubsetPolicy final : public Policy {
 public:
  SingleSubsetPolicy(PolicySpec spec, int n)
      : Policy(std::move(spec)),
        subset_(this->spec().subset_generator.value_or(Configuration::identity(n))) {
    if (this->spec().gamma) {
      gamma_ = *this->spec().gamma;
    } else {
      gamma_.kind = this->spec().kind == PolicyKind::MslSs ? GammaKind::Sum : GammaKind::Min;
    }
  }

  PartialConfiguration decide(const DeviationVector& d, std::span<const Bit> x,
                              std::int64_t) override {
    switch (gamma_.kind) {
      case GammaKind::Sum:
        return msl_ss_decide(d, x, subset_, spec().lead_cap);
      case GammaKind::Min:
        return llf_ss_decide(d, x, subset_, spec().lead_cap);
      case GammaKind::Weighted:
        break;
    }
    return metaqueue_ss_decide(gamma_, d, x, subset_, spec().lead_cap);
  }

 private:
  ConfigurationSubset subset_;
  MetaQueueMapping gamma_;
};

class RandomSubsetPolicy final : public Policy {
 public:
  RandomSubsetPolicy(PolicySpec spec, BVDecomposition bv)
      : Policy(std::move(spec)), bv_(std::move(bv)), rng_(make_stream_rng(this->spec().seed, 0, 0x52)) {
    inner_ = this->spec().kind == PolicyKind::MslRs ? InnerRule::MaxSumOfLags
                                                    : InnerRule::LargestLagFirst;
  }

  PartialConfiguration decide(const DeviationVector& d, std::span<const Bit> x,
                              std::int64_t) override {
    return rs_decide(d, x, bv_, inner_, spec().lead_cap, rng_);
  }

 private:
  BVDecomposition bv_;
  InnerRule inner_;
  std::mt19937_64 rng_;
};

class PeriodicSelectionPolicy final : public Policy {
 public:
  PeriodicSelectionPolicy(PolicySpec spec, int n) : Policy(std::move(spec)) {
    state_.subset = generate_subset(this->spec().subset_generator.value_or(Configuration::identity(n)));
    state_.period = this->spec().period;
    state_.inner = this->spec().kind == PolicyKind::MslPsel ? InnerRule::MaxSumOfLags
                                                            : InnerRule::LargestLagFirst;
    if (state_.period < 1) throw ArgumentError("pSEL period must be at least 1");
  }

  PartialConfiguration decide(const DeviationVector& d, std::span<const Bit> x,
                              std::int64_t t) override {
    return psel_decide(state_, d, x, t, spec().lead_cap);
  }

 private:
  PselState state_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, int n, const LoadMatrix* load) {
  if (spec.lead_cap < 0) throw ArgumentError("lead cap must be non-negative");
  if (spec.subset_generator && spec.subset_generator->n() != n) {
    throw DimensionError("subset generator size does not match the switch");
  }
  switch (spec.kind) {
    case PolicyKind::Msl:
      return std::make_unique<MslPolicy>(spec);
    case PolicyKind::MslSs:
    case PolicyKind::LlfSs:
      return std::make_unique<SingleSubsetPolicy>(spec, n);
    case PolicyKind::MslRs:
    case PolicyKind::LlfRs: {
      BVDecomposition bv;
      if (spec.decomposition) {
        bv = *spec.decomposition;
      } else {
        if (load == nullptr) throw DomainError("randomized-subset policies need the load matrix");
        bv = bv_decompose(*load);
      }
      if (bv.subset_probs.empty()) throw DomainError("load decomposition is empty");
      return std::make_unique<RandomSubsetPolicy>(spec, std::move(bv));
    }
    case PolicyKind::MslPsel:
    case PolicyKind::LlfPsel:
      return std::make_unique<PeriodicSelectionPolicy>(spec, n);
  }
  throw ArgumentError("unknown policy kind");
}

}  // namespace stc
