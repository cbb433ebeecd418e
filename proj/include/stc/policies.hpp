#pragma once

// Service trace control policies. Every rule works on the updated deviation
// u = d - x^t: pick a complete configuration, then idle each of its VOQs whose
// updated deviation has reached the lead cap.
//
// Ties are broken toward the lowest index everywhere (VOQ index, subset
// member index, lexicographic permutation).

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stc/config.hpp"
#include "stc/core.hpp"

namespace stc {

// Serve the VOQ at input i of v iff updated[v.voq_at(i)] < lead_cap.
PartialConfiguration extract_partial(const Configuration& v, std::span<const Deviation> updated,
                                     Deviation lead_cap);

// MSL(l): min-weight assignment on u, then extraction.
PartialConfiguration msl_decide(const DeviationVector& d, std::span<const Bit> x,
                                Deviation lead_cap = 0);

// Myopic minimizer of the quadratic cost over all partial configurations:
// matching on the serving gain min(0, 2u + 1), then extraction at l = 0.
// Differs from msl_decide when several small lags compete with one large lag.
PartialConfiguration msl_exact_decide(const DeviationVector& d, std::span<const Bit> x);

// MSL(l)-SS: member minimizing <u, C^i(v)>, then extraction.
PartialConfiguration msl_ss_decide(const DeviationVector& d, std::span<const Bit> x,
                                   const ConfigurationSubset& subset, Deviation lead_cap = 0);

// LLF(l)-SS: member serving the VOQ with the smallest u, then extraction.
PartialConfiguration llf_ss_decide(const DeviationVector& d, std::span<const Bit> x,
                                   const ConfigurationSubset& subset, Deviation lead_cap = 0);

enum class GammaKind { Sum, Min, Weighted };

// Collapses member deviations into one meta-queue deviation.
struct MetaQueueMapping {
  GammaKind kind = GammaKind::Sum;
  // One weight per VOQ; only read for GammaKind::Weighted.
  std::vector<Deviation> weights;
};

Deviation metaqueue_deviation(const MetaQueueMapping& gamma, std::span<const Deviation> d,
                              std::span<const std::size_t> members);

// Largest-lag-first over meta-queues: the member with the smallest
// Gamma(u; members), lowest member index on ties, then extraction.
PartialConfiguration metaqueue_ss_decide(const MetaQueueMapping& gamma, const DeviationVector& d,
                                         std::span<const Bit> x,
                                         const ConfigurationSubset& subset,
                                         Deviation lead_cap = 0);

// Single-subset rule used inside the RS and pSEL families.
enum class InnerRule { MaxSumOfLags, LargestLagFirst };

PartialConfiguration single_subset_decide(InnerRule rule, const DeviationVector& d,
                                          std::span<const Bit> x,
                                          const ConfigurationSubset& subset, Deviation lead_cap);

// Complete configuration for the full-set LLF step: the most lagged VOQ
// (smallest u, lowest index) is forced and the remaining ports are matched by
// min-weight assignment on u.
Configuration llf_full_configuration(int n, std::span<const Deviation> updated);

// Index k drawn from theta (the subset probabilities of the decomposition).
std::size_t sample_subset(const BVDecomposition& bv, std::mt19937_64& rng);

// MSL-RS / LLF-RS: sample a subset with probability theta_k, then run the
// inner single-subset rule on it.
PartialConfiguration rs_decide(const DeviationVector& d, std::span<const Bit> x,
                               const BVDecomposition& bv, InnerRule inner, Deviation lead_cap,
                               std::mt19937_64& rng);

// Mutable state of a periodic-selection policy.
struct PselState {
  ConfigurationSubset subset;
  std::int64_t period = 1;
  InnerRule inner = InnerRule::MaxSumOfLags;
  std::int64_t refreshes = 0;
  std::int64_t subset_switches = 0;
};

// pSEL(P), slot index t counted from 0. On slots with t % P == 0 the full-set
// rule picks a complete configuration; if it lies outside the current subset
// the subset is replaced by the one it generates, and the slot is served by
// that configuration's extraction. Other slots use the single-subset rule.
PartialConfiguration psel_decide(PselState& state, const DeviationVector& d,
                                 std::span<const Bit> x, std::int64_t t, Deviation lead_cap);

enum class PolicyKind { Msl, MslSs, LlfSs, MslRs, LlfRs, MslPsel, LlfPsel };

std::string to_string(PolicyKind kind);
// Accepts the catalog names, e.g. "MSL-SS", "LLF-pSEL" (case-insensitive).
PolicyKind parse_policy_kind(const std::string& name);
const std::vector<PolicyKind>& all_policy_kinds();

struct PolicySpec {
  PolicyKind kind = PolicyKind::Msl;
  Deviation lead_cap = 0;
  // Generator of the operational subset (SS kinds) or of the initial subset
  // (pSEL kinds). Identity when unset.
  std::optional<Configuration> subset_generator;
  std::int64_t period = 16;
  // SS kinds only: overrides the meta-queue mapping implied by the kind.
  std::optional<MetaQueueMapping> gamma;
  // RS kinds: subset probabilities. Computed from the load when unset.
  std::optional<BVDecomposition> decomposition;
  std::uint64_t seed = 0;
};

// Display label such as "MSL-pSEL(16)" or "LLF-SS[l=2]".
std::string policy_label(const PolicySpec& spec);

class Policy {
 public:
  explicit Policy(PolicySpec spec) : spec_(std::move(spec)) {}
  virtual ~Policy() = default;

  // Decision for slot t (0-based) in state d with target bits x.
  virtual PartialConfiguration decide(const DeviationVector& d, std::span<const Bit> x,
                                      std::int64_t t) = 0;

  const PolicySpec& spec() const { return spec_; }
  std::string name() const { return policy_label(spec_); }

 private:
  PolicySpec spec_;
};

// RS kinds need either spec.decomposition or an admissible load; a missing
// or inadmissible load raises DomainError.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, int n,
                                    const LoadMatrix* load = nullptr);

}  // namespace stc
