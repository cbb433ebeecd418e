#pragma once

// Switch configurations, the circular shift operator, configuration subsets,
// load admissibility and Birkhoff-von Neumann decomposition.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stc/core.hpp"

namespace stc {

// A complete configuration: input i is connected to output perm[i].
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<int> perm);

  static Configuration identity(int n);
  // Inverse of as_vector(); throws if v is not a permutation vector.
  static Configuration from_vector(int n, std::span<const Bit> v);

  int n() const { return static_cast<int>(perm_.size()); }
  const std::vector<int>& perm() const { return perm_; }
  int output_of(int input) const { return perm_[static_cast<std::size_t>(input)]; }
  // VOQ index served at the given input: input * N + perm[input].
  std::size_t voq_at(int input) const;

  // Binary vector of length N^2 with ones at the served VOQs.
  BitVector as_vector() const;

  // Sum of weights over the N served VOQs.
  template <class T>
  T inner(std::span<const T> weights) const {
    T s{};
    for (int i = 0; i < n(); ++i) s += weights[voq_at(i)];
    return s;
  }

  friend auto operator<=>(const Configuration&, const Configuration&) = default;

 private:
  std::vector<int> perm_;
};

// All N! configurations in lexicographic order of perm. N <= 8.
std::vector<Configuration> all_configurations(int n);

// The N VOQ indices with a one in c.as_vector(), ordered by input.
std::vector<std::size_t> served_voqs(const Configuration& c);

// C(v): input i takes the output input i-1 had; input 0 takes the last one.
Configuration circular_shift(const Configuration& c);
Configuration circular_shift(const Configuration& c, int times);

// A configuration with some of its connected VOQs idled. served[i] refers to
// the VOQ at input i of base.
class PartialConfiguration {
 public:
  PartialConfiguration() = default;
  PartialConfiguration(Configuration base, BitVector served);

  static PartialConfiguration complete(Configuration base);
  static PartialConfiguration idle(Configuration base);

  int n() const { return base_.n(); }
  const Configuration& base() const { return base_; }
  const BitVector& served_mask() const { return served_; }
  bool serves_input(int input) const { return served_[static_cast<std::size_t>(input)] != 0; }
  std::size_t served_count() const;
  bool is_idle() const { return served_count() == 0; }
  bool is_complete() const { return served_count() == static_cast<std::size_t>(n()); }

  BitVector as_vector() const;
  std::vector<std::size_t> served_voqs() const;

  friend bool operator==(const PartialConfiguration&, const PartialConfiguration&) = default;

 private:
  Configuration base_;
  BitVector served_;
};

// The N-member orbit {C^0(v), ..., C^{N-1}(v)} of a generator v.
class ConfigurationSubset {
 public:
  ConfigurationSubset() = default;
  explicit ConfigurationSubset(Configuration generator);

  int n() const { return generator_.n(); }
  const Configuration& generator() const { return generator_; }
  const std::vector<Configuration>& members() const { return members_; }
  const Configuration& member(std::size_t k) const { return members_[k]; }
  std::size_t size() const { return members_.size(); }

  // Index k of the unique member serving the given VOQ.
  std::size_t member_serving(std::size_t voq) const;
  bool contains(const Configuration& c) const;
  // The member with perm[0] == 0; identical for every generator of the orbit.
  const Configuration& representative() const;

 private:
  Configuration generator_;
  std::vector<Configuration> members_;
  std::vector<int> inverse_;  // generator output -> input
};

ConfigurationSubset generate_subset(const Configuration& v);

// The (N-1)! disjoint subsets covering all N! configurations, ordered by
// representative. N <= 8.
std::vector<ConfigurationSubset> partition_into_subsets(int n);

// Rate lambda_ij of the stream from input i to output j, row-major.
class LoadMatrix {
 public:
  LoadMatrix() = default;
  explicit LoadMatrix(int n);
  LoadMatrix(int n, std::vector<double> rates);

  int n() const { return n_; }
  double operator()(int input, int output) const {
    return rates_[static_cast<std::size_t>(input) * n_ + output];
  }
  double& operator()(int input, int output) {
    return rates_[static_cast<std::size_t>(input) * n_ + output];
  }
  const std::vector<double>& rates() const { return rates_; }
  double row_sum(int input) const;
  double column_sum(int output) const;
  double max_line_sum() const;

 private:
  int n_ = 0;
  std::vector<double> rates_;
};

struct Admissibility {
  bool admissible = false;
  // 1 - max(row sums, column sums).
  double margin = 0.0;
};

Admissibility is_admissible(const LoadMatrix& m);

struct BVTerm {
  double coefficient = 0.0;
  Configuration config;
};

struct SubsetProbability {
  ConfigurationSubset subset;
  double probability = 0.0;
};

// sum_k coefficient_k * config_k == load + slack, with slack >= 0 chosen so
// every row and column sum of load + slack equals total(). slack vanishes
// exactly when all line sums of the load already agree.
struct BVDecomposition {
  int n = 0;
  std::vector<BVTerm> terms;
  std::vector<double> slack;  // N x N row-major
  std::vector<SubsetProbability> subset_probs;

  double total() const;
  // sum_k coefficient_k * config_k.
  std::vector<double> dominating_matrix() const;
  // dominating_matrix() - slack; equals the decomposed load.
  std::vector<double> reconstruct() const;
};

inline constexpr double kBvTolerance = 1e-9;

// Throws DomainError for an inadmissible load.
BVDecomposition bv_decompose(const LoadMatrix& m);

}  // namespace stc
