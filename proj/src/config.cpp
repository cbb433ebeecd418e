#include "stc/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "stc/detail/matching.hpp"

namespace stc {
namespace {

constexpr int kMaxEnumerationN = 8;

void check_enumerable(int n) {
  if (n < 1) throw ArgumentError("switch size must be positive");
  if (n > kMaxEnumerationN) {
    throw CapabilityError("configuration enumeration supports N <= 8");
  }
}

}  // namespace

Configuration::Configuration(std::vector<int> perm) : perm_(std::move(perm)) {
  const int n = static_cast<int>(perm_.size());
  if (n < 1) throw ArgumentError("configuration needs at least one port");
  std::vector<char> used(perm_.size(), 0);
  for (int out : perm_) {
    if (out < 0 || out >= n || used[static_cast<std::size_t>(out)]) {
      throw ArgumentError("configuration must be a permutation of the output ports");
    }
    used[static_cast<std::size_t>(out)] = 1;
  }
}

Configuration Configuration::identity(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return Configuration(std::move(p));
}

Configuration Configuration::from_vector(int n, std::span<const Bit> v) {
  if (v.size() != static_cast<std::size_t>(n) * n) {
    throw DimensionError("configuration vector must have N^2 entries");
  }
  std::vector<int> perm(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (v[static_cast<std::size_t>(i) * n + j] == 0) continue;
      if (perm[static_cast<std::size_t>(i)] >= 0) {
        throw ArgumentError("configuration vector has two ones in one input block");
      }
      perm[static_cast<std::size_t>(i)] = j;
    }
    if (perm[static_cast<std::size_t>(i)] < 0) {
      throw ArgumentError("configuration vector leaves an input unconnected");
    }
  }
  return Configuration(std::move(perm));
}

std::size_t Configuration::voq_at(int input) const {
  return static_cast<std::size_t>(input) * perm_.size() +
         static_cast<std::size_t>(perm_[static_cast<std::size_t>(input)]);
}

BitVector Configuration::as_vector() const {
  BitVector v(perm_.size() * perm_.size(), 0);
  for (int i = 0; i < n(); ++i) v[voq_at(i)] = 1;
  return v;
}

std::vector<Configuration> all_configurations(int n) {
  check_enumerable(n);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Configuration> out;
  do {
    out.emplace_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<std::size_t> served_voqs(const Configuration& c) {
  std::vector<std::size_t> out(static_cast<std::size_t>(c.n()));
  for (int i = 0; i < c.n(); ++i) out[static_cast<std::size_t>(i)] = c.voq_at(i);
  return out;
}

Configuration circular_shift(const Configuration& c) {
  const auto& p = c.perm();
  const std::size_t n = p.size();
  std::vector<int> shifted(n);
  shifted[0] = p[n - 1];
  for (std::size_t i = 1; i < n; ++i) shifted[i] = p[i - 1];
  return Configuration(std::move(shifted));
}

Configuration circular_shift(const Configuration& c, int times) {
  const int n = c.n();
  const int k = ((times % n) + n) % n;
  const auto& p = c.perm();
  std::vector<int> shifted(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    shifted[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(((i - k) % n + n) % n)];
  }
  return Configuration(std::move(shifted));
}

PartialConfiguration::PartialConfiguration(Configuration base, BitVector served)
    : base_(std::move(base)), served_(std::move(served)) {
  if (served_.size() != static_cast<std::size_t>(base_.n())) {
    throw DimensionError("served mask must have one entry per input");
  }
  for (Bit b : served_) {
    if (b > 1) throw ArgumentError("served mask entries must be 0 or 1");
  }
}

PartialConfiguration PartialConfiguration::complete(Configuration base) {
  BitVector mask(static_cast<std::size_t>(base.n()), 1);
  return {std::move(base), std::move(mask)};
}

PartialConfiguration PartialConfiguration::idle(Configuration base) {
  BitVector mask(static_cast<std::size_t>(base.n()), 0);
  return {std::move(base), std::move(mask)};
}

std::size_t PartialConfiguration::served_count() const {
  return static_cast<std::size_t>(std::count(served_.begin(), served_.end(), Bit{1}));
}

BitVector PartialConfiguration::as_vector() const {
  BitVector v(static_cast<std::size_t>(n()) * n(), 0);
  for (int i = 0; i < n(); ++i) {
    if (serves_input(i)) v[base_.voq_at(i)] = 1;
  }
  return v;
}

std::vector<std::size_t> PartialConfiguration::served_voqs() const {
  std::vector<std::size_t> out;
  for (int i = 0; i < n(); ++i) {
    if (serves_input(i)) out.push_back(base_.voq_at(i));
  }
  return out;
}

ConfigurationSubset::ConfigurationSubset(Configuration generator)
    : generator_(std::move(generator)) {
  const int n = generator_.n();
  members_.reserve(static_cast<std::size_t>(n));
  members_.push_back(generator_);
  for (int k = 1; k < n; ++k) members_.push_back(circular_shift(members_.back()));
  inverse_.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) inverse_[static_cast<std::size_t>(generator_.output_of(i))] = i;
}

std::size_t ConfigurationSubset::member_serving(std::size_t voq) const {
  const int n = this->n();
  const int input = static_cast<int>(voq / static_cast<std::size_t>(n));
  const int output = static_cast<int>(voq % static_cast<std::size_t>(n));
  // C^k(v) connects input i to v.perm[(i - k) mod N].
  const int source = inverse_[static_cast<std::size_t>(output)];
  return static_cast<std::size_t>(((input - source) % n + n) % n);
}

bool ConfigurationSubset::contains(const Configuration& c) const {
  if (c.n() != n()) return false;
  const std::size_t k = member_serving(c.voq_at(0));
  return members_[k] == c;
}

const Configuration& ConfigurationSubset::representative() const {
  return members_[member_serving(static_cast<std::size_t>(0))];
}

ConfigurationSubset generate_subset(const Configuration& v) { return ConfigurationSubset(v); }

std::vector<ConfigurationSubset> partition_into_subsets(int n) {
  check_enumerable(n);
  // Representatives are exactly the permutations fixing input 0 -> output 0.
  std::vector<int> rest(static_cast<std::size_t>(n - 1));
  std::iota(rest.begin(), rest.end(), 1);
  std::vector<ConfigurationSubset> out;
  do {
    std::vector<int> perm{0};
    perm.insert(perm.end(), rest.begin(), rest.end());
    out.emplace_back(Configuration(std::move(perm)));
  } while (std::next_permutation(rest.begin(), rest.end()));
  return out;
}

LoadMatrix::LoadMatrix(int n) : n_(n), rates_(static_cast<std::size_t>(n) * n, 0.0) {
  if (n < 1) throw ArgumentError("switch size must be positive");
}

LoadMatrix::LoadMatrix(int n, std::vector<double> rates) : n_(n), rates_(std::move(rates)) {
  if (n < 1) throw ArgumentError("switch size must be positive");
  if (rates_.size() != static_cast<std::size_t>(n) * n) {
    throw DimensionError("load matrix must have N^2 entries");
  }
}

double LoadMatrix::row_sum(int input) const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) s += (*this)(input, j);
  return s;
}

double LoadMatrix::column_sum(int output) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += (*this)(i, output);
  return s;
}

double LoadMatrix::max_line_sum() const {
  double m = 0.0;
  for (int k = 0; k < n_; ++k) m = std::max({m, row_sum(k), column_sum(k)});
  return m;
}

Admissibility is_admissible(const LoadMatrix& m) {
  for (double r : m.rates()) {
    if (std::isnan(r) || r < 0.0) throw ArgumentError("load rates must be non-negative");
  }
  const double peak = m.max_line_sum();
  return {peak < 1.0, 1.0 - peak};
}

double BVDecomposition::total() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.coefficient;
  return s;
}

std::vector<double> BVDecomposition::dominating_matrix() const {
  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
  for (const auto& t : terms) {
    for (int i = 0; i < n; ++i) out[t.config.voq_at(i)] += t.coefficient;
  }
  return out;
}

std::vector<double> BVDecomposition::reconstruct() const {
  auto out = dominating_matrix();
  for (std::size_t q = 0; q < out.size(); ++q) out[q] -= slack[q];
  return out;
}

BVDecomposition bv_decompose(const LoadMatrix& m) {
  const auto adm = is_admissible(m);
  if (!adm.admissible) throw DomainError("BV decomposition requires an admissible load");

  const int n = m.n();
  const auto nn = static_cast<std::size_t>(n) * n;
  BVDecomposition out;
  out.n = n;
  out.slack.assign(nn, 0.0);

  const double peak = m.max_line_sum();
  if (peak <= 0.0) return out;

  // Complete to a matrix whose line sums all equal the peak line sum.
  std::vector<double> row_gap(static_cast<std::size_t>(n)), col_gap(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    row_gap[static_cast<std::size_t>(k)] = std::max(0.0, peak - m.row_sum(k));
    col_gap[static_cast<std::size_t>(k)] = std::max(0.0, peak - m.column_sum(k));
  }
  const double gap_eps = 1e-15;
  for (int i = 0, j = 0; i < n && j < n;) {
    const double amount = std::min(row_gap[static_cast<std::size_t>(i)],
                                   col_gap[static_cast<std::size_t>(j)]);
    out.slack[static_cast<std::size_t>(i) * n + j] += amount;
    row_gap[static_cast<std::size_t>(i)] -= amount;
    col_gap[static_cast<std::size_t>(j)] -= amount;
    if (row_gap[static_cast<std::size_t>(i)] <= gap_eps) ++i;
    if (i < n && col_gap[static_cast<std::size_t>(j)] <= gap_eps) ++j;
  }

  std::vector<double> work(nn);
  for (std::size_t q = 0; q < nn; ++q) work[q] = m.rates()[q] + out.slack[q];

  // Entries below this are treated as exhausted.
  const double zero_eps = 1e-13;
  std::vector<char> support(nn);
  while (true) {
    for (std::size_t q = 0; q < nn; ++q) support[q] = work[q] > zero_eps ? 1 : 0;
    const auto matching = detail::lex_min_perfect_matching(n, support);
    if (!matching) break;
    double coef = 1.0;
    for (int i = 0; i < n; ++i) {
      coef = std::min(coef, work[static_cast<std::size_t>(i) * n + (*matching)[static_cast<std::size_t>(i)]]);
    }
    for (int i = 0; i < n; ++i) {
      auto& w = work[static_cast<std::size_t>(i) * n + (*matching)[static_cast<std::size_t>(i)]];
      w -= coef;
      if (w <= zero_eps) w = 0.0;
    }
    out.terms.push_back({coef, Configuration(*matching)});
  }

  const double total = out.total();
  std::map<Configuration, double> by_subset;
  for (const auto& t : out.terms) {
    by_subset[generate_subset(t.config).representative()] += t.coefficient;
  }
  for (const auto& [rep, mass] : by_subset) {
    out.subset_probs.push_back({generate_subset(rep), mass / total});
  }
  return out;
}

}  // namespace stc
