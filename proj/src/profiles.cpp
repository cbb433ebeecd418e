#include "stc/profiles.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace stc {
namespace {

void validate(const PeriodicSpec& p) {
  if (p.period < 1) throw ArgumentError("periodic profile needs period >= 1");
  if (p.offset < 0) throw ArgumentError("periodic profile needs offset >= 0");
}

void validate(const BernoulliSpec& b) {
  if (!(b.rate >= 0.0 && b.rate <= 1.0)) throw ArgumentError("bernoulli rate must lie in [0, 1]");
}

void validate(const MmbSpec& m) {
  const std::size_t k = m.state_rates.size();
  if (k == 0) throw ArgumentError("MMB profile needs at least one state");
  if (m.transition.size() != k * k) throw DimensionError("MMB transition matrix must be K x K");
  if (m.initial_state >= k) throw ArgumentError("MMB initial state out of range");
  for (double r : m.state_rates) {
    if (!(r >= 0.0 && r <= 1.0)) throw ArgumentError("MMB state rates must lie in [0, 1]");
  }
  for (std::size_t i = 0; i < k; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double p = m.transition[i * k + j];
      if (p < 0.0) throw ArgumentError("MMB transition probabilities must be non-negative");
      row += p;
    }
    if (std::abs(row - 1.0) > 1e-9) throw ArgumentError("MMB transition rows must sum to 1");
  }
}

void validate(const ExplicitSpec& e) {
  for (Bit b : e.bits) {
    if (b > 1) throw ArgumentError("explicit profile bits must be 0 or 1");
  }
}

// Stationary distribution by power iteration; adequate for the small chains
// used in scenario files.
std::vector<double> stationary(const MmbSpec& m) {
  const std::size_t k = m.state_rates.size();
  std::vector<double> pi(k, 1.0 / static_cast<double>(k));
  std::vector<double> next(k);
  for (int iter = 0; iter < 100000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) next[j] += pi[i] * m.transition[i * k + j];
    }
    double diff = 0.0;
    for (std::size_t j = 0; j < k; ++j) diff += std::abs(next[j] - pi[j]);
    // Average with the previous iterate so periodic chains still converge.
    for (std::size_t j = 0; j < k; ++j) pi[j] = 0.5 * (pi[j] + next[j]);
    if (diff < 1e-15) break;
  }
  return pi;
}

}  // namespace

double nominal_rate(const ProfileSpec& spec) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PeriodicSpec>) {
          return 1.0 / static_cast<double>(s.period);
        } else if constexpr (std::is_same_v<T, BernoulliSpec>) {
          return s.rate;
        } else if constexpr (std::is_same_v<T, MmbSpec>) {
          const auto pi = stationary(s);
          double r = 0.0;
          for (std::size_t i = 0; i < pi.size(); ++i) r += pi[i] * s.state_rates[i];
          return r;
        } else {
          if (s.bits.empty()) return 0.0;
          return static_cast<double>(std::accumulate(s.bits.begin(), s.bits.end(), 0)) /
                 static_cast<double>(s.bits.size());
        }
      },
      spec);
}

std::mt19937_64 make_stream_rng(std::uint64_t master_seed, std::uint64_t stream,
                                std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

ProfileGenerator::ProfileGenerator(ProfileSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), rng_(seed) {
  std::visit([](const auto& s) { validate(s); }, spec_);
  if (const auto* m = std::get_if<MmbSpec>(&spec_)) mmb_state_ = m->initial_state;
}

Bit ProfileGenerator::next_bit() {
  const std::int64_t t = ++slot_;
  return std::visit(
      [&](const auto& s) -> Bit {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PeriodicSpec>) {
          return (t > s.offset && (t - s.offset) % s.period == 0) ? 1 : 0;
        } else if constexpr (std::is_same_v<T, BernoulliSpec>) {
          return uniform01(rng_) < s.rate ? 1 : 0;
        } else if constexpr (std::is_same_v<T, MmbSpec>) {
          const Bit bit = uniform01(rng_) < s.state_rates[mmb_state_] ? 1 : 0;
          const std::size_t k = s.state_rates.size();
          if (k > 1) {
            const double u = uniform01(rng_);
            double acc = 0.0;
            std::size_t next = k - 1;
            for (std::size_t j = 0; j < k; ++j) {
              acc += s.transition[mmb_state_ * k + j];
              if (u < acc) {
                next = j;
                break;
              }
            }
            mmb_state_ = next;
          }
          return bit;
        } else {
          const auto idx = static_cast<std::size_t>(t - 1);
          return idx < s.bits.size() ? s.bits[idx] : Bit{0};
        }
      },
      spec_);
}

BitVector ProfileGenerator::take(std::size_t count) {
  BitVector out(count);
  for (auto& b : out) b = next_bit();
  return out;
}

std::vector<std::int64_t> cumulative_prefix(std::span<const Bit> bits) {
  std::vector<std::int64_t> out(bits.size());
  std::int64_t running = 0;
  for (std::size_t t = 0; t < bits.size(); ++t) {
    running += bits[t];
    out[t] = running;
  }
  return out;
}

double empirical_rate(std::span<const Bit> bits) {
  if (bits.empty()) throw ArgumentError("empirical_rate: empty sequence");
  std::int64_t ones = 0;
  for (Bit b : bits) ones += b;
  return static_cast<double>(ones) / static_cast<double>(bits.size());
}

std::vector<BitVector> parse_profile_text(const std::string& text) {
  std::vector<BitVector> profiles;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    BitVector bits;
    bits.reserve(line.size());
    for (char c : line) {
      if (c == '0' || c == '1') {
        bits.push_back(static_cast<Bit>(c - '0'));
      } else {
        throw ArgumentError("profile line " + std::to_string(lineno) +
                            ": expected only '0'/'1' characters");
      }
    }
    profiles.push_back(std::move(bits));
  }
  return profiles;
}

std::vector<BitVector> load_profile_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open profile file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_profile_text(buf.str());
}

}  // namespace stc
