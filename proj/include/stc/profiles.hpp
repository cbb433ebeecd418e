#pragma once

// Target stream profile generators.

#include <cstdint>
#include <filesystem>
#include <random>
#include <variant>
#include <vector>

#include "stc/core.hpp"

namespace stc {

// Emits 1 at slots t (1-based) with t > offset and (t - offset) % period == 0.
struct PeriodicSpec {
  std::int64_t period = 1;
  std::int64_t offset = 0;
};

// i.i.d. Bernoulli(rate) entries.
struct BernoulliSpec {
  double rate = 0.0;
};

// Markov-modulated Bernoulli. In state k the slot bit is Bernoulli(state_rates[k]);
// after emitting, the chain moves according to row k of the row-major
// transition matrix. No defaults: every parameter is explicit.
struct MmbSpec {
  std::vector<double> state_rates;
  std::vector<double> transition;
  std::size_t initial_state = 0;
};

// A fixed bit list; zeros after it runs out.
struct ExplicitSpec {
  BitVector bits;
};

using ProfileSpec = std::variant<PeriodicSpec, BernoulliSpec, MmbSpec, ExplicitSpec>;

// Long-run rate of the profile (stationary rate for MMB).
double nominal_rate(const ProfileSpec& spec);

// Seeds one generator from (master seed, stream index, purpose tag) so every
// VOQ has its own reproducible stream regardless of iteration order.
std::mt19937_64 make_stream_rng(std::uint64_t master_seed, std::uint64_t stream,
                                std::uint64_t tag = 0);

// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(std::mt19937_64& rng);

class ProfileGenerator {
 public:
  ProfileGenerator(ProfileSpec spec, std::uint64_t seed);

  Bit next_bit();
  BitVector take(std::size_t count);
  const ProfileSpec& spec() const { return spec_; }

 private:
  ProfileSpec spec_;
  std::mt19937_64 rng_;
  std::int64_t slot_ = 0;  // slots emitted so far
  std::size_t mmb_state_ = 0;
};

// Running sum of a bit sequence.
std::vector<std::int64_t> cumulative_prefix(std::span<const Bit> bits);

// S^T / T. Throws ArgumentError on an empty sequence.
double empirical_rate(std::span<const Bit> bits);

// One line per VOQ of '0'/'1' characters. Blank lines and lines starting with
// '#' are skipped.
std::vector<BitVector> load_profile_file(const std::filesystem::path& path);
std::vector<BitVector> parse_profile_text(const std::string& text);

}  // namespace stc
