#pragma once

// Fundamental state types shared by the policies, the dynamic programs and
// the simulator.
//
// VOQ indexing: VOQ q (0-based) buffers traffic from input q / N to output
// q % N. Internally every index is 0-based.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "stc/errors.hpp"

namespace stc {

using Deviation = std::int64_t;
using Bit = std::uint8_t;
using BitVector = std::vector<Bit>;

// Exact cost values. Quadratic and absolute costs stay integral; weighted
// kinds carry rational weights.
using Cost = boost::rational<std::int64_t>;

double to_double(const Cost& c);

namespace detail {
struct TargetTag {};
struct ServiceTag {};
}  // namespace detail

// A binary per-slot sequence together with its running sum. Slot t (1-based
// in the literature) is element t-1 here.
template <class Tag>
class BinaryTrace {
 public:
  BinaryTrace() = default;
  explicit BinaryTrace(BitVector bits) : bits_(std::move(bits)) {
    cumulative_.reserve(bits_.size());
    std::int64_t running = 0;
    for (Bit b : bits_) {
      if (b > 1) throw ArgumentError("trace entries must be 0 or 1");
      running += b;
      cumulative_.push_back(running);
    }
  }

  const BitVector& bits() const { return bits_; }
  const std::vector<std::int64_t>& cumulative() const { return cumulative_; }
  std::size_t size() const { return bits_.size(); }

 private:
  BitVector bits_;
  std::vector<std::int64_t> cumulative_;
};

// Desired outflow profile of a stream (s, S).
using TargetProfile = BinaryTrace<detail::TargetTag>;
// Actual service received by a stream (r, R).
using ServiceTrace = BinaryTrace<detail::ServiceTag>;

// R^t - S^t over the common prefix of the two traces.
std::vector<Deviation> trace_deviation(const ServiceTrace& service,
                                       const TargetProfile& target);

// Per-VOQ deviations of an N x N switch: the switch state d.
class DeviationVector {
 public:
  DeviationVector() = default;
  explicit DeviationVector(int n);
  DeviationVector(int n, std::vector<Deviation> values);

  int n() const { return n_; }
  std::size_t size() const { return values_.size(); }
  Deviation operator[](std::size_t q) const { return values_[q]; }
  Deviation& operator[](std::size_t q) { return values_[q]; }
  std::span<const Deviation> values() const { return values_; }
  std::span<Deviation> values() { return values_; }

  Deviation max() const;
  Deviation min() const;

  friend bool operator==(const DeviationVector&, const DeviationVector&) = default;

 private:
  int n_ = 0;
  std::vector<Deviation> values_;
};

// Deviation cost phi(k). All kinds are zero at zero, non-negative, and
// discrete-convex.
class CostFunction {
 public:
  enum class Kind { Quadratic, WeightedQuadratic, Absolute, AsymmetricLinear };

  static CostFunction quadratic();
  static CostFunction weighted_quadratic(Cost weight);
  static CostFunction absolute();
  // c_lag * |k| for k < 0, c_lead * k for k > 0.
  static CostFunction asymmetric_linear(Cost c_lag, Cost c_lead);

  Kind kind() const { return kind_; }
  Cost operator()(Deviation k) const;
  std::string describe() const;

 private:
  CostFunction(Kind kind, Cost a, Cost b) : kind_(kind), a_(a), b_(b) {}
  Kind kind_;
  Cost a_;
  Cost b_;
};

using CostVector = std::vector<CostFunction>;

CostVector uniform_costs(std::size_t count, const CostFunction& phi);

// d + served - x, elementwise.
DeviationVector step_deviation(const DeviationVector& d, std::span<const Bit> served,
                               std::span<const Bit> x);

// Sum_q phi_q(d_q).
Cost total_cost(std::span<const Deviation> d, const CostVector& costs);
Cost total_cost(const DeviationVector& d, const CostVector& costs);

// d - x: the quantity every decision rule reads.
std::vector<Deviation> updated_deviation(const DeviationVector& d, std::span<const Bit> x);

}  // namespace stc
