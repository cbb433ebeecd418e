#include "stc/core.hpp"

#include <algorithm>
#include <sstream>

namespace stc {

double to_double(const Cost& c) {
  return static_cast<double>(c.numerator()) / static_cast<double>(c.denominator());
}

std::vector<Deviation> trace_deviation(const ServiceTrace& service,
                                       const TargetProfile& target) {
  const std::size_t len = std::min(service.size(), target.size());
  std::vector<Deviation> d(len);
  for (std::size_t t = 0; t < len; ++t) {
    d[t] = service.cumulative()[t] - target.cumulative()[t];
  }
  return d;
}

DeviationVector::DeviationVector(int n) : n_(n) {
  if (n < 1) throw ArgumentError("switch size must be positive");
  values_.assign(static_cast<std::size_t>(n) * n, 0);
}

DeviationVector::DeviationVector(int n, std::vector<Deviation> values)
    : n_(n), values_(std::move(values)) {
  if (n < 1) throw ArgumentError("switch size must be positive");
  if (values_.size() != static_cast<std::size_t>(n) * n) {
    throw DimensionError("deviation vector must have N^2 entries");
  }
}

Deviation DeviationVector::max() const {
  return values_.empty() ? 0 : *std::max_element(values_.begin(), values_.end());
}

Deviation DeviationVector::min() const {
  return values_.empty() ? 0 : *std::min_element(values_.begin(), values_.end());
}

CostFunction CostFunction::quadratic() { return {Kind::Quadratic, 1, 0}; }

CostFunction CostFunction::weighted_quadratic(Cost weight) {
  if (weight <= 0) throw ArgumentError("quadratic weight must be positive");
  return {Kind::WeightedQuadratic, weight, 0};
}

CostFunction CostFunction::absolute() { return {Kind::Absolute, 1, 1}; }

CostFunction CostFunction::asymmetric_linear(Cost c_lag, Cost c_lead) {
  if (c_lag <= 0 || c_lead <= 0) throw ArgumentError("linear slopes must be positive");
  return {Kind::AsymmetricLinear, c_lag, c_lead};
}

Cost CostFunction::operator()(Deviation k) const {
  switch (kind_) {
    case Kind::Quadratic:
      return Cost(k * k);
    case Kind::WeightedQuadratic:
      return a_ * Cost(k * k);
    case Kind::Absolute:
      return Cost(k < 0 ? -k : k);
    case Kind::AsymmetricLinear:
      return k < 0 ? a_ * Cost(-k) : b_ * Cost(k);
  }
  return Cost(0);
}

std::string CostFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Quadratic:
      os << "quadratic";
      break;
    case Kind::WeightedQuadratic:
      os << "weighted-quadratic(" << a_ << ")";
      break;
    case Kind::Absolute:
      os << "absolute";
      break;
    case Kind::AsymmetricLinear:
      os << "asymmetric-linear(" << a_ << "," << b_ << ")";
      break;
  }
  return os.str();
}

CostVector uniform_costs(std::size_t count, const CostFunction& phi) {
  return CostVector(count, phi);
}

DeviationVector step_deviation(const DeviationVector& d, std::span<const Bit> served,
                               std::span<const Bit> x) {
  if (served.size() != d.size() || x.size() != d.size()) {
    throw DimensionError("step_deviation: vectors must all have N^2 entries");
  }
  DeviationVector next = d;
  for (std::size_t q = 0; q < d.size(); ++q) {
    next[q] += static_cast<Deviation>(served[q]) - static_cast<Deviation>(x[q]);
  }
  return next;
}

Cost total_cost(std::span<const Deviation> d, const CostVector& costs) {
  if (d.size() != costs.size()) throw DimensionError("total_cost: one cost per VOQ required");
  Cost sum(0);
  for (std::size_t q = 0; q < d.size(); ++q) sum += costs[q](d[q]);
  return sum;
}

Cost total_cost(const DeviationVector& d, const CostVector& costs) {
  return total_cost(d.values(), costs);
}

std::vector<Deviation> updated_deviation(const DeviationVector& d, std::span<const Bit> x) {
  if (x.size() != d.size()) throw DimensionError("updated_deviation: x must have N^2 entries");
  std::vector<Deviation> u(d.size());
  for (std::size_t q = 0; q < d.size(); ++q) u[q] = d[q] - static_cast<Deviation>(x[q]);
  return u;
}

}  // namespace stc
