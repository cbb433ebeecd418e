#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stc/assignment.hpp"
#include "stc/cli/commands.hpp"
#include "stc/config.hpp"
#include "stc/dp.hpp"
#include "stc/policies.hpp"
#include "stc/sim.hpp"

namespace py = pybind11;
using namespace stc;

namespace {

double cost_value(const Cost& c) { return to_double(c); }

py::tuple partial_tuple(const PartialConfiguration& pc) {
  return py::make_tuple(pc.base().perm(), pc.served_mask());
}

PolicySpec make_spec(const std::string& kind, Deviation ell, std::optional<std::vector<int>> subset,
                     std::int64_t period) {
  PolicySpec ps;
  ps.kind = parse_policy_kind(kind);
  ps.lead_cap = ell;
  ps.period = period;
  if (subset) ps.subset_generator = Configuration(*subset);
  return ps;
}

py::dict summary_dict(const RunResult& r) {
  py::dict d;
  d["policy"] = r.policy_name;
  d["avg_dev"] = r.summary.avg_dev;
  d["avg_var"] = r.summary.avg_var;
  d["cross_var"] = r.summary.cross_var;
  d["max_dev"] = r.summary.max_dev;
  d["min_dev"] = r.summary.min_dev;
  d["avg_lag_sum"] = r.summary.avg_lag_sum;
  d["diverged"] = r.summary.diverged;
  d["services"] = r.services;
  d["target_totals"] = r.target_totals;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Service trace control policies, dynamic programs and switch simulation";

  py::register_exception<Error>(m, "StcError");

  m.def("circular_shift", [](const std::vector<int>& perm, int times) {
    return circular_shift(Configuration(perm), times).perm();
  }, py::arg("perm"), py::arg("times") = 1);

  m.def("subset_members", [](const std::vector<int>& perm) {
    std::vector<std::vector<int>> out;
    const auto subset = generate_subset(Configuration(perm));
    for (const auto& c : subset.members()) out.push_back(c.perm());
    return out;
  }, py::arg("generator"), "Members C^0(v)..C^{N-1}(v) as permutations.");

  m.def("partition_into_subsets", [](int n) {
    std::vector<std::vector<int>> reps;
    for (const auto& s : partition_into_subsets(n)) reps.push_back(s.representative().perm());
    return reps;
  }, py::arg("n"), "Representatives of the (N-1)! disjoint subsets.");

  m.def("min_weight_assignment", [](const std::vector<std::vector<std::int64_t>>& rows) {
    return min_weight_assignment(WeightMatrix::from_rows(rows)).perm();
  }, py::arg("weights"));

  m.def("is_admissible", [](int n, const std::vector<double>& rates) {
    const auto a = is_admissible(LoadMatrix(n, rates));
    return py::make_tuple(a.admissible, a.margin);
  }, py::arg("n"), py::arg("rates"));

  m.def("bv_decompose", [](int n, const std::vector<double>& rates) {
    const auto bv = bv_decompose(LoadMatrix(n, rates));
    py::list terms;
    for (const auto& t : bv.terms) terms.append(py::make_tuple(t.coefficient, t.config.perm()));
    py::list subsets;
    for (const auto& s : bv.subset_probs) {
      subsets.append(py::make_tuple(s.subset.representative().perm(), s.probability));
    }
    py::dict d;
    d["terms"] = terms;
    d["slack"] = bv.slack;
    d["subsets"] = subsets;
    d["reconstruction"] = bv.reconstruct();
    return d;
  }, py::arg("n"), py::arg("rates"));

  m.def("msl_decide", [](int n, const std::vector<Deviation>& d, const BitVector& x, Deviation ell) {
    return partial_tuple(msl_decide(DeviationVector(n, d), x, ell));
  }, py::arg("n"), py::arg("d"), py::arg("x"), py::arg("ell") = 0,
     "Returns (permutation, served mask).");

  m.def("msl_ss_decide", [](int n, const std::vector<Deviation>& d, const BitVector& x,
                            const std::vector<int>& generator, Deviation ell) {
    return partial_tuple(msl_ss_decide(DeviationVector(n, d), x, generate_subset(Configuration(generator)), ell));
  }, py::arg("n"), py::arg("d"), py::arg("x"), py::arg("generator"), py::arg("ell") = 0);

  m.def("llf_ss_decide", [](int n, const std::vector<Deviation>& d, const BitVector& x,
                            const std::vector<int>& generator, Deviation ell) {
    return partial_tuple(llf_ss_decide(DeviationVector(n, d), x, generate_subset(Configuration(generator)), ell));
  }, py::arg("n"), py::arg("d"), py::arg("x"), py::arg("generator"), py::arg("ell") = 0);

  m.def("switch_dp", [](int n, const std::vector<BitVector>& targets, bool allow_idle) {
    SwitchDPProblem p;
    p.n = n;
    p.horizon = targets.empty() ? 0 : static_cast<std::int64_t>(targets.front().size());
    p.targets = targets;
    p.costs = uniform_costs(targets.size(), CostFunction::quadratic());
    p.allow_idle = allow_idle;
    return py::make_tuple(cost_value(solve_switch_dp(p).optimal_cost()),
                          cost_value(myopic_rollout_cost(p)));
  }, py::arg("n"), py::arg("targets"), py::arg("allow_idle") = true,
     "Quadratic-cost optimum and myopic rollout cost.");

  m.def("dp_regions", [](int n, std::int64_t horizon, std::int64_t slot,
                         const std::vector<std::optional<std::int64_t>>& fixed, double p,
                         std::uint64_t seed) {
    cli::RegionParams rp;
    rp.n = n;
    rp.horizon = horizon;
    rp.slot = slot;
    rp.fixed = fixed;
    rp.p = p;
    rp.seed = seed;
    const auto s = solve_server_dp(cli::make_region_problem(rp));
    std::vector<std::tuple<std::int64_t, std::int64_t, int>> cells;
    for (const auto& c : decision_region_slice(s, slot, fixed).cells) cells.emplace_back(c.a, c.b, c.action);
    return cells;
  }, py::arg("n"), py::arg("horizon"), py::arg("slot"), py::arg("fixed"), py::arg("p"),
     py::arg("seed") = 1);

  m.def("simulate", [](const std::string& load, int n, std::int64_t horizon, double lambda1,
                       double lambda2, const std::string& policy, Deviation ell,
                       std::optional<std::vector<int>> subset, std::int64_t period,
                       std::uint64_t seed) {
    const PolicySpec ps = make_spec(policy, ell, subset, period);
    Scenario s;
    switch (parse_scenario_kind(load)) {
      case ScenarioKind::UniformIid:
        s = uniform_iid_scenario(n, horizon, lambda1, ps, seed);
        break;
      case ScenarioKind::ParallelHeavy:
        s = parallel_heavy_scenario(n, horizon, lambda1, lambda2, ps, seed);
        break;
      case ScenarioKind::CrossHeavy:
        s = cross_heavy_scenario(n, horizon, lambda1, lambda2, ps, seed);
        break;
      case ScenarioKind::UniformPeriodic:
        s = uniform_periodic_scenario(n, horizon, static_cast<std::int64_t>(lambda1), ps, seed);
        break;
      case ScenarioKind::Custom:
        throw ArgumentError("use simulate_matrix for custom loads");
    }
    s.keep_series = false;
    py::gil_scoped_release release;
    const RunResult r = run(s);
    py::gil_scoped_acquire acquire;
    return summary_dict(r);
  }, py::arg("load"), py::arg("n"), py::arg("horizon"), py::arg("lambda1"),
     py::arg("lambda2") = 0.0, py::arg("policy") = "MSL", py::arg("ell") = 0,
     py::arg("subset") = py::none(), py::arg("period") = 16, py::arg("seed") = 1,
     "lambda1 is lambda for uniform-iid and delta for uniform-periodic.");

  m.def("simulate_matrix", [](int n, const std::vector<double>& rates, std::int64_t horizon,
                              const std::string& policy, Deviation ell,
                              std::optional<std::vector<int>> subset, std::uint64_t seed) {
    Scenario s = load_matrix_scenario(LoadMatrix(n, rates), horizon, make_spec(policy, ell, subset, 16), seed);
    s.keep_series = false;
    return summary_dict(run(s));
  }, py::arg("n"), py::arg("rates"), py::arg("horizon"), py::arg("policy") = "MSL",
     py::arg("ell") = 0, py::arg("subset") = py::none(), py::arg("seed") = 1);

  m.def("verify", [](const std::string& level) {
    std::ostringstream report, err;
    const int code = cli::cmd_verify(level == "full" ? cli::VerifyLevel::Full : cli::VerifyLevel::Fast,
                                     {}, report, err);
    return py::make_tuple(code, report.str());
  }, py::arg("level") = "fast", "Returns (exit code, JSON report).");

  m.def("main", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv{"stc"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the command line tool in-process: (code, stdout, stderr).");
}
