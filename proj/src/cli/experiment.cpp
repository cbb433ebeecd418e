#include "stc/cli/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace stc::cli {
namespace {

struct RawValue {
  std::string text;
  int line = 0;
  int column = 0;
};

using Section = std::map<std::string, RawValue>;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "switch.n",      "horizon.t",    "policy.kind",   "policy.ell",       "policy.period",
      "policy.subset", "policy.gamma", "policy.weights", "load.kind",       "load.lambda",
      "load.lambda1",  "load.lambda2", "load.matrix",   "load.scale",       "period.delta",
      "mmb.rates",     "mmb.transition", "seed",        "sim.complete_only", "sim.windows"};
  return keys;
}

std::string trim(const std::string& s, std::size_t* lead = nullptr) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    if (lead) *lead = s.size();
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  if (lead) *lead = b;
  return s.substr(b, e - b + 1);
}

// Items of a comma-separated list with their columns.
std::vector<RawValue> split_list(const RawValue& v) {
  std::vector<RawValue> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.text.find(',', start);
    const std::string piece = v.text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t lead = 0;
    const std::string item = trim(piece, &lead);
    if (item.empty()) throw ParseError(v.line, v.column + static_cast<int>(start), "empty list item");
    out.push_back({item, v.line, v.column + static_cast<int>(start + lead)});
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const RawValue& v) {
  double x = 0.0;
  const auto* end = v.text.data() + v.text.size();
  const auto [ptr, ec] = std::from_chars(v.text.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ParseError(v.line, v.column, "expected a number, got '" + v.text + "'");
  return x;
}

std::int64_t to_int(const RawValue& v) {
  std::int64_t x = 0;
  const auto* end = v.text.data() + v.text.size();
  const auto [ptr, ec] = std::from_chars(v.text.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ParseError(v.line, v.column, "expected an integer, got '" + v.text + "'");
  return x;
}

bool to_bool(const RawValue& v) {
  if (v.text == "true" || v.text == "1" || v.text == "yes") return true;
  if (v.text == "false" || v.text == "0" || v.text == "no") return false;
  throw ParseError(v.line, v.column, "expected true or false, got '" + v.text + "'");
}

std::vector<double> doubles(const RawValue& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(item));
  return out;
}

// A vector of numbers separated by whitespace and/or commas (matrices, MMB
// parameters); not a sweep.
std::vector<double> number_vector(const RawValue& v) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < v.text.size()) {
    if (v.text[i] == ' ' || v.text[i] == '\t' || v.text[i] == ',') {
      ++i;
      continue;
    }
    const auto end = v.text.find_first_of(" \t,", i);
    const std::string item = v.text.substr(i, end == std::string::npos ? std::string::npos : end - i);
    out.push_back(to_double({item, v.line, v.column + static_cast<int>(i)}));
    if (end == std::string::npos) break;
    i = end;
  }
  if (out.empty()) throw ParseError(v.line, v.column, "expected a list of numbers");
  return out;
}

std::vector<std::int64_t> ints(const RawValue& v) {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(v)) out.push_back(to_int(item));
  return out;
}

// identity, cross, or a space-separated permutation such as "1 0 3 2".
Configuration parse_generator(const RawValue& v, int n) {
  if (v.text == "identity") return Configuration::identity(n);
  try {
    if (v.text == "cross") return cross_configuration(n);
    std::istringstream in(v.text);
    std::vector<int> perm;
    int k;
    while (in >> k) perm.push_back(k);
    if (!in.eof() || perm.size() != static_cast<std::size_t>(n)) {
      throw ParseError(v.line, v.column, "subset generator must list " + std::to_string(n) + " outputs");
    }
    return Configuration(std::move(perm));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(v.line, v.column, e.what());
  }
}

ExperimentEntry build_entry(const std::string& name, int header_line, const Section& s) {
  ExperimentEntry e;
  e.name = name;
  auto get = [&](const std::string& key) -> const RawValue* {
    auto it = s.find(key);
    return it == s.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& key) -> const RawValue& {
    if (const auto* v = get(key)) return *v;
    throw ParseError(header_line, 1, "section [" + name + "] is missing '" + key + "'");
  };

  if (const auto* v = get("switch.n")) {
    const auto n = to_int(*v);
    if (n < 1 || n > 64) throw ParseError(v->line, v->column, "switch.n must lie in 1..64");
    e.n = static_cast<int>(n);
  }
  if (const auto* v = get("horizon.t")) {
    e.horizon = to_int(*v);
    if (e.horizon < 0) throw ParseError(v->line, v->column, "horizon.t must be non-negative");
  }
  if (const auto* v = get("load.kind")) e.load_kind = v->text;
  static const std::set<std::string> kinds{"uniform-iid", "parallel-heavy", "cross-heavy",
                                           "uniform-periodic", "custom", "uniform-mmb"};
  if (!kinds.count(e.load_kind)) {
    const auto* v = get("load.kind");
    throw ParseError(v ? v->line : 0, v ? v->column : 0, "unknown load.kind '" + e.load_kind + "'");
  }

  if (e.load_kind == "uniform-iid") {
    e.sweep = doubles(require("load.lambda"));
  } else if (e.load_kind == "parallel-heavy" || e.load_kind == "cross-heavy") {
    e.sweep = doubles(require("load.lambda1"));
    const auto& l2 = require("load.lambda2");
    e.lambda2 = to_double(l2);
  } else if (e.load_kind == "uniform-periodic") {
    e.sweep = doubles(require("period.delta"));
  } else if (e.load_kind == "custom") {
    const auto& m = require("load.matrix");
    e.matrix = number_vector(m);
    if (e.matrix.size() != static_cast<std::size_t>(e.n) * e.n) {
      throw ParseError(m.line, m.column, "load.matrix needs switch.n^2 entries");
    }
    e.sweep = get("load.scale") ? doubles(*get("load.scale")) : std::vector<double>{1.0};
  } else {
    e.sweep = doubles(require("load.lambda"));
    e.mmb_rates = number_vector(require("mmb.rates"));
    const auto& tr = require("mmb.transition");
    e.mmb_transition = number_vector(tr);
    if (e.mmb_transition.size() != e.mmb_rates.size() * e.mmb_rates.size()) {
      throw ParseError(tr.line, tr.column, "mmb.transition needs K^2 entries");
    }
  }

  std::vector<PolicyKind> policy_kinds{PolicyKind::Msl};
  if (const auto* v = get("policy.kind")) {
    policy_kinds.clear();
    for (const auto& item : split_list(*v)) {
      try {
        policy_kinds.push_back(parse_policy_kind(item.text));
      } catch (const Error&) {
        throw ParseError(item.line, item.column, "unknown policy '" + item.text + "'");
      }
    }
  }
  std::vector<std::int64_t> ells{0};
  if (const auto* v = get("policy.ell")) {
    ells = ints(*v);
    for (auto l : ells) {
      if (l < 0) throw ParseError(v->line, v->column, "policy.ell must be non-negative");
    }
  }
  std::int64_t period = 16;
  if (const auto* v = get("policy.period")) {
    period = to_int(*v);
    if (period < 1) throw ParseError(v->line, v->column, "policy.period must be at least 1");
  }
  std::optional<Configuration> generator;
  if (const auto* v = get("policy.subset")) generator = parse_generator(*v, e.n);
  std::optional<MetaQueueMapping> gamma;
  if (const auto* v = get("policy.gamma")) {
    MetaQueueMapping g;
    if (v->text == "sum") {
      g.kind = GammaKind::Sum;
    } else if (v->text == "min") {
      g.kind = GammaKind::Min;
    } else if (v->text == "weighted") {
      g.kind = GammaKind::Weighted;
      const auto& w = require("policy.weights");
      for (double x : number_vector(w)) {
        if (x != std::floor(x)) throw ParseError(w.line, w.column, "policy.weights must be integers");
        g.weights.push_back(static_cast<Deviation>(x));
      }
      if (g.weights.size() != static_cast<std::size_t>(e.n) * e.n) {
        throw ParseError(w.line, w.column, "policy.weights needs switch.n^2 entries");
      }
    } else {
      throw ParseError(v->line, v->column, "policy.gamma must be sum, min or weighted");
    }
    gamma = g;
  }
  for (PolicyKind k : policy_kinds) {
    for (auto l : ells) {
      PolicySpec ps;
      ps.kind = k;
      ps.lead_cap = l;
      ps.period = period;
      ps.subset_generator = generator;
      if (k == PolicyKind::MslSs || k == PolicyKind::LlfSs) ps.gamma = gamma;
      e.policies.push_back(ps);
    }
  }

  e.seeds = {1};
  if (const auto* v = get("seed")) {
    e.seeds.clear();
    for (auto s : ints(*v)) e.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (const auto* v = get("sim.complete_only")) e.complete_only = to_bool(*v);
  if (const auto* v = get("sim.windows")) {
    const auto w = to_int(*v);
    if (w < 2) throw ParseError(v->line, v->column, "sim.windows must be at least 2");
    e.windows = static_cast<std::size_t>(w);
  }
  return e;
}

std::string format6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace

ParseError::ParseError(int line, int column, const std::string& what)
    : Error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) + ": " + what : what),
      line_(line),
      column_(column) {}

ExperimentSpec parse_experiment(const std::string& text) {
  Section defaults;
  struct Named {
    std::string name;
    int line;
    Section keys;
  };
  std::vector<Named> sections;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t lead = 0;
    const std::string body = trim(line, &lead);
    if (body.empty()) continue;
    const int col = static_cast<int>(lead) + 1;
    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError(lineno, col, "unterminated section header");
      const std::string name = trim(body.substr(1, body.size() - 2));
      if (name.empty()) throw ParseError(lineno, col, "empty section name");
      for (const auto& sec : sections) {
        if (sec.name == name) throw ParseError(lineno, col, "duplicate section [" + name + "]");
      }
      sections.push_back({name, lineno, Section{}});
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, col, "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ParseError(lineno, col, "missing key");
    if (!known_keys().count(key)) throw ParseError(lineno, col, "unknown key '" + key + "'");
    std::size_t vlead = 0;
    const std::string value = trim(body.substr(eq + 1), &vlead);
    const int vcol = col + static_cast<int>(eq + 1 + vlead);
    if (value.empty()) throw ParseError(lineno, vcol, "missing value for '" + key + "'");
    Section& target = sections.empty() ? defaults : sections.back().keys;
    if (target.count(key)) throw ParseError(lineno, col, "duplicate key '" + key + "'");
    target[key] = {value, lineno, vcol};
  }

  ExperimentSpec spec;
  if (sections.empty()) {
    // A file without sections is one experiment, unless it is empty.
    if (!defaults.empty()) spec.experiments.push_back(build_entry("default", 1, defaults));
    return spec;
  }
  for (const auto& sec : sections) {
    Section merged = defaults;
    for (const auto& [k, v] : sec.keys) merged[k] = v;
    spec.experiments.push_back(build_entry(sec.name, sec.line, merged));
  }
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, 0, "cannot open experiment file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment(buf.str());
}

std::vector<RunRequest> expand(const ExperimentSpec& spec) {
  std::vector<RunRequest> out;
  for (const auto& e : spec.experiments) {
    for (double point : e.sweep) {
      for (const auto& policy : e.policies) {
        for (auto seed : e.seeds) {
          RunRequest r;
          r.scenario = e.name;
          if (e.load_kind == "uniform-iid") {
            r.spec = uniform_iid_scenario(e.n, e.horizon, point, policy, seed);
          } else if (e.load_kind == "parallel-heavy") {
            r.spec = parallel_heavy_scenario(e.n, e.horizon, point, e.lambda2, policy, seed);
          } else if (e.load_kind == "cross-heavy") {
            r.spec = cross_heavy_scenario(e.n, e.horizon, point, e.lambda2, policy, seed);
          } else if (e.load_kind == "uniform-periodic") {
            r.spec = uniform_periodic_scenario(e.n, e.horizon, static_cast<std::int64_t>(point),
                                               policy, seed);
          } else if (e.load_kind == "custom") {
            std::vector<double> rates(e.matrix);
            for (auto& x : rates) x *= point;
            r.spec = load_matrix_scenario(LoadMatrix(e.n, std::move(rates)), e.horizon, policy, seed);
          } else {
            Scenario s;
            s.kind = ScenarioKind::Custom;
            s.name = "uniform-mmb";
            s.n = e.n;
            s.horizon = e.horizon;
            s.policy = policy;
            s.seed = seed;
            // mmb.rates are multipliers of the per-VOQ mean rate point / N.
            std::vector<double> rates(e.mmb_rates);
            for (auto& x : rates) x *= point / e.n;
            s.profiles.assign(static_cast<std::size_t>(e.n) * e.n,
                              MmbSpec{std::move(rates), e.mmb_transition, 0});
            s.lambda = nominal_rate(s.profiles.front()) * e.n;
            r.spec = std::move(s);
          }
          r.spec.complete_only = e.complete_only;
          r.spec.divergence_windows = e.windows;
          r.spec.keep_series = false;
          r.load = scenario_load(r.spec).max_line_sum();
          out.push_back(std::move(r));
        }
      }
    }
  }
  return out;
}

std::vector<RunRecord> run_all(const std::vector<RunRequest>& requests, int parallel) {
  std::vector<RunRecord> records(requests.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= requests.size()) return;
      try {
        const auto& req = requests[k];
        const RunResult res = run(req.spec);
        records[k] = {req.scenario, res.policy_name, req.load, req.spec.seed, res.summary};
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = requests.size();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(parallel, static_cast<int>(requests.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.scenario, a.policy, a.load, a.seed) <
           std::tie(b.scenario, b.policy, b.load, b.seed);
  });
  return records;
}

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.scenario << ',' << r.policy << ',' << format6(r.load) << ',' << r.seed << ','
        << format6(r.summary.avg_dev) << ',' << format6(r.summary.avg_var) << ','
        << r.summary.max_dev << ',' << r.summary.min_dev << ',' << (r.summary.diverged ? 1 : 0)
        << '\n';
  }
}

std::string summary_json(const std::vector<RunRecord>& records) {
  struct Curve {
    double dev = 0.0, var = 0.0;
    int runs = 0;
    int diverged = 0;
  };
  std::map<std::tuple<std::string, std::string, double>, Curve> curves;
  for (const auto& r : records) {
    auto& c = curves[{r.scenario, r.policy, r.load}];
    c.dev += r.summary.avg_dev;
    c.var += r.summary.avg_var;
    c.runs += 1;
    c.diverged += r.summary.diverged ? 1 : 0;
  }
  nlohmann::ordered_json doc;
  doc["runs"] = records.size();
  doc["curves"] = nlohmann::ordered_json::array();
  for (const auto& [key, c] : curves) {
    nlohmann::ordered_json j;
    j["scenario"] = std::get<0>(key);
    j["policy"] = std::get<1>(key);
    j["load"] = std::get<2>(key);
    j["runs"] = c.runs;
    j["mean_avg_dev"] = c.dev / c.runs;
    j["mean_avg_var"] = c.var / c.runs;
    j["diverged_runs"] = c.diverged;
    doc["curves"].push_back(j);
  }
  return doc.dump(2);
}

}  // namespace stc::cli
