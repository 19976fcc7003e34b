#include "noisytrees/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "noisytrees/autocomplete.hpp"
#include "noisytrees/noise.hpp"
#include "noisytrees/rbtree.hpp"
#include "noisytrees/segtree.hpp"
#include "noisytrees/strsort.hpp"

namespace noisytrees {

namespace {

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  try {
    if (s.empty() || s[0] == '-' || s[0] == '+') {
      throw std::invalid_argument("sign");  // stoull would wrap negatives
    }
    std::size_t pos = 0;
    std::uint64_t v = std::stoull(s, &pos, 0);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected an unsigned integer, got '" + s + "'");
  }
}

long long parse_i64(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos, 0);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected an integer, got '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& what) {
  long long v = parse_i64(s, what);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(what + ": out of int range");
  }
  return static_cast<int>(v);
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected a number, got '" + s + "'");
  }
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(what + ": expected a boolean, got '" + s + "'");
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::size_t> parse_size_list(const std::string& s,
                                         const std::string& what) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = s.find(',', start);
    std::string item = trim(s.substr(start, comma - start));
    if (item.empty()) throw ConfigError(what + ": empty list entry");
    long long v = parse_i64(item, what);
    if (v <= 0) throw ConfigError(what + ": entries must be positive");
    out.push_back(static_cast<std::size_t>(v));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate_noise(double p) {
  require(p >= 0.0 && p < 0.5, "p must lie in [0, 0.5)");
}

void validate_walk_common(const ExperimentConfig& cfg) {
  require(cfg.trials >= 1, "trials must be >= 1");
  require(cfg.height >= 1 && cfg.height <= 30, "height must lie in [1, 30]");
  validate_noise(cfg.p);
  require(cfg.epsilon > 0.0 && cfg.epsilon < 0.5, "epsilon must lie in (0, 0.5)");
  require(cfg.c > 0.0, "c must be positive");
  require(cfg.per_step_boost > 0.0 && cfg.per_step_boost < 0.5,
          "per_step_boost must lie in (0, 0.5)");
  require(cfg.s_multiplier > 0.0, "s_multiplier must be positive");
}

}  // namespace

ordered_json ExperimentConfig::to_json() const {
  ordered_json j;
  j["seed"] = seed;
  j["trials"] = trials;
  j["p"] = p;
  j["xi"] = xi;
  j["epsilon"] = epsilon;
  j["c"] = c;
  j["per_step_boost"] = per_step_boost;
  j["s_multiplier"] = s_multiplier;
  j["cost_constant"] = cost_constant;
  j["n"] = n;
  j["l"] = l;
  j["height"] = height;
  j["structure"] = structure;
  j["variant"] = variant;
  j["script"] = script;
  j["input"] = input;
  j["out"] = out;
  j["format"] = format;
  j["probe"] = probe;
  j["probe_ns"] = probe_ns;
  j["probe_ls"] = probe_ls;
  j["probe_seeds"] = probe_seeds;
  return j;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "seed") cfg.seed = parse_u64(value, key);
  else if (key == "trials") cfg.trials = parse_int(value, key);
  else if (key == "p") cfg.p = parse_double(value, key);
  else if (key == "xi") cfg.xi = parse_double(value, key);
  else if (key == "epsilon") cfg.epsilon = parse_double(value, key);
  else if (key == "c") cfg.c = parse_double(value, key);
  else if (key == "per_step_boost") cfg.per_step_boost = parse_double(value, key);
  else if (key == "s_multiplier") cfg.s_multiplier = parse_double(value, key);
  else if (key == "cost_constant") cfg.cost_constant = parse_double(value, key);
  else if (key == "n") cfg.n = parse_int(value, key);
  else if (key == "l") cfg.l = parse_int(value, key);
  else if (key == "height") cfg.height = parse_int(value, key);
  else if (key == "structure") cfg.structure = value;
  else if (key == "variant") cfg.variant = value;
  else if (key == "script") cfg.script = value;
  else if (key == "input") cfg.input = value;
  else if (key == "out") cfg.out = value;
  else if (key == "format") cfg.format = value;
  else if (key == "probe") cfg.probe = parse_bool(value, key);
  else if (key == "probe_ns") cfg.probe_ns = value;
  else if (key == "probe_ls") cfg.probe_ls = value;
  else if (key == "probe_seeds") cfg.probe_seeds = parse_int(value, key);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    try {
      apply_config_entry(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

WilsonInterval wilson_interval(std::int64_t failures, std::int64_t trials) {
  if (trials <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;  // 97.5th normal percentile
  if (failures == 0) {
    double z2 = z * z;
    return {0.0, z2 / (trials + z2)};
  }
  if (failures == trials) {
    double z2 = z * z;
    return {static_cast<double>(trials) / (trials + z2), 1.0};
  }
  double nt = static_cast<double>(trials);
  double phat = static_cast<double>(failures) / nt;
  double z2 = z * z;
  double denom = 1.0 + z2 / nt;
  double center = phat + z2 / (2.0 * nt);
  double margin = z * std::sqrt(phat * (1.0 - phat) / nt + z2 / (4.0 * nt * nt));
  WilsonInterval w;
  w.lo = std::max(0.0, (center - margin) / denom);
  w.hi = std::min(1.0, (center + margin) / denom);
  return w;
}

ordered_json ExperimentReport::to_json(const ExperimentConfig& cfg) const {
  ordered_json j;
  j["experiment"] = experiment;
  j["config"] = cfg.to_json();
  j["trials"] = trials;
  j["failures"] = failures;
  j["failure_rate"] = failure_rate;
  j["wilson_95"] = ordered_json{{"lo", wilson.lo}, {"hi", wilson.hi}};
  j["mean_calls"] = mean_calls;
  j["mean_cost"] = mean_cost;
  j["steps"] = steps;
  if (extra.is_object()) {
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  }
  return j;
}

std::string ExperimentReport::to_csv(const ExperimentConfig& cfg) const {
  std::ostringstream out;
  ordered_json c = cfg.to_json();
  for (auto it = c.begin(); it != c.end(); ++it) {
    out << "# " << it.key() << "=";
    if (it.value().is_string()) out << it.value().get<std::string>();
    else out << it.value().dump();
    out << "\n";
  }
  out << "experiment,trials,failures,failure_rate,wilson_lo,wilson_hi,"
         "mean_calls,mean_cost,steps\n";
  ordered_json row = ordered_json::array({experiment, trials, failures,
                                          failure_rate, wilson.lo, wilson.hi,
                                          mean_calls, mean_cost, steps});
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += ",";
    line += row[i].is_string() ? row[i].get<std::string>() : row[i].dump();
  }
  out << line << "\n";
  return out.str();
}

BaselineResult baseline_descent(const SimTree& tree, std::uint32_t target_leaf,
                                double p, int reps_per_level,
                                RandomSource& rng) {
  BaselineResult res;
  std::uint32_t v = 1;
  for (int level = 0; level < tree.height; ++level) {
    bool on_path = tree.is_ancestor_or_self(v, target_leaf);
    std::uint32_t truth = on_path ? tree.child_toward(v, target_leaf) : 2 * v;
    std::uint32_t other = truth ^ 1u;
    int correct = 0;
    for (int i = 0; i < reps_per_level; ++i) correct += !rng.bernoulli(p);
    res.calls += static_cast<std::uint64_t>(reps_per_level);
    v = 2 * correct > reps_per_level ? truth : other;
  }
  res.success = v == target_leaf;
  return res;
}

ExperimentReport run_walk_sim(const ExperimentConfig& cfg) {
  validate_walk_common(cfg);
  SimTree tree{cfg.height};
  int reps = repetitions_for(cfg.p, cfg.per_step_boost);
  int base_steps = steps_budget(cfg.height, cfg.epsilon, cfg.c);
  int steps = std::max(
      1, static_cast<int>(std::ceil(base_steps * cfg.s_multiplier)));

  std::int64_t failures = 0;
  std::uint64_t total_calls = 0;
  for (int t = 0; t < cfg.trials; ++t) {
    RandomSource rng(RandomSource::derive(cfg.seed, static_cast<std::uint64_t>(t)));
    std::uint32_t target =
        1 + static_cast<std::uint32_t>(rng.below(tree.node_count()));
    SimTreeNav nav(tree, target, cfg.p, reps, rng);
    std::uint32_t final_node = walk_steps(nav, steps);
    failures += final_node != target;
    total_calls += nav.calls();
  }

  ExperimentReport rep;
  rep.experiment = "walk-sim";
  rep.trials = cfg.trials;
  rep.failures = failures;
  rep.failure_rate = static_cast<double>(failures) / cfg.trials;
  rep.wilson = wilson_interval(failures, cfg.trials);
  rep.mean_calls = static_cast<double>(total_calls) / cfg.trials;
  rep.mean_cost = rep.mean_calls;
  rep.steps = steps;
  rep.extra = ordered_json{{"reps_per_predicate", reps},
                           {"base_steps", base_steps},
                           {"nodes", tree.node_count()}};
  return rep;
}

ExperimentReport run_boost_baseline(const ExperimentConfig& cfg) {
  validate_walk_common(cfg);
  SimTree tree{cfg.height};
  int reps_walk = repetitions_for(cfg.p, cfg.per_step_boost);
  int steps = steps_budget(cfg.height, cfg.epsilon, cfg.c);
  int reps_level = repetitions_for(cfg.p, cfg.epsilon / cfg.height);

  std::int64_t walk_failures = 0;
  std::int64_t base_failures = 0;
  std::uint64_t walk_calls = 0;
  std::uint64_t base_calls = 0;
  for (int t = 0; t < cfg.trials; ++t) {
    RandomSource rng(RandomSource::derive(cfg.seed, static_cast<std::uint64_t>(t)));
    std::uint32_t target =
        tree.first_leaf() + static_cast<std::uint32_t>(rng.below(tree.leaf_count()));
    SimTreeNav nav(tree, target, cfg.p, reps_walk, rng);
    std::uint32_t final_node = walk_steps(nav, steps);
    walk_failures += final_node != target;
    walk_calls += nav.calls();
    BaselineResult base = baseline_descent(tree, target, cfg.p, reps_level, rng);
    base_failures += !base.success;
    base_calls += base.calls;
  }

  ExperimentReport rep;
  rep.experiment = "boost-baseline";
  rep.trials = cfg.trials;
  rep.failures = walk_failures;
  rep.failure_rate = static_cast<double>(walk_failures) / cfg.trials;
  rep.wilson = wilson_interval(walk_failures, cfg.trials);
  rep.mean_calls = static_cast<double>(walk_calls) / cfg.trials;
  rep.mean_cost = rep.mean_calls;
  rep.steps = steps;
  double base_mean = static_cast<double>(base_calls) / cfg.trials;
  WilsonInterval bw = wilson_interval(base_failures, cfg.trials);
  rep.extra = ordered_json{
      {"walker",
       ordered_json{{"failures", walk_failures},
                    {"failure_rate", rep.failure_rate},
                    {"mean_calls", rep.mean_calls},
                    {"reps_per_predicate", reps_walk}}},
      {"baseline",
       ordered_json{{"failures", base_failures},
                    {"failure_rate", static_cast<double>(base_failures) / cfg.trials},
                    {"wilson_95", ordered_json{{"lo", bw.lo}, {"hi", bw.hi}}},
                    {"mean_calls", base_mean},
                    {"reps_per_level", reps_level}}},
      {"call_ratio", rep.mean_calls > 0.0 ? base_mean / rep.mean_calls : 0.0},
      // Budget-formula ratio h*log2(h/eps) / (h + log2(1/eps)): the
      // asymptotic comparison the measured ratio tracks. Near 1 at h=1,
      // grows with h.
      {"asymptotic_ratio",
       cfg.height * std::log2(cfg.height / cfg.epsilon) /
           (cfg.height + std::log2(1.0 / cfg.epsilon))}};
  return rep;
}

namespace {

struct ScriptLine {
  int no = 0;
  std::vector<std::string> tokens;
};

std::vector<ScriptLine> tokenize_script(std::istream& in) {
  std::vector<ScriptLine> lines;
  std::string raw;
  int no = 0;
  while (std::getline(in, raw)) {
    ++no;
    std::string t = trim(raw);
    if (t.empty() || t[0] == '#') continue;
    ScriptLine sl;
    sl.no = no;
    std::stringstream ss(t);
    std::string tok;
    while (ss >> tok) sl.tokens.push_back(tok);
    lines.push_back(std::move(sl));
  }
  return lines;
}

long long script_i64(const ScriptLine& sl, std::size_t idx) {
  try {
    return parse_i64(sl.tokens.at(idx), "argument");
  } catch (const std::exception&) {
    throw ScriptError(sl.no, "expected an integer argument, got '" +
                                 sl.tokens[idx] + "'");
  }
}

void expect_args(const ScriptLine& sl, std::size_t count) {
  if (sl.tokens.size() != count + 1) {
    throw ScriptError(sl.no, sl.tokens[0] + " expects " +
                                 std::to_string(count) + " argument(s)");
  }
}

int run_ops_rbtree(const ExperimentConfig& cfg, std::istream& script,
                   std::ostream& out) {
  using Cmp = NoisyComparator<long long>;
  WalkTuning tuning{cfg.epsilon, cfg.c, cfg.per_step_boost};
  RBTree<long long, Cmp> tree(
      Cmp(NoiseModel{cfg.p, NoiseMode::FlipUniform},
          RandomSource::derive(cfg.seed, 1)),
      tuning);
  for (const ScriptLine& sl : tokenize_script(script)) {
    const std::string& op = sl.tokens[0];
    ordered_json j;
    j["op"] = op;
    if (op == "INSERT") {
      expect_args(sl, 1);
      long long x = script_i64(sl, 1);
      j["x"] = x;
      j["ok"] = tree.insert(x);
    } else if (op == "REMOVE") {
      expect_args(sl, 1);
      long long x = script_i64(sl, 1);
      j["x"] = x;
      j["ok"] = tree.remove(x);
    } else if (op == "SEARCH") {
      expect_args(sl, 1);
      long long x = script_i64(sl, 1);
      j["x"] = x;
      j["found"] = tree.search(x) != nullptr;
    } else {
      throw ScriptError(sl.no, "unknown operation '" + op + "'");
    }
    j["size"] = tree.size();
    j["calls"] = tree.comparator().calls();
    out << j.dump() << "\n";
  }
  return 0;
}

int run_ops_segtree(const ExperimentConfig& cfg, std::istream& script,
                    std::ostream& out) {
  require(cfg.n >= 1, "segtree scripts need n >= 1");
  WalkTuning tuning{cfg.epsilon, cfg.c, cfg.per_step_boost};
  SegTree<long long> seg(std::vector<long long>(cfg.n, 0), 0,
                         NoiseModel{cfg.p, NoiseMode::FlipUniform},
                         RandomSource::derive(cfg.seed, 2), tuning);
  auto in_range = [&](const ScriptLine& sl, long long i) {
    if (i < 1 || i > cfg.n) {
      throw ScriptError(sl.no, "index " + std::to_string(i) +
                                   " outside [1, " + std::to_string(cfg.n) + "]");
    }
    return static_cast<std::size_t>(i);
  };
  for (const ScriptLine& sl : tokenize_script(script)) {
    const std::string& op = sl.tokens[0];
    ordered_json j;
    j["op"] = op;
    if (op == "UPDATE") {
      expect_args(sl, 2);
      std::size_t i = in_range(sl, script_i64(sl, 1));
      long long x = script_i64(sl, 2);
      j["i"] = i;
      j["x"] = x;
      seg.update(i, x);
    } else if (op == "QUERY") {
      expect_args(sl, 2);
      long long i = script_i64(sl, 1);
      long long jx = script_i64(sl, 2);
      if (jx < i) throw ScriptError(sl.no, "query range is empty");
      j["i"] = in_range(sl, i);
      j["j"] = in_range(sl, jx);
      j["value"] = seg.query(static_cast<std::size_t>(i),
                             static_cast<std::size_t>(jx));
    } else {
      throw ScriptError(sl.no, "unknown operation '" + op + "'");
    }
    j["calls"] = seg.comparator().calls();
    out << j.dump() << "\n";
  }
  return 0;
}

int run_ops_autocomplete(const ExperimentConfig& cfg, std::istream& script,
                         std::ostream& out) {
  AutocompleteParams params;
  params.quantum = QuantumCostParams{cfg.xi, cfg.cost_constant};
  params.epsilon = cfg.epsilon;
  params.c = cfg.c;
  params.per_step_boost = cfg.per_step_boost;
  Dictionary dict(params, RandomSource::derive(cfg.seed, 3));
  for (const ScriptLine& sl : tokenize_script(script)) {
    const std::string& op = sl.tokens[0];
    if (op == "ADD") {
      expect_args(sl, 1);
      try {
        dict.add_string(sl.tokens[1]);
      } catch (const std::invalid_argument& e) {
        throw ScriptError(sl.no, e.what());
      }
      // additions produce no output line; only queries answer
    } else if (op == "QUERY") {
      expect_args(sl, 1);
      Dictionary::QueryResult res;
      try {
        res = dict.query_complement(sl.tokens[1]);
      } catch (const std::invalid_argument& e) {
        throw ScriptError(sl.no, e.what());
      }
      ordered_json j;
      j["query_no"] = res.query_no;
      if (res.found) {
        j["mi"] = res.best_query;
        j["md"] = res.best_count;
      } else {
        j["found"] = false;
      }
      j["calls"] = dict.tree().comparator().calls();
      out << j.dump() << "\n";
    } else {
      throw ScriptError(sl.no, "unknown operation '" + op + "'");
    }
  }
  return 0;
}

}  // namespace

int run_ops(const ExperimentConfig& cfg, std::istream& script,
            std::ostream& out) {
  require(cfg.epsilon > 0.0 && cfg.epsilon < 0.5, "epsilon must lie in (0, 0.5)");
  require(cfg.c > 0.0, "c must be positive");
  validate_noise(cfg.p);
  require(cfg.xi >= 0.0 && cfg.xi < 0.5, "xi must lie in [0, 0.5)");
  if (cfg.structure == "rbtree") return run_ops_rbtree(cfg, script, out);
  if (cfg.structure == "segtree") return run_ops_segtree(cfg, script, out);
  if (cfg.structure == "autocomplete") {
    return run_ops_autocomplete(cfg, script, out);
  }
  throw ConfigError("ops needs structure rbtree, segtree, or autocomplete; got '" +
                    cfg.structure + "'");
}

namespace {

SortVariant parse_variant(const std::string& v) {
  if (v == "getmin") return SortVariant::GetMin;
  if (v == "inorder") return SortVariant::Inorder;
  throw ConfigError("variant must be getmin or inorder, got '" + v + "'");
}

StringInstance load_instance(const ExperimentConfig& cfg) {
  if (!cfg.input.empty()) {
    std::ifstream in(cfg.input);
    if (!in) throw ConfigError("cannot open input file '" + cfg.input + "'");
    StringInstance inst;
    std::string line;
    while (std::getline(in, line)) inst.strings.push_back(trim(line));
    if (inst.strings.empty()) throw ConfigError("input file holds no strings");
    return inst;
  }
  require(cfg.n >= 1, "n must be >= 1");
  require(cfg.l >= 1, "l must be >= 1");
  return random_instance(static_cast<std::size_t>(cfg.n),
                         static_cast<std::size_t>(cfg.l),
                         RandomSource::derive(cfg.seed, 7));
}

}  // namespace

ordered_json run_sort_single(const ExperimentConfig& cfg) {
  require(cfg.xi >= 0.0 && cfg.xi < 0.5, "xi must lie in [0, 0.5)");
  require(cfg.cost_constant > 0.0, "cost_constant must be positive");
  SortVariant variant = parse_variant(cfg.variant);
  StringInstance inst = load_instance(cfg);
  QuantumCostParams params{cfg.xi, cfg.cost_constant};
  SortResult res = sort_strings(inst, variant, params,
                                RandomSource::derive(cfg.seed, 8), cfg.c);
  bool correct = res.permutation == exact_sorted_order(inst);
  ordered_json j;
  j["experiment"] = "sort";
  j["config"] = cfg.to_json();
  j["n"] = inst.n();
  j["total_cost"] = res.total_cost;
  j["comparator_calls"] = res.comparator_calls;
  j["correct"] = correct;
  j["permutation"] = res.permutation;
  return j;
}

std::string run_sort_probe_csv(const ExperimentConfig& cfg) {
  require(cfg.xi >= 0.0 && cfg.xi < 0.5, "xi must lie in [0, 0.5)");
  require(cfg.cost_constant > 0.0, "cost_constant must be positive");
  require(cfg.probe_seeds >= 1, "probe_seeds must be >= 1");
  SortVariant variant = parse_variant(cfg.variant);
  std::vector<std::size_t> ns = parse_size_list(cfg.probe_ns, "probe_ns");
  std::vector<std::size_t> ls = parse_size_list(cfg.probe_ls, "probe_ls");
  QuantumCostParams params{cfg.xi, cfg.cost_constant};
  std::vector<ProbeRow> rows = cost_scaling_probe(ns, ls, cfg.probe_seeds,
                                                  params, cfg.seed, variant,
                                                  cfg.c);
  std::ostringstream out;
  ordered_json c = cfg.to_json();
  for (auto it = c.begin(); it != c.end(); ++it) {
    out << "# " << it.key() << "=";
    if (it.value().is_string()) out << it.value().get<std::string>();
    else out << it.value().dump();
    out << "\n";
  }
  out << "n,l,seed,cost,calls,correct\n";
  for (const ProbeRow& r : rows) {
    out << r.n << "," << r.l << "," << r.seed << "," << r.total_cost << ","
        << r.comparator_calls << "," << (r.correct ? "true" : "false") << "\n";
  }
  return out.str();
}

std::string render_report(const ExperimentReport& report,
                          const ExperimentConfig& cfg) {
  if (cfg.format == "csv") return report.to_csv(cfg);
  if (cfg.format == "json") return report.to_json(cfg).dump(2) + "\n";
  throw ConfigError("format must be json or csv, got '" + cfg.format + "'");
}

void write_output(const ExperimentConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + cfg.out + "'");
  out << text;
}

}  // namespace noisytrees
