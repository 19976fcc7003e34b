#pragma once

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "noisytrees/boosting.hpp"
#include "noisytrees/rng.hpp"
#include "noisytrees/walker.hpp"

namespace noisytrees {

using ordered_json = nlohmann::ordered_json;

/// Invalid configuration (bad value, unknown key, unreadable file). The CLI
/// maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed operation-script line; carries the 1-based line number.
struct ScriptError : std::runtime_error {
  ScriptError(int line_no, const std::string& message)
      : std::runtime_error("script line " + std::to_string(line_no) + ": " +
                           message),
        line(line_no) {}
  int line;
};

/**
 * Fully resolved experiment parameters. Resolution layers, weakest first:
 * built-in defaults, the NOISYTREES_SEED environment variable (seed only),
 * the --config key=value file, explicit command-line flags. Every report
 * embeds the resolved values so a run is reproducible from its own output.
 */
struct ExperimentConfig {
  std::uint64_t seed = 1;
  int trials = 1000;
  double p = 1.0 / 3.0;    // predicate/comparison error for tree experiments
  double xi = 0.0;         // string-comparison error for sort/autocomplete
  double epsilon = 0.05;   // per-operation failure target
  double c = 108.0;        // step-budget constant
  double per_step_boost = 0.1;
  double s_multiplier = 1.0;  // walk-sim: scales the step budget
  double cost_constant = 1.0;
  int n = 256;     // structure size / string count
  int l = 16;      // string length
  int height = 8;  // synthetic tree height
  std::string structure = "walk";  // walk|rbtree|segtree|sort|autocomplete
  std::string variant = "getmin";  // sort read-back: getmin|inorder
  std::string script;              // ops/autocomplete operation file
  std::string input;               // sort: optional file of strings
  std::string out;                 // output path; empty = stdout
  std::string format = "json";     // json|csv
  bool probe = false;              // sort: run the scaling grid instead
  std::string probe_ns = "64,128";
  std::string probe_ls = "64,256";
  int probe_seeds = 3;

  ordered_json to_json() const;
};

/// Applies one key=value pair; throws ConfigError on unknown keys or
/// unparseable values. Keys are the long flag names without dashes.
void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value);

/// Reads a key=value file: one `key = value` per line, '#' comments and
/// blank lines ignored. Errors carry file path and line number.
void load_config_file(ExperimentConfig& cfg, const std::string& path);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// 95% Wilson score interval for a binomial proportion (z = 1.96); chosen
/// over the normal approximation for small-count robustness.
WilsonInterval wilson_interval(std::int64_t failures, std::int64_t trials);

struct ExperimentReport {
  std::string experiment;
  std::int64_t trials = 0;
  std::int64_t failures = 0;
  double failure_rate = 0.0;
  WilsonInterval wilson{};
  double mean_calls = 0.0;
  double mean_cost = 0.0;
  int steps = 0;            // step budget per walk (0 where not applicable)
  ordered_json extra;       // subcommand-specific fields, merged at top level
  double wall_ms = 0.0;     // measured, reported on stderr only — never
                            // serialized, so reports stay byte-identical

  ordered_json to_json(const ExperimentConfig& cfg) const;
  std::string to_csv(const ExperimentConfig& cfg) const;
};

// ----- synthetic complete binary tree for walk experiments ----------------

/**
 * Complete binary tree of the given height over 1-based heap indices:
 * root 1, children 2v and 2v+1, leaves at depth `height`. Purely
 * arithmetic; nothing is allocated.
 */
struct SimTree {
  int height = 0;

  std::uint32_t node_count() const { return (2u << height) - 1; }
  std::uint32_t first_leaf() const { return 1u << height; }
  std::uint32_t leaf_count() const { return 1u << height; }
  static int depth(std::uint32_t v) { return std::bit_width(v) - 1; }
  bool is_leaf(std::uint32_t v) const { return depth(v) == height; }

  bool is_ancestor_or_self(std::uint32_t v, std::uint32_t t) const {
    int dv = depth(v);
    int dt = depth(t);
    return dv <= dt && (t >> (dt - dv)) == v;
  }

  /// Child of v on the path toward its descendant t (t strictly deeper).
  std::uint32_t child_toward(std::uint32_t v, std::uint32_t t) const {
    return t >> (depth(t) - depth(v) - 1);
  }
};

/**
 * Walk navigation over a SimTree with truth-aware noisy predicates: each
 * base predicate call answers correctly with probability 1 - p, and every
 * predicate is boosted by a k-repetition majority vote (k base calls are
 * charged per invocation, including "stay" answers at leaves). Off the
 * target's ancestor path the correct child is defined as the left one.
 */
class SimTreeNav {
 public:
  using NodeRef = std::uint32_t;

  SimTreeNav(SimTree tree, std::uint32_t target, double p, int reps,
             RandomSource& rng)
      : tree_(tree), target_(target), p_(p), reps_(reps), rng_(rng) {}

  NodeRef root() const { return 1; }
  std::optional<NodeRef> parent(NodeRef v) const {
    if (v == 1) return std::nullopt;
    return v >> 1;
  }

  bool is_node_correct(NodeRef v) {
    return vote_bool(tree_.is_ancestor_or_self(v, target_));
  }
  bool is_target(NodeRef v) { return vote_bool(v == target_); }

  NodeRef select_child(NodeRef v) {
    calls_ += reps_;
    if (tree_.is_leaf(v)) return v;
    bool proper_ancestor = tree_.is_ancestor_or_self(v, target_) &&
                           SimTree::depth(target_) > SimTree::depth(v);
    std::uint32_t truth = proper_ancestor ? tree_.child_toward(v, target_) : 2 * v;
    std::uint32_t other = truth ^ 1u;
    int correct = 0;
    for (int i = 0; i < reps_; ++i) correct += !rng_.bernoulli(p_);
    return 2 * correct > reps_ ? truth : other;
  }

  void descended(NodeRef) {}
  void ascended() {}
  void process_node(NodeRef) {}

  std::uint64_t calls() const { return calls_; }

 private:
  bool vote_bool(bool truth) {
    calls_ += reps_;
    int yes = 0;
    for (int i = 0; i < reps_; ++i) {
      bool ans = truth != rng_.bernoulli(p_);
      yes += ans;
    }
    return 2 * yes > reps_;
  }

  SimTree tree_;
  std::uint32_t target_;
  double p_;
  int reps_;
  RandomSource& rng_;
  std::uint64_t calls_ = 0;
};

struct BaselineResult {
  bool success = false;
  std::uint64_t calls = 0;
};

/**
 * Per-step majority baseline: a plain root-to-leaf descent where every
 * level's child selection is boosted to error epsilon/height, giving the
 * same per-operation error by a union bound at Theta(h log(h/eps)) total
 * calls (vs. the walk's Theta(h + log(1/eps))).
 */
BaselineResult baseline_descent(const SimTree& tree, std::uint32_t target_leaf,
                                double p, int reps_per_level,
                                RandomSource& rng);

// ----- experiment runners -------------------------------------------------

ExperimentReport run_walk_sim(const ExperimentConfig& cfg);
ExperimentReport run_boost_baseline(const ExperimentConfig& cfg);

/// Executes an operation script against the configured structure, writing
/// one JSON result per line. Returns the process exit code (0 = clean).
/// Malformed lines throw ScriptError.
int run_ops(const ExperimentConfig& cfg, std::istream& script,
            std::ostream& out);

/// Single sort run (random instance, or strings from cfg.input, one per
/// line). Returns the report document; `correct` compares against the
/// exact stable order.
ordered_json run_sort_single(const ExperimentConfig& cfg);

/// Scaling-grid probe in CSV form: config comment lines, then
/// n,l,seed,cost,calls,correct rows.
std::string run_sort_probe_csv(const ExperimentConfig& cfg);

/// Serializes a report per cfg.format ("json" pretty-printed with a
/// trailing newline, "csv" with config comment lines).
std::string render_report(const ExperimentReport& report,
                          const ExperimentConfig& cfg);

/// Writes text to cfg.out, or to stdout when no path is set.
void write_output(const ExperimentConfig& cfg, const std::string& text);

}  // namespace noisytrees
