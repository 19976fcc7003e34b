#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "noisytrees/experiment.hpp"

using namespace noisytrees;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("noisytrees_test_" + name);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args, const fs::path& stdout_path) {
  std::string cmd = std::string("\"") + NOISYTREES_CLI_PATH + "\" " + args +
                    " > \"" + stdout_path.string() + "\" 2> /dev/null";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::vector<ordered_json> parse_lines(const std::string& text) {
  std::vector<ordered_json> docs;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) docs.push_back(ordered_json::parse(line));
  }
  return docs;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("score intervals match independently computed values") {
  auto check_iv = [](std::int64_t f, std::int64_t n, double lo, double hi) {
    WilsonInterval w = wilson_interval(f, n);
    CHECK(w.lo == doctest::Approx(lo).epsilon(1e-12));
    CHECK(w.hi == doctest::Approx(hi).epsilon(1e-12));
  };
  check_iv(0, 100, 0.0, 0.03699349820698568);
  check_iv(5, 100, 0.021543679154367962, 0.11175046923191914);
  check_iv(50, 100, 0.4038315303659957, 0.5961684696340044);
  check_iv(100, 100, 0.9630065017930143, 1.0);
  check_iv(3, 1000, 0.0010207838811386186, 0.008783014053503173);

  CHECK(wilson_interval(0, 50).lo == 0.0);  // exactly, not approximately
  CHECK(wilson_interval(50, 50).hi == 1.0);

  for (std::int64_t n : {10, 100, 1000}) {
    for (std::int64_t f = 0; f <= n; f += n / 10) {
      WilsonInterval w = wilson_interval(f, n);
      double phat = static_cast<double>(f) / n;
      CHECK(w.lo >= 0.0);
      CHECK(w.hi <= 1.0);
      CHECK(w.lo <= phat);
      CHECK(w.hi >= phat);
      CHECK(w.lo < w.hi);
    }
  }
}

TEST_CASE("config entries parse strictly") {
  ExperimentConfig cfg;
  apply_config_entry(cfg, "seed", "42");
  apply_config_entry(cfg, "trials", "77");
  apply_config_entry(cfg, "p", "0.25");
  apply_config_entry(cfg, "structure", "segtree");
  apply_config_entry(cfg, "probe", "true");
  apply_config_entry(cfg, "probe_ns", "8,16");
  CHECK(cfg.seed == 42);
  CHECK(cfg.trials == 77);
  CHECK(cfg.p == doctest::Approx(0.25));
  CHECK(cfg.structure == "segtree");
  CHECK(cfg.probe);
  CHECK(cfg.probe_ns == "8,16");

  CHECK_THROWS_AS(apply_config_entry(cfg, "no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_config_entry(cfg, "trials", "many"), ConfigError);
  CHECK_THROWS_AS(apply_config_entry(cfg, "p", "0.5.5"), ConfigError);
  CHECK_THROWS_AS(apply_config_entry(cfg, "probe", "maybe"), ConfigError);
  CHECK_THROWS_AS(apply_config_entry(cfg, "seed", "-3"), ConfigError);
}

TEST_CASE("config files allow comments and report bad lines by number") {
  fs::path good = temp_file("good.cfg");
  write_file(good,
             "# experiment setup\n"
             "\n"
             "seed = 99\n"
             "epsilon=0.125\n"
             "  structure = rbtree  \n");
  ExperimentConfig cfg;
  load_config_file(cfg, good.string());
  CHECK(cfg.seed == 99);
  CHECK(cfg.epsilon == doctest::Approx(0.125));
  CHECK(cfg.structure == "rbtree");

  fs::path bad = temp_file("bad.cfg");
  write_file(bad, "seed = 1\nnot a pair\n");
  ExperimentConfig cfg2;
  try {
    load_config_file(cfg2, bad.string());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find(bad.string()) != std::string::npos);
    CHECK(msg.find(":2") != std::string::npos);
  }

  ExperimentConfig cfg3;
  CHECK_THROWS_AS(load_config_file(cfg3, "/no/such/file.cfg"), ConfigError);
  fs::remove(good);
  fs::remove(bad);
}

TEST_CASE("every configuration knob appears in serialized reports") {
  ExperimentConfig cfg;
  ordered_json j = cfg.to_json();
  CHECK(j.size() == 22);
  CHECK(j.begin().key() == "seed");
  CHECK(j["trials"] == 1000);
  CHECK(j["structure"] == "walk");
  CHECK(j["probe"] == false);
  CHECK(j["format"] == "json");
  // wall-clock time must never be serialized: reports stay byte-identical
  ExperimentReport rep;
  rep.experiment = "walk-sim";
  rep.wall_ms = 123.0;
  std::string text = render_report(rep, cfg);
  CHECK(text.find("wall") == std::string::npos);
  CHECK(text.back() == '\n');
}

TEST_CASE("walk simulation reports are deterministic and exact at p = 0") {
  ExperimentConfig cfg;
  cfg.trials = 300;
  cfg.height = 8;
  cfg.epsilon = 0.05;
  cfg.seed = 7;

  SUBCASE("noise-free walks always land on the target") {
    cfg.p = 0.0;
    ExperimentReport rep = run_walk_sim(cfg);
    CHECK(rep.failures == 0);
    CHECK(rep.failure_rate == 0.0);
    CHECK(rep.steps == 1331);
    CHECK(rep.extra["base_steps"] == 1331);
    CHECK(rep.extra["reps_per_predicate"] == 1);
    CHECK(rep.extra["nodes"] == 511);
  }

  SUBCASE("identical configs render identical bytes") {
    cfg.p = 1.0 / 3.0;
    std::string a = render_report(run_walk_sim(cfg), cfg);
    std::string b = render_report(run_walk_sim(cfg), cfg);
    CHECK(a == b);
    ordered_json doc = ordered_json::parse(a);
    CHECK(doc["experiment"] == "walk-sim");
    CHECK(doc["config"]["seed"] == 7);
    CHECK(doc["steps"] == 1331);
  }

  SUBCASE("csv rendering carries the config as comments") {
    cfg.p = 0.0;
    cfg.format = "csv";
    std::string text = render_report(run_walk_sim(cfg), cfg);
    CHECK(text.find("# seed=7\n") != std::string::npos);
    CHECK(text.find("# structure=walk\n") != std::string::npos);
    CHECK(text.find("experiment,trials,failures,") != std::string::npos);
    CHECK(text.find("walk-sim,300,0,") != std::string::npos);
  }
}

TEST_CASE("cutting the step budget degrades reliability") {
  ExperimentConfig cfg;
  cfg.trials = 500;
  cfg.height = 6;
  cfg.epsilon = 0.2;
  cfg.c = 8.0;
  cfg.p = 1.0 / 3.0;
  cfg.seed = 19;

  cfg.s_multiplier = 0.08;
  double starved = run_walk_sim(cfg).failure_rate;
  cfg.s_multiplier = 1.0;
  double full = run_walk_sim(cfg).failure_rate;
  CHECK(starved > full + 0.05);
}

TEST_CASE("walker beats the per-level majority baseline on deep trees") {
  ExperimentConfig cfg;
  cfg.trials = 40;
  cfg.height = 16;
  cfg.epsilon = 0.0000152587890625;  // 2^-16
  cfg.c = 3.0;
  cfg.p = 1.0 / 3.0;
  cfg.seed = 23;

  ExperimentReport rep = run_boost_baseline(cfg);
  CHECK(rep.extra["baseline"]["mean_calls"] == doctest::Approx(3088.0));
  CHECK(rep.extra["baseline"]["reps_per_level"] == 193);
  CHECK(rep.extra["call_ratio"].get<double>() > 1.0);
  CHECK(rep.extra["asymptotic_ratio"].get<double>() ==
        doctest::Approx(10.0).epsilon(1e-12));
  CHECK(rep.failures == 0);
  CHECK(rep.extra["baseline"]["failures"] == 0);

  // Shallow trees are the degenerate end: the budget-formula ratio sits
  // near 1 and the measured ratio drops below it.
  cfg.height = 1;
  ExperimentReport flat = run_boost_baseline(cfg);
  CHECK(flat.extra["asymptotic_ratio"].get<double>() ==
        doctest::Approx(16.0 / 17.0).epsilon(1e-12));

  cfg.height = 8;
  ExperimentReport mid = run_boost_baseline(cfg);
  double r8 = mid.extra["asymptotic_ratio"].get<double>();
  CHECK(r8 == doctest::Approx(19.0 / 3.0).epsilon(1e-12));
  CHECK(r8 < 10.0);
}

TEST_CASE("plain descent with exact predicates always succeeds") {
  SimTree tree{5};
  RandomSource rng(3);
  for (int t = 0; t < 20; ++t) {
    std::uint32_t leaf =
        tree.first_leaf() + static_cast<std::uint32_t>(rng.below(tree.leaf_count()));
    BaselineResult res = baseline_descent(tree, leaf, 0.0, 1, rng);
    CHECK(res.success);
    CHECK(res.calls == 5);
  }
}

TEST_CASE("heap-index arithmetic for the synthetic tree") {
  SimTree t{3};
  CHECK(t.node_count() == 15);
  CHECK(t.first_leaf() == 8);
  CHECK(t.leaf_count() == 8);
  CHECK(SimTree::depth(1) == 0);
  CHECK(SimTree::depth(9) == 3);
  CHECK(t.is_leaf(8));
  CHECK_FALSE(t.is_leaf(7));
  CHECK(t.is_ancestor_or_self(1, 13));
  CHECK(t.is_ancestor_or_self(3, 13));
  CHECK(t.is_ancestor_or_self(13, 13));
  CHECK_FALSE(t.is_ancestor_or_self(2, 13));
  CHECK_FALSE(t.is_ancestor_or_self(13, 3));
  CHECK(t.child_toward(1, 13) == 3);
  CHECK(t.child_toward(3, 13) == 6);
  CHECK(t.child_toward(6, 13) == 13);
}

TEST_CASE("operation scripts run structures and answer line by line") {
  ExperimentConfig cfg;
  cfg.p = 0.0;
  cfg.xi = 0.0;

  SUBCASE("search-tree script") {
    cfg.structure = "rbtree";
    std::istringstream script(
        "INSERT 5\nINSERT 5\nSEARCH 5\nREMOVE 5\nSEARCH 5\n");
    std::ostringstream out;
    CHECK(run_ops(cfg, script, out) == 0);
    auto docs = parse_lines(out.str());
    REQUIRE(docs.size() == 5);
    CHECK(docs[0]["ok"] == true);
    CHECK(docs[1]["ok"] == false);
    CHECK(docs[1]["size"] == 1);
    CHECK(docs[2]["found"] == true);
    CHECK(docs[3]["ok"] == true);
    CHECK(docs[4]["found"] == false);
    CHECK(docs[4]["size"] == 0);
  }

  SUBCASE("aggregate-tree script with comments") {
    cfg.structure = "segtree";
    cfg.n = 8;
    std::istringstream script(
        "# cells start at zero\n\nUPDATE 3 7\nUPDATE 5 2\nQUERY 1 8\nQUERY 3 3\n");
    std::ostringstream out;
    CHECK(run_ops(cfg, script, out) == 0);
    auto docs = parse_lines(out.str());
    REQUIRE(docs.size() == 4);
    CHECK(docs[2]["value"] == 9);
    CHECK(docs[3]["value"] == 7);
  }

  SUBCASE("dictionary script emits answers only for queries") {
    cfg.structure = "autocomplete";
    std::istringstream script(
        "ADD car\nADD car\nADD cart\nADD cart\nADD dog\nQUERY car\nQUERY x\n");
    std::ostringstream out;
    CHECK(run_ops(cfg, script, out) == 0);
    auto docs = parse_lines(out.str());
    REQUIRE(docs.size() == 2);
    CHECK(docs[0]["query_no"] == 6);
    CHECK(docs[0]["mi"] == 1);
    CHECK(docs[0]["md"] == 2);
    CHECK(docs[1]["found"] == false);
  }

  SUBCASE("bad lines raise script errors with their line number") {
    cfg.structure = "rbtree";
    std::istringstream bogus("INSERT 1\nBOGUS 2\n");
    std::ostringstream out;
    try {
      run_ops(cfg, bogus, out);
      FAIL("expected ScriptError");
    } catch (const ScriptError& e) {
      CHECK(e.line == 2);
      CHECK(std::string(e.what()).find("BOGUS") != std::string::npos);
    }

    cfg.structure = "segtree";
    cfg.n = 4;
    std::istringstream range("UPDATE 1 3\nUPDATE 9 1\n");
    std::ostringstream out2;
    CHECK_THROWS_AS(run_ops(cfg, range, out2), ScriptError);

    cfg.structure = "rbtree";
    std::istringstream arity("INSERT\n");
    std::ostringstream out3;
    CHECK_THROWS_AS(run_ops(cfg, arity, out3), ScriptError);

    cfg.structure = "walk";
    std::istringstream empty_script("");
    std::ostringstream out4;
    CHECK_THROWS_AS(run_ops(cfg, empty_script, out4), ConfigError);
  }
}

TEST_CASE("single sort runs report permutation and cost") {
  ExperimentConfig cfg;
  cfg.structure = "sort";
  cfg.n = 12;
  cfg.l = 5;
  cfg.xi = 0.0;
  ordered_json j = run_sort_single(cfg);
  CHECK(j["experiment"] == "sort");
  CHECK(j["n"] == 12);
  CHECK(j["correct"] == true);
  CHECK(j["permutation"].size() == 12);
  CHECK(j["total_cost"].get<std::uint64_t>() > 0);
  CHECK(run_sort_single(cfg) == j);  // deterministic

  fs::path words = temp_file("words.txt");
  write_file(words, "pear\napple\nbanana\n");
  cfg.input = words.string();
  ordered_json k = run_sort_single(cfg);
  CHECK(k["n"] == 3);
  CHECK(k["permutation"] == ordered_json::array({1, 2, 0}));
  fs::remove(words);
}

TEST_CASE("probe output is a config-stamped csv grid") {
  ExperimentConfig cfg;
  cfg.structure = "sort";
  cfg.probe = true;
  cfg.probe_ns = "8";
  cfg.probe_ls = "4,16";
  cfg.probe_seeds = 2;
  cfg.xi = 0.0;
  std::string text = run_sort_probe_csv(cfg);
  CHECK(text.find("# probe_ns=8\n") != std::string::npos);
  CHECK(text.find("n,l,seed,cost,calls,correct\n") != std::string::npos);
  int rows = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    rows += !line.empty() && line[0] != '#' && line[0] != 'n';
  }
  CHECK(rows == 4);
  CHECK(run_sort_probe_csv(cfg) == text);

  cfg.probe_ns = "8,";
  CHECK_THROWS_AS(run_sort_probe_csv(cfg), ConfigError);
}

TEST_CASE("command-line runs behave like the library") {
  fs::path out = temp_file("cli_out.json");

  SUBCASE("walk-sim writes a parseable report and exits cleanly") {
    int code = run_cli(
        "walk-sim --height 4 --trials 80 --epsilon 0.2 --p 0.1 --seed 5", out);
    CHECK(code == 0);
    ordered_json doc = ordered_json::parse(read_file(out));
    CHECK(doc["experiment"] == "walk-sim");
    CHECK(doc["config"]["seed"] == 5);
    CHECK(doc["config"]["height"] == 4);
  }

  SUBCASE("seed can come from the environment") {
    int code = run_cli(
        "walk-sim --height 4 --trials 40 --epsilon 0.2 --p 0.0", out);
    CHECK(code == 0);
    CHECK(ordered_json::parse(read_file(out))["config"]["seed"] == 1);

    fs::path env_out = temp_file("cli_env.json");
    std::string cmd = std::string("NOISYTREES_SEED=777 \"") +
                      NOISYTREES_CLI_PATH +
                      "\" walk-sim --height 4 --trials 40 --epsilon 0.2 --p 0.0"
                      " > \"" + env_out.string() + "\" 2> /dev/null";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(ordered_json::parse(read_file(env_out))["config"]["seed"] == 777);
    fs::remove(env_out);
  }

  SUBCASE("broken scripts exit with the error code") {
    fs::path script = temp_file("bad_script.txt");
    write_file(script, "INSERT 1\nNONSENSE\n");
    int code = run_cli("ops --structure rbtree --p 0 --script \"" +
                           script.string() + "\"",
                       out);
    CHECK(code == 2);
    fs::remove(script);
  }

  fs::remove(out);
}

}  // TEST_SUITE
