#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <vector>

#include "doctest.h"
#include "noisytrees/boosting.hpp"
#include "noisytrees/noise.hpp"
#include "noisytrees/quantum.hpp"
#include "noisytrees/rng.hpp"

using namespace noisytrees;

namespace {

// Independent binomial tail oracle, direct term summation. Usable up to
// k around 60 before pow underflow matters; the frozen values below were
// additionally cross-checked with exact rational arithmetic.
double tail_oracle(int k, double p, int m) {
  auto comb = [](int n, int r) {
    double c = 1.0;
    for (int i = 0; i < r; ++i) c = c * (n - i) / (i + 1);
    return c;
  };
  double total = 0.0;
  for (int j = m; j <= k; ++j) {
    total += comb(k, j) * std::pow(p, j) * std::pow(1.0 - p, k - j);
  }
  return total;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("repetition counts for standard error targets") {
  const double third = 1.0 / 3.0;
  CHECK(repetitions_for(third, 0.1) == 15);
  CHECK(repetitions_for(third, 0.05) == 23);
  CHECK(repetitions_for(third, 0.01) == 47);
  CHECK(repetitions_for(0.1, 0.1) == 1);
  CHECK(repetitions_for(0.1, 0.05) == 3);
  CHECK(repetitions_for(0.0, 0.001) == 1);
  CHECK(repetitions_for(0.25, 0.3) == 1);  // already below target
  // deep-boost plans used by the baseline comparison and the rbtree gate
  CHECK(repetitions_for(third, std::pow(2.0, -16) / 8.0) == 181);
  CHECK(repetitions_for(third, std::pow(2.0, -16) / 16.0) == 193);
  CHECK(repetitions_for(0.1, 1.0 / 40960.0) == 17);
  CHECK(repetitions_for(third, 1.0 / 262144.0) == 171);
}

TEST_CASE("majority error matches an independent tail computation") {
  const double third = 1.0 / 3.0;
  // frozen: exact-rational value of the 15-vote majority error at p=1/3
  CHECK(majority_error(15, third) ==
        doctest::Approx(0.08823159840676366).epsilon(1e-13));
  // 13 votes are not enough for the 0.1 target (hence 15 above)
  CHECK(majority_error(13, third) > 0.1);

  for (int k : {1, 3, 5, 9, 15, 23, 41}) {
    for (double p : {0.05, 0.1, 0.25, 1.0 / 3.0, 0.45}) {
      double expect = tail_oracle(k, p, (k + 1) / 2);
      CHECK(majority_error(k, p) == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("repetitions_for returns the smallest sufficient odd count") {
  for (double p : {0.1, 0.2, 1.0 / 3.0, 0.4}) {
    for (double target : {0.2, 0.05, 0.01, 1e-4}) {
      int k = repetitions_for(p, target);
      CHECK(k % 2 == 1);
      CHECK(majority_error(k, p) <= target);
      if (k > 1) CHECK(majority_error(k - 2, p) > target);
    }
  }
  CHECK_THROWS_AS(repetitions_for(0.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(repetitions_for(-0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(repetitions_for(0.2, 0.0), std::invalid_argument);
}

TEST_CASE("plurality vote counts and tie-breaking") {
  auto scripted = [](std::vector<Ordering3> answers) {
    auto it = std::make_shared<std::size_t>(0);
    auto data = std::make_shared<std::vector<Ordering3>>(std::move(answers));
    return [it, data]() { return (*data)[(*it)++]; };
  };

  CHECK(plurality_vote(scripted({Ordering3::Less, Ordering3::Less,
                                 Ordering3::Greater}),
                       3) == Ordering3::Less);
  // full three-way tie resolves to Equal
  CHECK(plurality_vote(scripted({Ordering3::Greater, Ordering3::Less,
                                 Ordering3::Equal}),
                       3) == Ordering3::Equal);
  // Equal ties with the strict majority loser pair: Equal wins on count tie
  CHECK(plurality_vote(scripted({Ordering3::Less, Ordering3::Less,
                                 Ordering3::Equal, Ordering3::Equal,
                                 Ordering3::Greater}),
                       5) == Ordering3::Equal);
  // Less beats Greater on a Less/Greater count tie
  CHECK(plurality_vote(scripted({Ordering3::Less, Ordering3::Greater,
                                 Ordering3::Less, Ordering3::Greater,
                                 Ordering3::Equal}),
                       5) == Ordering3::Less);

  int invocations = 0;
  auto counting = [&]() {
    ++invocations;
    return Ordering3::Greater;
  };
  CHECK(plurality_vote(counting, 15) == Ordering3::Greater);
  CHECK(invocations == 15);  // no early exit even with a unanimous prefix
}

TEST_CASE("boosted compare spends exactly the planned repetitions") {
  NoisyComparator<int> cmp(NoiseModel{1.0 / 3.0, NoiseMode::FlipUniform}, 99);
  (void)boosted_compare(cmp, 1, 2, 0.1);
  CHECK(cmp.calls() == 15);
  (void)boosted_compare(cmp, 1, 2, 0.05);
  CHECK(cmp.calls() == 15 + 23);
}

TEST_CASE("uniform flip noise hits its error rate and splits wrong answers") {
  NoisyComparator<int> cmp(NoiseModel{1.0 / 3.0, NoiseMode::FlipUniform}, 1234);
  const int trials = 60000;
  int wrong = 0, as_equal = 0, as_greater = 0;
  for (int i = 0; i < trials; ++i) {
    Ordering3 o = cmp.noisy(1, 2);  // truth: Less
    if (o != Ordering3::Less) {
      ++wrong;
      if (o == Ordering3::Equal) ++as_equal;
      if (o == Ordering3::Greater) ++as_greater;
    }
  }
  double frac = static_cast<double>(wrong) / trials;
  CHECK(frac == doctest::Approx(1.0 / 3.0).epsilon(0.02));
  // each wrong outcome gets half the error mass
  CHECK(static_cast<double>(as_equal) / trials ==
        doctest::Approx(1.0 / 6.0).epsilon(0.05));
  CHECK(static_cast<double>(as_greater) / trials ==
        doctest::Approx(1.0 / 6.0).epsilon(0.05));
  CHECK(cmp.calls() == static_cast<std::uint64_t>(trials));
  CHECK(cmp.cost() == static_cast<std::uint64_t>(trials));
}

TEST_CASE("low-noise comparator stays near its configured rate") {
  NoisyComparator<int> cmp(NoiseModel{0.1, NoiseMode::FlipUniform}, 777);
  const int trials = 60000;
  int wrong = 0;
  for (int i = 0; i < trials; ++i) wrong += cmp.noisy(5, 3) != Ordering3::Greater;
  CHECK(static_cast<double>(wrong) / trials ==
        doctest::Approx(0.1).epsilon(0.04));
}

TEST_CASE("adjacent flip noise only confuses neighbouring outcomes") {
  NoisyComparator<int> cmp(NoiseModel{0.3, NoiseMode::FlipAdjacent}, 4242);
  int equal_as_less = 0, equal_as_greater = 0;
  for (int i = 0; i < 20000; ++i) {
    Ordering3 o = cmp.noisy(7, 7);  // truth: Equal
    if (o == Ordering3::Less) ++equal_as_less;
    if (o == Ordering3::Greater) ++equal_as_greater;
  }
  CHECK(equal_as_less > 0);  // Equal drifts to both neighbours
  CHECK(equal_as_greater > 0);
  for (int i = 0; i < 20000; ++i) {
    Ordering3 o = cmp.noisy(1, 2);  // truth: Less
    CHECK(o != Ordering3::Greater);  // never jumps two places
  }
}

TEST_CASE("noiseless comparator is exact") {
  NoisyComparator<int> cmp(NoiseModel{0.0, NoiseMode::FlipUniform}, 1);
  for (int i = 0; i < 100; ++i) {
    CHECK(cmp.noisy(1, 2) == Ordering3::Less);
    CHECK(cmp.noisy(2, 2) == Ordering3::Equal);
    CHECK(cmp.noisy(3, 2) == Ordering3::Greater);
  }
}

TEST_CASE("random source is deterministic and streams are distinct") {
  RandomSource a(42), b(42), c(43);
  bool same = true, diff = false;
  for (int i = 0; i < 100; ++i) {
    std::uint64_t x = a.next_u64();
    same = same && x == b.next_u64();
    diff = diff || x != c.next_u64();
  }
  CHECK(same);
  CHECK(diff);

  std::set<std::uint64_t> derived;
  for (std::uint64_t i = 0; i < 1000; ++i) derived.insert(RandomSource::derive(7, i));
  CHECK(derived.size() == 1000);  // no stream collisions in a small window

  RandomSource r(5);
  for (int i = 0; i < 1000; ++i) {
    double u = r.uniform_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    std::uint64_t v = r.below(10);
    CHECK(v < 10);
  }
}

TEST_CASE("comparison cost formula") {
  // cost = max(1, ceil(cost_constant * sqrt(min_len) * log2(1/xi)))
  CHECK(quantum_compare_cost(100, QuantumCostParams{0.1, 1.0}) == 34);
  CHECK(quantum_compare_cost(100, QuantumCostParams{0.0, 1.0}) == 10);
  CHECK(quantum_compare_cost(0, QuantumCostParams{0.1, 1.0}) == 1);
  CHECK(quantum_compare_cost(16, QuantumCostParams{0.0, 0.5}) == 2);
  CHECK(quantum_compare_cost(16, QuantumCostParams{0.25, 1.0}) == 8);

  RandomSource rng(9);
  QuantumCostParams exact{0.0, 1.0};
  auto r = quantum_cost_compare("abc", "abd", exact, rng);
  CHECK(r.ordering == Ordering3::Less);
  CHECK(r.cost == 2);  // min length 3 -> ceil(sqrt(3)) = 2
  r = quantum_cost_compare("same", "same", exact, rng);
  CHECK(r.ordering == Ordering3::Equal);
  // cost charged by the shorter operand
  r = quantum_cost_compare("aa", "bbbbbbbbbbbbbbbb", exact, rng);
  CHECK(r.ordering == Ordering3::Less);
  CHECK(r.cost == 2);  // ceil(sqrt(2))
}

TEST_CASE("costed comparison errs at rate xi") {
  QuantumCostParams params{1.0 / 3.0, 1.0};
  RandomSource rng(31);
  int wrong = 0;
  const int trials = 30000;
  for (int i = 0; i < trials; ++i) {
    wrong += quantum_cost_compare("apple", "banana", params, rng).ordering !=
             Ordering3::Less;
  }
  CHECK(static_cast<double>(wrong) / trials ==
        doctest::Approx(1.0 / 3.0).epsilon(0.03));
}

}  // TEST_SUITE
