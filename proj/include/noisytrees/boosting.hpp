#pragma once

#include <cmath>
#include <stdexcept>

#include "noisytrees/ordering.hpp"

namespace noisytrees {

/**
 * Smallest odd repetition count k such that a majority vote over k calls,
 * each independently wrong with probability p, is wrong with probability at
 * most `target`: P(Binomial(k, p) >= ceil(k/2)) <= target.
 *
 * A wrong vote needs at least ceil(k/2) wrong calls regardless of how the
 * wrong answers split between the two wrong outcomes, so the binomial tail
 * bounds the plurality error too. The tail is summed exactly (log-space
 * terms), no approximation.
 */
inline int repetitions_for(double p, double target) {
  if (!(p >= 0.0) || !(p < 0.5)) {
    throw std::invalid_argument("repetitions_for: p must lie in [0, 0.5)");
  }
  if (!(target > 0.0)) {
    throw std::invalid_argument("repetitions_for: target must be positive");
  }
  if (p == 0.0 || p <= target) return 1;

  double logp = std::log(p);
  double logq = std::log1p(-p);
  for (int k = 3; k <= 100001; k += 2) {
    int m = (k + 1) / 2;
    // tail = sum_{j=m..k} C(k,j) p^j q^(k-j), summed smallest-exponent last
    double tail = 0.0;
    for (int j = k; j >= m; --j) {
      double logc = std::lgamma(k + 1.0) - std::lgamma(j + 1.0) -
                    std::lgamma(k - j + 1.0);
      tail += std::exp(logc + j * logp + (k - j) * logq);
    }
    if (tail <= target) return k;
  }
  throw std::runtime_error("repetitions_for: no k <= 100001 reaches target");
}

/// Exact majority-vote error for k repetitions at per-call error p
/// (the binomial tail evaluated by repetitions_for). Used by simulations.
inline double majority_error(int k, double p) {
  if (p <= 0.0) return 0.0;
  double logp = std::log(p);
  double logq = std::log1p(-p);
  int m = (k + 1) / 2;
  double tail = 0.0;
  for (int j = k; j >= m; --j) {
    double logc =
        std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0);
    tail += std::exp(logc + j * logp + (k - j) * logq);
  }
  return tail;
}

/**
 * Plurality vote over k invocations of a three-way outcome. Ties break
 * toward Equal, then Less, then Greater (fixed order, so results are
 * reproducible for a given call sequence). Performs exactly k invocations;
 * there is no early exit, so the caller is charged a deterministic k calls.
 */
template <typename Fn>
Ordering3 plurality_vote(Fn&& invoke, int k) {
  int votes[3] = {0, 0, 0};  // indexed by to_int(outcome) + 1
  for (int i = 0; i < k; ++i) {
    ++votes[to_int(invoke()) + 1];
  }
  if (votes[1] >= votes[0] && votes[1] >= votes[2]) return Ordering3::Equal;
  if (votes[0] >= votes[2]) return Ordering3::Less;
  return Ordering3::Greater;
}

/**
 * Majority-boosted comparison: repeats cmp.noisy(a, b) the number of times
 * repetitions_for(cmp.raw_error(), target_error) prescribes and returns the
 * plurality outcome. Error probability <= target_error; the comparator's
 * call counter advances by exactly the repetition count.
 */
template <typename Cmp, typename A, typename B>
Ordering3 boosted_compare(Cmp& cmp, const A& a, const B& b,
                          double target_error) {
  int k = repetitions_for(cmp.raw_error(), target_error);
  return plurality_vote([&] { return cmp.noisy(a, b); }, k);
}

}  // namespace noisytrees
