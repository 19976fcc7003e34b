#pragma once

#include <cstdint>
#include <stdexcept>

#include "noisytrees/ordering.hpp"
#include "noisytrees/rng.hpp"

namespace noisytrees {

/// How a comparison outcome is corrupted when an error fires.
enum class NoiseMode {
  /// Replace the true outcome by one of the two wrong outcomes, uniformly.
  FlipUniform,
  /// Replace the true outcome by a uniformly chosen neighbor on the
  /// Less < Equal < Greater axis (Less and Greater only neighbor Equal).
  FlipAdjacent,
};

struct NoiseModel {
  double p = 0.0;  // per-call error probability, in [0, 0.5)
  NoiseMode mode = NoiseMode::FlipUniform;

  void validate() const {
    if (!(p >= 0.0) || !(p < 0.5)) {
      throw std::invalid_argument("noise probability must lie in [0, 0.5)");
    }
  }
};

/// Corrupts `truth` with probability model.p; exact otherwise.
inline Ordering3 apply_noise(Ordering3 truth, const NoiseModel& model,
                             RandomSource& rng) {
  if (model.p <= 0.0 || !rng.bernoulli(model.p)) return truth;
  if (model.mode == NoiseMode::FlipUniform) {
    // The two wrong outcomes, in a fixed order per truth value.
    static constexpr Ordering3 wrong[3][2] = {
        {Ordering3::Equal, Ordering3::Greater},  // truth = Less
        {Ordering3::Less, Ordering3::Greater},   // truth = Equal
        {Ordering3::Less, Ordering3::Equal},     // truth = Greater
    };
    return wrong[to_int(truth) + 1][rng.below(2)];
  }
  // FlipAdjacent
  if (truth == Ordering3::Equal) {
    return rng.below(2) == 0 ? Ordering3::Less : Ordering3::Greater;
  }
  return Ordering3::Equal;
}

/**
 * Exact comparator wrapped with an error-injection model, a seeded random
 * source, and call/cost counters.
 *
 * noisy() errs with probability exactly model.p per call and bumps the call
 * counter by one; exact() is the noise-free ground truth and never counts.
 * The counters are the basis for every call-budget measurement in the
 * experiment suite, so nothing else may invoke noisy comparisons.
 */
template <typename Key, typename Fn = ExactCompare<Key>>
class NoisyComparator {
 public:
  NoisyComparator(NoiseModel model, std::uint64_t seed, Fn fn = Fn{})
      : fn_(fn), model_(model), rng_(seed) {
    model_.validate();
  }

  Ordering3 noisy(const Key& a, const Key& b) {
    ++calls_;
    ++cost_;
    return apply_noise(fn_(a, b), model_, rng_);
  }

  Ordering3 exact(const Key& a, const Key& b) const { return fn_(a, b); }

  /// Upper bound on the probability that a single noisy() call is wrong.
  double raw_error() const { return model_.p; }

  std::uint64_t calls() const { return calls_; }
  std::uint64_t cost() const { return cost_; }
  void reset_counters() {
    calls_ = 0;
    cost_ = 0;
  }

  const NoiseModel& model() const { return model_; }
  RandomSource& rng() { return rng_; }

 private:
  Fn fn_;
  NoiseModel model_;
  RandomSource rng_;
  std::uint64_t calls_ = 0;
  std::uint64_t cost_ = 0;
};

}  // namespace noisytrees
