#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

#include "noisytrees/noise.hpp"
#include "noisytrees/ordering.hpp"
#include "noisytrees/rng.hpp"

namespace noisytrees {

/**
 * Cost model for a string comparison that is allowed to err: a comparison of
 * s and t at error probability xi is charged
 *
 *     max(1, ceil(cost_constant * sqrt(min(|s|, |t|)) * log2(1/xi)))
 *
 * cost units. xi = 0 selects the exact path: the comparison never errs and
 * is charged max(1, ceil(cost_constant * sqrt(min(|s|, |t|)))).
 */
struct QuantumCostParams {
  double xi = 0.1;            // error probability per comparison, [0, 0.5)
  double cost_constant = 1.0; // leading constant of the cost formula, > 0

  void validate() const {
    if (!(xi >= 0.0) || !(xi < 0.5)) {
      throw std::invalid_argument("quantum xi must lie in [0, 0.5)");
    }
    if (!(cost_constant > 0.0)) {
      throw std::invalid_argument("quantum cost constant must be positive");
    }
  }
};

/// Cost charged for one comparison of strings whose shorter length is min_len.
inline std::uint64_t quantum_compare_cost(std::size_t min_len,
                                          const QuantumCostParams& params) {
  double base = params.cost_constant * std::sqrt(static_cast<double>(min_len));
  double factor = params.xi > 0.0 ? std::log2(1.0 / params.xi) : 1.0;
  double cost = std::ceil(base * factor);
  return cost >= 1.0 ? static_cast<std::uint64_t>(cost) : 1;
}

struct QuantumCompareResult {
  Ordering3 ordering;
  std::uint64_t cost;
};

/**
 * Lexicographic comparison of s and t under the cost model above. The
 * outcome is exact with probability 1 - xi and uniformly wrong otherwise
 * (uniform over the two wrong outcomes).
 */
inline QuantumCompareResult quantum_cost_compare(std::string_view s,
                                                 std::string_view t,
                                                 const QuantumCostParams& params,
                                                 RandomSource& rng) {
  std::uint64_t cost = quantum_compare_cost(std::min(s.size(), t.size()), params);
  Ordering3 truth = compare_strings(s, t);
  if (params.xi <= 0.0) return {truth, cost};
  NoiseModel model{params.xi, NoiseMode::FlipUniform};
  return {apply_noise(truth, model, rng), cost};
}

}  // namespace noisytrees
