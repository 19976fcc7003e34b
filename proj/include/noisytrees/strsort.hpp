#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "noisytrees/quantum.hpp"
#include "noisytrees/rbtree.hpp"

namespace noisytrees {

/// A batch of strings to sort. Lengths may differ; the cost model charges
/// each comparison by the shorter operand.
struct StringInstance {
  std::vector<std::string> strings;

  std::size_t n() const { return strings.size(); }
};

struct SortResult {
  /// permutation[r] = index of the string with sorted rank r. Always a
  /// bijection on 0..n-1, even for runs whose order came out wrong.
  std::vector<std::uint32_t> permutation;
  std::uint64_t total_cost = 0;
  std::uint64_t comparator_calls = 0;
};

enum class SortVariant {
  /// Repeated structural minimum extraction (leftmost node, comparison-free).
  GetMin,
  /// One in-order traversal after all insertions.
  Inorder,
};

/**
 * Comparator over string indices: the string parts are compared through the
 * noisy costed comparison, and an index tie-break applies only when that
 * comparison reports Equal. Distinct indices therefore never compare equal,
 * which makes duplicate strings well-ordered (stable by input position).
 */
class StringRankComparator {
 public:
  StringRankComparator(const std::vector<std::string>* strings,
                       QuantumCostParams params, std::uint64_t seed)
      : strings_(strings), params_(params), rng_(seed) {
    params_.validate();
  }

  Ordering3 noisy(std::uint32_t a, std::uint32_t b) {
    ++calls_;
    auto r = quantum_cost_compare((*strings_)[a], (*strings_)[b], params_, rng_);
    cost_ += r.cost;
    if (r.ordering != Ordering3::Equal) return r.ordering;
    return compare_values(a, b);  // exact, costless tie-break
  }

  Ordering3 exact(std::uint32_t a, std::uint32_t b) const {
    Ordering3 o = compare_strings((*strings_)[a], (*strings_)[b]);
    return o != Ordering3::Equal ? o : compare_values(a, b);
  }

  double raw_error() const { return params_.xi; }
  std::uint64_t calls() const { return calls_; }
  std::uint64_t cost() const { return cost_; }

 private:
  const std::vector<std::string>* strings_;
  QuantumCostParams params_;
  RandomSource rng_;
  std::uint64_t calls_ = 0;
  std::uint64_t cost_ = 0;
};

using StringRankTree = RBTree<std::uint32_t, StringRankComparator>;

/// Per-operation failure target used by the sorting tree: 1 / (10 n^2), so
/// a union bound over the 2n tree operations keeps a whole sort's failure
/// probability at 1/(5n). Capped into the valid (0, 0.5) range for tiny n.
inline double sort_epsilon(std::size_t n) {
  double eps = 1.0 / (10.0 * static_cast<double>(n) * static_cast<double>(n));
  return std::min(eps, 0.1);
}

/**
 * Sorts the instance by inserting every index into a noisy index tree and
 * reading the order back, either by repeated minimum extraction or one
 * in-order pass; both read-backs are structural (zero comparisons). The
 * returned ordering is (string, input index), i.e. a stable sort. Wrong
 * outputs occur with probability at most 1/(5n); the output is a
 * permutation in every case (unplaced indices, possible only after a failed
 * insertion walk, are appended in ascending order).
 */
inline SortResult sort_strings(const StringInstance& instance,
                               SortVariant variant,
                               const QuantumCostParams& params,
                               std::uint64_t seed, double c = 108.0) {
  const std::size_t n = instance.n();
  SortResult result;
  result.permutation.reserve(n);
  if (n == 0) return result;

  WalkTuning tuning;
  tuning.epsilon = sort_epsilon(n);
  tuning.c = c;
  StringRankTree tree(StringRankComparator(&instance.strings, params, seed),
                      tuning);
  for (std::uint32_t idx = 0; idx < n; ++idx) {
    tree.insert(idx);
  }

  if (variant == SortVariant::GetMin) {
    while (!tree.empty()) {
      auto* m = tree.min_node();
      result.permutation.push_back(m->key);
      tree.remove_node(m);
    }
  } else {
    for (std::uint32_t idx : tree.keys_inorder()) {
      result.permutation.push_back(idx);
    }
  }

  // Bijectivity completion: indices lost to failed insertions (occupied
  // slot after a bad walk) are appended in ascending order.
  if (result.permutation.size() < n) {
    std::vector<bool> seen(n, false);
    for (std::uint32_t idx : result.permutation) seen[idx] = true;
    for (std::uint32_t idx = 0; idx < n; ++idx) {
      if (!seen[idx]) result.permutation.push_back(idx);
    }
  }

  result.total_cost = tree.comparator().cost();
  result.comparator_calls = tree.comparator().calls();
  return result;
}

/// Ground-truth ordering of an instance: stable sort by string content.
inline std::vector<std::uint32_t> exact_sorted_order(
    const StringInstance& instance) {
  std::vector<std::uint32_t> order(instance.n());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return instance.strings[a] < instance.strings[b];
                   });
  return order;
}

/// Uniform random instance: n strings of length l over 'a'..'z'.
inline StringInstance random_instance(std::size_t n, std::size_t l,
                                      std::uint64_t seed) {
  StringInstance inst;
  inst.strings.reserve(n);
  RandomSource rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::string s(l, 'a');
    for (auto& ch : s) ch = static_cast<char>('a' + rng.below(26));
    inst.strings.push_back(std::move(s));
  }
  return inst;
}

struct ProbeRow {
  std::size_t n = 0;
  std::size_t l = 0;
  std::uint64_t seed = 0;
  std::uint64_t total_cost = 0;
  std::uint64_t comparator_calls = 0;
  bool correct = false;
};

/**
 * Cost-scaling probe: sorts random instances for every (n, l) grid cell and
 * `seeds` seeds per cell, recording cost and exact-order correctness. The
 * row stream is deterministic in `seed` (per-row seeds are derived, never
 * drawn sequentially).
 */
inline std::vector<ProbeRow> cost_scaling_probe(
    const std::vector<std::size_t>& ns, const std::vector<std::size_t>& ls,
    int seeds, const QuantumCostParams& params, std::uint64_t seed,
    SortVariant variant = SortVariant::GetMin, double c = 108.0) {
  std::vector<ProbeRow> rows;
  std::uint64_t row_no = 0;
  for (std::size_t n : ns) {
    for (std::size_t l : ls) {
      for (int t = 0; t < seeds; ++t, ++row_no) {
        std::uint64_t rs = RandomSource::derive(seed, row_no);
        StringInstance inst = random_instance(n, l, rs);
        SortResult res = sort_strings(inst, variant, params,
                                      RandomSource::derive(rs, 1), c);
        ProbeRow row{n, l, rs, res.total_cost, res.comparator_calls, false};
        row.correct = res.permutation == exact_sorted_order(inst);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace noisytrees
