#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "noisytrees/boosting.hpp"
#include "noisytrees/noise.hpp"
#include "noisytrees/rbtree.hpp"  // WalkTuning
#include "noisytrees/walker.hpp"

namespace noisytrees {

/**
 * Segment tree over cells 1..n under an associative operation f with neutral
 * element, where every index comparison made while navigating is noisy.
 *
 * Layout: the cell count is padded to k = 2^ceil(log2(n)); the k - 1
 * internal nodes and k leaves live in one flat array with the root at index
 * 0 and children of v at 2v+1 / 2v+2. Padding cells hold the neutral
 * element and are rejected as operation arguments, so they never influence
 * an aggregate.
 *
 * Positions are addressed by cursors carrying the node index plus the
 * inclusive segment borders [left, right]. Borders are never stored: a move
 * to a child splits at mid = floor((left + right) / 2); a move to the parent
 * recovers the border arithmetically (2*right - left + 1 for a left child,
 * 2*left - right - 1 for a right child). Stored aggregates are exact at all
 * times: internal node v always equals f(children), even right after a walk
 * that went wrong.
 */
template <typename T, typename F = std::plus<T>>
class SegTree {
 public:
  struct Cursor {
    std::size_t node = 0;
    long long left = 0;
    long long right = 0;
    bool operator==(const Cursor&) const = default;
  };

  SegTree(std::vector<T> values, T neutral, NoiseModel index_noise,
          std::uint64_t seed, WalkTuning tuning = {}, F f = {})
      : f_(f),
        neutral_(neutral),
        n_(values.size()),
        cmp_(index_noise, seed),
        tuning_(tuning) {
    if (n_ == 0) throw std::invalid_argument("segment tree needs >= 1 cell");
    tuning_.validate();
    k_ = std::bit_ceil(n_);
    height_ = std::countr_zero(k_);
    data_.assign(2 * k_ - 1, neutral_);
    for (std::size_t i = 0; i < n_; ++i) data_[k_ - 1 + i] = values[i];
    for (std::size_t v = k_ - 1; v-- > 0;) pull(v);
    k_dir_ = repetitions_for(cmp_.raw_error(), tuning_.per_step_boost);
    k_bound_ = repetitions_for(cmp_.raw_error(), tuning_.per_step_boost / 2.0);
  }

  std::size_t size() const { return n_; }
  std::size_t padded_size() const { return k_; }
  int tree_height() const { return height_; }

  /// Exact leaf read, 1-based. Oracle/test helper; not a noisy operation.
  const T& cell(std::size_t i) const {
    require_in_range(i);
    return data_[k_ - 1 + (i - 1)];
  }

  const T& root_aggregate() const { return data_[0]; }

  Cursor root_cursor() const { return {0, 1, static_cast<long long>(k_)}; }
  bool is_leaf(const Cursor& c) const { return c.node >= k_ - 1; }

  Cursor left_child(const Cursor& c) const {
    long long mid = (c.left + c.right) / 2;
    return {2 * c.node + 1, c.left, mid};
  }
  Cursor right_child(const Cursor& c) const {
    long long mid = (c.left + c.right) / 2;
    return {2 * c.node + 2, mid + 1, c.right};
  }
  std::optional<Cursor> parent_cursor(const Cursor& c) const {
    if (c.node == 0) return std::nullopt;
    std::size_t p = (c.node - 1) / 2;
    if (c.node % 2 == 1) {  // left child
      return Cursor{p, c.left, 2 * c.right - c.left + 1};
    }
    return Cursor{p, 2 * c.left - c.right - 1, c.right};
  }

  /**
   * Assigns `value` to cell i: a noisy walk locates the leaf, the final
   * position is assigned if it is a leaf, and the aggregates along the
   * final position's exact root path are recomputed bottom-up. With
   * probability <= epsilon the assignment lands on a wrong cell (or on no
   * cell); aggregates stay exact over the stored leaves either way.
   */
  void update(std::size_t i, T value) {
    require_in_range(i);
    Nav nav(this, static_cast<long long>(i), std::move(value));
    WalkConfig cfg = walk_config();
    cfg.order = ProcessOrder::BottomUp;
    run_operation(nav, cfg);
  }

  /**
   * Aggregate over cells [i, j] (inclusive, 1-based): two noisy walks
   * locate the boundary leaves, then the canonical cover between the two
   * exact root paths is combined from stored aggregates without further
   * comparisons. Error probability <= 2 * epsilon (one per boundary walk).
   */
  T query(std::size_t i, std::size_t j) {
    require_in_range(i);
    require_in_range(j);
    if (j < i) throw std::invalid_argument("query: j < i");
    auto path_i = locate_path(static_cast<long long>(i));
    auto path_j = locate_path(static_cast<long long>(j));
    const Cursor leaf_i = path_i.back();
    const Cursor leaf_j = path_j.back();
    if (leaf_i.node == leaf_j.node) return data_[leaf_i.node];

    std::size_t lca = 0;
    while (lca + 1 < path_i.size() && lca + 1 < path_j.size() &&
           path_i[lca + 1].node == path_j[lca + 1].node) {
      ++lca;
    }
    T acc_left = data_[leaf_i.node];
    for (std::size_t t = path_i.size() - 1; t > lca + 1; --t) {
      const Cursor& child = path_i[t];
      const Cursor& par = path_i[t - 1];
      if (child.node == 2 * par.node + 1) {
        acc_left = f_(acc_left, data_[2 * par.node + 2]);
      }
    }
    T acc_right = data_[leaf_j.node];
    for (std::size_t t = path_j.size() - 1; t > lca + 1; --t) {
      const Cursor& child = path_j[t];
      const Cursor& par = path_j[t - 1];
      if (child.node == 2 * par.node + 2) {
        acc_right = f_(data_[2 * par.node + 1], acc_right);
      }
    }
    return f_(acc_left, acc_right);
  }

  NoisyComparator<long long>& comparator() { return cmp_; }
  const NoisyComparator<long long>& comparator() const { return cmp_; }
  const WalkTuning& tuning() const { return tuning_; }

  WalkConfig walk_config() const {
    WalkConfig cfg;
    cfg.epsilon = tuning_.epsilon;
    cfg.c = tuning_.c;
    cfg.per_step_boost = tuning_.per_step_boost;
    cfg.height = height_;
    return cfg;
  }

  /// Walk navigation for locating leaf `i`. Borders ride along in the
  /// cursor, so the frame hooks are no-ops; the parent move is exact border
  /// arithmetic. process_node assigns the pending value at the leaf (if
  /// any) and recomputes internal aggregates, so a BottomUp pass over the
  /// final path is a complete update.
  class Nav {
   public:
    using NodeRef = Cursor;

    Nav(SegTree* tree, long long i, std::optional<T> assign = std::nullopt)
        : tree_(tree), i_(i), assign_(std::move(assign)) {}

    Cursor root() const { return tree_->root_cursor(); }
    std::optional<Cursor> parent(const Cursor& c) const {
      return tree_->parent_cursor(c);
    }

    bool is_node_correct(const Cursor& c) {
      // left <= i and i <= right, one boosted comparison each
      if (vote(c.left, tree_->k_bound_) == Ordering3::Greater) return false;
      if (vote(c.right, tree_->k_bound_) == Ordering3::Less) return false;
      return true;
    }

    bool is_target(const Cursor& c) {
      // left = i = right, one boosted comparison per border
      if (vote(c.left, tree_->k_bound_) != Ordering3::Equal) return false;
      return vote(c.right, tree_->k_bound_) == Ordering3::Equal;
    }

    Cursor select_child(const Cursor& c) {
      if (tree_->is_leaf(c)) return c;
      long long mid = (c.left + c.right) / 2;
      // descend left iff i <= mid
      Ordering3 o = plurality_vote(
          [&] { return tree_->cmp_.noisy(i_, mid); }, tree_->k_dir_);
      return o == Ordering3::Greater ? tree_->right_child(c)
                                     : tree_->left_child(c);
    }

    void descended(const Cursor&) {}
    void ascended() {}

    void process_node(const Cursor& c) {
      if (tree_->is_leaf(c)) {
        if (assign_) tree_->data_[c.node] = *assign_;
      } else {
        tree_->pull(c.node);
      }
    }

   private:
    /// Plurality over noisy three-way comparisons of `border` vs the target
    /// index, reported as compare(border, i).
    Ordering3 vote(long long border, int reps) {
      return plurality_vote(
          [&] { return tree_->cmp_.noisy(border, i_); }, reps);
    }

    SegTree* tree_;
    long long i_;
    std::optional<T> assign_;
  };

 private:
  friend class Nav;

  void pull(std::size_t v) { data_[v] = f_(data_[2 * v + 1], data_[2 * v + 2]); }

  void require_in_range(std::size_t i) const {
    if (i < 1 || i > n_) {
      throw std::invalid_argument("cell index outside [1, n]");
    }
  }

  /// One noisy walk for leaf i; returns the exact root path of the final
  /// position, extended structurally leftward if the walk ended above the
  /// leaf level (a failed walk still yields a well-defined path).
  std::vector<Cursor> locate_path(long long i) {
    Nav nav(this, i);
    Cursor end = walk(nav, walk_config());
    std::vector<Cursor> path = reconstruct_path(nav, end);
    while (!is_leaf(path.back())) path.push_back(left_child(path.back()));
    return path;
  }

  F f_;
  T neutral_;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  int height_ = 0;
  std::vector<T> data_;
  NoisyComparator<long long> cmp_;
  WalkTuning tuning_;
  int k_dir_ = 1;
  int k_bound_ = 1;
};

}  // namespace noisytrees
