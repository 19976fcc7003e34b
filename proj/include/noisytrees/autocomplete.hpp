#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "noisytrees/boosting.hpp"
#include "noisytrees/quantum.hpp"
#include "noisytrees/rbtree.hpp"
#include "noisytrees/walker.hpp"

namespace noisytrees {

/// Per-node bookkeeping of the autocomplete tree: how often this exact
/// string was added, when it was first added, and the best entry of the
/// whole subtree. "Best" means highest count, ties to the smallest
/// first-add query number.
struct AutoEntry {
  std::uint32_t first_query = 0;  // 1-based number of the query that added it
  std::uint32_t count = 0;        // times added
  std::uint32_t best_query = 0;   // best entry in this subtree: its first_query
  std::uint32_t best_count = 0;   // and its count
};

namespace detail {
inline bool auto_better(std::uint32_t count, std::uint32_t query,
                        std::uint32_t than_count, std::uint32_t than_query) {
  return count > than_count || (count == than_count && query < than_query);
}
}  // namespace detail

/// Pull rule: subtree best = max over the node's own entry and the two
/// children's bests. Rotations only need the two rotated nodes re-pulled
/// (a rotation never changes which nodes a subtree above it contains).
struct AutoAugment {
  template <typename Node>
  static void pull(Node* v) {
    std::uint32_t bq = v->aug.first_query;
    std::uint32_t bc = v->aug.count;
    for (Node* ch : {v->left, v->right}) {
      if (ch && detail::auto_better(ch->aug.best_count, ch->aug.best_query, bc, bq)) {
        bc = ch->aug.best_count;
        bq = ch->aug.best_query;
      }
    }
    v->aug.best_query = bq;
    v->aug.best_count = bc;
  }
};

/// Comparator of stored-string indices against query strings through the
/// noisy costed comparison. Keys are positions in the dictionary's string
/// store; distinct nodes always hold distinct strings, so no tie-break is
/// needed.
class PrefixDictComparator {
 public:
  PrefixDictComparator(const std::vector<std::string>* store,
                       QuantumCostParams params, std::uint64_t seed)
      : store_(store), params_(params), rng_(seed) {
    params_.validate();
  }

  Ordering3 noisy(std::uint32_t key, const std::string& q) {
    return noisy_str((*store_)[key], q);
  }
  Ordering3 noisy(std::uint32_t a, std::uint32_t b) {
    return noisy_str((*store_)[a], (*store_)[b]);
  }

  Ordering3 exact(std::uint32_t key, const std::string& q) const {
    return compare_strings((*store_)[key], q);
  }
  Ordering3 exact(std::uint32_t a, std::uint32_t b) const {
    return compare_strings((*store_)[a], (*store_)[b]);
  }

  double raw_error() const { return params_.xi; }
  std::uint64_t calls() const { return calls_; }
  std::uint64_t cost() const { return cost_; }

 private:
  Ordering3 noisy_str(const std::string& a, const std::string& b) {
    ++calls_;
    auto r = quantum_cost_compare(a, b, params_, rng_);
    cost_ += r.cost;
    return r.ordering;
  }

  const std::vector<std::string>* store_;
  QuantumCostParams params_;
  RandomSource rng_;
  std::uint64_t calls_ = 0;
  std::uint64_t cost_ = 0;
};

struct AutocompleteParams {
  QuantumCostParams quantum{};  // per-comparison error and cost model
  double epsilon = 0.01;        // per-query failure budget component
  double c = 108.0;
  double per_step_boost = 0.1;
  char alphabet_lo = 'a';
  char alphabet_hi = 'z';
};

/**
 * Frequency-augmented dictionary answering "most frequent completion"
 * queries. Strings are stored once each in a red-black tree ordered by
 * content; every node carries (first-add query number, add count) plus the
 * subtree best of those pairs.
 *
 * A query for prefix t works on the key range [t, t'), where t' is the
 * prefix successor of t (smallest string that is greater than every string
 * starting with t). Three noisy walks answer it:
 *
 *   1. find the split node: the unique node whose key lies in [t, t') while
 *      its subtree bounds still bracket the whole range;
 *   2. in its left subtree, find the smallest key >= t and fold entry +
 *      right-subtree bests while ascending;
 *   3. in its right subtree, find the largest key < t' and fold entry +
 *      left-subtree bests while ascending.
 *
 * All fold arithmetic is exact integer work on stored augmentation; the
 * only noisy calls are the string comparisons inside the walks and their
 * final verifications. Total failure probability <= 3 * epsilon (each
 * phase spends epsilon/2 on its walk and epsilon/2 on verification).
 */
class Dictionary {
 public:
  using Tree = RBTree<std::uint32_t, PrefixDictComparator, AutoEntry, AutoAugment>;
  using Node = Tree::Node;

  struct QueryResult {
    std::uint32_t query_no = 0;
    bool found = false;
    std::uint32_t best_query = 0;  // first-add query number of the answer
    std::uint32_t best_count = 0;  // how many times it was added
  };

  Dictionary(AutocompleteParams params, std::uint64_t seed)
      : params_(params),
        tree_(PrefixDictComparator(&store_, params.quantum, seed),
              WalkTuning{params.epsilon, params.c, params.per_step_boost}) {
    if (params_.alphabet_lo > params_.alphabet_hi) {
      throw std::invalid_argument("alphabet bounds out of order");
    }
    double xi = params_.quantum.xi;
    double boost = params_.per_step_boost;
    k_dir_ = repetitions_for(xi, boost);
    k_half_ = repetitions_for(xi, boost / 2.0);
    k_quarter_ = repetitions_for(xi, boost / 4.0);
    k_verify_phase_ = repetitions_for(xi, params_.epsilon / 2.0);
    k_verify_split_ = repetitions_for(xi, params_.epsilon / 8.0);
  }

  /// Smallest string greater than every string with prefix t: strip
  /// trailing alphabet-maximum characters, then increment the last one.
  /// Empty result (all characters were the maximum) means "no bound".
  static std::optional<std::string> prefix_successor(std::string t, char lo,
                                                     char hi) {
    (void)lo;
    while (!t.empty() && t.back() == hi) t.pop_back();
    if (t.empty()) return std::nullopt;
    ++t.back();
    return t;
  }

  std::optional<std::string> prefix_successor(const std::string& t) const {
    return prefix_successor(t, params_.alphabet_lo, params_.alphabet_hi);
  }

  /// Records one addition of s (one query). A walk finds where s lives or
  /// belongs; a boosted verification at the epsilon target gates the
  /// mutation. With probability <= 2 * epsilon the count lands on a wrong
  /// node or a duplicate node is created; the structure stays a valid
  /// red-black tree with exact augmentation regardless.
  void add_string(const std::string& s) {
    std::uint32_t query_no = ++next_query_;
    require_in_alphabet(s);
    store_.push_back(s);
    auto id = static_cast<std::uint32_t>(store_.size() - 1);
    AutoEntry entry{query_no, 1, query_no, 1};
    auto [node, attached] = tree_.insert_with_query(id, s, entry);
    if (attached) return;
    store_.pop_back();
    if (node) {  // verified present at `node`
      node->aug.count += 1;
      tree_.pull_to_root(node);
    }
    // node == nullptr: failed walk left no safe slot; the addition is lost.
  }

  /// Most frequent string with prefix t; ties resolve to the earliest
  /// first-add. found == false when no completion exists (or, with
  /// probability <= 3 * epsilon, spuriously).
  QueryResult query_complement(const std::string& t) {
    QueryResult res{++next_query_, false, 0, 0};
    require_in_alphabet(t);
    if (tree_.empty()) return res;
    std::optional<std::string> succ = prefix_successor(t);

    // Phase 1: walk to the split node of [t, t').
    SplitNav nav(*this, t, succ);
    Node* u = walk(nav, phase_config());
    BoundsFrame<Node> fu = nav.frame();
    if (!verify_split(u, fu, t, succ)) return res;

    Best best;
    fold_entry(best, u);
    if (u->left) fold_left_side(u, fu, t, best);
    if (u->right) fold_right_side(u, fu, succ, best);
    res.found = true;
    res.best_query = best.query;
    res.best_count = best.count;
    return res;
  }

  std::uint32_t queries_issued() const { return next_query_; }
  std::size_t distinct_strings() const { return tree_.size(); }
  const std::vector<std::string>& store() const { return store_; }
  Tree& tree() { return tree_; }
  const Tree& tree() const { return tree_; }
  const AutocompleteParams& params() const { return params_; }

 private:
  struct Best {
    std::uint32_t count = 0;  // count 0 means "nothing folded yet"
    std::uint32_t query = 0;
  };

  static void fold(Best& b, std::uint32_t count, std::uint32_t query) {
    if (detail::auto_better(count, query, b.count, b.query)) b = {count, query};
  }
  static void fold_entry(Best& b, Node* v) {
    fold(b, v->aug.count, v->aug.first_query);
  }
  static void fold_subtree(Best& b, Node* v) {
    if (v) fold(b, v->aug.best_count, v->aug.best_query);
  }

  WalkConfig phase_config() const {
    return tree_.walk_config(params_.epsilon / 2.0);
  }

  Ordering3 boosted(Node* v, const std::string& q, int reps) {
    return tree_.boosted_at(v, q, reps);
  }

  /// Split-node target predicate, verified at the epsilon/2 budget spread
  /// over its (up to four) noisy comparisons. Bound comparisons against
  /// missing owners are exact sentinel logic.
  bool verify_split(Node* u, const BoundsFrame<Node>& f, const std::string& t,
                    const std::optional<std::string>& succ) {
    if (f.lo && boosted(f.lo, t, k_verify_split_) != Ordering3::Less) {
      return false;  // need beta < t
    }
    if (boosted(u, t, k_verify_split_) == Ordering3::Less) {
      return false;  // need t <= key(u)
    }
    if (succ) {
      if (boosted(u, *succ, k_verify_split_) != Ordering3::Less) {
        return false;  // need key(u) < t'
      }
      if (f.hi && boosted(f.hi, *succ, k_verify_split_) == Ordering3::Less) {
        return false;  // need t' <= gamma
      }
    } else if (f.hi) {
      return false;  // t' is unbounded: gamma must be the +inf sentinel
    }
    return true;
  }

  /// Phase 2: smallest key >= t inside u's left subtree, then fold its
  /// entry, its right subtree, and the left-child ascent up to (excluding)
  /// u. All folds are exact.
  void fold_left_side(Node* u, const BoundsFrame<Node>& fu, const std::string& t,
                      Best& best) {
    auto nav = tree_.make_nav(t, TargetMode::InsertionPoint, u->left,
                              BoundsFrame<Node>{fu.lo, u});
    Node* f2 = walk(nav, phase_config());
    Ordering3 o = boosted(f2, t, k_verify_phase_);
    Node* v_l = nullptr;
    if (o == Ordering3::Equal) {
      v_l = f2;
    } else if (o == Ordering3::Greater) {
      if (f2->left) return;  // walk failure: no safe answer on this side
      v_l = f2;
    } else {
      if (f2->right) return;
      Node* hi = nav.frame().hi;  // successor of the final position
      v_l = hi == u ? nullptr : hi;
    }
    if (!v_l) return;  // left subtree holds nothing >= t
    fold_entry(best, v_l);
    fold_subtree(best, v_l->right);
    for (Node* v = v_l;;) {
      Node* p = v->parent;
      if (p == u) break;
      if (v == p->left) {
        fold_entry(best, p);
        fold_subtree(best, p->right);
      }
      v = p;
    }
  }

  /// Phase 3: largest key < t' inside u's right subtree, mirrored folds.
  /// An unbounded t' folds the whole right subtree without a walk.
  void fold_right_side(Node* u, const BoundsFrame<Node>& fu,
                       const std::optional<std::string>& succ, Best& best) {
    if (!succ) {
      fold_subtree(best, u->right);
      return;
    }
    const std::string& t2 = *succ;
    auto nav = tree_.make_nav(t2, TargetMode::InsertionPoint, u->right,
                              BoundsFrame<Node>{u, fu.hi});
    Node* f3 = walk(nav, phase_config());
    Ordering3 o = boosted(f3, t2, k_verify_phase_);
    Node* v_r = nullptr;
    if (o == Ordering3::Equal) {
      // t' itself is stored; completions end strictly below it
      if (f3->left) {
        v_r = Tree::maximum(f3->left);
      } else {
        Node* lo = nav.frame().lo;
        v_r = lo == u ? nullptr : lo;
      }
    } else if (o == Ordering3::Less) {
      if (f3->right) return;
      v_r = f3;
    } else {
      if (f3->left) return;
      Node* lo = nav.frame().lo;  // predecessor of the final position
      v_r = lo == u ? nullptr : lo;
    }
    if (!v_r) return;
    fold_entry(best, v_r);
    fold_subtree(best, v_r->left);
    for (Node* v = v_r;;) {
      Node* p = v->parent;
      if (p == u) break;
      if (v == p->right) {
        fold_entry(best, p);
        fold_subtree(best, p->left);
      }
      v = p;
    }
  }

  /// Walk navigation for the split node of [t, t'): the target is the
  /// unique node with beta < t <= key < t' <= gamma (strict beta bound:
  /// with <= the predicate stops being unique when t itself is stored).
  /// The walk descends toward t; correctness only needs the two bound
  /// checks. t' comparisons against sentinels are exact.
  class SplitNav {
   public:
    using NodeRef = Node*;

    SplitNav(Dictionary& d, const std::string& t,
             const std::optional<std::string>& succ)
        : d_(d), t_(t), succ_(succ) {
      frames_.reserve(16);
      frames_.push_back({});
    }

    Node* root() const { return d_.tree_.root_node(); }
    std::optional<Node*> parent(Node* v) const {
      if (v == root()) return std::nullopt;
      return v->parent;
    }

    bool is_node_correct(Node*) {
      const BoundsFrame<Node>& f = frames_.back();
      if (f.lo && d_.boosted(f.lo, t_, d_.k_half_) != Ordering3::Less) {
        return false;  // beta < t
      }
      if (succ_) {
        if (f.hi && d_.boosted(f.hi, *succ_, d_.k_half_) == Ordering3::Less) {
          return false;  // t' <= gamma
        }
      } else if (f.hi) {
        return false;
      }
      return true;
    }

    bool is_target(Node* v) {
      const BoundsFrame<Node>& f = frames_.back();
      if (f.lo && d_.boosted(f.lo, t_, d_.k_quarter_) != Ordering3::Less) {
        return false;
      }
      if (d_.boosted(v, t_, d_.k_quarter_) == Ordering3::Less) {
        return false;  // t <= key
      }
      if (succ_) {
        if (d_.boosted(v, *succ_, d_.k_quarter_) != Ordering3::Less) {
          return false;  // key < t'
        }
        if (f.hi && d_.boosted(f.hi, *succ_, d_.k_quarter_) == Ordering3::Less) {
          return false;
        }
      } else if (f.hi) {
        return false;
      }
      return true;
    }

    Node* select_child(Node* v) {
      Ordering3 o = d_.boosted(v, t_, d_.k_dir_);
      if (o == Ordering3::Equal) return v;
      Node* child = o == Ordering3::Greater ? v->left : v->right;
      return child ? child : v;
    }

    void descended(Node* child) {
      const BoundsFrame<Node>& f = frames_.back();
      Node* p = child->parent;
      frames_.push_back(child == p->left ? BoundsFrame<Node>{f.lo, p}
                                         : BoundsFrame<Node>{p, f.hi});
    }
    void ascended() { frames_.pop_back(); }
    void process_node(Node*) {}

    const BoundsFrame<Node>& frame() const { return frames_.back(); }

   private:
    Dictionary& d_;
    const std::string& t_;
    const std::optional<std::string>& succ_;
    std::vector<BoundsFrame<Node>> frames_;
  };

  void require_in_alphabet(const std::string& s) const {
    for (char ch : s) {
      if (ch < params_.alphabet_lo || ch > params_.alphabet_hi) {
        throw std::invalid_argument("string leaves the configured alphabet");
      }
    }
  }

  AutocompleteParams params_;
  std::vector<std::string> store_;
  Tree tree_;
  std::uint32_t next_query_ = 0;
  int k_dir_ = 1;
  int k_half_ = 1;
  int k_quarter_ = 1;
  int k_verify_phase_ = 1;
  int k_verify_split_ = 1;
};

}  // namespace noisytrees
