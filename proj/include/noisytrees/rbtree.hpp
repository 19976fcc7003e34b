#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "noisytrees/boosting.hpp"
#include "noisytrees/ordering.hpp"
#include "noisytrees/walker.hpp"

namespace noisytrees {

/**
 * Comparator contract for noisy trees. Keys live in the tree; queries are
 * what operations search with (the same type for plain trees, a different
 * one for index-keyed string trees). noisy() errs with probability at most
 * raw_error() per call and advances calls(); exact() is ground truth for
 * audits and never counts.
 */
template <typename C, typename Key, typename Q>
concept TreeComparator = requires(C c, const C cc, const Key& k, const Q& q) {
  { c.noisy(k, q) } -> std::same_as<Ordering3>;
  { cc.exact(k, q) } -> std::same_as<Ordering3>;
  { cc.exact(k, k) } -> std::same_as<Ordering3>;
  { cc.raw_error() } -> std::convertible_to<double>;
  { cc.calls() } -> std::convertible_to<std::uint64_t>;
};

enum class Color : unsigned char { Red, Black };

struct NoPayload {};

template <typename Key, typename Payload>
struct RBNode {
  Key key;
  RBNode* parent = nullptr;
  RBNode* left = nullptr;
  RBNode* right = nullptr;
  Color color = Color::Red;
  Payload aug{};
};

/// Augmentation policy: pull(v) recomputes v's augmented data from its own
/// fields and its children. Called after every structural change that can
/// affect v's subtree membership. The default maintains nothing.
struct NoAugment {
  template <typename Node>
  static void pull(Node*) {}
};

/// Per-tree knobs for walk-based operations.
struct WalkTuning {
  double epsilon = 0.01;        // per-operation failure target
  double c = 108.0;             // step-budget constant
  double per_step_boost = 0.1;  // per-predicate error after boosting

  void validate() const {
    if (!(epsilon > 0.0) || !(epsilon < 0.5)) {
      throw std::invalid_argument("walk tuning: epsilon must lie in (0, 0.5)");
    }
    if (!(c > 0.0)) throw std::invalid_argument("walk tuning: c must be positive");
    if (!(per_step_boost > 0.0) || !(per_step_boost < 0.5)) {
      throw std::invalid_argument("walk tuning: boost target must lie in (0, 0.5)");
    }
  }
};

/// Key interval (beta, gamma) bracketing a walk position. The owners are the
/// ancestor nodes whose keys bound the current subtree; nullptr means the
/// corresponding infinity. Pushed on every descent, popped on every ascent.
template <typename Node>
struct BoundsFrame {
  Node* lo = nullptr;  // beta owner: every key below the position exceeds its key
  Node* hi = nullptr;  // gamma owner: every key below is smaller than its key
};

/// What a walk is looking for.
enum class TargetMode {
  /// The node whose key compares equal to the query.
  Equal,
  /// The node where an exact descent for the query terminates: either an
  /// equal key, or a node whose child slot in the query's direction is empty.
  InsertionPoint,
};

template <typename Tree, typename Q>
class BoundsNav;

template <typename Key, typename Cmp, typename Payload = NoPayload,
          typename Aug = NoAugment>
  requires TreeComparator<Cmp, Key, Key>
class RBTree {
 public:
  using Node = RBNode<Key, Payload>;

  explicit RBTree(Cmp cmp, WalkTuning tuning = {})
      : cmp_(std::move(cmp)), tuning_(tuning) {
    tuning_.validate();
    k_dir_ = repetitions_for(cmp_.raw_error(), tuning_.per_step_boost);
    k_bound_ = repetitions_for(cmp_.raw_error(), tuning_.per_step_boost / 2.0);
    k_verify_ = repetitions_for(cmp_.raw_error(), tuning_.epsilon);
  }

  RBTree(const RBTree&) = delete;
  RBTree& operator=(const RBTree&) = delete;

  ~RBTree() { destroy(root_); }

  // ----- noisy operations ---------------------------------------------

  /// Walks toward the node holding x and verifies the final node with one
  /// boosted comparison at the epsilon target. Returns nullptr when absent
  /// (or, with probability <= 2 * epsilon, for a present key).
  Node* search(const Key& x) {
    if (!root_) return nullptr;
    auto nav = make_nav(x, TargetMode::Equal);
    Node* u = walk(nav, walk_config());
    return boosted_at(u, x, k_verify_) == Ordering3::Equal ? u : nullptr;
  }

  /// Inserts x if absent. Walks to the insertion point, then gates the
  /// mutation behind one boosted comparison at the epsilon target: equal
  /// means duplicate (rejected), otherwise the new node is attached in the
  /// verified direction when that slot is free.
  bool insert(const Key& x) { return insert_with_query(x, x, Payload{}).second; }

  /// Removes the node holding x if the boosted verification confirms it.
  /// Rebalancing is purely structural: no comparator calls.
  bool remove(const Key& x) {
    if (!root_) return false;
    auto nav = make_nav(x, TargetMode::Equal);
    Node* u = walk(nav, walk_config());
    if (boosted_at(u, x, k_verify_) != Ordering3::Equal) return false;
    remove_node(u);
    return true;
  }

  /// Generic insertion used by the homogeneous insert() and by layers whose
  /// queries differ from keys. Returns {node, true} on attach, {node, false}
  /// when the verification found the query already present at `node`, and
  /// {nullptr, false} when the walk failed (no safe slot).
  template <typename Q>
    requires TreeComparator<Cmp, Key, Q>
  std::pair<Node*, bool> insert_with_query(const Key& k, const Q& q, Payload pay) {
    if (!root_) return {attach(nullptr, false, k, std::move(pay)), true};
    auto nav = make_nav(q, TargetMode::InsertionPoint);
    Node* u = walk(nav, walk_config());
    Ordering3 o = boosted_at(u, q, k_verify_);
    if (o == Ordering3::Equal) return {u, false};
    bool as_left = o == Ordering3::Greater;  // key above query: query goes left
    Node* slot = as_left ? u->left : u->right;
    if (slot) return {nullptr, false};
    return {attach(u, as_left, k, std::move(pay)), true};
  }

  // ----- structural operations (exact, comparison-free) ---------------

  /// Attaches a fresh red node under `parent` (nullptr parent: new root of an
  /// empty tree), restores the red-black shape, and repairs augmented data.
  Node* attach(Node* parent, bool as_left, const Key& k, Payload pay) {
    Node* n = new Node{k, parent, nullptr, nullptr, Color::Red, std::move(pay)};
    if (!parent) {
      if (root_) {
        delete n;
        throw std::logic_error("attach: tree is not empty");
      }
      root_ = n;
    } else {
      Node*& slot = as_left ? parent->left : parent->right;
      if (slot) {
        delete n;
        throw std::logic_error("attach: slot is occupied");
      }
      slot = n;
    }
    ++size_;
    pull_to_root(n);
    insert_fixup(n);
    return n;
  }

  /// Removes a node by pointer: transplant with the structural successor
  /// (leftmost of the right subtree), then recoloring/rotations. No
  /// comparator calls anywhere on this path.
  void remove_node(Node* z) {
    Node* y = z;
    Color y_color = y->color;
    Node* x = nullptr;
    Node* x_parent = nullptr;
    if (!z->left) {
      x = z->right;
      x_parent = z->parent;
      transplant(z, z->right);
    } else if (!z->right) {
      x = z->left;
      x_parent = z->parent;
      transplant(z, z->left);
    } else {
      y = minimum(z->right);
      y_color = y->color;
      x = y->right;
      if (y->parent == z) {
        x_parent = y;
      } else {
        x_parent = y->parent;
        transplant(y, y->right);
        y->right = z->right;
        y->right->parent = y;
      }
      transplant(z, y);
      y->left = z->left;
      y->left->parent = y;
      y->color = z->color;
    }
    --size_;
    if (x_parent) {
      pull_to_root(x_parent);
    } else if (root_) {
      pull_to_root(root_);
    }
    if (y_color == Color::Black) delete_fixup(x, x_parent);
    delete z;
  }

  static Node* minimum(Node* v) {
    while (v && v->left) v = v->left;
    return v;
  }
  static Node* maximum(Node* v) {
    while (v && v->right) v = v->right;
    return v;
  }

  Node* min_node() const { return minimum(root_); }

  /// Recomputes augmented data from `v` up to the root.
  void pull_to_root(Node* v) {
    for (; v; v = v->parent) Aug::pull(v);
  }

  // ----- inspection ----------------------------------------------------

  Node* root_node() const { return root_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  template <typename F>
  void inorder(F&& f) const {
    inorder_rec(root_, f);
  }

  std::vector<Key> keys_inorder() const {
    std::vector<Key> keys;
    keys.reserve(size_);
    inorder([&](const Node* v) { keys.push_back(v->key); });
    return keys;
  }

  /// Exact descent with the ground-truth comparator. Test/oracle helper;
  /// never used by the noisy operations.
  Node* find_exact(const Key& x) const {
    Node* v = root_;
    while (v) {
      Ordering3 o = cmp_.exact(v->key, x);
      if (o == Ordering3::Equal) return v;
      v = o == Ordering3::Greater ? v->left : v->right;
    }
    return nullptr;
  }

  int height() const { return height_rec(root_); }

  /// Height hint for walk budgets: the red-black bound 2*log2(size + 1),
  /// rounded up. Always >= the actual height, so step budgets stay valid.
  int height_hint() const {
    if (size_ <= 1) return static_cast<int>(size_);
    return static_cast<int>(
        std::ceil(2.0 * std::log2(static_cast<double>(size_) + 1.0)));
  }

  WalkConfig walk_config(std::optional<double> epsilon = std::nullopt) const {
    WalkConfig cfg;
    cfg.epsilon = epsilon.value_or(tuning_.epsilon);
    cfg.c = tuning_.c;
    cfg.per_step_boost = tuning_.per_step_boost;
    cfg.height = height_hint();
    return cfg;
  }

  template <typename Q>
  BoundsNav<RBTree, Q> make_nav(const Q& q, TargetMode mode,
                                Node* subtree_root = nullptr,
                                BoundsFrame<Node> seed = {}) {
    return BoundsNav<RBTree, Q>(*this, q, mode, subtree_root, seed);
  }

  Cmp& comparator() { return cmp_; }
  const Cmp& comparator() const { return cmp_; }
  const WalkTuning& tuning() const { return tuning_; }

  int reps_direction() const { return k_dir_; }
  int reps_bound() const { return k_bound_; }
  int reps_verify() const { return k_verify_; }

  /// Enables exact-order auditing of the bounds stack on every descent.
  void set_audit(bool on) { audit_ = on; }
  bool audit() const { return audit_; }

  template <typename Q>
  Ordering3 boosted_at(Node* v, const Q& q, int reps) {
    return plurality_vote([&] { return cmp_.noisy(v->key, q); }, reps);
  }

  // ----- invariant checking --------------------------------------------

  struct InvariantReport {
    bool ok = true;
    std::string detail;
  };

  /// Exact audit: parent pointers, root color, no red-red edge, equal black
  /// height on every root-null path, stored size, and (optionally) strict
  /// BST key order under the exact comparator. Noisy operations can misplace
  /// keys, so structural checks and the order check are separable.
  InvariantReport check_invariants(bool check_order = true) const {
    InvariantReport rep;
    if (root_ && root_->parent) {
      return {false, "root has a parent pointer"};
    }
    if (root_ && root_->color != Color::Black) {
      return {false, "root is red"};
    }
    std::size_t count = 0;
    int bh = black_height_rec(root_, count, rep);
    if (bh < 0) return rep;
    if (count != size_) {
      return {false, "stored size " + std::to_string(size_) +
                         " != node count " + std::to_string(count)};
    }
    if (check_order && root_) {
      const Node* prev = nullptr;
      bool ordered = true;
      inorder([&](const Node* v) {
        if (prev && cmp_.exact(prev->key, v->key) != Ordering3::Less) {
          ordered = false;
        }
        prev = v;
      });
      if (!ordered) return {false, "inorder keys are not strictly increasing"};
    }
    return rep;
  }

 private:
  void rotate_left(Node* x) {
    Node* y = x->right;
    x->right = y->left;
    if (y->left) y->left->parent = x;
    y->parent = x->parent;
    replace_in_parent(x, y);
    y->left = x;
    x->parent = y;
    Aug::pull(x);
    Aug::pull(y);
  }

  void rotate_right(Node* x) {
    Node* y = x->left;
    x->left = y->right;
    if (y->right) y->right->parent = x;
    y->parent = x->parent;
    replace_in_parent(x, y);
    y->right = x;
    x->parent = y;
    Aug::pull(x);
    Aug::pull(y);
  }

  void replace_in_parent(Node* x, Node* y) {
    if (!x->parent) {
      root_ = y;
    } else if (x == x->parent->left) {
      x->parent->left = y;
    } else {
      x->parent->right = y;
    }
  }

  void transplant(Node* u, Node* v) {
    if (!u->parent) {
      root_ = v;
    } else if (u == u->parent->left) {
      u->parent->left = v;
    } else {
      u->parent->right = v;
    }
    if (v) v->parent = u->parent;
  }

  void insert_fixup(Node* z) {
    while (z->parent && z->parent->color == Color::Red) {
      Node* p = z->parent;
      Node* g = p->parent;  // exists: a red parent is never the root
      if (p == g->left) {
        Node* u = g->right;
        if (u && u->color == Color::Red) {
          p->color = Color::Black;
          u->color = Color::Black;
          g->color = Color::Red;
          z = g;
        } else {
          if (z == p->right) {
            z = p;
            rotate_left(z);
          }
          p = z->parent;
          g = p->parent;
          p->color = Color::Black;
          g->color = Color::Red;
          rotate_right(g);
        }
      } else {
        Node* u = g->left;
        if (u && u->color == Color::Red) {
          p->color = Color::Black;
          u->color = Color::Black;
          g->color = Color::Red;
          z = g;
        } else {
          if (z == p->left) {
            z = p;
            rotate_right(z);
          }
          p = z->parent;
          g = p->parent;
          p->color = Color::Black;
          g->color = Color::Red;
          rotate_left(g);
        }
      }
    }
    root_->color = Color::Black;
  }

  void delete_fixup(Node* x, Node* xp) {
    while (x != root_ && (!x || x->color == Color::Black)) {
      if (!xp) break;
      if (x == xp->left) {
        Node* w = xp->right;  // exists: the removed node was black
        if (w->color == Color::Red) {
          w->color = Color::Black;
          xp->color = Color::Red;
          rotate_left(xp);
          w = xp->right;
        }
        bool left_black = !w->left || w->left->color == Color::Black;
        bool right_black = !w->right || w->right->color == Color::Black;
        if (left_black && right_black) {
          w->color = Color::Red;
          x = xp;
          xp = x->parent;
        } else {
          if (right_black) {
            w->left->color = Color::Black;
            w->color = Color::Red;
            rotate_right(w);
            w = xp->right;
          }
          w->color = xp->color;
          xp->color = Color::Black;
          if (w->right) w->right->color = Color::Black;
          rotate_left(xp);
          x = root_;
          xp = nullptr;
        }
      } else {
        Node* w = xp->left;
        if (w->color == Color::Red) {
          w->color = Color::Black;
          xp->color = Color::Red;
          rotate_right(xp);
          w = xp->left;
        }
        bool left_black = !w->left || w->left->color == Color::Black;
        bool right_black = !w->right || w->right->color == Color::Black;
        if (left_black && right_black) {
          w->color = Color::Red;
          x = xp;
          xp = x->parent;
        } else {
          if (left_black) {
            w->right->color = Color::Black;
            w->color = Color::Red;
            rotate_left(w);
            w = xp->left;
          }
          w->color = xp->color;
          xp->color = Color::Black;
          if (w->left) w->left->color = Color::Black;
          rotate_right(xp);
          x = root_;
          xp = nullptr;
        }
      }
    }
    if (x) x->color = Color::Black;
  }

  template <typename F>
  static void inorder_rec(const Node* v, F& f) {
    if (!v) return;
    inorder_rec(v->left, f);
    f(v);
    inorder_rec(v->right, f);
  }

  static int height_rec(const Node* v) {
    if (!v) return -1;
    return 1 + std::max(height_rec(v->left), height_rec(v->right));
  }

  /// Returns black height, or -1 with a diagnostic in `rep`.
  int black_height_rec(const Node* v, std::size_t& count,
                       InvariantReport& rep) const {
    if (!v) return 0;
    ++count;
    if (v->left && v->left->parent != v) {
      rep = {false, "left child with inconsistent parent pointer"};
      return -1;
    }
    if (v->right && v->right->parent != v) {
      rep = {false, "right child with inconsistent parent pointer"};
      return -1;
    }
    if (v->color == Color::Red) {
      if ((v->left && v->left->color == Color::Red) ||
          (v->right && v->right->color == Color::Red)) {
        rep = {false, "red node with a red child"};
        return -1;
      }
    }
    int lh = black_height_rec(v->left, count, rep);
    if (lh < 0) return -1;
    int rh = black_height_rec(v->right, count, rep);
    if (rh < 0) return -1;
    if (lh != rh) {
      rep = {false, "black height mismatch"};
      return -1;
    }
    return lh + (v->color == Color::Black ? 1 : 0);
  }

  static void destroy(Node* v) {
    if (!v) return;
    destroy(v->left);
    destroy(v->right);
    delete v;
  }

  Cmp cmp_;
  WalkTuning tuning_;
  Node* root_ = nullptr;
  std::size_t size_ = 0;
  int k_dir_ = 1;
  int k_bound_ = 1;
  int k_verify_ = 1;
  bool audit_ = false;
};

/**
 * Walk navigation over a red-black (or any BST-shaped) tree with a bounds
 * stack. The stack brackets the current position with the keys of the
 * ancestors that bound its subtree, so correctness of a position is checked
 * against two keys instead of re-walking from the root:
 *
 *  - is_node_correct: beta < query < gamma, one boosted comparison per
 *    non-sentinel bound at half the per-step budget each;
 *  - is_target: one boosted comparison against the node key (Equal mode), or
 *    the insertion-point predicate (equal, or free child slot on the query's
 *    side) in InsertionPoint mode;
 *  - select_child: one boosted comparison; equal outcomes and missing
 *    children mean "stay".
 *
 * A navigation instance serves exactly one walk. For subtree walks, pass the
 * subtree root and a seed frame holding the subtree's outer bounds.
 */
template <typename Tree, typename Q>
class BoundsNav {
 public:
  using Node = typename Tree::Node;
  using NodeRef = Node*;

  BoundsNav(Tree& tree, const Q& query, TargetMode mode, Node* subtree_root,
            BoundsFrame<Node> seed)
      : tree_(tree),
        query_(query),
        mode_(mode),
        root_(subtree_root ? subtree_root : tree.root_node()) {
    if (!root_) throw std::logic_error("walk navigation over an empty tree");
    frames_.reserve(16);
    frames_.push_back(seed);
  }

  NodeRef root() const { return root_; }

  std::optional<NodeRef> parent(NodeRef v) const {
    if (v == root_) return std::nullopt;
    return v->parent;
  }

  bool is_node_correct(NodeRef) {
    const BoundsFrame<Node>& f = frames_.back();
    if (f.lo && boosted(f.lo, tree_.reps_bound()) != Ordering3::Less) {
      return false;
    }
    if (f.hi && boosted(f.hi, tree_.reps_bound()) != Ordering3::Greater) {
      return false;
    }
    return true;
  }

  bool is_target(NodeRef v) {
    Ordering3 o = boosted(v, tree_.reps_direction());
    if (mode_ == TargetMode::Equal) return o == Ordering3::Equal;
    if (o == Ordering3::Equal) return true;
    Node* slot = o == Ordering3::Greater ? v->left : v->right;
    return slot == nullptr;
  }

  NodeRef select_child(NodeRef v) {
    Ordering3 o = boosted(v, tree_.reps_direction());
    if (o == Ordering3::Equal) return v;
    Node* child = o == Ordering3::Greater ? v->left : v->right;
    return child ? child : v;
  }

  void descended(NodeRef child) {
    const BoundsFrame<Node>& f = frames_.back();
    Node* p = child->parent;
    BoundsFrame<Node> next =
        child == p->left ? BoundsFrame<Node>{f.lo, p} : BoundsFrame<Node>{p, f.hi};
    if (tree_.audit() && next.lo && next.hi &&
        tree_.comparator().exact(next.lo->key, next.hi->key) != Ordering3::Less) {
      throw std::logic_error("bounds stack violates beta < gamma");
    }
    frames_.push_back(next);
  }

  void ascended() { frames_.pop_back(); }

  void process_node(NodeRef) {}

  /// Frame of the current (final) walk position.
  const BoundsFrame<Node>& frame() const { return frames_.back(); }

 private:
  Ordering3 boosted(Node* v, int reps) {
    return plurality_vote([&] { return tree_.comparator().noisy(v->key, query_); },
                          reps);
  }

  Tree& tree_;
  const Q& query_;
  TargetMode mode_;
  Node* root_;
  std::vector<BoundsFrame<Node>> frames_;
};

}  // namespace noisytrees
