#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <optional>
#include <stdexcept>
#include <vector>

namespace noisytrees {

/**
 * Step budget for one tree operation: ceil(c * (height + log2(1/epsilon)))
 * steps guarantee that the walk ends on its target with probability at least
 * 1 - epsilon whenever every step moves in the correct direction with
 * probability at least 2/3. c = 108 is the certified constant; smaller
 * values are exposed for empirical frontier experiments.
 */
inline int steps_budget(int height, double epsilon, double c) {
  if (height < 0) throw std::invalid_argument("steps_budget: negative height");
  if (!(epsilon > 0.0) || !(epsilon < 0.5)) {
    throw std::invalid_argument("steps_budget: epsilon must lie in (0, 0.5)");
  }
  if (!(c > 0.0)) throw std::invalid_argument("steps_budget: c must be positive");
  double s = std::ceil(c * (height + std::log2(1.0 / epsilon)));
  return static_cast<int>(s);
}

/// Order in which run_operation processes the final root-to-target path.
enum class ProcessOrder {
  TopDown,   // root first
  BottomUp,  // target first (aggregate recomputation)
};

struct WalkConfig {
  double epsilon = 0.01;        // per-operation failure target, (0, 0.5)
  double c = 108.0;             // step-budget constant
  double per_step_boost = 0.1;  // error each navigation predicate is boosted to
  int height = 0;               // height hint, >= actual tree height
  ProcessOrder order = ProcessOrder::TopDown;

  int steps() const { return steps_budget(height, epsilon, c); }
};

/**
 * Navigation contract consumed by the walk engine. NodeRef is a cheap
 * regular value (pointer or index struct).
 *
 *  - root/parent are exact and structural; parent(root) is empty.
 *  - is_node_correct / is_target / select_child are noisy predicates, each
 *    already boosted internally so a single invocation errs with probability
 *    at most the configured per-step boost. select_child returns the node
 *    itself to mean "stay" (missing child, or an equal comparison).
 *  - descended/ascended fire after the walk engine commits a move, so the
 *    navigation can maintain per-position state (bounds stacks).
 *  - process_node is the exact post-walk visitor used by run_operation.
 */
template <typename Nav>
concept WalkNavigation = requires(Nav nav, typename Nav::NodeRef v) {
  { nav.root() } -> std::convertible_to<typename Nav::NodeRef>;
  { nav.parent(v) } -> std::convertible_to<std::optional<typename Nav::NodeRef>>;
  { nav.is_node_correct(v) } -> std::convertible_to<bool>;
  { nav.is_target(v) } -> std::convertible_to<bool>;
  { nav.select_child(v) } -> std::convertible_to<typename Nav::NodeRef>;
  { nav.descended(v) };
  { nav.ascended() };
  { nav.process_node(v) };
};

template <typename NodeRef>
struct WalkState {
  NodeRef node;
  int counter = 0;  // confidence counter; the walk moves only when it is 0
};

/**
 * One step of the walk:
 *
 *   counter == 0:
 *     is_node_correct false -> move to parent (the root stays put);
 *     otherwise is_target true -> counter becomes 1;
 *     otherwise move to select_child's answer (staying if it returns the
 *     current node).
 *   counter > 0:
 *     is_target true -> counter += 1 (capped), else counter -= 1.
 */
template <typename Nav>
  requires WalkNavigation<Nav>
WalkState<typename Nav::NodeRef> one_step(Nav& nav,
                                          WalkState<typename Nav::NodeRef> state,
                                          int counter_cap) {
  if (state.counter == 0) {
    if (!nav.is_node_correct(state.node)) {
      if (auto p = nav.parent(state.node)) {
        state.node = *p;
        nav.ascended();
      }
    } else if (nav.is_target(state.node)) {
      state.counter = 1;
    } else {
      auto child = nav.select_child(state.node);
      if (!(child == state.node)) {
        state.node = child;
        nav.descended(child);
      }
    }
  } else {
    if (nav.is_target(state.node)) {
      if (state.counter < counter_cap) ++state.counter;
    } else {
      --state.counter;
    }
  }
  return state;
}

/**
 * Runs exactly `steps` steps from the root and returns the final node. No
 * early exit: the step count is deterministic. The confidence counter is
 * capped at steps + 1. The navigation must be freshly positioned at its
 * root (one navigation instance per walk).
 */
template <typename Nav>
  requires WalkNavigation<Nav>
typename Nav::NodeRef walk_steps(Nav& nav, int steps) {
  WalkState<typename Nav::NodeRef> state{nav.root(), 0};
  for (int i = 0; i < steps; ++i) {
    state = one_step(nav, state, steps + 1);
  }
  return state.node;
}

template <typename Nav>
  requires WalkNavigation<Nav>
typename Nav::NodeRef walk(Nav& nav, const WalkConfig& config) {
  return walk_steps(nav, config.steps());
}

/// Exact parent-pointer path from the root to `node`, root first.
template <typename Nav>
  requires WalkNavigation<Nav>
std::vector<typename Nav::NodeRef> reconstruct_path(Nav& nav,
                                                    typename Nav::NodeRef node) {
  std::vector<typename Nav::NodeRef> path{node};
  auto cur = node;
  while (auto p = nav.parent(cur)) {
    cur = *p;
    path.push_back(cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

/**
 * Full operation: walk, reconstruct the exact root path of the final node,
 * then visit every path node with process_node in the configured order.
 * Returns the final node.
 */
template <typename Nav>
  requires WalkNavigation<Nav>
typename Nav::NodeRef run_operation(Nav& nav, const WalkConfig& config) {
  auto target = walk(nav, config);
  auto path = reconstruct_path(nav, target);
  if (config.order == ProcessOrder::TopDown) {
    for (auto it = path.begin(); it != path.end(); ++it) nav.process_node(*it);
  } else {
    for (auto it = path.rbegin(); it != path.rend(); ++it) nav.process_node(*it);
  }
  return target;
}

}  // namespace noisytrees
