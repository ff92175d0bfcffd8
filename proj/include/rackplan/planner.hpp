#ifndef RACKPLAN_PLANNER_HPP
#define RACKPLAN_PLANNER_HPP

// Best-first search over rack states with k-best plan enumeration.
//
// Edge cost is the action weight; the heuristic is the fraction of
// misplaced objects, which never exceeds 1 and therefore never exceeds the
// cheapest action (all weights >= 1). Solutions already returned are banned
// by signature: the search runs on (state, position in a trie of banned
// action sequences), so every later round finds the cheapest plan whose
// action sequence differs from all earlier ones.

#include <algorithm>
#include <array>
#include <cmath>
#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "rackplan/action.hpp"
#include "rackplan/error.hpp"
#include "rackplan/goal.hpp"
#include "rackplan/model.hpp"
#include "rackplan/state_codec.hpp"

namespace rackplan {

struct CostWeights {
  double pick = 1.2;
  double place = 1.2;
  double move_torso = 2.0;
  double move_base = 1.0;
  double handover = 1.5;

  double of(ActionType t) const {
    switch (t) {
      case ActionType::pick: return pick;
      case ActionType::place: return place;
      case ActionType::handover: return handover;
      case ActionType::move_torso: return move_torso;
      case ActionType::move_base: return move_base;
    }
    return 0;
  }

  void validate() const {
    for (double w : {pick, place, move_torso, move_base, handover})
      if (!(w >= 1.0)) throw Error(ErrorCode::validation_error, "every action weight must be >= 1");
  }

  friend bool operator==(const CostWeights&, const CostWeights&) = default;
};

using ActionCounts = std::array<int, kActionTypeCount>;

inline ActionCounts count_actions(std::span<const Action> actions) {
  ActionCounts c{};
  for (const auto& a : actions) ++c[static_cast<std::size_t>(a.type)];
  return c;
}

/// Sum of weights, computed from per-type counts so that equal action
/// multisets always produce bit-identical costs.
inline double weighted_cost(const ActionCounts& c, const CostWeights& w) {
  double total = 0;
  for (int t = 0; t < kActionTypeCount; ++t) total += c[static_cast<std::size_t>(t)] * w.of(static_cast<ActionType>(t));
  return total;
}

/// Action-weight sum plus the robot configuration term between the two
/// states. With s0 == s1 this is the plain accumulated action cost.
inline double transition_cost(std::span<const Action> actions, const CostWeights& w, const WorldState& s0,
                              const WorldState& s1) {
  return weighted_cost(count_actions(actions), w) + robot_state_delta(s0, s1);
}

/// Fraction of the state's objects that the goal still wants moved.
inline double heuristic(const WorldState& s, const GoalSpec& goal) {
  if (s.size() == 0) {
    if (goal.empty()) return 0.0;
    throw Error(ErrorCode::empty_state, "heuristic of a state without objects");
  }
  int misplaced = misplaced_count(s, goal);
  return static_cast<double>(misplaced) / static_cast<double>(s.size());
}

/// State-to-state form: objects of `from` whose placement differs in `to`
/// (or that are absent from it), over the object count of `from`. Not
/// symmetric when the two states hold different numbers of objects.
inline double heuristic(const WorldState& from, const WorldState& to) {
  if (from.size() == 0) {
    if (to.size() == 0) return 0.0;
    throw Error(ErrorCode::empty_state, "heuristic of a state without objects");
  }
  int misplaced = 0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    auto j = to.find(from.id(i));
    if (!j || to.slot(*j) != from.slot(i)) ++misplaced;
  }
  return static_cast<double>(misplaced) / static_cast<double>(from.size());
}

struct Plan {
  std::vector<Action> actions;
  /// Accumulated action weights.
  double cost = 0;
  /// Robot configuration term between start and final state; nonzero only
  /// for goals that constrain the robot configuration.
  int robot_delta = 0;
  /// Wall-clock search time for this plan, in seconds.
  double plan_time = 0;

  double total_cost() const { return cost + robot_delta; }

  std::string signature() const {
    std::string s;
    for (const auto& a : actions) {
      if (!s.empty()) s += ';';
      s += to_string(a);
    }
    return s;
  }
};

struct SearchLimits {
  std::int64_t max_expansions = 5'000'000;
  int max_solutions = 1;
  std::chrono::duration<double> timeout{30.0};

  void validate() const {
    if (max_expansions < 1 || max_solutions < 1 || timeout.count() <= 0)
      throw Error(ErrorCode::validation_error, "search limits must be positive");
  }

  friend bool operator==(const SearchLimits&, const SearchLimits&) = default;
};

enum class SearchStatus { complete, truncated, no_solution };

inline std::string to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::complete: return "complete";
    case SearchStatus::truncated: return "truncated";
    case SearchStatus::no_solution: return "no-solution";
  }
  return "?";
}

struct SearchResult {
  std::vector<Plan> plans;
  /// complete: every requested plan was found or the plan space ran out;
  /// truncated: expansion or time limit hit, `plans` holds what was found;
  /// no_solution: the search space was exhausted without any plan.
  SearchStatus status = SearchStatus::complete;
  std::int64_t expansions = 0;
  std::string diagnostic;

  bool truncated() const { return status == SearchStatus::truncated; }
  bool solved() const { return !plans.empty(); }
};

namespace detail {

class SignatureTrie {
 public:
  static constexpr int kFree = -1;

  SignatureTrie() : nodes_(1) {}

  int root() const { return nodes_.size() == 1 && !nodes_[0].terminal ? kFree : 0; }

  int step(int node, const std::string& action) const {
    if (node == kFree) return kFree;
    auto it = nodes_[static_cast<std::size_t>(node)].children.find(action);
    return it == nodes_[static_cast<std::size_t>(node)].children.end() ? kFree : it->second;
  }

  bool banned(int node) const { return node != kFree && nodes_[static_cast<std::size_t>(node)].terminal; }

  void ban(const std::vector<Action>& actions) {
    int n = 0;
    for (const auto& a : actions) {
      std::string k = to_string(a);
      auto it = nodes_[static_cast<std::size_t>(n)].children.find(k);
      if (it == nodes_[static_cast<std::size_t>(n)].children.end()) {
        nodes_.emplace_back();
        int id = static_cast<int>(nodes_.size() - 1);
        nodes_[static_cast<std::size_t>(n)].children.emplace(std::move(k), id);
        n = id;
      } else {
        n = it->second;
      }
    }
    nodes_[static_cast<std::size_t>(n)].terminal = true;
  }

 private:
  struct Node {
    std::map<std::string, int> children;
    bool terminal = false;
  };
  std::vector<Node> nodes_;
};

template <class Codec>
struct TrieKey {
  typename Codec::Key state;
  int trie;
  friend bool operator==(const TrieKey&, const TrieKey&) = default;
};

template <class Codec>
struct TrieKeyHash {
  std::size_t operator()(const TrieKey<Codec>& k) const {
    return typename Codec::Hash{}(k.state) ^ (static_cast<std::size_t>(k.trie + 1) * 0x9E3779B97F4A7C15ULL);
  }
};

/// Open-addressing map from key to best known cost; linear probing over a
/// power-of-two table kept at most half full.
template <class K, class H>
class CostTable {
 public:
  CostTable() : slots_(1024) {}

  const double* find(const K& k) const {
    std::size_t i = home(k);
    while (slots_[i].used) {
      if (slots_[i].key == k) return &slots_[i].cost;
      i = (i + 1) & (slots_.size() - 1);
    }
    return nullptr;
  }

  /// Inserts (k, cost) if absent; returns the stored cost and whether the
  /// entry is new.
  std::pair<double*, bool> try_emplace(const K& k, double cost) {
    if (2 * (size_ + 1) > slots_.size()) grow();
    std::size_t i = home(k);
    while (slots_[i].used) {
      if (slots_[i].key == k) return {&slots_[i].cost, false};
      i = (i + 1) & (slots_.size() - 1);
    }
    slots_[i] = {k, cost, true};
    ++size_;
    return {&slots_[i].cost, true};
  }

 private:
  struct Slot {
    K key{};
    double cost = 0;
    bool used = false;
  };

  std::size_t home(const K& k) const {
    std::uint64_t h = H{}(k);
    h ^= h >> 33;
    h *= 0xFF51AFD7ED558CCDULL;
    h ^= h >> 33;
    return static_cast<std::size_t>(h) & (slots_.size() - 1);
  }

  void grow() {
    std::vector<Slot> old(slots_.size() * 2);
    old.swap(slots_);
    size_ = 0;
    for (auto& s : old)
      if (s.used) {
        std::size_t i = home(s.key);
        while (slots_[i].used) i = (i + 1) & (slots_.size() - 1);
        slots_[i] = std::move(s);
        ++size_;
      }
  }

  std::vector<Slot> slots_;
  std::size_t size_ = 0;
};

template <class Codec>
void search(const WorldState& start, const GoalSpec& goal, const RackModel& model, const CostWeights& weights,
            const SearchLimits& limits, SearchResult& result) {
  using Clock = std::chrono::steady_clock;
  using Key = TrieKey<Codec>;
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(limits.timeout);
  const Codec codec(start, model);
  const GoalTables tables(start, goal, model);
  const GoalContext ctx(start, goal);
  const double n = static_cast<double>(start.size());
  auto h_of = [&](const typename Codec::Key& k) {
    int m = tables.misplaced(codec, k);
    return m == 0 ? 0.0 : m / n;
  };
  SignatureTrie banned;

  // Actions are stored by object and cell index and rebuilt for the plan.
  struct Step {
    std::uint8_t type = 0, arm = 0, object = 0, cell = 0, level = 0, target = 0;
  };
  auto compact = [&](const Action& a, std::size_t object) {
    return Step{static_cast<std::uint8_t>(a.type), static_cast<std::uint8_t>(a.arm), static_cast<std::uint8_t>(object),
                static_cast<std::uint8_t>(cell_index(model, a.cell.shelf, a.cell.column, a.cell.depth)),
                static_cast<std::uint8_t>(a.level), static_cast<std::uint8_t>(a.target)};
  };
  auto expand = [&](const Step& st) {
    Action a;
    a.type = static_cast<ActionType>(st.type);
    a.arm = static_cast<Arm>(st.arm);
    if (a.type == ActionType::move_torso || a.type == ActionType::move_base) {
      a.target = st.target;
    } else {
      a.object = start.id(st.object);
      if (a.type != ActionType::handover) {
        a.cell = cell_at(model, st.cell);
        a.level = st.level;
      }
    }
    return a;
  };
  using Counts = std::array<std::uint16_t, kActionTypeCount>;
  auto weight_of = [&](const Counts& c) {
    ActionCounts wide{};
    for (std::size_t t = 0; t < wide.size(); ++t) wide[t] = c[t];
    return weighted_cost(wide, weights);
  };
  struct Node {
    typename Codec::Key state;
    double g;
    int parent;
    int trie;
    Counts counts;
    Step step;
  };
  struct Entry {
    double f;
    double h;
    std::uint64_t seq;
    std::size_t node;
  };
  struct Worse {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.f != b.f) return a.f > b.f;
      if (a.h != b.h) return a.h > b.h;
      return a.seq > b.seq;
    }
  };

  for (int round = 0; round < limits.max_solutions; ++round) {
    const auto round_start = Clock::now();
    std::deque<Node> nodes;
    std::priority_queue<Entry, std::vector<Entry>, Worse> open;
    CostTable<Key, TrieKeyHash<Codec>> best;
    std::uint64_t seq = 0;

    const int root_trie = banned.root();
    const typename Codec::Key root = codec.encode(start);
    const double h0 = h_of(root);
    nodes.push_back({root, 0.0, -1, root_trie, Counts{}, Step{}});
    best.try_emplace(Key{root, root_trie}, 0.0);
    open.push({h0, h0, seq++, 0});

    std::optional<std::size_t> found;
    bool limit_hit = false;
    while (!open.empty()) {
      const Entry e = open.top();
      open.pop();
      const Node& cur = nodes[e.node];
      {
        const double* known = best.find(Key{cur.state, cur.trie});
        if (known && *known < cur.g) continue;  // stale entry
      }
      if (tables.satisfied(codec, cur.state)) {
        if (banned.banned(cur.trie)) continue;
        found = e.node;
        break;
      }
      if (result.expansions >= limits.max_expansions || ((result.expansions & 255) == 0 && Clock::now() > deadline)) {
        limit_hit = true;
        break;
      }
      ++result.expansions;

      const WorldState state = codec.decode(cur.state);
      for_each_successor(state, model, ctx, [&](Action&& a, std::size_t object) {
        Counts c = cur.counts;
        ++c[static_cast<std::size_t>(a.type)];
        const double g = weight_of(c);
        const int t = cur.trie == SignatureTrie::kFree ? cur.trie : banned.step(cur.trie, to_string(a));
        Key k{codec.after(cur.state, a, object), t};
        auto [known, fresh] = best.try_emplace(k, g);
        if (!fresh) {
          if (*known <= g) return;
          *known = g;
        }
        const double h = h_of(k.state);
        nodes.push_back({std::move(k.state), g, static_cast<int>(e.node), t, c, compact(a, object)});
        open.push({g + h, h, seq++, nodes.size() - 1});
      });
    }

    if (!found) {
      if (limit_hit) {
        result.status = SearchStatus::truncated;
        result.diagnostic = "search limits reached after " + std::to_string(result.expansions) + " expansions";
      } else if (result.plans.empty()) {
        result.status = SearchStatus::no_solution;
        result.diagnostic = "search space exhausted";
      }
      return;
    }

    Plan plan;
    for (int i = static_cast<int>(*found); nodes[static_cast<std::size_t>(i)].parent >= 0;
         i = nodes[static_cast<std::size_t>(i)].parent)
      plan.actions.push_back(expand(nodes[static_cast<std::size_t>(i)].step));
    std::reverse(plan.actions.begin(), plan.actions.end());
    plan.cost = nodes[*found].g;
    plan.robot_delta = goal.robot_goal ? robot_state_delta(start, codec.decode(nodes[*found].state)) : 0;
    plan.plan_time = std::chrono::duration<double>(Clock::now() - round_start).count();
    banned.ban(plan.actions);
    result.plans.push_back(std::move(plan));
  }
}

}  // namespace detail

/// Returns up to limits.max_solutions plans in nondecreasing cost order with
/// pairwise distinct action sequences. The first plan is optimal. Plans end
/// at the first goal-satisfying state; a start state that already satisfies
/// the goal yields a single empty plan. Ties on f break by lower h, then by
/// insertion order.
inline SearchResult plan_astar(const WorldState& start, const GoalSpec& goal, const RackModel& model,
                               const CostWeights& weights, const SearchLimits& limits) {
  require_resolved(goal);
  weights.validate();
  limits.validate();
  SearchResult result;
  if (auto why = goal_infeasibility(start, goal)) {
    result.status = SearchStatus::no_solution;
    result.diagnostic = *why;
    return result;
  }
  if (start.size() == 0 && !goal.empty())
    throw Error(ErrorCode::empty_state, "goal places objects but the state has none");
  start.validate(&model);
  if (detail::PackedCodec::fits(start, model))
    detail::search<detail::PackedCodec>(start, goal, model, weights, limits, result);
  else if (detail::ByteCodec::fits(start, model))
    detail::search<detail::ByteCodec>(start, goal, model, weights, limits, result);
  else
    throw Error(ErrorCode::validation_error, "problem too large for the planner");
  return result;
}

struct PlanCheck {
  bool ok = true;
  /// Index of the first failing action, or the action count for failures
  /// found after replay (goal or cost).
  std::optional<std::size_t> failing_step;
  std::string diagnostic;
};

/// Replays the plan from `start`; fails on the first violated precondition,
/// on a final state that misses the goal, or on a stored cost that differs
/// from the recomputed weight sum.
inline PlanCheck verify_plan(const WorldState& start, const Plan& plan, const GoalSpec& goal, const RackModel& model,
                             const CostWeights& weights = {}) {
  PlanCheck check;
  WorldState s = start;
  for (std::size_t k = 0; k < plan.actions.size(); ++k) {
    try {
      s = apply_action(s, plan.actions[k], model);
    } catch (const Error& e) {
      check.ok = false;
      check.failing_step = k;
      check.diagnostic = "step " + std::to_string(k) + ": " + e.what();
      return check;
    }
  }
  if (!goal_satisfied(s, goal)) {
    check.ok = false;
    check.failing_step = plan.actions.size();
    check.diagnostic = "final state does not satisfy the goal";
    return check;
  }
  double recomputed = weighted_cost(count_actions(plan.actions), weights);
  if (std::abs(recomputed - plan.cost) > 1e-9) {
    check.ok = false;
    check.failing_step = plan.actions.size();
    check.diagnostic = "cost mismatch: stored " + std::to_string(plan.cost) + ", recomputed " + std::to_string(recomputed);
  }
  return check;
}

/// The action sequence that undoes `actions` when run from their final
/// state: order reversed, picks and places swapped, handovers given back,
/// and moves returning to the previous torso level or station.
inline std::vector<Action> invert_actions(const WorldState& start, std::span<const Action> actions,
                                          const RackModel& model) {
  std::vector<Action> inv;
  WorldState s = start;
  for (const auto& a : actions) {
    switch (a.type) {
      case ActionType::pick: inv.push_back(Action::place(a.object, a.arm, a.cell, a.level)); break;
      case ActionType::place: inv.push_back(Action::pick(a.object, a.arm, a.cell, a.level)); break;
      case ActionType::handover: inv.push_back(Action::handover(a.object, other(a.arm))); break;
      case ActionType::move_torso: inv.push_back(Action::move_torso(s.torso())); break;
      case ActionType::move_base: inv.push_back(Action::move_base(s.base())); break;
    }
    s = apply_action(s, a, model);
  }
  std::reverse(inv.begin(), inv.end());
  return inv;
}

}  // namespace rackplan

#endif  // RACKPLAN_PLANNER_HPP
