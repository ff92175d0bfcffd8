#ifndef RACKPLAN_ACTION_HPP
#define RACKPLAN_ACTION_HPP

// The five atomic actions, their preconditions and effects, occlusion
// reasoning, and successor generation.

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "rackplan/error.hpp"
#include "rackplan/goal.hpp"
#include "rackplan/model.hpp"

namespace rackplan {

enum class ActionType : std::uint8_t { pick = 0, place = 1, handover = 2, move_torso = 3, move_base = 4 };

inline constexpr int kActionTypeCount = 5;

inline std::string_view to_string(ActionType t) {
  switch (t) {
    case ActionType::pick: return "pick";
    case ActionType::place: return "place";
    case ActionType::handover: return "handover";
    case ActionType::move_torso: return "move-torso";
    case ActionType::move_base: return "move-base";
  }
  return "?";
}

/// One parameterized atomic action. Pick and place carry the cell and stack
/// level they act on; handover carries the giving arm; moves carry the
/// target torso level or base station.
struct Action {
  ActionType type = ActionType::move_base;
  std::string object;
  Arm arm = Arm::left;
  Cell cell;
  int level = 0;
  int target = 0;

  static Action pick(std::string id, Arm arm, Cell c, int level = 0) {
    return {ActionType::pick, std::move(id), arm, c, level, 0};
  }
  static Action place(std::string id, Arm arm, Cell c, int level = 0) {
    return {ActionType::place, std::move(id), arm, c, level, 0};
  }
  static Action handover(std::string id, Arm from) { return {ActionType::handover, std::move(id), from, {}, 0, 0}; }
  static Action move_torso(int level) { return {ActionType::move_torso, {}, Arm::left, {}, 0, level}; }
  static Action move_base(int station) { return {ActionType::move_base, {}, Arm::left, {}, 0, station}; }

  friend bool operator==(const Action& a, const Action& b) {
    if (a.type != b.type) return false;
    switch (a.type) {
      case ActionType::pick:
      case ActionType::place:
        return a.object == b.object && a.arm == b.arm && a.cell == b.cell && a.level == b.level;
      case ActionType::handover: return a.object == b.object && a.arm == b.arm;
      case ActionType::move_torso:
      case ActionType::move_base: return a.target == b.target;
    }
    return false;
  }
};

inline std::string to_string(const Action& a) {
  std::string out(to_string(a.type));
  switch (a.type) {
    case ActionType::pick:
    case ActionType::place:
      out += "(" + a.object + "," + to_string(a.arm) + "," + to_string(a.cell) + "," + std::to_string(a.level) + ")";
      break;
    case ActionType::handover: out += "(" + a.object + "," + to_string(a.arm) + ")"; break;
    case ActionType::move_torso:
    case ActionType::move_base: out += "(" + std::to_string(a.target) + ")"; break;
  }
  return out;
}

/// Inverse of to_string(Action).
inline Action parse_action(std::string_view text) {
  auto fail = [&] { throw Error(ErrorCode::validation_error, "malformed action '" + std::string(text) + "'"); };
  auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') fail();
  std::string_view name = text.substr(0, open);
  std::string_view body = text.substr(open + 1, text.size() - open - 2);
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i)
    if (i == body.size() || body[i] == ',') {
      parts.emplace_back(body.substr(start, i - start));
      start = i + 1;
    }
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      int v = std::stoi(s, &used);
      if (used != s.size()) fail();
      return v;
    } catch (const std::logic_error&) {
      fail();
    }
    return 0;
  };
  auto to_arm = [&](const std::string& s) {
    if (s == "left") return Arm::left;
    if (s == "right") return Arm::right;
    fail();
    return Arm::left;
  };
  auto to_cell = [&](const std::string& s) {
    auto a = s.find('/');
    auto b = s.find('/', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) fail();
    return Cell{to_int(s.substr(0, a)), to_int(s.substr(a + 1, b - a - 1)), to_int(s.substr(b + 1))};
  };
  if (name == "pick" || name == "place") {
    if (parts.size() != 4) fail();
    Cell c = to_cell(parts[2]);
    int lvl = to_int(parts[3]);
    return name == "pick" ? Action::pick(parts[0], to_arm(parts[1]), c, lvl)
                          : Action::place(parts[0], to_arm(parts[1]), c, lvl);
  }
  if (name == "handover") {
    if (parts.size() != 2) fail();
    return Action::handover(parts[0], to_arm(parts[1]));
  }
  if (name == "move-torso" || name == "move-base") {
    if (parts.size() != 1) fail();
    int t = to_int(parts[0]);
    return name == "move-torso" ? Action::move_torso(t) : Action::move_base(t);
  }
  fail();
  return {};
}

namespace detail {

/// Objects blocking a pick of object i: same-column objects at smaller
/// depth (front to back, bottom to top), then objects stacked above it.
inline std::vector<std::size_t> occluder_indices(const WorldState& s, std::size_t i) {
  const Slot& me = s.slot(i);
  std::vector<std::size_t> front;
  std::vector<std::size_t> above;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j == i) continue;
    const Slot& o = s.slot(j);
    if (o.held() || o.shelf != me.shelf || o.column != me.column) continue;
    if (o.depth < me.depth)
      front.push_back(j);
    else if (o.depth == me.depth && o.level > me.level)
      above.push_back(j);
  }
  std::sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
    const Slot& x = s.slot(a);
    const Slot& y = s.slot(b);
    return x.depth != y.depth ? x.depth < y.depth : x.level < y.level;
  });
  std::sort(above.begin(), above.end(),
            [&](std::size_t a, std::size_t b) { return s.slot(a).level < s.slot(b).level; });
  front.insert(front.end(), above.begin(), above.end());
  return front;
}

inline bool front_clear(const WorldState& s, const Cell& c) {
  for (const auto& o : s.slots())
    if (!o.held() && o.shelf == c.shelf && o.column == c.column && o.depth < c.depth) return false;
  return true;
}

[[noreturn]] inline void violated(const Action& a, const std::string& what) {
  throw Error(ErrorCode::precondition_violated, to_string(a) + ": " + what);
}

}  // namespace detail

/// Ids of the objects that must be removed before `object_id` can be picked;
/// empty when it is directly graspable.
inline std::vector<std::string> occluders_of(const WorldState& s, std::string_view object_id,
                                             const RackModel& /*model*/) {
  auto i = s.find(object_id);
  if (!i || s.slot(*i).held())
    throw Error(ErrorCode::unknown_object, std::string(object_id) + " is not on the rack");
  std::vector<std::string> out;
  for (std::size_t j : detail::occluder_indices(s, *i)) out.push_back(s.id(j));
  return out;
}

/// Returns the successor state or throws precondition-violated naming the
/// failed condition. The input state is not modified.
inline WorldState apply_action(const WorldState& s, const Action& a, const RackModel& model) {
  WorldState out = s;
  switch (a.type) {
    case ActionType::pick: {
      auto i = s.find(a.object);
      if (!i) throw Error(ErrorCode::unknown_object, a.object);
      const Slot& sl = s.slot(*i);
      if (sl.held()) detail::violated(a, "object is already held");
      if (sl != Slot::at(a.cell, a.level)) detail::violated(a, "object is not at " + to_string(a.cell) + ":" + std::to_string(a.level));
      if (s.hand(a.arm) != WorldState::kEmptyHand) detail::violated(a, to_string(a.arm) + " hand is full");
      auto occ = detail::occluder_indices(s, *i);
      if (!occ.empty()) {
        std::string names;
        for (std::size_t j : occ) names += (names.empty() ? "" : ", ") + s.id(j);
        detail::violated(a, "object is occluded by " + names);
      }
      if (!model.reachable(a.cell, s.base(), s.torso(), a.arm)) detail::violated(a, "cell out of reach");
      out.set_slot(*i, Slot::in_hand());
      out.set_hand(a.arm, static_cast<int>(*i));
      return out;
    }
    case ActionType::place: {
      auto i = s.find(a.object);
      if (!i) throw Error(ErrorCode::unknown_object, a.object);
      if (s.hand(a.arm) != static_cast<int>(*i)) detail::violated(a, to_string(a.arm) + " hand does not hold the object");
      if (!model.contains(a.cell)) detail::violated(a, "target cell outside the rack");
      if (!model.reachable(a.cell, s.base(), s.torso(), a.arm)) detail::violated(a, "target cell out of reach");
      if (s.object_at(a.cell, a.level) >= 0) detail::violated(a, "target slot is occupied");
      if (a.level != s.height(a.cell)) detail::violated(a, "target slot is not supported");
      if (a.level > 0) {
        int below = s.object_at(a.cell, a.level - 1);
        if (!s.cls(static_cast<std::size_t>(below)).stackable) detail::violated(a, "object below is not stackable");
      }
      if (!detail::front_clear(s, a.cell)) detail::violated(a, "target cell is blocked from the front");
      out.set_slot(*i, Slot::at(a.cell, a.level));
      out.set_hand(a.arm, WorldState::kEmptyHand);
      return out;
    }
    case ActionType::handover: {
      int h = s.hand(a.arm);
      if (h == WorldState::kEmptyHand) detail::violated(a, to_string(a.arm) + " hand is empty");
      if (s.id(static_cast<std::size_t>(h)) != a.object) detail::violated(a, to_string(a.arm) + " hand holds another object");
      if (s.hand(other(a.arm)) != WorldState::kEmptyHand) detail::violated(a, to_string(other(a.arm)) + " hand is full");
      out.set_hand(a.arm, WorldState::kEmptyHand);
      out.set_hand(other(a.arm), h);
      return out;
    }
    case ActionType::move_torso:
      if (a.target < 0 || a.target >= static_cast<int>(model.torso_levels.size())) detail::violated(a, "no such torso level");
      if (a.target == s.torso()) detail::violated(a, "torso already at that level");
      out.set_torso(a.target);
      return out;
    case ActionType::move_base:
      if (a.target < 0 || a.target >= static_cast<int>(model.stations.size())) detail::violated(a, "no such base station");
      if (a.target == s.base()) detail::violated(a, "base already at that station");
      out.set_base(a.target);
      return out;
  }
  return out;
}

namespace detail {

/// Successor generation shared by legal_actions and the planner: calls
/// emit(action, object index) in the fixed enumeration order. The object
/// index is meaningless for moves.
template <class Emit>
void for_each_successor(const WorldState& s, const RackModel& model, const GoalContext& ctx, Emit&& emit) {
  const std::size_t n = s.size();
  const int depths = model.depth_count;
  auto index = [&](int shelf, int column, int depth) {
    return static_cast<std::size_t>((shelf * model.column_count + column) * depths + depth);
  };
  const std::size_t cell_count = static_cast<std::size_t>(model.shelf_count * model.column_count * depths);
  thread_local std::vector<int> height;
  thread_local std::vector<int> top;
  thread_local std::vector<char> blocked;
  thread_local std::vector<char> in_way;
  height.assign(cell_count, 0);
  top.assign(cell_count, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const Slot& sl = s.slot(i);
    if (sl.held()) continue;
    std::size_t c = index(sl.shelf, sl.column, sl.depth);
    ++height[c];
    if (top[c] < 0 || s.slot(static_cast<std::size_t>(top[c])).level < sl.level)
      top[c] = static_cast<int>(i);
  }
  // blocked[c]: some object sits in front of cell c.
  blocked.assign(cell_count, 0);
  for (int sh = 0; sh < model.shelf_count; ++sh)
    for (int co = 0; co < model.column_count; ++co) {
      bool seen = false;
      for (int d = 0; d < depths; ++d) {
        blocked[index(sh, co, d)] = seen;
        seen = seen || height[index(sh, co, d)] > 0;
      }
    }

  in_way.assign(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    const Slot& rs = s.slot(r);
    if (!ctx.relevant(r) || rs.held()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const Slot& o = s.slot(j);
      if (j == r || o.held() || o.shelf != rs.shelf || o.column != rs.column) continue;
      if (o.depth < rs.depth || (o.depth == rs.depth && o.level > rs.level)) in_way[j] = 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Slot& sl = s.slot(i);
    if (sl.held()) continue;
    for (const Cell& g : ctx.goal_cells())
      if (g.shelf == sl.shelf && g.column == sl.column && sl.depth <= g.depth) in_way[i] = 1;
  }

  const int left = s.hand(Arm::left);
  const int right = s.hand(Arm::right);
  if (left == WorldState::kEmptyHand || right == WorldState::kEmptyHand) {
    // Only the top of each unblocked stack is graspable.
    for (std::size_t c = 0; c < cell_count; ++c) {
      if (top[c] < 0 || blocked[c]) continue;
      auto i = static_cast<std::size_t>(top[c]);
      if (s.cls(i).clutter && !in_way[i]) continue;
      const Slot& sl = s.slot(i);
      for (Arm arm : kArms) {
        if (s.hand(arm) != WorldState::kEmptyHand || !model.reachable(sl.cell(), s.base(), s.torso(), arm)) continue;
        emit(Action::pick(s.id(i), arm, sl.cell(), sl.level), i);
      }
    }
  }

  if (left != WorldState::kEmptyHand || right != WorldState::kEmptyHand) {
    // Held objects ordered by id within a cell; hand indices follow id order.
    std::vector<Arm> holders;
    for (Arm arm : kArms)
      if (s.hand(arm) != WorldState::kEmptyHand) holders.push_back(arm);
    if (holders.size() == 2 && s.hand(holders[1]) < s.hand(holders[0])) std::swap(holders[0], holders[1]);
    for (int sh = 0; sh < model.shelf_count; ++sh)
      for (int co = 0; co < model.column_count; ++co)
        for (int d = 0; d < depths; ++d) {
          std::size_t c = index(sh, co, d);
          if (blocked[c]) continue;
          const int level = height[c];
          if (level > 0 && !s.cls(static_cast<std::size_t>(top[c])).stackable) continue;
          const Cell cell{sh, co, d};
          for (Arm arm : holders) {
            auto i = static_cast<std::size_t>(s.hand(arm));
            if (s.cls(i).clutter && !model.is_buffer(cell)) continue;
            if (!model.reachable(cell, s.base(), s.torso(), arm)) continue;
            emit(Action::place(s.id(i), arm, cell, level), i);
          }
        }
  }

  if ((left == WorldState::kEmptyHand) != (right == WorldState::kEmptyHand)) {
    Arm from = left != WorldState::kEmptyHand ? Arm::left : Arm::right;
    auto i = static_cast<std::size_t>(s.hand(from));
    emit(Action::handover(s.id(i), from), i);
  }
  for (int t = 0; t < static_cast<int>(model.torso_levels.size()); ++t) {
    if (t == s.torso()) continue;
    emit(Action::move_torso(t), std::size_t{0});
  }
  for (int b = 0; b < static_cast<int>(model.stations.size()); ++b) {
    if (b == s.base()) continue;
    emit(Action::move_base(b), std::size_t{0});
  }
}

}  // namespace detail

/// Successor actions in fixed order: picks, places, handover, move-torso,
/// move-base; picks and places sorted by cell then object id, left arm first.
///
/// Clutter is picked only when it is in the way: it occludes a goal-relevant
/// object, or sits on or in front of a goal cell. Held clutter goes to buffer
/// cells only. Every other object may be picked when graspable and placed on
/// any free supported slot in reach.
inline std::vector<Action> legal_actions(const WorldState& s, const RackModel& model, const GoalContext& ctx) {
  std::vector<Action> out;
  detail::for_each_successor(s, model, ctx, [&](Action&& a, std::size_t) { out.push_back(std::move(a)); });
  return out;
}

inline std::vector<Action> legal_actions(const WorldState& s, const RackModel& model, const GoalSpec& goal) {
  return legal_actions(s, model, GoalContext(s, goal));
}

}  // namespace rackplan

#endif  // RACKPLAN_ACTION_HPP
