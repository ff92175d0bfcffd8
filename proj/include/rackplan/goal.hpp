#ifndef RACKPLAN_GOAL_HPP
#define RACKPLAN_GOAL_HPP

// Goal descriptions and the state/goal comparisons used by the planner:
// misplaced-object counting, goal satisfaction, robot configuration delta,
// and tessellation of a target region into a class layout.

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rackplan/designator.hpp"
#include "rackplan/error.hpp"
#include "rackplan/model.hpp"

namespace rackplan {

enum class GoalKind { by_instance, by_class, relational };

inline std::string to_string(GoalKind k) {
  switch (k) {
    case GoalKind::by_instance: return "explicit";
    case GoalKind::by_class: return "generic";
    case GoalKind::relational: return "relational";
  }
  return "?";
}

enum class Relation { near, left_of, right_of, on_shelf };

inline std::string to_string(Relation r) {
  switch (r) {
    case Relation::near: return "near";
    case Relation::left_of: return "left-of";
    case Relation::right_of: return "right-of";
    case Relation::on_shelf: return "on-shelf";
  }
  return "?";
}

inline std::optional<Relation> relation_from(std::string_view s) {
  if (s == "near") return Relation::near;
  if (s == "left-of") return Relation::left_of;
  if (s == "right-of") return Relation::right_of;
  if (s == "on-shelf") return Relation::on_shelf;
  return std::nullopt;
}

struct RelationConstraint {
  Designator subject;
  Relation relation = Relation::near;
  /// An object designator, or for on-shelf a location designator with (shelf n).
  Designator reference;

  friend bool operator==(const RelationConstraint&, const RelationConstraint&) = default;
};

/// Contiguous columns of one shelf, inclusive.
struct RegionSegment {
  int shelf = 0;
  int first_column = 0;
  int last_column = 0;

  int width() const { return last_column - first_column + 1; }
  friend bool operator==(const RegionSegment&, const RegionSegment&) = default;
};

struct ClassGroup {
  std::string class_name;
  int count = 0;
};

struct RobotGoal {
  std::optional<int> base;
  std::optional<int> torso;

  bool holds(const WorldState& s) const {
    return (!base || *base == s.base()) && (!torso || *torso == s.torso());
  }
  friend bool operator==(const RobotGoal&, const RobotGoal&) = default;
};

inline constexpr double kDefaultClearance = 0.02;

struct GoalSpec {
  GoalKind kind = GoalKind::by_class;
  std::map<std::string, Cell> explicit_map;      // by_instance
  std::map<Cell, std::string> class_layout;      // by_class
  std::vector<RelationConstraint> relations;     // relational
  std::vector<RegionSegment> region;             // relational: area to tessellate
  std::vector<std::string> group_order;          // relational: preferred group order
  double clearance = kDefaultClearance;          // relational
  std::optional<RobotGoal> robot_goal;

  static GoalSpec by_instance(std::map<std::string, Cell> m) {
    GoalSpec g;
    g.kind = GoalKind::by_instance;
    g.explicit_map = std::move(m);
    return g;
  }
  static GoalSpec by_class(std::map<Cell, std::string> layout) {
    GoalSpec g;
    g.kind = GoalKind::by_class;
    g.class_layout = std::move(layout);
    return g;
  }

  bool resolved() const { return kind != GoalKind::relational; }

  bool empty() const {
    return kind == GoalKind::by_instance ? explicit_map.empty() : class_layout.empty();
  }

  friend bool operator==(const GoalSpec&, const GoalSpec&) = default;
};

inline void require_resolved(const GoalSpec& goal) {
  if (!goal.resolved())
    throw Error(ErrorCode::unresolved_relational_goal, "relational goal must be resolved to a class layout first");
}

inline void validate_goal(const GoalSpec& goal, const RackModel& model) {
  auto fail = [](const std::string& w) { throw Error(ErrorCode::validation_error, "goal: " + w); };
  switch (goal.kind) {
    case GoalKind::by_instance: {
      std::set<Cell> seen;
      for (const auto& [id, c] : goal.explicit_map) {
        if (!model.contains(c)) fail("target of " + id + " outside the rack");
        if (!seen.insert(c).second) fail("two objects share target cell " + to_string(c));
      }
      break;
    }
    case GoalKind::by_class:
      for (const auto& [c, name] : goal.class_layout)
        if (!model.contains(c)) fail("layout cell " + to_string(c) + " outside the rack");
      break;
    case GoalKind::relational:
      for (const auto& seg : goal.region)
        if (seg.shelf < 0 || seg.shelf >= model.shelf_count || seg.first_column < 0 ||
            seg.last_column >= model.column_count || seg.first_column > seg.last_column)
          fail("region segment outside the rack");
      break;
  }
  if (goal.robot_goal) {
    if (goal.robot_goal->base && (*goal.robot_goal->base < 0 || *goal.robot_goal->base >= static_cast<int>(model.stations.size())))
      fail("robot goal base out of range");
    if (goal.robot_goal->torso && (*goal.robot_goal->torso < 0 || *goal.robot_goal->torso >= static_cast<int>(model.torso_levels.size())))
      fail("robot goal torso out of range");
  }
}

/// Number of objects not where the goal wants them. Objects in hands always
/// count. Under a class layout a non-clutter object is in place only when it
/// rests directly on the shelf (level 0) of a cell assigned to its class;
/// clutter counts only when it occupies an assigned cell.
inline int misplaced_count(const WorldState& s, const GoalSpec& goal) {
  require_resolved(goal);
  int n = 0;
  if (goal.kind == GoalKind::by_instance) {
    for (const auto& [id, target] : goal.explicit_map) {
      auto i = s.find(id);
      if (!i) {
        ++n;
        continue;
      }
      const Slot& sl = s.slot(*i);
      if (sl.held() || sl.cell() != target || sl.level != 0) ++n;
    }
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.slot(i).held() && !goal.explicit_map.count(s.id(i))) ++n;
    return n;
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Slot& sl = s.slot(i);
    if (sl.held()) {
      ++n;
      continue;
    }
    auto it = goal.class_layout.find(sl.cell());
    if (s.cls(i).clutter) {
      if (it != goal.class_layout.end()) ++n;
    } else if (it == goal.class_layout.end() || it->second != s.cls(i).name || sl.level != 0) {
      ++n;
    }
  }
  return n;
}

/// State comparison used for goal acceptance. Under a class layout instance
/// identity is ignored: any same-class permutation satisfies it.
inline bool goal_satisfied(const WorldState& s, const GoalSpec& goal) {
  require_resolved(goal);
  if (s.hand(Arm::left) != WorldState::kEmptyHand || s.hand(Arm::right) != WorldState::kEmptyHand) return false;
  if (goal.robot_goal && !goal.robot_goal->holds(s)) return false;
  if (goal.kind == GoalKind::by_instance) {
    for (const auto& [id, target] : goal.explicit_map) {
      auto i = s.find(id);
      if (!i || s.slot(*i) != Slot::at(target, 0)) return false;
    }
    return true;
  }
  for (const auto& [cell, name] : goal.class_layout) {
    int o = s.object_at(cell, 0);
    if (o < 0 || s.cls(static_cast<std::size_t>(o)).name != name || s.height(cell) != 1) return false;
  }
  return true;
}

/// Whether the goal can be met at all with the objects present: every
/// mapped object exists, and a class layout has exactly one cell per
/// non-clutter instance of each class.
inline std::optional<std::string> goal_infeasibility(const WorldState& s, const GoalSpec& goal) {
  require_resolved(goal);
  if (goal.kind == GoalKind::by_instance) {
    for (const auto& [id, c] : goal.explicit_map)
      if (!s.find(id)) return "goal references missing object " + id;
    return std::nullopt;
  }
  std::map<std::string, int> cells;
  for (const auto& [c, name] : goal.class_layout) ++cells[name];
  std::map<std::string, int> have;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.cls(i).clutter) {
      if (cells.count(s.cls(i).name)) return "layout assigns cells to clutter class " + s.cls(i).name;
      continue;
    }
    ++have[s.cls(i).name];
  }
  for (const auto& [name, n] : cells)
    if (have[name] != n)
      return "layout has " + std::to_string(n) + " cells for " + name + " but " + std::to_string(have[name]) +
             " instances are present";
  for (const auto& [name, n] : have)
    if (!cells.count(name)) return "no layout cells for class " + name;
  return std::nullopt;
}

/// Robot configuration term: one unit each for a differing base, torso, and
/// per hand whose content differs.
inline int robot_state_delta(const WorldState& a, const WorldState& b) {
  int d = 0;
  if (a.base() != b.base()) ++d;
  if (a.torso() != b.torso()) ++d;
  for (Arm arm : kArms)
    if (a.held(arm) != b.held(arm)) ++d;
  return d;
}

/// Splits the region into a front-row class layout. Groups are laid out in
/// the given order, each item taking the next column slot; a shelf segment
/// holds items only while their summed width (footprint + clearance) fits
/// its physical width.
inline std::map<Cell, std::string> tessellate(const RackModel& model, std::span<const RegionSegment> region,
                                              std::span<const ClassGroup> groups, const ClassCatalog& classes,
                                              double clearance = kDefaultClearance) {
  for (const auto& seg : region)
    if (seg.shelf < 0 || seg.shelf >= model.shelf_count || seg.first_column < 0 ||
        seg.last_column >= model.column_count || seg.first_column > seg.last_column)
      throw Error(ErrorCode::validation_error, "region segment outside the rack");
  std::map<Cell, std::string> layout;
  std::size_t seg = 0;
  int column = region.empty() ? 0 : region[0].first_column;
  double used = 0;
  for (const auto& g : groups) {
    auto it = classes.find(g.class_name);
    if (it == classes.end()) throw Error(ErrorCode::unknown_class, g.class_name);
    double item = it->second->footprint.width + clearance;
    for (int k = 0; k < g.count; ++k) {
      while (seg < region.size() &&
             (column > region[seg].last_column || used + item > region[seg].width() * model.column_width + 1e-9)) {
        ++seg;
        used = 0;
        if (seg < region.size()) column = region[seg].first_column;
      }
      if (seg >= region.size())
        throw Error(ErrorCode::region_too_small, "region cannot hold the " + g.class_name + " group");
      layout[Cell{region[seg].shelf, column, 0}] = g.class_name;
      ++column;
      used += item;
    }
  }
  return layout;
}

/// Goal built from a state's own placements: every object must stay where it is.
inline GoalSpec explicit_goal_from(const WorldState& s) {
  std::map<std::string, Cell> m;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!s.slot(i).held()) m[s.id(i)] = s.slot(i).cell();
  return GoalSpec::by_instance(std::move(m));
}

/// Per-object view of a resolved goal, precomputed once per search.
class GoalContext {
 public:
  GoalContext(const WorldState& s, const GoalSpec& goal) : relevant_(s.size(), false), targets_(s.size()) {
    require_resolved(goal);
    if (goal.kind == GoalKind::by_instance)
      for (const auto& [id, c] : goal.explicit_map) goal_cells_.push_back(c);
    else
      for (const auto& [c, name] : goal.class_layout) goal_cells_.push_back(c);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (goal.kind == GoalKind::by_instance) {
        auto it = goal.explicit_map.find(s.id(i));
        if (it != goal.explicit_map.end()) {
          relevant_[i] = true;
          targets_[i].push_back(it->second);
        }
      } else if (!s.cls(i).clutter) {
        for (const auto& [c, name] : goal.class_layout)
          if (name == s.cls(i).name) targets_[i].push_back(c);
        relevant_[i] = !targets_[i].empty();
      }
    }
  }

  /// Goal-relevant objects are those the goal places; everything else is
  /// moved only to clear the way.
  bool relevant(std::size_t i) const { return relevant_[i]; }
  const std::vector<Cell>& targets(std::size_t i) const { return targets_[i]; }
  /// Every cell the goal constrains.
  const std::vector<Cell>& goal_cells() const { return goal_cells_; }

 private:
  std::vector<Cell> goal_cells_;
  std::vector<bool> relevant_;
  std::vector<std::vector<Cell>> targets_;
};

}  // namespace rackplan

#endif  // RACKPLAN_GOAL_HPP
