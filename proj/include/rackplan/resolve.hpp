#ifndef RACKPLAN_RESOLVE_HPP
#define RACKPLAN_RESOLVE_HPP

// Grounding of designators against a world state: object descriptions to
// object ids, location descriptions to free front cells, relational goals
// to a class layout, and fetch-and-place tasks to an explicit goal.
//
// Shelves are 0-indexed. (on X) matches the model's rack name or the
// generic word "rack". (near X) means Manhattan distance <= 1 over
// (shelf, column) from some object matching X.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rackplan/designator.hpp"
#include "rackplan/error.hpp"
#include "rackplan/goal.hpp"
#include "rackplan/model.hpp"

namespace rackplan {

struct ObjectResolution {
  std::vector<std::string> candidates;
  bool exhaustive = true;

  const std::string& referent() const { return candidates.front(); }
};

struct LocationResolution {
  std::vector<Cell> candidates;
  bool exhaustive = true;

  const Cell& referent() const { return candidates.front(); }
};

namespace detail {

inline bool rack_matches(const std::string& name, const RackModel* model) {
  return name == "rack" || (model && name == model->name);
}

inline std::optional<int> shelf_value(const PropertyValue& v) {
  if (auto n = std::get_if<Number>(&v.value)) {
    if (n->value != std::floor(n->value)) return std::nullopt;
    return static_cast<int>(n->value);
  }
  return std::nullopt;
}

inline std::vector<std::size_t> match_objects(const Designator& d, const WorldState& s, const RackModel* model);

/// Cells of on-rack objects matching the nested object designator.
inline std::vector<Cell> anchor_cells(const PropertyValue& v, const WorldState& s, const RackModel* model) {
  if (!v.is_designator() || v.designator().kind != DesignatorKind::object)
    throw Error(ErrorCode::not_an_object_designator, "spatial relations need a nested object designator");
  std::vector<Cell> cells;
  for (std::size_t i : match_objects(v.designator(), s, model))
    if (!s.slot(i).held()) cells.push_back(s.slot(i).cell());
  if (cells.empty())
    throw Error(ErrorCode::unresolvable_inner_object, print_designator(v.designator()) + " matches no object on the rack");
  return cells;
}

inline bool near_any(const Cell& c, const std::vector<Cell>& anchors) {
  return std::any_of(anchors.begin(), anchors.end(), [&](const Cell& a) { return lateral_distance(c, a) <= 1; });
}

inline bool left_of_all(const Cell& c, const std::vector<Cell>& anchors) {
  return std::all_of(anchors.begin(), anchors.end(),
                     [&](const Cell& a) { return a.shelf == c.shelf && c.column < a.column; });
}

inline bool right_of_all(const Cell& c, const std::vector<Cell>& anchors) {
  return std::all_of(anchors.begin(), anchors.end(),
                     [&](const Cell& a) { return a.shelf == c.shelf && c.column > a.column; });
}

/// Whether the cell passes a spatial property (on, shelf, near, left-of, right-of).
inline bool spatial_ok(const Property& p, const Cell& c, const WorldState& s, const RackModel* model,
                       std::map<const Property*, std::vector<Cell>>& anchors) {
  auto anchor = [&]() -> const std::vector<Cell>& {
    auto it = anchors.find(&p);
    if (it == anchors.end()) it = anchors.emplace(&p, anchor_cells(p.value, s, model)).first;
    return it->second;
  };
  if (p.key == "on") return rack_matches(p.value.text(), model);
  if (p.key == "shelf") {
    auto n = shelf_value(p.value);
    return n && *n == c.shelf;
  }
  if (p.key == "near") return near_any(c, anchor());
  if (p.key == "left-of") return left_of_all(c, anchor());
  if (p.key == "right-of") return right_of_all(c, anchor());
  return false;
}

inline bool attribute_ok(const Property& p, const ObjectClass& cls) {
  const std::string want = p.value.text();
  if (p.key == "type") return cls.shape == want;
  if (p.key == "label") return cls.name == want;
  if (p.key == "color") return cls.color == want;
  if (p.key == "category") return cls.category == want;
  return false;
}

inline bool is_attribute(const std::string& key) {
  return key == "type" || key == "label" || key == "color" || key == "category";
}

/// Indices of objects matching every property, rack objects in cell order
/// first, then held objects (left hand, right hand).
inline std::vector<std::size_t> match_objects(const Designator& d, const WorldState& s, const RackModel* model) {
  if (d.kind != DesignatorKind::object)
    throw Error(ErrorCode::not_an_object_designator, print_designator(d));
  std::vector<std::size_t> order = s.rack_order();
  for (Arm a : kArms)
    if (s.hand(a) != WorldState::kEmptyHand) order.push_back(static_cast<std::size_t>(s.hand(a)));
  std::map<const Property*, std::vector<Cell>> anchors;
  std::vector<std::size_t> out;
  for (std::size_t i : order) {
    bool ok = true;
    for (const auto& p : d.properties) {
      if (is_attribute(p.key)) {
        ok = attribute_ok(p, s.cls(i));
      } else if (s.slot(i).held()) {
        ok = p.key == "on" && rack_matches(p.value.text(), model);
      } else {
        ok = spatial_ok(p, s.slot(i).cell(), s, model, anchors);
      }
      if (!ok) break;
    }
    if (ok) out.push_back(i);
  }
  return out;
}

}  // namespace detail

/// All objects whose class (and, for spatial keys, position) satisfies every
/// property of the description.
inline ObjectResolution resolve_object(const Designator& d, const WorldState& s, const RackModel* model = nullptr) {
  ObjectResolution r;
  for (std::size_t i : detail::match_objects(d, s, model)) r.candidates.push_back(s.id(i));
  if (r.candidates.empty()) throw Error(ErrorCode::no_match, print_designator(d) + " matches no object");
  return r;
}

/// Free front-row cells satisfying every property; the first candidate is
/// the designated referent.
inline LocationResolution resolve_location(const Designator& d, const WorldState& s, const RackModel& model) {
  if (d.kind != DesignatorKind::location) throw Error(ErrorCode::not_a_location_designator, print_designator(d));
  for (const auto& p : d.properties)
    if (detail::is_attribute(p.key))
      throw Error(ErrorCode::validation_error, "property '" + p.key + "' does not apply to locations");
  std::map<const Property*, std::vector<Cell>> anchors;
  LocationResolution r;
  for (const Cell& c : model.cells()) {
    if (c.depth != 0 || !s.is_free(c)) continue;
    bool ok = true;
    for (const auto& p : d.properties) {
      ok = detail::spatial_ok(p, c, s, &model, anchors);
      if (!ok) break;
    }
    if (ok) r.candidates.push_back(c);
  }
  if (r.candidates.empty()) throw Error(ErrorCode::no_match, print_designator(d) + " matches no free cell");
  return r;
}

namespace detail {

inline std::set<std::string> subject_classes(const Designator& d, const WorldState& s) {
  if (d.kind != DesignatorKind::object) throw Error(ErrorCode::not_an_object_designator, print_designator(d));
  std::set<std::string> out;
  for (std::size_t i : match_objects(d, s, nullptr))
    if (!s.cls(i).clutter) out.insert(s.cls(i).name);
  if (out.empty())
    throw Error(ErrorCode::unresolvable_inner_object, print_designator(d) + " matches no product object");
  return out;
}

struct GroundedRelation {
  std::set<std::string> subject;
  Relation relation;
  std::set<std::string> reference;
  int shelf = 0;
};

inline bool relation_holds(const GroundedRelation& r, const std::map<Cell, std::string>& layout) {
  std::vector<Cell> sub;
  std::vector<Cell> ref;
  for (const auto& [c, name] : layout) {
    if (r.subject.count(name)) sub.push_back(c);
    if (r.reference.count(name)) ref.push_back(c);
  }
  if (sub.empty()) return true;
  switch (r.relation) {
    case Relation::on_shelf:
      return std::all_of(sub.begin(), sub.end(), [&](const Cell& c) { return c.shelf == r.shelf; });
    case Relation::near:
      return std::any_of(sub.begin(), sub.end(), [&](const Cell& c) { return near_any(c, ref); });
    case Relation::left_of:
      return std::all_of(sub.begin(), sub.end(), [&](const Cell& c) { return left_of_all(c, ref); });
    case Relation::right_of:
      return std::all_of(sub.begin(), sub.end(), [&](const Cell& c) { return right_of_all(c, ref); });
  }
  return false;
}

inline GroundedRelation ground(const RelationConstraint& rc, const WorldState& s) {
  GroundedRelation g{subject_classes(rc.subject, s), rc.relation, {}, 0};
  if (rc.relation == Relation::on_shelf) {
    const PropertyValue* v = rc.reference.find("shelf");
    auto n = v ? shelf_value(*v) : std::nullopt;
    if (!n) throw Error(ErrorCode::validation_error, "on-shelf relation needs a reference with (shelf n)");
    g.shelf = *n;
  } else {
    g.reference = subject_classes(rc.reference, s);
  }
  return g;
}

}  // namespace detail

/// Class groups for a relational goal: the goal's group order first, then
/// any other product class present, each with its instance count in the
/// state (classes without instances are dropped).
inline std::vector<ClassGroup> goal_groups(const GoalSpec& goal, const WorldState& s) {
  std::map<std::string, int> counts;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!s.cls(i).clutter) ++counts[s.cls(i).name];
  std::vector<ClassGroup> groups;
  std::set<std::string> seen;
  for (const auto& name : goal.group_order) {
    if (!seen.insert(name).second) continue;
    auto it = counts.find(name);
    if (it != counts.end()) groups.push_back({name, it->second});
  }
  for (const auto& [name, n] : counts)
    if (!seen.count(name)) groups.push_back({name, n});
  return groups;
}

inline ClassCatalog catalog_of(const WorldState& s) {
  ClassCatalog out;
  for (std::size_t i = 0; i < s.size(); ++i) out.emplace(s.cls(i).name, s.cls_ptr(i));
  return out;
}

/// Turns a relational goal into a class layout for the objects present in
/// `s`. Group orders are tried starting from the given order (then
/// lexicographic permutations); the first tessellation satisfying every
/// relation wins. Conflicting relations raise unsatisfiable-relations with
/// the offending pair.
inline GoalSpec resolve_goal(const GoalSpec& relational, const WorldState& s, const RackModel& model) {
  if (relational.kind != GoalKind::relational) return relational;
  constexpr std::size_t kMaxGroups = 8;
  std::vector<ClassGroup> groups = goal_groups(relational, s);
  if (groups.size() > kMaxGroups)
    throw Error(ErrorCode::validation_error, "relational goals support at most 8 product groups");
  ClassCatalog classes = catalog_of(s);

  std::vector<detail::GroundedRelation> rels;
  for (const auto& rc : relational.relations) rels.push_back(detail::ground(rc, s));

  std::vector<std::map<Cell, std::string>> layouts;
  std::optional<Error> size_error;
  std::vector<std::size_t> perm(groups.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::vector<ClassGroup> ordered;
    for (std::size_t i : perm) ordered.push_back(groups[i]);
    try {
      layouts.push_back(tessellate(model, relational.region, ordered, classes, relational.clearance));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::region_too_small) throw;
      if (!size_error) size_error = e;
      continue;
    }
    const auto& layout = layouts.back();
    bool all = std::all_of(rels.begin(), rels.end(), [&](const auto& r) { return detail::relation_holds(r, layout); });
    if (all) {
      GoalSpec out = GoalSpec::by_class(layout);
      out.robot_goal = relational.robot_goal;
      return out;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  if (layouts.empty()) throw *size_error;
  auto satisfiable = [&](std::initializer_list<std::size_t> idx) {
    return std::any_of(layouts.begin(), layouts.end(), [&](const auto& layout) {
      return std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return detail::relation_holds(rels[i], layout); });
    });
  };
  auto describe_rel = [&](std::size_t i) {
    const auto& rc = relational.relations[i];
    return print_designator(rc.subject) + " " + to_string(rc.relation) + " " + print_designator(rc.reference);
  };
  for (std::size_t i = 0; i < rels.size(); ++i)
    if (!satisfiable({i})) throw UnsatisfiableRelations(i, i, "relation cannot hold: " + describe_rel(i));
  for (std::size_t i = 0; i < rels.size(); ++i)
    for (std::size_t j = i + 1; j < rels.size(); ++j)
      if (!satisfiable({i, j}))
        throw UnsatisfiableRelations(i, j, "conflicting relations: " + describe_rel(i) + " / " + describe_rel(j));
  throw UnsatisfiableRelations(0, rels.empty() ? 0 : rels.size() - 1, "relations cannot hold together");
}

/// Grounds (verb <object designator> <location designator>) into an explicit
/// goal that moves the referent object to the referent cell.
inline GoalSpec resolve_task(const Designator& task, const WorldState& s, const RackModel& model) {
  if (task.kind != DesignatorKind::task || task.arguments.size() != 2 ||
      task.arguments[0].kind != DesignatorKind::object || task.arguments[1].kind != DesignatorKind::location)
    throw Error(ErrorCode::validation_error, "task goals take one object and one location designator");
  ObjectResolution obj = resolve_object(task.arguments[0], s, &model);
  LocationResolution loc = resolve_location(task.arguments[1], s, model);
  return GoalSpec::by_instance({{obj.referent(), loc.referent()}});
}

}  // namespace rackplan

#endif  // RACKPLAN_RESOLVE_HPP
