#ifndef RACKPLAN_SCENARIO_HPP
#define RACKPLAN_SCENARIO_HPP

// Scenario files: one (scenario ...) expression in the designator grammar.
//
//   (scenario
//     (name "1.a")
//     (rack (name rack-1) (shelves 2) (columns 4) (depth 2)
//           (shelf-heights 0.4 0.4) (column-width 0.25)
//           (station west (left 0 1) (right 1 2))
//           (torso low 0 0)
//           (buffer (0 3 0)))
//     (classes (class Cornflakes (category Cereals) (color yellow) (shape box)
//                     (footprint 0.19 0.07 0.29) (stackable true) (clutter false)))
//     (objects (object c1 Cornflakes (at 0 0 1) (level 0)))
//     (robot (base west) (torso low) (left c9))
//     (goal (generic (cell 0 0 0 Cornflakes)))
//     (weights (pick 1.2)) (policy (seed 7)) (noise (p-merge 1)) (limits (timeout 10))
//     (anomalies stacking-same))
//
// Goal forms: (generic (cell s c d Class)...), (explicit (id s c d)...),
// (relational (region (s c0 c1)...) (order A B) (clearance 0.02)
// (relation <subject> near|left-of|right-of|on-shelf <reference>)...) and
// (task (<verb> <object designator> <location designator>)). Any form may
// carry (robot-goal (base b) (torso t)).

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rackplan/anomaly.hpp"
#include "rackplan/designator.hpp"
#include "rackplan/error.hpp"
#include "rackplan/goal.hpp"
#include "rackplan/model.hpp"
#include "rackplan/planner.hpp"
#include "rackplan/resolve.hpp"
#include "rackplan/sexpr.hpp"
#include "rackplan/simulator.hpp"

namespace rackplan {

struct Scenario {
  std::string name;
  RackModel model;
  std::vector<ClassPtr> classes;  // declaration order
  WorldState initial;
  GoalSpec goal;
  /// Set when the goal was given as a task designator; `goal` is then empty
  /// until resolved against a state.
  std::optional<Designator> task;
  CostWeights weights;
  FailurePolicy policy;
  ObservationNoise noise;
  SearchLimits limits;
  /// Intended anomaly tags, as annotated in the file.
  std::vector<AnomalyTag> expected_anomalies;

  ClassCatalog catalog() const {
    ClassCatalog out;
    for (const auto& c : classes) out[c->name] = c;
    return out;
  }

  /// The goal in plannable form for state `s` (initial by default).
  GoalSpec goal_for(const WorldState& s) const {
    if (task) return resolve_task(*task, s, model);
    return resolve_goal(goal, s, model);
  }
  GoalSpec goal_for() const { return goal_for(initial); }

  friend bool operator==(const Scenario& a, const Scenario& b) {
    if (a.classes.size() != b.classes.size()) return false;
    for (std::size_t i = 0; i < a.classes.size(); ++i)
      if (!(*a.classes[i] == *b.classes[i])) return false;
    if (!(a.initial == b.initial)) return false;
    for (std::size_t i = 0; i < a.initial.size(); ++i)
      if (!(a.initial.cls(i) == b.initial.cls(i))) return false;
    return a.name == b.name && a.model == b.model && a.goal == b.goal && a.task == b.task &&
           a.weights == b.weights && a.policy == b.policy && a.noise == b.noise && a.limits == b.limits &&
           a.expected_anomalies == b.expected_anomalies;
  }
};

namespace detail {

[[noreturn]] inline void bad(const SExpr& at, const std::string& what) {
  throw Error(ErrorCode::validation_error,
              std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + what);
}

inline const std::string& head(const SExpr& e) {
  static const std::string none;
  return e.is_list() && e.items.front().is_symbol() ? e.items.front().text : none;
}

inline std::string text_of(const SExpr& e, const char* what) {
  if (e.kind != SExpr::Kind::symbol && e.kind != SExpr::Kind::string) bad(e, std::string("expected ") + what);
  return e.text;
}

inline double number_of(const SExpr& e, const char* what) {
  if (e.kind != SExpr::Kind::number) bad(e, std::string("expected a number for ") + what);
  return e.number;
}

inline int int_of(const SExpr& e, const char* what) {
  double v = number_of(e, what);
  if (v != static_cast<int>(v)) bad(e, std::string("expected an integer for ") + what);
  return static_cast<int>(v);
}

inline bool bool_of(const SExpr& e, const char* what) {
  if (e.is_symbol("true")) return true;
  if (e.is_symbol("false")) return false;
  bad(e, std::string("expected true or false for ") + what);
}

/// (key value) with exactly one value.
inline const SExpr& single(const SExpr& e) {
  if (e.items.size() != 2) bad(e, "(" + head(e) + " ...) takes exactly one value");
  return e.items[1];
}

inline Cell cell_of(const SExpr& e, std::size_t from = 0) {
  const auto& xs = e.items;
  if (!e.is_list() || xs.size() < from + 3) bad(e, "expected a cell (shelf column depth)");
  return {int_of(xs[from], "shelf"), int_of(xs[from + 1], "column"), int_of(xs[from + 2], "depth")};
}

inline int station_index(const RackModel& m, const SExpr& e) {
  std::string n = text_of(e, "a station name");
  for (std::size_t i = 0; i < m.stations.size(); ++i)
    if (m.stations[i].name == n) return static_cast<int>(i);
  bad(e, "unknown base station '" + n + "'");
}

inline int torso_index(const RackModel& m, const SExpr& e) {
  std::string n = text_of(e, "a torso level name");
  for (std::size_t i = 0; i < m.torso_levels.size(); ++i)
    if (m.torso_levels[i].name == n) return static_cast<int>(i);
  bad(e, "unknown torso level '" + n + "'");
}

inline RackModel parse_rack(const SExpr& sec) {
  RackModel m;
  m.shelf_heights.clear();
  for (std::size_t k = 1; k < sec.items.size(); ++k) {
    const SExpr& e = sec.items[k];
    const std::string& key = head(e);
    if (key == "name") m.name = text_of(single(e), "a rack name");
    else if (key == "shelves") m.shelf_count = int_of(single(e), "shelves");
    else if (key == "columns") m.column_count = int_of(single(e), "columns");
    else if (key == "depth") m.depth_count = int_of(single(e), "depth");
    else if (key == "column-width") m.column_width = number_of(single(e), "column-width");
    else if (key == "shelf-heights")
      for (std::size_t i = 1; i < e.items.size(); ++i) m.shelf_heights.push_back(number_of(e.items[i], "shelf height"));
    else if (key == "station") {
      if (e.items.size() != 4) bad(e, "(station name (left a b) (right a b))");
      BaseStation st;
      st.name = text_of(e.items[1], "a station name");
      for (std::size_t i = 2; i < 4; ++i) {
        const SExpr& w = e.items[i];
        if (w.items.size() != 3 || (head(w) != "left" && head(w) != "right")) bad(w, "expected (left a b) or (right a b)");
        IndexWindow win{int_of(w.items[1], "column"), int_of(w.items[2], "column")};
        (head(w) == "left" ? st.left_arm : st.right_arm) = win;
      }
      m.stations.push_back(st);
    } else if (key == "torso") {
      if (e.items.size() != 4) bad(e, "(torso name first-shelf last-shelf)");
      m.torso_levels.push_back({text_of(e.items[1], "a torso level name"),
                                {int_of(e.items[2], "shelf"), int_of(e.items[3], "shelf")}});
    } else if (key == "buffer") {
      for (std::size_t i = 1; i < e.items.size(); ++i) m.buffer_cells.push_back(cell_of(e.items[i]));
    } else {
      bad(e, "unknown rack field '" + key + "'");
    }
  }
  if (m.shelf_heights.empty()) m.shelf_heights.assign(static_cast<std::size_t>(std::max(m.shelf_count, 0)), 0.4);
  try {
    m.validate();
  } catch (const Error& err) {
    bad(sec, err.what());
  }
  return m;
}

inline ClassPtr parse_class(const SExpr& e) {
  if (head(e) != "class" || e.items.size() < 2) bad(e, "expected (class Name ...)");
  auto c = std::make_shared<ObjectClass>();
  c->name = text_of(e.items[1], "a class name");
  for (std::size_t k = 2; k < e.items.size(); ++k) {
    const SExpr& f = e.items[k];
    const std::string& key = head(f);
    if (key == "category") c->category = text_of(single(f), "a category");
    else if (key == "color") c->color = text_of(single(f), "a color");
    else if (key == "shape") c->shape = text_of(single(f), "a shape");
    else if (key == "stackable") c->stackable = bool_of(single(f), "stackable");
    else if (key == "clutter") c->clutter = bool_of(single(f), "clutter");
    else if (key == "footprint") {
      if (f.items.size() != 4) bad(f, "(footprint width depth height)");
      c->footprint = {number_of(f.items[1], "width"), number_of(f.items[2], "depth"), number_of(f.items[3], "height")};
    } else {
      bad(f, "unknown class field '" + key + "'");
    }
  }
  try {
    c->validate();
  } catch (const Error& err) {
    bad(e, err.what());
  }
  return c;
}

inline RelationConstraint parse_relation(const SExpr& e) {
  if (e.items.size() != 4) bad(e, "(relation <subject> <relation> <reference>)");
  RelationConstraint r;
  r.subject = designator_from_sexpr(e.items[1]);
  auto rel = relation_from(text_of(e.items[2], "a relation"));
  if (!rel) bad(e.items[2], "unknown relation '" + e.items[2].text + "'");
  r.relation = *rel;
  r.reference = designator_from_sexpr(e.items[3]);
  return r;
}

struct GoalSection {
  GoalSpec goal;
  std::optional<Designator> task;
};

inline GoalSection parse_goal(const SExpr& sec, const RackModel& m, const ClassCatalog& classes) {
  GoalSection out;
  const SExpr* form = nullptr;
  for (std::size_t k = 1; k < sec.items.size(); ++k) {
    const SExpr& e = sec.items[k];
    if (head(e) == "robot-goal") {
      RobotGoal rg;
      for (std::size_t i = 1; i < e.items.size(); ++i) {
        const SExpr& f = e.items[i];
        if (head(f) == "base") rg.base = station_index(m, single(f));
        else if (head(f) == "torso") rg.torso = torso_index(m, single(f));
        else bad(f, "expected (base b) or (torso t)");
      }
      out.goal.robot_goal = rg;
      continue;
    }
    if (form) bad(e, "exactly one goal form is allowed");
    form = &e;
  }
  if (!form) bad(sec, "goal section needs a goal form");
  const SExpr& g = *form;
  const std::string& kind = head(g);
  if (kind == "generic") {
    out.goal.kind = GoalKind::by_class;
    for (std::size_t i = 1; i < g.items.size(); ++i) {
      const SExpr& c = g.items[i];
      if (head(c) != "cell" || c.items.size() != 5) bad(c, "expected (cell shelf column depth Class)");
      std::string name = text_of(c.items[4], "a class name");
      if (!classes.count(name)) throw Error(ErrorCode::unknown_class, "goal references undefined class " + name);
      if (!out.goal.class_layout.emplace(cell_of(c, 1), name).second) bad(c, "duplicate goal cell");
    }
  } else if (kind == "explicit") {
    out.goal.kind = GoalKind::by_instance;
    for (std::size_t i = 1; i < g.items.size(); ++i) {
      const SExpr& c = g.items[i];
      if (!c.is_list() || c.items.size() != 4) bad(c, "expected (id shelf column depth)");
      if (!out.goal.explicit_map.emplace(text_of(c.items[0], "an object id"), cell_of(c, 1)).second)
        bad(c, "object mapped twice");
    }
  } else if (kind == "relational") {
    out.goal.kind = GoalKind::relational;
    for (std::size_t i = 1; i < g.items.size(); ++i) {
      const SExpr& f = g.items[i];
      const std::string& key = head(f);
      if (key == "region") {
        for (std::size_t j = 1; j < f.items.size(); ++j) {
          const SExpr& r = f.items[j];
          if (!r.is_list() || r.items.size() != 3) bad(r, "expected (shelf first-column last-column)");
          out.goal.region.push_back({int_of(r.items[0], "shelf"), int_of(r.items[1], "column"), int_of(r.items[2], "column")});
        }
      } else if (key == "order") {
        for (std::size_t j = 1; j < f.items.size(); ++j) out.goal.group_order.push_back(text_of(f.items[j], "a class name"));
      } else if (key == "clearance") {
        out.goal.clearance = number_of(single(f), "clearance");
      } else if (key == "relation") {
        out.goal.relations.push_back(parse_relation(f));
      } else {
        bad(f, "unknown relational goal field '" + key + "'");
      }
    }
  } else if (kind == "task") {
    out.task = designator_from_sexpr(single(g));
    if (out.task->kind != DesignatorKind::task) bad(g, "task goal needs a task designator");
    out.goal.kind = GoalKind::by_instance;
  } else {
    bad(g, "unknown goal form '" + kind + "'");
  }
  return out;
}

template <class F>
void parse_fields(const SExpr& sec, const char* section, F&& on_field) {
  for (std::size_t k = 1; k < sec.items.size(); ++k) {
    const SExpr& e = sec.items[k];
    if (!on_field(head(e), e)) bad(e, std::string("unknown ") + section + " field '" + head(e) + "'");
  }
}

}  // namespace detail

inline Scenario parse_scenario(std::string_view text) {
  SExpr root = read_sexpr(text);
  if (detail::head(root) != "scenario") detail::bad(root, "expected a top-level (scenario ...) expression");
  Scenario sc;
  const SExpr* sections[9] = {};
  const char* names[9] = {"rack", "classes", "objects", "robot", "goal", "weights", "policy", "noise", "limits"};
  for (std::size_t k = 1; k < root.items.size(); ++k) {
    const SExpr& sec = root.items[k];
    const std::string& h = detail::head(sec);
    if (h == "name") {
      if (!sc.name.empty()) detail::bad(sec, "duplicate section (name ...)");
      sc.name = detail::text_of(detail::single(sec), "a scenario name");
      continue;
    }
    if (h == "anomalies") {
      if (!sc.expected_anomalies.empty()) detail::bad(sec, "duplicate section (anomalies ...)");
      for (std::size_t i = 1; i < sec.items.size(); ++i) {
        auto tag = anomaly_from(detail::text_of(sec.items[i], "an anomaly tag"));
        if (!tag) detail::bad(sec.items[i], "unknown anomaly tag '" + sec.items[i].text + "'");
        sc.expected_anomalies.push_back(*tag);
      }
      continue;
    }
    bool known = false;
    for (int i = 0; i < 9; ++i)
      if (h == names[i]) {
        if (sections[i]) detail::bad(sec, "duplicate section (" + h + " ...)");
        sections[i] = &sec;
        known = true;
      }
    if (!known) detail::bad(sec, "unknown section '" + h + "'");
  }
  for (int i = 0; i < 5; ++i)
    if (!sections[i]) detail::bad(root, std::string("missing section (") + names[i] + " ...)");

  sc.model = detail::parse_rack(*sections[0]);

  ClassCatalog catalog;
  for (std::size_t k = 1; k < sections[1]->items.size(); ++k) {
    ClassPtr c = detail::parse_class(sections[1]->items[k]);
    if (catalog.count(c->name)) detail::bad(sections[1]->items[k], "duplicate class " + c->name);
    catalog[c->name] = c;
    sc.classes.push_back(c);
  }

  WorldState::Builder b;
  std::set<std::string> seen;
  std::map<std::string, ClassPtr> unplaced;  // declared without (at ...): must be held
  for (std::size_t k = 1; k < sections[2]->items.size(); ++k) {
    const SExpr& o = sections[2]->items[k];
    if (detail::head(o) != "object" || o.items.size() < 3) detail::bad(o, "expected (object id Class (at s c d) [(level n)])");
    std::string id = detail::text_of(o.items[1], "an object id");
    std::string cls = detail::text_of(o.items[2], "a class name");
    auto it = catalog.find(cls);
    if (it == catalog.end())
      throw Error(ErrorCode::unknown_class, "object " + id + " references undefined class " + cls);
    if (!seen.insert(id).second) detail::bad(o, "duplicate object id " + id);
    std::optional<Cell> at;
    int level = 0;
    for (std::size_t i = 3; i < o.items.size(); ++i) {
      const SExpr& f = o.items[i];
      if (detail::head(f) == "at") at = detail::cell_of(f, 1);
      else if (detail::head(f) == "level") level = detail::int_of(detail::single(f), "level");
      else detail::bad(f, "unknown object field '" + detail::head(f) + "'");
    }
    if (at) b.add(id, it->second, *at, level);
    else unplaced[id] = it->second;
  }

  const SExpr& robot = *sections[3];
  for (std::size_t k = 1; k < robot.items.size(); ++k) {
    const SExpr& f = robot.items[k];
    const std::string& key = detail::head(f);
    if (key == "base") b.base(detail::station_index(sc.model, detail::single(f)));
    else if (key == "torso") b.torso(detail::torso_index(sc.model, detail::single(f)));
    else if (key == "left" || key == "right") {
      std::string id = detail::text_of(detail::single(f), "an object id");
      auto it = unplaced.find(id);
      if (it == unplaced.end()) detail::bad(f, "held object " + id + " must be declared without (at ...)");
      b.hold(key == "left" ? Arm::left : Arm::right, id, it->second);
      unplaced.erase(it);
    } else {
      detail::bad(f, "unknown robot field '" + key + "'");
    }
  }
  if (!unplaced.empty())
    throw Error(ErrorCode::validation_error, "object " + unplaced.begin()->first + " has no (at ...) and is not held");
  sc.initial = b.build(&sc.model);

  auto g = detail::parse_goal(*sections[4], sc.model, catalog);
  sc.goal = std::move(g.goal);
  sc.task = std::move(g.task);
  if (!sc.task) validate_goal(sc.goal, sc.model);

  if (const SExpr* w = sections[5])
    detail::parse_fields(*w, "weights", [&](const std::string& key, const SExpr& e) {
      double v = detail::number_of(detail::single(e), "weight");
      if (key == "pick") sc.weights.pick = v;
      else if (key == "place") sc.weights.place = v;
      else if (key == "move-torso") sc.weights.move_torso = v;
      else if (key == "move-base") sc.weights.move_base = v;
      else if (key == "handover") sc.weights.handover = v;
      else return false;
      return true;
    });
  if (const SExpr* p = sections[6])
    detail::parse_fields(*p, "policy", [&](const std::string& key, const SExpr& e) {
      const SExpr& v = detail::single(e);
      if (key == "p-grasp-fail") sc.policy.p_grasp_fail = detail::number_of(v, key.c_str());
      else if (key == "p-drop") sc.policy.p_drop = detail::number_of(v, key.c_str());
      else if (key == "p-trajectory-fail") sc.policy.p_trajectory_fail = detail::number_of(v, key.c_str());
      else if (key == "retry-limit") sc.policy.retry_limit = detail::int_of(v, key.c_str());
      else if (key == "frustration-limit") sc.policy.frustration_limit = detail::int_of(v, key.c_str());
      else if (key == "replan-budget") sc.policy.replan_budget = detail::int_of(v, key.c_str());
      else if (key == "seed") {
        double s = detail::number_of(v, "seed");
        if (s < 0 || s != static_cast<double>(static_cast<std::uint64_t>(s))) detail::bad(v, "seed must be a non-negative integer");
        sc.policy.seed = static_cast<std::uint64_t>(s);
      } else return false;
      return true;
    });
  if (const SExpr* n = sections[7])
    detail::parse_fields(*n, "noise", [&](const std::string& key, const SExpr& e) {
      if (key == "p-omit") sc.noise.p_omit = detail::number_of(detail::single(e), key.c_str());
      else if (key == "p-merge") sc.noise.p_merge = detail::number_of(detail::single(e), key.c_str());
      else return false;
      return true;
    });
  if (const SExpr* l = sections[8])
    detail::parse_fields(*l, "limits", [&](const std::string& key, const SExpr& e) {
      const SExpr& v = detail::single(e);
      if (key == "max-expansions") sc.limits.max_expansions = static_cast<std::int64_t>(detail::number_of(v, key.c_str()));
      else if (key == "max-solutions") sc.limits.max_solutions = detail::int_of(v, key.c_str());
      else if (key == "timeout") sc.limits.timeout = std::chrono::duration<double>(detail::number_of(v, key.c_str()));
      else return false;
      return true;
    });
  sc.weights.validate();
  sc.policy.validate();
  sc.noise.validate();
  sc.limits.validate();
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

namespace detail {

inline SExpr sym(std::string s) { return SExpr::symbol(std::move(s)); }
inline SExpr num(double v) { return SExpr::num(v); }

/// Symbol when the reader would read it back as one, string otherwise.
inline SExpr name_atom(const std::string& s) {
  bool ok = !s.empty() && ((s[0] >= 'A' && s[0] <= 'Z') || (s[0] >= 'a' && s[0] <= 'z'));
  for (char c : s) ok = ok && ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-');
  return ok ? sym(s) : SExpr::string(s);
}

inline SExpr field(const char* key, SExpr v) { return SExpr::list({sym(key), std::move(v)}); }

inline std::vector<SExpr> cell_items(const Cell& c) { return {num(c.shelf), num(c.column), num(c.depth)}; }

}  // namespace detail

inline SExpr scenario_to_sexpr(const Scenario& sc) {
  using namespace detail;
  std::vector<SExpr> root{sym("scenario")};
  if (!sc.name.empty()) root.push_back(field("name", SExpr::string(sc.name)));

  const RackModel& m = sc.model;
  std::vector<SExpr> rack{sym("rack"),
                          field("name", name_atom(m.name)),
                          field("shelves", num(m.shelf_count)),
                          field("columns", num(m.column_count)),
                          field("depth", num(m.depth_count))};
  std::vector<SExpr> heights{sym("shelf-heights")};
  for (double h : m.shelf_heights) heights.push_back(num(h));
  rack.push_back(SExpr::list(heights));
  rack.push_back(field("column-width", num(m.column_width)));
  for (const auto& st : m.stations)
    rack.push_back(SExpr::list({sym("station"), name_atom(st.name),
                                SExpr::list({sym("left"), num(st.left_arm.first), num(st.left_arm.last)}),
                                SExpr::list({sym("right"), num(st.right_arm.first), num(st.right_arm.last)})}));
  for (const auto& t : m.torso_levels)
    rack.push_back(SExpr::list({sym("torso"), name_atom(t.name), num(t.shelves.first), num(t.shelves.last)}));
  if (!m.buffer_cells.empty()) {
    std::vector<SExpr> buf{sym("buffer")};
    for (const Cell& c : m.buffer_cells) buf.push_back(SExpr::list(cell_items(c)));
    rack.push_back(SExpr::list(buf));
  }
  root.push_back(SExpr::list(rack));

  std::vector<SExpr> classes{sym("classes")};
  for (const auto& c : sc.classes)
    classes.push_back(SExpr::list({sym("class"), name_atom(c->name), field("category", name_atom(c->category)),
                                   field("color", name_atom(c->color)), field("shape", name_atom(c->shape)),
                                   SExpr::list({sym("footprint"), num(c->footprint.width), num(c->footprint.depth),
                                                num(c->footprint.height)}),
                                   field("stackable", sym(c->stackable ? "true" : "false")),
                                   field("clutter", sym(c->clutter ? "true" : "false"))}));
  root.push_back(SExpr::list(classes));

  const WorldState& s = sc.initial;
  std::vector<SExpr> objects{sym("objects")};
  std::vector<std::size_t> order = s.rack_order();
  for (Arm a : kArms)
    if (s.hand(a) != WorldState::kEmptyHand) order.push_back(static_cast<std::size_t>(s.hand(a)));
  for (std::size_t i : order) {
    std::vector<SExpr> o{sym("object"), name_atom(s.id(i)), name_atom(s.cls(i).name)};
    if (!s.slot(i).held()) {
      std::vector<SExpr> at{sym("at")};
      for (auto& x : cell_items(s.slot(i).cell())) at.push_back(x);
      o.push_back(SExpr::list(at));
      o.push_back(field("level", num(s.slot(i).level)));
    }
    objects.push_back(SExpr::list(o));
  }
  root.push_back(SExpr::list(objects));

  std::vector<SExpr> robot{sym("robot"), field("base", name_atom(m.stations.at(static_cast<std::size_t>(s.base())).name)),
                           field("torso", name_atom(m.torso_levels.at(static_cast<std::size_t>(s.torso())).name))};
  for (Arm a : kArms)
    if (auto h = s.held(a)) robot.push_back(field(a == Arm::left ? "left" : "right", name_atom(*h)));
  root.push_back(SExpr::list(robot));

  std::vector<SExpr> goal{sym("goal")};
  const GoalSpec& g = sc.goal;
  if (sc.task) {
    goal.push_back(field("task", to_sexpr(*sc.task)));
  } else if (g.kind == GoalKind::by_class) {
    std::vector<SExpr> f{sym("generic")};
    for (const auto& [c, name] : g.class_layout) {
      std::vector<SExpr> cell{sym("cell")};
      for (auto& x : cell_items(c)) cell.push_back(x);
      cell.push_back(name_atom(name));
      f.push_back(SExpr::list(cell));
    }
    goal.push_back(SExpr::list(f));
  } else if (g.kind == GoalKind::by_instance) {
    std::vector<SExpr> f{sym("explicit")};
    for (const auto& [id, c] : g.explicit_map) {
      std::vector<SExpr> e{name_atom(id)};
      for (auto& x : cell_items(c)) e.push_back(x);
      f.push_back(SExpr::list(e));
    }
    goal.push_back(SExpr::list(f));
  } else {
    std::vector<SExpr> f{sym("relational")};
    std::vector<SExpr> region{sym("region")};
    for (const auto& r : g.region) region.push_back(SExpr::list({num(r.shelf), num(r.first_column), num(r.last_column)}));
    f.push_back(SExpr::list(region));
    if (!g.group_order.empty()) {
      std::vector<SExpr> order_list{sym("order")};
      for (const auto& n : g.group_order) order_list.push_back(name_atom(n));
      f.push_back(SExpr::list(order_list));
    }
    f.push_back(field("clearance", num(g.clearance)));
    for (const auto& r : g.relations)
      f.push_back(SExpr::list({sym("relation"), to_sexpr(r.subject), sym(to_string(r.relation)), to_sexpr(r.reference)}));
    goal.push_back(SExpr::list(f));
  }
  if (g.robot_goal) {
    std::vector<SExpr> rg{sym("robot-goal")};
    if (g.robot_goal->base) rg.push_back(field("base", name_atom(m.stations.at(static_cast<std::size_t>(*g.robot_goal->base)).name)));
    if (g.robot_goal->torso)
      rg.push_back(field("torso", name_atom(m.torso_levels.at(static_cast<std::size_t>(*g.robot_goal->torso)).name)));
    goal.push_back(SExpr::list(rg));
  }
  root.push_back(SExpr::list(goal));

  const CostWeights& w = sc.weights;
  root.push_back(SExpr::list({sym("weights"), field("pick", num(w.pick)), field("place", num(w.place)),
                              field("move-torso", num(w.move_torso)), field("move-base", num(w.move_base)),
                              field("handover", num(w.handover))}));
  const FailurePolicy& p = sc.policy;
  root.push_back(SExpr::list({sym("policy"), field("p-grasp-fail", num(p.p_grasp_fail)), field("p-drop", num(p.p_drop)),
                              field("p-trajectory-fail", num(p.p_trajectory_fail)),
                              field("retry-limit", num(p.retry_limit)),
                              field("frustration-limit", num(p.frustration_limit)),
                              field("replan-budget", num(p.replan_budget)),
                              field("seed", num(static_cast<double>(p.seed)))}));
  root.push_back(SExpr::list({sym("noise"), field("p-omit", num(sc.noise.p_omit)), field("p-merge", num(sc.noise.p_merge))}));
  root.push_back(SExpr::list({sym("limits"), field("max-expansions", num(static_cast<double>(sc.limits.max_expansions))),
                              field("max-solutions", num(sc.limits.max_solutions)),
                              field("timeout", num(sc.limits.timeout.count()))}));
  if (!sc.expected_anomalies.empty()) {
    std::vector<SExpr> an{sym("anomalies")};
    for (AnomalyTag t : sc.expected_anomalies) an.push_back(sym(to_string(t)));
    root.push_back(SExpr::list(an));
  }
  return SExpr::list(root);
}

/// Pretty-printed scenario text; parse_scenario reads it back unchanged.
inline std::string save_scenario(const Scenario& sc) { return print_pretty(scenario_to_sexpr(sc)) + "\n"; }

inline void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << save_scenario(sc);
}

}  // namespace rackplan

#endif  // RACKPLAN_SCENARIO_HPP
