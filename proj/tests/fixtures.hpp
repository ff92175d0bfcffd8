#ifndef RACKPLAN_TESTS_FIXTURES_HPP
#define RACKPLAN_TESTS_FIXTURES_HPP

#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "rackplan/goal.hpp"
#include "rackplan/model.hpp"

namespace rackplan::testing {

inline ClassPtr make_class(std::string name, std::string category, std::string color, std::string shape,
                           bool stackable = true, bool clutter = false, double width = 0.19) {
  auto c = std::make_shared<ObjectClass>();
  c->name = std::move(name);
  c->category = std::move(category);
  c->color = std::move(color);
  c->shape = std::move(shape);
  c->stackable = stackable;
  c->clutter = clutter;
  c->footprint = {width, 0.07, 0.29};
  return c;
}

struct Catalog {
  ClassPtr cornflakes = make_class("Cornflakes", "Cereals", "yellow", "box");
  ClassPtr muesli = make_class("Muesli", "Cereals", "blue", "box");
  ClassPtr coffee = make_class("Coffee", "Beverages", "brown", "box");
  ClassPtr salt = make_class("Salt", "Spices", "white", "irregular", false, true, 0.08);

  ClassCatalog all() const {
    return {{"Cornflakes", cornflakes}, {"Muesli", muesli}, {"Coffee", coffee}, {"Salt", salt}};
  }
};

/// Two shelves, three columns, two depth slots. Station 0 reaches columns
/// 0-1 with the left arm and 1-2 with the right; station 1 the mirror
/// image shifted right. Torso level t reaches shelf t only.
inline RackModel small_rack() {
  RackModel m;
  m.name = "rack-1";
  m.shelf_count = 2;
  m.column_count = 3;
  m.depth_count = 2;
  m.shelf_heights = {0.4, 0.4};
  m.column_width = 0.25;
  m.stations = {{"west", {0, 1}, {1, 2}}, {"east", {1, 2}, {2, 2}}};
  m.torso_levels = {{"low", {0, 0}}, {"high", {1, 1}}};
  m.buffer_cells = {{0, 2, 0}, {1, 2, 0}};
  return m;
}

/// One shelf, three columns, one depth, everything reachable.
inline RackModel flat_rack(int columns = 3) {
  RackModel m;
  m.shelf_count = 1;
  m.column_count = columns;
  m.depth_count = 1;
  m.stations = {{"center", {0, columns - 1}, {0, columns - 1}}};
  m.torso_levels = {{"mid", {0, 0}}};
  return m;
}

/// Random valid state on `m`: objects drawn from `classes`, stacked only on
/// stackable classes, optionally one object in a random hand.
inline WorldState random_state(std::mt19937& rng, const RackModel& m, const std::vector<ClassPtr>& classes,
                               int objects, bool allow_held = false) {
  std::vector<Cell> cells = m.cells();
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  for (;;) {
    WorldState::Builder b;
    std::map<Cell, std::vector<ClassPtr>> stacks;
    bool held = false;
    bool ok = true;
    for (int i = 0; i < objects; ++i) {
      ClassPtr cls = classes[pick(classes.size())];
      std::string id = "o" + std::to_string(i);
      if (allow_held && !held && pick(4) == 0) {
        b.hold(pick(2) ? Arm::left : Arm::right, id, cls);
        held = true;
        continue;
      }
      Cell c = cells[pick(cells.size())];
      auto& st = stacks[c];
      if (!st.empty() && (!st.back()->stackable || pick(3) != 0)) {
        ok = false;
        break;
      }
      b.add(id, cls, c, static_cast<int>(st.size()));
      st.push_back(cls);
    }
    if (!ok) continue;
    b.base(static_cast<int>(pick(m.stations.size()))).torso(static_cast<int>(pick(m.torso_levels.size())));
    return b.build(&m);
  }
}

/// Generic goal placing every non-clutter object of `s` on distinct random
/// front cells (one class per cell).
inline GoalSpec random_generic_goal(std::mt19937& rng, const RackModel& m, const WorldState& s) {
  std::vector<Cell> front;
  for (const Cell& c : m.cells())
    if (c.depth == 0 && !m.is_buffer(c)) front.push_back(c);
  std::shuffle(front.begin(), front.end(), rng);
  std::map<Cell, std::string> layout;
  std::size_t next = 0;
  for (std::size_t i = 0; i < s.size() && next < front.size(); ++i)
    if (!s.cls(i).clutter) layout[front[next++]] = s.cls(i).name;
  return GoalSpec::by_class(layout);
}

}  // namespace rackplan::testing

#endif  // RACKPLAN_TESTS_FIXTURES_HPP
