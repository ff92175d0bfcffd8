#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "rackplan/action.hpp"
#include "rackplan/resolve.hpp"

namespace rackplan {
namespace {

using testing::Catalog;

class ResolveTest : public ::testing::Test {
 protected:
  Catalog k;
  RackModel m = wide_rack();
  // Shelf 0: c1 c2 . .   (salt behind column 3)
  // Shelf 1: . m1 . k1
  WorldState s = WorldState::Builder()
                     .add("c1", k.cornflakes, {0, 0, 0})
                     .add("c2", k.cornflakes, {0, 1, 0})
                     .add("s1", k.salt, {0, 3, 1})
                     .add("m1", k.muesli, {1, 1, 0})
                     .add("k1", k.coffee, {1, 3, 0})
                     .build(&m);

  static RackModel wide_rack() {
    RackModel r = testing::small_rack();
    r.column_count = 4;
    r.stations = {{"west", {0, 1}, {1, 2}}, {"east", {2, 3}, {2, 3}}};
    r.buffer_cells.clear();
    return r;
  }

  std::vector<std::string> objects(const char* text) const {
    return resolve_object(parse_designator(text), s, &m).candidates;
  }
  std::vector<Cell> cells(const char* text) const { return resolve_location(parse_designator(text), s, m).candidates; }
};

using Ids = std::vector<std::string>;
using Cells = std::vector<Cell>;

TEST_F(ResolveTest, YellowCornflakesBox) {
  auto r = resolve_object(parse_designator("(an object (type box) (label ``Cornflakes'') (color yellow))"), s);
  EXPECT_EQ(r.candidates, (Ids{"c1", "c2"}));
  EXPECT_EQ(r.referent(), "c1");
  EXPECT_TRUE(r.exhaustive);
}

TEST_F(ResolveTest, SingleMatchingInstance) {
  EXPECT_EQ(objects("(an object (type box) (label \"Muesli\") (color blue))"), Ids{"m1"});
}

TEST_F(ResolveTest, CategoryReturnsEveryMemberInOrder) {
  EXPECT_EQ(objects("(an object (category \"Cereals\"))"), (Ids{"c1", "c2", "m1"}));
}

TEST_F(ResolveTest, UnsatisfiableDescriptionIsNoMatch) {
  try {
    objects("(an object (color purple))");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_match);
  }
}

TEST_F(ResolveTest, WrongDesignatorKinds) {
  try {
    resolve_object(parse_designator("(a location (shelf 0))"), s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_an_object_designator);
  }
  try {
    resolve_location(parse_designator("(an object (type box))"), s, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_a_location_designator);
  }
}

TEST_F(ResolveTest, HeldObjectsComeAfterRackObjects) {
  WorldState t = apply_action(s, Action::pick("c1", Arm::left, {0, 0, 0}, 0), m);
  EXPECT_EQ(resolve_object(parse_designator("(an object (label \"Cornflakes\"))"), t).candidates, (Ids{"c2", "c1"}));
}

TEST_F(ResolveTest, ObjectsByPosition) {
  EXPECT_EQ(objects("(an object (shelf 1))"), (Ids{"m1", "k1"}));
  EXPECT_EQ(objects("(an object (near (an object (label \"Coffee\"))))"), (Ids{"s1", "k1"}));
  EXPECT_THROW(objects("(an object (category \"Cereals\") (near (an object (label \"Coffee\"))))"), Error);
}

TEST_F(ResolveTest, ShelfRestrictsToFreeFrontCells) {
  EXPECT_EQ(cells("((on rack) (shelf 0))"), (Cells{{0, 2, 0}, {0, 3, 0}}));
  EXPECT_EQ(cells("((on rack-1) (shelf 1))"), (Cells{{1, 0, 0}, {1, 2, 0}}));
}

TEST_F(ResolveTest, OtherRackNameMatchesNothing) {
  EXPECT_THROW(cells("((on rack-7))"), Error);
}

TEST_F(ResolveTest, OutOfRangeShelfIsNoMatch) {
  try {
    cells("(a location (shelf 99))");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_match);
  }
}

TEST_F(ResolveTest, NearMatchesBruteForce) {
  Designator d = parse_designator("(a location (near (an object (category \"Cereals\"))))");
  std::vector<Cell> anchors{{0, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  Cells expected;
  for (const Cell& c : m.cells()) {
    if (c.depth != 0 || !s.is_free(c)) continue;
    for (const Cell& a : anchors)
      if (std::abs(a.shelf - c.shelf) + std::abs(a.column - c.column) <= 1) {
        expected.push_back(c);
        break;
      }
  }
  EXPECT_EQ(resolve_location(d, s, m).candidates, expected);
  EXPECT_EQ(expected, (Cells{{0, 2, 0}, {1, 0, 0}, {1, 2, 0}}));
}

TEST_F(ResolveTest, LeftAndRightOf) {
  EXPECT_EQ(cells("(a location (right-of (an object (label \"Cornflakes\"))))"), (Cells{{0, 2, 0}, {0, 3, 0}}));
  EXPECT_EQ(cells("(a location (left-of (an object (label \"Coffee\"))))"), (Cells{{1, 0, 0}, {1, 2, 0}}));
  // Anchors on two shelves leave no cell on the same shelf as all of them.
  EXPECT_THROW(cells("(a location (left-of (an object (category \"Cereals\"))))"), Error);
}

TEST_F(ResolveTest, InnerDesignatorWithoutMatch) {
  try {
    cells("(a location (near (an object (color purple))))");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unresolvable_inner_object);
  }
}

TEST_F(ResolveTest, AttributesDoNotApplyToLocations) {
  EXPECT_THROW(cells("(a location (color red))"), Error);
}

TEST_F(ResolveTest, TaskGroundsToExplicitGoal) {
  Designator task = parse_designator(
      "(fetch-and-place (an object (label \"Muesli\")) (a location (near (an object (label \"Cornflakes\")))))");
  GoalSpec g = resolve_task(task, s, m);
  EXPECT_EQ(g.kind, GoalKind::by_instance);
  EXPECT_EQ(g.explicit_map, (std::map<std::string, Cell>{{"m1", {0, 2, 0}}}));
  EXPECT_THROW(resolve_task(parse_designator("(fetch (an object (type box)))"), s, m), Error);
}

// Adding a property can only narrow the candidate set.
TEST_F(ResolveTest, AddingAPropertyNeverEnlargesTheResult) {
  const std::vector<std::string> object_props{
      "(type box)", "(type irregular)", "(label \"Cornflakes\")", "(color yellow)", "(color brown)",
      "(category \"Cereals\")", "(shelf 0)", "(shelf 1)", "(on rack)", "(near (an object (label \"Coffee\")))",
      "(right-of (an object (label \"Cornflakes\")))"};
  const std::vector<std::string> location_props{
      "(shelf 0)", "(shelf 1)", "(on rack)", "(near (an object (label \"Coffee\")))",
      "(near (an object (category \"Cereals\")))", "(left-of (an object (label \"Coffee\")))",
      "(right-of (an object (label \"Cornflakes\")))"};
  auto objs = [&](const std::string& body) -> Ids {
    try {
      return resolve_object(parse_designator("(an object " + body + ")"), s, &m).candidates;
    } catch (const Error&) {
      return {};
    }
  };
  auto locs = [&](const std::string& body) -> Cells {
    try {
      return resolve_location(parse_designator("(a location " + body + ")"), s, m).candidates;
    } catch (const Error&) {
      return {};
    }
  };
  auto subset = [](const auto& small, const auto& big) {
    return std::all_of(small.begin(), small.end(),
                       [&](const auto& x) { return std::find(big.begin(), big.end(), x) != big.end(); });
  };
  std::mt19937 rng(3);
  for (int round = 0; round < 300; ++round) {
    const auto& pool = round % 2 ? object_props : location_props;
    std::string body;
    int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) body += pool[rng() % pool.size()] + " ";
    std::string extra = pool[rng() % pool.size()];
    if (round % 2) {
      EXPECT_TRUE(subset(objs(body + extra), objs(body))) << body << "+" << extra;
    } else {
      EXPECT_TRUE(subset(locs(body + extra), locs(body))) << body << "+" << extra;
    }
  }
}

class RelationalGoal : public ::testing::Test {
 protected:
  Catalog k;
  RackModel m = testing::flat_rack(6);
  WorldState s = WorldState::Builder()
                     .add("c1", k.cornflakes, {0, 0, 0})
                     .add("k1", k.coffee, {0, 1, 0})
                     .add("c2", k.cornflakes, {0, 2, 0})
                     .add("k2", k.coffee, {0, 3, 0})
                     .build(&m);

  GoalSpec relational(std::vector<std::pair<const char*, const char*>> rels, Relation r = Relation::right_of) {
    GoalSpec g;
    g.kind = GoalKind::relational;
    g.region = {{0, 0, 5}};
    g.group_order = {"Cornflakes", "Coffee"};
    for (auto [a, b] : rels)
      g.relations.push_back({parse_designator(std::string("(an object (label \"") + a + "\"))"), r,
                             parse_designator(std::string("(an object (label \"") + b + "\"))")});
    return g;
  }
};

TEST_F(RelationalGoal, NoRelationsKeepsTheGivenOrder) {
  GoalSpec g = resolve_goal(relational({}), s, m);
  EXPECT_EQ(g.kind, GoalKind::by_class);
  EXPECT_EQ(g.class_layout, (std::map<Cell, std::string>{{{0, 0, 0}, "Cornflakes"},
                                                          {{0, 1, 0}, "Cornflakes"},
                                                          {{0, 2, 0}, "Coffee"},
                                                          {{0, 3, 0}, "Coffee"}}));
}

TEST_F(RelationalGoal, CerealRightOfCoffee) {
  GoalSpec g = resolve_goal(relational({{"Cornflakes", "Coffee"}}), s, m);
  int max_coffee = -1;
  int min_cereal = 99;
  for (const auto& [c, name] : g.class_layout) {
    if (name == "Coffee") max_coffee = std::max(max_coffee, c.column);
    if (name == "Cornflakes") min_cereal = std::min(min_cereal, c.column);
  }
  EXPECT_GT(min_cereal, max_coffee);
  EXPECT_EQ(g.class_layout.size(), 4u);
  EXPECT_NO_THROW(validate_goal(g, m));
}

TEST_F(RelationalGoal, CyclicRelationsAreUnsatisfiable) {
  try {
    resolve_goal(relational({{"Cornflakes", "Coffee"}, {"Coffee", "Cornflakes"}}), s, m);
    FAIL();
  } catch (const UnsatisfiableRelations& e) {
    EXPECT_EQ(e.code(), ErrorCode::unsatisfiable_relations);
    EXPECT_EQ(e.first(), 0u);
    EXPECT_EQ(e.second(), 1u);
  }
}

TEST_F(RelationalGoal, OnShelfNeedsAShelfNumber) {
  GoalSpec g = relational({});
  g.relations.push_back({parse_designator("(an object (label \"Coffee\"))"), Relation::on_shelf,
                         parse_designator("(a location (on rack))")});
  EXPECT_THROW(resolve_goal(g, s, m), Error);
}

TEST_F(RelationalGoal, RegionTooSmall) {
  GoalSpec g = relational({});
  g.region = {{0, 0, 1}};
  try {
    resolve_goal(g, s, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::region_too_small);
  }
}

// Whatever layout comes out satisfies the goal invariants and every relation.
TEST_F(RelationalGoal, OutputSatisfiesEveryRelation) {
  const char* names[] = {"Cornflakes", "Coffee", "Muesli"};
  WorldState t = WorldState::Builder()
                     .add("c1", k.cornflakes, {0, 0, 0})
                     .add("k1", k.coffee, {0, 1, 0})
                     .add("m1", k.muesli, {0, 2, 0})
                     .build(&m);
  std::mt19937 rng(8);
  int resolved = 0;
  for (int round = 0; round < 60; ++round) {
    GoalSpec g;
    g.kind = GoalKind::relational;
    g.region = {{0, 0, 5}};
    int n = static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      int a = static_cast<int>(rng() % 3);
      int b = (a + 1 + static_cast<int>(rng() % 2)) % 3;
      Relation r = std::array{Relation::left_of, Relation::right_of, Relation::near}[rng() % 3];
      g.relations.push_back({parse_designator(std::string("(an object (label \"") + names[a] + "\"))"), r,
                             parse_designator(std::string("(an object (label \"") + names[b] + "\"))")});
    }
    GoalSpec out;
    try {
      out = resolve_goal(g, t, m);
    } catch (const UnsatisfiableRelations&) {
      continue;
    }
    ++resolved;
    EXPECT_NO_THROW(validate_goal(out, m));
    for (const auto& rel : g.relations) {
      std::string a = rel.subject.find("label")->text();
      std::string b = rel.reference.find("label")->text();
      Cell ca{}, cb{};
      for (const auto& [c, name] : out.class_layout) {
        if (name == a) ca = c;
        if (name == b) cb = c;
      }
      switch (rel.relation) {
        case Relation::left_of: EXPECT_LT(ca.column, cb.column); break;
        case Relation::right_of: EXPECT_GT(ca.column, cb.column); break;
        default: EXPECT_LE(std::abs(ca.column - cb.column), 1); break;
      }
    }
  }
  EXPECT_GT(resolved, 20);
}

}  // namespace
}  // namespace rackplan
