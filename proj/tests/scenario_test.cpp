#include <gtest/gtest.h>

#include <filesystem>

#include "rackplan/anomaly.hpp"
#include "rackplan/scenario.hpp"

namespace rackplan {
namespace {

namespace fs = std::filesystem;

std::vector<fs::path> corpus() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(RACKPLAN_SCENARIO_DIR))
    if (e.path().extension() == ".scn") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

const char* kMinimal = R"((scenario
  (name tiny)
  (rack (shelves 1) (columns 2) (depth 1)
        (station only (left 0 1) (right 0 1))
        (torso mid 0 0))
  (classes (class Cornflakes (category Cereals) (color yellow) (shape box)))
  (objects (object c1 Cornflakes (at 0 0 0)))
  (robot (base only) (torso mid))
  (goal (explicit (c1 0 1 0)))))";

TEST(ScenarioCorpus, HasEveryCase) {
  auto files = corpus();
  EXPECT_EQ(files.size(), 21u);
  for (const char* name : {"1.a", "1.j", "2.a", "2.j", "salt-cereal"})
    EXPECT_TRUE(fs::exists(fs::path(RACKPLAN_SCENARIO_DIR) / (std::string(name) + ".scn"))) << name;
}

TEST(ScenarioCorpus, LoadsAndMatchesItsAnomalyAnnotations) {
  for (const auto& path : corpus()) {
    SCOPED_TRACE(path.filename().string());
    Scenario sc = load_scenario(path.string());
    EXPECT_EQ(sc.name, path.stem().string());
    EXPECT_FALSE(sc.expected_anomalies.empty());
    GoalSpec goal = sc.goal_for();
    EXPECT_NO_THROW(validate_goal(goal, sc.model));
    EXPECT_EQ(anomaly_tags(detect_anomalies(sc.initial, goal, sc.model)), sc.expected_anomalies);
  }
}

TEST(ScenarioCorpus, HiddenCerealCase) {
  Scenario sc = load_scenario(std::string(RACKPLAN_SCENARIO_DIR) + "/2.d.scn");
  auto anomalies = detect_anomalies(sc.initial, sc.goal_for(), sc.model);
  ASSERT_EQ(anomalies.size(), 2u);
  EXPECT_EQ(anomalies[0].tag, AnomalyTag::multiple_obstructions);
  EXPECT_EQ(anomalies[0].subjects, (std::vector<std::string>{"c1", "c2"}));
  EXPECT_EQ(anomalies[1], (Anomaly{AnomalyTag::irregular_object, {"s1"}}));
}

TEST(ScenarioCorpus, SaveLoadRoundTrip) {
  for (const auto& path : corpus()) {
    SCOPED_TRACE(path.filename().string());
    Scenario sc = load_scenario(path.string());
    std::string text = save_scenario(sc);
    Scenario back = parse_scenario(text);
    EXPECT_TRUE(back == sc);
    EXPECT_EQ(save_scenario(back), text);
  }
}

TEST(ScenarioFormat, Defaults) {
  Scenario sc = parse_scenario(kMinimal);
  EXPECT_EQ(sc.name, "tiny");
  EXPECT_EQ(sc.weights, CostWeights{});
  EXPECT_EQ(sc.policy, FailurePolicy{});
  EXPECT_EQ(sc.policy.frustration_limit, 3);
  EXPECT_EQ(sc.policy.replan_budget, 10);
  EXPECT_EQ(sc.noise, ObservationNoise{});
  EXPECT_EQ(sc.limits, SearchLimits{});
  EXPECT_EQ(sc.model.shelf_heights, std::vector<double>{0.4});
  EXPECT_EQ(sc.goal.kind, GoalKind::by_instance);
  EXPECT_EQ(sc.goal.explicit_map.at("c1"), (Cell{0, 1, 0}));
  EXPECT_TRUE(parse_scenario(save_scenario(sc)) == sc);
}

TEST(ScenarioFormat, OptionalSections) {
  std::string text = kMinimal;
  text.insert(text.size() - 1,
              "\n  (weights (pick 2) (move-base 3))"
              "\n  (policy (p-grasp-fail 0.25) (retry-limit 1) (seed 99))"
              "\n  (noise (p-omit 0.1))"
              "\n  (limits (max-solutions 4) (timeout 2.5))");
  Scenario sc = parse_scenario(text);
  EXPECT_EQ(sc.weights.pick, 2);
  EXPECT_EQ(sc.weights.move_base, 3);
  EXPECT_EQ(sc.weights.place, CostWeights{}.place);
  EXPECT_EQ(sc.policy.p_grasp_fail, 0.25);
  EXPECT_EQ(sc.policy.retry_limit, 1);
  EXPECT_EQ(sc.policy.seed, 99u);
  EXPECT_EQ(sc.noise.p_omit, 0.1);
  EXPECT_EQ(sc.limits.max_solutions, 4);
  EXPECT_TRUE(parse_scenario(save_scenario(sc)) == sc);
}

TEST(ScenarioFormat, HeldObjectsAndTaskGoals) {
  std::string text = kMinimal;
  auto swap = [&](const std::string& from, const std::string& to) { text.replace(text.find(from), from.size(), to); };
  swap("(object c1 Cornflakes (at 0 0 0))", "(object c1 Cornflakes)");
  swap("(torso mid))", "(torso mid) (left c1))");
  swap("(explicit (c1 0 1 0))", "(task (fetch-and-place (an object (label Cornflakes)) ((on rack) (shelf 0))))");
  Scenario sc = parse_scenario(text);
  EXPECT_EQ(sc.initial.held(Arm::left), std::optional<std::string>("c1"));
  ASSERT_TRUE(sc.task.has_value());
  GoalSpec g = sc.goal_for();
  EXPECT_EQ(g.explicit_map.at("c1"), (Cell{0, 0, 0}));
  EXPECT_TRUE(parse_scenario(save_scenario(sc)) == sc);
}

TEST(ScenarioErrors, UnknownClass) {
  std::string text = kMinimal;
  text.replace(text.find("c1 Cornflakes"), 13, "c1 Granola");
  try {
    parse_scenario(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_class);
  }
}

TEST(ScenarioErrors, SyntaxErrorPosition) {
  try {
    parse_scenario("(scenario\n  (name tiny)\n  (rack (shelves 1)\n");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.column(), 1);
  }
}

class ScenarioInvalid : public ::testing::TestWithParam<std::pair<const char*, const char*>> {};

TEST_P(ScenarioInvalid, Rejected) {
  std::string text = kMinimal;
  auto [from, to] = GetParam();
  text.replace(text.find(from), std::string(from).size(), to);
  EXPECT_THROW(parse_scenario(text), Error) << text;
}

INSTANTIATE_TEST_SUITE_P(
    Samples, ScenarioInvalid,
    ::testing::Values(std::pair{"(name tiny)", "(name tiny) (name again)"},
                      std::pair{"(robot (base only) (torso mid))", "(robot (base nowhere))"},
                      std::pair{"(shelves 1)", "(shelves 0)"},
                      std::pair{"(explicit (c1 0 1 0))", "(explicit (c1 0 5 0))"},
                      std::pair{"(explicit (c1 0 1 0))", "(sideways)"},
                      std::pair{"(at 0 0 0)", "(at 0 0 0) (level 1)"},
                      std::pair{"(goal (explicit (c1 0 1 0)))", "(bogus 1)"},
                      std::pair{"(robot (base only) (torso mid))", ""},
                      std::pair{"(shape box)", "(shape box) (stackable maybe)"}));

TEST(ScenarioErrors, MissingFile) {
  try {
    load_scenario("/nonexistent/nothing.scn");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
  }
}

}  // namespace
}  // namespace rackplan
