#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "rackplan/simulator.hpp"

namespace rackplan {
namespace {

using testing::Catalog;
using testing::flat_rack;
using testing::small_rack;

std::vector<std::string> ids(const WorldState& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back(s.id(i));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<const LogEntry*> of_kind(const EpisodeLog& log, EntryKind k) {
  std::vector<const LogEntry*> out;
  for (const auto& e : log.entries)
    if (e.kind == k) out.push_back(&e);
  return out;
}

class ObserveTest : public ::testing::Test {
 protected:
  Catalog k;
  RackModel m = small_rack();
  WorldState truth = WorldState::Builder()
                         .add("c1", k.cornflakes, {0, 0, 0})
                         .add("c2", k.cornflakes, {0, 0, 0}, 1)
                         .add("m1", k.muesli, {0, 1, 0})
                         .hold(Arm::right, "k1", k.coffee)
                         .base(1)
                         .build(&m);
  SeedStream rng{42};
};

TEST_F(ObserveTest, NoNoiseIsIdentity) { EXPECT_EQ(observe(truth, {}, rng), truth); }

TEST_F(ObserveTest, MergeKeepsOnlyTheTopAtLevelZero) {
  WorldState b = observe(truth, {0, 1}, rng);
  EXPECT_EQ(ids(b), (std::vector<std::string>{"c2", "k1", "m1"}));
  EXPECT_EQ(b.slot(*b.find("c2")).level, 0);
  EXPECT_EQ(b.slot(*b.find("c2")).cell(), (Cell{0, 0, 0}));
}

TEST_F(ObserveTest, OmitRemovesEveryRackObject) {
  WorldState b = observe(truth, {1, 0}, rng);
  EXPECT_EQ(ids(b), std::vector<std::string>{"k1"});
  EXPECT_EQ(b.base(), 1);
  EXPECT_EQ(b.hand(Arm::right), *b.find("k1"));
}

TEST_F(ObserveTest, SameIndexSameResult) {
  ObservationNoise noise{0.5, 0.5};
  for (std::uint64_t i = 0; i < 20; ++i) EXPECT_EQ(observe(truth, noise, rng, i), observe(truth, noise, rng, i));
}

TEST_F(ObserveTest, ObservationsStayValid) {
  std::mt19937 gen(1);
  std::vector<ClassPtr> classes{k.cornflakes, k.muesli, k.coffee, k.salt};
  for (int round = 0; round < 200; ++round) {
    WorldState t = testing::random_state(gen, m, classes, 5, true);
    WorldState b = observe(t, {0.3, 0.5}, SeedStream(round), 0);
    EXPECT_NO_THROW(b.validate(&m));
    EXPECT_LE(b.size(), t.size());
    EXPECT_EQ(b.base(), t.base());
    EXPECT_EQ(b.torso(), t.torso());
  }
}

TEST(FailurePolicyTest, Validation) {
  FailurePolicy p;
  EXPECT_NO_THROW(p.validate());
  p.p_drop = 1.5;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.frustration_limit = 0;
  EXPECT_THROW(p.validate(), Error);
  EXPECT_THROW((ObservationNoise{-0.1, 0}.validate()), Error);
}

class ExecuteTest : public ::testing::Test {
 protected:
  Catalog k;
  RackModel m = small_rack();
  CostWeights w;
  WorldState start = WorldState::Builder()
                         .add("c1", k.cornflakes, {0, 0, 0})
                         .add("m1", k.muesli, {0, 1, 0})
                         .add("k1", k.coffee, {1, 0, 0})
                         .add("c2", k.cornflakes, {1, 1, 0})
                         .build(&m);
  GoalSpec goal = GoalSpec::by_class(
      {{{0, 0, 0}, "Cornflakes"}, {{0, 1, 0}, "Cornflakes"}, {{1, 0, 0}, "Muesli"}, {{1, 1, 0}, "Coffee"}});
};

TEST_F(ExecuteTest, HappyPathFollowsTheFirstPlan) {
  SearchResult r = plan_astar(start, goal, m, w, {});
  ASSERT_TRUE(r.solved());
  EpisodeLog log = execute(start, goal, m, w, FailurePolicy{}, ObservationNoise{}, {}, "happy");
  EXPECT_TRUE(log.goal_reached);
  EXPECT_EQ(log.status, EpisodeStatus::completed);
  EXPECT_EQ(log.replan_count, 0);
  EXPECT_EQ(log.total_failures, 0);
  std::vector<std::string> executed;
  for (const auto* e : of_kind(log, EntryKind::act)) executed.push_back(e->action);
  std::vector<std::string> planned;
  for (const auto& a : r.plans[0].actions) planned.push_back(to_string(a));
  EXPECT_EQ(executed, planned);
  ASSERT_EQ(of_kind(log, EntryKind::plan).size(), 1u);
  EXPECT_EQ(of_kind(log, EntryKind::plan)[0]->trigger, kTriggerInitial);
  EXPECT_NEAR(*of_kind(log, EntryKind::plan)[0]->cost, r.plans[0].cost, 1e-12);
}

TEST_F(ExecuteTest, SummaryMatchesTheFirstPlan) {
  EpisodeLog log = execute(start, goal, m, w, FailurePolicy{}, ObservationNoise{}, {}, "happy");
  MetricsRow row = summarize(log);
  EXPECT_EQ(row.name, "happy");
  EXPECT_EQ(row.picks, 3);
  EXPECT_EQ(row.places, 3);
  ActionCounts c{};
  c[static_cast<std::size_t>(ActionType::pick)] = row.picks;
  c[static_cast<std::size_t>(ActionType::place)] = row.places;
  c[static_cast<std::size_t>(ActionType::handover)] = row.handovers;
  c[static_cast<std::size_t>(ActionType::move_torso)] = row.move_torso;
  c[static_cast<std::size_t>(ActionType::move_base)] = row.move_base;
  EXPECT_DOUBLE_EQ(row.cost, weighted_cost(c, w));
  EXPECT_DOUBLE_EQ(row.cost, *of_kind(log, EntryKind::plan)[0]->cost);
  EXPECT_TRUE(row.goal_reached);
  EXPECT_EQ(row.replans, 0);
  EXPECT_GE(row.plan_time, 0);
}

TEST_F(ExecuteTest, EmptyPlanSummarizesToZero) {
  GoalSpec here = explicit_goal_from(start);
  EpisodeLog log = execute(start, here, m, w, FailurePolicy{}, ObservationNoise{}, {});
  EXPECT_TRUE(log.goal_reached);
  EXPECT_TRUE(of_kind(log, EntryKind::act).empty());
  MetricsRow row = summarize(log);
  EXPECT_EQ(row.picks + row.places + row.move_torso + row.move_base + row.handovers, 0);
  EXPECT_EQ(row.cost, 0);
}

// Seed 7 draws two grasp failures and then a success for the first pick.
TEST(ExecuteFailures, TwoGraspFailuresThenSuccess) {
  Catalog k;
  RackModel m = flat_rack(3);
  WorldState start = WorldState::Builder().add("c1", k.cornflakes, {0, 0, 0}).build(&m);
  GoalSpec goal = GoalSpec::by_instance({{"c1", {0, 2, 0}}});
  FailurePolicy p;
  p.p_grasp_fail = 0.5;
  p.retry_limit = 3;
  p.seed = 7;
  EpisodeLog log = execute(start, goal, m, CostWeights{}, p, {}, {});
  auto acts = of_kind(log, EntryKind::act);
  ASSERT_EQ(acts.size(), 4u);
  EXPECT_EQ(acts[0]->outcome, "grasp-failure");
  EXPECT_EQ(acts[0]->retry, 0);
  EXPECT_EQ(acts[1]->outcome, "grasp-failure");
  EXPECT_EQ(acts[1]->retry, 1);
  EXPECT_EQ(acts[2]->outcome, "success");
  EXPECT_EQ(acts[2]->retry, 2);
  EXPECT_EQ(acts[3]->action, "place(c1,left,0/2/0,0)");
  EXPECT_EQ(log.total_failures, 2);
  EXPECT_EQ(log.replan_count, 0);
  EXPECT_TRUE(log.goal_reached);
}

TEST(ExecuteFailures, ExhaustedRetriesReplan) {
  Catalog k;
  RackModel m = flat_rack(3);
  WorldState start = WorldState::Builder().add("c1", k.cornflakes, {0, 0, 0}).build(&m);
  GoalSpec goal = GoalSpec::by_instance({{"c1", {0, 2, 0}}});
  FailurePolicy p;
  p.p_grasp_fail = 1;
  p.retry_limit = 1;
  p.replan_budget = 2;
  EpisodeLog log = execute(start, goal, m, CostWeights{}, p, {}, {});
  EXPECT_EQ(log.status, EpisodeStatus::replan_budget_exhausted);
  EXPECT_FALSE(log.goal_reached);
  EXPECT_EQ(log.replan_count, 2);
  EXPECT_EQ(log.total_failures, 6);
  for (const auto* e : log.replans()) EXPECT_EQ(e->trigger, kTriggerFrustration);
  EXPECT_EQ(ids(log.final_state), ids(start));
}

// A cornflakes box hides under another; the first pick reveals it.
TEST(ExecuteHidden, RevealedObjectCausesOneReplan) {
  Catalog k;
  RackModel m = flat_rack(4);
  WorldState truth = WorldState::Builder()
                         .add("c1", k.cornflakes, {0, 0, 0})
                         .add("c2", k.cornflakes, {0, 0, 0}, 1)
                         .build(&m);
  GoalSpec goal;
  goal.kind = GoalKind::relational;
  goal.region = {{0, 1, 3}};
  EpisodeLog log = execute(truth, goal, m, CostWeights{}, FailurePolicy{}, ObservationNoise{0, 1}, {});
  EXPECT_EQ(log.replan_count, 1);
  ASSERT_EQ(log.replans().size(), 1u);
  EXPECT_EQ(log.replans()[0]->trigger, kTriggerMismatch);
  EXPECT_TRUE(log.goal_reached);
  EXPECT_EQ(log.entries[0].observation.find("c1"), std::string::npos);
  EXPECT_EQ(ids(log.final_state), ids(truth));
}

TEST(ExecuteErrors, NoSolutionIsReported) {
  Catalog k;
  RackModel m = flat_rack(2);
  WorldState start = WorldState::Builder().add("c1", k.cornflakes, {0, 0, 0}).build(&m);
  GoalSpec goal = GoalSpec::by_class({{{0, 1, 0}, "Muesli"}});
  EpisodeLog log = execute(start, goal, m, CostWeights{}, {}, {}, {});
  EXPECT_EQ(log.status, EpisodeStatus::no_solution);
  EXPECT_FALSE(log.goal_reached);
}

struct RandomEpisode {
  RackModel model;
  WorldState start;
  GoalSpec goal;
  FailurePolicy policy;
  ObservationNoise noise;
};

RandomEpisode random_episode(std::mt19937& rng) {
  Catalog k;
  RandomEpisode ep{small_rack(), {}, {}, {}, {}};
  ep.start = testing::random_state(rng, ep.model, {k.cornflakes, k.muesli, k.coffee}, 3);
  ep.goal = testing::random_generic_goal(rng, ep.model, ep.start);
  std::uniform_real_distribution<double> p(0, 0.3);
  ep.policy.p_grasp_fail = p(rng);
  ep.policy.p_drop = p(rng) / 2;
  ep.policy.p_trajectory_fail = p(rng) / 2;
  ep.policy.retry_limit = static_cast<int>(rng() % 3) + 1;
  ep.policy.seed = rng();
  if (rng() % 2) ep.noise = {0, 0.5};
  return ep;
}

TEST(ExecuteProperty, SameSeedSameLog) {
  std::mt19937 rng(21);
  for (int round = 0; round < 15; ++round) {
    RandomEpisode ep = random_episode(rng);
    EpisodeLog a = execute(ep.start, ep.goal, ep.model, CostWeights{}, ep.policy, ep.noise, {}, "d");
    EpisodeLog b = execute(ep.start, ep.goal, ep.model, CostWeights{}, ep.policy, ep.noise, {}, "d");
    EXPECT_EQ(serialize(a, false), serialize(b, false));
  }
}

TEST(ExecuteProperty, ObjectsAreConservedAndReplansHaveCauses) {
  std::mt19937 rng(22);
  int reached = 0;
  for (int round = 0; round < 30; ++round) {
    RandomEpisode ep = random_episode(rng);
    EpisodeLog log = execute(ep.start, ep.goal, ep.model, CostWeights{}, ep.policy, ep.noise, {});
    EXPECT_EQ(ids(log.final_state), ids(ep.start));
    EXPECT_NO_THROW(log.final_state.validate(&ep.model));
    reached += log.goal_reached;
    // Walk the log: each replan needs a failed act or a mismatch since the
    // previous plan.
    bool failure = false;
    bool mismatch = false;
    bool first = true;
    for (const auto& e : log.entries) {
      if (e.kind == EntryKind::act && e.outcome != "success") failure = true;
      if (e.kind == EntryKind::observe && e.outcome == "mismatch") mismatch = true;
      if (e.kind != EntryKind::plan) continue;
      if (first) {
        EXPECT_EQ(e.trigger, kTriggerInitial);
      } else if (e.trigger == kTriggerFrustration) {
        EXPECT_TRUE(failure);
      } else {
        EXPECT_EQ(e.trigger, kTriggerMismatch);
        EXPECT_TRUE(mismatch);
      }
      first = false;
      failure = mismatch = false;
    }
    EXPECT_EQ(static_cast<int>(log.replans().size()), log.replan_count);
  }
  EXPECT_GT(reached, 15);
}

TEST(ExecuteProperty, NoFailuresNoNoiseReachesTheGoal) {
  std::mt19937 rng(23);
  for (int round = 0; round < 20; ++round) {
    RandomEpisode ep = random_episode(rng);
    if (!plan_astar(ep.start, ep.goal, ep.model, CostWeights{}, {}).solved()) continue;
    FailurePolicy calm;
    calm.seed = ep.policy.seed;
    EpisodeLog log = execute(ep.start, ep.goal, ep.model, CostWeights{}, calm, {}, {});
    EXPECT_TRUE(log.goal_reached) << describe(ep.start);
    EXPECT_EQ(log.replan_count, 0);
  }
}

TEST(ExecuteProperty, HigherFrustrationLimitNeverAddsReplans) {
  std::mt19937 rng(24);
  for (int round = 0; round < 15; ++round) {
    RandomEpisode ep = random_episode(rng);
    ep.policy.retry_limit = 10;
    ep.noise = {};
    int previous = std::numeric_limits<int>::max();
    for (int limit : {1, 2, 4, 8}) {
      ep.policy.frustration_limit = limit;
      EpisodeLog log = execute(ep.start, ep.goal, ep.model, CostWeights{}, ep.policy, ep.noise, {});
      EXPECT_LE(log.replan_count, previous) << "limit " << limit;
      previous = log.replan_count;
    }
  }
}

TEST(EpisodeLogFormat, RoundTrip) {
  std::mt19937 rng(25);
  for (int round = 0; round < 10; ++round) {
    RandomEpisode ep = random_episode(rng);
    EpisodeLog log = execute(ep.start, ep.goal, ep.model, CostWeights{}, ep.policy, ep.noise, {}, "rt");
    std::string text = serialize(log);
    EpisodeLog back = parse_episode(text);
    EXPECT_EQ(serialize(back), text);
    EXPECT_EQ(back.entries, log.entries);
    EXPECT_EQ(back.goal_reached, log.goal_reached);
    EXPECT_EQ(back.replan_count, log.replan_count);
    EXPECT_EQ(back.final_state_text, describe(log.final_state));
    EXPECT_EQ(summarize(back).cost, summarize(log).cost);
  }
}

TEST(EpisodeLogFormat, FieldOrder) {
  Catalog k;
  RackModel m = flat_rack(2);
  WorldState start = WorldState::Builder().add("c1", k.cornflakes, {0, 0, 0}).build(&m);
  EpisodeLog log = execute(start, GoalSpec::by_instance({{"c1", {0, 1, 0}}}), m, CostWeights{}, {}, {}, {}, "tiny");
  std::string text = serialize(log, false);
  EXPECT_EQ(text,
            "#rackplan-episode v1\n"
            "#scenario\ttiny\n"
            "#seed\t0\n"
            "#weights\t1.2 1.2 2 1 1.5\n"
            "#anomalies\tnone\n"
            "0\tobserve\t-\tfull\t0\t" + describe(start) + "\t-\t-\t-\t-\n"
            "1\tplan\tpick(c1,left,0/0/0,0);place(c1,left,0/1/0,0)\tok\t0\t-\tinitial\t2.4\t-\t-\n"
            "2\tact\tpick(c1,left,0/0/0,0)\tsuccess\t0\t0/0/0=[]\t-\t-\t-\t-\n"
            "3\tact\tplace(c1,left,0/1/0,0)\tsuccess\t0\t0/1/0=[c1]\t-\t-\t-\t-\n"
            "#final_state\t" + describe(log.final_state) + "\n"
            "#goal_reached\ttrue\n"
            "#replan_count\t0\n"
            "#total_failures\t0\n"
            "#status\tcompleted\n");
}

TEST(EpisodeLogFormat, RejectsGarbage) {
  EXPECT_THROW(parse_episode("hello\n"), Error);
  EXPECT_THROW(parse_episode("#rackplan-episode v1\n0\tact\tx\n"), Error);
  EXPECT_THROW(parse_episode("#rackplan-episode v1\n#status\tconfused\n"), Error);
  EXPECT_THROW(parse_episode("#rackplan-episode v1\n1\tact\t-\t-\t0\t-\t-\t-\t-\t-\n"), Error);
}

}  // namespace
}  // namespace rackplan
