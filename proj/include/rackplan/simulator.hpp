#ifndef RACKPLAN_SIMULATOR_HPP
#define RACKPLAN_SIMULATOR_HPP

// Seeded execution of plans against a ground-truth world that the planner
// only sees through noisy observations. Local failures are retried; when
// they pile up past the frustration limit, or an observation contradicts
// the predicted belief, the remaining plan is dropped and a new one is
// planned from a fresh observation.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rackplan/action.hpp"
#include "rackplan/anomaly.hpp"
#include "rackplan/goal.hpp"
#include "rackplan/model.hpp"
#include "rackplan/planner.hpp"
#include "rackplan/random.hpp"
#include "rackplan/resolve.hpp"
#include "rackplan/sexpr.hpp"

namespace rackplan {

struct FailurePolicy {
  double p_grasp_fail = 0;
  double p_drop = 0;
  double p_trajectory_fail = 0;
  int retry_limit = 2;
  int frustration_limit = 3;
  std::uint64_t seed = 0;
  int replan_budget = 10;

  void validate() const {
    for (double p : {p_grasp_fail, p_drop, p_trajectory_fail})
      if (!(p >= 0 && p <= 1)) throw Error(ErrorCode::validation_error, "policy probabilities must lie in [0, 1]");
    if (retry_limit < 0) throw Error(ErrorCode::validation_error, "retry limit must be >= 0");
    if (frustration_limit < 1) throw Error(ErrorCode::validation_error, "frustration limit must be >= 1");
    if (replan_budget < 0) throw Error(ErrorCode::validation_error, "replan budget must be >= 0");
  }

  friend bool operator==(const FailurePolicy&, const FailurePolicy&) = default;
};

struct ObservationNoise {
  double p_omit = 0;
  double p_merge = 0;

  void validate() const {
    for (double p : {p_omit, p_merge})
      if (!(p >= 0 && p <= 1)) throw Error(ErrorCode::validation_error, "noise probabilities must lie in [0, 1]");
  }

  friend bool operator==(const ObservationNoise&, const ObservationNoise&) = default;
};

enum class Outcome { success, grasp_failure, drop, trajectory_failure };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::success: return "success";
    case Outcome::grasp_failure: return "grasp-failure";
    case Outcome::drop: return "drop";
    case Outcome::trajectory_failure: return "trajectory-failure";
  }
  return "?";
}

enum class EntryKind { observe, plan, act };

inline std::string to_string(EntryKind k) {
  switch (k) {
    case EntryKind::observe: return "observe";
    case EntryKind::plan: return "plan";
    case EntryKind::act: return "act";
  }
  return "?";
}

/// Replan triggers. `initial` marks the first plan of an episode.
inline constexpr std::string_view kTriggerInitial = "initial";
inline constexpr std::string_view kTriggerFrustration = "frustration-exceeded";
inline constexpr std::string_view kTriggerMismatch = "belief-mismatch";

/// One log record. Field use by kind:
///   act:     action, outcome (Outcome), retry index, observation of the touched cells
///   plan:    action = plan signature, outcome = "ok" | "no-solution", trigger, cost, plan_time
///   observe: outcome = "full" | "mismatch", observation snapshot
struct LogEntry {
  EntryKind kind = EntryKind::act;
  std::string action;
  std::string outcome;
  int retry = 0;
  std::string observation;
  std::string trigger;
  std::optional<double> cost;
  double plan_time = 0;  // seconds
  double timestamp = 0;  // seconds since episode start

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

enum class EpisodeStatus { completed, replan_budget_exhausted, no_solution, goal_error };

inline std::string to_string(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::completed: return "completed";
    case EpisodeStatus::replan_budget_exhausted: return "replan-budget-exhausted";
    case EpisodeStatus::no_solution: return "no-solution";
    case EpisodeStatus::goal_error: return "goal-error";
  }
  return "?";
}

struct EpisodeLog {
  std::string scenario;
  std::uint64_t seed = 0;
  CostWeights weights;
  std::vector<AnomalyTag> anomalies;
  std::vector<LogEntry> entries;
  WorldState final_state;
  /// Rendering of final_state; the only form available for parsed logs.
  std::string final_state_text;
  bool goal_reached = false;
  int replan_count = 0;
  int total_failures = 0;
  EpisodeStatus status = EpisodeStatus::completed;
  std::string diagnostic;

  /// Replan events: plan entries after the first.
  std::vector<const LogEntry*> replans() const {
    std::vector<const LogEntry*> out;
    for (const auto& e : entries)
      if (e.kind == EntryKind::plan && e.trigger != kTriggerInitial) out.push_back(&e);
    return out;
  }
};

namespace detail {

struct Seen {
  std::size_t index;  // into truth
  Cell cell;
  int level;
};

/// Noisy perception of the rack objects in `cells` (all cells when empty).
/// Stacks collapse to their top object with p_merge; objects vanish with
/// p_omit; surviving objects are re-levelled from the shelf up.
inline std::vector<Seen> perceive(const WorldState& truth, const ObservationNoise& noise, const SeedStream& rng,
                                  std::uint64_t index, std::span<const Cell> cells) {
  std::map<Cell, std::vector<std::size_t>> stacks;
  for (std::size_t i : truth.rack_order()) {
    Cell c = truth.slot(i).cell();
    if (!cells.empty() && std::find(cells.begin(), cells.end(), c) == cells.end()) continue;
    stacks[c].push_back(i);
  }
  std::vector<Seen> out;
  for (auto& [cell, members] : stacks) {
    std::uint64_t cell_code = static_cast<std::uint64_t>((cell.shelf * 1024 + cell.column) * 1024 + cell.depth);
    if (members.size() > 1 && rng.uniform(SeedStream::Purpose::observe_merge, index, cell_code) < noise.p_merge)
      members = {members.back()};
    int level = 0;
    for (std::size_t i : members) {
      if (noise.p_omit > 0 &&
          rng.uniform(SeedStream::Purpose::observe_omit, index, SeedStream::hash(truth.id(i))) < noise.p_omit)
        continue;
      out.push_back({i, cell, level++});
    }
  }
  return out;
}

inline std::string render_cells(const WorldState& s, std::span<const Cell> cells) {
  std::string out;
  for (const Cell& c : cells) {
    if (!out.empty()) out += ' ';
    out += to_string(c) + "=[";
    for (int l = 0, h = s.height(c); l < h; ++l) {
      if (l) out += ',';
      int o = s.object_at(c, l);
      out += o >= 0 ? s.id(static_cast<std::size_t>(o)) : std::string("?");
    }
    out += ']';
  }
  return out;
}

inline bool same_cells(const WorldState& a, const WorldState& b, std::span<const Cell> cells) {
  return render_cells(a, cells) == render_cells(b, cells);
}

}  // namespace detail

/// Belief formed from a noisy look at the whole rack. The robot's base,
/// torso and hand contents are always observed exactly.
inline WorldState observe(const WorldState& truth, const ObservationNoise& noise, const SeedStream& rng,
                          std::uint64_t index = 0) {
  WorldState::Builder b;
  b.base(truth.base()).torso(truth.torso());
  for (const auto& seen : detail::perceive(truth, noise, rng, index, {}))
    b.add(truth.id(seen.index), truth.cls_ptr(seen.index), seen.cell, seen.level);
  for (Arm a : kArms)
    if (int h = truth.hand(a); h != WorldState::kEmptyHand)
      b.hold(a, truth.id(static_cast<std::size_t>(h)), truth.cls_ptr(static_cast<std::size_t>(h)));
  return b.build();
}

/// Noisy look restricted to a few cells, returned as the state those cells
/// would show; everything outside `cells` is absent.
inline WorldState observe_cells(const WorldState& truth, std::span<const Cell> cells, const ObservationNoise& noise,
                                const SeedStream& rng, std::uint64_t index) {
  WorldState::Builder b;
  b.base(truth.base()).torso(truth.torso());
  if (!cells.empty())
    for (const auto& seen : detail::perceive(truth, noise, rng, index, cells))
      b.add(truth.id(seen.index), truth.cls_ptr(seen.index), seen.cell, seen.level);
  return b.build();
}

namespace detail {

inline Outcome sample_outcome(ActionType type, double u, const FailurePolicy& p) {
  switch (type) {
    case ActionType::pick:
      if (u < p.p_grasp_fail) return Outcome::grasp_failure;
      if (u < p.p_grasp_fail + p.p_drop) return Outcome::drop;
      if (u < p.p_grasp_fail + p.p_drop + p.p_trajectory_fail) return Outcome::trajectory_failure;
      return Outcome::success;
    case ActionType::place:
    case ActionType::handover:
      return u < p.p_trajectory_fail ? Outcome::trajectory_failure : Outcome::success;
    case ActionType::move_torso:
    case ActionType::move_base: return Outcome::success;
  }
  return Outcome::success;
}

/// The planned action re-targeted at the true world: a pick grasps the
/// named object wherever it truly rests in the planned cell.
inline Action ground_action(const Action& a, const WorldState& truth) {
  if (a.type != ActionType::pick) return a;
  auto i = truth.find(a.object);
  if (!i || truth.slot(*i).held() || truth.slot(*i).cell() != a.cell) return a;
  Action g = a;
  g.level = truth.slot(*i).level;
  return g;
}

inline std::vector<Cell> touched_cells(const Action& a) {
  if (a.type == ActionType::pick || a.type == ActionType::place) return {a.cell};
  return {};
}

}  // namespace detail

/// Runs one episode. The goal may be relational; it is then resolved against
/// each new belief, and against the true state for the final verdict.
/// Random draws for an action attempt are keyed by (completed action count,
/// failed attempts at that step), so outcomes do not depend on the plan
/// boundaries chosen by replanning.
inline EpisodeLog execute(const WorldState& start_truth, const GoalSpec& goal, const RackModel& model,
                          const CostWeights& weights, const FailurePolicy& policy, const ObservationNoise& noise,
                          SearchLimits limits, std::string scenario_name = {}) {
  start_truth.validate(&model);
  weights.validate();
  policy.validate();
  noise.validate();
  limits.max_solutions = 1;

  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto now = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  const SeedStream rng(policy.seed);
  EpisodeLog log;
  log.scenario = std::move(scenario_name);
  log.seed = policy.seed;
  log.weights = weights;

  WorldState truth = start_truth;
  std::uint64_t observations = 0;
  WorldState belief = observe(truth, noise, rng, observations++);
  log.entries.push_back({EntryKind::observe, "-", "full", 0, describe(belief), "-", std::nullopt, 0, now()});

  try {
    log.anomalies = anomaly_tags(detect_anomalies(belief, resolve_goal(goal, belief, model), model));
  } catch (const Error&) {
    log.anomalies = anomaly_tags(detect_anomalies(belief, goal, model));
  }

  std::uint64_t step = 0;        // successfully executed actions
  std::uint64_t attempts = 0;    // failed attempts at the current step
  std::string trigger(kTriggerInitial);

  auto finish = [&](EpisodeStatus status, std::string diagnostic) {
    log.status = status;
    log.diagnostic = std::move(diagnostic);
    log.final_state = truth;
    log.final_state_text = describe(truth);
    try {
      log.goal_reached = goal_satisfied(truth, resolve_goal(goal, truth, model));
    } catch (const Error&) {
      log.goal_reached = false;
    }
    return log;
  };

  for (;;) {
    GoalSpec belief_goal;
    try {
      belief_goal = resolve_goal(goal, belief, model);
    } catch (const Error& e) {
      log.entries.push_back({EntryKind::plan, "-", "no-solution", 0, "-", trigger, std::nullopt, 0, now()});
      return finish(EpisodeStatus::goal_error, e.what());
    }
    SearchResult result = plan_astar(belief, belief_goal, model, weights, limits);
    if (!result.solved()) {
      log.entries.push_back({EntryKind::plan, "-", "no-solution", 0, "-", trigger, std::nullopt, 0, now()});
      return finish(EpisodeStatus::no_solution, result.diagnostic);
    }
    const Plan& plan = result.plans.front();
    log.entries.push_back({EntryKind::plan, plan.actions.empty() ? "-" : plan.signature(), "ok", 0, "-", trigger,
                           plan.cost, plan.plan_time, now()});

    int frustration = 0;
    std::optional<std::string> abandon;
    for (const Action& action : plan.actions) {
      for (int retry = 0;; ++retry) {
        double u = rng.uniform(SeedStream::Purpose::action, step, attempts);
        Outcome outcome = detail::sample_outcome(action.type, u, policy);
        std::optional<WorldState> next;
        bool infeasible = false;
        if (outcome == Outcome::success) {
          try {
            next = apply_action(truth, detail::ground_action(action, truth), model);
          } catch (const Error&) {
            outcome = Outcome::trajectory_failure;
            infeasible = true;
          }
        }
        const std::vector<Cell> cells = detail::touched_cells(action);

        if (outcome == Outcome::success) {
          truth = std::move(*next);
          belief = apply_action(belief, action, model);
          ++step;
          attempts = 0;
          std::string seen = "-";
          bool mismatch = false;
          if (!cells.empty()) {
            WorldState look = observe_cells(truth, cells, noise, rng, observations++);
            seen = detail::render_cells(look, cells);
            mismatch = !detail::same_cells(look, belief, cells);
          }
          log.entries.push_back({EntryKind::act, to_string(action), to_string(outcome), retry, seen, "-",
                                 std::nullopt, 0, now()});
          if (mismatch) {
            log.entries.push_back({EntryKind::observe, "-", "mismatch", 0,
                                   "expected " + detail::render_cells(belief, cells), "-", std::nullopt, 0, now()});
            abandon = std::string(kTriggerMismatch);
          }
          break;
        }

        ++log.total_failures;
        ++frustration;
        ++attempts;
        std::string seen = "-";
        bool mismatch = false;
        if (infeasible && !cells.empty()) {
          WorldState look = observe_cells(truth, cells, noise, rng, observations++);
          seen = detail::render_cells(look, cells);
          mismatch = !detail::same_cells(look, belief, cells);
        }
        log.entries.push_back({EntryKind::act, to_string(action), to_string(outcome), retry, seen, "-",
                               std::nullopt, 0, now()});
        if (mismatch) {
          log.entries.push_back({EntryKind::observe, "-", "mismatch", 0,
                                 "expected " + detail::render_cells(belief, cells), "-", std::nullopt, 0, now()});
          abandon = std::string(kTriggerMismatch);
          break;
        }
        // Exhausting an action's retries invalidates the plan just like
        // crossing the frustration limit.
        if (frustration > policy.frustration_limit || retry >= policy.retry_limit) {
          abandon = std::string(kTriggerFrustration);
          break;
        }
      }
      if (abandon) break;
    }

    if (!abandon) {
      WorldState look = observe(truth, noise, rng, observations++);
      if (look == belief) return finish(EpisodeStatus::completed, {});
      log.entries.push_back({EntryKind::observe, "-", "mismatch", 0, describe(look), "-", std::nullopt, 0, now()});
      abandon = std::string(kTriggerMismatch);
      belief = std::move(look);
    } else {
      belief = observe(truth, noise, rng, observations++);
      log.entries.push_back({EntryKind::observe, "-", "full", 0, describe(belief), "-", std::nullopt, 0, now()});
    }
    if (log.replan_count >= policy.replan_budget)
      return finish(EpisodeStatus::replan_budget_exhausted, "replan budget of " + std::to_string(policy.replan_budget) + " exhausted");
    ++log.replan_count;
    trigger = *abandon;
  }
}

struct MetricsRow {
  std::string name;
  double plan_time = 0;
  int picks = 0;
  int places = 0;
  int move_torso = 0;
  int move_base = 0;
  int handovers = 0;
  double cost = 0;
  int replans = 0;
  bool goal_reached = false;
  std::vector<AnomalyTag> anomalies;
};

/// Table row for an episode: action counts, cost and planning time of the
/// first plan, plus replans, verdict and initial anomalies.
inline MetricsRow summarize(const EpisodeLog& log) {
  MetricsRow row;
  row.name = log.scenario;
  row.replans = log.replan_count;
  row.goal_reached = log.goal_reached;
  row.anomalies = log.anomalies;
  for (const auto& e : log.entries) {
    if (e.kind != EntryKind::plan || e.outcome != "ok") continue;
    std::vector<Action> actions;
    if (e.action != "-") {
      std::size_t start = 0;
      for (std::size_t i = 0; i <= e.action.size(); ++i)
        if (i == e.action.size() || e.action[i] == ';') {
          actions.push_back(parse_action(std::string_view(e.action).substr(start, i - start)));
          start = i + 1;
        }
    }
    ActionCounts c = count_actions(actions);
    row.picks = c[static_cast<std::size_t>(ActionType::pick)];
    row.places = c[static_cast<std::size_t>(ActionType::place)];
    row.handovers = c[static_cast<std::size_t>(ActionType::handover)];
    row.move_torso = c[static_cast<std::size_t>(ActionType::move_torso)];
    row.move_base = c[static_cast<std::size_t>(ActionType::move_base)];
    row.cost = weighted_cost(c, log.weights);
    row.plan_time = e.plan_time;
    break;
  }
  return row;
}

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

inline double parse_double(const std::string& s, const char* what) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error(ErrorCode::validation_error, std::string("episode log: bad ") + what + " '" + s + "'");
  return v;
}

inline long long parse_int(const std::string& s, const char* what) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error(ErrorCode::validation_error, std::string("episode log: bad ") + what + " '" + s + "'");
  return v;
}

}  // namespace detail

inline constexpr std::string_view kEpisodeMagic = "#rackplan-episode v1";

/// Line-delimited record file. Header lines start with '#'; each entry is
/// one tab-separated line: seq, kind, action, outcome, retry, observation,
/// trigger, cost, plan_time, timestamp. With `include_timing` false the two
/// timing columns read "-" so logs from equal seeds compare byte for byte.
inline std::string serialize(const EpisodeLog& log, bool include_timing = true) {
  auto num = [](double v) { return detail::format_number(v); };
  auto timing = [&](double v) { return include_timing ? num(v) : std::string("-"); };
  std::string out(kEpisodeMagic);
  out += "\n#scenario\t" + (log.scenario.empty() ? std::string("-") : log.scenario);
  out += "\n#seed\t" + std::to_string(log.seed);
  const CostWeights& w = log.weights;
  out += "\n#weights\t" + num(w.pick) + ' ' + num(w.place) + ' ' + num(w.move_torso) + ' ' + num(w.move_base) +
         ' ' + num(w.handover);
  out += "\n#anomalies\t";
  for (std::size_t i = 0; i < log.anomalies.size(); ++i) out += (i ? "," : "") + to_string(log.anomalies[i]);
  if (log.anomalies.empty()) out += '-';
  out += '\n';
  for (std::size_t i = 0; i < log.entries.size(); ++i) {
    const LogEntry& e = log.entries[i];
    out += std::to_string(i) + '\t' + to_string(e.kind) + '\t' + e.action + '\t' + e.outcome + '\t' +
           std::to_string(e.retry) + '\t' + e.observation + '\t' + e.trigger + '\t' +
           (e.cost ? num(*e.cost) : std::string("-")) + '\t' +
           (e.kind == EntryKind::plan ? timing(e.plan_time) : std::string("-")) + '\t' + timing(e.timestamp) + '\n';
  }
  out += "#final_state\t" + (log.final_state_text.empty() ? describe(log.final_state) : log.final_state_text);
  out += "\n#goal_reached\t" + std::string(log.goal_reached ? "true" : "false");
  out += "\n#replan_count\t" + std::to_string(log.replan_count);
  out += "\n#total_failures\t" + std::to_string(log.total_failures);
  out += "\n#status\t" + to_string(log.status);
  if (!log.diagnostic.empty()) out += "\n#diagnostic\t" + log.diagnostic;
  out += '\n';
  return out;
}

/// Inverse of serialize. The final state comes back as text only.
inline EpisodeLog parse_episode(std::string_view text) {
  EpisodeLog log;
  auto lines = detail::split(text, '\n');
  if (lines.empty() || lines.front() != kEpisodeMagic)
    throw Error(ErrorCode::validation_error, "episode log: missing header line");
  auto fail = [](std::size_t line, const std::string& why) {
    throw Error(ErrorCode::validation_error, "episode log line " + std::to_string(line + 1) + ": " + why);
  };
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    if (line.empty()) continue;
    auto f = detail::split(line, '\t');
    if (line[0] == '#') {
      if (f.size() != 2) fail(n, "header needs one value");
      const std::string& key = f[0];
      const std::string& v = f[1];
      if (key == "#scenario") log.scenario = v == "-" ? "" : v;
      else if (key == "#seed") log.seed = static_cast<std::uint64_t>(std::stoull(v));
      else if (key == "#weights") {
        auto w = detail::split(v, ' ');
        if (w.size() != 5) fail(n, "expected five weights");
        log.weights = {detail::parse_double(w[0], "weight"), detail::parse_double(w[1], "weight"),
                       detail::parse_double(w[2], "weight"), detail::parse_double(w[3], "weight"),
                       detail::parse_double(w[4], "weight")};
      } else if (key == "#anomalies") {
        if (v != "-")
          for (const auto& t : detail::split(v, ',')) {
            auto tag = anomaly_from(t);
            if (!tag) fail(n, "unknown anomaly tag '" + t + "'");
            log.anomalies.push_back(*tag);
          }
      } else if (key == "#final_state") log.final_state_text = v;
      else if (key == "#goal_reached") log.goal_reached = v == "true";
      else if (key == "#replan_count") log.replan_count = static_cast<int>(detail::parse_int(v, "replan count"));
      else if (key == "#total_failures") log.total_failures = static_cast<int>(detail::parse_int(v, "failure count"));
      else if (key == "#status") {
        bool found = false;
        for (auto s : {EpisodeStatus::completed, EpisodeStatus::replan_budget_exhausted, EpisodeStatus::no_solution,
                       EpisodeStatus::goal_error})
          if (to_string(s) == v) log.status = s, found = true;
        if (!found) fail(n, "unknown status '" + v + "'");
      } else if (key == "#diagnostic") log.diagnostic = v;
      else fail(n, "unknown header '" + key + "'");
      continue;
    }
    if (f.size() != 10) fail(n, "expected 10 fields, got " + std::to_string(f.size()));
    if (detail::parse_int(f[0], "sequence number") != static_cast<long long>(log.entries.size()))
      fail(n, "entries out of order");
    LogEntry e;
    if (f[1] == "observe") e.kind = EntryKind::observe;
    else if (f[1] == "plan") e.kind = EntryKind::plan;
    else if (f[1] == "act") e.kind = EntryKind::act;
    else fail(n, "unknown entry kind '" + f[1] + "'");
    e.action = f[2];
    e.outcome = f[3];
    e.retry = static_cast<int>(detail::parse_int(f[4], "retry"));
    e.observation = f[5];
    e.trigger = f[6];
    if (f[7] != "-") e.cost = detail::parse_double(f[7], "cost");
    if (f[8] != "-") e.plan_time = detail::parse_double(f[8], "plan time");
    if (f[9] != "-") e.timestamp = detail::parse_double(f[9], "timestamp");
    log.entries.push_back(std::move(e));
  }
  return log;
}

}  // namespace rackplan

#endif  // RACKPLAN_SIMULATOR_HPP
