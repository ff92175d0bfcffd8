// rackplan: plan, simulate and report on shelf rearrangement scenarios.
//
// Exit status: 0 success, 1 no solution or goal not reached, 2 bad input.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rackplan/rackplan.hpp"

namespace {

using namespace rackplan;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string display_name(const Scenario& sc, const std::string& path) {
  return sc.name.empty() ? std::filesystem::path(path).stem().string() : sc.name;
}

int cmd_plan(const std::string& path, int k) {
  Scenario sc = load_scenario(path);
  GoalSpec goal = sc.goal_for();
  SearchLimits limits = sc.limits;
  limits.max_solutions = k;
  std::cout << "scenario " << display_name(sc, path) << "\n";
  std::cout << "anomalies " << render_anomalies(anomaly_tags(detect_anomalies(sc.initial, goal, sc.model))) << "\n";
  SearchResult r = plan_astar(sc.initial, goal, sc.model, sc.weights, limits);
  std::cout << "status " << to_string(r.status) << " expansions " << r.expansions << "\n";
  if (!r.diagnostic.empty()) std::cout << "diagnostic " << r.diagnostic << "\n";
  for (std::size_t i = 0; i < r.plans.size(); ++i) {
    const Plan& p = r.plans[i];
    std::cout << "plan " << i + 1 << " cost " << detail::fixed(p.cost, 1);
    if (goal.robot_goal) std::cout << " robot-delta " << p.robot_delta;
    std::cout << " actions " << p.actions.size() << " time " << detail::fixed(p.plan_time, 3) << "s\n";
    for (const Action& a : p.actions) std::cout << "  " << to_string(a) << "\n";
  }
  return r.solved() ? kOk : kFailed;
}

int cmd_simulate(const std::string& path, std::optional<std::uint64_t> seed, int runs, const std::string& log_dir,
                 ReportFormat format, bool timing) {
  Scenario sc = load_scenario(path);
  std::uint64_t base_seed = sc.policy.seed;
  if (const char* env = std::getenv("RACKPLAN_SEED"); env && *env) {
    try {
      base_seed = std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::validation_error, std::string("RACKPLAN_SEED is not an integer: ") + env);
    }
  }
  if (seed) base_seed = *seed;
  if (!log_dir.empty()) std::filesystem::create_directories(log_dir);

  // A task goal is grounded once against the true initial state; relational
  // goals are re-resolved by the simulator on every belief.
  GoalSpec goal = sc.task ? sc.goal_for() : sc.goal;
  std::string name = display_name(sc, path);
  std::vector<MetricsRow> rows;
  bool all_reached = true;
  for (int i = 0; i < runs; ++i) {
    FailurePolicy policy = sc.policy;
    policy.seed = base_seed + static_cast<std::uint64_t>(i);
    std::string run_name = runs > 1 ? name + "#" + std::to_string(i) : name;
    EpisodeLog log = execute(sc.initial, goal, sc.model, sc.weights, policy, sc.noise, sc.limits, run_name);
    all_reached = all_reached && log.goal_reached;
    rows.push_back(summarize(log));
    if (!log_dir.empty()) {
      std::string file = (std::filesystem::path(log_dir) / (name + "-seed" + std::to_string(policy.seed) + ".episode")).string();
      std::ofstream out(file, std::ios::binary);
      if (!out) throw Error(ErrorCode::io_error, "cannot write " + file);
      out << serialize(log, timing);
    }
    if (log.status != EpisodeStatus::completed)
      std::cerr << run_name << ": " << to_string(log.status) << (log.diagnostic.empty() ? "" : ": " + log.diagnostic)
                << "\n";
  }
  if (!timing)
    for (auto& r : rows) r.plan_time = 0;
  std::cout << render_report(rows, format);
  return all_reached ? kOk : kFailed;
}

int cmd_resolve(const std::string& path, const std::string& designator_file) {
  Scenario sc = load_scenario(path);
  std::vector<SExpr> exprs = read_sexprs(read_file(designator_file));
  if (exprs.empty()) throw Error(ErrorCode::validation_error, designator_file + " holds no designator");
  int status = kOk;
  for (const SExpr& e : exprs) {
    Designator d = designator_from_sexpr(e);
    std::cout << print_designator(d) << "\n";
    try {
      switch (d.kind) {
        case DesignatorKind::object: {
          ObjectResolution r = resolve_object(d, sc.initial, &sc.model);
          std::cout << "  referent " << r.referent() << "\n  candidates";
          for (const auto& c : r.candidates) std::cout << " " << c;
          std::cout << "\n";
          break;
        }
        case DesignatorKind::location: {
          LocationResolution r = resolve_location(d, sc.initial, sc.model);
          std::cout << "  referent " << to_string(r.referent()) << "\n  candidates";
          for (const auto& c : r.candidates) std::cout << " " << to_string(c);
          std::cout << "\n";
          break;
        }
        case DesignatorKind::task: {
          GoalSpec g = resolve_task(d, sc.initial, sc.model);
          for (const auto& [id, cell] : g.explicit_map) std::cout << "  goal " << id << " -> " << to_string(cell) << "\n";
          break;
        }
      }
    } catch (const Error& err) {
      if (err.code() != ErrorCode::no_match && err.code() != ErrorCode::unresolvable_inner_object) throw;
      std::cout << "  " << err.what() << "\n";
      status = kFailed;
    }
  }
  return status;
}

int cmd_report(const std::vector<std::string>& files, ReportFormat format) {
  std::vector<MetricsRow> rows;
  bool all_reached = true;
  for (const auto& f : files) {
    EpisodeLog log = parse_episode(read_file(f));
    all_reached = all_reached && log.goal_reached;
    rows.push_back(summarize(log));
  }
  std::cout << render_report(rows, format);
  return all_reached ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-based shelf rearrangement planner"};
  app.require_subcommand(1);

  std::string scenario;
  int k = 1;
  auto* plan = app.add_subcommand("plan", "Plan a scenario and print the k best action sequences");
  plan->add_option("scenario", scenario, "Scenario file")->required();
  plan->add_option("--k", k, "Number of plans")->check(CLI::PositiveNumber);

  int k_enum = 5;
  auto* enumerate = app.add_subcommand("enumerate", "Same as plan, with --k defaulting to 5");
  enumerate->add_option("scenario", scenario, "Scenario file")->required();
  enumerate->add_option("--k", k_enum, "Number of plans")->check(CLI::PositiveNumber);

  std::optional<std::uint64_t> seed;
  int runs = 1;
  std::string log_dir;
  std::string format_name = "table";
  bool no_timing = false;
  auto* simulate = app.add_subcommand("simulate", "Execute episodes with failure injection and print a report");
  simulate->add_option("scenario", scenario, "Scenario file")->required();
  simulate->add_option("--seed", seed, "Seed of the first run (overrides RACKPLAN_SEED and the scenario)");
  simulate->add_option("--runs", runs, "Number of episodes; run i uses seed + i")->check(CLI::PositiveNumber);
  simulate->add_option("--log-dir", log_dir, "Write one episode log per run into this directory");
  simulate->add_option("--format", format_name, "Report format")->check(CLI::IsMember({"table", "delimited"}));
  simulate->add_flag("--no-timing", no_timing, "Omit wall-clock fields from logs and report");

  std::string designator_file;
  auto* resolve = app.add_subcommand("resolve", "Resolve designators against a scenario's initial state");
  resolve->add_option("scenario", scenario, "Scenario file")->required();
  resolve->add_option("--designator", designator_file, "File with one or more designators")->required();

  std::vector<std::string> episode_files;
  auto* report = app.add_subcommand("report", "Summarize episode logs as a table");
  report->add_option("files", episode_files, "Episode log files")->required();
  report->add_option("--format", format_name, "Report format")->check(CLI::IsMember({"table", "delimited"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }
  ReportFormat format = format_name == "delimited" ? ReportFormat::delimited : ReportFormat::table;

  try {
    if (*plan) return cmd_plan(scenario, k);
    if (*enumerate) return cmd_plan(scenario, k_enum);
    if (*simulate) return cmd_simulate(scenario, seed, runs, log_dir, format, !no_timing);
    if (*resolve) return cmd_resolve(scenario, designator_file);
    if (*report) return cmd_report(episode_files, format);
  } catch (const Error& e) {
    std::cerr << "rackplan: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::region_too_small:
      case ErrorCode::unsatisfiable_relations:
      case ErrorCode::no_match: return kFailed;
      default: return kBadInput;
    }
  } catch (const std::exception& e) {
    std::cerr << "rackplan: " << e.what() << "\n";
    return kBadInput;
  }
  return kOk;
}
