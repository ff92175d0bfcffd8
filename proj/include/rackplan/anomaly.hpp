#ifndef RACKPLAN_ANOMALY_HPP
#define RACKPLAN_ANOMALY_HPP

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rackplan/action.hpp"
#include "rackplan/goal.hpp"
#include "rackplan/model.hpp"

namespace rackplan {

enum class AnomalyTag { obstruction, multiple_obstructions, stacking_same, stacking_different, irregular_object, none };

inline std::string to_string(AnomalyTag t) {
  switch (t) {
    case AnomalyTag::obstruction: return "obstruction";
    case AnomalyTag::multiple_obstructions: return "multiple-obstructions";
    case AnomalyTag::stacking_same: return "stacking-same";
    case AnomalyTag::stacking_different: return "stacking-different";
    case AnomalyTag::irregular_object: return "irregular-object";
    case AnomalyTag::none: return "none";
  }
  return "?";
}

inline std::optional<AnomalyTag> anomaly_from(std::string_view s) {
  for (auto t : {AnomalyTag::obstruction, AnomalyTag::multiple_obstructions, AnomalyTag::stacking_same,
                 AnomalyTag::stacking_different, AnomalyTag::irregular_object, AnomalyTag::none})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

/// Table-style label, e.g. "Stacking (same)".
inline std::string label(AnomalyTag t) {
  switch (t) {
    case AnomalyTag::obstruction: return "obstruction";
    case AnomalyTag::multiple_obstructions: return "multiple obstructions";
    case AnomalyTag::stacking_same: return "stacking (same)";
    case AnomalyTag::stacking_different: return "stacking (different)";
    case AnomalyTag::irregular_object: return "irregular object";
    case AnomalyTag::none: return "-";
  }
  return "?";
}

struct Anomaly {
  AnomalyTag tag = AnomalyTag::none;
  std::vector<std::string> subjects;

  friend bool operator==(const Anomaly&, const Anomaly&) = default;
};

/// Scene difficulties in a fixed order: stacks (one entry per stack),
/// obstruction of goal-relevant objects by objects in front of them (one
/// entry, "multiple" when more than one object is blocked), then one
/// irregular-object entry per clutter object. Objects merely stacked on a
/// goal object are reported as stacking, not obstruction.
inline std::vector<Anomaly> detect_anomalies(const WorldState& s, const GoalSpec& goal, const RackModel& /*model*/) {
  std::vector<Anomaly> out;

  std::map<Cell, std::vector<std::size_t>> stacks;
  for (std::size_t i : s.rack_order()) stacks[s.slot(i).cell()].push_back(i);
  for (const auto& [cell, members] : stacks) {
    if (members.size() < 2) continue;
    bool same = true;
    for (std::size_t i : members) same = same && s.cls(i).name == s.cls(members.front()).name;
    Anomaly a{same ? AnomalyTag::stacking_same : AnomalyTag::stacking_different, {}};
    for (std::size_t i : members) a.subjects.push_back(s.id(i));
    out.push_back(std::move(a));
  }

  std::optional<GoalContext> ctx;
  if (goal.resolved()) ctx.emplace(s, goal);
  std::vector<std::string> blocked;
  for (std::size_t i : s.rack_order()) {
    bool relevant = ctx ? ctx->relevant(i) : !s.cls(i).clutter;
    if (!relevant) continue;
    if (!detail::front_clear(s, s.slot(i).cell())) blocked.push_back(s.id(i));
  }
  if (blocked.size() == 1) out.push_back({AnomalyTag::obstruction, blocked});
  if (blocked.size() > 1) out.push_back({AnomalyTag::multiple_obstructions, blocked});

  for (std::size_t i : s.rack_order())
    if (s.cls(i).clutter) out.push_back({AnomalyTag::irregular_object, {s.id(i)}});
  for (Arm a : kArms)
    if (s.hand(a) != WorldState::kEmptyHand && s.cls(static_cast<std::size_t>(s.hand(a))).clutter)
      out.push_back({AnomalyTag::irregular_object, {*s.held(a)}});

  if (out.empty()) out.push_back({AnomalyTag::none, {}});
  return out;
}

/// Distinct tags in report order.
inline std::vector<AnomalyTag> anomaly_tags(const std::vector<Anomaly>& anomalies) {
  std::vector<AnomalyTag> tags;
  for (const auto& a : anomalies)
    if (std::find(tags.begin(), tags.end(), a.tag) == tags.end()) tags.push_back(a.tag);
  return tags;
}

/// "Stacking (different), obstruction" style rendering; "-" when clean.
inline std::string render_anomalies(const std::vector<AnomalyTag>& tags) {
  std::string out;
  for (AnomalyTag t : tags) {
    if (t == AnomalyTag::none) continue;
    if (!out.empty()) out += ", ";
    out += label(t);
  }
  if (out.empty()) return "-";
  out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

}  // namespace rackplan

#endif  // RACKPLAN_ANOMALY_HPP
