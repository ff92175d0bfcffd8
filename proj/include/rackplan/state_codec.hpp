#ifndef RACKPLAN_STATE_CODEC_HPP
#define RACKPLAN_STATE_CODEC_HPP

// Compact state encodings for the search. A key holds the placement of every
// object plus base, torso and hands; the inventory is shared and implicit.
// PackedCodec fits small problems into 128 bits, ByteCodec handles the rest.
// Both apply actions directly to keys and must agree with apply_action.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rackplan/action.hpp"
#include "rackplan/goal.hpp"
#include "rackplan/model.hpp"

namespace rackplan::detail {

/// Decoded placement of one object: cell index (-1 when held) and level.
struct CodedSlot {
  int cell;
  int level;
  bool held() const { return cell < 0; }
};

inline int cell_index(const RackModel& m, int shelf, int column, int depth) {
  return (shelf * m.column_count + column) * m.depth_count + depth;
}

inline Cell cell_at(const RackModel& m, int index) {
  int depth = index % m.depth_count;
  int rest = index / m.depth_count;
  return {rest / m.column_count, rest % m.column_count, depth};
}

/// Up to 10 objects on up to 127 cells with at most 16 stations and torso
/// levels: 11 bits per object (7 cell, 4 level), then 4 bits each for base,
/// torso and the two hands.
class PackedCodec {
 public:
  struct Key {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct Hash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = (k.lo ^ (k.hi * 0x9E3779B97F4A7C15ULL)) * 0xBF58476D1CE4E5B9ULL;
      return static_cast<std::size_t>(h ^ (h >> 31));
    }
  };

  static bool fits(const WorldState& s, const RackModel& m) {
    return s.size() <= 10 && m.shelf_count * m.column_count * m.depth_count <= 127 && m.stations.size() <= 16 &&
           m.torso_levels.size() <= 16;
  }

  PackedCodec(const WorldState& proto, const RackModel& m) : proto_(proto), model_(&m) {}

  Key encode(const WorldState& s) const {
    Bits b = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Slot& sl = s.slot(i);
      Bits code = sl.held() ? kHeld : static_cast<Bits>(cell_index(*model_, sl.shelf, sl.column, sl.depth) << 4 | sl.level);
      b |= code << (11 * i);
    }
    b |= static_cast<Bits>(s.base()) << kBase;
    b |= static_cast<Bits>(s.torso()) << kTorso;
    b |= static_cast<Bits>(s.hand(Arm::left) + 1) << kLeft;
    b |= static_cast<Bits>(s.hand(Arm::right) + 1) << kRight;
    return split(b);
  }

  WorldState decode(const Key& k) const {
    WorldState s = proto_;
    for (std::size_t i = 0; i < s.size(); ++i) {
      CodedSlot c = slot(k, i);
      s.set_slot(i, c.held() ? Slot::in_hand() : Slot::at(cell_at(*model_, c.cell), c.level));
    }
    s.set_base(base(k));
    s.set_torso(torso(k));
    for (Arm a : kArms) s.set_hand(a, hand(k, a));
    return s;
  }

  CodedSlot slot(const Key& k, std::size_t i) const {
    auto code = static_cast<unsigned>((join(k) >> (11 * i)) & 0x7FF);
    if (code == kHeld) return {-1, 0};
    return {static_cast<int>(code >> 4), static_cast<int>(code & 15)};
  }
  int base(const Key& k) const { return field(k, kBase); }
  int torso(const Key& k) const { return field(k, kTorso); }
  int hand(const Key& k, Arm a) const { return field(k, a == Arm::left ? kLeft : kRight) - 1; }

  /// Key after applying an action that legal_actions produced for `object`.
  Key after(const Key& k, const Action& a, std::size_t object) const {
    Bits b = join(k);
    switch (a.type) {
      case ActionType::pick:
        b = with(b, 11 * object, 11, kHeld);
        b = with(b, a.arm == Arm::left ? kLeft : kRight, 4, object + 1);
        break;
      case ActionType::place:
        b = with(b, 11 * object, 11,
                 static_cast<Bits>(cell_index(*model_, a.cell.shelf, a.cell.column, a.cell.depth) << 4 | a.level));
        b = with(b, a.arm == Arm::left ? kLeft : kRight, 4, 0);
        break;
      case ActionType::handover: {
        unsigned from = a.arm == Arm::left ? kLeft : kRight;
        unsigned to = a.arm == Arm::left ? kRight : kLeft;
        Bits held = (b >> from) & 15;
        b = with(with(b, from, 4, 0), to, 4, held);
        break;
      }
      case ActionType::move_torso: b = with(b, kTorso, 4, static_cast<Bits>(a.target)); break;
      case ActionType::move_base: b = with(b, kBase, 4, static_cast<Bits>(a.target)); break;
    }
    return split(b);
  }

 private:
  using Bits = unsigned __int128;
  static constexpr Bits kHeld = 0x7FF;
  static constexpr unsigned kBase = 110;
  static constexpr unsigned kTorso = 114;
  static constexpr unsigned kLeft = 118;
  static constexpr unsigned kRight = 122;

  static Bits join(const Key& k) { return static_cast<Bits>(k.hi) << 64 | k.lo; }
  static Key split(Bits b) { return {static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(b >> 64)}; }
  static Bits with(Bits b, unsigned at, unsigned width, Bits value) {
    Bits mask = ((static_cast<Bits>(1) << width) - 1) << at;
    return (b & ~mask) | (value << at);
  }
  static int field(const Key& k, unsigned at) { return static_cast<int>((join(k) >> at) & 15); }

  WorldState proto_;
  const RackModel* model_;
};

/// Any problem size: two bytes per object (cell index, level; 0xFF marks a
/// held object) followed by base, torso and hands.
class ByteCodec {
 public:
  using Key = std::string;
  using Hash = std::hash<std::string>;

  ByteCodec(const WorldState& proto, const RackModel& m) : proto_(proto), model_(&m), n_(proto.size()) {}

  Key encode(const WorldState& s) const {
    Key k(2 * n_ + 4, '\0');
    for (std::size_t i = 0; i < n_; ++i) {
      const Slot& sl = s.slot(i);
      if (sl.held()) {
        put(k, 2 * i, 0xFF);
        put(k, 2 * i + 1, 0xFF);
      } else {
        put(k, 2 * i, cell_index(*model_, sl.shelf, sl.column, sl.depth));
        put(k, 2 * i + 1, sl.level);
      }
    }
    put(k, 2 * n_, s.base());
    put(k, 2 * n_ + 1, s.torso());
    put(k, 2 * n_ + 2, s.hand(Arm::left) + 1);
    put(k, 2 * n_ + 3, s.hand(Arm::right) + 1);
    return k;
  }

  WorldState decode(const Key& k) const {
    WorldState s = proto_;
    for (std::size_t i = 0; i < n_; ++i) {
      CodedSlot c = slot(k, i);
      s.set_slot(i, c.held() ? Slot::in_hand() : Slot::at(cell_at(*model_, c.cell), c.level));
    }
    s.set_base(base(k));
    s.set_torso(torso(k));
    for (Arm a : kArms) s.set_hand(a, hand(k, a));
    return s;
  }

  CodedSlot slot(const Key& k, std::size_t i) const {
    int c = get(k, 2 * i);
    if (c == 0xFF) return {-1, 0};
    return {c, get(k, 2 * i + 1)};
  }
  int base(const Key& k) const { return get(k, 2 * n_); }
  int torso(const Key& k) const { return get(k, 2 * n_ + 1); }
  int hand(const Key& k, Arm a) const { return get(k, 2 * n_ + (a == Arm::left ? 2 : 3)) - 1; }

  Key after(const Key& k, const Action& a, std::size_t object) const {
    Key out = k;
    const std::size_t arm = 2 * n_ + (a.arm == Arm::left ? 2 : 3);
    switch (a.type) {
      case ActionType::pick:
        put(out, 2 * object, 0xFF);
        put(out, 2 * object + 1, 0xFF);
        put(out, arm, static_cast<int>(object) + 1);
        break;
      case ActionType::place:
        put(out, 2 * object, cell_index(*model_, a.cell.shelf, a.cell.column, a.cell.depth));
        put(out, 2 * object + 1, a.level);
        put(out, arm, 0);
        break;
      case ActionType::handover: {
        const std::size_t to = 2 * n_ + (a.arm == Arm::left ? 3 : 2);
        put(out, to, get(k, arm));
        put(out, arm, 0);
        break;
      }
      case ActionType::move_torso: put(out, 2 * n_ + 1, a.target); break;
      case ActionType::move_base: put(out, 2 * n_, a.target); break;
    }
    return out;
  }

  static bool fits(const WorldState& s, const RackModel& m) {
    return s.size() < 0xFE && m.shelf_count * m.column_count * m.depth_count < 0xFF && m.stations.size() < 0xFF &&
           m.torso_levels.size() < 0xFF;
  }

 private:
  static void put(Key& k, std::size_t at, int v) { k[at] = static_cast<char>(static_cast<unsigned char>(v)); }
  static int get(const Key& k, std::size_t at) { return static_cast<unsigned char>(k[at]); }

  WorldState proto_;
  const RackModel* model_;
  std::size_t n_;
};

/// Goal test and misplaced count evaluated on keys. Must agree with
/// goal_satisfied and misplaced_count on every state.
class GoalTables {
 public:
  GoalTables(const WorldState& start, const GoalSpec& goal, const RackModel& m)
      : n_(start.size()), explicit_(goal.kind == GoalKind::by_instance), robot_(goal.robot_goal) {
    target_.assign(n_, -1);
    clutter_.assign(n_, false);
    class_of_.assign(n_, -1);
    const int cells = m.shelf_count * m.column_count * m.depth_count;
    cell_class_.assign(static_cast<std::size_t>(cells), -1);
    std::vector<std::string> names;
    auto class_id = [&](const std::string& name) {
      for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == name) return static_cast<int>(j);
      names.push_back(name);
      return static_cast<int>(names.size() - 1);
    };
    if (explicit_) {
      for (const auto& [id, cell] : goal.explicit_map) {
        auto i = start.find(id);
        if (!i) continue;  // rejected earlier as infeasible
        target_[*i] = cell_index(m, cell.shelf, cell.column, cell.depth);
      }
      return;
    }
    for (const auto& [cell, name] : goal.class_layout) {
      int c = cell_index(m, cell.shelf, cell.column, cell.depth);
      cell_class_[static_cast<std::size_t>(c)] = class_id(name);
      goal_cells_.push_back(c);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      clutter_[i] = start.cls(i).clutter;
      class_of_[i] = class_id(start.cls(i).name);
    }
  }

  template <class Codec>
  int misplaced(const Codec& codec, const typename Codec::Key& k) const {
    int n = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      CodedSlot c = codec.slot(k, i);
      if (explicit_) {
        if (target_[i] >= 0 ? (c.held() || c.cell != target_[i] || c.level != 0) : c.held()) ++n;
        continue;
      }
      if (c.held()) {
        ++n;
        continue;
      }
      int want = cell_class_[static_cast<std::size_t>(c.cell)];
      if (clutter_[i] ? want >= 0 : (want != class_of_[i] || c.level != 0)) ++n;
    }
    return n;
  }

  template <class Codec>
  bool satisfied(const Codec& codec, const typename Codec::Key& k) const {
    if (codec.hand(k, Arm::left) >= 0 || codec.hand(k, Arm::right) >= 0) return false;
    if (robot_ && ((robot_->base && *robot_->base != codec.base(k)) || (robot_->torso && *robot_->torso != codec.torso(k))))
      return false;
    if (explicit_) {
      for (std::size_t i = 0; i < n_; ++i) {
        if (target_[i] < 0) continue;
        CodedSlot c = codec.slot(k, i);
        if (c.cell != target_[i] || c.level != 0) return false;
      }
      return true;
    }
    for (int cell : goal_cells_) {
      int count = 0;
      bool ok = false;
      for (std::size_t i = 0; i < n_; ++i) {
        CodedSlot c = codec.slot(k, i);
        if (c.cell != cell) continue;
        ++count;
        ok = c.level == 0 && class_of_[i] == cell_class_[static_cast<std::size_t>(cell)];
      }
      if (count != 1 || !ok) return false;
    }
    return true;
  }

 private:
  std::size_t n_;
  bool explicit_;
  std::optional<RobotGoal> robot_;
  std::vector<int> target_;
  std::vector<bool> clutter_;
  std::vector<int> class_of_;
  std::vector<int> cell_class_;
  std::vector<int> goal_cells_;
};

}  // namespace rackplan::detail

#endif  // RACKPLAN_STATE_CODEC_HPP
