#ifndef RACKPLAN_MODEL_HPP
#define RACKPLAN_MODEL_HPP

// Discrete world model: rack geometry, object classes, and the full planning
// state (object placements plus robot base, torso and hands).

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rackplan/error.hpp"

namespace rackplan {

/// A grid slot of the rack. Depth 0 is the front row. Cells order by shelf,
/// then column, then depth; that order is the cell enumeration order used
/// everywhere determinism matters.
struct Cell {
  int shelf = 0;
  int column = 0;
  int depth = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline std::string to_string(const Cell& c) {
  return std::to_string(c.shelf) + "/" + std::to_string(c.column) + "/" + std::to_string(c.depth);
}

/// Manhattan distance over (shelf, column); depth is ignored.
inline int lateral_distance(const Cell& a, const Cell& b) {
  return std::abs(a.shelf - b.shelf) + std::abs(a.column - b.column);
}

enum class Arm : std::uint8_t { left = 0, right = 1 };

inline constexpr std::array<Arm, 2> kArms{Arm::left, Arm::right};

inline std::string to_string(Arm arm) { return arm == Arm::left ? "left" : "right"; }

inline Arm other(Arm arm) { return arm == Arm::left ? Arm::right : Arm::left; }

/// Inclusive index range.
struct IndexWindow {
  int first = 0;
  int last = 0;

  bool contains(int i) const { return i >= first && i <= last; }
  friend bool operator==(const IndexWindow&, const IndexWindow&) = default;
};

struct BaseStation {
  std::string name;
  IndexWindow left_arm;
  IndexWindow right_arm;

  const IndexWindow& columns(Arm arm) const { return arm == Arm::left ? left_arm : right_arm; }
  friend bool operator==(const BaseStation&, const BaseStation&) = default;
};

struct TorsoLevel {
  std::string name;
  IndexWindow shelves;

  friend bool operator==(const TorsoLevel&, const TorsoLevel&) = default;
};

struct RackModel {
  std::string name = "rack";
  int shelf_count = 1;
  int column_count = 1;
  int depth_count = 1;
  std::vector<double> shelf_heights;
  /// Physical width of one column slot, in the same length unit as class footprints.
  double column_width = 0.25;
  std::vector<BaseStation> stations;
  std::vector<TorsoLevel> torso_levels;
  std::vector<Cell> buffer_cells;

  bool contains(const Cell& c) const {
    return c.shelf >= 0 && c.shelf < shelf_count && c.column >= 0 && c.column < column_count &&
           c.depth >= 0 && c.depth < depth_count;
  }

  bool reachable(const Cell& c, int station, int torso, Arm arm) const {
    if (station < 0 || station >= static_cast<int>(stations.size())) return false;
    if (torso < 0 || torso >= static_cast<int>(torso_levels.size())) return false;
    return stations[station].columns(arm).contains(c.column) &&
           torso_levels[torso].shelves.contains(c.shelf);
  }

  bool is_buffer(const Cell& c) const {
    return std::find(buffer_cells.begin(), buffer_cells.end(), c) != buffer_cells.end();
  }

  /// All cells in enumeration order.
  std::vector<Cell> cells() const {
    std::vector<Cell> out;
    out.reserve(static_cast<std::size_t>(shelf_count * column_count * depth_count));
    for (int s = 0; s < shelf_count; ++s)
      for (int c = 0; c < column_count; ++c)
        for (int d = 0; d < depth_count; ++d) out.push_back({s, c, d});
    return out;
  }

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::validation_error, "rack: " + what); };
    if (shelf_count < 1 || column_count < 1 || depth_count < 1)
      fail("shelf, column and depth counts must be >= 1");
    if (!(column_width > 0)) fail("column width must be positive");
    if (!shelf_heights.empty() && static_cast<int>(shelf_heights.size()) != shelf_count)
      fail("shelf-heights must list one height per shelf");
    if (stations.empty()) fail("at least one base station is required");
    if (torso_levels.empty()) fail("at least one torso level is required");
    for (int c = 0; c < column_count; ++c) {
      bool ok = false;
      for (const auto& st : stations)
        ok = ok || st.left_arm.contains(c) || st.right_arm.contains(c);
      if (!ok) fail("column " + std::to_string(c) + " is not reachable from any station/arm");
    }
    for (int s = 0; s < shelf_count; ++s) {
      bool ok = false;
      for (const auto& t : torso_levels) ok = ok || t.shelves.contains(s);
      if (!ok) fail("shelf " + std::to_string(s) + " is not reachable from any torso level");
    }
    for (const auto& b : buffer_cells)
      if (!contains(b)) fail("buffer cell " + to_string(b) + " is outside the rack");
  }

  friend bool operator==(const RackModel&, const RackModel&) = default;
};

struct Footprint {
  double width = 0.1;
  double depth = 0.1;
  double height = 0.1;

  friend bool operator==(const Footprint&, const Footprint&) = default;
};

struct ObjectClass {
  std::string name;
  std::string category;
  Footprint footprint;
  std::string color;
  std::string shape = "box";
  bool stackable = false;
  bool clutter = false;

  void validate() const {
    if (name.empty()) throw Error(ErrorCode::validation_error, "class with empty name");
    if (!(footprint.width > 0 && footprint.depth > 0 && footprint.height > 0))
      throw Error(ErrorCode::validation_error, "class " + name + ": footprint components must be > 0");
  }

  friend bool operator==(const ObjectClass&, const ObjectClass&) = default;
};

using ClassPtr = std::shared_ptr<const ObjectClass>;
using ClassCatalog = std::map<std::string, ClassPtr>;

/// Public view of one object resting on the rack.
struct ObjectInstance {
  std::string id;
  ClassPtr cls;
  Cell cell;
  int stack_level = 0;

  friend bool operator==(const ObjectInstance& a, const ObjectInstance& b) {
    return a.id == b.id && a.cell == b.cell && a.stack_level == b.stack_level &&
           (a.cls == b.cls || (a.cls && b.cls && *a.cls == *b.cls));
  }
};

/// Immutable set of object identities shared by every state derived from
/// the same initial state. Ids are kept sorted so that a state's slot vector
/// is canonical.
class Inventory {
 public:
  struct Record {
    std::string id;
    ClassPtr cls;
  };

  explicit Inventory(std::vector<Record> records) : records_(std::move(records)) {
    std::sort(records_.begin(), records_.end(),
              [](const Record& a, const Record& b) { return a.id < b.id; });
    for (std::size_t i = 0; i + 1 < records_.size(); ++i)
      if (records_[i].id == records_[i + 1].id)
        throw Error(ErrorCode::validation_error, "duplicate object id " + records_[i].id);
    for (const auto& r : records_)
      if (!r.cls) throw Error(ErrorCode::validation_error, "object " + r.id + " has no class");
  }

  std::size_t size() const { return records_.size(); }
  const Record& operator[](std::size_t i) const { return records_[i]; }

  std::optional<std::size_t> find(std::string_view id) const {
    auto it = std::lower_bound(records_.begin(), records_.end(), id,
                               [](const Record& r, std::string_view v) { return r.id < v; });
    if (it == records_.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - records_.begin());
  }

  bool same_ids(const Inventory& o) const {
    if (size() != o.size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
      if (records_[i].id != o.records_[i].id) return false;
    return true;
  }

 private:
  std::vector<Record> records_;
};

/// Where an object currently is. level == kHeld means it sits in a hand.
struct Slot {
  std::int8_t shelf = 0;
  std::int8_t column = 0;
  std::int8_t depth = 0;
  std::int8_t level = 0;

  static constexpr std::int8_t kHeld = -1;

  bool held() const { return level == kHeld; }
  Cell cell() const { return {shelf, column, depth}; }
  static Slot at(const Cell& c, int lvl) {
    return {static_cast<std::int8_t>(c.shelf), static_cast<std::int8_t>(c.column),
            static_cast<std::int8_t>(c.depth), static_cast<std::int8_t>(lvl)};
  }
  static Slot in_hand() { return {0, 0, 0, kHeld}; }

  friend bool operator==(const Slot&, const Slot&) = default;
};

/// Full planning state. A value type: copies are cheap (one small vector)
/// and every operation on it returns a new state.
class WorldState {
 public:
  static constexpr int kEmptyHand = -1;

  class Builder;

  WorldState() : inventory_(std::make_shared<const Inventory>(std::vector<Inventory::Record>{})) {}

  const Inventory& inventory() const { return *inventory_; }
  const std::shared_ptr<const Inventory>& inventory_ptr() const { return inventory_; }
  std::size_t size() const { return slots_.size(); }
  const std::string& id(std::size_t i) const { return (*inventory_)[i].id; }
  const ObjectClass& cls(std::size_t i) const { return *(*inventory_)[i].cls; }
  const ClassPtr& cls_ptr(std::size_t i) const { return (*inventory_)[i].cls; }
  const Slot& slot(std::size_t i) const { return slots_[i]; }
  const std::vector<Slot>& slots() const { return slots_; }
  int base() const { return base_; }
  int torso() const { return torso_; }

  /// Index of the object in the hand, or kEmptyHand.
  int hand(Arm arm) const { return hands_[static_cast<std::size_t>(arm)]; }
  std::optional<std::string> held(Arm arm) const {
    int h = hand(arm);
    if (h == kEmptyHand) return std::nullopt;
    return id(static_cast<std::size_t>(h));
  }

  std::optional<std::size_t> find(std::string_view object_id) const { return inventory_->find(object_id); }

  std::size_t index_of(std::string_view object_id) const {
    auto i = find(object_id);
    if (!i) throw Error(ErrorCode::unknown_object, std::string(object_id));
    return *i;
  }

  /// Object index at (cell, level), or -1.
  int object_at(const Cell& c, int level) const {
    Slot want = Slot::at(c, level);
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (slots_[i] == want) return static_cast<int>(i);
    return -1;
  }

  /// Number of objects stacked in the cell (the next free level).
  int height(const Cell& c) const {
    int n = 0;
    for (const auto& s : slots_)
      if (!s.held() && s.cell() == c) ++n;
    return n;
  }

  bool is_free(const Cell& c) const { return height(c) == 0; }

  /// Objects on the rack in cell order, then stack level, then id.
  std::vector<ObjectInstance> objects() const {
    std::vector<ObjectInstance> out;
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (!slots_[i].held()) out.push_back({id(i), cls_ptr(i), slots_[i].cell(), slots_[i].level});
    std::stable_sort(out.begin(), out.end(), [](const ObjectInstance& a, const ObjectInstance& b) {
      if (a.cell != b.cell) return a.cell < b.cell;
      return a.stack_level < b.stack_level;
    });
    return out;
  }

  /// Indices of objects on the rack in cell order (cell, level, id).
  std::vector<std::size_t> rack_order() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (!slots_[i].held()) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const Slot& x = slots_[a];
      const Slot& y = slots_[b];
      if (x.cell() != y.cell()) return x.cell() < y.cell();
      return x.level < y.level;
    });
    return idx;
  }

  /// Compact byte key identifying the state (slots, base, torso, hands).
  std::string key() const {
    std::string k;
    k.resize(slots_.size() * 4 + 4);
    std::size_t p = 0;
    for (const auto& s : slots_) {
      k[p++] = static_cast<char>(s.shelf);
      k[p++] = static_cast<char>(s.column);
      k[p++] = static_cast<char>(s.depth);
      k[p++] = static_cast<char>(s.level);
    }
    k[p++] = static_cast<char>(base_);
    k[p++] = static_cast<char>(torso_);
    k[p++] = static_cast<char>(hands_[0]);
    k[p++] = static_cast<char>(hands_[1]);
    return k;
  }

  friend bool operator==(const WorldState& a, const WorldState& b) {
    return a.base_ == b.base_ && a.torso_ == b.torso_ && a.slots_ == b.slots_ &&
           a.hands_ == b.hands_ &&
           (a.inventory_ == b.inventory_ || a.inventory_->same_ids(*b.inventory_));
  }

  // Mutators used by action application and the builder; they do not check
  // invariants.
  WorldState with_slot(std::size_t i, Slot s) const {
    WorldState out = *this;
    out.slots_[i] = s;
    return out;
  }
  void set_slot(std::size_t i, Slot s) { slots_[i] = s; }
  void set_hand(Arm arm, int object) { hands_[static_cast<std::size_t>(arm)] = object; }
  void set_base(int b) { base_ = b; }
  void set_torso(int t) { torso_ = t; }

  /// Checks the state invariants, optionally against a rack model.
  void validate(const RackModel* model = nullptr) const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::validation_error, "state: " + what); };
    if (model) {
      if (base_ < 0 || base_ >= static_cast<int>(model->stations.size())) fail("base station out of range");
      if (torso_ < 0 || torso_ >= static_cast<int>(model->torso_levels.size())) fail("torso level out of range");
    }
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      const Slot& s = slots_[i];
      if (s.held()) {
        int owners = 0;
        for (Arm a : kArms)
          if (hand(a) == static_cast<int>(i)) ++owners;
        if (owners != 1) fail("object " + id(i) + " is neither on the rack nor in exactly one hand");
        continue;
      }
      if (model && !model->contains(s.cell())) fail("object " + id(i) + " outside the rack at " + to_string(s.cell()));
      if (s.level < 0) fail("object " + id(i) + " has negative stack level");
      for (std::size_t j = i + 1; j < slots_.size(); ++j)
        if (slots_[j] == s) fail("objects " + id(i) + " and " + id(j) + " share a slot");
      if (s.level > 0) {
        int below = object_at(s.cell(), s.level - 1);
        if (below < 0) fail("object " + id(i) + " is stacked on nothing");
        if (!cls(static_cast<std::size_t>(below)).stackable)
          fail("object " + id(i) + " rests on non-stackable " + id(static_cast<std::size_t>(below)));
      }
    }
    for (Arm a : kArms) {
      int h = hand(a);
      if (h == kEmptyHand) continue;
      if (h < 0 || h >= static_cast<int>(slots_.size())) fail("hand references unknown object");
      if (!slots_[static_cast<std::size_t>(h)].held()) fail("hand object " + id(static_cast<std::size_t>(h)) + " is also on the rack");
    }
    if (hand(Arm::left) != kEmptyHand && hand(Arm::left) == hand(Arm::right)) fail("same object in both hands");
  }

 private:
  std::shared_ptr<const Inventory> inventory_;
  std::vector<Slot> slots_;
  int base_ = 0;
  int torso_ = 0;
  std::array<int, 2> hands_{kEmptyHand, kEmptyHand};
};

/// Assembles a WorldState from public object descriptions.
class WorldState::Builder {
 public:
  Builder& add(std::string id, ClassPtr cls, Cell cell, int stack_level = 0) {
    entries_.push_back({std::move(id), std::move(cls), Slot::at(cell, stack_level), std::nullopt});
    return *this;
  }
  Builder& add(const ObjectInstance& o) { return add(o.id, o.cls, o.cell, o.stack_level); }
  Builder& hold(Arm arm, std::string id, ClassPtr cls) {
    entries_.push_back({std::move(id), std::move(cls), Slot::in_hand(), arm});
    return *this;
  }
  Builder& base(int b) {
    base_ = b;
    return *this;
  }
  Builder& torso(int t) {
    torso_ = t;
    return *this;
  }

  /// Builds and validates. Pass a model to also check bounds.
  WorldState build(const RackModel* model = nullptr) const {
    std::vector<Inventory::Record> records;
    records.reserve(entries_.size());
    for (const auto& e : entries_) records.push_back({e.id, e.cls});
    auto inv = std::make_shared<const Inventory>(std::move(records));
    WorldState s;
    s.inventory_ = inv;
    s.slots_.assign(inv->size(), Slot{});
    s.base_ = base_;
    s.torso_ = torso_;
    for (const auto& e : entries_) {
      std::size_t i = *inv->find(e.id);
      s.slots_[i] = e.slot;
      if (e.arm) {
        if (s.hand(*e.arm) != kEmptyHand)
          throw Error(ErrorCode::validation_error, "state: two objects in the " + to_string(*e.arm) + " hand");
        s.set_hand(*e.arm, static_cast<int>(i));
      }
    }
    s.validate(model);
    return s;
  }

 private:
  struct Entry {
    std::string id;
    ClassPtr cls;
    Slot slot;
    std::optional<Arm> arm;
  };
  std::vector<Entry> entries_;
  int base_ = 0;
  int torso_ = 0;
};

/// Human-readable canonical rendering, used in logs and diagnostics.
inline std::string describe(const WorldState& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.slot(i).held()) continue;
    if (!out.empty()) out += ' ';
    out += s.id(i) + "@" + to_string(s.slot(i).cell()) + ":" + std::to_string(s.slot(i).level);
  }
  if (!out.empty()) out += ' ';
  out += "base=" + std::to_string(s.base()) + " torso=" + std::to_string(s.torso());
  for (Arm a : kArms) {
    auto h = s.held(a);
    out += " " + to_string(a) + "=" + (h ? *h : std::string("-"));
  }
  return out;
}

}  // namespace rackplan

#endif  // RACKPLAN_MODEL_HPP
