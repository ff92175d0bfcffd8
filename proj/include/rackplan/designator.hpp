#ifndef RACKPLAN_DESIGNATOR_HPP
#define RACKPLAN_DESIGNATOR_HPP

// Underspecified object, location and task descriptions, e.g.
//
//   (fetch-and-place
//     (an object (type box) (label "Cornflakes") (color yellow))
//     (a location (on rack-1) (near (an object (category "Cereals")))))
//
// A bare property list such as ((on rack) (shelf 2)) reads as an anonymous
// location description.

#include <algorithm>
#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rackplan/error.hpp"
#include "rackplan/sexpr.hpp"

namespace rackplan {

enum class DesignatorKind { object, location, task };

inline constexpr std::array<std::string_view, 9> kDesignatorKeys{
    "type", "label", "color", "category", "on", "shelf", "near", "left-of", "right-of"};

inline constexpr int kMaxDesignatorDepth = 4;

struct Designator;

struct Symbol {
  std::string name;
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

struct Number {
  double value = 0;
  friend bool operator==(const Number&, const Number&) = default;
};

using DesignatorPtr = std::shared_ptr<const Designator>;

struct PropertyValue {
  std::variant<Symbol, std::string, Number, DesignatorPtr> value;

  bool is_designator() const { return std::holds_alternative<DesignatorPtr>(value); }
  const Designator& designator() const { return *std::get<DesignatorPtr>(value); }

  /// Symbol name or string contents; numbers render in their printed form.
  std::string text() const;

  friend bool operator==(const PropertyValue& a, const PropertyValue& b);
};

struct Property {
  std::string key;
  PropertyValue value;

  friend bool operator==(const Property& a, const Property& b) {
    return a.key == b.key && a.value == b.value;
  }
};

struct Designator {
  DesignatorKind kind = DesignatorKind::object;
  /// "an"/"a" for objects and locations, empty for a bare location list, the
  /// verb (e.g. "fetch-and-place") for tasks.
  std::string determiner = "an";
  std::vector<Property> properties;  // objects and locations
  std::vector<Designator> arguments;  // tasks

  /// First value for key, or nullptr.
  const PropertyValue* find(std::string_view key) const {
    for (const auto& p : properties)
      if (p.key == key) return &p.value;
    return nullptr;
  }

  int depth() const {
    int d = 0;
    for (const auto& p : properties)
      if (p.value.is_designator()) d = std::max(d, p.value.designator().depth());
    for (const auto& a : arguments) d = std::max(d, a.depth());
    return d + 1;
  }

  friend bool operator==(const Designator& a, const Designator& b) {
    return a.kind == b.kind && a.determiner == b.determiner && a.properties == b.properties &&
           a.arguments == b.arguments;
  }
};

inline bool operator==(const PropertyValue& a, const PropertyValue& b) {
  if (a.value.index() != b.value.index()) return false;
  if (a.is_designator()) return a.designator() == b.designator();
  return a.value == b.value;
}

inline std::string PropertyValue::text() const {
  if (auto s = std::get_if<Symbol>(&value)) return s->name;
  if (auto s = std::get_if<std::string>(&value)) return *s;
  if (auto n = std::get_if<Number>(&value)) return detail::format_number(n->value);
  return {};
}

inline Designator object_designator(std::vector<Property> props, std::string determiner = "an") {
  return {DesignatorKind::object, std::move(determiner), std::move(props), {}};
}

inline Designator location_designator(std::vector<Property> props, std::string determiner = "a") {
  return {DesignatorKind::location, std::move(determiner), std::move(props), {}};
}

inline Property prop(std::string key, Symbol v) { return {std::move(key), {std::move(v)}}; }
inline Property prop(std::string key, std::string v) { return {std::move(key), {std::move(v)}}; }
inline Property prop(std::string key, double v) { return {std::move(key), {Number{v}}}; }
inline Property prop(std::string key, Designator d) {
  return {std::move(key), {std::make_shared<const Designator>(std::move(d))}};
}

namespace detail {

inline bool known_key(std::string_view k) {
  return std::find(kDesignatorKeys.begin(), kDesignatorKeys.end(), k) != kDesignatorKeys.end();
}

[[noreturn]] inline void structure_error(const SExpr& at, std::vector<std::string> expected,
                                         const std::string& what) {
  throw SyntaxError(at.line, at.column, std::move(expected), what);
}

inline Designator designator_from(const SExpr& e, int depth);

inline Property property_from(const SExpr& e, int depth) {
  if (!e.is_list() || e.items.size() != 2 || !e.items[0].is_symbol())
    structure_error(e, {"(key value)"}, "malformed property");
  const std::string& key = e.items[0].text;
  if (!known_key(key))
    throw Error(ErrorCode::unknown_key, std::to_string(e.line) + ":" + std::to_string(e.column) +
                                            ": unknown designator key '" + key + "'");
  const SExpr& v = e.items[1];
  switch (v.kind) {
    case SExpr::Kind::symbol: return {key, {Symbol{v.text}}};
    case SExpr::Kind::string: return {key, {v.text}};
    case SExpr::Kind::number: return {key, {Number{v.number}}};
    case SExpr::Kind::list: {
      Designator inner = designator_from(v, depth + 1);
      if (inner.kind == DesignatorKind::task) structure_error(v, {"object", "location"}, "task nested in property");
      return {key, {std::make_shared<const Designator>(std::move(inner))}};
    }
  }
  structure_error(e, {"value"}, "malformed property value");
}

inline Designator designator_from(const SExpr& e, int depth) {
  if (depth > kMaxDesignatorDepth) structure_error(e, {}, "designator nesting deeper than 4");
  if (!e.is_list()) structure_error(e, {"("}, "designator must be a list");
  const SExpr& head = e.items.front();
  Designator d;
  if (head.is_list()) {
    d.kind = DesignatorKind::location;
    d.determiner.clear();
    for (const auto& item : e.items) d.properties.push_back(property_from(item, depth));
    return d;
  }
  if (!head.is_symbol()) structure_error(head, {"symbol", "("}, "designator head must be a symbol");
  if (head.text == "a" || head.text == "an") {
    if (e.items.size() < 2 || !(e.items[1].is_symbol("object") || e.items[1].is_symbol("location")))
      structure_error(e.items.size() < 2 ? e : e.items[1], {"object", "location"}, "missing designator kind");
    d.kind = e.items[1].text == "object" ? DesignatorKind::object : DesignatorKind::location;
    d.determiner = head.text;
    if (e.items.size() < 3) structure_error(e, {"(key value)"}, "designator has no properties");
    for (std::size_t i = 2; i < e.items.size(); ++i) d.properties.push_back(property_from(e.items[i], depth));
    return d;
  }
  d.kind = DesignatorKind::task;
  d.determiner = head.text;
  if (e.items.size() < 2) structure_error(e, {"("}, "task has no arguments");
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    if (!e.items[i].is_list()) structure_error(e.items[i], {"("}, "task argument must be a designator");
    d.arguments.push_back(designator_from(e.items[i], depth + 1));
  }
  return d;
}

}  // namespace detail

/// Converts an already-read expression into a designator.
inline Designator designator_from_sexpr(const SExpr& e) { return detail::designator_from(e, 1); }

inline Designator parse_designator(std::string_view text) { return designator_from_sexpr(read_sexpr(text)); }

inline SExpr to_sexpr(const Designator& d) {
  std::vector<SExpr> items;
  if (d.kind == DesignatorKind::task) {
    items.push_back(SExpr::symbol(d.determiner));
    for (const auto& a : d.arguments) items.push_back(to_sexpr(a));
    return SExpr::list(std::move(items));
  }
  if (!d.determiner.empty()) {
    items.push_back(SExpr::symbol(d.determiner));
    items.push_back(SExpr::symbol(d.kind == DesignatorKind::object ? "object" : "location"));
  }
  for (const auto& p : d.properties) {
    SExpr v;
    if (auto s = std::get_if<Symbol>(&p.value.value))
      v = SExpr::symbol(s->name);
    else if (auto str = std::get_if<std::string>(&p.value.value))
      v = SExpr::string(*str);
    else if (auto n = std::get_if<Number>(&p.value.value))
      v = SExpr::num(n->value);
    else
      v = to_sexpr(p.value.designator());
    items.push_back(SExpr::list({SExpr::symbol(p.key), std::move(v)}));
  }
  return SExpr::list(std::move(items));
}

inline std::string print_designator(const Designator& d, bool pretty = false) {
  SExpr e = to_sexpr(d);
  return pretty ? print_pretty(e) : print_compact(e);
}

}  // namespace rackplan

#endif  // RACKPLAN_DESIGNATOR_HPP
