#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ausk {

// Tree-shaped datum: the elements of the computable sets used to interpret
// sketch nodes. Values are immutable and share their nodes, so copies are
// cheap. Ordered by a fixed structural order (constructor rank, then label,
// then child count, then children); the child-count rule makes shorter lists
// precede longer ones, which is what makes sorted duplicate-free lists the
// least members of their quotient classes.
class Value {
 public:
  enum class Tag : uint8_t { Atom, Unit, Pair, InjL, InjR, List, Tagged, ClassRep };

  Value();

  static Value atom(std::string name);
  static Value unit();
  static Value pair(Value a, Value b);
  static Value inj_l(Value v);
  static Value inj_r(Value v);
  static Value list(std::vector<Value> items);
  static Value tagged(std::string label, Value v);
  static Value class_rep(Value least_member);

  Tag tag() const;
  const std::string& label() const;
  const std::vector<Value>& kids() const;
  const Value& kid(size_t i) const;
  size_t arity() const;
  bool is(Tag t) const { return tag() == t; }

  // Graded size: atoms and units weigh 1, pairs/lists add their parts,
  // wrappers are free. Depth-bounded enumeration realizes values of
  // weight <= d.
  int weight() const;

  std::string text() const;  // canonical concrete syntax

  bool operator==(const Value& o) const;
  bool operator!=(const Value& o) const { return !(*this == o); }
  std::strong_ordering operator<=>(const Value& o) const;

 private:
  struct Rep;
  static const std::shared_ptr<const Rep>& unit_rep();
  explicit Value(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

}  // namespace ausk
