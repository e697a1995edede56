#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ausk/value.hpp"

namespace ausk {

// A computable set. Finite objects carry their elements exactly; enumerable
// objects carry the realized fragment of weight <= depth, plus a descriptor
// recording which construction produced them. `closed` means the realized
// fragment is provably the whole object (always true for finite objects;
// true for quotients whose class representatives sit strictly inside the
// realization bound).
struct SetObject {
  bool finite = true;
  bool closed = true;
  int depth = 0;                // realization depth used when not finite
  std::vector<Value> elems;     // sorted, duplicate-free
  std::string desc;             // construction provenance, canonical

  bool contains(const Value& v) const;
  size_t size() const { return elems.size(); }
  std::string text() const;     // canonical serialization

  bool operator==(const SetObject& o) const;
};

// A total map between computable sets, tabulated over the realized domain.
// `rule`, when present, extends the table to values beyond the realization
// (used by list recursors).
struct SetMorphism {
  SetObject dom, cod;
  std::vector<std::pair<Value, Value>> table;  // sorted by key, total on dom.elems
  std::string desc;
  std::function<std::optional<Value>(const Value&)> rule;

  Value apply(const Value& v) const;           // throws on lookup failure
  std::optional<Value> try_apply(const Value& v) const;
  std::string text() const;

  bool same_graph(const SetMorphism& o) const;
};

SetObject finite_set(std::vector<Value> elems, std::string desc = "finite");
SetObject terminal_object();
SetObject initial_object();

// Canonical list object over `base`: all list(...) values of weight <= depth
// whose items belong to base. Finite iff base is empty.
SetObject list_object(const SetObject& base, int depth);

// Canonical pullback of f : A -> C, g : B -> C: sorted pairs (a, b) with
// f(a) = g(b), weight-bounded when either side is not finite.
SetObject pullback_object(const SetMorphism& f, const SetMorphism& g, int depth);

// Canonical pushout of the span f : C -> A, g : C -> B: quotient of the
// tagged disjoint union inl[A] + inr[B] by the closure of
// inl(f(c)) ~ inr(g(c)), representatives the least members.
SetObject pushout_object(const SetMorphism& f, const SetMorphism& g, int depth);

// The class of a tagged-union member in the given pushout, if realized.
std::optional<Value> pushout_class_of(const SetObject& pushout, const SetMorphism& f,
                                      const SetMorphism& g, const Value& member);

// member inl(a)/inr(b) -> its class representative, for the whole union.
std::vector<std::pair<Value, Value>> pushout_canonical_classes(const SetMorphism& f,
                                                               const SetMorphism& g);

SetObject tagged_object(const std::string& label, const SetObject& inner);
Value tag_value(const std::string& label, const Value& v);

SetMorphism identity_morphism(const SetObject& a);
SetMorphism table_morphism(SetObject dom, SetObject cod,
                           std::vector<std::pair<Value, Value>> table, std::string desc);
SetMorphism compose_morphisms(const SetMorphism& f, const SetMorphism& g);  // f then g
SetMorphism tagged_morphism(const std::string& label, const SetMorphism& m);
std::optional<SetMorphism> invert_morphism(const SetMorphism& m);
bool is_identity_morphism(const SetMorphism& m);

// All functions dom -> cod, in deterministic order.
std::vector<SetMorphism> all_functions(const SetObject& dom, const SetObject& cod);

// All subsets of the given atoms with size <= k, in deterministic order.
std::vector<SetObject> all_subsets(const std::vector<std::string>& atoms, int k);

}  // namespace ausk
