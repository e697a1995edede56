#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ausk/set_object.hpp"

using namespace ausk;

TEST_CASE("structural order puts shorter lists first") {
  Value a = Value::atom("a"), b = Value::atom("b");
  Value ab = Value::list({a, b});
  Value ba = Value::list({b, a});
  Value aab = Value::list({a, a, b});
  CHECK(ab < ba);
  CHECK(ab < aab);   // length before lexicographic content
  CHECK(ba < aab);
  CHECK(Value::list({}) < ab);
  CHECK(Value::inj_l(a) < Value::inj_r(a));
}

TEST_CASE("weight is the leaf count") {
  Value a = Value::atom("a");
  CHECK(a.weight() == 1);
  CHECK(Value::unit().weight() == 1);
  CHECK(Value::list({}).weight() == 0);
  CHECK(Value::list({a, a, a}).weight() == 3);
  CHECK(Value::pair(Value::list({a}), Value::pair(a, Value::list({a, a}))).weight() == 4);
  CHECK(Value::tagged("t", a).weight() == 1);
}

TEST_CASE("canonical text") {
  Value a = Value::atom("a");
  CHECK(Value::pair(a, Value::unit()).text() == "(a, ())");
  CHECK(Value::list({a, a}).text() == "[a, a]");
  CHECK(Value::class_rep(Value::inj_l(a)).text() == "cls(inl a)");
  CHECK(Value::tagged("t", a).text() == "tag(t, a)");
}

TEST_CASE("pullback of two constant maps is the full product") {
  // f, g : {a,b} -> {c} constant; the pullback is all four pairs
  SetObject ab = finite_set({Value::atom("a"), Value::atom("b")});
  SetObject c = finite_set({Value::atom("c")});
  auto constmap = [&](const char* d) {
    std::vector<std::pair<Value, Value>> t;
    for (const Value& v : ab.elems) t.emplace_back(v, Value::atom("c"));
    return table_morphism(ab, c, std::move(t), d);
  };
  SetObject pb = pullback_object(constmap("f"), constmap("g"), 4);
  REQUIRE(pb.elems.size() == 4);
  CHECK(pb.elems[0].text() == "(a, a)");
  CHECK(pb.elems[1].text() == "(a, b)");
  CHECK(pb.elems[2].text() == "(b, a)");
  CHECK(pb.elems[3].text() == "(b, b)");
}

TEST_CASE("list object enumeration begins with the short lists") {
  SetObject a = finite_set({Value::atom("a")});
  SetObject l = list_object(a, 4);
  REQUIRE(l.elems.size() == 5);  // lengths 0..4
  CHECK(l.elems[0].text() == "[]");
  CHECK(l.elems[1].text() == "[a]");
  CHECK(l.elems[2].text() == "[a, a]");
  CHECK_FALSE(l.finite);
  CHECK_FALSE(l.closed);
  SetObject none = list_object(initial_object(), 4);
  CHECK(none.finite);
  CHECK(none.elems.size() == 1);
}

TEST_CASE("pushout glues along the span and picks least representatives") {
  // span c <- {x} -> c' relating a in A with b in B
  SetObject a = finite_set({Value::atom("a"), Value::atom("c")});
  SetObject b = finite_set({Value::atom("b")});
  SetObject mid = finite_set({Value::atom("x")});
  SetMorphism f = table_morphism(mid, a, {{Value::atom("x"), Value::atom("a")}}, "f");
  SetMorphism g = table_morphism(mid, b, {{Value::atom("x"), Value::atom("b")}}, "g");
  SetObject po = pushout_object(f, g, 4);
  REQUIRE(po.elems.size() == 2);  // {a ~ b} and {c}
  CHECK(po.elems[0].text() == "cls(inl a)");
  CHECK(po.elems[1].text() == "cls(inl c)");
  auto cls_b = pushout_class_of(po, f, g, Value::inj_r(Value::atom("b")));
  REQUIRE(cls_b.has_value());
  CHECK(cls_b->text() == "cls(inl a)");
}

TEST_CASE("function and subset enumeration is deterministic") {
  SetObject one = finite_set({Value::atom("a")});
  SetObject two = finite_set({Value::atom("a"), Value::atom("b")});
  CHECK(all_functions(one, two).size() == 2);
  CHECK(all_functions(two, two).size() == 4);
  CHECK(all_functions(two, initial_object()).empty());
  CHECK(all_functions(initial_object(), initial_object()).size() == 1);
  auto subs = all_subsets({"a", "b"}, 2);
  REQUIRE(subs.size() == 4);
  CHECK(subs[0].elems.empty());
  CHECK(subs[3].elems.size() == 2);
  CHECK(all_subsets({"a", "b"}, 1).size() == 3);
}

TEST_CASE("morphism inversion detects bijections") {
  SetObject two = finite_set({Value::atom("a"), Value::atom("b")});
  SetMorphism swap = table_morphism(
      two, two, {{Value::atom("a"), Value::atom("b")}, {Value::atom("b"), Value::atom("a")}}, "s");
  auto inv = invert_morphism(swap);
  REQUIRE(inv.has_value());
  CHECK(compose_morphisms(swap, *inv).table == identity_morphism(two).table);
  SetMorphism collapse = table_morphism(
      two, two, {{Value::atom("a"), Value::atom("a")}, {Value::atom("b"), Value::atom("a")}}, "c");
  CHECK_FALSE(invert_morphism(collapse).has_value());
}
