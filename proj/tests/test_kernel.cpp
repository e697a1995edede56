#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ausk/kernel.hpp"
#include "ausk/semantics.hpp"

using namespace ausk;

namespace {

ContextPtr ob() { return extend(Context::empty(), AddPrimitiveNode{"X"}); }

Universal terminal(const Name& apex) {
  Universal u;
  u.kind = UniversalKind::Terminal;
  u.apex = apex;
  return u;
}

}  // namespace

TEST_CASE("empty sketch is well formed, dangling endpoints are reported") {
  Sketch s;
  CHECK(validate_sketch(s).ok());
  s.nodes.insert("A");
  s.identities["A"] = identity_edge_name("A");
  s.edges[identity_edge_name("A")] = {identity_edge_name("A"), "A", "A"};
  s.object_equalities.insert(identity_edge_name("A"));
  s.edges["f"] = {"f", "A", "B"};  // B undeclared
  auto rep = validate_sketch(s);
  REQUIRE_FALSE(rep.ok());
  CHECK(rep.violations[0].reason.find("dangling endpoint") != std::string::npos);
}

TEST_CASE("extend checks freshness") {
  ContextPtr c = ob();
  CHECK(c->derived.has_node("X"));
  CHECK_THROWS_AS(extend(c, AddUniversal{terminal("X")}), AuskError);
  try {
    extend(c, AddUniversal{terminal("X")});
  } catch (const AuskError& e) {
    CHECK(e.kind == ErrorKind::FreshnessViolation);
  }
  CHECK_THROWS_AS(extend(c, AddPrimitiveNode{"X"}), AuskError);
}

TEST_CASE("a primitive loop edge is fine") {
  ContextPtr c = extend(ob(), AddPrimitiveEdge{{"f", "X", "X"}});
  CHECK(c->derived.has_edge("f"));
  CHECK(c->primitive_edges.count("f") == 1);
  CHECK(validate_sketch(c->derived).ok());
}

TEST_CASE("dangling references are rejected") {
  CHECK_THROWS_AS(extend(ob(), AddPrimitiveEdge{{"f", "X", "Y"}}), AuskError);
  try {
    extend(ob(), AddPrimitiveEdge{{"f", "X", "Y"}});
  } catch (const AuskError& e) {
    CHECK(e.kind == ErrorKind::DanglingReference);
  }
}

TEST_CASE("adjoining a composite records the triangle") {
  ContextPtr c = extend(ob(), AddPrimitiveEdge{{"f", "X", "X"}});
  c = extend_equiv(c, AdjoinComposite{identity_edge_name("X"), "f", "h"});
  CHECK(c->derived.has_edge("h"));
  CHECK(c->derived.commutativities.count({identity_edge_name("X"), "f", "h"}) == 1);
  // the composite is not a primitive item
  CHECK(c->primitive_edges.count("h") == 0);
}

TEST_CASE("terminal fillin introduces exactly one edge and no commutativities") {
  ContextPtr c = extend(ob(), AddUniversal{terminal("T")});
  size_t comms = c->derived.commutativities.size();
  DeclareFillin df;
  df.spec.kind = FillinKind::TerminalFrom;
  df.spec.universal_apex = "T";
  df.spec.source = "X";
  df.result = "toT";
  c = extend_equiv(c, df);
  CHECK(c->derived.edge("toT").src == "X");
  CHECK(c->derived.edge("toT").tgt == "T");
  CHECK(c->derived.commutativities.size() == comms);
}

TEST_CASE("terminal-to-terminal fillins are object equalities") {
  ContextPtr c = extend(Context::empty(), AddUniversal{terminal("T1")});
  c = extend(c, AddUniversal{terminal("T2")});
  DeclareFillin df;
  df.spec.kind = FillinKind::TerminalFrom;
  df.spec.universal_apex = "T2";
  df.spec.source = "T1";
  df.result = "e";
  c = extend_equiv(c, df);
  CHECK(c->derived.object_equalities.count("e") == 1);
}

TEST_CASE("adjoining an inverse needs a justification") {
  ContextPtr c = extend(ob(), AddPrimitiveEdge{{"f", "X", "X"}});
  // no oracle, no syntactic route: an arbitrary primitive edge might not be iso
  CHECK_THROWS_AS(extend_equiv(c, AdjoinInverse{"f", "finv", {}}), AuskError);
  try {
    extend_equiv(c, AdjoinInverse{"f", "finv", {}});
  } catch (const AuskError& e) {
    CHECK(e.kind == ErrorKind::UnjustifiedStep);
  }
  // with the bounded oracle it is still rejected: not every function X -> X
  // is invertible
  CHECK_THROWS_AS(extend_equiv(c, AdjoinInverse{"f", "finv", {}}, default_kernel_options()),
                  AuskError);
}

TEST_CASE("unit law justifies degenerate deductions") {
  ContextPtr c = extend(ob(), AddPrimitiveEdge{{"f", "X", "X"}});
  Triangle left{identity_edge_name("X"), "f", "f"};
  c = extend_equiv(c, DeduceCommutativity{left, {JustRule::UnitLaw, ""}});
  CHECK(c->derived.commutativities.count(left) == 1);
  Triangle bogus{"f", "f", "f"};
  CHECK_THROWS_AS(extend_equiv(c, DeduceCommutativity{bogus, {JustRule::UnitLaw, ""}}), AuskError);
}

TEST_CASE("associativity pasting is a syntactic rule") {
  ContextPtr c = extend(ob(), AddPrimitiveEdge{{"f", "X", "X"}});
  c = extend(c, AddPrimitiveEdge{{"g", "X", "X"}});
  c = extend(c, AddPrimitiveEdge{{"k", "X", "X"}});
  c = extend_equiv(c, AdjoinComposite{"f", "g", "fg"});
  c = extend_equiv(c, AdjoinComposite{"fg", "k", "fgk"});
  c = extend_equiv(c, AdjoinComposite{"g", "k", "gk"});
  // f;(g;k) = (f;g);k as the reassociated triangle
  Triangle t{"f", "gk", "fgk"};
  c = extend_equiv(c, DeduceCommutativity{t, {JustRule::Auto, ""}});
  CHECK(c->derived.commutativities.count(t) == 1);
}

TEST_CASE("replay determinism") {
  std::vector<Step> steps = {AddPrimitiveNode{"X"}, AddUniversal{terminal("T")},
                             AddPrimitiveEdge{{"f", "X", "X"}}};
  ContextPtr a = replay("C", steps);
  ContextPtr b = replay("C", steps);
  CHECK(a->steps == b->steps);
  CHECK(a->derived.nodes == b->derived.nodes);
  CHECK(a->primitive_nodes == b->primitive_nodes);
}

TEST_CASE("primitive items of the generic-object and terminal contexts") {
  auto [n1, e1] = primitive_items(*ob());
  CHECK(n1 == std::set<Name>{"X"});
  CHECK(e1.empty());
  ContextPtr t = extend(Context::empty(), AddUniversal{terminal("T")});
  auto [n2, e2] = primitive_items(*t);
  CHECK(n2.empty());
  CHECK(e2.empty());
}

TEST_CASE("list universal checks its terminal reference") {
  ContextPtr c = ob();
  Universal l;
  l.kind = UniversalKind::List;
  l.apex = "L";
  l.base = "X";
  l.terminal_apex = "T";  // does not exist
  l.base_to_terminal = "bt";
  l.apex_to_terminal = "lt";
  l.product_apex = "P";
  l.proj1 = "p1";
  l.proj2 = "p2";
  l.nil = "nil";
  l.cons = "cons";
  CHECK_THROWS_AS(extend(c, AddUniversal{l}), AuskError);
}
