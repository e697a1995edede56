#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>

#include "ausk/dsl.hpp"

using namespace ausk;

namespace {

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

const char* corpus_files[] = {"corpus/empty.ausk",  "corpus/ob.ausk",    "corpus/ob2.ausk",
                              "corpus/term.ausk",   "corpus/arrow.ausk", "corpus/delta.ausk",
                              "corpus/canterm.ausk", "corpus/grd.ausk"};

}  // namespace

TEST_CASE("a one-node context parses to a single declaration") {
  SourceFile f = parse_dsl("context Ob { node X; }", "t");
  REQUIRE(f.decls.size() == 1);
  const auto& c = std::get<ContextDecl>(f.decls[0]);
  CHECK(c.name == "Ob");
  REQUIRE(c.items.size() == 1);
  CHECK(c.items[0].kind == ItemDecl::Kind::Node);
  CHECK(c.items[0].name == "X");
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_dsl("context Ob { node X }", "t");  // missing semicolon
    FAIL("expected a parse error");
  } catch (const AuskError& e) {
    CHECK(e.kind == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("1:21") != std::string::npos);
  }
}

TEST_CASE("duplicate names are freshness violations with positions") {
  SourceFile f = parse_dsl("context C { node X;\nnode X; }", "t");
  try {
    elaborate_file(f, {});
    FAIL("expected a freshness violation");
  } catch (const AuskError& e) {
    CHECK(std::string(e.what()).find("2:1") != std::string::npos);
    CHECK(std::string(e.what()).find("already in use") != std::string::npos);
  }
}

TEST_CASE("round trip: parse, print, parse yields identical declarations") {
  for (const char* path : corpus_files) {
    SourceFile f = parse_dsl(slurp(path), path);
    std::string printed = pretty_print(f);
    SourceFile again = parse_dsl(printed, path);
    CHECK(pretty_print(again) == printed);
  }
}

TEST_CASE("the whole corpus elaborates and validates") {
  for (const char* path : corpus_files) {
    SourceFile f = parse_dsl(slurp(path), path);
    Registry reg = elaborate_file(f, default_kernel_options());
    for (const auto& name : reg.context_order) {
      INFO(path << " context " << name);
      CHECK(validate_sketch(reg.context(name)->derived).ok());
    }
  }
}

TEST_CASE("the GRD corpus file matches the worked signature") {
  SourceFile f = parse_dsl(slurp("corpus/grd.ausk"), "grd.ausk");
  Registry reg = elaborate_file(f, default_kernel_options());
  ContextPtr grd = reg.context("GRD");
  auto [nodes, edges] = primitive_items(*grd);
  CHECK(nodes == std::set<Name>{"G", "R", "D"});
  CHECK(edges == std::set<Name>{"lambda", "rho", "pi"});
  const Sketch& sk = grd->derived;
  CHECK(sk.edge("lambda").tgt == "FinG");
  CHECK(sk.edge("rho").tgt == "FinG");
  CHECK(sk.edge("pi").src == "D");
  CHECK(sk.edge("pi").tgt == "R");
  // FinG is presented as a quotient of the list object over G
  const Universal* fin = sk.universal_with_apex("FinG");
  REQUIRE(fin != nullptr);
  CHECK(fin->kind == UniversalKind::Pushout);
  const Universal* lst = sk.universal_with_apex("FinG.L");
  REQUIRE(lst != nullptr);
  CHECK(lst->kind == UniversalKind::List);
  CHECK(lst->base == "G");
}

TEST_CASE("fin expansion is replay deterministic") {
  SourceFile f = parse_dsl(slurp("corpus/grd.ausk"), "grd.ausk");
  Registry a = elaborate_file(f, default_kernel_options());
  Registry b = elaborate_file(f, default_kernel_options());
  ContextPtr ca = a.context("GRD_PT"), cb = b.context("GRD_PT");
  REQUIRE(ca->steps.size() == cb->steps.size());
  for (size_t i = 0; i < ca->steps.size(); ++i) CHECK(ca->steps[i] == cb->steps[i]);
}

TEST_CASE("model declarations decode against quotient interpretations") {
  SourceFile f = parse_dsl(slurp("corpus/grd.ausk"), "grd.ausk");
  Registry reg = elaborate_file(f, default_kernel_options());
  Model m1 = reg.model("M1", 4);
  CHECK(m1.strict());
  Value expect = Value::class_rep(Value::inj_l(Value::list({Value::atom("g")})));
  CHECK(m1.edge("lambda").apply(Value::atom("r")) == expect);
  // a value outside the target is rejected
  SourceFile bad = parse_dsl(
      "context C { node A; node FB = fin(A); edge e : A -> FB; }\n"
      "model M of C { A = { a }; e = { a -> [zz] }; }",
      "t");
  CHECK_THROWS_AS(elaborate_file(bad, default_kernel_options()), AuskError);
}

TEST_CASE("maps and functors resolve from files") {
  SourceFile f = parse_dsl(slurp("corpus/canterm.ausk"), "canterm.ausk");
  Registry reg = elaborate_file(f, default_kernel_options());
  ContextMap h = reg.map("ToTerm");
  CHECK(h.dom->name == "Term");
  CHECK(h.cod->name == "Ob");
  CHECK(reg.functor("tagt").text() == "tag:t");
  CHECK(parse_functor_spec("tag:s,tag:t").text() == "tag:s.tag:t");
  CHECK(parse_functor_spec("id").is_identity());
}

TEST_CASE("list declarations produce a usable list object") {
  SourceFile f = parse_dsl(
      "context L { node A; list LA = list(A) with anil, acons; }", "t");
  Registry reg = elaborate_file(f, default_kernel_options());
  ContextPtr c = reg.context("L");
  const Universal* u = c->derived.universal_with_apex("LA");
  REQUIRE(u != nullptr);
  CHECK(u->nil == "anil");
  CHECK(u->cons == "acons");
  Assignment a;
  a.nodes["A"] = finite_set({Value::atom("x")}, "prim");
  Model m = eval_strict_model(c, a, 3);
  CHECK(m.node("LA").elems.size() == 4);  // lengths 0..3
}

TEST_CASE("equivalence steps in the corpus are conservative at bound 1") {
  // every equivalence step: strict models of the extended prefix restrict
  // bijectively to strict models of the preceding prefix
  SourceFile f = parse_dsl(slurp("corpus/grd.ausk"), "grd.ausk");
  Registry reg = elaborate_file(f, default_kernel_options());
  ContextPtr grd = reg.context("GRD");
  Settings s{{"a"}, 1, 4};
  KernelOptions trusted;
  trusted.check_justifications = false;
  for (size_t i = 0; i < grd->steps.size(); ++i) {
    if (!is_equivalence_step(grd->steps[i])) continue;
    std::vector<Step> before(grd->steps.begin(), grd->steps.begin() + i);
    std::vector<Step> after(grd->steps.begin(), grd->steps.begin() + i + 1);
    ContextPtr cb = replay("before", before, trusted);
    ContextPtr ca = replay("after", after, trusted);
    auto mb = enumerate_strict_models(cb, s);
    auto ma = enumerate_strict_models(ca, s);
    INFO("step " << step_text(grd->steps[i]));
    CHECK(mb.size() == ma.size());
  }
}
