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

const Registry& grd_registry() {
  static Registry reg = [] {
    auto f = parse_dsl(slurp("corpus/grd.ausk"), "grd.ausk");
    return elaborate_file(f, default_kernel_options());
  }();
  return reg;
}

ContextPtr named(ContextPtr c, const char* n) {
  auto out = std::make_shared<Context>(*c);
  out->name = n;
  return out;
}

// The independent oracle: subsets F of G respecting every relation r, i.e.
// if the premise of r is contained in F then some disjunct of r has its
// conclusion contained in F.
std::vector<std::set<std::string>> subset_filter_oracle(const Model& m) {
  auto decode_fin = [](const Value& cls) {
    std::set<std::string> out;
    const Value& member = cls.kid(0);
    const Value& lst = member.is(Value::Tag::InjL) || member.is(Value::Tag::InjR)
                           ? member.kid(0)
                           : member;
    for (const Value& v : lst.kids()) out.insert(v.label());
    return out;
  };
  std::vector<std::string> gs;
  for (const Value& g : m.node("G").elems) gs.push_back(g.label());
  const SetMorphism &lam = m.edge("lambda"), &rho = m.edge("rho"), &pi = m.edge("pi");
  std::vector<std::set<std::string>> points;
  for (uint64_t mask = 0; mask < (uint64_t{1} << gs.size()); ++mask) {
    std::set<std::string> f;
    for (size_t i = 0; i < gs.size(); ++i)
      if (mask & (uint64_t{1} << i)) f.insert(gs[i]);
    bool ok = true;
    for (const Value& r : m.node("R").elems) {
      std::set<std::string> premise = decode_fin(lam.apply(r));
      bool premise_in = std::includes(f.begin(), f.end(), premise.begin(), premise.end());
      if (!premise_in) continue;
      bool some_disjunct = false;
      for (const Value& d : m.node("D").elems) {
        if (!(pi.apply(d) == r)) continue;
        std::set<std::string> conclusion = decode_fin(rho.apply(d));
        if (std::includes(f.begin(), f.end(), conclusion.begin(), conclusion.end()))
          some_disjunct = true;
      }
      if (!some_disjunct) {
        ok = false;
        break;
      }
    }
    if (ok) points.push_back(std::move(f));
  }
  std::sort(points.begin(), points.end());
  return points;
}

std::set<std::string> point_subset(const Model& base, const Point& p) {
  std::set<std::string> out;
  const SetMorphism& chi = p.funs.at("chi");
  for (const Value& g : base.node("G").elems) {
    Value v = chi.apply(g);
    if (v.kid(0).is(Value::Tag::InjL)) out.insert(g.label());
  }
  return out;
}

}  // namespace

TEST_CASE("compiling the generic object gives one primitive sort") {
  ContextPtr ob = named(extend(Context::empty(), AddPrimitiveNode{"X"}), "Ob");
  GeometricExtension g = compile_geometric(Context::empty(), ob);
  REQUIRE(g.steps.size() == 1);
  CHECK(g.steps[0].kind == SimpleStep::Kind::PrimitiveSort);
  CHECK(g.steps[0].name == "X");
  auto norm = normalize(g);
  REQUIRE(norm.size() == 1);
  CHECK(norm[0].kind == NormalStep::Kind::TorsorFiniteSets);
}

TEST_CASE("compiling a universal-only extension yields no steps") {
  Universal t;
  t.kind = UniversalKind::Terminal;
  t.apex = "T";
  ContextPtr term = named(extend(Context::empty(), AddUniversal{t}), "Term");
  GeometricExtension g = compile_geometric(Context::empty(), term);
  CHECK(g.steps.empty());
  CHECK(g.objects.at("T")->kind == GeoObj::Kind::One);
  // exactly one point
  Model empty_model;
  empty_model.ctx = Context::empty();
  empty_model.depth = 4;
  auto pts = enumerate_points(instantiate(g, empty_model), Settings{}, ExecMode::Serial);
  CHECK(pts.size() == 1);
}

TEST_CASE("a commutativity compiles to a geometric quotient and an edge to a functional extension") {
  ContextPtr c = extend(Context::empty(), AddPrimitiveNode{"A"});
  ContextPtr base = named(c, "Base");
  ContextPtr e = extend(base, AddPrimitiveEdge{{"f", "A", "A"}});
  e = extend(e, AddCommutativity{{"f", "f", "f"}});
  GeometricExtension g = compile_geometric(base, named(e, "Ext"));
  REQUIRE(g.steps.size() == 2);
  CHECK(g.steps[0].kind == SimpleStep::Kind::FunctionalExtension);
  CHECK(g.steps[1].kind == SimpleStep::Kind::GeometricQuotient);
  auto norm = normalize(g);
  REQUIRE(norm.size() == 4);  // torsor, single-valuedness, totality, invert
  CHECK(norm[0].kind == NormalStep::Kind::TorsorFinPoset);
  CHECK(norm[1].role == 1);
  CHECK(norm[2].role == 2);
}

TEST_CASE("the GRD point counts from the worked example") {
  const Registry& reg = grd_registry();
  ContextPtr grd = reg.context("GRD");
  ContextPtr pt = reg.context("GRD_PT");
  GeometricExtension g = compile_geometric(grd, pt);
  Settings s;
  Model m1 = reg.model("M1", 4);
  auto pts1 = enumerate_points(instantiate(g, m1), s, ExecMode::Serial);
  REQUIRE(pts1.size() == 1);
  CHECK(point_subset(m1, pts1[0]).empty());
  Model m2 = reg.model("M2", 4);
  auto pts2 = enumerate_points(instantiate(g, m2), s, ExecMode::Serial);
  CHECK(pts2.size() == 2);
}

TEST_CASE("points agree with the subset-filter oracle on small instances") {
  const Registry& reg = grd_registry();
  ContextPtr grd = reg.context("GRD");
  ContextPtr pt = reg.context("GRD_PT");
  GeometricExtension g = compile_geometric(grd, pt);
  Settings s{{"a", "b", "c"}, 3, 5};
  // the declared corpus models, all bound-1 instances, and a three-generator
  // instance below
  std::vector<Model> bases = {reg.model("M1", 5), reg.model("M2", 5)};
  Settings small{{"a", "b"}, 1, 5};
  for (Model& m : enumerate_strict_models(grd, small)) bases.push_back(std::move(m));
  // and a three-generator instance: G={a,b,c}, R={r}, lambda(r)={a,b}
  {
    ContextPtr g3 = grd;
    Assignment a;
    a.nodes["G"] = finite_set({Value::atom("a"), Value::atom("b"), Value::atom("c")}, "prim");
    a.nodes["R"] = finite_set({Value::atom("r")}, "prim");
    a.nodes["D"] = finite_set({}, "prim");
    // to fill lambda we need FinG; evaluate nodes first through a partial model
    EvalEnv env;
    for (const Step& st : g3->steps) {
      if (auto* p = std::get_if<AddPrimitiveNode>(&st)) {
        eval_env_add_node(env, p->name, a.nodes.at(p->name));
      } else if (std::get_if<AddPrimitiveEdge>(&st)) {
        break;
      } else {
        eval_model_step(env, st, 5);
      }
    }
    const SetObject& fin = env.nodes.at("FinG");
    Value ab = Value::class_rep(
        Value::inj_l(Value::list({Value::atom("a"), Value::atom("b")})));
    REQUIRE(fin.contains(ab));
    a.edges["lambda"] =
        table_morphism(a.nodes["R"], fin, {{Value::atom("r"), ab}}, "lambda");
    SetMorphism empty_rho;
    empty_rho.dom = a.nodes["D"];
    empty_rho.cod = fin;
    a.edges["rho"] = empty_rho;
    SetMorphism empty_pi;
    empty_pi.dom = a.nodes["D"];
    empty_pi.cod = a.nodes["R"];
    a.edges["pi"] = empty_pi;
    bases.push_back(eval_strict_model(grd, a, 5));
  }
  for (const Model& m : bases) {
    auto expected = subset_filter_oracle(m);
    Settings ps = s;
    auto pts = enumerate_points(instantiate(g, m), ps, ExecMode::Serial);
    std::vector<std::set<std::string>> got;
    for (const Point& p : pts) got.push_back(point_subset(m, p));
    std::sort(got.begin(), got.end());
    REQUIRE(got.size() == expected.size());
    CHECK(got == expected);
  }
}

TEST_CASE("normalization preserves point sets") {
  const Registry& reg = grd_registry();
  GeometricExtension g = compile_geometric(reg.context("GRD"), reg.context("GRD_PT"));
  Settings s;
  for (const char* name : {"M1", "M2"}) {
    Model m = reg.model(name, 4);
    InstantiatedTheory t = instantiate(g, m);
    auto direct = enumerate_points(t, s, ExecMode::Serial);
    auto normed = enumerate_points_normalized(t, normalize(g), s, ExecMode::Serial);
    std::vector<std::string> a, b;
    for (const Point& p : direct) a.push_back(p.text());
    for (const Point& p : normed) b.push_back(p.text());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("pulling back along the identity is the identity") {
  const Registry& reg = grd_registry();
  GeometricExtension g = compile_geometric(reg.context("GRD"), reg.context("GRD_PT"));
  GeometricExtension back = pullback_gext(g, identity_map(reg.context("GRD")));
  CHECK(back.text() == g.text());
}

TEST_CASE("instantiation agrees with point enumeration after pullback along a projection") {
  // pull the one-sort extension back along a projection and check the
  // functional-extension case of the proposition
  ContextPtr ob = named(extend(Context::empty(), AddPrimitiveNode{"X"}), "Ob");
  ContextPtr ob2 = named(
      extend(extend(Context::empty(), AddPrimitiveNode{"X1"}), AddPrimitiveNode{"X2"}), "Ob2");
  ContextPtr obf = extend(ob, AddPrimitiveEdge{{"f", "X", "X"}});
  obf = named(obf, "ObF");
  GeometricExtension g = compile_geometric(ob, obf);
  ContextMap p1 = map_from_hom(check_homomorphism({{"X", "X1"}}, {}, ob, ob2));
  GeometricExtension pulled = pullback_gext(g, p1);
  REQUIRE(pulled.steps.size() == 1);
  CHECK(pulled.steps[0].kind == SimpleStep::Kind::FunctionalExtension);
  CHECK(pulled.steps[0].h0->text() == "X1");
  // points over a base model of Ob2 are the endofunctions of X1
  Assignment a;
  a.nodes["X1"] = finite_set({Value::atom("a"), Value::atom("b")}, "prim");
  a.nodes["X2"] = finite_set({Value::atom("c")}, "prim");
  Model m = eval_strict_model(ob2, a, 4);
  auto pts = enumerate_points(instantiate(pulled, m), Settings{}, ExecMode::Serial);
  CHECK(pts.size() == 4);
}

TEST_CASE("non-finite constructs are flagged at instantiation") {
  // an edge out of the list scaffolding cannot be grounded finitely
  const Registry& reg = grd_registry();
  ContextPtr grd = reg.context("GRD");
  ContextPtr bad = extend(grd, AddPrimitiveEdge{{"pick", "FinG.L", "G"}});
  bad = named(bad, "Bad");
  GeometricExtension g = compile_geometric(grd, bad);
  Model m = reg.model("M1", 4);
  CHECK_THROWS_AS(instantiate(g, m), AuskError);
  try {
    instantiate(g, m);
  } catch (const AuskError& e) {
    CHECK(e.kind == ErrorKind::NonFiniteConstruct);
  }
}

TEST_CASE("points correspond to strict models over the base") {
  const Registry& reg = grd_registry();
  ContextPtr grd = reg.context("GRD");
  ContextPtr pt = reg.context("GRD_PT");
  GeometricExtension g = compile_geometric(grd, pt);
  Settings s;
  Model m = reg.model("M1", 4);
  InstantiatedTheory t = instantiate(g, m);
  auto pts = enumerate_points(t, s, ExecMode::Serial);
  // direct enumeration of strict extended models restricting to m
  Assignment pin;
  for (const Name& n : grd->primitive_nodes) pin.nodes[n] = m.node(n);
  for (const Name& e : grd->primitive_edges) pin.edges[e] = m.edge(e);
  auto direct = enumerate_strict_models(pt, s, ExecMode::Serial, &pin);
  REQUIRE(pts.size() == direct.size());
  // the constructed bijection: each point evaluates to a strict model
  for (size_t i = 0; i < pts.size(); ++i)
    CHECK(point_to_model(pt, t, pts[i]).text() == direct[i].text());
}
