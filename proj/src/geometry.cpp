#include "ausk/geometry.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace ausk {

namespace {

GeoObjPtr mk_obj(GeoObj o) { return std::make_shared<GeoObj>(std::move(o)); }
GeoMorPtr mk_mor(GeoMor m) { return std::make_shared<GeoMor>(std::move(m)); }

GeoObjPtr base_obj(const Name& n) {
  GeoObj o;
  o.kind = GeoObj::Kind::Base;
  o.name = n;
  return mk_obj(std::move(o));
}

GeoMorPtr base_mor(const Name& e) {
  GeoMor m;
  m.kind = GeoMor::Kind::BaseEdge;
  m.name = e;
  return mk_mor(std::move(m));
}

}  // namespace

std::string GeoObj::text() const {
  if (!display.empty()) return display;
  switch (kind) {
    case Kind::Base: return name;
    case Kind::Adjoined: return "?" + name;
    case Kind::One: return "1";
    case Kind::Zero: return "0";
    case Kind::Pb: return "pb(" + f->text() + ", " + g->text() + ")";
    case Kind::Po: return "po(" + f->text() + ", " + g->text() + ")";
    case Kind::ListOf: return "list(" + inner->text() + ")";
    case Kind::Eq: return "eq(" + f->text() + ", " + g->text() + ")";
    case Kind::Const: return value.text();
  }
  return "?";
}

std::string GeoMor::text() const {
  if (!display.empty() && kind != Kind::BaseEdge && kind != Kind::AdjoinedFun) return display;
  switch (kind) {
    case Kind::BaseEdge: return name;
    case Kind::AdjoinedFun: return "?" + name;
    case Kind::Id: return "id";
    case Kind::Comp: return a->text() + ";" + b->text();
    case Kind::Bang: return "!";
    case Kind::Absurd: return "?0";
    case Kind::Proj1: return "p1[" + obj->text() + "]";
    case Kind::Proj2: return "p2[" + obj->text() + "]";
    case Kind::PairInto: return "<" + a->text() + ", " + b->text() + ">";
    case Kind::Inj1: return "i1[" + obj->text() + "]";
    case Kind::Inj2: return "i2[" + obj->text() + "]";
    case Kind::CopairFrom: return "[" + a->text() + ", " + b->text() + "]";
    case Kind::Nil: return "nil[" + obj->text() + "]";
    case Kind::Cons: return "cons[" + obj->text() + "]";
    case Kind::Fold: return "fold(" + nil_image->text() + ", " + cons_alg->text() + ")";
    case Kind::PFold: return "pfold(" + param_map->text() + ", " + cons_alg->text() + ")";
    case Kind::EqIncl: return "eq<=(" + a->text() + ", " + b->text() + ")";
    case Kind::Inverse: return "inv(" + a->text() + ")";
    case Kind::Const: return value.text();
  }
  return "?";
}

std::string SimpleStep::text() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::PrimitiveSort:
      os << "sort " << name;
      break;
    case Kind::FunctionalExtension:
      os << "fun " << name << " : " << h0->text() << " -> " << h1->text();
      break;
    case Kind::GeometricQuotient:
      os << "quotient " << phi->text();
      break;
  }
  os << "  (from " << provenance << ")";
  return os.str();
}

std::string GeometricExtension::text() const {
  std::ostringstream os;
  os << "ausk-v1 geometric-extension base=" << base_name << "\n";
  for (const auto& s : steps) os << "  " << s.text() << "\n";
  return os.str();
}

std::string NormalStep::text() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::TorsorFiniteSets:
      os << "torsor " << name << " over the category of finite sets";
      break;
    case Kind::TorsorFinPoset:
      os << "torsor " << name << " over the poset fin(" << x->text() << " * " << y->text() << ")";
      break;
    case Kind::Invert:
      os << "invert ";
      if (role == 1)
        os << "single-valuedness of " << name;
      else if (role == 2)
        os << "totality of " << name;
      else
        os << phi->text();
      break;
  }
  return os.str();
}

GeometricExtension compile_geometric(const ContextPtr& base, const ContextPtr& ext) {
  if (!base->is_prefix_of(*ext))
    fail(ErrorKind::NotAnExtensionMap, "compile_geometric: not an extension");
  GeometricExtension g;
  g.base_name = base->name;
  for (const Name& n : base->derived.nodes) g.objects[n] = base_obj(n);
  for (const auto& [e, d] : base->derived.edges) g.morphisms[e] = base_mor(e);
  const Sketch& sk = ext->derived;

  auto add_node_obj = [&](const Name& n, GeoObj o) {
    o.display = n;
    GeoObjPtr p = mk_obj(std::move(o));
    g.objects[n] = p;
    GeoMor idm;
    idm.kind = GeoMor::Kind::Id;
    idm.obj = p;
    g.morphisms[identity_edge_name(n)] = mk_mor(std::move(idm));
    return p;
  };
  auto add_edge_mor = [&](const Name& e, GeoMor m) {
    m.display = e;
    g.morphisms[e] = mk_mor(std::move(m));
  };

  for (size_t i = base->steps.size(); i < ext->steps.size(); ++i) {
    const Step& step = ext->steps[i];
    const std::string prov = step_text(step);
    if (auto* p = std::get_if<AddPrimitiveNode>(&step)) {
      SimpleStep s;
      s.kind = SimpleStep::Kind::PrimitiveSort;
      s.name = p->name;
      s.provenance = prov;
      g.steps.push_back(s);
      GeoObj o;
      o.kind = GeoObj::Kind::Adjoined;
      o.name = p->name;
      add_node_obj(p->name, std::move(o));
    } else if (auto* p = std::get_if<AddPrimitiveEdge>(&step)) {
      SimpleStep s;
      s.kind = SimpleStep::Kind::FunctionalExtension;
      s.name = p->edge.id;
      s.h0 = g.objects.at(p->edge.src);
      s.h1 = g.objects.at(p->edge.tgt);
      s.provenance = prov;
      g.steps.push_back(s);
      GeoMor m;
      m.kind = GeoMor::Kind::AdjoinedFun;
      m.name = p->edge.id;
      m.dom = s.h0;
      m.cod = s.h1;
      g.morphisms[p->edge.id] = mk_mor(std::move(m));
    } else if (auto* p = std::get_if<AddUniversal>(&step)) {
      const Universal& u = p->u;
      switch (u.kind) {
        case UniversalKind::Terminal: {
          GeoObj o;
          o.kind = GeoObj::Kind::One;
          add_node_obj(u.apex, std::move(o));
          break;
        }
        case UniversalKind::Initial: {
          GeoObj o;
          o.kind = GeoObj::Kind::Zero;
          add_node_obj(u.apex, std::move(o));
          break;
        }
        case UniversalKind::Pullback: {
          GeoObj o;
          o.kind = GeoObj::Kind::Pb;
          o.f = g.morphisms.at(u.f);
          o.g = g.morphisms.at(u.g);
          GeoObjPtr op = add_node_obj(u.apex, std::move(o));
          GeoMor m1;
          m1.kind = GeoMor::Kind::Proj1;
          m1.obj = op;
          add_edge_mor(u.proj1, std::move(m1));
          GeoMor m2;
          m2.kind = GeoMor::Kind::Proj2;
          m2.obj = op;
          add_edge_mor(u.proj2, std::move(m2));
          break;
        }
        case UniversalKind::Pushout: {
          GeoObj o;
          o.kind = GeoObj::Kind::Po;
          o.f = g.morphisms.at(u.f);
          o.g = g.morphisms.at(u.g);
          GeoObjPtr op = add_node_obj(u.apex, std::move(o));
          GeoMor m1;
          m1.kind = GeoMor::Kind::Inj1;
          m1.obj = op;
          add_edge_mor(u.proj1, std::move(m1));
          GeoMor m2;
          m2.kind = GeoMor::Kind::Inj2;
          m2.obj = op;
          add_edge_mor(u.proj2, std::move(m2));
          break;
        }
        case UniversalKind::List: {
          GeoObj lo;
          lo.kind = GeoObj::Kind::ListOf;
          lo.inner = g.objects.at(u.base);
          GeoObjPtr lp = add_node_obj(u.apex, std::move(lo));
          GeoMor bang;
          bang.kind = GeoMor::Kind::Bang;
          bang.obj = lp;
          add_edge_mor(u.apex_to_terminal, std::move(bang));
          GeoObj prod;
          prod.kind = GeoObj::Kind::Pb;
          prod.f = g.morphisms.at(u.base_to_terminal);
          prod.g = g.morphisms.at(u.apex_to_terminal);
          GeoObjPtr pp = add_node_obj(u.product_apex, std::move(prod));
          GeoMor m1;
          m1.kind = GeoMor::Kind::Proj1;
          m1.obj = pp;
          add_edge_mor(u.proj1, std::move(m1));
          GeoMor m2;
          m2.kind = GeoMor::Kind::Proj2;
          m2.obj = pp;
          add_edge_mor(u.proj2, std::move(m2));
          GeoMor nil;
          nil.kind = GeoMor::Kind::Nil;
          nil.obj = lp;
          nil.dom = g.objects.at(u.terminal_apex);
          add_edge_mor(u.nil, std::move(nil));
          GeoMor cons;
          cons.kind = GeoMor::Kind::Cons;
          cons.obj = lp;
          cons.dom = pp;
          add_edge_mor(u.cons, std::move(cons));
          break;
        }
      }
    } else if (auto* p = std::get_if<AddCommutativity>(&step)) {
      GeoMor comp;
      comp.kind = GeoMor::Kind::Comp;
      comp.a = g.morphisms.at(p->t.f);
      comp.b = g.morphisms.at(p->t.g);
      GeoObj eq;
      eq.kind = GeoObj::Kind::Eq;
      eq.f = mk_mor(std::move(comp));
      eq.g = g.morphisms.at(p->t.h);
      GeoObjPtr eqp = mk_obj(std::move(eq));
      GeoMor incl;
      incl.kind = GeoMor::Kind::EqIncl;
      incl.obj = eqp;
      incl.a = eqp->f;
      incl.b = eqp->g;
      incl.dom = g.objects.at(sk.edge(p->t.f).src);
      SimpleStep s;
      s.kind = SimpleStep::Kind::GeometricQuotient;
      s.name = p->t.f + ";" + p->t.g + "=" + p->t.h;
      s.phi = mk_mor(std::move(incl));
      s.provenance = prov;
      g.steps.push_back(s);
    } else if (auto* p = std::get_if<AdjoinComposite>(&step)) {
      GeoMor m;
      m.kind = GeoMor::Kind::Comp;
      m.a = g.morphisms.at(p->f);
      m.b = g.morphisms.at(p->g);
      add_edge_mor(p->result, std::move(m));
    } else if (auto* p = std::get_if<DeclareFillin>(&step)) {
      const FillinSpec& fs = p->spec;
      GeoMor m;
      switch (fs.kind) {
        case FillinKind::TerminalFrom:
          m.kind = GeoMor::Kind::Bang;
          m.obj = g.objects.at(fs.source);
          break;
        case FillinKind::InitialTo:
          m.kind = GeoMor::Kind::Absurd;
          m.obj = g.objects.at(fs.target);
          break;
        case FillinKind::PullbackPair:
          m.kind = GeoMor::Kind::PairInto;
          m.obj = g.objects.at(fs.universal_apex);
          m.a = g.morphisms.at(fs.leg1);
          m.b = g.morphisms.at(fs.leg2);
          break;
        case FillinKind::PushoutCopair:
          m.kind = GeoMor::Kind::CopairFrom;
          m.obj = g.objects.at(fs.universal_apex);
          m.a = g.morphisms.at(fs.leg1);
          m.b = g.morphisms.at(fs.leg2);
          break;
        case FillinKind::ListFold:
          m.kind = GeoMor::Kind::Fold;
          m.obj = g.objects.at(fs.universal_apex);
          m.cod = g.objects.at(fs.target);
          m.nil_image = g.morphisms.at(fs.nil_image);
          m.cons_alg = g.morphisms.at(fs.cons_alg);
          break;
        case FillinKind::ListFoldParam:
          m.kind = GeoMor::Kind::PFold;
          m.obj = g.objects.at(fs.universal_apex);
          m.dom = g.objects.at(fs.domain_product);
          m.cod = g.objects.at(fs.target);
          m.nil_image = g.morphisms.at(fs.nil_image);
          m.cons_alg = g.morphisms.at(fs.cons_alg);
          break;
      }
      add_edge_mor(p->result, std::move(m));
    } else if (auto* p = std::get_if<AdjoinInverse>(&step)) {
      GeoMor m;
      m.kind = GeoMor::Kind::Inverse;
      m.a = g.morphisms.at(p->edge);
      add_edge_mor(p->result, std::move(m));
    }
    // DeduceCommutativity and FillinUniqueness carry no new content
  }
  return g;
}

// --- evaluation --------------------------------------------------------------

namespace {

// ground layer: evaluations that do not mention adjoined symbols, shared
// across every candidate assignment of one instantiation
struct GroundCache {
  std::map<const GeoObj*, SetObject> objs;
  std::map<const GeoMor*, SetMorphism> mors;
  std::map<const void*, bool> adjoined;
};

struct GeoEnv {
  const Model* base = nullptr;
  const std::map<Name, SetObject>* sorts = nullptr;
  const std::map<Name, SetMorphism>* funs = nullptr;
  int depth = 4;
  GroundCache* ground = nullptr;
  mutable std::map<const GeoObj*, SetObject> obj_memo;
  mutable std::map<const GeoMor*, SetMorphism> mor_memo;
};

SetObject eval_obj(const GeoObjPtr& o, const GeoEnv& env);
bool obj_depends_on_adjoined_c(const GeoObjPtr& o, GroundCache* c);
bool mor_depends_on_adjoined_c(const GeoMorPtr& m, GroundCache* c);

SetMorphism eval_mor(const GeoMorPtr& mp, const GeoEnv& env) {
  bool ground = env.ground && !mor_depends_on_adjoined_c(mp, env.ground);
  if (ground) {
    auto hit = env.ground->mors.find(mp.get());
    if (hit != env.ground->mors.end()) return hit->second;
  }
  auto hit = env.mor_memo.find(mp.get());
  if (hit != env.mor_memo.end()) return hit->second;
  const GeoMor& m = *mp;
  SetMorphism out;
  switch (m.kind) {
    case GeoMor::Kind::BaseEdge:
      if (!env.base) fail(ErrorKind::UnmappedConstruct, "no base model for edge " + m.name);
      out = env.base->edge(m.name);
      break;
    case GeoMor::Kind::AdjoinedFun: {
      if (!env.funs || !env.funs->count(m.name))
        fail(ErrorKind::UnmappedConstruct, "unbound function symbol " + m.name);
      out = env.funs->at(m.name);
      break;
    }
    case GeoMor::Kind::Id:
      out = identity_morphism(eval_obj(m.obj, env));
      break;
    case GeoMor::Kind::Comp:
      out = compose_morphisms(eval_mor(m.a, env), eval_mor(m.b, env));
      break;
    case GeoMor::Kind::Bang: {
      SetObject dom = eval_obj(m.obj, env);
      SetObject one = terminal_object();
      std::vector<std::pair<Value, Value>> t;
      for (const Value& v : dom.elems) t.emplace_back(v, Value::unit());
      out = table_morphism(dom, one, std::move(t), "!");
      out.rule = [](const Value&) -> std::optional<Value> { return Value::unit(); };
      break;
    }
    case GeoMor::Kind::Absurd: {
      out.dom = initial_object();
      out.cod = eval_obj(m.obj, env);
      out.desc = "?0";
      break;
    }
    case GeoMor::Kind::Proj1:
    case GeoMor::Kind::Proj2: {
      SetObject dom = eval_obj(m.obj, env);
      bool first = m.kind == GeoMor::Kind::Proj1;
      SetObject cod = first ? eval_mor(m.obj->f, env).dom : eval_mor(m.obj->g, env).dom;
      std::vector<std::pair<Value, Value>> t;
      for (const Value& v : dom.elems) t.emplace_back(v, v.kid(first ? 0 : 1));
      out = table_morphism(dom, cod, std::move(t), first ? "p1" : "p2");
      out.rule = [first](const Value& v) -> std::optional<Value> {
        if (v.is(Value::Tag::Pair)) return v.kid(first ? 0 : 1);
        return std::nullopt;
      };
      break;
    }
    case GeoMor::Kind::PairInto: {
      SetMorphism fa = eval_mor(m.a, env), fb = eval_mor(m.b, env);
      SetObject cod = eval_obj(m.obj, env);
      std::vector<std::pair<Value, Value>> t;
      for (const Value& v : fa.dom.elems) t.emplace_back(v, Value::pair(fa.apply(v), fb.apply(v)));
      out = table_morphism(fa.dom, cod, std::move(t), "pair");
      break;
    }
    case GeoMor::Kind::Inj1:
    case GeoMor::Kind::Inj2: {
      SetMorphism sf = eval_mor(m.obj->f, env), sg = eval_mor(m.obj->g, env);
      SetObject po = eval_obj(m.obj, env);
      bool first = m.kind == GeoMor::Kind::Inj1;
      const SetObject& dom = first ? sf.cod : sg.cod;
      std::vector<std::pair<Value, Value>> t;
      for (const auto& [member, cls] : pushout_canonical_classes(sf, sg)) {
        if (member.is(Value::Tag::InjL) == first) t.emplace_back(member.kid(0), cls);
      }
      out = table_morphism(dom, po, std::move(t), first ? "i1" : "i2");
      break;
    }
    case GeoMor::Kind::CopairFrom: {
      SetMorphism fa = eval_mor(m.a, env), fb = eval_mor(m.b, env);
      SetObject dom = eval_obj(m.obj, env);
      std::vector<std::pair<Value, Value>> t;
      for (const Value& q : dom.elems) {
        const Value& member = q.kid(0);
        t.emplace_back(q, member.is(Value::Tag::InjL) ? fa.apply(member.kid(0))
                                                      : fb.apply(member.kid(0)));
      }
      out = table_morphism(dom, fa.cod, std::move(t), "copair");
      break;
    }
    case GeoMor::Kind::Nil: {
      SetObject dom = eval_obj(m.dom, env);
      SetObject cod = eval_obj(m.obj, env);
      if (dom.elems.size() != 1) fail(ErrorKind::UnmappedConstruct, "nil domain not a point");
      out = table_morphism(dom, cod, {{dom.elems[0], Value::list({})}}, "nil");
      break;
    }
    case GeoMor::Kind::Cons: {
      SetObject dom = eval_obj(m.dom, env);
      SetObject cod = eval_obj(m.obj, env);
      std::vector<std::pair<Value, Value>> t;
      auto rule = [](const Value& v) -> std::optional<Value> {
        if (!v.is(Value::Tag::Pair) || !v.kid(1).is(Value::Tag::List)) return std::nullopt;
        std::vector<Value> items{v.kid(0)};
        for (const Value& k : v.kid(1).kids()) items.push_back(k);
        return Value::list(items);
      };
      for (const Value& v : dom.elems) t.emplace_back(v, *rule(v));
      out = table_morphism(dom, cod, std::move(t), "cons");
      out.rule = rule;
      break;
    }
    case GeoMor::Kind::Fold: {
      SetMorphism nil_img = eval_mor(m.nil_image, env);
      if (nil_img.dom.elems.size() != 1)
        fail(ErrorKind::UnmappedConstruct, "fold nil image domain not a point");
      out = recursor_fillin(eval_obj(m.obj, env), eval_obj(m.cod, env),
                            nil_img.apply(nil_img.dom.elems[0]), eval_mor(m.cons_alg, env));
      break;
    }
    case GeoMor::Kind::PFold: {
      out = param_recursor_fillin(eval_obj(m.dom, env), eval_obj(m.cod, env),
                                  eval_mor(m.nil_image, env), eval_mor(m.cons_alg, env));
      break;
    }
    case GeoMor::Kind::EqIncl: {
      SetObject dom = eval_obj(m.obj, env);
      SetObject cod = eval_obj(m.dom, env);
      std::vector<std::pair<Value, Value>> t;
      for (const Value& v : dom.elems) t.emplace_back(v, v);
      out = table_morphism(dom, cod, std::move(t), "eq<=");
      break;
    }
    case GeoMor::Kind::Inverse: {
      auto inv = invert_morphism(eval_mor(m.a, env));
      if (!inv) fail(ErrorKind::UnmappedConstruct, "inverse of a non-iso construct morphism");
      out = *inv;
      break;
    }
    case GeoMor::Kind::Const:
      out = m.value;
      break;
  }
  if (ground)
    env.ground->mors.emplace(mp.get(), out);
  else
    env.mor_memo.emplace(mp.get(), out);
  return out;
}

SetObject eval_obj(const GeoObjPtr& op, const GeoEnv& env) {
  bool ground = env.ground && !obj_depends_on_adjoined_c(op, env.ground);
  if (ground) {
    auto hit = env.ground->objs.find(op.get());
    if (hit != env.ground->objs.end()) return hit->second;
  }
  auto hit = env.obj_memo.find(op.get());
  if (hit != env.obj_memo.end()) return hit->second;
  const GeoObj& o = *op;
  SetObject out;
  switch (o.kind) {
    case GeoObj::Kind::Base:
      if (!env.base) fail(ErrorKind::UnmappedConstruct, "no base model for sort " + o.name);
      out = env.base->node(o.name);
      break;
    case GeoObj::Kind::Adjoined:
      if (!env.sorts || !env.sorts->count(o.name))
        fail(ErrorKind::UnmappedConstruct, "unbound sort " + o.name);
      out = env.sorts->at(o.name);
      break;
    case GeoObj::Kind::One:
      out = terminal_object();
      break;
    case GeoObj::Kind::Zero:
      out = initial_object();
      break;
    case GeoObj::Kind::Pb:
      out = pullback_object(eval_mor(o.f, env), eval_mor(o.g, env), env.depth);
      break;
    case GeoObj::Kind::Po:
      out = pushout_object(eval_mor(o.f, env), eval_mor(o.g, env), env.depth);
      break;
    case GeoObj::Kind::ListOf:
      out = list_object(eval_obj(o.inner, env), env.depth);
      break;
    case GeoObj::Kind::Eq: {
      SetMorphism a = eval_mor(o.f, env), b = eval_mor(o.g, env);
      std::vector<Value> elems;
      for (const Value& v : a.dom.elems)
        if (a.apply(v) == b.apply(v)) elems.push_back(v);
      out = finite_set(std::move(elems), "eq");
      out.finite = a.dom.finite;
      out.closed = a.dom.closed;
      out.depth = a.dom.depth;
      break;
    }
    case GeoObj::Kind::Const:
      out = o.value;
      break;
  }
  if (ground)
    env.ground->objs.emplace(op.get(), out);
  else
    env.obj_memo.emplace(op.get(), out);
  return out;
}

bool obj_depends_on_adjoined_c(const GeoObjPtr& o, GroundCache* c) {
  if (!o) return false;
  auto hit = c->adjoined.find(o.get());
  if (hit != c->adjoined.end()) return hit->second;
  bool dep = o->kind == GeoObj::Kind::Adjoined || obj_depends_on_adjoined_c(o->inner, c) ||
             mor_depends_on_adjoined_c(o->f, c) || mor_depends_on_adjoined_c(o->g, c);
  c->adjoined.emplace(o.get(), dep);
  return dep;
}

bool mor_depends_on_adjoined_c(const GeoMorPtr& m, GroundCache* c) {
  if (!m) return false;
  auto hit = c->adjoined.find(m.get());
  if (hit != c->adjoined.end()) return hit->second;
  bool dep = m->kind == GeoMor::Kind::AdjoinedFun;
  if (!dep)
    for (const GeoMorPtr& p : {m->a, m->b, m->nil_image, m->cons_alg, m->param_map})
      dep = dep || mor_depends_on_adjoined_c(p, c);
  if (!dep)
    for (const GeoObjPtr& p : {m->obj, m->dom, m->cod})
      dep = dep || obj_depends_on_adjoined_c(p, c);
  c->adjoined.emplace(m.get(), dep);
  return dep;
}

bool obj_depends_on_adjoined(const GeoObjPtr& o);

bool mor_depends_on_adjoined(const GeoMorPtr& m) {
  if (!m) return false;
  if (m->kind == GeoMor::Kind::AdjoinedFun) return true;
  for (const GeoMorPtr& p : {m->a, m->b, m->nil_image, m->cons_alg, m->param_map})
    if (mor_depends_on_adjoined(p)) return true;
  for (const GeoObjPtr& p : {m->obj, m->dom, m->cod})
    if (obj_depends_on_adjoined(p)) return true;
  return false;
}

bool obj_depends_on_adjoined(const GeoObjPtr& o) {
  if (!o) return false;
  if (o->kind == GeoObj::Kind::Adjoined) return true;
  if (obj_depends_on_adjoined(o->inner)) return true;
  return mor_depends_on_adjoined(o->f) || mor_depends_on_adjoined(o->g);
}

}  // namespace

std::vector<NormalStep> normalize(const GeometricExtension& g) {
  std::vector<NormalStep> out;
  for (const SimpleStep& s : g.steps) {
    switch (s.kind) {
      case SimpleStep::Kind::PrimitiveSort: {
        NormalStep n;
        n.kind = NormalStep::Kind::TorsorFiniteSets;
        n.name = s.name;
        out.push_back(n);
        break;
      }
      case SimpleStep::Kind::FunctionalExtension: {
        NormalStep t;
        t.kind = NormalStep::Kind::TorsorFinPoset;
        t.name = s.name;
        t.x = s.h0;
        t.y = s.h1;
        out.push_back(t);
        NormalStep sv;
        sv.kind = NormalStep::Kind::Invert;
        sv.name = s.name;
        sv.role = 1;  // single-valuedness first; observationally irrelevant
        out.push_back(sv);
        NormalStep tot;
        tot.kind = NormalStep::Kind::Invert;
        tot.name = s.name;
        tot.role = 2;
        out.push_back(tot);
        break;
      }
      case SimpleStep::Kind::GeometricQuotient: {
        NormalStep n;
        n.kind = NormalStep::Kind::Invert;
        n.phi = s.phi;
        n.name = s.name;
        out.push_back(n);
        break;
      }
    }
  }
  return out;
}

namespace {

struct Subst {
  const GeometricExtension* dict;   // constructs for the new base
  const Homomorphism* hom;          // old base items -> widened items
  mutable std::map<const GeoObj*, GeoObjPtr> objs;
  mutable std::map<const GeoMor*, GeoMorPtr> mors;
};

GeoObjPtr subst_obj(const GeoObjPtr& o, const Subst& s);

GeoMorPtr subst_mor(const GeoMorPtr& m, const Subst& s) {
  if (!m) return m;
  auto hit = s.mors.find(m.get());
  if (hit != s.mors.end()) return hit->second;
  GeoMorPtr out;
  if (m->kind == GeoMor::Kind::BaseEdge) {
    out = s.dict->morphisms.at(s.hom->edge(m->name));
  } else {
    GeoMor copy = *m;
    copy.obj = subst_obj(m->obj, s);
    copy.dom = subst_obj(m->dom, s);
    copy.cod = subst_obj(m->cod, s);
    copy.a = subst_mor(m->a, s);
    copy.b = subst_mor(m->b, s);
    copy.nil_image = subst_mor(m->nil_image, s);
    copy.cons_alg = subst_mor(m->cons_alg, s);
    copy.param_map = subst_mor(m->param_map, s);
    out = mk_mor(std::move(copy));
  }
  s.mors.emplace(m.get(), out);
  return out;
}

GeoObjPtr subst_obj(const GeoObjPtr& o, const Subst& s) {
  if (!o) return o;
  auto hit = s.objs.find(o.get());
  if (hit != s.objs.end()) return hit->second;
  GeoObjPtr out;
  if (o->kind == GeoObj::Kind::Base) {
    out = s.dict->objects.at(s.hom->node(o->name));
  } else {
    GeoObj copy = *o;
    copy.f = subst_mor(o->f, s);
    copy.g = subst_mor(o->g, s);
    copy.inner = subst_obj(o->inner, s);
    out = mk_obj(std::move(copy));
  }
  s.objs.emplace(o.get(), out);
  return out;
}

}  // namespace

GeometricExtension pullback_gext(const GeometricExtension& g, const ContextMap& h) {
  // constructs of the widened context over the new base
  GeometricExtension dict = compile_geometric(h.dom, h.widened);
  if (!dict.steps.empty())
    fail(ErrorKind::UnmappedConstruct, "pullback witness adjoins non-derived structure");
  Subst s{&dict, &h.hom, {}, {}};
  GeometricExtension out;
  out.base_name = h.dom->name;
  for (const SimpleStep& st : g.steps) {
    SimpleStep t = st;
    t.h0 = subst_obj(st.h0, s);
    t.h1 = subst_obj(st.h1, s);
    t.phi = subst_mor(st.phi, s);
    out.steps.push_back(std::move(t));
  }
  for (const auto& [n, o] : g.objects) out.objects[n] = subst_obj(o, s);
  for (const auto& [e, m] : g.morphisms) out.morphisms[e] = subst_mor(m, s);
  return out;
}

std::string InstantiatedTheory::text() const {
  std::ostringstream os;
  os << "ausk-v1 instantiated-theory base=" << base.ctx->name << " depth=" << depth << "\n";
  GeoEnv env{&base, nullptr, nullptr, depth, {}, {}};
  for (const SimpleStep& s : ext.steps) {
    os << "  " << s.text();
    if (s.kind == SimpleStep::Kind::FunctionalExtension && !obj_depends_on_adjoined(s.h0) &&
        !obj_depends_on_adjoined(s.h1)) {
      os << "  grounded " << eval_obj(s.h0, env).text() << " -> " << eval_obj(s.h1, env).text();
    }
    os << "\n";
  }
  return os.str();
}

InstantiatedTheory instantiate(const GeometricExtension& g, const Model& m) {
  if (!m.strict()) fail(ErrorKind::NonStrictInput, "instantiate needs a strict base model");
  InstantiatedTheory t;
  t.ext = g;
  t.base = m;
  t.depth = m.depth;
  GeoEnv env{&m, nullptr, nullptr, m.depth, {}, {}};
  for (const SimpleStep& s : g.steps) {
    auto require_finite = [&](const GeoObjPtr& o) {
      if (!o || obj_depends_on_adjoined(o)) return;
      SetObject v = eval_obj(o, env);
      if (!v.closed)
        fail(ErrorKind::NonFiniteConstruct,
             "construct " + o->text() + " is not finitely realizable at depth " +
                 std::to_string(m.depth));
    };
    if (s.kind == SimpleStep::Kind::FunctionalExtension) {
      require_finite(s.h0);
      require_finite(s.h1);
    }
  }
  return t;
}

std::string Point::text() const {
  std::ostringstream os;
  for (const auto& [n, sset] : sorts) os << "sort " << n << " = " << sset.text() << "; ";
  for (const auto& [n, f] : funs) os << "fun " << n << " = " << f.text() << "; ";
  std::string s = os.str();
  return s.empty() ? "(trivial point)" : s;
}

namespace {

struct PointState {
  std::map<Name, SetObject> sorts;
  std::map<Name, SetMorphism> funs;
};

// depth-first over the remaining simple steps
void points_dfs(const InstantiatedTheory& t, const Settings& s, size_t i, PointState st,
                std::vector<Point>& out) {
  if (i == t.ext.steps.size()) {
    out.push_back(Point{st.sorts, st.funs});
    return;
  }
  const SimpleStep& step = t.ext.steps[i];
  GeoEnv env{&t.base, &st.sorts, &st.funs, t.depth, {}, {}};
  switch (step.kind) {
    case SimpleStep::Kind::PrimitiveSort: {
      for (const SetObject& sub : all_subsets(s.universe, s.bound)) {
        PointState next = st;
        next.sorts[step.name] = sub;
        points_dfs(t, s, i + 1, std::move(next), out);
      }
      break;
    }
    case SimpleStep::Kind::FunctionalExtension: {
      SetObject h0 = eval_obj(step.h0, env), h1 = eval_obj(step.h1, env);
      if (!h0.closed || !h1.closed)
        fail(ErrorKind::NonFiniteConstruct, "function symbol " + step.name +
                                                " ranges over a non-finite construct");
      for (const SetMorphism& f : all_functions(h0, h1)) {
        PointState next = st;
        SetMorphism g = f;
        g.desc = step.name;
        next.funs[step.name] = std::move(g);
        points_dfs(t, s, i + 1, std::move(next), out);
      }
      break;
    }
    case SimpleStep::Kind::GeometricQuotient: {
      SetMorphism phi = eval_mor(step.phi, env);
      if (!invert_morphism(phi)) return;  // constraint fails, prune
      points_dfs(t, s, i + 1, std::move(st), out);
      break;
    }
  }
}

}  // namespace

std::vector<Point> enumerate_points(const InstantiatedTheory& t, const Settings& s,
                                    ExecMode mode) {
  // apply leading constraints once, then partition on the first branching step
  size_t lead = 0;
  PointState st0;
  while (lead < t.ext.steps.size() &&
         t.ext.steps[lead].kind == SimpleStep::Kind::GeometricQuotient) {
    GeoEnv env{&t.base, &st0.sorts, &st0.funs, t.depth, {}, {}};
    SetMorphism phi = eval_mor(t.ext.steps[lead].phi, env);
    if (!invert_morphism(phi)) return {};
    ++lead;
  }
  if (lead == t.ext.steps.size()) return {Point{}};
  const SimpleStep& first = t.ext.steps[lead];
  if (first.kind == SimpleStep::Kind::PrimitiveSort) {
    auto subs = all_subsets(s.universe, s.bound);
    return indexed_collect<Point>(subs.size(), mode, [&](size_t i) {
      std::vector<Point> out;
      PointState st = st0;
      st.sorts[first.name] = subs[i];
      points_dfs(t, s, lead + 1, std::move(st), out);
      return out;
    });
  }
  GeoEnv env{&t.base, &st0.sorts, &st0.funs, t.depth, {}, {}};
  SetObject h0 = eval_obj(first.h0, env), h1 = eval_obj(first.h1, env);
  if (!h0.closed || !h1.closed)
    fail(ErrorKind::NonFiniteConstruct,
         "function symbol " + first.name + " ranges over a non-finite construct");
  auto fns = all_functions(h0, h1);
  return indexed_collect<Point>(fns.size(), mode, [&](size_t i) {
    std::vector<Point> out;
    PointState st = st0;
    SetMorphism g = fns[i];
    g.desc = first.name;
    st.funs[first.name] = std::move(g);
    points_dfs(t, s, lead + 1, std::move(st), out);
    return out;
  });
}

namespace {

struct NormState {
  PointState st;
  // graphs adjoined by torsor steps, awaiting their invert steps
  std::map<Name, std::vector<std::pair<Value, Value>>> graphs;
  std::map<Name, std::pair<SetObject, SetObject>> graph_types;
};

void norm_dfs(const InstantiatedTheory& t, const std::vector<NormalStep>& norm, const Settings& s,
              size_t i, NormState st, std::vector<Point>& out) {
  if (i == norm.size()) {
    out.push_back(Point{st.st.sorts, st.st.funs});
    return;
  }
  const NormalStep& step = norm[i];
  GeoEnv env{&t.base, &st.st.sorts, &st.st.funs, t.depth, {}, {}};
  switch (step.kind) {
    case NormalStep::Kind::TorsorFiniteSets: {
      for (const SetObject& sub : all_subsets(s.universe, s.bound)) {
        NormState next = st;
        next.st.sorts[step.name] = sub;
        norm_dfs(t, norm, s, i + 1, std::move(next), out);
      }
      break;
    }
    case NormalStep::Kind::TorsorFinPoset: {
      SetObject x = eval_obj(step.x, env), y = eval_obj(step.y, env);
      if (!x.closed || !y.closed)
        fail(ErrorKind::NonFiniteConstruct, "torsor poset over a non-finite construct");
      // an ideal of the finite poset fin(x*y) is determined by its top: a
      // subobject of x*y, the candidate graph
      std::vector<std::pair<Value, Value>> pairs;
      for (const Value& a : x.elems)
        for (const Value& b : y.elems) pairs.emplace_back(a, b);
      const size_t n = pairs.size();
      if (n > 20) fail(ErrorKind::NonFiniteConstruct, "graph search space too large");
      for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
        NormState next = st;
        std::vector<std::pair<Value, Value>> graph;
        for (size_t k = 0; k < n; ++k)
          if (mask & (uint64_t{1} << k)) graph.push_back(pairs[k]);
        next.graphs[step.name] = std::move(graph);
        next.graph_types[step.name] = {x, y};
        norm_dfs(t, norm, s, i + 1, std::move(next), out);
      }
      break;
    }
    case NormalStep::Kind::Invert: {
      if (step.role == 1) {  // single-valuedness of the adjoined graph
        const auto& graph = st.graphs.at(step.name);
        for (size_t a = 0; a < graph.size(); ++a)
          for (size_t b = a + 1; b < graph.size(); ++b)
            if (graph[a].first == graph[b].first) return;
        norm_dfs(t, norm, s, i + 1, std::move(st), out);
      } else if (step.role == 2) {  // totality; then the graph becomes a function
        auto graph = st.graphs.at(step.name);
        const auto& [x, y] = st.graph_types.at(step.name);
        if (graph.size() != x.elems.size()) return;
        NormState next = st;
        next.st.funs[step.name] = table_morphism(x, y, std::move(graph), step.name);
        next.graphs.erase(step.name);
        next.graph_types.erase(step.name);
        norm_dfs(t, norm, s, i + 1, std::move(next), out);
      } else {
        SetMorphism phi = eval_mor(step.phi, env);
        if (!invert_morphism(phi)) return;
        norm_dfs(t, norm, s, i + 1, std::move(st), out);
      }
      break;
    }
  }
}

}  // namespace

std::vector<Point> enumerate_points_normalized(const InstantiatedTheory& t,
                                               const std::vector<NormalStep>& norm,
                                               const Settings& s, ExecMode mode) {
  (void)mode;
  std::vector<Point> out;
  norm_dfs(t, norm, s, 0, NormState{}, out);
  std::sort(out.begin(), out.end(),
            [](const Point& a, const Point& b) { return a.text() < b.text(); });
  return out;
}

Model point_to_model(const ContextPtr& ext, const InstantiatedTheory& t, const Point& p) {
  Assignment asg;
  for (const Name& n : ext->primitive_nodes) {
    if (t.base.nodes.count(n))
      asg.nodes[n] = t.base.node(n);
    else
      asg.nodes[n] = p.sorts.at(n);
  }
  for (const Name& e : ext->primitive_edges) {
    if (t.base.edges.count(e))
      asg.edges[e] = t.base.edge(e);
    else
      asg.edges[e] = p.funs.at(e);
  }
  return eval_strict_model(ext, asg, t.depth);
}

}  // namespace ausk
