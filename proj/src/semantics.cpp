#include "ausk/semantics.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace ausk {

namespace {

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

}  // namespace

std::string Settings::echo() const {
  std::ostringstream os;
  os << "universe={" << join(universe, ",") << "} bound=" << bound << " depth=" << depth;
  return os.str();
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Canonical: return "canonical";
    case Verdict::NonCanonicalUniversal: return "universal";
    case Verdict::Invalid: return "invalid";
  }
  return "?";
}

bool Model::strict() const {
  for (const auto& [n, v] : verdicts)
    if (v != Verdict::Canonical) return false;
  return true;
}

const SetObject& Model::node(const Name& n) const {
  auto it = nodes.find(n);
  if (it == nodes.end()) fail(ErrorKind::DanglingReference, "model has no node " + n);
  return it->second;
}

const SetMorphism& Model::edge(const Name& e) const {
  auto it = edges.find(e);
  if (it == edges.end()) fail(ErrorKind::DanglingReference, "model has no edge " + e);
  return it->second;
}

std::string Model::text() const {
  std::ostringstream os;
  os << "model of " << (ctx ? ctx->name : "?") << " depth=" << depth << "\n";
  for (const auto& [n, s] : nodes) os << "  node " << n << " = " << s.text() << "\n";
  for (const auto& [e, m] : edges) {
    if (ctx && ctx->derived.identities.count(ctx->derived.edge(e).src) &&
        ctx->derived.identities.at(ctx->derived.edge(e).src) == e)
      continue;  // identities carry no information
    os << "  edge " << e << " = " << m.text() << "\n";
  }
  for (const auto& [a, v] : verdicts) os << "  universal " << a << " : " << verdict_name(v) << "\n";
  return os.str();
}

// --- canonical universal interpretation -------------------------------------

namespace {

struct InterpCache {
  std::unordered_map<std::string, UniversalInterp> map;
};

InterpCache& interp_cache() {
  static InterpCache c;
  return c;
}

std::string morphism_key(const SetMorphism& m) {
  return m.dom.text() + "|" + m.cod.text() + "|" + m.text();
}

SetMorphism const_unit_map(const SetObject& dom, const SetObject& one) {
  std::vector<std::pair<Value, Value>> t;
  for (const Value& v : dom.elems) t.emplace_back(v, one.elems.at(0));
  SetMorphism m = table_morphism(dom, one, std::move(t), "!");
  const Value u = one.elems.at(0);
  m.rule = [u](const Value&) -> std::optional<Value> { return u; };
  return m;
}

UniversalInterp interpret_list(const SetObject& base, const SetObject& one,
                               const SetMorphism& base_to_terminal, int depth) {
  UniversalInterp out;
  out.apex = list_object(base, depth);
  SetMorphism l2t = const_unit_map(out.apex, one);
  out.product = pullback_object(base_to_terminal, l2t, depth);
  // projections of the companion product
  std::vector<std::pair<Value, Value>> t1, t2, tc;
  for (const Value& p : out.product.elems) {
    t1.emplace_back(p, p.kid(0));
    t2.emplace_back(p, p.kid(1));
    std::vector<Value> items;
    items.push_back(p.kid(0));
    for (const Value& k : p.kid(1).kids()) items.push_back(k);
    tc.emplace_back(p, Value::list(items));
  }
  out.part["a2t"] = l2t;
  out.part["p1"] = table_morphism(out.product, base, std::move(t1), "fst");
  out.part["p1"].rule = [](const Value& v) -> std::optional<Value> {
    if (v.is(Value::Tag::Pair)) return v.kid(0);
    return std::nullopt;
  };
  out.part["p2"] = table_morphism(out.product, out.apex, std::move(t2), "snd");
  out.part["p2"].rule = [](const Value& v) -> std::optional<Value> {
    if (v.is(Value::Tag::Pair)) return v.kid(1);
    return std::nullopt;
  };
  std::vector<std::pair<Value, Value>> tn{{one.elems.at(0), Value::list({})}};
  out.part["nil"] = table_morphism(one, out.apex, std::move(tn), "nil");
  out.part["cons"] = table_morphism(out.product, out.apex, std::move(tc), "cons");
  out.part["cons"].rule = [](const Value& v) -> std::optional<Value> {
    if (!v.is(Value::Tag::Pair) || !v.kid(1).is(Value::Tag::List)) return std::nullopt;
    std::vector<Value> items;
    items.push_back(v.kid(0));
    for (const Value& k : v.kid(1).kids()) items.push_back(k);
    return Value::list(items);
  };
  return out;
}

}  // namespace

UniversalInterp interpret_universal(const Universal& u, const std::map<Name, SetObject>& nodes,
                                    const std::map<Name, SetMorphism>& edges, int depth) {
  auto need_edge = [&](const Name& e) -> const SetMorphism& {
    auto it = edges.find(e);
    if (it == edges.end()) fail(ErrorKind::DanglingReference, "interp: missing edge " + e);
    return it->second;
  };
  auto need_node = [&](const Name& n) -> const SetObject& {
    auto it = nodes.find(n);
    if (it == nodes.end()) fail(ErrorKind::DanglingReference, "interp: missing node " + n);
    return it->second;
  };
  std::string key;
  {
    std::ostringstream os;
    os << universal_kind_name(u.kind) << "#" << depth << "#";
    switch (u.kind) {
      case UniversalKind::Terminal:
      case UniversalKind::Initial:
        break;
      case UniversalKind::Pullback:
      case UniversalKind::Pushout:
        os << morphism_key(need_edge(u.f)) << "#" << morphism_key(need_edge(u.g));
        break;
      case UniversalKind::List:
        os << need_node(u.base).text() << "#" << morphism_key(need_edge(u.base_to_terminal));
        break;
    }
    key = os.str();
  }
  {
    UniversalInterp hit;
    bool found = false;
#pragma omp critical(ausk_interp_cache)
    {
      auto it = interp_cache().map.find(key);
      if (it != interp_cache().map.end()) {
        hit = it->second;
        found = true;
      }
    }
    if (found) return hit;
  }

  UniversalInterp out;
  switch (u.kind) {
    case UniversalKind::Terminal:
      out.apex = terminal_object();
      break;
    case UniversalKind::Initial:
      out.apex = initial_object();
      break;
    case UniversalKind::Pullback: {
      const SetMorphism &f = need_edge(u.f), &g = need_edge(u.g);
      out.apex = pullback_object(f, g, depth);
      std::vector<std::pair<Value, Value>> t1, t2;
      for (const Value& p : out.apex.elems) {
        t1.emplace_back(p, p.kid(0));
        t2.emplace_back(p, p.kid(1));
      }
      out.part["proj1"] = table_morphism(out.apex, f.dom, std::move(t1), "fst");
      out.part["proj1"].rule = [](const Value& v) -> std::optional<Value> {
        if (v.is(Value::Tag::Pair)) return v.kid(0);
        return std::nullopt;
      };
      out.part["proj2"] = table_morphism(out.apex, g.dom, std::move(t2), "snd");
      out.part["proj2"].rule = [](const Value& v) -> std::optional<Value> {
        if (v.is(Value::Tag::Pair)) return v.kid(1);
        return std::nullopt;
      };
      break;
    }
    case UniversalKind::Pushout: {
      const SetMorphism &f = need_edge(u.f), &g = need_edge(u.g);
      out.apex = pushout_object(f, g, depth);
      std::vector<std::pair<Value, Value>> t1, t2;
      for (const auto& [member, cls] : pushout_canonical_classes(f, g)) {
        if (member.is(Value::Tag::InjL))
          t1.emplace_back(member.kid(0), cls);
        else
          t2.emplace_back(member.kid(0), cls);
      }
      out.part["inj1"] = table_morphism(f.cod, out.apex, std::move(t1), "inl;q");
      out.part["inj2"] = table_morphism(g.cod, out.apex, std::move(t2), "inr;q");
      break;
    }
    case UniversalKind::List: {
      const SetObject& base = need_node(u.base);
      const SetObject& one = need_node(u.terminal_apex);
      if (one.elems.size() != 1)
        fail(ErrorKind::InvalidModel, "list over a non-singleton terminal interpretation");
      out = interpret_list(base, one, need_edge(u.base_to_terminal), depth);
      break;
    }
  }
#pragma omp critical(ausk_interp_cache)
  interp_cache().map.emplace(key, out);
  return out;
}

// --- fillin evaluation -------------------------------------------------------

SetMorphism recursor_fillin(const SetObject& list_obj, const SetObject& target,
                            const Value& nil_image, const SetMorphism& cons_alg) {
  SetMorphism r;
  r.dom = list_obj;
  r.cod = target;
  r.desc = "fold";
  auto alg = std::make_shared<const SetMorphism>(cons_alg);
  Value b0 = nil_image;
  auto eval = [alg, b0](const Value& v) -> std::optional<Value> {
    if (!v.is(Value::Tag::List)) return std::nullopt;
    Value acc = b0;
    for (auto it = v.kids().rbegin(); it != v.kids().rend(); ++it) {
      auto next = alg->try_apply(Value::pair(*it, acc));
      if (!next) return std::nullopt;
      acc = *next;
    }
    return acc;
  };
  for (const Value& v : list_obj.elems) {
    auto res = eval(v);
    if (!res) fail(ErrorKind::InvalidModel, "fold undefined at " + v.text());
    r.table.emplace_back(v, *res);
  }
  std::sort(r.table.begin(), r.table.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  r.rule = eval;
  return r;
}

SetMorphism param_recursor_fillin(const SetObject& dom_product, const SetObject& target,
                                  const SetMorphism& param_map, const SetMorphism& cons_alg) {
  SetMorphism r;
  r.dom = dom_product;
  r.cod = target;
  r.desc = "pfold";
  auto b = std::make_shared<const SetMorphism>(param_map);
  auto alg = std::make_shared<const SetMorphism>(cons_alg);
  auto eval = [b, alg](const Value& v) -> std::optional<Value> {
    if (!v.is(Value::Tag::Pair) || !v.kid(0).is(Value::Tag::List)) return std::nullopt;
    auto acc = b->try_apply(v.kid(1));
    if (!acc) return std::nullopt;
    for (auto it = v.kid(0).kids().rbegin(); it != v.kid(0).kids().rend(); ++it) {
      acc = alg->try_apply(Value::pair(*it, *acc));
      if (!acc) return std::nullopt;
    }
    return acc;
  };
  for (const Value& v : dom_product.elems) {
    auto res = eval(v);
    if (!res) fail(ErrorKind::InvalidModel, "pfold undefined at " + v.text());
    r.table.emplace_back(v, *res);
  }
  std::sort(r.table.begin(), r.table.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  r.rule = eval;
  return r;
}

void eval_env_add_node(EvalEnv& env, const Name& n, const SetObject& s) {
  env.nodes[n] = s;
  env.edges[identity_edge_name(n)] = identity_morphism(s);
}

namespace {

void check_triangle_holds(const EvalEnv& env, const Triangle& t) {
  const SetMorphism &f = env.edges.at(t.f), &g = env.edges.at(t.g), &h = env.edges.at(t.h);
  for (const Value& x : f.dom.elems) {
    auto fx = f.try_apply(x);
    if (!fx) continue;  // beyond the realized fragment
    auto lhs = g.try_apply(*fx);
    auto rhs = h.try_apply(x);
    if (!lhs || !rhs) continue;
    if (!(*lhs == *rhs))
      fail(ErrorKind::CommutativityViolation,
           "commutativity " + t.f + ";" + t.g + "=" + t.h + " fails at " + x.text());
  }
}

}  // namespace

// Applies one non-primitive step to the environment. Throws on violations.
void eval_model_step(EvalEnv& env, const Step& step, int depth) {
  if (auto* p = std::get_if<AddUniversal>(&step)) {
    const Universal& u = p->u;
    UniversalInterp it = interpret_universal(u, env.nodes, env.edges, depth);
    eval_env_add_node(env, u.apex, it.apex);
    env.verdicts[u.apex] = Verdict::Canonical;
    switch (u.kind) {
      case UniversalKind::Terminal:
      case UniversalKind::Initial:
        break;
      case UniversalKind::Pullback:
        env.edges[u.proj1] = it.part.at("proj1");
        env.edges[u.proj2] = it.part.at("proj2");
        break;
      case UniversalKind::Pushout:
        env.edges[u.proj1] = it.part.at("inj1");
        env.edges[u.proj2] = it.part.at("inj2");
        break;
      case UniversalKind::List:
        eval_env_add_node(env, u.product_apex, it.product);
        env.verdicts[u.product_apex] = Verdict::Canonical;
        env.edges[u.apex_to_terminal] = it.part.at("a2t");
        env.edges[u.proj1] = it.part.at("p1");
        env.edges[u.proj2] = it.part.at("p2");
        env.edges[u.nil] = it.part.at("nil");
        env.edges[u.cons] = it.part.at("cons");
        break;
    }
  } else if (auto* p = std::get_if<AddCommutativity>(&step)) {
    check_triangle_holds(env, p->t);
  } else if (auto* p = std::get_if<AdjoinComposite>(&step)) {
    env.edges[p->result] = compose_morphisms(env.edges.at(p->f), env.edges.at(p->g));
  } else if (auto* p = std::get_if<DeduceCommutativity>(&step)) {
    check_triangle_holds(env, p->t);
  } else if (auto* p = std::get_if<DeclareFillin>(&step)) {
    const FillinSpec& fs = p->spec;
    switch (fs.kind) {
      case FillinKind::TerminalFrom: {
        const SetObject& one = env.nodes.at(fs.universal_apex);
        if (one.elems.size() != 1)
          fail(ErrorKind::InvalidModel, "terminal interpretation is not a singleton");
        env.edges[p->result] = const_unit_map(env.nodes.at(fs.source), one);
        break;
      }
      case FillinKind::InitialTo: {
        SetMorphism m;
        m.dom = env.nodes.at(fs.universal_apex);
        m.cod = env.nodes.at(fs.target);
        m.desc = "?";
        if (!m.dom.elems.empty())
          fail(ErrorKind::InvalidModel, "initial interpretation is not empty");
        env.edges[p->result] = m;
        break;
      }
      case FillinKind::PullbackPair: {
        const SetMorphism &l1 = env.edges.at(fs.leg1), &l2 = env.edges.at(fs.leg2);
        const SetObject& apex = env.nodes.at(fs.universal_apex);
        SetMorphism m;
        m.dom = l1.dom;
        m.cod = apex;
        m.desc = "<" + fs.leg1 + "," + fs.leg2 + ">";
        SetMorphism a = l1, b = l2;
        m.rule = [a, b](const Value& v) -> std::optional<Value> {
          auto x = a.try_apply(v);
          auto y = b.try_apply(v);
          if (!x || !y) return std::nullopt;
          return Value::pair(*x, *y);
        };
        for (const Value& z : m.dom.elems) {
          Value pr = Value::pair(l1.apply(z), l2.apply(z));
          if (!apex.contains(pr) && apex.closed)
            fail(ErrorKind::CommutativityViolation,
                 "pair fillin " + p->result + " misses the pullback at " + z.text());
          m.table.emplace_back(z, pr);
        }
        env.edges[p->result] = m;
        break;
      }
      case FillinKind::PushoutCopair: {
        const SetMorphism &l1 = env.edges.at(fs.leg1), &l2 = env.edges.at(fs.leg2);
        SetMorphism m;
        m.dom = env.nodes.at(fs.universal_apex);
        m.cod = l1.cod;
        m.desc = "[" + fs.leg1 + "," + fs.leg2 + "]";
        for (const Value& q : m.dom.elems) {
          // class representatives are cls(inl a) / cls(inr b)
          const Value& member = q.kid(0);
          Value out = member.is(Value::Tag::InjL) ? l1.apply(member.kid(0))
                                                  : l2.apply(member.kid(0));
          m.table.emplace_back(q, out);
        }
        env.edges[p->result] = m;
        break;
      }
      case FillinKind::ListFold: {
        const SetMorphism& nil_img = env.edges.at(fs.nil_image);
        Value b0 = nil_img.apply(nil_img.dom.elems.at(0));
        env.edges[p->result] = recursor_fillin(env.nodes.at(fs.universal_apex),
                                               env.nodes.at(fs.target), b0,
                                               env.edges.at(fs.cons_alg));
        break;
      }
      case FillinKind::ListFoldParam: {
        env.edges[p->result] =
            param_recursor_fillin(env.nodes.at(fs.domain_product), env.nodes.at(fs.target),
                                  env.edges.at(fs.nil_image), env.edges.at(fs.cons_alg));
        break;
      }
    }
  } else if (auto* p = std::get_if<FillinUniqueness>(&step)) {
    if (!env.edges.at(p->e1).same_graph(env.edges.at(p->e2)))
      fail(ErrorKind::CommutativityViolation, "fillin uniqueness fails: " + p->e1 + " = " + p->e2);
  } else if (auto* p = std::get_if<AdjoinInverse>(&step)) {
    auto inv = invert_morphism(env.edges.at(p->edge));
    if (!inv)
      fail(ErrorKind::CommutativityViolation, "adjoined inverse of non-iso edge " + p->edge);
    env.edges[p->result] = *inv;
  } else {
    fail(ErrorKind::UnsupportedStep, "eval_model_step cannot handle a primitive step");
  }
}

Model seal_model(const ContextPtr& ctx, EvalEnv env, int depth) {
  // strict models interpret object equalities as identities
  for (const Name& oe : ctx->derived.object_equalities) {
    const SetMorphism& m = env.edges.at(oe);
    if (!(m.dom == m.cod) || !is_identity_morphism(m))
      fail(ErrorKind::CommutativityViolation, "object equality " + oe + " is not an identity");
  }
  Model out;
  out.ctx = ctx;
  out.nodes = std::move(env.nodes);
  out.edges = std::move(env.edges);
  out.verdicts = std::move(env.verdicts);
  out.depth = depth;
  return out;
}

Model eval_strict_model(const ContextPtr& ctx, const Assignment& asg, int depth) {
  EvalEnv env;
  size_t used_nodes = 0, used_edges = 0;
  for (const Step& step : ctx->steps) {
    if (auto* p = std::get_if<AddPrimitiveNode>(&step)) {
      auto it = asg.nodes.find(p->name);
      if (it == asg.nodes.end())
        fail(ErrorKind::TypeMismatch, "assignment missing primitive node " + p->name);
      eval_env_add_node(env, p->name, it->second);
      ++used_nodes;
    } else if (auto* p = std::get_if<AddPrimitiveEdge>(&step)) {
      auto it = asg.edges.find(p->edge.id);
      if (it == asg.edges.end())
        fail(ErrorKind::TypeMismatch, "assignment missing primitive edge " + p->edge.id);
      const SetMorphism& m = it->second;
      if (!(m.dom == env.nodes.at(p->edge.src)) || !(m.cod == env.nodes.at(p->edge.tgt)))
        fail(ErrorKind::TypeMismatch, "assignment endpoints disagree for " + p->edge.id);
      env.edges[p->edge.id] = m;
      ++used_edges;
    } else {
      eval_model_step(env, step, depth);
    }
  }
  if (used_nodes != asg.nodes.size() || used_edges != asg.edges.size())
    fail(ErrorKind::TypeMismatch, "assignment covers items outside the primitive ones");
  return seal_model(ctx, std::move(env), depth);
}

Model extend_model_strict(const Model& m, const ContextPtr& wider) {
  if (!m.ctx->is_prefix_of(*wider))
    fail(ErrorKind::NotAnExtensionMap, "extend_model_strict: not a wider context");
  EvalEnv env{m.nodes, m.edges, m.verdicts};
  for (size_t i = m.ctx->steps.size(); i < wider->steps.size(); ++i) {
    const Step& step = wider->steps[i];
    if (std::holds_alternative<AddPrimitiveNode>(step) ||
        std::holds_alternative<AddPrimitiveEdge>(step))
      fail(ErrorKind::NonStrictInput, "cannot extend over new primitive items");
    eval_model_step(env, step, m.depth);
  }
  return seal_model(wider, std::move(env), m.depth);
}

namespace {

// names a non-primitive step adds to the environment (for enumeration undo)
void introduced_items(const Step& st, std::vector<Name>& nodes, std::vector<Name>& edges) {
  if (auto* p = std::get_if<AddUniversal>(&st)) {
    const Universal& u = p->u;
    nodes.push_back(u.apex);
    edges.push_back(identity_edge_name(u.apex));
    switch (u.kind) {
      case UniversalKind::Terminal:
      case UniversalKind::Initial:
        break;
      case UniversalKind::Pullback:
      case UniversalKind::Pushout:
        edges.push_back(u.proj1);
        edges.push_back(u.proj2);
        break;
      case UniversalKind::List:
        nodes.push_back(u.product_apex);
        edges.push_back(identity_edge_name(u.product_apex));
        for (const Name& e : {u.apex_to_terminal, u.proj1, u.proj2, u.nil, u.cons})
          edges.push_back(e);
        break;
    }
  } else if (auto* p = std::get_if<AdjoinComposite>(&st)) {
    edges.push_back(p->result);
  } else if (auto* p = std::get_if<DeclareFillin>(&st)) {
    edges.push_back(p->result);
  } else if (auto* p = std::get_if<AdjoinInverse>(&st)) {
    edges.push_back(p->result);
  }
}

}  // namespace

namespace {

struct ModelWalk {
  const ContextPtr& ctx;
  const Settings& s;
  const Assignment* pinned;
  const std::map<Name, SetObject>& node_choice;
  const std::function<bool(Model)>& sink;  // returns false to stop
  EvalEnv env;
  bool stopped = false;

  void undo(const std::vector<Name>& nodes, const std::vector<Name>& edges) {
    for (const Name& n : nodes) env.nodes.erase(n);
    for (const Name& e : edges) env.edges.erase(e);
  }

  void walk(size_t i) {
    if (stopped) return;
    if (i == ctx->steps.size()) {
      try {
        EvalEnv copy = env;
        if (!sink(seal_model(ctx, std::move(copy), s.depth))) stopped = true;
      } catch (const AuskError& e) {
        if (e.kind != ErrorKind::CommutativityViolation) throw;
      }
      return;
    }
    const Step& st = ctx->steps[i];
    if (auto* p = std::get_if<AddPrimitiveNode>(&st)) {
      eval_env_add_node(env, p->name, node_choice.at(p->name));
      walk(i + 1);
      undo({p->name}, {identity_edge_name(p->name)});
    } else if (auto* p = std::get_if<AddPrimitiveEdge>(&st)) {
      std::vector<SetMorphism> fs;
      if (pinned && pinned->edges.count(p->edge.id)) {
        const SetMorphism& pin = pinned->edges.at(p->edge.id);
        if (pin.dom == env.nodes.at(p->edge.src) && pin.cod == env.nodes.at(p->edge.tgt))
          fs.push_back(pin);
      } else {
        fs = all_functions(env.nodes.at(p->edge.src), env.nodes.at(p->edge.tgt));
      }
      for (SetMorphism& f : fs) {
        if (stopped) break;
        f.desc = p->edge.id;
        env.edges[p->edge.id] = std::move(f);
        walk(i + 1);
      }
      env.edges.erase(p->edge.id);
    } else {
      std::vector<Name> new_nodes, new_edges;
      introduced_items(st, new_nodes, new_edges);
      try {
        eval_model_step(env, st, s.depth);
      } catch (const AuskError& e) {
        undo(new_nodes, new_edges);
        if (e.kind == ErrorKind::CommutativityViolation) return;
        throw;
      }
      walk(i + 1);
      undo(new_nodes, new_edges);
      if (auto* pu = std::get_if<AddUniversal>(&st)) {
        env.verdicts.erase(pu->u.apex);
        if (pu->u.kind == UniversalKind::List) env.verdicts.erase(pu->u.product_apex);
      }
    }
  }
};

struct NodeChoiceSpace {
  std::vector<Name> prim_nodes;
  std::vector<std::vector<SetObject>> choices;
  size_t tasks = 1;

  NodeChoiceSpace(const ContextPtr& ctx, const Settings& s, const Assignment* pinned) {
    for (const Step& st : ctx->steps)
      if (auto* p = std::get_if<AddPrimitiveNode>(&st)) prim_nodes.push_back(p->name);
    const std::vector<SetObject> subsets = all_subsets(s.universe, s.bound);
    for (const Name& n : prim_nodes) {
      if (pinned && pinned->nodes.count(n))
        choices.push_back({pinned->nodes.at(n)});
      else
        choices.push_back(subsets);
    }
    for (const auto& c : choices) tasks *= c.size();
  }

  std::map<Name, SetObject> decode(size_t index) const {
    std::map<Name, SetObject> out;
    size_t rest = index;
    for (size_t i = prim_nodes.size(); i > 0; --i) {
      const auto& c = choices[i - 1];
      out[prim_nodes[i - 1]] = c[rest % c.size()];
      rest /= c.size();
    }
    return out;
  }
};

}  // namespace

std::vector<Model> enumerate_strict_models(const ContextPtr& ctx, const Settings& s,
                                           ExecMode mode, const Assignment* pinned) {
  NodeChoiceSpace space(ctx, s, pinned);
  auto run_task = [&](size_t index) {
    std::vector<Model> found;
    std::function<bool(Model)> sink = [&](Model m) {
      found.push_back(std::move(m));
      return true;
    };
    std::map<Name, SetObject> node_choice = space.decode(index);
    ModelWalk w{ctx, s, pinned, node_choice, sink, {}, false};
    w.walk(0);
    return found;
  };
  return indexed_collect<Model>(space.tasks, mode, run_task);
}

void for_each_strict_model(const ContextPtr& ctx, const Settings& s,
                           const std::function<bool(const Model&)>& visit,
                           const Assignment* pinned) {
  NodeChoiceSpace space(ctx, s, pinned);
  std::function<bool(Model)> sink = [&](Model m) { return visit(m); };
  for (size_t i = 0; i < space.tasks; ++i) {
    std::map<Name, SetObject> node_choice = space.decode(i);
    ModelWalk w{ctx, s, pinned, node_choice, sink, {}, false};
    w.walk(0);
    if (w.stopped) return;
  }
}

// --- strictness verdicts -----------------------------------------------------

std::optional<SetMorphism> comparison_component(const Universal& u, const UniversalInterp& canon,
                                                const Model& target,
                                                const std::map<Name, SetMorphism>& on_inputs) {
  const Sketch& sk = target.ctx->derived;
  const SetObject& actual = target.node(u.apex);
  auto twist = [&](const Name& node, const Value& v) -> std::optional<Value> {
    auto it = on_inputs.find(node);
    if (it == on_inputs.end()) return v;
    return it->second.try_apply(v);
  };
  std::vector<std::pair<Value, Value>> t;
  switch (u.kind) {
    case UniversalKind::Terminal: {
      if (actual.elems.size() != 1) return std::nullopt;
      t.emplace_back(Value::unit(), actual.elems[0]);
      break;
    }
    case UniversalKind::Initial: {
      if (!actual.elems.empty()) return std::nullopt;
      break;
    }
    case UniversalKind::Pullback: {
      const Name na = sk.edge(u.f).src, nb = sk.edge(u.g).src;
      const SetMorphism &p1 = target.edge(u.proj1), &p2 = target.edge(u.proj2);
      for (const Value& pr : canon.apex.elems) {
        auto a = twist(na, pr.kid(0));
        auto b = twist(nb, pr.kid(1));
        if (!a || !b) return std::nullopt;
        std::optional<Value> found;
        for (const Value& z : actual.elems) {
          if (p1.apply(z) == *a && p2.apply(z) == *b) {
            if (found) return std::nullopt;  // not unique
            found = z;
          }
        }
        if (!found) return std::nullopt;
        t.emplace_back(pr, *found);
      }
      if (t.size() != actual.elems.size()) return std::nullopt;
      break;
    }
    case UniversalKind::Pushout: {
      const Name na = sk.edge(u.f).tgt, nb = sk.edge(u.g).tgt;
      const SetMorphism &i1 = target.edge(u.proj1), &i2 = target.edge(u.proj2);
      for (const Value& q : canon.apex.elems) {
        const Value& member = q.kid(0);
        std::optional<Value> img;
        if (member.is(Value::Tag::InjL)) {
          auto a = twist(na, member.kid(0));
          if (!a) return std::nullopt;
          img = i1.try_apply(*a);
        } else {
          auto b = twist(nb, member.kid(0));
          if (!b) return std::nullopt;
          img = i2.try_apply(*b);
        }
        if (!img) return std::nullopt;
        t.emplace_back(q, *img);
      }
      std::vector<Value> imgs;
      for (auto& [k, v] : t) imgs.push_back(v);
      std::sort(imgs.begin(), imgs.end());
      imgs.erase(std::unique(imgs.begin(), imgs.end()), imgs.end());
      if (imgs.size() != t.size() || imgs.size() != actual.elems.size()) return std::nullopt;
      // the target injections must collapse everything the span relates;
      // members whose span images leave the realized fragment are beyond the
      // checking depth and are skipped, matching the quotient construction
      {
        const SetMorphism &f0 = target.edge(u.f), &g0 = target.edge(u.g);
        for (const Value& c : f0.dom.elems) {
          auto fa = f0.try_apply(c);
          auto gb = g0.try_apply(c);
          if (!fa || !gb) return std::nullopt;
          auto a = i1.try_apply(*fa);
          auto b = i2.try_apply(*gb);
          if (!a || !b) continue;
          if (!(*a == *b)) return std::nullopt;
        }
      }
      break;
    }
    case UniversalKind::List: {
      const SetMorphism& nil = target.edge(u.nil);
      const SetMorphism& cons = target.edge(u.cons);
      const SetMorphism &p1 = target.edge(u.proj1), &p2 = target.edge(u.proj2);
      const SetObject& prod = target.node(u.product_apex);
      const SetObject& one = target.node(u.terminal_apex);
      if (one.elems.size() != 1) return std::nullopt;
      std::map<Value, Value> phi;
      phi[Value::list({})] = nil.apply(one.elems[0]);
      for (const Value& lv : canon.apex.elems) {
        if (lv.kids().empty()) continue;
        std::vector<Value> tail_items(lv.kids().begin() + 1, lv.kids().end());
        auto pt = phi.find(Value::list(tail_items));
        if (pt == phi.end()) return std::nullopt;
        auto head = twist(u.base, lv.kid(0));
        if (!head) return std::nullopt;
        std::optional<Value> zv;
        for (const Value& z : prod.elems) {
          if (p1.apply(z) == *head && p2.apply(z) == pt->second) {
            zv = z;
            break;
          }
        }
        if (!zv) return std::nullopt;
        phi[lv] = cons.apply(*zv);
      }
      for (auto& [k, v] : phi) t.emplace_back(k, v);
      std::vector<Value> imgs;
      for (auto& [k, v] : t) imgs.push_back(v);
      std::sort(imgs.begin(), imgs.end());
      imgs.erase(std::unique(imgs.begin(), imgs.end()), imgs.end());
      if (imgs.size() != t.size()) return std::nullopt;
      break;
    }
  }
  SetMorphism cm = table_morphism(canon.apex, actual, std::move(t), "compare");
  return cm;
}

bool StrictnessReport::all_canonical() const {
  for (const auto& [n, v] : verdicts)
    if (v != Verdict::Canonical) return false;
  return problems.empty();
}

bool StrictnessReport::valid() const {
  for (const auto& [n, v] : verdicts)
    if (v == Verdict::Invalid) return false;
  return problems.empty();
}

std::string StrictnessReport::text() const {
  std::ostringstream os;
  os << "strictness depth=" << depth << "\n";
  for (const auto& [n, v] : verdicts) os << "  universal " << n << " : " << verdict_name(v) << "\n";
  for (const auto& p : problems) os << "  problem: " << p << "\n";
  return os.str();
}

StrictnessReport check_model(const Model& m, int depth) {
  StrictnessReport rep;
  rep.depth = depth;
  const Sketch& sk = m.ctx->derived;
  // well-typedness of every edge
  for (const auto& [id, e] : sk.edges) {
    auto it = m.edges.find(id);
    if (it == m.edges.end()) {
      rep.problems.push_back("missing interpretation for edge " + id);
      continue;
    }
    const SetMorphism& f = it->second;
    if (!(f.dom == m.node(e.src)) || !(f.cod == m.node(e.tgt))) {
      rep.problems.push_back("edge " + id + " endpoints disagree with node interpretations");
      continue;
    }
    bool defined_somewhere = f.dom.elems.empty();
    for (const Value& x : f.dom.elems) {
      auto y = f.try_apply(x);
      if (!y) continue;  // beyond the realized fragment
      defined_somewhere = true;
      if (f.cod.closed && !f.cod.contains(*y)) {
        rep.problems.push_back("edge " + id + " leaves its codomain at " + x.text());
        break;
      }
    }
    if (!defined_somewhere)
      rep.problems.push_back("edge " + id + " has no realized interpretation");
  }
  for (const auto& [n, ide] : sk.identities) {
    auto it = m.edges.find(ide);
    if (it == m.edges.end() || !is_identity_morphism(it->second))
      rep.problems.push_back("identity edge of " + n + " is not the identity");
  }
  for (const Triangle& t : sk.commutativities) {
    const SetMorphism &f = m.edge(t.f), &g = m.edge(t.g), &h = m.edge(t.h);
    for (const Value& x : f.dom.elems) {
      auto fx = f.try_apply(x);
      if (!fx) continue;
      auto lhs = g.try_apply(*fx);
      auto rhs = h.try_apply(x);
      if (!lhs || !rhs) continue;
      if (!(*lhs == *rhs)) {
        rep.problems.push_back("commutativity " + t.f + ";" + t.g + "=" + t.h + " fails at " +
                               x.text());
        break;
      }
    }
  }
  for (const Universal& u : sk.universals) {
    UniversalInterp canon = interpret_universal(u, m.nodes, m.edges, depth);
    bool canonical = m.node(u.apex) == canon.apex;
    if (canonical) {
      auto part_matches = [&](const char* role, const Name& edge) {
        return m.edge(edge).table == canon.part.at(role).table;
      };
      switch (u.kind) {
        case UniversalKind::Terminal:
        case UniversalKind::Initial:
          break;
        case UniversalKind::Pullback:
          canonical = part_matches("proj1", u.proj1) && part_matches("proj2", u.proj2);
          break;
        case UniversalKind::Pushout:
          canonical = part_matches("inj1", u.proj1) && part_matches("inj2", u.proj2);
          break;
        case UniversalKind::List:
          canonical = m.node(u.product_apex) == canon.product &&
                      part_matches("a2t", u.apex_to_terminal) && part_matches("p1", u.proj1) &&
                      part_matches("p2", u.proj2) && part_matches("nil", u.nil) &&
                      part_matches("cons", u.cons);
          break;
      }
    }
    if (canonical) {
      rep.verdicts[u.apex] = Verdict::Canonical;
    } else if (comparison_component(u, canon, m, {})) {
      rep.verdicts[u.apex] = Verdict::NonCanonicalUniversal;
    } else {
      rep.verdicts[u.apex] = Verdict::Invalid;
    }
  }
  return rep;
}

// --- functors ----------------------------------------------------------------

AuFunctor AuFunctor::identity() { return AuFunctor{}; }

AuFunctor AuFunctor::tagging(std::string label) {
  AuFunctor f;
  f.kind = Kind::Tagging;
  f.label = std::move(label);
  return f;
}

AuFunctor AuFunctor::composite(std::vector<AuFunctor> parts) {
  AuFunctor f;
  f.kind = Kind::Composite;
  f.parts = std::move(parts);
  return f;
}

bool AuFunctor::is_identity() const {
  if (kind == Kind::Identity) return true;
  if (kind == Kind::Composite) {
    for (const AuFunctor& p : parts)
      if (!p.is_identity()) return false;
    return true;
  }
  return false;
}

Value AuFunctor::on_value(const Value& v) const {
  switch (kind) {
    case Kind::Identity:
      return v;
    case Kind::Tagging:
      return Value::tagged(label, v);
    case Kind::Composite: {
      Value out = v;
      for (const AuFunctor& p : parts) out = p.on_value(out);
      return out;
    }
  }
  return v;
}

SetObject AuFunctor::on_object(const SetObject& s) const {
  switch (kind) {
    case Kind::Identity:
      return s;
    case Kind::Tagging:
      return tagged_object(label, s);
    case Kind::Composite: {
      SetObject out = s;
      for (const AuFunctor& p : parts) out = p.on_object(out);
      return out;
    }
  }
  return s;
}

SetMorphism AuFunctor::on_morphism(const SetMorphism& m) const {
  switch (kind) {
    case Kind::Identity:
      return m;
    case Kind::Tagging:
      return tagged_morphism(label, m);
    case Kind::Composite: {
      SetMorphism out = m;
      for (const AuFunctor& p : parts) out = p.on_morphism(out);
      return out;
    }
  }
  return m;
}

std::string AuFunctor::text() const {
  switch (kind) {
    case Kind::Identity:
      return "id";
    case Kind::Tagging:
      return "tag:" + label;
    case Kind::Composite: {
      if (parts.empty()) return "id";
      std::string out;
      for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ".";
        out += parts[i].text();
      }
      return out;
    }
  }
  return "?";
}

Model apply_functor(const AuFunctor& f, const Model& m) {
  if (f.is_identity()) return m;
  Model out;
  out.ctx = m.ctx;
  out.depth = m.depth;
  for (const auto& [n, s] : m.nodes) out.nodes[n] = f.on_object(s);
  for (const auto& [e, g] : m.edges) out.edges[e] = f.on_morphism(g);
  StrictnessReport rep = check_model(out, m.depth);
  out.verdicts = rep.verdicts;
  return out;
}

SetMorphism NatTransform::component(const SetObject& plain) const {
  SetObject a = source.on_object(plain), b = target.on_object(plain);
  std::vector<std::pair<Value, Value>> t;
  for (const Value& v : plain.elems) t.emplace_back(source.on_value(v), target.on_value(v));
  return table_morphism(a, b, std::move(t), "retag");
}

std::string NatTransform::text() const { return source.text() + " => " + target.text(); }

bool check_naturality(const NatTransform& a, const std::vector<SetObject>& objs,
                      const std::vector<SetMorphism>& morphs) {
  for (const SetMorphism& m : morphs) {
    SetMorphism lhs = compose_morphisms(a.component(m.dom), a.target.on_morphism(m));
    SetMorphism rhs = compose_morphisms(a.source.on_morphism(m), a.component(m.cod));
    if (!(lhs.table == rhs.table)) return false;
  }
  (void)objs;
  return true;
}

// --- model homomorphisms -----------------------------------------------------

std::string ModelHom::text() const {
  std::ostringstream os;
  for (const auto& [n, c] : components) os << "  " << n << ": " << c.text() << "\n";
  return os.str();
}

std::optional<ModelHom> derive_homomorphism(const Model& m1, const Model& m2,
                                            const std::map<Name, SetMorphism>& prim_components) {
  ModelHom h;
  h.components = prim_components;
  const ContextPtr& ctx = m1.ctx;
  for (const Step& step : ctx->steps) {
    const Universal* u = nullptr;
    if (auto* p = std::get_if<AddUniversal>(&step)) u = &p->u;
    if (!u) continue;
    auto derive_one = [&](const Name& apex) -> bool {
      switch (u->kind) {
        case UniversalKind::Terminal: {
          const SetObject &a = m1.node(apex), &b = m2.node(apex);
          if (b.elems.size() != 1) return false;
          std::vector<std::pair<Value, Value>> t;
          for (const Value& v : a.elems) t.emplace_back(v, b.elems[0]);
          h.components[apex] = table_morphism(a, b, std::move(t), "h");
          return true;
        }
        case UniversalKind::Initial: {
          SetMorphism m;
          m.dom = m1.node(apex);
          m.cod = m2.node(apex);
          m.desc = "h";
          if (!m.dom.elems.empty()) return false;
          h.components[apex] = m;
          return true;
        }
        default:
          return false;
      }
    };
    switch (u->kind) {
      case UniversalKind::Terminal:
      case UniversalKind::Initial:
        if (!derive_one(u->apex)) return std::nullopt;
        break;
      case UniversalKind::Pullback: {
        const Name a = m1.ctx->derived.edge(u->f).src, b = m1.ctx->derived.edge(u->g).src;
        const SetMorphism &ha = h.components.at(a), &hb = h.components.at(b);
        const SetObject &dom = m1.node(u->apex), &cod = m2.node(u->apex);
        std::vector<std::pair<Value, Value>> t;
        for (const Value& p : dom.elems) {
          Value img = Value::pair(ha.apply(p.kid(0)), hb.apply(p.kid(1)));
          if (cod.closed && !cod.contains(img)) return std::nullopt;
          t.emplace_back(p, img);
        }
        h.components[u->apex] = table_morphism(dom, cod, std::move(t), "h");
        break;
      }
      case UniversalKind::Pushout: {
        const SetMorphism &f2 = m2.edge(u->f), &g2 = m2.edge(u->g);
        const Name a = m1.ctx->derived.edge(u->f).tgt, b = m1.ctx->derived.edge(u->g).tgt;
        const SetMorphism &ha = h.components.at(a), &hb = h.components.at(b);
        const SetObject &dom = m1.node(u->apex), &cod = m2.node(u->apex);
        std::vector<std::pair<Value, Value>> t;
        for (const Value& q : dom.elems) {
          const Value& member = q.kid(0);
          Value img_member = member.is(Value::Tag::InjL)
                                 ? Value::inj_l(ha.apply(member.kid(0)))
                                 : Value::inj_r(hb.apply(member.kid(0)));
          auto cls = pushout_class_of(cod, f2, g2, img_member);
          if (!cls) return std::nullopt;
          t.emplace_back(q, *cls);
        }
        h.components[u->apex] = table_morphism(dom, cod, std::move(t), "h");
        break;
      }
      case UniversalKind::List: {
        const SetMorphism& ha = h.components.at(u->base);
        const SetObject &dom = m1.node(u->apex), &cod = m2.node(u->apex);
        std::vector<std::pair<Value, Value>> t;
        for (const Value& lv : dom.elems) {
          std::vector<Value> items;
          for (const Value& k : lv.kids()) items.push_back(ha.apply(k));
          Value img = Value::list(items);
          if (cod.closed && !cod.contains(img)) return std::nullopt;
          t.emplace_back(lv, img);
        }
        SetMorphism hm = table_morphism(dom, cod, std::move(t), "h");
        auto ha_copy = std::make_shared<const SetMorphism>(ha);
        hm.rule = [ha_copy](const Value& v) -> std::optional<Value> {
          if (!v.is(Value::Tag::List)) return std::nullopt;
          std::vector<Value> items;
          for (const Value& k : v.kids()) {
            auto x = ha_copy->try_apply(k);
            if (!x) return std::nullopt;
            items.push_back(*x);
          }
          return Value::list(items);
        };
        h.components[u->apex] = hm;
        // companion product component
        const SetMorphism& hl = h.components.at(u->apex);
        const SetObject &pdom = m1.node(u->product_apex), &pcod = m2.node(u->product_apex);
        std::vector<std::pair<Value, Value>> tp;
        for (const Value& p : pdom.elems) {
          Value img = Value::pair(ha.apply(p.kid(0)), hl.apply(p.kid(1)));
          if (pcod.closed && !pcod.contains(img)) return std::nullopt;
          tp.emplace_back(p, img);
        }
        h.components[u->product_apex] = table_morphism(pdom, pcod, std::move(tp), "h");
        break;
      }
    }
  }
  // every edge must commute on the realized fragment
  for (const auto& [id, e] : m1.ctx->derived.edges) {
    const SetMorphism &f1 = m1.edge(id), &f2 = m2.edge(id);
    const SetMorphism &hs = h.components.at(e.src), &ht = h.components.at(e.tgt);
    for (const Value& x : f1.dom.elems) {
      auto fx = f1.try_apply(x);
      auto hx = hs.try_apply(x);
      if (!fx || !hx) continue;
      auto lhs = ht.try_apply(*fx);
      auto rhs = f2.try_apply(*hx);
      if (!lhs || !rhs) continue;
      if (!(*lhs == *rhs)) return std::nullopt;
    }
  }
  return h;
}

std::vector<ModelHom> enumerate_homomorphisms(const ContextPtr& ctx, const Model& m1,
                                              const Model& m2, int depth, ExecMode mode) {
  (void)depth;
  std::vector<Name> prim(ctx->primitive_nodes.begin(), ctx->primitive_nodes.end());
  std::vector<std::vector<SetMorphism>> choices;
  size_t tasks = 1;
  for (const Name& n : prim) {
    choices.push_back(all_functions(m1.node(n), m2.node(n)));
    tasks *= choices.back().size();
  }
  auto run = [&](size_t index) {
    std::vector<ModelHom> out;
    std::map<Name, SetMorphism> picks;
    size_t rest = index;
    for (size_t i = prim.size(); i > 0; --i) {
      const auto& cs = choices[i - 1];
      picks[prim[i - 1]] = cs[rest % cs.size()];
      rest /= cs.size();
    }
    if (auto h = derive_homomorphism(m1, m2, picks)) out.push_back(std::move(*h));
    return out;
  };
  return indexed_collect<ModelHom>(tasks, mode, run);
}

bool hom_is_identity(const ModelHom& h) {
  for (const auto& [n, c] : h.components)
    if (!is_identity_morphism(c)) return false;
  return true;
}

bool hom_is_iso(const ModelHom& h) {
  for (const auto& [n, c] : h.components)
    if (!invert_morphism(c)) return false;
  return true;
}

std::optional<ModelHom> invert_hom(const ModelHom& h) {
  ModelHom out;
  for (const auto& [n, c] : h.components) {
    auto inv = invert_morphism(c);
    if (!inv) return std::nullopt;
    out.components[n] = *inv;
  }
  return out;
}

ModelHom compose_homs(const ModelHom& f, const ModelHom& g) {
  ModelHom out;
  for (const auto& [n, c] : f.components) out.components[n] = compose_morphisms(c, g.components.at(n));
  return out;
}

// --- bounded oracle ----------------------------------------------------------

namespace {

// pointwise path evaluation; empty when the chain leaves the realized part
std::optional<Value> eval_path_at(const Model& m, const std::vector<Name>& path, const Value& x) {
  std::optional<Value> v = x;
  for (const Name& e : path) {
    v = m.edge(e).try_apply(*v);
    if (!v) return std::nullopt;
  }
  return v;
}

}  // namespace

bool BoundedOracle::memoized(const std::string& key, const std::function<bool()>& compute) const {
  bool found = false, value = false;
#pragma omp critical(ausk_oracle_memo)
  {
    auto it = memo_.find(key);
    if (it != memo_.end()) {
      found = true;
      value = it->second;
    }
  }
  if (found) return value;
  value = compute();
#pragma omp critical(ausk_oracle_memo)
  memo_.emplace(key, value);
  return value;
}

bool BoundedOracle::paths_equal(const std::vector<Step>& steps, const std::vector<Name>& p1,
                                const std::vector<Name>& p2) const {
  std::string key = "eq|";
  for (const Step& s : steps) key += step_text(s) + ";";
  key += "|";
  for (const Name& n : p1) key += n + ";";
  key += "|";
  for (const Name& n : p2) key += n + ";";
  return memoized(key, [&] {
    KernelOptions trusted;
    trusted.check_justifications = false;
    ContextPtr ctx = replay("oracle", steps, trusted);
    bool ok = true;
    for_each_strict_model(ctx, settings, [&](const Model& m) {
      const SetObject& dom = m.edge(p1.front()).dom;
      for (const Value& x : dom.elems) {
        auto a = eval_path_at(m, p1, x);
        auto b = eval_path_at(m, p2, x);
        if (!a || !b) continue;
        if (!(*a == *b)) {
          ok = false;
          return false;
        }
      }
      return true;
    });
    return ok;
  });
}

bool BoundedOracle::edge_invertible(const std::vector<Step>& steps, const Name& edge) const {
  std::string key = "inv|";
  for (const Step& s : steps) key += step_text(s) + ";";
  key += "|" + edge;
  return memoized(key, [&] {
    KernelOptions trusted;
    trusted.check_justifications = false;
    ContextPtr ctx = replay("oracle", steps, trusted);
    bool ok = true;
    for_each_strict_model(ctx, settings, [&](const Model& m) {
      if (!invert_morphism(m.edge(edge))) {
        ok = false;
        return false;
      }
      return true;
    });
    return ok;
  });
}

const JustificationOracle* default_oracle() {
  static BoundedOracle oracle;
  return &oracle;
}

KernelOptions default_kernel_options() {
  KernelOptions o;
  o.oracle = default_oracle();
  return o;
}

const JustificationOracle* light_oracle() {
  static BoundedOracle oracle = [] {
    BoundedOracle o;
    o.settings = Settings{{"a"}, 1, 3};
    return o;
  }();
  return &oracle;
}

KernelOptions light_kernel_options() {
  KernelOptions o;
  o.oracle = light_oracle();
  return o;
}

}  // namespace ausk
