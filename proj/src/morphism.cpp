#include "ausk/morphism.hpp"

#include <algorithm>
#include <sstream>

namespace ausk {

namespace {

Name fresh_in(const Sketch& s, const Name& prefer) {
  if (!s.has_node(prefer) && !s.has_edge(prefer)) return prefer;
  for (int k = 1;; ++k) {
    Name cand = prefer + "~" + std::to_string(k);
    if (!s.has_node(cand) && !s.has_edge(cand)) return cand;
  }
}

bool same_steps(const Context& a, const Context& b) {
  return a.steps.size() == b.steps.size() && a.is_prefix_of(b);
}

// deterministic generated names for the arrow construction
Name copy_name(const Name& n, int c) { return n + "@" + std::to_string(c); }
Name hom_name(const Name& n) { return "h(" + n + ")"; }
Name nat_name(const Name& e) { return "h~" + e; }
Name aux_name(const Name& apex, const char* role) { return "h~" + apex + "." + role; }

}  // namespace

Name Homomorphism::node(const Name& n) const {
  auto it = node_map.find(n);
  if (it == node_map.end()) fail(ErrorKind::PreservationViolation, "hom misses node " + n);
  return it->second;
}

Name Homomorphism::edge(const Name& e) const {
  auto it = edge_map.find(e);
  if (it == edge_map.end()) fail(ErrorKind::PreservationViolation, "hom misses edge " + e);
  return it->second;
}

std::vector<Violation> homomorphism_violations(const std::map<Name, Name>& node_map,
                                               const std::map<Name, Name>& edge_map,
                                               const ContextPtr& src, const ContextPtr& tgt) {
  std::vector<Violation> out;
  const Sketch &a = src->derived, &b = tgt->derived;
  auto nm = [&](const Name& n) -> const Name* {
    auto it = node_map.find(n);
    return it == node_map.end() ? nullptr : &it->second;
  };
  auto em = [&](const Name& e) -> const Name* {
    auto it = edge_map.find(e);
    return it == edge_map.end() ? nullptr : &it->second;
  };
  for (const Name& n : a.nodes) {
    const Name* t = nm(n);
    if (!t) {
      out.push_back({n, "node not mapped"});
      continue;
    }
    if (!b.has_node(*t)) out.push_back({n, "node maps to unknown node " + *t});
  }
  for (const auto& [id, e] : a.edges) {
    const Name* t = em(id);
    if (!t) {
      out.push_back({id, "edge not mapped"});
      continue;
    }
    if (!b.has_edge(*t)) {
      out.push_back({id, "edge maps to unknown edge " + *t});
      continue;
    }
    const Name *s0 = nm(e.src), *t0 = nm(e.tgt);
    if (!s0 || !t0) continue;
    const EdgeDecl& img = b.edge(*t);
    if (img.src != *s0 || img.tgt != *t0)
      out.push_back({id, "edge image " + *t + " has wrong endpoints"});
  }
  for (const auto& [n, ide] : a.identities) {
    const Name *tn = nm(n), *te = em(ide);
    if (!tn || !te) continue;
    if (b.identities.count(*tn) == 0 || b.identities.at(*tn) != *te)
      out.push_back({ide, "identity not mapped to an identity"});
  }
  for (const Triangle& t : a.commutativities) {
    const Name *f = em(t.f), *g = em(t.g), *h = em(t.h);
    if (!f || !g || !h) continue;
    if (!b.commutativities.count({*f, *g, *h}))
      out.push_back({t.f + ";" + t.g + "=" + t.h, "commutativity image missing in target"});
  }
  for (const Name& oe : a.object_equalities) {
    const Name* t = em(oe);
    if (!t) continue;
    if (!b.object_equalities.count(*t))
      out.push_back({oe, "object equality not preserved"});
  }
  for (const Universal& u : a.universals) {
    const Name* apex = nm(u.apex);
    if (!apex) continue;
    const Universal* v = b.universal_with_apex(*apex);
    if (!v || v->kind != u.kind) {
      out.push_back({u.apex, "universal image missing or of wrong kind"});
      continue;
    }
    auto eq = [&](const Name& mine, const Name& theirs) {
      if (mine.empty()) return;
      const Name* t = em(mine);
      if (!t || *t != theirs)
        out.push_back({u.apex, "universal structure edge " + mine + " not matched"});
    };
    switch (u.kind) {
      case UniversalKind::Terminal:
      case UniversalKind::Initial:
        break;
      case UniversalKind::Pullback:
      case UniversalKind::Pushout:
        eq(u.f, v->f);
        eq(u.g, v->g);
        eq(u.proj1, v->proj1);
        eq(u.proj2, v->proj2);
        break;
      case UniversalKind::List: {
        if (!nm(u.base) || *nm(u.base) != v->base)
          out.push_back({u.apex, "list base not matched"});
        eq(u.base_to_terminal, v->base_to_terminal);
        eq(u.apex_to_terminal, v->apex_to_terminal);
        eq(u.nil, v->nil);
        eq(u.cons, v->cons);
        eq(u.proj1, v->proj1);
        eq(u.proj2, v->proj2);
        if (!nm(u.terminal_apex) || *nm(u.terminal_apex) != v->terminal_apex)
          out.push_back({u.apex, "list terminal not matched"});
        if (!nm(u.product_apex) || *nm(u.product_apex) != v->product_apex)
          out.push_back({u.apex, "list product not matched"});
        break;
      }
    }
  }
  return out;
}

Homomorphism check_homomorphism(const std::map<Name, Name>& node_map,
                                const std::map<Name, Name>& edge_map, const ContextPtr& src,
                                const ContextPtr& tgt) {
  std::map<Name, Name> edges = edge_map;
  for (const auto& [n, ide] : src->derived.identities) {
    if (edges.count(ide)) continue;
    auto it = node_map.find(n);
    if (it != node_map.end() && tgt->derived.identities.count(it->second))
      edges[ide] = tgt->derived.identities.at(it->second);
  }
  auto viol = homomorphism_violations(node_map, edges, src, tgt);
  if (!viol.empty()) {
    std::ostringstream os;
    os << "homomorphism check failed:";
    for (const auto& v : viol) os << "\n  " << v.item << ": " << v.reason;
    fail(ErrorKind::PreservationViolation, os.str());
  }
  Homomorphism h;
  h.src = src;
  h.tgt = tgt;
  h.node_map = node_map;
  h.edge_map = std::move(edges);
  return h;
}

bool ContextMap::is_extension_map() const {
  if (widened->steps.size() != dom->steps.size()) return false;
  if (!cod->is_prefix_of(*dom)) return false;
  for (const auto& [a, b] : hom.node_map)
    if (a != b) return false;
  for (const auto& [a, b] : hom.edge_map)
    if (a != b) return false;
  return true;
}

std::string ContextMap::text() const {
  std::ostringstream os;
  os << "map " << (name.empty() ? "?" : name) << " : " << dom->name << " -> " << cod->name << "\n";
  os << "  widening steps: " << (widened->steps.size() - dom->steps.size()) << "\n";
  for (const auto& [n, i] : hom.node_map) os << "  " << n << " -> " << i << "\n";
  return os.str();
}

ContextMap identity_map(const ContextPtr& ctx) {
  std::map<Name, Name> nm, em;
  for (const Name& n : ctx->derived.nodes) nm[n] = n;
  for (const auto& [e, d] : ctx->derived.edges) em[e] = e;
  ContextMap m;
  m.name = "id";
  m.dom = ctx;
  m.cod = ctx;
  m.widened = ctx;
  m.hom = check_homomorphism(nm, em, ctx, ctx);
  return m;
}

ContextMap map_from_hom(const Homomorphism& h) {
  ContextMap m;
  m.name = "dual";
  m.dom = h.tgt;
  m.cod = h.src;
  m.widened = h.tgt;
  m.hom = h;
  return m;
}

ContextMap extension_map(const ContextPtr& base, const ContextPtr& ext) {
  if (!base->is_prefix_of(*ext))
    fail(ErrorKind::NotAnExtensionMap, base->name + " is not a prefix of " + ext->name);
  std::map<Name, Name> nm, em;
  for (const Name& n : base->derived.nodes) nm[n] = n;
  for (const auto& [e, d] : base->derived.edges) em[e] = e;
  ContextMap m;
  m.name = "U(" + base->name + "<" + ext->name + ")";
  m.dom = ext;
  m.cod = base;
  m.widened = ext;
  m.hom = check_homomorphism(nm, em, base, ext);
  return m;
}

ContextMap equivalence_inverse_map(const ContextPtr& base, const ContextPtr& ext) {
  if (!base->is_prefix_of(*ext))
    fail(ErrorKind::NotAnExtensionMap, base->name + " is not a prefix of " + ext->name);
  for (size_t i = base->steps.size(); i < ext->steps.size(); ++i)
    if (!is_equivalence_step(ext->steps[i]))
      fail(ErrorKind::NotAnExtensionMap, "non-equivalence step beyond " + base->name);
  std::map<Name, Name> nm, em;
  for (const Name& n : ext->derived.nodes) nm[n] = n;
  for (const auto& [e, d] : ext->derived.edges) em[e] = e;
  ContextMap m;
  m.name = "V(" + base->name + "|>" + ext->name + ")";
  m.dom = base;
  m.cod = ext;
  m.widened = ext;
  m.hom = check_homomorphism(nm, em, ext, ext);
  return m;
}

Model act(const ContextMap& h, const Model& m) {
  if (!same_steps(*m.ctx, *h.dom))
    fail(ErrorKind::TypeMismatch, "act: model is not over the map's domain");
  if (!m.strict()) fail(ErrorKind::NonStrictInput, "act: the right action needs a strict model");
  Model ext = h.widened->steps.size() == h.dom->steps.size() ? m : extend_model_strict(m, h.widened);
  Model out;
  out.ctx = h.cod;
  out.depth = m.depth;
  for (const Name& n : h.cod->derived.nodes) out.nodes[n] = ext.node(h.hom.node(n));
  for (const auto& [e, d] : h.cod->derived.edges) out.edges[e] = ext.edge(h.hom.edge(e));
  for (const Universal& u : h.cod->derived.universals) out.verdicts[u.apex] = Verdict::Canonical;
  return out;
}

ModelHom act_hom(const ContextMap& h, const ModelHom& f) {
  ModelHom out;
  for (const Name& n : h.cod->derived.nodes) out.components[n] = f.components.at(h.hom.node(n));
  return out;
}

ContextMap compose_maps(const ContextMap& m1, const ContextMap& m2, const KernelOptions& opts) {
  if (!same_steps(*m1.cod, *m2.dom))
    fail(ErrorKind::BoundaryMismatch, "compose_maps: codomain/domain mismatch");
  std::map<Name, Name> ren;
  for (const Name& n : m2.dom->derived.nodes) ren[n] = m1.hom.node_map.count(n)
                                                           ? m1.hom.node_map.at(n)
                                                           : n;
  for (const auto& [e, d] : m2.dom->derived.edges)
    ren[e] = m1.hom.edge_map.count(e) ? m1.hom.edge_map.at(e) : e;
  ContextPtr cur = m1.widened;
  for (size_t i = m2.dom->steps.size(); i < m2.widened->steps.size(); ++i) {
    const Step& s = m2.widened->steps[i];
    // equivalence steps introduce at most one edge
    Name introduced;
    if (auto* p = std::get_if<AdjoinComposite>(&s)) introduced = p->result;
    if (auto* p = std::get_if<DeclareFillin>(&s)) introduced = p->result;
    if (auto* p = std::get_if<AdjoinInverse>(&s)) introduced = p->result;
    if (!introduced.empty()) ren[introduced] = fresh_in(cur->derived, introduced);
    Step renamed = rename_step(s, ren);
    try {
      cur = extend(cur, renamed, opts);
    } catch (const AuskError& e) {
      if (e.kind == ErrorKind::UnjustifiedStep)
        fail(ErrorKind::TransportFailure,
             std::string("transported step lost its justification: ") + e.what());
      throw;
    }
  }
  std::map<Name, Name> nm, em;
  for (const auto& [n, img] : m2.hom.node_map) nm[n] = ren.at(img);
  for (const auto& [e, img] : m2.hom.edge_map) em[e] = ren.at(img);
  ContextMap out;
  out.name = m1.name + ";" + m2.name;
  out.dom = m1.dom;
  out.cod = m2.cod;
  out.widened = cur;
  out.hom = check_homomorphism(nm, em, m2.cod, cur);
  return out;
}

MapsEqualResult maps_equal(const ContextMap& m1, const ContextMap& m2, const Settings& s) {
  if (!same_steps(*m1.dom, *m2.dom) || !same_steps(*m1.cod, *m2.cod))
    fail(ErrorKind::BoundaryMismatch, "maps_equal: maps are not parallel");
  MapsEqualResult res;
  res.detail = s.echo();
  for (const Model& m : enumerate_strict_models(m1.dom, s)) {
    Model a = act(m1, m), b = act(m2, m);
    if (a.text() != b.text()) {
      res.equal = false;
      res.witness = m;
      res.detail += "\ndistinguishing model:\n" + m.text();
      return res;
    }
  }
  res.equal = true;
  return res;
}

// --- arrow context -----------------------------------------------------------

namespace {

struct ArrowBuild {
  std::vector<Step> steps;
  std::map<Name, Name> deg_node, deg_edge;  // arrow item -> base item
  std::map<Name, Name> comp;                // base node -> component edge
};

void emit_universal_component(ArrowBuild& ab, const Sketch& base, const Universal& u,
                              const std::map<Name, Name>& ren0,
                              const std::map<Name, Name>& ren1) {
  auto at0 = [&](const Name& x) { return ren0.at(x); };
  auto at1 = [&](const Name& x) { return ren1.at(x); };
  switch (u.kind) {
    case UniversalKind::Terminal: {
      DeclareFillin df;
      df.spec.kind = FillinKind::TerminalFrom;
      df.spec.universal_apex = at1(u.apex);
      df.spec.source = at0(u.apex);
      df.result = hom_name(u.apex);
      ab.steps.push_back(df);
      ab.comp[u.apex] = df.result;
      ab.deg_edge[df.result] = identity_edge_name(u.apex);
      break;
    }
    case UniversalKind::Initial: {
      DeclareFillin df;
      df.spec.kind = FillinKind::InitialTo;
      df.spec.universal_apex = at0(u.apex);
      df.spec.target = at1(u.apex);
      df.result = hom_name(u.apex);
      ab.steps.push_back(df);
      ab.comp[u.apex] = df.result;
      ab.deg_edge[df.result] = identity_edge_name(u.apex);
      break;
    }
    case UniversalKind::Pullback: {
      const Name a = base.edge(u.f).src, b = base.edge(u.g).src;
      Name e1 = aux_name(u.apex, "1"), e2 = aux_name(u.apex, "2");
      ab.steps.push_back(AdjoinComposite{at0(u.proj1), ab.comp.at(a), e1});
      ab.deg_edge[e1] = u.proj1;
      ab.steps.push_back(AdjoinComposite{at0(u.proj2), ab.comp.at(b), e2});
      ab.deg_edge[e2] = u.proj2;
      DeclareFillin df;
      df.spec.kind = FillinKind::PullbackPair;
      df.spec.universal_apex = at1(u.apex);
      df.spec.leg1 = e1;
      df.spec.leg2 = e2;
      df.result = hom_name(u.apex);
      ab.steps.push_back(df);
      ab.comp[u.apex] = df.result;
      ab.deg_edge[df.result] = identity_edge_name(u.apex);
      break;
    }
    case UniversalKind::Pushout: {
      const Name a = base.edge(u.f).tgt, b = base.edge(u.g).tgt;
      Name e1 = aux_name(u.apex, "1"), e2 = aux_name(u.apex, "2");
      ab.steps.push_back(AdjoinComposite{ab.comp.at(a), at1(u.proj1), e1});
      ab.deg_edge[e1] = u.proj1;
      ab.steps.push_back(AdjoinComposite{ab.comp.at(b), at1(u.proj2), e2});
      ab.deg_edge[e2] = u.proj2;
      DeclareFillin df;
      df.spec.kind = FillinKind::PushoutCopair;
      df.spec.universal_apex = at0(u.apex);
      df.spec.leg1 = e1;
      df.spec.leg2 = e2;
      df.result = hom_name(u.apex);
      ab.steps.push_back(df);
      ab.comp[u.apex] = df.result;
      ab.deg_edge[df.result] = identity_edge_name(u.apex);
      break;
    }
    case UniversalKind::List: {
      // component on the list apex is the elementwise map, a fold
      Name b0 = aux_name(u.apex, "nil");
      ab.steps.push_back(AdjoinComposite{ab.comp.at(u.terminal_apex), at1(u.nil), b0});
      ab.deg_edge[b0] = u.nil;
      Name wleg = aux_name(u.apex, "bt");
      ab.steps.push_back(AdjoinComposite{at0(u.base_to_terminal), ab.comp.at(u.terminal_apex), wleg});
      ab.deg_edge[wleg] = u.base_to_terminal;
      Universal w;
      w.kind = UniversalKind::Pullback;
      w.apex = "w(" + u.apex + ")";
      w.f = wleg;
      w.g = at1(u.apex_to_terminal);
      w.proj1 = "w1(" + u.apex + ")";
      w.proj2 = "w2(" + u.apex + ")";
      ab.steps.push_back(AddUniversal{w});
      ab.deg_node[w.apex] = u.product_apex;
      ab.deg_edge[w.proj1] = u.proj1;
      ab.deg_edge[w.proj2] = u.proj2;
      ab.deg_edge[identity_edge_name(w.apex)] = identity_edge_name(u.product_apex);
      Name wa = aux_name(u.apex, "wa");
      ab.steps.push_back(AdjoinComposite{w.proj1, ab.comp.at(u.base), wa});
      ab.deg_edge[wa] = u.proj1;
      DeclareFillin mk;
      mk.spec.kind = FillinKind::PullbackPair;
      mk.spec.universal_apex = at1(u.product_apex);
      mk.spec.leg1 = wa;
      mk.spec.leg2 = w.proj2;
      mk.result = aux_name(u.apex, "mk");
      ab.steps.push_back(mk);
      ab.deg_edge[mk.result] = identity_edge_name(u.product_apex);
      Name calg = aux_name(u.apex, "alg");
      ab.steps.push_back(AdjoinComposite{mk.result, at1(u.cons), calg});
      ab.deg_edge[calg] = u.cons;
      DeclareFillin fold;
      fold.spec.kind = FillinKind::ListFold;
      fold.spec.universal_apex = at0(u.apex);
      fold.spec.target = at1(u.apex);
      fold.spec.nil_image = b0;
      fold.spec.cons_alg = calg;
      fold.spec.cons_product = w.apex;
      fold.result = hom_name(u.apex);
      ab.steps.push_back(fold);
      ab.comp[u.apex] = fold.result;
      ab.deg_edge[fold.result] = identity_edge_name(u.apex);
      // companion product component
      Name p1c = aux_name(u.apex, "p1"), p2c = aux_name(u.apex, "p2");
      ab.steps.push_back(AdjoinComposite{at0(u.proj1), ab.comp.at(u.base), p1c});
      ab.deg_edge[p1c] = u.proj1;
      ab.steps.push_back(AdjoinComposite{at0(u.proj2), fold.result, p2c});
      ab.deg_edge[p2c] = u.proj2;
      DeclareFillin hp;
      hp.spec.kind = FillinKind::PullbackPair;
      hp.spec.universal_apex = at1(u.product_apex);
      hp.spec.leg1 = p1c;
      hp.spec.leg2 = p2c;
      hp.result = hom_name(u.product_apex);
      ab.steps.push_back(hp);
      ab.comp[u.product_apex] = hp.result;
      ab.deg_edge[hp.result] = identity_edge_name(u.product_apex);
      break;
    }
  }
}

}  // namespace

ArrowContext arrow_context(const ContextPtr& ctx, const KernelOptions& opts) {
  const Sketch& base = ctx->derived;
  std::map<Name, Name> ren0, ren1;
  for (const Name& n : base.nodes) {
    ren0[n] = copy_name(n, 0);
    ren1[n] = copy_name(n, 1);
    ren0[identity_edge_name(n)] = identity_edge_name(ren0[n]);
    ren1[identity_edge_name(n)] = identity_edge_name(ren1[n]);
  }
  for (const auto& [e, d] : base.edges) {
    if (ren0.count(e)) continue;  // identities already mapped
    ren0[e] = copy_name(e, 0);
    ren1[e] = copy_name(e, 1);
  }
  ArrowBuild ab;
  for (const Step& s : ctx->steps) ab.steps.push_back(rename_step(s, ren0));
  for (const Step& s : ctx->steps) ab.steps.push_back(rename_step(s, ren1));
  for (const auto& [e, img] : ren0) ab.deg_edge[img] = e;
  for (const auto& [e, img] : ren1) ab.deg_edge[img] = e;
  for (const Name& n : base.nodes) {
    ab.deg_node[ren0[n]] = n;
    ab.deg_node[ren1[n]] = n;
    ab.deg_edge.erase(ren0[n]);
    ab.deg_edge.erase(ren1[n]);
  }
  // one hom component per node and a naturality square per primitive edge,
  // in introduction order
  for (const Step& s : ctx->steps) {
    if (auto* p = std::get_if<AddPrimitiveNode>(&s)) {
      Name h = hom_name(p->name);
      ab.steps.push_back(AddPrimitiveEdge{{h, ren0[p->name], ren1[p->name]}});
      ab.comp[p->name] = h;
      ab.deg_edge[h] = identity_edge_name(p->name);
    } else if (auto* p = std::get_if<AddPrimitiveEdge>(&s)) {
      const EdgeDecl& e = p->edge;
      Name c = nat_name(e.id);
      ab.steps.push_back(AdjoinComposite{ren0[e.id], ab.comp.at(e.tgt), c});
      ab.deg_edge[c] = e.id;
      ab.steps.push_back(AddCommutativity{{ab.comp.at(e.src), ren1[e.id], c}});
    } else if (auto* p = std::get_if<AddUniversal>(&s)) {
      emit_universal_component(ab, base, p->u, ren0, ren1);
    }
  }
  KernelOptions gen = opts;
  if (gen.check_justifications) gen.oracle = light_oracle();
  ContextPtr arrow = replay(ctx->name + "->", ab.steps, gen);

  ArrowContext out;
  out.ctx = arrow;
  out.copy0 = ren0;
  out.copy1 = ren1;
  out.hom_component = ab.comp;
  {
    std::map<Name, Name> nm, em;
    for (const Name& n : base.nodes) nm[n] = ren0[n];
    for (const auto& [e, d] : base.edges) em[e] = ren0[e];
    out.src = map_from_hom(check_homomorphism(nm, em, ctx, arrow));
    out.src.name = "src(" + ctx->name + ")";
  }
  {
    std::map<Name, Name> nm, em;
    for (const Name& n : base.nodes) nm[n] = ren1[n];
    for (const auto& [e, d] : base.edges) em[e] = ren1[e];
    out.tgt = map_from_hom(check_homomorphism(nm, em, ctx, arrow));
    out.tgt.name = "tgt(" + ctx->name + ")";
  }
  {
    // widen the base with unit laws so every generated item maps onto it
    ContextPtr widened = ctx;
    for (const auto& [e, d] : base.edges) {
      Triangle left{base.identities.at(d.src), e, e};
      Triangle right{e, base.identities.at(d.tgt), e};
      if (!widened->derived.commutativities.count(left))
        widened = extend(widened, DeduceCommutativity{left, {JustRule::UnitLaw, ""}}, opts);
      if (!widened->derived.commutativities.count(right))
        widened = extend(widened, DeduceCommutativity{right, {JustRule::UnitLaw, ""}}, opts);
    }
    std::map<Name, Name> nm = ab.deg_node, em = ab.deg_edge;
    ContextMap deg;
    deg.name = "deg(" + ctx->name + ")";
    deg.dom = ctx;
    deg.cod = arrow;
    deg.widened = widened;
    deg.hom = check_homomorphism(nm, em, arrow, widened);
    out.degeneracy = deg;
  }
  return out;
}

ArrowModelSplit split_arrow_model(const ArrowContext& arr, const Model& am) {
  ArrowModelSplit out{act(arr.src, am), act(arr.tgt, am), {}};
  std::map<Name, SetMorphism> prim;
  for (const auto& [n, h] : arr.hom_component)
    if (arr.src.cod->primitive_nodes.count(n)) prim[n] = am.edge(h);
  auto full = derive_homomorphism(out.source, out.target, prim);
  if (!full) fail(ErrorKind::InvalidModel, "arrow model does not split into a homomorphism");
  out.hom = *full;
  return out;
}

Model assemble_arrow_model(const ArrowContext& arr, const Model& m0, const Model& m1,
                           const ModelHom& h, int depth) {
  Assignment asg;
  const ContextPtr base = arr.src.cod;
  for (const Name& n : base->primitive_nodes) {
    asg.nodes[arr.copy0.at(n)] = m0.node(n);
    asg.nodes[arr.copy1.at(n)] = m1.node(n);
  }
  for (const Name& e : base->primitive_edges) {
    asg.edges[arr.copy0.at(e)] = m0.edge(e);
    asg.edges[arr.copy1.at(e)] = m1.edge(e);
  }
  for (const auto& [n, hname] : arr.hom_component)
    if (base->primitive_nodes.count(n)) asg.edges[hname] = h.components.at(n);
  return eval_strict_model(arr.ctx, asg, depth);
}

// --- 2-cells -----------------------------------------------------------------

TwoCell two_cell(const ContextMap& into_arrow, const ArrowContext& arr,
                 const KernelOptions& opts) {
  TwoCell c;
  c.cell = into_arrow;
  c.source_boundary = compose_maps(into_arrow, arr.src, opts);
  c.target_boundary = compose_maps(into_arrow, arr.tgt, opts);
  return c;
}

TwoCell identity_two_cell(const ContextMap& f, const ArrowContext& arr_of_cod,
                          const KernelOptions& opts) {
  ContextMap cell = compose_maps(f, arr_of_cod.degeneracy, opts);
  cell.name = "id2(" + f.name + ")";
  return two_cell(cell, arr_of_cod, opts);
}

TwoCell vertical_compose(const TwoCell& a, const TwoCell& b, const ArrowContext& arr,
                         const KernelOptions& opts) {
  const ContextPtr base = arr.src.cod;
  for (const Universal& u : base->derived.universals)
    if (u.kind == UniversalKind::List)
      fail(ErrorKind::UnsupportedStep,
           "vertical composition over list universals is not supported");
  if (!same_steps(*a.cell.dom, *b.cell.dom))
    fail(ErrorKind::BoundaryMismatch, "cells have different domains");

  // amalgamate the two witnesses over the common domain
  ContextPtr amalgam = a.cell.widened;
  std::map<Name, Name> renB;
  for (const Name& n : b.cell.dom->derived.nodes) renB[n] = n;
  for (const auto& [e, d] : b.cell.dom->derived.edges) renB[e] = e;
  for (size_t i = b.cell.dom->steps.size(); i < b.cell.widened->steps.size(); ++i) {
    const Step& s = b.cell.widened->steps[i];
    Name introduced;
    if (auto* p = std::get_if<AdjoinComposite>(&s)) introduced = p->result;
    if (auto* p = std::get_if<DeclareFillin>(&s)) introduced = p->result;
    if (auto* p = std::get_if<AdjoinInverse>(&s)) introduced = p->result;
    if (!introduced.empty()) renB[introduced] = fresh_in(amalgam->derived, introduced + "'");
    amalgam = extend(amalgam, rename_step(s, renB), opts);
  }
  auto aimg_n = [&](const Name& n) { return a.cell.hom.node(n); };
  auto aimg_e = [&](const Name& e) { return a.cell.hom.edge(e); };
  auto bimg_n = [&](const Name& n) { return renB.at(b.cell.hom.node(n)); };
  auto bimg_e = [&](const Name& e) { return renB.at(b.cell.hom.edge(e)); };

  // the shared boundary must agree on the witnesses
  for (const Name& n : base->derived.nodes)
    if (aimg_n(arr.copy1.at(n)) != bimg_n(arr.copy0.at(n)))
      fail(ErrorKind::BoundaryMismatch, "witnesses disagree at node " + n);
  for (const auto& [e, d] : base->derived.edges)
    if (aimg_e(arr.copy1.at(e)) != bimg_e(arr.copy0.at(e)))
      fail(ErrorKind::BoundaryMismatch, "witnesses disagree at edge " + e);

  std::map<Name, Name> nm, em;
  for (const Name& n : base->derived.nodes) {
    nm[arr.copy0.at(n)] = aimg_n(arr.copy0.at(n));
    nm[arr.copy1.at(n)] = bimg_n(arr.copy1.at(n));
  }
  for (const auto& [e, d] : base->derived.edges) {
    em[arr.copy0.at(e)] = aimg_e(arr.copy0.at(e));
    em[arr.copy1.at(e)] = bimg_e(arr.copy1.at(e));
  }
  // composite hom components and images for the generated items
  std::map<Name, Name> comp;  // base node -> composite component in amalgam
  auto adjoin = [&](const Name& f, const Name& g, const Name& prefer) {
    Name r = fresh_in(amalgam->derived, prefer);
    amalgam = extend(amalgam, AdjoinComposite{f, g, r}, opts);
    return r;
  };
  auto deduce = [&](const Triangle& t) {
    if (!amalgam->derived.commutativities.count(t))
      amalgam = extend(amalgam, DeduceCommutativity{t, {JustRule::Semantic, "pasted square"}}, opts);
  };
  for (const Step& s : base->steps) {
    if (auto* p = std::get_if<AddPrimitiveNode>(&s)) {
      const Name& n = p->name;
      Name c = adjoin(aimg_e(arr.hom_component.at(n)), bimg_e(arr.hom_component.at(n)), "v~" + n);
      comp[n] = c;
      em[arr.hom_component.at(n)] = c;
    } else if (auto* p = std::get_if<AddPrimitiveEdge>(&s)) {
      const EdgeDecl& e = p->edge;
      Name cf = adjoin(aimg_e(arr.copy0.at(e.id)), comp.at(e.tgt), "v~" + e.id);
      em[nat_name(e.id)] = cf;
      deduce({comp.at(e.src), bimg_e(arr.copy1.at(e.id)), cf});
    } else if (auto* p = std::get_if<AddUniversal>(&s)) {
      const Universal& u = p->u;
      const Name hn = hom_name(u.apex);
      Name c = adjoin(aimg_e(hn), bimg_e(hn), "v~" + u.apex);
      comp[u.apex] = c;
      em[hn] = c;
      if (u.kind == UniversalKind::Pullback) {
        const Name A = base->derived.edge(u.f).src, B = base->derived.edge(u.g).src;
        Name i1 = adjoin(aimg_e(arr.copy0.at(u.proj1)), comp.at(A), "v~" + u.apex + ".1");
        Name i2 = adjoin(aimg_e(arr.copy0.at(u.proj2)), comp.at(B), "v~" + u.apex + ".2");
        em[aux_name(u.apex, "1")] = i1;
        em[aux_name(u.apex, "2")] = i2;
        deduce({c, bimg_e(arr.copy1.at(u.proj1)), i1});
        deduce({c, bimg_e(arr.copy1.at(u.proj2)), i2});
      } else if (u.kind == UniversalKind::Pushout) {
        const Name A = base->derived.edge(u.f).tgt, B = base->derived.edge(u.g).tgt;
        Name i1 = adjoin(comp.at(A), bimg_e(arr.copy1.at(u.proj1)), "v~" + u.apex + ".1");
        Name i2 = adjoin(comp.at(B), bimg_e(arr.copy1.at(u.proj2)), "v~" + u.apex + ".2");
        em[aux_name(u.apex, "1")] = i1;
        em[aux_name(u.apex, "2")] = i2;
        deduce({aimg_e(arr.copy0.at(u.proj1)), c, i1});
        deduce({aimg_e(arr.copy0.at(u.proj2)), c, i2});
      }
    }
  }
  ContextMap cell;
  cell.name = a.cell.name + "*" + b.cell.name;
  cell.dom = a.cell.dom;
  cell.cod = arr.ctx;
  cell.widened = amalgam;
  cell.hom = check_homomorphism(nm, em, arr.ctx, amalgam);
  return two_cell(cell, arr, opts);
}

ModelHom cell_component(const TwoCell& c, const ArrowContext& arr, const Model& m) {
  Model am = act(c.cell, m);
  return split_arrow_model(arr, am).hom;
}

}  // namespace ausk
