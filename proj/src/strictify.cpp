#include "ausk/strictify.hpp"

#include <sstream>

namespace ausk {

namespace {

bool tables_equal(const SetMorphism& a, const SetMorphism& b) {
  return a.dom == b.dom && a.cod == b.cod && a.table == b.table;
}

}  // namespace

ModelIso identity_iso(const Model& m) {
  ModelIso iso;
  for (const auto& [n, s] : m.nodes) iso.components.components[n] = identity_morphism(s);
  return iso;
}

void check_model_iso(const Model& from, const Model& to, const ModelIso& iso) {
  for (const auto& [n, s] : from.nodes) {
    auto it = iso.components.components.find(n);
    if (it == iso.components.components.end())
      fail(ErrorKind::IsoMismatch, "iso misses component at " + n);
    const SetMorphism& c = it->second;
    if (!(c.dom == s) || !(c.cod == to.node(n)))
      fail(ErrorKind::IsoMismatch, "iso component at " + n + " has wrong endpoints");
    if (!invert_morphism(c)) fail(ErrorKind::IsoMismatch, "iso component at " + n + " not invertible");
  }
  for (const auto& [e, d] : from.ctx->derived.edges) {
    const SetMorphism& ca = iso.components.components.at(d.src);
    const SetMorphism& cb = iso.components.components.at(d.tgt);
    const SetMorphism &fe = from.edge(e), &te = to.edge(e);
    for (const Value& x : fe.dom.elems) {
      // elements whose images leave the realized fragment are beyond the
      // checking depth
      auto fx = fe.try_apply(x);
      auto cx = ca.try_apply(x);
      if (!fx || !cx) continue;
      auto lhs = cb.try_apply(*fx);
      auto rhs = te.try_apply(*cx);
      if (!lhs || !rhs) continue;
      if (!(*lhs == *rhs))
        fail(ErrorKind::IsoMismatch, "iso does not commute with edge " + e + " at " + x.text());
    }
  }
}

Model restrict_model(const Model& m, const ContextPtr& base) {
  if (!base->is_prefix_of(*m.ctx))
    fail(ErrorKind::NotAnExtensionMap, "restrict_model: not a prefix context");
  Model out;
  out.ctx = base;
  out.depth = m.depth;
  for (const Name& n : base->derived.nodes) out.nodes[n] = m.node(n);
  for (const auto& [e, d] : base->derived.edges) out.edges[e] = m.edge(e);
  for (const Universal& u : base->derived.universals) {
    auto it = m.verdicts.find(u.apex);
    out.verdicts[u.apex] = it == m.verdicts.end() ? Verdict::Canonical : it->second;
  }
  return out;
}

StrictifyResult strictify(const ContextMap& u, const Model& m1, const Model& m0s,
                          const ModelIso& phi0) {
  if (!u.is_extension_map())
    fail(ErrorKind::NotAnExtensionMap, "strictify needs an extension map, got " + u.name);
  const ContextPtr& wide = u.dom;   // the extended context
  const ContextPtr& base = u.cod;  // the base
  if (!m0s.strict()) fail(ErrorKind::NonStrictInput, "strictify: base model must be strict");
  // phi0 must be an iso m0s -> m1|base
  Model m1_base = restrict_model(m1, base);
  check_model_iso(m0s, m1_base, phi0);

  EvalEnv env{m0s.nodes, m0s.edges, m0s.verdicts};
  std::map<Name, SetMorphism> phi = phi0.components.components;
  const int depth = m1.depth;

  for (size_t i = base->steps.size(); i < wide->steps.size(); ++i) {
    const Step& step = wide->steps[i];
    if (auto* p = std::get_if<AddPrimitiveNode>(&step)) {
      // condition 4: equality on the primitive nodes of the extension
      eval_env_add_node(env, p->name, m1.node(p->name));
      phi[p->name] = identity_morphism(m1.node(p->name));
    } else if (auto* p = std::get_if<AddPrimitiveEdge>(&step)) {
      // determined by making phi an isomorphism
      const SetMorphism& pa = phi.at(p->edge.src);
      auto pb_inv = invert_morphism(phi.at(p->edge.tgt));
      if (!pb_inv) fail(ErrorKind::IsoMismatch, "component at " + p->edge.tgt + " not invertible");
      SetMorphism m = compose_morphisms(compose_morphisms(pa, m1.edge(p->edge.id)), *pb_inv);
      m.desc = p->edge.id;
      env.edges[p->edge.id] = m;
    } else if (auto* p = std::get_if<AddUniversal>(&step)) {
      const Universal& uu = p->u;
      UniversalInterp canon = interpret_universal(uu, env.nodes, env.edges, depth);
      eval_model_step(env, step, depth);
      auto cmp = comparison_component(uu, canon, m1, phi);
      if (!cmp)
        fail(ErrorKind::IsoMismatch,
             "input model is not universal at " + uu.apex + "; cannot strictify");
      phi[uu.apex] = *cmp;
      if (uu.kind == UniversalKind::List) {
        const Universal* prod = wide->derived.universal_with_apex(uu.product_apex);
        UniversalInterp pcanon = interpret_universal(*prod, env.nodes, env.edges, depth);
        auto pcmp = comparison_component(*prod, pcanon, m1, phi);
        if (!pcmp)
          fail(ErrorKind::IsoMismatch, "input model is not universal at " + uu.product_apex);
        phi[uu.product_apex] = *pcmp;
      }
    } else {
      eval_model_step(env, step, depth);
    }
  }
  StrictifyResult out;
  out.model = seal_model(wide, std::move(env), depth);
  out.iso.components.components = std::move(phi);
  check_model_iso(out.model, m1, out.iso);
  return out;
}

StrictifyResult reindex_with_iso(const AuFunctor& f, const Model& m) {
  if (!m.strict()) fail(ErrorKind::NonStrictInput, "reindex acts on strict models");
  Model fm = apply_functor(f, m);
  if (f.is_identity()) {
    StrictifyResult out{fm, identity_iso(fm)};
    return out;
  }
  ContextMap u = extension_map(Context::empty(), m.ctx);
  Model empty_model;
  empty_model.ctx = Context::empty();
  empty_model.depth = m.depth;
  ModelIso empty_iso;
  return strictify(u, fm, empty_model, empty_iso);
}

Model reindex(const AuFunctor& f, const Model& m) { return reindex_with_iso(f, m).model; }

ModelHom reindex_2cell(const NatTransform& alpha, const Model& m) {
  StrictifyResult r0 = reindex_with_iso(alpha.source, m);
  StrictifyResult r1 = reindex_with_iso(alpha.target, m);
  ModelHom out;
  for (const auto& [n, s] : m.nodes) {
    const SetMorphism& psi0 = r0.iso.components.components.at(n);  // f0*M(n) -> f0.M(n)
    auto psi1_inv = invert_morphism(r1.iso.components.components.at(n));
    SetMorphism comp = alpha.component(s);  // f0.M(n) -> f1.M(n)
    out.components[n] = compose_morphisms(compose_morphisms(psi0, comp), *psi1_inv);
  }
  return out;
}

ModelHom reindex_hom(const AuFunctor& f, const Model& src, const Model& tgt, const ModelHom& h) {
  StrictifyResult rs = reindex_with_iso(f, src);
  StrictifyResult rt = reindex_with_iso(f, tgt);
  ModelHom out;
  for (const auto& [n, c] : h.components) {
    const SetMorphism& psi_s = rs.iso.components.components.at(n);  // f*src(n) -> f.src(n)
    auto psi_t_inv = invert_morphism(rt.iso.components.components.at(n));
    out.components[n] = compose_morphisms(compose_morphisms(psi_s, f.on_morphism(c)), *psi_t_inv);
  }
  return out;
}

bool SigmaCell::identity() const {
  return lhs.text() == rhs.text() && iso.is_identity();
}

std::string SigmaCell::text() const {
  std::ostringstream os;
  os << "sigma f=" << f.text() << " along " << map_name << (identity() ? " : identity" : " :")
     << "\n";
  if (!identity()) os << iso.text();
  return os.str();
}

SigmaCell sigma(const AuFunctor& f, const ContextMap& h, const Model& m) {
  SigmaCell out;
  out.f = f;
  out.map_name = h.name;
  Model mh = act(h, m);
  StrictifyResult lhs = reindex_with_iso(f, mh);   // f*(MH) ~ f.(MH)
  StrictifyResult fm = reindex_with_iso(f, m);     // f*M ~ f.M
  out.lhs = lhs.model;
  out.rhs = act(h, fm.model);
  // extend the strictification iso of f*M over the widening, then pull back
  std::map<Name, SetMorphism> psi_wide;
  if (h.widened->steps.size() == h.dom->steps.size()) {
    psi_wide = fm.iso.components.components;
  } else {
    Model m_wide = extend_model_strict(m, h.widened);
    Model fm_wide_nonstrict = apply_functor(f, m_wide);
    ContextMap uw = extension_map(h.dom, h.widened);
    StrictifyResult ext = strictify(uw, fm_wide_nonstrict, fm.model, fm.iso);
    psi_wide = ext.iso.components.components;
  }
  // Sigma_n = psi'_{h(n)}^{-1} . phi1_n  :  f*(MH)(n) -> (f*M)H(n)
  for (const Name& n : h.cod->derived.nodes) {
    const SetMorphism& phi1 = lhs.iso.components.components.at(n);
    auto psi_inv = invert_morphism(psi_wide.at(h.hom.node(n)));
    if (!psi_inv) fail(ErrorKind::IsoMismatch, "sigma: non-invertible strictification component");
    out.iso.components.components[n] = compose_morphisms(phi1, *psi_inv);
  }
  check_model_iso(out.lhs, out.rhs, out.iso);
  return out;
}

bool verify_strict_composition(const AuFunctor& f0, const AuFunctor& f1, const Model& m) {
  Model two_step = reindex(f1, reindex(f0, m));
  Model one_step = reindex(AuFunctor::composite({f0, f1}), m);
  return two_step.text() == one_step.text();
}

std::string GrayReport::text() const {
  std::ostringstream os;
  os << "gray conditions: horizontal=" << (horizontal ? "pass" : "FAIL")
     << " vertical=" << (vertical ? "pass" : "FAIL")
     << " cells/functor=" << (cells_functor ? "pass" : "FAIL")
     << " cells/map=" << (cells_map ? "pass" : "FAIL") << "\n";
  for (const auto& f : failures) os << "  " << f << "\n";
  return os.str();
}

GrayReport verify_gray(const GrayInputs& in) {
  GrayReport rep;
  auto record = [&](bool ok, bool& slot, const std::string& what) {
    slot = ok;
    if (!ok) rep.failures.push_back(what);
  };
  auto homs_equal = [&](const ModelHom& a, const ModelHom& b, const std::string& what) {
    for (const auto& [n, c] : a.components) {
      auto it = b.components.find(n);
      if (it == b.components.end() || !tables_equal(c, it->second)) {
        rep.failures.push_back(what + ": component " + n + " differs");
        return false;
      }
    }
    return a.components.size() == b.components.size();
  };

  // 1. horizontal: Sigma_{f, h;hp} = (Sigma_{f,h} acted along hp) . Sigma_{f,hp}(MH)
  {
    ContextMap hh = compose_maps(in.h, in.hp, in.opts);
    SigmaCell whole = sigma(in.f0, hh, in.m);
    Model mh = act(in.h, in.m);
    SigmaCell right = sigma(in.f0, in.hp, mh);
    SigmaCell left = sigma(in.f0, in.h, in.m);
    ModelHom left_along = act_hom(in.hp, left.iso.components);
    ModelHom pasted = compose_homs(right.iso.components, left_along);
    bool ok = homs_equal(whole.iso.components, pasted, "horizontal") &&
              whole.lhs.text() == right.lhs.text() && whole.rhs.text() == act(in.hp, left.rhs).text();
    record(ok, rep.horizontal, "horizontal pasting of sigma squares");
  }
  // 2. vertical: Sigma_{f0f1,h} = Sigma_{f1,h}(f0*M) . f1*(Sigma_{f0,h}(M))
  {
    AuFunctor both = AuFunctor::composite({in.f0, in.f1});
    SigmaCell whole = sigma(both, in.h, in.m);
    SigmaCell inner = sigma(in.f0, in.h, in.m);
    Model f0m = reindex(in.f0, in.m);
    SigmaCell outer = sigma(in.f1, in.h, f0m);
    ModelHom lifted = reindex_hom(in.f1, inner.lhs, inner.rhs, inner.iso.components);
    ModelHom pasted = compose_homs(lifted, outer.iso.components);
    bool ok = homs_equal(whole.iso.components, pasted, "vertical");
    record(ok, rep.vertical, "vertical pasting over composition of functors");
  }
  // 3a. compatibility with 2-cells of functors: naturality of sigma in f
  {
    Model mh = act(in.h, in.m);
    ModelHom alpha_mh = reindex_2cell(in.alpha, mh);   // f0*(MH) -> f1*(MH)
    ModelHom alpha_m = reindex_2cell(in.alpha, in.m);  // f0*M -> f1*M
    SigmaCell s0 = sigma(in.f0, in.h, in.m);
    SigmaCell s1 = sigma(in.f1, in.h, in.m);
    ModelHom along = act_hom(in.h, alpha_m);           // (alpha*M)H
    ModelHom lhs = compose_homs(alpha_mh, s1.iso.components);
    ModelHom rhs = compose_homs(s0.iso.components, along);
    record(homs_equal(lhs, rhs, "cells/functor"), rep.cells_functor,
           "compatibility with functor 2-cells");
  }
  // 3b. compatibility with 2-cells of maps
  if (in.beta && in.beta_arrow) {
    ModelHom m_beta = cell_component(*in.beta, *in.beta_arrow, in.m);  // MH0 -> MH1
    Model mh0 = act(in.beta->source_boundary, in.m);
    Model mh1 = act(in.beta->target_boundary, in.m);
    ModelHom f_m_beta = reindex_hom(in.f0, mh0, mh1, m_beta);
    Model f0m = reindex(in.f0, in.m);
    ModelHom fm_beta = cell_component(*in.beta, *in.beta_arrow, f0m);
    SigmaCell s_src = sigma(in.f0, in.beta->source_boundary, in.m);
    SigmaCell s_tgt = sigma(in.f0, in.beta->target_boundary, in.m);
    ModelHom lhs = compose_homs(f_m_beta, s_tgt.iso.components);
    ModelHom rhs = compose_homs(s_src.iso.components, fm_beta);
    record(homs_equal(lhs, rhs, "cells/map"), rep.cells_map, "compatibility with map 2-cells");
  } else {
    rep.cells_map = true;
  }
  return rep;
}

}  // namespace ausk
