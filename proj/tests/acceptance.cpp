// Acceptance suite: one pass/fail line per criterion, at the pinned
// settings (universe {a,b}, bound 2, depth 4). Exit 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ausk/dsl.hpp"

using namespace ausk;
using Clock = std::chrono::steady_clock;

namespace {

const Settings kSettings{{"a", "b"}, 2, 4};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  if (!in) fail(ErrorKind::UsageError, "cannot open " + p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

struct Corpus {
  std::map<std::string, Registry> files;
  // (base context, extended context); base may be the empty context
  std::vector<std::pair<ContextPtr, ContextPtr>> extensions;
  std::vector<ContextPtr> contexts;
  Registry* grd = nullptr;
  Registry* delta = nullptr;
  Registry* canterm = nullptr;
  Registry* arrow = nullptr;
  Registry* ob2 = nullptr;
};

Corpus load_corpus(const std::string& dir) {
  Corpus c;
  for (const char* name : {"empty", "ob", "ob2", "term", "arrow", "delta", "canterm", "grd"}) {
    std::string path = dir + "/" + name + ".ausk";
    SourceFile f = parse_dsl(slurp(path), path);
    c.files.emplace(name, elaborate_file(f, default_kernel_options()));
  }
  c.grd = &c.files.at("grd");
  c.delta = &c.files.at("delta");
  c.canterm = &c.files.at("canterm");
  c.arrow = &c.files.at("arrow");
  c.ob2 = &c.files.at("ob2");
  for (auto& [fname, reg] : c.files) {
    for (const std::string& name : reg.context_order) {
      ContextPtr ctx = reg.context(name);
      c.contexts.push_back(ctx);
      if (reg.extension_base.count(name))
        c.extensions.emplace_back(reg.context(reg.extension_base.at(name)), ctx);
      else
        c.extensions.emplace_back(Context::empty(), ctx);
    }
  }
  return c;
}

Model empty_model() {
  Model m;
  m.ctx = Context::empty();
  m.depth = kSettings.depth;
  return m;
}

// Exhaustive search with constraint propagation for the pair (N, phi)
// satisfying the four strict-reindexing conditions against m1 over the
// extension base |> ext; phi0 pins the base components. Returns the number
// of solutions and the serialization of the last one found.
struct UniqueSearch {
  size_t solutions = 0;
  std::string witness;
};

void introduced_items_probe(const Step& st, std::vector<Name>& nodes, std::vector<Name>& edges);

UniqueSearch search_strict_solutions(const ContextPtr& base, const ContextPtr& ext,
                                     const Model& m1, const Model& m0s, const ModelIso& phi0) {
  UniqueSearch out;
  EvalEnv env{m0s.nodes, m0s.edges, m0s.verdicts};
  std::map<Name, SetMorphism> phi = phi0.components.components;
  const int depth = m1.depth;

  std::function<void(size_t)> walk = [&](size_t i) {
    if (i == ext->steps.size()) {
      try {
        EvalEnv copy = env;
        Model n = seal_model(ext, std::move(copy), depth);
        ModelIso iso;
        iso.components.components = phi;
        check_model_iso(n, m1, iso);
        ++out.solutions;
        out.witness = n.text();
      } catch (const AuskError&) {
      }
      return;
    }
    const Step& st = ext->steps[i];
    if (auto* p = std::get_if<AddPrimitiveNode>(&st)) {
      // condition 4 forces equality here
      eval_env_add_node(env, p->name, m1.node(p->name));
      phi[p->name] = identity_morphism(m1.node(p->name));
      walk(i + 1);
      env.nodes.erase(p->name);
      env.edges.erase(identity_edge_name(p->name));
      phi.erase(p->name);
    } else if (auto* p = std::get_if<AddPrimitiveEdge>(&st)) {
      // all candidate interpretations, pruned by the iso square against m1
      const SetMorphism& pa = phi.at(p->edge.src);
      const SetMorphism& pb = phi.at(p->edge.tgt);
      for (SetMorphism f : all_functions(env.nodes.at(p->edge.src), env.nodes.at(p->edge.tgt))) {
        SetMorphism lhs = compose_morphisms(f, pb);
        SetMorphism rhs = compose_morphisms(pa, m1.edge(p->edge.id));
        if (!(lhs.table == rhs.table)) continue;
        f.desc = p->edge.id;
        env.edges[p->edge.id] = std::move(f);
        walk(i + 1);
      }
      env.edges.erase(p->edge.id);
    } else if (auto* p = std::get_if<AddUniversal>(&st)) {
      const Universal& u = p->u;
      UniversalInterp canon = interpret_universal(u, env.nodes, env.edges, depth);
      std::vector<Name> nn, ne;
      introduced_items_probe(st, nn, ne);
      try {
        eval_model_step(env, st, depth);
      } catch (const AuskError&) {
        for (const Name& n : nn) env.nodes.erase(n);
        for (const Name& e : ne) env.edges.erase(e);
        return;
      }
      auto cmp = comparison_component(u, canon, m1, phi);
      bool ok = cmp.has_value();
      if (ok) phi[u.apex] = *cmp;
      if (ok && u.kind == UniversalKind::List) {
        const Universal* prod = ext->derived.universal_with_apex(u.product_apex);
        UniversalInterp pc = interpret_universal(*prod, env.nodes, env.edges, depth);
        auto pcmp = comparison_component(*prod, pc, m1, phi);
        if (pcmp)
          phi[u.product_apex] = *pcmp;
        else
          ok = false;
      }
      if (ok) walk(i + 1);
      phi.erase(u.apex);
      if (u.kind == UniversalKind::List) phi.erase(u.product_apex);
      for (const Name& n : nn) env.nodes.erase(n);
      for (const Name& e : ne) env.edges.erase(e);
      env.verdicts.erase(u.apex);
      if (u.kind == UniversalKind::List) env.verdicts.erase(u.product_apex);
    } else {
      std::vector<Name> nn, ne;
      introduced_items_probe(st, nn, ne);
      try {
        eval_model_step(env, st, depth);
      } catch (const AuskError&) {
        for (const Name& n : nn) env.nodes.erase(n);
        for (const Name& e : ne) env.edges.erase(e);
        return;
      }
      walk(i + 1);
      for (const Name& n : nn) env.nodes.erase(n);
      for (const Name& e : ne) env.edges.erase(e);
    }
  };
  (void)base;
  walk(base->steps.size());
  return out;
}

// mirror of the names a step introduces (kept local to the test binary)
void introduced_items_probe(const Step& st, std::vector<Name>& nodes, std::vector<Name>& edges) {
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

std::set<std::string> subset_filter_oracle_points(const Model& m) {
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
  std::set<std::string> points;
  for (uint64_t mask = 0; mask < (uint64_t{1} << gs.size()); ++mask) {
    std::set<std::string> f;
    for (size_t i = 0; i < gs.size(); ++i)
      if (mask & (uint64_t{1} << i)) f.insert(gs[i]);
    bool ok = true;
    for (const Value& r : m.node("R").elems) {
      std::set<std::string> premise = decode_fin(lam.apply(r));
      if (!std::includes(f.begin(), f.end(), premise.begin(), premise.end())) continue;
      bool some = false;
      for (const Value& d : m.node("D").elems) {
        if (!(pi.apply(d) == r)) continue;
        std::set<std::string> conclusion = decode_fin(rho.apply(d));
        if (std::includes(f.begin(), f.end(), conclusion.begin(), conclusion.end())) some = true;
      }
      if (!some) {
        ok = false;
        break;
      }
    }
    if (ok) {
      std::string key;
      for (const auto& x : f) key += x + ",";
      points.insert(key);
    }
  }
  return points;
}

std::string chi_subset_key(const Model& base, const Point& p) {
  std::string key;
  const SetMorphism& chi = p.funs.at("chi");
  for (const Value& g : base.node("G").elems)
    if (chi.apply(g).kid(0).is(Value::Tag::InjL)) key += g.label() + ",";
  return key;
}

struct Runner {
  bool all_pass = true;
  void run(int index, const std::string& name, const std::function<bool(std::string&)>& fn) {
    auto t0 = Clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%.1fs%s%s)\n", ok ? "PASS" : "FAIL", index, name.c_str(),
                secs, detail.empty() ? "" : "; ", detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && ok;
  }
};

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "corpus";
  std::printf("acceptance: %s\n", kSettings.echo().c_str());
  Corpus corpus = load_corpus(dir);
  Runner r;
  const AuFunctor tag_s = AuFunctor::tagging("s"), tag_t = AuFunctor::tagging("t");

  // criterion 1: strict reindexing is unique, found by exhaustive search
  r.run(1, "strict-reindexing uniqueness over every corpus extension", [&](std::string& detail) {
    size_t models_checked = 0;
    for (const auto& [base, ext] : corpus.extensions) {
      ContextMap u = extension_map(base, ext);
      auto models = enumerate_strict_models(ext, kSettings);
      std::vector<int> oks(models.size(), 0);
      auto task = [&](size_t i) {
        const Model& n = models[i];
        Model m1 = apply_functor(tag_t, n);
        StrictifyResult based = reindex_with_iso(tag_t, act(u, n));
        StrictifyResult direct = strictify(u, m1, based.model, based.iso);
        UniqueSearch search = search_strict_solutions(base, ext, m1, based.model, based.iso);
        bool good = search.solutions == 1 && search.witness == direct.model.text();
        return std::vector<int>{good ? 1 : 0};
      };
      auto results = indexed_collect<int>(models.size(), ExecMode::Parallel, task);
      for (int ok : results)
        if (!ok) return false;
      models_checked += models.size();
    }
    detail = std::to_string(models_checked) + " tagged models";
    return true;
  });

  // criterion 2: every model has exactly one strict isomorph agreeing on the
  // primitive nodes
  r.run(2, "unique strict isomorph for strict and tagged models", [&](std::string& detail) {
    size_t checked = 0;
    for (const ContextPtr& ctx : corpus.contexts) {
      ContextMap u = extension_map(Context::empty(), ctx);
      auto models = enumerate_strict_models(ctx, kSettings);
      auto task = [&](size_t i) {
        const Model& n = models[i];
        bool good = true;
        // strict input: the unique solution is the model itself
        {
          UniqueSearch s = search_strict_solutions(Context::empty(), ctx, n, empty_model(), {});
          good = good && s.solutions == 1 && s.witness == n.text();
        }
        // tagged input
        {
          Model m1 = apply_functor(tag_t, n);
          UniqueSearch s = search_strict_solutions(Context::empty(), ctx, m1, empty_model(), {});
          Model direct = reindex(tag_t, n);
          good = good && s.solutions == 1 && s.witness == direct.text();
        }
        return std::vector<int>{good ? 1 : 0};
      };
      auto results = indexed_collect<int>(models.size(), ExecMode::Parallel, task);
      for (int ok : results)
        if (!ok) return false;
      checked += models.size();
    }
    detail = std::to_string(checked) + " models";
    return true;
  });

  // criterion 3: byte-identical strict functoriality
  r.run(3, "strict functoriality of reindexing", [&](std::string& detail) {
    const std::vector<AuFunctor> fs = {AuFunctor::identity(), tag_s, tag_t};
    size_t checked = 0;
    for (const ContextPtr& ctx : corpus.contexts) {
      auto models = enumerate_strict_models(ctx, kSettings);
      auto task = [&](size_t i) {
        for (const AuFunctor& f0 : fs)
          for (const AuFunctor& f1 : fs)
            if (!verify_strict_composition(f0, f1, models[i])) return std::vector<int>{0};
        return std::vector<int>{1};
      };
      auto results = indexed_collect<int>(models.size(), ExecMode::Parallel, task);
      for (int ok : results)
        if (!ok) return false;
      checked += models.size() * fs.size() * fs.size();
    }
    detail = std::to_string(checked) + " pairs";
    return true;
  });

  // criterion 4: along extension maps the two actions agree exactly and the
  // coherence iso is the identity; the terminal-picking map breaks it
  r.run(4, "coherence along extension maps, with the known counterexample", [&](std::string& detail) {
    size_t checked = 0;
    for (const auto& [base, ext] : corpus.extensions) {
      ContextMap u = extension_map(base, ext);
      auto models = enumerate_strict_models(ext, kSettings);
      auto task = [&](size_t i) {
        SigmaCell cell = sigma(tag_t, u, models[i]);
        bool good = cell.identity();
        Model lhs = reindex(tag_t, act(u, models[i]));
        Model rhs = act(u, reindex(tag_t, models[i]));
        good = good && lhs.text() == rhs.text();
        return std::vector<int>{good ? 1 : 0};
      };
      auto results = indexed_collect<int>(models.size(), ExecMode::Parallel, task);
      for (int ok : results)
        if (!ok) return false;
      checked += models.size();
    }
    // the counterexample: T is not primitive in Ob's image
    ContextMap to_term = corpus.canterm->map("ToTerm");
    Model m = eval_strict_model(to_term.dom, {}, kSettings.depth);
    SigmaCell cell = sigma(tag_t, to_term, m);
    if (cell.identity()) return false;
    if (!(cell.lhs.node("X").elems[0].text() == "tag(t, ())")) return false;
    if (!(cell.rhs.node("X").elems[0] == Value::unit())) return false;
    detail = std::to_string(checked) + " extension-map cells; counterexample reproduced";
    return true;
  });

  // criterion 5: the cubical pasting equations on sampled cells
  r.run(5, "cubical pasting equations on >= 100 sampled cells", [&](std::string& detail) {
    std::vector<std::pair<AuFunctor, AuFunctor>> fpairs = {
        {AuFunctor::identity(), AuFunctor::identity()},
        {AuFunctor::identity(), tag_t},
        {tag_s, tag_t},
        {tag_t, AuFunctor::composite({tag_s, tag_t})}};
    std::vector<ContextMap> maps;
    maps.push_back(corpus.canterm->map("ToTerm"));
    maps.push_back(corpus.delta->map("Delta"));
    maps.push_back(corpus.delta->map("Proj1"));
    maps.push_back(corpus.ob2->map("Proj1"));
    maps.push_back(corpus.ob2->map("Proj2"));
    maps.push_back(corpus.arrow->map("Fwd"));
    maps.push_back(corpus.arrow->map("Bwd"));
    for (const ContextPtr& ctx : corpus.contexts)
      if (ctx->steps.size() <= 6) maps.push_back(identity_map(ctx));
    // arrow contexts for identity beta cells, keyed by codomain
    std::map<const Context*, ArrowContext> arrows;
    auto arrow_for = [&](const ContextPtr& c) -> ArrowContext& {
      auto it = arrows.find(c.get());
      if (it == arrows.end()) it = arrows.emplace(c.get(), arrow_context(c)).first;
      return it->second;
    };
    int cells = 0, failures = 0;
    for (const ContextMap& h : maps) {
      for (const ContextMap& hp : maps) {
        if (!(h.cod->steps.size() == hp.dom->steps.size() && h.cod->is_prefix_of(*hp.dom)))
          continue;
        auto models = enumerate_strict_models(h.dom, kSettings);
        size_t step = models.size() > 4 ? models.size() / 4 : 1;
        for (size_t mi = 0; mi < models.size(); mi += step) {
          for (const auto& [f0, f1] : fpairs) {
            GrayInputs in;
            in.f0 = f0;
            in.f1 = f1;
            in.alpha = NatTransform{f0, f1};
            in.h = h;
            in.hp = hp;
            ArrowContext& arr = arrow_for(h.cod);
            TwoCell idc = identity_two_cell(h, arr);
            in.beta = &idc;
            in.beta_arrow = &arr;
            in.m = models[mi];
            in.opts = default_kernel_options();
            GrayReport rep = verify_gray(in);
            ++cells;
            if (!rep.pass()) ++failures;
          }
        }
      }
    }
    detail = std::to_string(cells) + " cells, " + std::to_string(failures) + " failures";
    return cells >= 100 && failures == 0;
  });

  // criterion 6: the diagonal counterexample
  r.run(6, "the pair (X1,X2) is no diagonal reduct and the map is rejected", [&](std::string&) {
    ContextMap d = corpus.delta->map("Delta");
    Model pair_model = corpus.delta->model("Pair", kSettings.depth);
    Model base;
    {
      Assignment a;
      a.nodes["X"] = finite_set({Value::atom("a")}, "prim");
      base = eval_strict_model(d.dom, a, kSettings.depth);
    }
    Model diag = act(d, base);
    // isomorphic to a diagonal reduct
    bool iso_found = false;
    for (const ModelHom& h : enumerate_homomorphisms(d.cod, pair_model, diag, kSettings.depth))
      if (hom_is_iso(h)) iso_found = true;
    if (!iso_found) return false;
    // but not itself a reduct
    for (const Model& n : enumerate_strict_models(d.dom, kSettings))
      if (act(d, n).text() == pair_model.text()) return false;
    try {
      strictify(d, pair_model, base, identity_iso(base));
      return false;
    } catch (const AuskError& e) {
      return e.kind == ErrorKind::NotAnExtensionMap;
    }
  });

  // criterion 7: models of the arrow context against homomorphism triples
  r.run(7, "arrow-context models biject with homomorphism triples", [&](std::string& detail) {
    std::ostringstream note;
    auto full_check = [&](const ContextPtr& ctx, const Settings& s) {
      ArrowContext arr = arrow_context(ctx, default_kernel_options());
      auto arrow_models = enumerate_strict_models(arr.ctx, s);
      auto base_models = enumerate_strict_models(ctx, s);
      size_t triples = 0;
      std::set<std::string> assembled;
      for (const Model& m : base_models)
        for (const Model& n : base_models)
          for (const ModelHom& h : enumerate_homomorphisms(ctx, m, n, s.depth)) {
            ++triples;
            assembled.insert(assemble_arrow_model(arr, m, n, h, s.depth).text());
          }
      if (triples != arrow_models.size() || assembled.size() != triples) return false;
      for (const Model& am : arrow_models) {
        if (!assembled.count(am.text())) return false;
        ArrowModelSplit sp = split_arrow_model(arr, am);
        if (!(assemble_arrow_model(arr, sp.source, sp.target, sp.hom, s.depth).text() ==
              am.text()))
          return false;
      }
      return true;
    };
    for (const char* name : {"ob", "term"}) {
      ContextPtr ctx = corpus.files.at(name).context(name == std::string("ob") ? "Ob" : "Term");
      for (int k : {1, 2}) {
        Settings s = kSettings;
        s.bound = k;
        if (!full_check(ctx, s)) return false;
      }
    }
    {
      ContextPtr grd = corpus.grd->context("GRD");
      Settings s1 = kSettings;
      s1.bound = 1;
      if (!full_check(grd, s1)) return false;
      note << "GRD exhaustive at bound 1";
      // sampled round trips at bound 2
      ArrowContext arr = arrow_context(grd, default_kernel_options());
      auto models = enumerate_strict_models(grd, kSettings);
      size_t step = models.size() / 7 + 1, samples = 0;
      for (size_t i = 0; i < models.size(); i += step) {
        for (size_t j = 0; j < models.size(); j += step) {
          for (const ModelHom& h :
               enumerate_homomorphisms(grd, models[i], models[j], kSettings.depth)) {
            Model am = assemble_arrow_model(arr, models[i], models[j], h, kSettings.depth);
            ArrowModelSplit sp = split_arrow_model(arr, am);
            bool ok = sp.source.text() == models[i].text() &&
                      sp.target.text() == models[j].text() &&
                      assemble_arrow_model(arr, sp.source, sp.target, sp.hom, kSettings.depth)
                              .text() == am.text();
            if (!ok) return false;
            ++samples;
          }
        }
      }
      note << ", " << samples << " sampled round trips at bound 2";
    }
    detail = note.str();
    return true;
  });

  // criteria 8 and 9 share the per-base work
  GeometricExtension compiled =
      compile_geometric(corpus.grd->context("GRD"), corpus.grd->context("GRD_PT"));
  auto norm = normalize(compiled);
  std::vector<Model> grd_models = enumerate_strict_models(corpus.grd->context("GRD"), kSettings);

  r.run(8, "compiler bijection and the subset-filter oracle", [&](std::string& detail) {
    ContextPtr grd = corpus.grd->context("GRD");
    ContextPtr pt = corpus.grd->context("GRD_PT");
    auto task = [&](size_t i) {
      const Model& m = grd_models[i];
      InstantiatedTheory t = instantiate(compiled, m);
      auto pts = enumerate_points(t, kSettings, ExecMode::Serial);
      Assignment pin;
      for (const Name& n : grd->primitive_nodes) pin.nodes[n] = m.node(n);
      for (const Name& e : grd->primitive_edges) pin.edges[e] = m.edge(e);
      auto direct = enumerate_strict_models(pt, kSettings, ExecMode::Serial, &pin);
      if (pts.size() != direct.size()) return std::vector<int>{0};
      for (size_t k = 0; k < pts.size(); ++k)
        if (!(point_to_model(pt, t, pts[k]).text() == direct[k].text()))
          return std::vector<int>{0};
      std::set<std::string> got;
      for (const Point& p : pts) got.insert(chi_subset_key(m, p));
      if (got.size() != pts.size()) return std::vector<int>{0};
      if (got != subset_filter_oracle_points(m)) return std::vector<int>{0};
      return std::vector<int>{1};
    };
    auto results = indexed_collect<int>(grd_models.size(), ExecMode::Parallel, task);
    for (int ok : results)
      if (!ok) return false;
    detail = std::to_string(grd_models.size()) + " base models";
    return true;
  });

  r.run(9, "normalization preserves point sets", [&](std::string& detail) {
    auto task = [&](size_t i) {
      InstantiatedTheory t = instantiate(compiled, grd_models[i]);
      auto direct = enumerate_points(t, kSettings, ExecMode::Serial);
      auto normed = enumerate_points_normalized(t, norm, kSettings, ExecMode::Serial);
      std::vector<std::string> a, b;
      for (const Point& p : direct) a.push_back(p.text());
      for (const Point& p : normed) b.push_back(p.text());
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      return std::vector<int>{a == b ? 1 : 0};
    };
    auto results = indexed_collect<int>(grd_models.size(), ExecMode::Parallel, task);
    for (int ok : results)
      if (!ok) return false;
    detail = std::to_string(grd_models.size()) + " instances";
    return true;
  });

  // criterion 10: equivalence steps are conservative at bound 2
  r.run(10, "equivalence-step conservativity", [&](std::string& detail) {
    size_t steps_checked = 0;
    for (const ContextPtr& ctx : corpus.contexts) {
      bool any_equiv = false;
      for (const Step& st : ctx->steps) any_equiv = any_equiv || is_equivalence_step(st);
      if (!any_equiv) continue;
      // incremental prefix models; every equivalence step must keep them all
      std::vector<EvalEnv> envs(1);
      const std::vector<SetObject> subsets = all_subsets(kSettings.universe, kSettings.bound);
      for (const Step& st : ctx->steps) {
        if (auto* p = std::get_if<AddPrimitiveNode>(&st)) {
          std::vector<EvalEnv> next;
          for (const EvalEnv& env : envs)
            for (const SetObject& sub : subsets) {
              next.push_back(env);
              eval_env_add_node(next.back(), p->name, sub);
            }
          envs = std::move(next);
        } else if (auto* p = std::get_if<AddPrimitiveEdge>(&st)) {
          std::vector<EvalEnv> next;
          for (const EvalEnv& env : envs)
            for (SetMorphism& f :
                 all_functions(env.nodes.at(p->edge.src), env.nodes.at(p->edge.tgt))) {
              next.push_back(env);
              f.desc = p->edge.id;
              next.back().edges[p->edge.id] = std::move(f);
            }
          envs = std::move(next);
        } else {
          bool equiv = is_equivalence_step(st);
          size_t before = envs.size();
          std::vector<EvalEnv> next;
          for (EvalEnv& env : envs) {
            try {
              eval_model_step(env, st, kSettings.depth);
              next.push_back(std::move(env));
            } catch (const AuskError& e) {
              if (e.kind != ErrorKind::CommutativityViolation) throw;
            }
          }
          envs = std::move(next);
          if (equiv) {
            ++steps_checked;
            if (envs.size() != before) {
              detail = "conservativity fails at " + step_text(st) + " of " + ctx->name;
              return false;
            }
          }
        }
      }
    }
    detail = std::to_string(steps_checked) + " equivalence steps";
    return true;
  });

  std::printf("acceptance: %s\n", r.all_pass ? "ALL PASS" : "FAILURES");
  return r.all_pass ? 0 : 1;
}
