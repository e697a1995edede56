#include "ausk/kernel.hpp"

#include <algorithm>
#include <sstream>

namespace ausk {

namespace {

bool name_taken(const Sketch& s, const Name& n) { return s.has_node(n) || s.has_edge(n); }

void need_node(const Sketch& s, const Name& n, const char* what) {
  if (!s.has_node(n)) fail(ErrorKind::DanglingReference, std::string(what) + ": unknown node " + n);
}

void need_edge(const Sketch& s, const Name& e, const char* what) {
  if (!s.has_edge(e)) fail(ErrorKind::DanglingReference, std::string(what) + ": unknown edge " + e);
}

void need_fresh(const Sketch& s, const Name& n, const char* what) {
  if (name_taken(s, n))
    fail(ErrorKind::FreshnessViolation, std::string(what) + ": name " + n + " already in use");
}

void add_node(Sketch& s, const Name& n) {
  s.nodes.insert(n);
  Name id = identity_edge_name(n);
  s.edges[id] = EdgeDecl{id, n, n};
  s.identities[n] = id;
  s.object_equalities.insert(id);
}

void add_edge(Sketch& s, const EdgeDecl& e) { s.edges[e.id] = e; }

bool is_terminal_apex(const Sketch& s, const Name& n) {
  const Universal* u = s.universal_with_apex(n);
  return u && u->kind == UniversalKind::Terminal;
}

bool is_initial_apex(const Sketch& s, const Name& n) {
  const Universal* u = s.universal_with_apex(n);
  return u && u->kind == UniversalKind::Initial;
}

void check_triangle_shape(const Sketch& s, const Triangle& t, const char* what) {
  need_edge(s, t.f, what);
  need_edge(s, t.g, what);
  need_edge(s, t.h, what);
  const EdgeDecl &f = s.edge(t.f), &g = s.edge(t.g), &h = s.edge(t.h);
  if (f.tgt != g.src || f.src != h.src || g.tgt != h.tgt)
    fail(ErrorKind::DanglingReference,
         std::string(what) + ": triangle endpoints disagree for " + t.f + ";" + t.g + "=" + t.h);
}

// Reduce an edge path: drop identities, contract segments recorded as
// composites by a commutativity. Returns a path that denotes the same
// morphism.
std::vector<Name> reduce_path(const Sketch& s, std::vector<Name> p) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < p.size();) {
      if (p.size() > 1 && s.object_equalities.count(p[i]) &&
          s.edge(p[i]).src == s.edge(p[i]).tgt) {
        p.erase(p.begin() + i);
        changed = true;
        continue;
      }
      ++i;
    }
    for (size_t i = 0; i + 1 < p.size(); ++i) {
      for (const Triangle& t : s.commutativities) {
        if (t.f == p[i] && t.g == p[i + 1]) {
          p[i] = t.h;
          p.erase(p.begin() + i + 1);
          changed = true;
          break;
        }
      }
      if (changed) break;
    }
  }
  return p;
}

std::pair<Name, Name> path_endpoints(const Sketch& s, const std::vector<Name>& p) {
  return {s.edge(p.front()).src, s.edge(p.back()).tgt};
}

// Expand composite edges through their defining triangles, leftmost first.
std::vector<Name> expand_path(const Sketch& s, std::vector<Name> p, int fuel) {
  for (int step = 0; step < fuel; ++step) {
    bool changed = false;
    for (size_t i = 0; i < p.size() && !changed; ++i) {
      for (const Triangle& t : s.commutativities) {
        if (t.h == p[i] && t.f != p[i] && t.g != p[i]) {
          p[i] = t.g;
          p.insert(p.begin() + i, t.f);
          changed = true;
          break;
        }
      }
    }
    if (!changed) break;
  }
  // drop identity loops
  for (size_t i = 0; i < p.size();) {
    if (p.size() > 1 && s.object_equalities.count(p[i]) && s.edge(p[i]).src == s.edge(p[i]).tgt)
      p.erase(p.begin() + i);
    else
      ++i;
  }
  return p;
}

// Syntactic path equality: identity/composite reduction, literal match,
// terminal-target or initial-source uniqueness, designated squares, and
// fillin uniqueness out of pushouts (two maps out of a pushout agree when
// they agree after both injections).
bool paths_equal_syntactic_rec(const Sketch& s, std::vector<Name> p1, std::vector<Name> p2,
                               int fuel) {
  if (fuel <= 0) return false;
  auto [a1, b1] = path_endpoints(s, p1);
  auto [a2, b2] = path_endpoints(s, p2);
  if (a1 != a2 || b1 != b2) return false;
  if (is_terminal_apex(s, b1)) return true;
  if (is_initial_apex(s, a1)) return true;
  if (reduce_path(s, p1) == reduce_path(s, p2)) return true;
  if (expand_path(s, p1, 32) == expand_path(s, p2, 32)) return true;
  p1 = reduce_path(s, p1);
  p2 = reduce_path(s, p2);
  if (p1 == p2) return true;
  // Designated squares of the universals.
  if (p1.size() == 2 && p2.size() == 2) {
    for (const Universal& u : s.universals) {
      if (u.kind == UniversalKind::Pullback) {
        if ((p1[0] == u.proj1 && p1[1] == u.f && p2[0] == u.proj2 && p2[1] == u.g) ||
            (p1[0] == u.proj2 && p1[1] == u.g && p2[0] == u.proj1 && p2[1] == u.f))
          return true;
      } else if (u.kind == UniversalKind::Pushout) {
        if ((p1[0] == u.f && p1[1] == u.proj1 && p2[0] == u.g && p2[1] == u.proj2) ||
            (p1[0] == u.g && p1[1] == u.proj2 && p2[0] == u.f && p2[1] == u.proj1))
          return true;
      }
    }
  }
  const Universal* src_po = s.universal_with_apex(a1);
  if (src_po && src_po->kind == UniversalKind::Pushout) {
    auto with = [&](const Name& inj, const std::vector<Name>& p) {
      std::vector<Name> q{inj};
      q.insert(q.end(), p.begin(), p.end());
      return q;
    };
    if (paths_equal_syntactic_rec(s, with(src_po->proj1, p1), with(src_po->proj1, p2), fuel - 1) &&
        paths_equal_syntactic_rec(s, with(src_po->proj2, p1), with(src_po->proj2, p2), fuel - 1))
      return true;
  }
  const Universal* tgt_pb = s.universal_with_apex(b1);
  if (tgt_pb && tgt_pb->kind == UniversalKind::Pullback) {
    auto with = [&](const std::vector<Name>& p, const Name& proj) {
      std::vector<Name> q = p;
      q.push_back(proj);
      return q;
    };
    if (paths_equal_syntactic_rec(s, with(p1, tgt_pb->proj1), with(p2, tgt_pb->proj1), fuel - 1) &&
        paths_equal_syntactic_rec(s, with(p1, tgt_pb->proj2), with(p2, tgt_pb->proj2), fuel - 1))
      return true;
  }
  return false;
}

bool paths_equal_syntactic(const Sketch& s, std::vector<Name> p1, std::vector<Name> p2) {
  return paths_equal_syntactic_rec(s, std::move(p1), std::move(p2), 5);
}

struct KernelState {
  Sketch sk;
  std::set<Name> prim_nodes, prim_edges;
  std::vector<Step> steps_so_far;
};

bool paths_equal_checked(const KernelState& st, const std::vector<Name>& p1,
                         const std::vector<Name>& p2, const KernelOptions& opts) {
  if (paths_equal_syntactic(st.sk, p1, p2)) return true;
  if (opts.oracle) return opts.oracle->paths_equal(st.steps_so_far, p1, p2);
  return false;
}

// The cocone condition f;u = g;v for a copair out of the pushout `po`.
bool copair_cocone_ok(const KernelState& st, const Universal& po, const Name& u, const Name& v,
                      const KernelOptions& opts, JustRule& used) {
  if (is_initial_apex(st.sk, st.sk.edge(po.f).src)) {
    used = JustRule::InitialSpan;
    return true;
  }
  if (paths_equal_syntactic(st.sk, {po.f, u}, {po.g, v})) {
    used = JustRule::KernelPair;
    return true;
  }
  if (opts.oracle && opts.oracle->paths_equal(st.steps_so_far, {po.f, u}, {po.g, v})) {
    used = JustRule::Semantic;
    return true;
  }
  return false;
}

const Universal& find_universal(const Sketch& s, const Name& apex, const char* what) {
  const Universal* u = s.universal_with_apex(apex);
  if (!u) fail(ErrorKind::DanglingReference, std::string(what) + ": no universal with apex " + apex);
  return *u;
}

void apply_add_universal(KernelState& st, const Universal& u0) {
  Universal u = u0;
  Sketch& s = st.sk;
  switch (u.kind) {
    case UniversalKind::Terminal:
    case UniversalKind::Initial: {
      need_fresh(s, u.apex, "universal");
      add_node(s, u.apex);
      s.universals.push_back(u);
      break;
    }
    case UniversalKind::Pullback: {
      need_edge(s, u.f, "pullback");
      need_edge(s, u.g, "pullback");
      if (s.edge(u.f).tgt != s.edge(u.g).tgt)
        fail(ErrorKind::MalformedUniversal, "pullback legs must share a codomain: " + u.apex);
      need_fresh(s, u.apex, "pullback apex");
      need_fresh(s, u.proj1, "pullback projection");
      need_fresh(s, u.proj2, "pullback projection");
      add_node(s, u.apex);
      add_edge(s, {u.proj1, u.apex, s.edge(u.f).src});
      add_edge(s, {u.proj2, u.apex, s.edge(u.g).src});
      s.universals.push_back(u);
      break;
    }
    case UniversalKind::Pushout: {
      need_edge(s, u.f, "pushout");
      need_edge(s, u.g, "pushout");
      if (s.edge(u.f).src != s.edge(u.g).src)
        fail(ErrorKind::MalformedUniversal, "pushout legs must share a domain: " + u.apex);
      need_fresh(s, u.apex, "pushout apex");
      need_fresh(s, u.proj1, "pushout injection");
      need_fresh(s, u.proj2, "pushout injection");
      add_node(s, u.apex);
      add_edge(s, {u.proj1, s.edge(u.f).tgt, u.apex});
      add_edge(s, {u.proj2, s.edge(u.g).tgt, u.apex});
      s.universals.push_back(u);
      break;
    }
    case UniversalKind::List: {
      need_node(s, u.base, "list base");
      need_node(s, u.terminal_apex, "list terminal");
      if (!is_terminal_apex(s, u.terminal_apex))
        fail(ErrorKind::MalformedUniversal, "list " + u.apex + " needs a terminal apex");
      need_edge(s, u.base_to_terminal, "list");
      const EdgeDecl& bt = s.edge(u.base_to_terminal);
      if (bt.src != u.base || bt.tgt != u.terminal_apex)
        fail(ErrorKind::MalformedUniversal, "list " + u.apex + ": bad base -> terminal edge");
      for (const Name& n :
           {u.apex, u.apex_to_terminal, u.product_apex, u.proj1, u.proj2, u.nil, u.cons})
        need_fresh(s, n, "list");
      add_node(s, u.apex);
      add_node(s, u.product_apex);
      add_edge(s, {u.apex_to_terminal, u.apex, u.terminal_apex});
      add_edge(s, {u.proj1, u.product_apex, u.base});
      add_edge(s, {u.proj2, u.product_apex, u.apex});
      add_edge(s, {u.nil, u.terminal_apex, u.apex});
      add_edge(s, {u.cons, u.product_apex, u.apex});
      Universal prod;
      prod.kind = UniversalKind::Pullback;
      prod.apex = u.product_apex;
      prod.f = u.base_to_terminal;
      prod.g = u.apex_to_terminal;
      prod.proj1 = u.proj1;
      prod.proj2 = u.proj2;
      s.universals.push_back(prod);
      s.universals.push_back(u);
      break;
    }
  }
}

void apply_declare_fillin(KernelState& st, const DeclareFillin& df, const KernelOptions& opts,
                          bool check_just) {
  Sketch& s = st.sk;
  const FillinSpec& fs = df.spec;
  need_fresh(s, df.result, "fillin");
  const Universal& u = find_universal(s, fs.universal_apex, "fillin");
  JustRule used = JustRule::FillinLaw;
  EdgeDecl decl = fillin_edge_decl(s, fs, df.result);
  bool object_equality = false;
  switch (fs.kind) {
    case FillinKind::TerminalFrom: {
      if (u.kind != UniversalKind::Terminal)
        fail(ErrorKind::MalformedUniversal, "terminal fillin needs a terminal universal");
      need_node(s, fs.source, "fillin");
      object_equality = is_terminal_apex(s, fs.source);
      break;
    }
    case FillinKind::InitialTo: {
      if (u.kind != UniversalKind::Initial)
        fail(ErrorKind::MalformedUniversal, "initial fillin needs an initial universal");
      need_node(s, fs.target, "fillin");
      object_equality = is_initial_apex(s, fs.target);
      break;
    }
    case FillinKind::PullbackPair: {
      if (u.kind != UniversalKind::Pullback)
        fail(ErrorKind::MalformedUniversal, "pair fillin needs a pullback universal");
      need_edge(s, fs.leg1, "fillin");
      need_edge(s, fs.leg2, "fillin");
      const EdgeDecl &l1 = s.edge(fs.leg1), &l2 = s.edge(fs.leg2);
      if (l1.src != l2.src || l1.tgt != s.edge(u.f).src || l2.tgt != s.edge(u.g).src)
        fail(ErrorKind::MalformedUniversal, "pair fillin cone mistyped for " + df.result);
      if (check_just && !paths_equal_checked(st, {fs.leg1, u.f}, {fs.leg2, u.g}, opts))
        fail(ErrorKind::UnjustifiedStep, "pair fillin cone does not commute: " + df.result);
      // Fillin between two pullbacks over the same data is an object equality.
      const Universal* src_u = s.universal_with_apex(l1.src);
      if (src_u && src_u->kind == UniversalKind::Pullback && src_u->f == u.f && src_u->g == u.g &&
          src_u->proj1 == fs.leg1 && src_u->proj2 == fs.leg2)
        object_equality = true;
      break;
    }
    case FillinKind::PushoutCopair: {
      if (u.kind != UniversalKind::Pushout)
        fail(ErrorKind::MalformedUniversal, "copair fillin needs a pushout universal");
      need_edge(s, fs.leg1, "fillin");
      need_edge(s, fs.leg2, "fillin");
      const EdgeDecl &l1 = s.edge(fs.leg1), &l2 = s.edge(fs.leg2);
      if (l1.tgt != l2.tgt || l1.src != s.edge(u.proj1).src || l2.src != s.edge(u.proj2).src)
        fail(ErrorKind::MalformedUniversal, "copair fillin cocone mistyped for " + df.result);
      if (check_just && !copair_cocone_ok(st, u, fs.leg1, fs.leg2, opts, used))
        fail(ErrorKind::UnjustifiedStep, "copair cocone does not commute: " + df.result);
      const Universal* tgt_u = s.universal_with_apex(l1.tgt);
      if (tgt_u && tgt_u->kind == UniversalKind::Pushout && tgt_u->f == u.f && tgt_u->g == u.g &&
          tgt_u->proj1 == fs.leg1 && tgt_u->proj2 == fs.leg2)
        object_equality = true;
      break;
    }
    case FillinKind::ListFold: {
      if (u.kind != UniversalKind::List)
        fail(ErrorKind::MalformedUniversal, "fold fillin needs a list universal");
      need_node(s, fs.target, "fold");
      need_edge(s, fs.nil_image, "fold");
      need_edge(s, fs.cons_alg, "fold");
      const EdgeDecl &b0 = s.edge(fs.nil_image), &c = s.edge(fs.cons_alg);
      if (b0.src != u.terminal_apex || b0.tgt != fs.target)
        fail(ErrorKind::MalformedUniversal, "fold nil image mistyped for " + df.result);
      const Universal& prod = find_universal(s, fs.cons_product, "fold");
      if (prod.kind != UniversalKind::Pullback)
        fail(ErrorKind::MalformedUniversal, "fold cons product must be a pullback");
      if (s.edge(prod.proj1).tgt != u.base || s.edge(prod.proj2).tgt != fs.target ||
          c.src != fs.cons_product || c.tgt != fs.target)
        fail(ErrorKind::MalformedUniversal, "fold cons algebra mistyped for " + df.result);
      break;
    }
    case FillinKind::ListFoldParam: {
      if (u.kind != UniversalKind::List)
        fail(ErrorKind::MalformedUniversal, "fold fillin needs a list universal");
      need_node(s, fs.target, "pfold");
      need_node(s, fs.param, "pfold");
      need_edge(s, fs.nil_image, "pfold");
      need_edge(s, fs.cons_alg, "pfold");
      const EdgeDecl &b = s.edge(fs.nil_image), &c = s.edge(fs.cons_alg);
      if (b.src != fs.param || b.tgt != fs.target)
        fail(ErrorKind::MalformedUniversal, "pfold parameter map mistyped for " + df.result);
      const Universal& dom = find_universal(s, fs.domain_product, "pfold");
      if (dom.kind != UniversalKind::Pullback || s.edge(dom.proj1).tgt != u.apex ||
          s.edge(dom.proj2).tgt != fs.param)
        fail(ErrorKind::MalformedUniversal, "pfold domain product mistyped for " + df.result);
      const Universal& prod = find_universal(s, fs.cons_product, "pfold");
      if (prod.kind != UniversalKind::Pullback || s.edge(prod.proj1).tgt != u.base ||
          s.edge(prod.proj2).tgt != fs.target || c.src != fs.cons_product || c.tgt != fs.target)
        fail(ErrorKind::MalformedUniversal, "pfold cons algebra mistyped for " + df.result);
      break;
    }
  }
  (void)used;
  add_edge(s, decl);
  if (object_equality) s.object_equalities.insert(df.result);
  // Record the fillin laws expressible as plain triangles.
  switch (fs.kind) {
    case FillinKind::PullbackPair:
      s.commutativities.insert({df.result, u.proj1, fs.leg1});
      s.commutativities.insert({df.result, u.proj2, fs.leg2});
      break;
    case FillinKind::PushoutCopair:
      s.commutativities.insert({u.proj1, df.result, fs.leg1});
      s.commutativities.insert({u.proj2, df.result, fs.leg2});
      break;
    case FillinKind::ListFold:
      s.commutativities.insert({u.nil, df.result, fs.nil_image});
      break;
    default:
      break;
  }
}

void apply_step(KernelState& st, const Step& step, const KernelOptions& opts, bool check_just) {
  Sketch& s = st.sk;
  if (auto* p = std::get_if<AddPrimitiveNode>(&step)) {
    need_fresh(s, p->name, "node");
    add_node(s, p->name);
    st.prim_nodes.insert(p->name);
  } else if (auto* p = std::get_if<AddPrimitiveEdge>(&step)) {
    need_fresh(s, p->edge.id, "edge");
    need_node(s, p->edge.src, "edge");
    need_node(s, p->edge.tgt, "edge");
    add_edge(s, p->edge);
    st.prim_edges.insert(p->edge.id);
  } else if (auto* p = std::get_if<AddUniversal>(&step)) {
    apply_add_universal(st, p->u);
  } else if (auto* p = std::get_if<AddCommutativity>(&step)) {
    check_triangle_shape(s, p->t, "commutativity");
    s.commutativities.insert(p->t);
  } else if (auto* p = std::get_if<AdjoinComposite>(&step)) {
    need_edge(s, p->f, "compose");
    need_edge(s, p->g, "compose");
    if (s.edge(p->f).tgt != s.edge(p->g).src)
      fail(ErrorKind::DanglingReference, "compose: edges not composable: " + p->result);
    need_fresh(s, p->result, "compose");
    add_edge(s, {p->result, s.edge(p->f).src, s.edge(p->g).tgt});
    s.commutativities.insert({p->f, p->g, p->result});
  } else if (auto* p = std::get_if<DeduceCommutativity>(&step)) {
    check_triangle_shape(s, p->t, "deduce");
    if (check_just) {
      JustRule r = p->just.rule;
      bool ok = false;
      const Triangle& t = p->t;
      bool unit = (s.identities.count(s.edge(t.f).src) &&
                   s.identities.at(s.edge(t.f).src) == t.f && t.g == t.h) ||
                  (s.identities.count(s.edge(t.g).src) &&
                   s.identities.at(s.edge(t.g).src) == t.g && t.f == t.h);
      switch (r) {
        case JustRule::UnitLaw:
          ok = unit;
          break;
        case JustRule::Semantic:
          ok = opts.oracle && opts.oracle->paths_equal(st.steps_so_far, {t.f, t.g}, {t.h});
          break;
        case JustRule::Auto:
        default:
          ok = unit || paths_equal_checked(st, {t.f, t.g}, {t.h}, opts);
          break;
      }
      if (!ok)
        fail(ErrorKind::UnjustifiedStep,
             "deduced commutativity not derivable: " + t.f + ";" + t.g + "=" + t.h);
    }
    s.commutativities.insert(p->t);
  } else if (auto* p = std::get_if<DeclareFillin>(&step)) {
    apply_declare_fillin(st, *p, opts, check_just);
  } else if (auto* p = std::get_if<FillinUniqueness>(&step)) {
    need_edge(s, p->e1, "unique");
    need_edge(s, p->e2, "unique");
    const EdgeDecl &e1 = s.edge(p->e1), &e2 = s.edge(p->e2);
    if (e1.src != e2.src || e1.tgt != e2.tgt)
      fail(ErrorKind::DanglingReference, "unique: edges not parallel");
    if (check_just && !paths_equal_checked(st, {p->e1}, {p->e2}, opts))
      fail(ErrorKind::UnjustifiedStep, "fillin uniqueness not derivable: " + p->e1 + " = " + p->e2);
    s.commutativities.insert({s.identities.at(e1.src), p->e1, p->e2});
  } else if (auto* p = std::get_if<AdjoinInverse>(&step)) {
    need_edge(s, p->edge, "inverse");
    need_fresh(s, p->result, "inverse");
    if (check_just) {
      bool ok = s.object_equalities.count(p->edge) > 0;
      if (!ok && opts.oracle) ok = opts.oracle->edge_invertible(st.steps_so_far, p->edge);
      if (!ok) fail(ErrorKind::UnjustifiedStep, "no justification that " + p->edge + " is invertible");
    }
    const EdgeDecl& e = s.edge(p->edge);
    add_edge(s, {p->result, e.tgt, e.src});
    s.commutativities.insert({p->edge, p->result, s.identities.at(e.src)});
    s.commutativities.insert({p->result, p->edge, s.identities.at(e.tgt)});
  }
  st.steps_so_far.push_back(step);
}

}  // namespace

EdgeDecl fillin_edge_decl(const Sketch& s, const FillinSpec& fs, const Name& result) {
  switch (fs.kind) {
    case FillinKind::TerminalFrom:
      return {result, fs.source, fs.universal_apex};
    case FillinKind::InitialTo:
      return {result, fs.universal_apex, fs.target};
    case FillinKind::PullbackPair:
      return {result, s.edge(fs.leg1).src, fs.universal_apex};
    case FillinKind::PushoutCopair:
      return {result, fs.universal_apex, s.edge(fs.leg1).tgt};
    case FillinKind::ListFold:
      return {result, fs.universal_apex, fs.target};
    case FillinKind::ListFoldParam:
      return {result, fs.domain_product, fs.target};
  }
  fail(ErrorKind::UnsupportedStep, "bad fillin kind");
}

WellFormedReport validate_sketch(const Sketch& s) {
  WellFormedReport rep;
  auto bad = [&](const std::string& item, const std::string& reason) {
    rep.violations.push_back({item, reason});
  };
  for (const auto& [id, e] : s.edges) {
    if (!s.has_node(e.src)) bad(id, "dangling endpoint: unknown source " + e.src);
    if (!s.has_node(e.tgt)) bad(id, "dangling endpoint: unknown target " + e.tgt);
  }
  for (const Name& n : s.nodes) {
    auto it = s.identities.find(n);
    if (it == s.identities.end()) {
      bad(n, "node lacks an identity edge");
      continue;
    }
    if (!s.has_edge(it->second)) {
      bad(n, "identity edge missing from edge set");
      continue;
    }
    const EdgeDecl& e = s.edge(it->second);
    if (e.src != n || e.tgt != n) bad(n, "identity edge has wrong endpoints");
    if (!s.object_equalities.count(it->second)) bad(n, "identity edge not an object equality");
  }
  for (const Triangle& t : s.commutativities) {
    if (!s.has_edge(t.f) || !s.has_edge(t.g) || !s.has_edge(t.h)) {
      bad(t.f + ";" + t.g + "=" + t.h, "commutativity references unknown edge");
      continue;
    }
    const EdgeDecl &f = s.edge(t.f), &g = s.edge(t.g), &h = s.edge(t.h);
    if (f.tgt != g.src || f.src != h.src || g.tgt != h.tgt)
      bad(t.f + ";" + t.g + "=" + t.h, "commutativity endpoints disagree");
  }
  for (const Name& oe : s.object_equalities)
    if (!s.has_edge(oe)) bad(oe, "object equality references unknown edge");
  for (const Universal& u : s.universals) {
    if (!s.has_node(u.apex)) {
      bad(u.apex, "universal apex not a node");
      continue;
    }
    auto edge_is = [&](const Name& e, const Name& src, const Name& tgt) {
      if (!s.has_edge(e)) {
        bad(u.apex, "universal references unknown edge " + e);
        return;
      }
      const EdgeDecl& d = s.edge(e);
      if (d.src != src || d.tgt != tgt)
        bad(u.apex, "universal edge " + e + " has wrong endpoints");
    };
    switch (u.kind) {
      case UniversalKind::Terminal:
      case UniversalKind::Initial:
        break;
      case UniversalKind::Pullback: {
        if (!s.has_edge(u.f) || !s.has_edge(u.g)) {
          bad(u.apex, "pullback references unknown leg");
          break;
        }
        if (s.edge(u.f).tgt != s.edge(u.g).tgt) bad(u.apex, "pullback legs do not share codomain");
        edge_is(u.proj1, u.apex, s.edge(u.f).src);
        edge_is(u.proj2, u.apex, s.edge(u.g).src);
        break;
      }
      case UniversalKind::Pushout: {
        if (!s.has_edge(u.f) || !s.has_edge(u.g)) {
          bad(u.apex, "pushout references unknown leg");
          break;
        }
        if (s.edge(u.f).src != s.edge(u.g).src) bad(u.apex, "pushout legs do not share domain");
        edge_is(u.proj1, s.edge(u.f).tgt, u.apex);
        edge_is(u.proj2, s.edge(u.g).tgt, u.apex);
        break;
      }
      case UniversalKind::List: {
        const Universal* t = s.universal_with_apex(u.terminal_apex);
        if (!t || t->kind != UniversalKind::Terminal)
          bad(u.apex, "list does not reference an existing terminal universal");
        const Universal* p = s.universal_with_apex(u.product_apex);
        if (!p || p->kind != UniversalKind::Pullback)
          bad(u.apex, "list does not reference an existing product pullback");
        edge_is(u.base_to_terminal, u.base, u.terminal_apex);
        edge_is(u.apex_to_terminal, u.apex, u.terminal_apex);
        edge_is(u.nil, u.terminal_apex, u.apex);
        edge_is(u.cons, u.product_apex, u.apex);
        edge_is(u.proj1, u.product_apex, u.base);
        edge_is(u.proj2, u.product_apex, u.apex);
        break;
      }
    }
  }
  return rep;
}

ContextPtr extend(const ContextPtr& ctx, const Step& step, const KernelOptions& opts) {
  if (is_equivalence_step(step)) return extend_equiv(ctx, step, opts);
  auto next = std::make_shared<Context>(*ctx);
  KernelState st{next->derived, next->primitive_nodes, next->primitive_edges, next->steps};
  apply_step(st, step, opts, opts.check_justifications);
  next->derived = st.sk;
  next->primitive_nodes = st.prim_nodes;
  next->primitive_edges = st.prim_edges;
  next->steps = st.steps_so_far;
  return next;
}

ContextPtr extend_equiv(const ContextPtr& ctx, const Step& step, const KernelOptions& opts) {
  if (!is_equivalence_step(step))
    fail(ErrorKind::UnsupportedStep, "not an equivalence step: " + step_text(step));
  auto next = std::make_shared<Context>(*ctx);
  KernelState st{next->derived, next->primitive_nodes, next->primitive_edges, next->steps};
  apply_step(st, step, opts, opts.check_justifications);
  next->derived = st.sk;
  next->primitive_nodes = st.prim_nodes;
  next->primitive_edges = st.prim_edges;
  next->steps = st.steps_so_far;
  return next;
}

ContextPtr replay(const std::string& name, const std::vector<Step>& steps,
                  const KernelOptions& opts) {
  ContextPtr c = Context::empty();
  for (const Step& s : steps) c = extend(c, s, opts);
  auto named = std::make_shared<Context>(*c);
  named->name = name;
  return named;
}

std::pair<std::set<Name>, std::set<Name>> primitive_items(const Context& ctx) {
  return {ctx.primitive_nodes, ctx.primitive_edges};
}

Step rename_step(const Step& s, const std::map<Name, Name>& ren) {
  auto r = [&](const Name& n) -> Name {
    auto it = ren.find(n);
    return it == ren.end() ? n : it->second;
  };
  Step out = s;
  if (auto* p = std::get_if<AddPrimitiveNode>(&out)) {
    p->name = r(p->name);
  } else if (auto* p = std::get_if<AddPrimitiveEdge>(&out)) {
    p->edge = {r(p->edge.id), r(p->edge.src), r(p->edge.tgt)};
  } else if (auto* p = std::get_if<AddUniversal>(&out)) {
    Universal& u = p->u;
    for (Name* n : {&u.apex, &u.f, &u.g, &u.proj1, &u.proj2, &u.base, &u.terminal_apex,
                    &u.base_to_terminal, &u.apex_to_terminal, &u.product_apex, &u.nil, &u.cons})
      if (!n->empty()) *n = r(*n);
  } else if (auto* p = std::get_if<AddCommutativity>(&out)) {
    p->t = {r(p->t.f), r(p->t.g), r(p->t.h)};
  } else if (auto* p = std::get_if<AdjoinComposite>(&out)) {
    p->f = r(p->f);
    p->g = r(p->g);
    p->result = r(p->result);
  } else if (auto* p = std::get_if<DeduceCommutativity>(&out)) {
    p->t = {r(p->t.f), r(p->t.g), r(p->t.h)};
  } else if (auto* p = std::get_if<DeclareFillin>(&out)) {
    FillinSpec& fs = p->spec;
    for (Name* n : {&fs.universal_apex, &fs.source, &fs.target, &fs.leg1, &fs.leg2, &fs.nil_image,
                    &fs.cons_alg, &fs.cons_product, &fs.param, &fs.domain_product})
      if (!n->empty()) *n = r(*n);
    p->result = r(p->result);
  } else if (auto* p = std::get_if<FillinUniqueness>(&out)) {
    p->e1 = r(p->e1);
    p->e2 = r(p->e2);
  } else if (auto* p = std::get_if<AdjoinInverse>(&out)) {
    p->edge = r(p->edge);
    p->result = r(p->result);
  }
  return out;
}

}  // namespace ausk
