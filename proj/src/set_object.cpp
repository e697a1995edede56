#include "ausk/set_object.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ausk {

namespace {

void sort_unique(std::vector<Value>& vs) {
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
}

// Union-find over dense indices.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

}  // namespace

bool SetObject::contains(const Value& v) const {
  return std::binary_search(elems.begin(), elems.end(), v);
}

bool SetObject::operator==(const SetObject& o) const {
  return finite == o.finite && elems == o.elems;
}

std::string SetObject::text() const {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < elems.size(); ++i) {
    if (i) os << ", ";
    os << elems[i].text();
  }
  os << "}";
  if (!finite) os << "@" << depth << (closed ? "!" : "...");
  return os.str();
}

Value SetMorphism::apply(const Value& v) const {
  auto it = std::lower_bound(table.begin(), table.end(), v,
                             [](const auto& p, const Value& k) { return p.first < k; });
  if (it != table.end() && it->first == v) return it->second;
  if (rule) {
    if (auto r = rule(v)) return *r;
  }
  throw std::runtime_error("set morphism not defined at " + v.text() + " (" + desc + ")");
}

std::optional<Value> SetMorphism::try_apply(const Value& v) const {
  auto it = std::lower_bound(table.begin(), table.end(), v,
                             [](const auto& p, const Value& k) { return p.first < k; });
  if (it != table.end() && it->first == v) return it->second;
  if (rule) return rule(v);
  return std::nullopt;
}

std::string SetMorphism::text() const {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < table.size(); ++i) {
    if (i) os << ", ";
    os << table[i].first.text() << " -> " << table[i].second.text();
  }
  os << "}";
  return os.str();
}

bool SetMorphism::same_graph(const SetMorphism& o) const {
  return dom == o.dom && cod == o.cod && table == o.table;
}

SetObject finite_set(std::vector<Value> elems, std::string desc) {
  sort_unique(elems);
  SetObject s;
  s.finite = true;
  s.closed = true;
  s.elems = std::move(elems);
  s.desc = std::move(desc);
  return s;
}

SetObject terminal_object() { return finite_set({Value::unit()}, "terminal"); }

SetObject initial_object() { return finite_set({}, "initial"); }

SetObject list_object(const SetObject& base, int depth) {
  SetObject s;
  s.finite = base.elems.empty();
  s.closed = s.finite;
  s.depth = depth;
  s.desc = "list(" + base.desc + ")";
  // Generate by total weight; the structural order puts shorter lists first.
  std::vector<std::vector<Value>> frontier = {{}};
  s.elems.push_back(Value::list({}));
  for (int w = 0; w < depth && !base.elems.empty(); ++w) {
    std::vector<std::vector<Value>> next;
    for (const auto& pre : frontier) {
      int used = 0;
      for (const auto& v : pre) used += v.weight();
      for (const auto& e : base.elems) {
        if (used + e.weight() > depth) continue;
        auto ext = pre;
        ext.push_back(e);
        s.elems.push_back(Value::list(ext));
        next.push_back(std::move(ext));
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  sort_unique(s.elems);
  return s;
}

SetObject pullback_object(const SetMorphism& f, const SetMorphism& g, int depth) {
  SetObject s;
  s.finite = f.dom.finite && g.dom.finite;
  s.closed = s.finite;
  s.depth = depth;
  s.desc = "pb(" + f.dom.desc + "," + g.dom.desc + ")";
  for (const Value& a : f.dom.elems) {
    const Value fa = f.apply(a);
    for (const Value& b : g.dom.elems) {
      if (!s.finite && a.weight() + b.weight() > depth) continue;
      if (fa == g.apply(b)) s.elems.push_back(Value::pair(a, b));
    }
  }
  sort_unique(s.elems);
  return s;
}

// Quotient classes of inl[A] + inr[B] under inl(f(c)) ~ inr(g(c)).
static std::map<Value, Value> pushout_canon_map(const SetMorphism& f, const SetMorphism& g) {
  std::vector<Value> members;
  for (const Value& a : f.cod.elems) members.push_back(Value::inj_l(a));
  for (const Value& b : g.cod.elems) members.push_back(Value::inj_r(b));
  sort_unique(members);
  std::map<Value, int> index;
  for (size_t i = 0; i < members.size(); ++i) index[members[i]] = static_cast<int>(i);
  UnionFind uf(members.size());
  for (const Value& c : f.dom.elems) {
    auto l = index.find(Value::inj_l(f.apply(c)));
    auto r = index.find(Value::inj_r(g.apply(c)));
    if (l != index.end() && r != index.end()) uf.unite(l->second, r->second);
  }
  // Least member of each class in structural order.
  std::vector<Value> least(members.size());
  std::vector<bool> seen(members.size(), false);
  for (size_t i = 0; i < members.size(); ++i) {
    int r = uf.find(static_cast<int>(i));
    if (!seen[r] || members[i] < least[r]) {
      least[r] = members[i];
      seen[r] = true;
    }
  }
  std::map<Value, Value> canon;
  for (size_t i = 0; i < members.size(); ++i)
    canon[members[i]] = Value::class_rep(least[uf.find(static_cast<int>(i))]);
  return canon;
}

std::vector<std::pair<Value, Value>> pushout_canonical_classes(const SetMorphism& f,
                                                               const SetMorphism& g) {
  auto canon = pushout_canon_map(f, g);
  return {canon.begin(), canon.end()};
}

SetObject pushout_object(const SetMorphism& f, const SetMorphism& g, int depth) {
  auto canon = pushout_canon_map(f, g);
  SetObject s;
  s.finite = f.dom.finite && f.cod.finite && g.cod.finite;
  s.depth = depth;
  s.desc = "po(" + f.cod.desc + "+" + g.cod.desc + ")";
  for (const auto& [m, c] : canon) s.elems.push_back(c);
  sort_unique(s.elems);
  // A realized quotient is treated as complete when every representative sits
  // strictly inside the weight bound; elements appearing later can only merge
  // into classes that already have an interior representative.
  s.closed = true;
  if (!s.finite) {
    for (const Value& e : s.elems)
      if (e.weight() >= depth) s.closed = false;
  }
  return s;
}

std::optional<Value> pushout_class_of(const SetObject& pushout, const SetMorphism& f,
                                      const SetMorphism& g, const Value& member) {
  auto canon = pushout_canon_map(f, g);
  auto it = canon.find(member);
  if (it == canon.end()) return std::nullopt;
  if (!pushout.contains(it->second)) return std::nullopt;
  return it->second;
}

Value tag_value(const std::string& label, const Value& v) { return Value::tagged(label, v); }

SetObject tagged_object(const std::string& label, const SetObject& inner) {
  SetObject s;
  s.finite = inner.finite;
  s.closed = inner.closed;
  s.depth = inner.depth;
  s.desc = "tag(" + label + "," + inner.desc + ")";
  for (const Value& v : inner.elems) s.elems.push_back(tag_value(label, v));
  sort_unique(s.elems);
  return s;
}

SetMorphism identity_morphism(const SetObject& a) {
  SetMorphism m;
  m.dom = a;
  m.cod = a;
  m.desc = "id";
  for (const Value& v : a.elems) m.table.emplace_back(v, v);
  m.rule = [](const Value& v) -> std::optional<Value> { return v; };
  return m;
}

SetMorphism table_morphism(SetObject dom, SetObject cod,
                           std::vector<std::pair<Value, Value>> table, std::string desc) {
  std::sort(table.begin(), table.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SetMorphism m;
  m.dom = std::move(dom);
  m.cod = std::move(cod);
  m.table = std::move(table);
  m.desc = std::move(desc);
  return m;
}

SetMorphism compose_morphisms(const SetMorphism& f, const SetMorphism& g) {
  SetMorphism m;
  m.dom = f.dom;
  m.cod = g.cod;
  m.desc = f.desc + ";" + g.desc;
  // entries whose midpoint leaves the realized fragment stay undefined; the
  // realization bound caps every exhaustive check downstream
  for (const auto& [k, v] : f.table) {
    auto w = g.try_apply(v);
    if (w) m.table.emplace_back(k, *w);
  }
  if (f.rule && (g.rule || !g.table.empty())) {
    auto fc = std::make_shared<const SetMorphism>(f);
    auto gc = std::make_shared<const SetMorphism>(g);
    m.rule = [fc, gc](const Value& v) -> std::optional<Value> {
      auto mid = fc->try_apply(v);
      if (!mid) return std::nullopt;
      return gc->try_apply(*mid);
    };
  }
  return m;
}

SetMorphism tagged_morphism(const std::string& label, const SetMorphism& m) {
  SetMorphism t;
  t.dom = tagged_object(label, m.dom);
  t.cod = tagged_object(label, m.cod);
  t.desc = "tag(" + label + "," + m.desc + ")";
  for (const auto& [k, v] : m.table)
    t.table.emplace_back(tag_value(label, k), tag_value(label, v));
  std::sort(t.table.begin(), t.table.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  if (m.rule) {
    auto inner = std::make_shared<const SetMorphism>(m);
    std::string tag = label;
    t.rule = [inner, tag](const Value& v) -> std::optional<Value> {
      if (!v.is(Value::Tag::Tagged) || v.label() != tag) return std::nullopt;
      auto r = inner->try_apply(v.kid(0));
      if (!r) return std::nullopt;
      return Value::tagged(tag, *r);
    };
  }
  return t;
}

std::optional<SetMorphism> invert_morphism(const SetMorphism& m) {
  if (m.table.size() != m.dom.elems.size() || m.dom.elems.size() != m.cod.elems.size())
    return std::nullopt;
  std::vector<std::pair<Value, Value>> inv;
  for (const auto& [k, v] : m.table) inv.emplace_back(v, k);
  std::sort(inv.begin(), inv.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (size_t i = 0; i + 1 < inv.size(); ++i)
    if (inv[i].first == inv[i + 1].first) return std::nullopt;  // not injective
  for (size_t i = 0; i < inv.size(); ++i)
    if (!(inv[i].first == m.cod.elems[i])) return std::nullopt;  // not surjective
  SetMorphism r;
  r.dom = m.cod;
  r.cod = m.dom;
  r.table = std::move(inv);
  r.desc = "inv(" + m.desc + ")";
  return r;
}

bool is_identity_morphism(const SetMorphism& m) {
  if (!(m.dom == m.cod)) return false;
  for (const auto& [k, v] : m.table)
    if (!(k == v)) return false;
  return true;
}

std::vector<SetMorphism> all_functions(const SetObject& dom, const SetObject& cod) {
  std::vector<SetMorphism> out;
  if (dom.elems.empty()) {
    SetMorphism m;
    m.dom = dom;
    m.cod = cod;
    m.desc = "fn";
    out.push_back(std::move(m));
    return out;
  }
  if (cod.elems.empty()) return out;  // no functions from nonempty to empty
  const size_t n = dom.elems.size(), c = cod.elems.size();
  std::vector<size_t> pick(n, 0);
  while (true) {
    SetMorphism m;
    m.dom = dom;
    m.cod = cod;
    m.desc = "fn";
    for (size_t i = 0; i < n; ++i) m.table.emplace_back(dom.elems[i], cod.elems[pick[i]]);
    out.push_back(std::move(m));
    size_t i = n;
    while (i > 0) {
      --i;
      if (++pick[i] < c) break;
      pick[i] = 0;
      if (i == 0) return out;
    }
  }
}

std::vector<SetObject> all_subsets(const std::vector<std::string>& atoms, int k) {
  std::vector<SetObject> out;
  const size_t n = atoms.size();
  for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
    if (static_cast<int>(__builtin_popcountll(mask)) > k) continue;
    std::vector<Value> elems;
    for (size_t i = 0; i < n; ++i)
      if (mask & (uint64_t{1} << i)) elems.push_back(Value::atom(atoms[i]));
    out.push_back(finite_set(std::move(elems), "prim"));
  }
  std::sort(out.begin(), out.end(), [](const SetObject& a, const SetObject& b) {
    if (a.elems.size() != b.elems.size()) return a.elems.size() < b.elems.size();
    return a.elems < b.elems;
  });
  return out;
}

}  // namespace ausk
