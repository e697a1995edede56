#include "ausk/dsl.hpp"

#include <cctype>
#include <sstream>

namespace ausk {

namespace {

// --- lexer -------------------------------------------------------------------

struct Token {
  enum class Kind { Ident, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  Pos pos;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '@' ||
         c == '~';
}

struct Lexer {
  const std::string& src;
  std::string path;
  size_t i = 0;
  int line = 1, col = 1;

  void advance() {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  }

  std::vector<Token> run() {
    std::vector<Token> out;
    while (i < src.size()) {
      char c = src[i];
      if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
        while (i < src.size() && src[i] != '\n') advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      Pos p{line, col};
      if (ident_start(c)) {
        std::string t;
        while (i < src.size()) {
          char d = src[i];
          if (ident_char(d)) {
            t += d;
            advance();
          } else if (d == '.' && i + 1 < src.size() && ident_char(src[i + 1])) {
            t += d;
            advance();
          } else {
            break;
          }
        }
        out.push_back({Token::Kind::Ident, t, p});
        continue;
      }
      if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
        advance();
        advance();
        out.push_back({Token::Kind::Symbol, "->", p});
        continue;
      }
      static const std::string singles = "{}();:,=.*[]";
      if (singles.find(c) != std::string::npos) {
        out.push_back({Token::Kind::Symbol, std::string(1, c), p});
        advance();
        continue;
      }
      fail(ErrorKind::ParseError,
           path + ":" + p.text() + ": unexpected character '" + std::string(1, c) + "'");
    }
    out.push_back({Token::Kind::End, "", {line, col}});
    return out;
  }
};

// --- parser ------------------------------------------------------------------

struct Parser {
  std::vector<Token> toks;
  std::string path;
  size_t at = 0;

  [[noreturn]] void err(const std::string& msg, const Pos& p) {
    fail(ErrorKind::ParseError, path + ":" + p.text() + ": " + msg);
  }
  const Token& peek() const { return toks[at]; }
  Token next() { return toks[at++]; }
  bool is_sym(const char* s) const {
    return peek().kind == Token::Kind::Symbol && peek().text == s;
  }
  bool is_ident(const char* s) const {
    return peek().kind == Token::Kind::Ident && peek().text == s;
  }
  void expect_sym(const char* s) {
    if (!is_sym(s)) err(std::string("expected '") + s + "', got '" + peek().text + "'", peek().pos);
    ++at;
  }
  void expect_kw(const char* s) {
    if (!is_ident(s)) err(std::string("expected '") + s + "', got '" + peek().text + "'",
                          peek().pos);
    ++at;
  }
  std::string ident() {
    if (peek().kind != Token::Kind::Ident) err("expected an identifier", peek().pos);
    return next().text;
  }

  // edge references allow id(N)
  Name edgeref() {
    if (is_ident("id")) {
      Pos p = peek().pos;
      ++at;
      if (is_sym("(")) {
        ++at;
        Name n = ident();
        expect_sym(")");
        return identity_edge_name(n);
      }
      (void)p;
      return "id";
    }
    return ident();
  }

  JustRule just_tag() {
    std::string t = ident();
    if (t == "unit") return JustRule::UnitLaw;
    if (t == "assoc") return JustRule::AssocPasting;
    if (t == "terminal") return JustRule::TerminalUnique;
    if (t == "initial") return JustRule::InitialUnique;
    if (t == "fillin") return JustRule::FillinLaw;
    if (t == "initialspan") return JustRule::InitialSpan;
    if (t == "kernelpair") return JustRule::KernelPair;
    if (t == "semantic") return JustRule::Semantic;
    err("unknown justification tag '" + t + "'", peek().pos);
  }

  ValueExpr value() {
    ValueExpr v;
    v.pos = peek().pos;
    if (is_sym("(")) {
      ++at;
      if (is_sym(")")) {
        ++at;
        v.kind = ValueExpr::Kind::Unit;
        return v;
      }
      v.kind = ValueExpr::Kind::Pair;
      v.kids.push_back(value());
      expect_sym(",");
      v.kids.push_back(value());
      expect_sym(")");
      return v;
    }
    if (is_open_bracket()) return bracket_value();
    if (is_ident("inl") || is_ident("inr")) {
      v.kind = peek().text == "inl" ? ValueExpr::Kind::InjL : ValueExpr::Kind::InjR;
      ++at;
      v.kids.push_back(value());
      return v;
    }
    if (is_ident("tag")) {
      ++at;
      expect_sym("(");
      v.kind = ValueExpr::Kind::Tag;
      v.name = ident();
      expect_sym(",");
      v.kids.push_back(value());
      expect_sym(")");
      return v;
    }
    if (is_ident("cls")) {
      ++at;
      expect_sym("(");
      v.kind = ValueExpr::Kind::Cls;
      v.kids.push_back(value());
      expect_sym(")");
      return v;
    }
    if (peek().kind == Token::Kind::Ident) {
      v.kind = ValueExpr::Kind::Atom;
      v.name = ident();
      return v;
    }
    err("expected a value", peek().pos);
  }

  // list / fin-class literal [v, ...]
  ValueExpr bracket_value() {
    ValueExpr v;
    v.pos = peek().pos;
    v.kind = ValueExpr::Kind::List;
    expect_kw_bracket();
    if (!is_close_bracket()) {
      v.kids.push_back(value_or_bracket());
      while (is_sym(",")) {
        ++at;
        v.kids.push_back(value_or_bracket());
      }
    }
    expect_close_bracket();
    return v;
  }
  bool is_open_bracket() const {
    return peek().kind == Token::Kind::Symbol && peek().text == "[";
  }
  bool is_close_bracket() const {
    return peek().kind == Token::Kind::Symbol && peek().text == "]";
  }
  void expect_kw_bracket() {
    if (!is_open_bracket()) err("expected '['", peek().pos);
    ++at;
  }
  void expect_close_bracket() {
    if (!is_close_bracket()) err("expected ']'", peek().pos);
    ++at;
  }
  ValueExpr value_or_bracket() { return is_open_bracket() ? bracket_value() : value(); }

  ItemDecl item() {
    ItemDecl it;
    it.pos = peek().pos;
    std::string kw = ident();
    if (kw == "node") {
      it.name = ident();
      if (is_sym("=")) {
        ++at;
        expect_kw("fin");
        expect_sym("(");
        it.kind = ItemDecl::Kind::FinNode;
        it.a = ident();
        expect_sym(")");
      } else {
        it.kind = ItemDecl::Kind::Node;
      }
    } else if (kw == "edge") {
      it.kind = ItemDecl::Kind::Edge;
      it.name = ident();
      expect_sym(":");
      it.a = ident();
      expect_sym("->");
      it.b = ident();
    } else if (kw == "terminal") {
      it.kind = ItemDecl::Kind::Terminal;
      it.name = ident();
    } else if (kw == "initial") {
      it.kind = ItemDecl::Kind::Initial;
      it.name = ident();
    } else if (kw == "pullback" || kw == "pushout") {
      it.kind = kw == "pullback" ? ItemDecl::Kind::Pullback : ItemDecl::Kind::Pushout;
      it.name = ident();
      expect_sym("=");
      expect_kw(kw == "pullback" ? "pb" : "po");
      expect_sym("(");
      it.a = edgeref();
      expect_sym(",");
      it.b = edgeref();
      expect_sym(")");
      expect_kw("with");
      it.with1 = ident();
      expect_sym(",");
      it.with2 = ident();
    } else if (kw == "list") {
      it.kind = ItemDecl::Kind::ListDecl;
      it.name = ident();
      expect_sym("=");
      expect_kw("list");
      expect_sym("(");
      it.a = ident();
      expect_sym(")");
      expect_kw("with");
      it.with1 = ident();
      expect_sym(",");
      it.with2 = ident();
    } else if (kw == "commute" || kw == "deduce") {
      it.kind = kw == "commute" ? ItemDecl::Kind::Commute : ItemDecl::Kind::Deduce;
      it.a = edgeref();
      expect_sym(";");
      it.b = edgeref();
      expect_sym("=");
      it.c = edgeref();
      if (is_ident("via")) {
        ++at;
        it.just = just_tag();
      }
    } else if (kw == "compose") {
      it.kind = ItemDecl::Kind::Compose;
      it.name = ident();
      expect_sym("=");
      it.a = edgeref();
      expect_sym(";");
      it.b = edgeref();
    } else if (kw == "unique") {
      it.kind = ItemDecl::Kind::Unique;
      it.a = edgeref();
      expect_sym("=");
      it.b = edgeref();
      if (is_ident("via")) {
        ++at;
        it.just = just_tag();
      }
    } else if (kw == "inverse") {
      it.kind = ItemDecl::Kind::Inverse;
      it.name = ident();
      expect_sym("=");
      expect_kw("inv");
      expect_sym("(");
      it.a = edgeref();
      expect_sym(")");
      if (is_ident("via")) {
        ++at;
        it.just = just_tag();
      }
    } else if (kw == "fill") {
      it.kind = ItemDecl::Kind::Fill;
      it.name = ident();
      expect_sym(":");
      it.a = ident();  // source node
      expect_sym("->");
      it.b = ident();  // target node
      expect_kw("by");
      std::string rule = ident();
      if (rule == "terminal") {
        it.fill_kind = FillinKind::TerminalFrom;
      } else if (rule == "initial") {
        it.fill_kind = FillinKind::InitialTo;
      } else if (rule == "pair" || rule == "copair") {
        it.fill_kind = rule == "pair" ? FillinKind::PullbackPair : FillinKind::PushoutCopair;
        expect_sym("(");
        it.c = edgeref();
        expect_sym(",");
        it.d = edgeref();
        expect_sym(")");
      } else if (rule == "fold" || rule == "pfold") {
        it.fill_kind = rule == "fold" ? FillinKind::ListFold : FillinKind::ListFoldParam;
        expect_sym("(");
        it.c = edgeref();
        expect_sym(",");
        it.d = edgeref();
        expect_sym(")");
        expect_kw("over");
        it.fill_over = ident();
      } else {
        err("unknown fillin rule '" + rule + "'", it.pos);
      }
      if (is_ident("via")) {
        ++at;
        it.just = just_tag();
      }
    } else {
      err("unknown declaration '" + kw + "'", it.pos);
    }
    expect_sym(";");
    return it;
  }

  SourceFile file() {
    SourceFile f;
    f.path = path;
    while (peek().kind != Token::Kind::End) {
      Pos p = peek().pos;
      std::string kw = ident();
      if (kw == "context" || kw == "extension") {
        ContextDecl c;
        c.pos = p;
        c.name = ident();
        if (kw == "extension") {
          expect_kw("of");
          c.base = ident();
        }
        expect_sym("{");
        while (!is_sym("}")) c.items.push_back(item());
        expect_sym("}");
        f.decls.push_back(std::move(c));
      } else if (kw == "map") {
        MapDecl m;
        m.pos = p;
        m.name = ident();
        expect_sym(":");
        m.dom = ident();
        expect_sym("->");
        m.cod = ident();
        expect_sym("{");
        while (!is_sym("}")) {
          Name from = edgeref_or_node();
          expect_sym("->");
          Name to = edgeref_or_node();
          expect_sym(";");
          m.entries.emplace_back(from, to);
        }
        expect_sym("}");
        f.decls.push_back(std::move(m));
      } else if (kw == "model") {
        ModelDecl m;
        m.pos = p;
        m.name = ident();
        expect_kw("of");
        m.ctx = ident();
        expect_sym("{");
        while (!is_sym("}")) {
          ModelEntry e;
          e.pos = peek().pos;
          e.item = ident();
          expect_sym("=");
          expect_sym("{");
          bool first = true;
          while (!is_sym("}")) {
            if (!first) expect_sym(",");
            first = false;
            ValueExpr v = value_or_bracket();
            if (is_sym("->")) {
              ++at;
              e.is_mapping = true;
              e.mappings.emplace_back(v, value_or_bracket());
            } else {
              e.elems.push_back(v);
            }
          }
          expect_sym("}");
          expect_sym(";");
          m.entries.push_back(std::move(e));
        }
        expect_sym("}");
        f.decls.push_back(std::move(m));
      } else if (kw == "functor") {
        FunctorDecl fd;
        fd.pos = p;
        fd.name = ident();
        expect_sym("=");
        if (is_ident("id")) {
          ++at;
        } else {
          while (true) {
            expect_kw("tag");
            expect_sym("(");
            fd.tags.push_back(ident());
            expect_sym(")");
            if (is_sym(".")) {
              ++at;
              continue;
            }
            break;
          }
        }
        expect_sym(";");
        f.decls.push_back(std::move(fd));
      } else {
        err("expected a top-level declaration, got '" + kw + "'", p);
      }
    }
    return f;
  }

  Name edgeref_or_node() { return edgeref(); }
};

}  // namespace

SourceFile parse_dsl(const std::string& text, const std::string& path) {
  Lexer lx{text, path};
  Parser p{lx.run(), path};
  return p.file();
}

// --- pretty printer ----------------------------------------------------------

namespace {

std::string value_text(const ValueExpr& v) {
  switch (v.kind) {
    case ValueExpr::Kind::Atom: return v.name;
    case ValueExpr::Kind::Unit: return "()";
    case ValueExpr::Kind::Pair:
      return "(" + value_text(v.kids[0]) + ", " + value_text(v.kids[1]) + ")";
    case ValueExpr::Kind::List: {
      std::string s = "[";
      for (size_t i = 0; i < v.kids.size(); ++i) {
        if (i) s += ", ";
        s += value_text(v.kids[i]);
      }
      return s + "]";
    }
    case ValueExpr::Kind::InjL: return "inl " + value_text(v.kids[0]);
    case ValueExpr::Kind::InjR: return "inr " + value_text(v.kids[0]);
    case ValueExpr::Kind::Tag: return "tag(" + v.name + ", " + value_text(v.kids[0]) + ")";
    case ValueExpr::Kind::Cls: return "cls(" + value_text(v.kids[0]) + ")";
  }
  return "?";
}

std::string edgeref_text(const Name& e) {
  if (e.rfind("id(", 0) == 0) return e;  // already in reference form
  return e;
}

std::string just_suffix(JustRule j) {
  if (j == JustRule::Auto) return "";
  return std::string(" via ") + just_rule_name(j);
}

std::string item_text(const ItemDecl& it) {
  std::ostringstream os;
  switch (it.kind) {
    case ItemDecl::Kind::Node: os << "node " << it.name; break;
    case ItemDecl::Kind::FinNode: os << "node " << it.name << " = fin(" << it.a << ")"; break;
    case ItemDecl::Kind::Edge: os << "edge " << it.name << " : " << it.a << " -> " << it.b; break;
    case ItemDecl::Kind::Terminal: os << "terminal " << it.name; break;
    case ItemDecl::Kind::Initial: os << "initial " << it.name; break;
    case ItemDecl::Kind::Pullback:
      os << "pullback " << it.name << " = pb(" << edgeref_text(it.a) << ", " << edgeref_text(it.b)
         << ") with " << it.with1 << ", " << it.with2;
      break;
    case ItemDecl::Kind::Pushout:
      os << "pushout " << it.name << " = po(" << edgeref_text(it.a) << ", " << edgeref_text(it.b)
         << ") with " << it.with1 << ", " << it.with2;
      break;
    case ItemDecl::Kind::ListDecl:
      os << "list " << it.name << " = list(" << it.a << ") with " << it.with1 << ", " << it.with2;
      break;
    case ItemDecl::Kind::Commute:
      os << "commute " << edgeref_text(it.a) << " ; " << edgeref_text(it.b) << " = "
         << edgeref_text(it.c);
      break;
    case ItemDecl::Kind::Deduce:
      os << "deduce " << edgeref_text(it.a) << " ; " << edgeref_text(it.b) << " = "
         << edgeref_text(it.c) << just_suffix(it.just);
      break;
    case ItemDecl::Kind::Compose:
      os << "compose " << it.name << " = " << edgeref_text(it.a) << " ; " << edgeref_text(it.b);
      break;
    case ItemDecl::Kind::Unique:
      os << "unique " << edgeref_text(it.a) << " = " << edgeref_text(it.b) << just_suffix(it.just);
      break;
    case ItemDecl::Kind::Inverse:
      os << "inverse " << it.name << " = inv(" << edgeref_text(it.a) << ")" << just_suffix(it.just);
      break;
    case ItemDecl::Kind::Fill: {
      os << "fill " << it.name << " : " << it.a << " -> " << it.b << " by ";
      switch (it.fill_kind) {
        case FillinKind::TerminalFrom: os << "terminal"; break;
        case FillinKind::InitialTo: os << "initial"; break;
        case FillinKind::PullbackPair:
          os << "pair(" << edgeref_text(it.c) << ", " << edgeref_text(it.d) << ")";
          break;
        case FillinKind::PushoutCopair:
          os << "copair(" << edgeref_text(it.c) << ", " << edgeref_text(it.d) << ")";
          break;
        case FillinKind::ListFold:
          os << "fold(" << edgeref_text(it.c) << ", " << edgeref_text(it.d) << ") over "
             << it.fill_over;
          break;
        case FillinKind::ListFoldParam:
          os << "pfold(" << edgeref_text(it.c) << ", " << edgeref_text(it.d) << ") over "
             << it.fill_over;
          break;
      }
      os << just_suffix(it.just);
      break;
    }
  }
  return os.str();
}

}  // namespace

std::string pretty_print(const SourceFile& f) {
  std::ostringstream os;
  for (const Decl& d : f.decls) {
    if (auto* c = std::get_if<ContextDecl>(&d)) {
      if (c->base)
        os << "extension " << c->name << " of " << *c->base << " {\n";
      else
        os << "context " << c->name << " {\n";
      for (const ItemDecl& it : c->items) os << "  " << item_text(it) << ";\n";
      os << "}\n";
    } else if (auto* m = std::get_if<MapDecl>(&d)) {
      os << "map " << m->name << " : " << m->dom << " -> " << m->cod << " {\n";
      for (const auto& [a, b] : m->entries) os << "  " << a << " -> " << b << ";\n";
      os << "}\n";
    } else if (auto* m = std::get_if<ModelDecl>(&d)) {
      os << "model " << m->name << " of " << m->ctx << " {\n";
      for (const ModelEntry& e : m->entries) {
        os << "  " << e.item << " = {";
        bool first = true;
        if (e.is_mapping) {
          for (const auto& [k, v] : e.mappings) {
            if (!first) os << ",";
            first = false;
            os << " " << value_text(k) << " -> " << value_text(v);
          }
        } else {
          for (const ValueExpr& v : e.elems) {
            if (!first) os << ",";
            first = false;
            os << " " << value_text(v);
          }
        }
        os << (first ? "};\n" : " };\n");
      }
      os << "}\n";
    } else if (auto* fd = std::get_if<FunctorDecl>(&d)) {
      os << "functor " << fd->name << " = ";
      if (fd->tags.empty()) {
        os << "id";
      } else {
        for (size_t i = 0; i < fd->tags.size(); ++i) {
          if (i) os << " . ";
          os << "tag(" << fd->tags[i] << ")";
        }
      }
      os << ";\n";
    }
  }
  return os.str();
}

// --- elaboration -------------------------------------------------------------

namespace {

[[noreturn]] void err_at(const Pos& p, const std::string& msg) {
  fail(ErrorKind::ParseError, p.text() + ": " + msg);
}

ContextPtr extend_at(const ContextPtr& c, const Step& s, const KernelOptions& opts,
                     const Pos& pos) {
  try {
    return extend(c, s, opts);
  } catch (const AuskError& e) {
    throw AuskError(e.kind, pos.text() + ": " + e.what());
  }
}

// fixed expansion (v1) of fin(A): the Kuratowski finite powerset of A as the
// coequalizer of the swap-anywhere and duplicate-at-head relations on list(A)
ContextPtr expand_fin(ContextPtr c, const Name& F, const Name& A, const KernelOptions& opts,
                      const Pos& pos) {
  auto x = [&](const char* suffix) { return F + "." + suffix; };
  auto ext = [&](const Step& s) { c = extend_at(c, s, opts, pos); };
  auto fill = [&](FillinKind k, const Name& apex, const Name& s1, const Name& s2,
                  const Name& result) {
    DeclareFillin df;
    df.spec.kind = k;
    df.spec.universal_apex = apex;
    if (k == FillinKind::TerminalFrom) df.spec.source = s1;
    if (k == FillinKind::InitialTo) df.spec.target = s1;
    if (k == FillinKind::PullbackPair || k == FillinKind::PushoutCopair) {
      df.spec.leg1 = s1;
      df.spec.leg2 = s2;
    }
    df.result = result;
    ext(df);
  };
  auto pb = [&](const Name& apex, const Name& f, const Name& g, const Name& p1, const Name& p2) {
    Universal u;
    u.kind = UniversalKind::Pullback;
    u.apex = apex;
    u.f = f;
    u.g = g;
    u.proj1 = p1;
    u.proj2 = p2;
    ext(AddUniversal{u});
  };
  auto po = [&](const Name& apex, const Name& f, const Name& g, const Name& i1, const Name& i2) {
    Universal u;
    u.kind = UniversalKind::Pushout;
    u.apex = apex;
    u.f = f;
    u.g = g;
    u.proj1 = i1;
    u.proj2 = i2;
    ext(AddUniversal{u});
  };
  auto comp = [&](const Name& f, const Name& g, const Name& r) { ext(AdjoinComposite{f, g, r}); };

  // terminal, initial, and the list object over A
  {
    Universal t;
    t.kind = UniversalKind::Terminal;
    t.apex = x("T");
    ext(AddUniversal{t});
    Universal z;
    z.kind = UniversalKind::Initial;
    z.apex = x("Z");
    ext(AddUniversal{z});
  }
  fill(FillinKind::TerminalFrom, x("T"), A, "", x("a2t"));
  {
    Universal l;
    l.kind = UniversalKind::List;
    l.apex = x("L");
    l.base = A;
    l.terminal_apex = x("T");
    l.base_to_terminal = x("a2t");
    l.apex_to_terminal = x("l2t");
    l.product_apex = x("P");
    l.proj1 = x("p1");
    l.proj2 = x("p2");
    l.nil = x("nil");
    l.cons = x("cons");
    ext(AddUniversal{l});
  }
  // append : L*L -> L by parametrized recursion
  pb(x("LL"), x("l2t"), x("l2t"), x("ll1"), x("ll2"));
  {
    DeclareFillin df;
    df.spec.kind = FillinKind::ListFoldParam;
    df.spec.universal_apex = x("L");
    df.spec.domain_product = x("LL");
    df.spec.param = x("L");
    df.spec.target = x("L");
    df.spec.nil_image = identity_edge_name(x("L"));
    df.spec.cons_alg = x("cons");
    df.spec.cons_product = x("P");
    df.result = x("app");
    ext(df);
  }
  // duplicate-at-head generators over DD = L * (A*L)
  fill(FillinKind::TerminalFrom, x("T"), x("P"), "", x("p2t"));
  pb(x("DD"), x("l2t"), x("p2t"), x("dd1"), x("dd2"));
  comp(x("dd2"), x("p1"), x("dx"));
  comp(x("dd2"), x("cons"), x("dxs"));
  fill(FillinKind::PullbackPair, x("P"), x("dx"), x("dxs"), x("dpair"));
  comp(x("dpair"), x("cons"), x("dxxs"));
  fill(FillinKind::PullbackPair, x("LL"), x("dd1"), x("dxxs"), x("dwl"));
  comp(x("dwl"), x("app"), x("dupL"));
  fill(FillinKind::PullbackPair, x("LL"), x("dd1"), x("dxs"), x("dwr"));
  comp(x("dwr"), x("app"), x("dupR"));
  // swap-anywhere generators over C = L * (A*(A*L))
  pb(x("AP"), x("a2t"), x("p2t"), x("ap1"), x("ap2"));
  fill(FillinKind::TerminalFrom, x("T"), x("AP"), "", x("ap2t"));
  pb(x("C"), x("l2t"), x("ap2t"), x("c1"), x("c2"));
  comp(x("c2"), x("ap1"), x("sx"));
  comp(x("c2"), x("ap2"), x("sys"));
  comp(x("sys"), x("cons"), x("sysc"));
  fill(FillinKind::PullbackPair, x("P"), x("sx"), x("sysc"), x("sp1"));
  comp(x("sp1"), x("cons"), x("sxys"));
  fill(FillinKind::PullbackPair, x("LL"), x("c1"), x("sxys"), x("swl"));
  comp(x("swl"), x("app"), x("swapL"));
  comp(x("sys"), x("p1"), x("sy"));
  comp(x("sys"), x("p2"), x("ss"));
  fill(FillinKind::PullbackPair, x("P"), x("sx"), x("ss"), x("sp2"));
  comp(x("sp2"), x("cons"), x("sxs"));
  fill(FillinKind::PullbackPair, x("P"), x("sy"), x("sxs"), x("sp3"));
  comp(x("sp3"), x("cons"), x("syxs"));
  fill(FillinKind::PullbackPair, x("LL"), x("c1"), x("syxs"), x("swr"));
  comp(x("swr"), x("app"), x("swapR"));
  // the combined relation and the coequalizer
  fill(FillinKind::InitialTo, x("Z"), x("C"), "", x("zc"));
  fill(FillinKind::InitialTo, x("Z"), x("DD"), "", x("zd"));
  po(x("Rel"), x("zc"), x("zd"), x("rc"), x("rd"));
  fill(FillinKind::PushoutCopair, x("Rel"), x("swapL"), x("dupL"), x("relL"));
  fill(FillinKind::PushoutCopair, x("Rel"), x("swapR"), x("dupR"), x("relR"));
  fill(FillinKind::InitialTo, x("Z"), x("Rel"), "", x("zr"));
  fill(FillinKind::InitialTo, x("Z"), x("L"), "", x("zl"));
  po(x("RL"), x("zr"), x("zl"), x("i1"), x("i2"));
  fill(FillinKind::PushoutCopair, x("RL"), x("relL"), identity_edge_name(x("L")), x("cqL"));
  fill(FillinKind::PushoutCopair, x("RL"), x("relR"), identity_edge_name(x("L")), x("cqR"));
  po(F, x("cqL"), x("cqR"), x("q"), x("q2"));
  return c;
}

ContextPtr apply_item(ContextPtr c, const ItemDecl& it, const KernelOptions& opts) {
  switch (it.kind) {
    case ItemDecl::Kind::Node:
      return extend_at(c, AddPrimitiveNode{it.name}, opts, it.pos);
    case ItemDecl::Kind::FinNode:
      return expand_fin(c, it.name, it.a, opts, it.pos);
    case ItemDecl::Kind::Edge:
      return extend_at(c, AddPrimitiveEdge{{it.name, it.a, it.b}}, opts, it.pos);
    case ItemDecl::Kind::Terminal: {
      Universal u;
      u.kind = UniversalKind::Terminal;
      u.apex = it.name;
      return extend_at(c, AddUniversal{u}, opts, it.pos);
    }
    case ItemDecl::Kind::Initial: {
      Universal u;
      u.kind = UniversalKind::Initial;
      u.apex = it.name;
      return extend_at(c, AddUniversal{u}, opts, it.pos);
    }
    case ItemDecl::Kind::Pullback:
    case ItemDecl::Kind::Pushout: {
      Universal u;
      u.kind = it.kind == ItemDecl::Kind::Pullback ? UniversalKind::Pullback
                                                   : UniversalKind::Pushout;
      u.apex = it.name;
      u.f = it.a;
      u.g = it.b;
      u.proj1 = it.with1;
      u.proj2 = it.with2;
      return extend_at(c, AddUniversal{u}, opts, it.pos);
    }
    case ItemDecl::Kind::ListDecl: {
      // fresh terminal and base fillin, then the list universal
      Universal t;
      t.kind = UniversalKind::Terminal;
      t.apex = it.name + ".T";
      c = extend_at(c, AddUniversal{t}, opts, it.pos);
      DeclareFillin df;
      df.spec.kind = FillinKind::TerminalFrom;
      df.spec.universal_apex = it.name + ".T";
      df.spec.source = it.a;
      df.result = it.name + ".a2t";
      c = extend_at(c, df, opts, it.pos);
      Universal l;
      l.kind = UniversalKind::List;
      l.apex = it.name;
      l.base = it.a;
      l.terminal_apex = it.name + ".T";
      l.base_to_terminal = it.name + ".a2t";
      l.apex_to_terminal = it.name + ".l2t";
      l.product_apex = it.name + ".P";
      l.proj1 = it.name + ".p1";
      l.proj2 = it.name + ".p2";
      l.nil = it.with1;
      l.cons = it.with2;
      return extend_at(c, AddUniversal{l}, opts, it.pos);
    }
    case ItemDecl::Kind::Commute:
      return extend_at(c, AddCommutativity{{it.a, it.b, it.c}}, opts, it.pos);
    case ItemDecl::Kind::Deduce:
      return extend_at(c, DeduceCommutativity{{it.a, it.b, it.c}, {it.just, ""}}, opts, it.pos);
    case ItemDecl::Kind::Compose:
      return extend_at(c, AdjoinComposite{it.a, it.b, it.name}, opts, it.pos);
    case ItemDecl::Kind::Unique:
      return extend_at(c, FillinUniqueness{it.a, it.b, {it.just, ""}}, opts, it.pos);
    case ItemDecl::Kind::Inverse:
      return extend_at(c, AdjoinInverse{it.a, it.name, {it.just, ""}}, opts, it.pos);
    case ItemDecl::Kind::Fill: {
      DeclareFillin df;
      df.result = it.name;
      df.just = {it.just, ""};
      df.spec.kind = it.fill_kind;
      switch (it.fill_kind) {
        case FillinKind::TerminalFrom:
          df.spec.universal_apex = it.b;
          df.spec.source = it.a;
          break;
        case FillinKind::InitialTo:
          df.spec.universal_apex = it.a;
          df.spec.target = it.b;
          break;
        case FillinKind::PullbackPair:
          df.spec.universal_apex = it.b;
          df.spec.leg1 = it.c;
          df.spec.leg2 = it.d;
          break;
        case FillinKind::PushoutCopair:
          df.spec.universal_apex = it.a;
          df.spec.leg1 = it.c;
          df.spec.leg2 = it.d;
          break;
        case FillinKind::ListFold: {
          df.spec.universal_apex = it.a;
          df.spec.target = it.b;
          df.spec.nil_image = it.c;
          df.spec.cons_alg = it.d;
          df.spec.cons_product = it.fill_over;
          break;
        }
        case FillinKind::ListFoldParam: {
          // the declared source is the domain product; the recursed list is
          // the target of its first projection
          df.spec.domain_product = it.a;
          df.spec.target = it.b;
          df.spec.nil_image = it.c;
          df.spec.cons_alg = it.d;
          df.spec.cons_product = it.fill_over;
          const Universal* dp = c->derived.universal_with_apex(it.a);
          if (!dp) err_at(it.pos, "pfold domain is not a universal apex: " + it.a);
          df.spec.universal_apex = c->derived.edge(dp->proj1).tgt;
          df.spec.param = c->derived.edge(dp->proj2).tgt;
          break;
        }
      }
      return extend_at(c, df, opts, it.pos);
    }
  }
  err_at(it.pos, "unhandled item");
}

Value decode_plain(const ValueExpr& v) {
  switch (v.kind) {
    case ValueExpr::Kind::Atom: return Value::atom(v.name);
    case ValueExpr::Kind::Unit: return Value::unit();
    case ValueExpr::Kind::Pair: return Value::pair(decode_plain(v.kids[0]), decode_plain(v.kids[1]));
    case ValueExpr::Kind::List: {
      std::vector<Value> items;
      for (const ValueExpr& k : v.kids) items.push_back(decode_plain(k));
      return Value::list(items);
    }
    case ValueExpr::Kind::InjL: return Value::inj_l(decode_plain(v.kids[0]));
    case ValueExpr::Kind::InjR: return Value::inj_r(decode_plain(v.kids[0]));
    case ValueExpr::Kind::Tag: return Value::tagged(v.name, decode_plain(v.kids[0]));
    case ValueExpr::Kind::Cls: return Value::class_rep(decode_plain(v.kids[0]));
  }
  return Value::unit();
}

// Decodes against a target object: a bracket literal may denote a quotient
// class whose representative carries the same underlying set.
Value decode_against(const ValueExpr& v, const SetObject& target, const Pos& pos) {
  Value plain = decode_plain(v);
  if (target.contains(plain)) return plain;
  if (v.kind == ValueExpr::Kind::List) {
    std::vector<Value> want;
    for (const ValueExpr& k : v.kids) want.push_back(decode_plain(k));
    std::sort(want.begin(), want.end());
    want.erase(std::unique(want.begin(), want.end()), want.end());
    for (const Value& e : target.elems) {
      if (!e.is(Value::Tag::ClassRep)) continue;
      const Value& member = e.kid(0);
      const Value* lst = nullptr;
      if (member.is(Value::Tag::List)) lst = &member;
      if ((member.is(Value::Tag::InjL) || member.is(Value::Tag::InjR)) &&
          member.kid(0).is(Value::Tag::List))
        lst = &member.kid(0);
      if (!lst) continue;
      std::vector<Value> have(lst->kids());
      std::sort(have.begin(), have.end());
      have.erase(std::unique(have.begin(), have.end()), have.end());
      if (have == want) return e;
    }
  }
  err_at(pos, "value " + plain.text() + " is not a member of " + target.text());
}

}  // namespace

ContextPtr elaborate_context(const ContextDecl& decl, const Registry& reg,
                             const KernelOptions& opts) {
  ContextPtr c = Context::empty();
  if (decl.base) {
    auto it = reg.contexts.find(*decl.base);
    if (it == reg.contexts.end()) err_at(decl.pos, "unknown base context " + *decl.base);
    c = it->second;
  }
  for (const ItemDecl& it : decl.items) c = apply_item(c, it, opts);
  auto named = std::make_shared<Context>(*c);
  named->name = decl.name;
  return named;
}

ContextPtr Registry::context(const std::string& name) const {
  auto it = contexts.find(name);
  if (it == contexts.end()) fail(ErrorKind::UsageError, "unknown context " + name);
  return it->second;
}

ContextMap Registry::map(const std::string& name) const {
  auto it = maps.find(name);
  if (it == maps.end()) fail(ErrorKind::UsageError, "unknown map " + name);
  return it->second;
}

Model Registry::model(const std::string& name, int depth) const {
  auto it = models.find(name);
  if (it == models.end()) fail(ErrorKind::UsageError, "unknown model " + name);
  return eval_strict_model(context(it->second.first), it->second.second, depth);
}

AuFunctor Registry::functor(const std::string& name) const {
  auto it = functors.find(name);
  if (it == functors.end()) fail(ErrorKind::UsageError, "unknown functor " + name);
  return it->second;
}

Registry elaborate_file(const SourceFile& f, const KernelOptions& opts) {
  Registry reg;
  for (const Decl& d : f.decls) {
    if (auto* c = std::get_if<ContextDecl>(&d)) {
      if (reg.contexts.count(c->name)) err_at(c->pos, "duplicate context name " + c->name);
      reg.contexts[c->name] = elaborate_context(*c, reg, opts);
      reg.context_order.push_back(c->name);
      if (c->base) reg.extension_base[c->name] = *c->base;
    } else if (auto* m = std::get_if<MapDecl>(&d)) {
      ContextPtr dom = reg.contexts.count(m->dom) ? reg.contexts[m->dom] : nullptr;
      ContextPtr cod = reg.contexts.count(m->cod) ? reg.contexts[m->cod] : nullptr;
      if (!dom) err_at(m->pos, "unknown context " + m->dom);
      if (!cod) err_at(m->pos, "unknown context " + m->cod);
      std::map<Name, Name> nm, em;
      for (const auto& [from, to] : m->entries) {
        if (cod->derived.has_node(from))
          nm[from] = to;
        else if (cod->derived.has_edge(from))
          em[from] = to;
        else
          err_at(m->pos, "map entry references unknown item " + from + " of " + m->cod);
      }
      try {
        ContextMap cm = map_from_hom(check_homomorphism(nm, em, cod, dom));
        cm.name = m->name;
        reg.maps[m->name] = std::move(cm);
        reg.map_order.push_back(m->name);
      } catch (const AuskError& e) {
        throw AuskError(e.kind, m->pos.text() + ": map " + m->name + ": " + e.what());
      }
    } else if (auto* md = std::get_if<ModelDecl>(&d)) {
      ContextPtr ctx = reg.contexts.count(md->ctx) ? reg.contexts[md->ctx] : nullptr;
      if (!ctx) err_at(md->pos, "unknown context " + md->ctx);
      // walk the steps, decoding entries as their endpoints become available
      Assignment asg;
      EvalEnv env;
      auto entry_for = [&](const Name& item) -> const ModelEntry* {
        for (const ModelEntry& e : md->entries)
          if (e.item == item) return &e;
        return nullptr;
      };
      for (const Step& step : ctx->steps) {
        if (auto* p = std::get_if<AddPrimitiveNode>(&step)) {
          const ModelEntry* e = entry_for(p->name);
          if (!e) err_at(md->pos, "model misses primitive node " + p->name);
          std::vector<Value> elems;
          for (const ValueExpr& v : e->elems) elems.push_back(decode_plain(v));
          eval_env_add_node(env, p->name, finite_set(std::move(elems), "prim"));
          asg.nodes[p->name] = env.nodes.at(p->name);
        } else if (auto* p = std::get_if<AddPrimitiveEdge>(&step)) {
          const ModelEntry* e = entry_for(p->edge.id);
          if (!e) err_at(md->pos, "model misses primitive edge " + p->edge.id);
          const SetObject &dom = env.nodes.at(p->edge.src), &cod = env.nodes.at(p->edge.tgt);
          std::vector<std::pair<Value, Value>> table;
          for (const auto& [k, v] : e->mappings)
            table.emplace_back(decode_against(k, dom, e->pos), decode_against(v, cod, e->pos));
          SetMorphism m2 = table_morphism(dom, cod, std::move(table), p->edge.id);
          if (m2.table.size() != dom.elems.size())
            err_at(e->pos, "edge " + p->edge.id + " is not total");
          env.edges[p->edge.id] = m2;
          asg.edges[p->edge.id] = std::move(m2);
        } else {
          eval_model_step(env, step, 4);
        }
      }
      for (const ModelEntry& e : md->entries)
        if (!asg.nodes.count(e.item) && !asg.edges.count(e.item))
          err_at(e.pos, "model entry " + e.item + " is not a primitive item of " + md->ctx);
      reg.models[md->name] = {md->ctx, std::move(asg)};
      reg.model_order.push_back(md->name);
    } else if (auto* fd = std::get_if<FunctorDecl>(&d)) {
      if (fd->tags.empty()) {
        reg.functors[fd->name] = AuFunctor::identity();
      } else if (fd->tags.size() == 1) {
        reg.functors[fd->name] = AuFunctor::tagging(fd->tags[0]);
      } else {
        std::vector<AuFunctor> parts;
        for (const std::string& t : fd->tags) parts.push_back(AuFunctor::tagging(t));
        reg.functors[fd->name] = AuFunctor::composite(std::move(parts));
      }
      reg.functor_order.push_back(fd->name);
    }
  }
  return reg;
}

AuFunctor parse_functor_spec(const std::string& spec) {
  if (spec.empty() || spec == "id") return AuFunctor::identity();
  std::vector<AuFunctor> parts;
  size_t start = 0;
  while (start < spec.size()) {
    size_t comma = spec.find(',', start);
    std::string piece = spec.substr(start, comma == std::string::npos ? comma : comma - start);
    if (piece.rfind("tag:", 0) == 0) {
      parts.push_back(AuFunctor::tagging(piece.substr(4)));
    } else if (piece == "id") {
      parts.push_back(AuFunctor::identity());
    } else {
      fail(ErrorKind::UsageError, "bad functor spec piece '" + piece + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (parts.size() == 1) return parts[0];
  return AuFunctor::composite(std::move(parts));
}

}  // namespace ausk
