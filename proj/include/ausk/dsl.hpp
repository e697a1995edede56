#pragma once

#include <optional>

#include "ausk/geometry.hpp"
#include "ausk/strictify.hpp"

namespace ausk {

struct Pos {
  int line = 1, col = 1;
  std::string text() const { return std::to_string(line) + ":" + std::to_string(col); }
};

struct ValueExpr {
  enum class Kind { Atom, Unit, Pair, List, InjL, InjR, Tag, Cls };
  Kind kind = Kind::Unit;
  std::string name;  // Atom / Tag label
  std::vector<ValueExpr> kids;
  Pos pos;
};

struct ItemDecl {
  enum class Kind {
    Node, FinNode, Edge, Terminal, Initial, Pullback, Pushout, ListDecl,
    Commute, Compose, Deduce, Fill, Unique, Inverse
  };
  Kind kind = Kind::Node;
  Pos pos;
  Name name;                 // introduced item
  Name a, b, c, d;           // references (meaning per kind)
  Name with1, with2;         // designated structure names
  FillinKind fill_kind = FillinKind::TerminalFrom;
  Name fill_over;            // fold cons product
  JustRule just = JustRule::Auto;
};

struct ContextDecl {
  std::string name;
  std::optional<std::string> base;  // extension NAME of BASE
  std::vector<ItemDecl> items;
  Pos pos;
};

struct MapDecl {
  std::string name, dom, cod;
  std::vector<std::pair<Name, Name>> entries;  // codomain item -> domain item
  Pos pos;
};

struct ModelEntry {
  Name item;
  bool is_mapping = false;
  std::vector<ValueExpr> elems;
  std::vector<std::pair<ValueExpr, ValueExpr>> mappings;
  Pos pos;
};

struct ModelDecl {
  std::string name, ctx;
  std::vector<ModelEntry> entries;
  Pos pos;
};

struct FunctorDecl {
  std::string name;
  std::vector<std::string> tags;  // empty = identity
  Pos pos;
};

using Decl = std::variant<ContextDecl, MapDecl, ModelDecl, FunctorDecl>;

struct SourceFile {
  std::string path;
  std::vector<Decl> decls;
};

SourceFile parse_dsl(const std::string& text, const std::string& path = "<input>");
std::string pretty_print(const SourceFile& f);

struct Registry {
  std::map<std::string, ContextPtr> contexts;
  // extension name -> base context name (the extension is also a context)
  std::map<std::string, std::string> extension_base;
  std::map<std::string, ContextMap> maps;
  std::map<std::string, std::pair<std::string, Assignment>> models;  // name -> (ctx, data)
  std::map<std::string, AuFunctor> functors;
  std::vector<std::string> context_order, map_order, model_order, functor_order;

  ContextPtr context(const std::string& name) const;
  ContextMap map(const std::string& name) const;
  Model model(const std::string& name, int depth) const;
  AuFunctor functor(const std::string& name) const;
};

// Folds declarations into kernel steps, expanding the fin(-) and list(-)
// macros; positions are attached to errors.
ContextPtr elaborate_context(const ContextDecl& decl, const Registry& reg,
                             const KernelOptions& opts);
Registry elaborate_file(const SourceFile& f, const KernelOptions& opts);

// tag:a,tag:b / id spec strings used by the CLI --functor flag
AuFunctor parse_functor_spec(const std::string& spec);

}  // namespace ausk
