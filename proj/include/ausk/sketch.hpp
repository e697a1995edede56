#pragma once

#include <array>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ausk {

using Name = std::string;

enum class ErrorKind {
  FreshnessViolation,
  DanglingReference,
  MalformedUniversal,
  UnjustifiedStep,
  PreservationViolation,
  TransportFailure,
  BoundaryMismatch,
  NotAnExtensionMap,
  IsoMismatch,
  NonStrictInput,
  CommutativityViolation,
  TypeMismatch,
  InvalidModel,
  UnmappedConstruct,
  NonFiniteConstruct,
  UnsupportedStep,
  ParseError,
  UsageError,
};

struct AuskError : std::runtime_error {
  ErrorKind kind;
  AuskError(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

[[noreturn]] void fail(ErrorKind k, const std::string& msg);

std::string identity_edge_name(const Name& node);

struct EdgeDecl {
  Name id, src, tgt;
  bool operator==(const EdgeDecl& o) const = default;
};

// A commuting triangle f;g = h.
struct Triangle {
  Name f, g, h;
  auto operator<=>(const Triangle&) const = default;
};

enum class UniversalKind { Terminal, Initial, Pullback, Pushout, List };

const char* universal_kind_name(UniversalKind k);

// Designated cone/cocone data. Pullback is over the opspan (f : A -> C,
// g : B -> C) with projections proj1 : apex -> A, proj2 : apex -> B.
// Pushout is under the span (f : C -> A, g : C -> B) with injections
// inj1 = proj1 : A -> apex, inj2 = proj2 : B -> apex.
// List over `base` references an existing Terminal (terminal_apex) with a
// designated edge base_to_terminal : base -> terminal_apex, and its own
// companion product Pullback (product_apex, proj1 = product -> base,
// proj2 = product -> apex) over (base_to_terminal, apex_to_terminal), plus
// nil : terminal -> apex and cons : product -> apex. The companion pullback
// is registered as a separate Universal by the same step.
struct Universal {
  UniversalKind kind = UniversalKind::Terminal;
  Name apex;
  Name f, g;          // Pullback/Pushout data
  Name proj1, proj2;  // projections / injections
  // List extras:
  Name base, terminal_apex, base_to_terminal, apex_to_terminal;
  Name product_apex, nil, cons;
  bool operator==(const Universal& o) const = default;
};

// --- extension steps -------------------------------------------------------

struct AddPrimitiveNode {
  Name name;
  bool operator==(const AddPrimitiveNode&) const = default;
};
struct AddPrimitiveEdge {
  EdgeDecl edge;
  bool operator==(const AddPrimitiveEdge&) const = default;
};
struct AddUniversal {
  Universal u;
  bool operator==(const AddUniversal&) const = default;
};
struct AddCommutativity {
  Triangle t;
  bool operator==(const AddCommutativity&) const = default;
};

// --- equivalence steps -----------------------------------------------------

enum class JustRule {
  Auto,            // try syntactic rules, then the semantic oracle
  UnitLaw,
  AssocPasting,
  TerminalUnique,
  InitialUnique,
  FillinLaw,
  InitialSpan,
  KernelPair,
  Semantic,
};

const char* just_rule_name(JustRule r);

struct Justification {
  JustRule rule = JustRule::Auto;
  std::string note;
  bool operator==(const Justification& o) const = default;
};

enum class FillinKind {
  TerminalFrom,   // unique map source -> terminal apex
  InitialTo,      // unique map initial apex -> target
  PullbackPair,   // <leg1, leg2> : Z -> apex
  PushoutCopair,  // [leg1, leg2] : apex -> W
  ListFold,       // simple fold apex -> target
  ListFoldParam,  // parametrized fold domain_product -> target
};

struct FillinSpec {
  FillinKind kind = FillinKind::TerminalFrom;
  Name universal_apex;  // the universal the fillin is for
  Name source;          // TerminalFrom: source node
  Name target;          // InitialTo / folds: target node
  Name leg1, leg2;      // cone / cocone edges
  // folds:
  Name nil_image;       // edge terminal -> target (ListFold) or param -> target (ListFoldParam)
  Name cons_alg;        // edge cons_product -> target
  Name cons_product;    // apex of the product base x target
  Name param;           // ListFoldParam: the parameter node Y
  Name domain_product;  // ListFoldParam: apex of the product list x Y
  bool operator==(const FillinSpec& o) const = default;
};

struct AdjoinComposite {
  Name f, g, result;
  bool operator==(const AdjoinComposite&) const = default;
};
struct DeduceCommutativity {
  Triangle t;
  Justification just;
  bool operator==(const DeduceCommutativity&) const = default;
};
struct DeclareFillin {
  FillinSpec spec;
  Name result;
  Justification just;
  bool operator==(const DeclareFillin&) const = default;
};
struct FillinUniqueness {
  Name e1, e2;
  Justification just;
  bool operator==(const FillinUniqueness&) const = default;
};
struct AdjoinInverse {
  Name edge, result;
  Justification just;
  bool operator==(const AdjoinInverse&) const = default;
};

using Step = std::variant<AddPrimitiveNode, AddPrimitiveEdge, AddUniversal, AddCommutativity,
                          AdjoinComposite, DeduceCommutativity, DeclareFillin, FillinUniqueness,
                          AdjoinInverse>;

bool is_equivalence_step(const Step& s);
std::string step_text(const Step& s);

// --- sketch ----------------------------------------------------------------

struct Sketch {
  std::set<Name> nodes;
  std::map<Name, EdgeDecl> edges;
  std::map<Name, Name> identities;  // node -> identity edge
  std::set<Triangle> commutativities;
  std::vector<Universal> universals;  // in introduction order
  std::set<Name> object_equalities;   // edge ids, always including identities

  bool has_node(const Name& n) const { return nodes.count(n) > 0; }
  bool has_edge(const Name& e) const { return edges.count(e) > 0; }
  const EdgeDecl& edge(const Name& e) const;
  const Universal* universal_with_apex(const Name& apex) const;
};

struct Violation {
  std::string item;
  std::string reason;
};

struct WellFormedReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string text() const;
};

// --- context ---------------------------------------------------------------

struct Context;
using ContextPtr = std::shared_ptr<const Context>;

struct Context {
  std::string name;
  std::vector<Step> steps;
  Sketch derived;
  std::set<Name> primitive_nodes, primitive_edges;

  static ContextPtr empty();
  bool is_prefix_of(const Context& other) const;
};

}  // namespace ausk
