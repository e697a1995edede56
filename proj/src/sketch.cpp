#include "ausk/sketch.hpp"

#include <sstream>

namespace ausk {

void fail(ErrorKind k, const std::string& msg) { throw AuskError(k, msg); }

std::string identity_edge_name(const Name& node) { return "id(" + node + ")"; }

const char* universal_kind_name(UniversalKind k) {
  switch (k) {
    case UniversalKind::Terminal: return "terminal";
    case UniversalKind::Initial: return "initial";
    case UniversalKind::Pullback: return "pullback";
    case UniversalKind::Pushout: return "pushout";
    case UniversalKind::List: return "list";
  }
  return "?";
}

const char* just_rule_name(JustRule r) {
  switch (r) {
    case JustRule::Auto: return "auto";
    case JustRule::UnitLaw: return "unit";
    case JustRule::AssocPasting: return "assoc";
    case JustRule::TerminalUnique: return "terminal";
    case JustRule::InitialUnique: return "initial";
    case JustRule::FillinLaw: return "fillin";
    case JustRule::InitialSpan: return "initialspan";
    case JustRule::KernelPair: return "kernelpair";
    case JustRule::Semantic: return "semantic";
  }
  return "?";
}

const EdgeDecl& Sketch::edge(const Name& e) const {
  auto it = edges.find(e);
  if (it == edges.end()) fail(ErrorKind::DanglingReference, "unknown edge " + e);
  return it->second;
}

const Universal* Sketch::universal_with_apex(const Name& apex) const {
  for (const Universal& u : universals)
    if (u.apex == apex) return &u;
  return nullptr;
}

bool is_equivalence_step(const Step& s) {
  return std::holds_alternative<AdjoinComposite>(s) ||
         std::holds_alternative<DeduceCommutativity>(s) ||
         std::holds_alternative<DeclareFillin>(s) ||
         std::holds_alternative<FillinUniqueness>(s) || std::holds_alternative<AdjoinInverse>(s);
}

std::string step_text(const Step& s) {
  std::ostringstream os;
  if (auto* p = std::get_if<AddPrimitiveNode>(&s)) {
    os << "node " << p->name;
  } else if (auto* p = std::get_if<AddPrimitiveEdge>(&s)) {
    os << "edge " << p->edge.id << " : " << p->edge.src << " -> " << p->edge.tgt;
  } else if (auto* p = std::get_if<AddUniversal>(&s)) {
    os << universal_kind_name(p->u.kind) << " " << p->u.apex;
  } else if (auto* p = std::get_if<AddCommutativity>(&s)) {
    os << "commute " << p->t.f << " ; " << p->t.g << " = " << p->t.h;
  } else if (auto* p = std::get_if<AdjoinComposite>(&s)) {
    os << "compose " << p->result << " = " << p->f << " ; " << p->g;
  } else if (auto* p = std::get_if<DeduceCommutativity>(&s)) {
    os << "deduce " << p->t.f << " ; " << p->t.g << " = " << p->t.h;
  } else if (auto* p = std::get_if<DeclareFillin>(&s)) {
    os << "fill " << p->result;
  } else if (auto* p = std::get_if<FillinUniqueness>(&s)) {
    os << "unique " << p->e1 << " = " << p->e2;
  } else if (auto* p = std::get_if<AdjoinInverse>(&s)) {
    os << "inverse " << p->result << " = inv(" << p->edge << ")";
  }
  return os.str();
}

std::string WellFormedReport::text() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (const auto& v : violations) os << v.item << ": " << v.reason << "\n";
  return os.str();
}

ContextPtr Context::empty() {
  auto c = std::make_shared<Context>();
  c->name = "1";
  return c;
}

bool Context::is_prefix_of(const Context& other) const {
  if (steps.size() > other.steps.size()) return false;
  for (size_t i = 0; i < steps.size(); ++i)
    if (!(steps[i] == other.steps[i])) return false;
  return true;
}

}  // namespace ausk
