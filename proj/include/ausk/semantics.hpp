#pragma once

#include <map>
#include <optional>

#include "ausk/kernel.hpp"
#include "ausk/parallel.hpp"
#include "ausk/set_object.hpp"
#include "ausk/sketch.hpp"

namespace ausk {

struct Settings {
  std::vector<std::string> universe = {"a", "b"};
  int bound = 2;  // max size of a primitive node interpretation
  int depth = 4;  // realization depth for enumerable objects
  std::string echo() const;
};

enum class Verdict { Canonical, NonCanonicalUniversal, Invalid };
const char* verdict_name(Verdict v);

struct Model {
  ContextPtr ctx;
  std::map<Name, SetObject> nodes;
  std::map<Name, SetMorphism> edges;
  std::map<Name, Verdict> verdicts;  // by universal apex
  int depth = 4;

  bool strict() const;
  const SetObject& node(const Name& n) const;
  const SetMorphism& edge(const Name& e) const;
  std::string text() const;  // canonical serialization
};

struct Assignment {
  std::map<Name, SetObject> nodes;
  std::map<Name, SetMorphism> edges;
};

// Canonical interpretation of one universal over already-interpreted data.
struct UniversalInterp {
  SetObject apex;
  SetObject product;                        // List only
  std::map<std::string, SetMorphism> part;  // role -> morphism
};

UniversalInterp interpret_universal(const Universal& u, const std::map<Name, SetObject>& nodes,
                                    const std::map<Name, SetMorphism>& edges, int depth);

// Replays the context over an assignment of the primitive items, interpreting
// universals canonically and checking every adjoined commutativity to the
// realization depth. Throws CommutativityViolation / TypeMismatch.
Model eval_strict_model(const ContextPtr& ctx, const Assignment& asg, int depth);

// The partial interpretation a replay carries; exposed for the passes that
// rebuild models step by step (strictification, enumeration).
struct EvalEnv {
  std::map<Name, SetObject> nodes;
  std::map<Name, SetMorphism> edges;
  std::map<Name, Verdict> verdicts;
};

void eval_env_add_node(EvalEnv& env, const Name& n, const SetObject& s);
// Applies one non-primitive step. Throws CommutativityViolation when a
// constraint fails in this interpretation.
void eval_model_step(EvalEnv& env, const Step& step, int depth);
// Final object-equality checks, then packs the environment into a model.
Model seal_model(const ContextPtr& ctx, EvalEnv env, int depth);

// The comparison map from the canonical interpretation of `u` into the
// interpretation carried by `target`, twisted by the given components on the
// universal's input nodes; empty when target's interpretation is not
// universal for the data.
std::optional<SetMorphism> comparison_component(const Universal& u, const UniversalInterp& canon,
                                                const Model& target,
                                                const std::map<Name, SetMorphism>& on_inputs);

// Extends a strict model of a prefix context along the remaining steps of
// `wider`, which must introduce no primitive items beyond those of m.ctx.
Model extend_model_strict(const Model& m, const ContextPtr& wider);

// `pinned`, when given, fixes the interpretation of some primitive items;
// the rest range over the universe as usual.
std::vector<Model> enumerate_strict_models(const ContextPtr& ctx, const Settings& s,
                                           ExecMode mode = ExecMode::Parallel,
                                           const Assignment* pinned = nullptr);

// Streaming form: visit returns false to stop early. Serial, deterministic.
void for_each_strict_model(const ContextPtr& ctx, const Settings& s,
                           const std::function<bool(const Model&)>& visit,
                           const Assignment* pinned = nullptr);

struct StrictnessReport {
  std::map<Name, Verdict> verdicts;
  std::vector<std::string> problems;
  int depth = 0;
  bool all_canonical() const;
  bool valid() const;
  std::string text() const;
};

StrictnessReport check_model(const Model& m, int depth);

// --- AU-functors and transformations ----------------------------------------

struct AuFunctor {
  enum class Kind { Identity, Tagging, Composite };
  Kind kind = Kind::Identity;
  std::string label;             // Tagging
  std::vector<AuFunctor> parts;  // Composite, applied left to right

  static AuFunctor identity();
  static AuFunctor tagging(std::string label);
  static AuFunctor composite(std::vector<AuFunctor> parts);

  bool is_identity() const;
  Value on_value(const Value& v) const;
  SetObject on_object(const SetObject& s) const;
  SetMorphism on_morphism(const SetMorphism& m) const;
  std::string text() const;
};

Model apply_functor(const AuFunctor& f, const Model& m);

// Natural transformation between two of the concrete functors; the component
// at an object A is the canonical relabelling f0(A) -> f1(A).
struct NatTransform {
  AuFunctor source, target;
  SetMorphism component(const SetObject& plain) const;
  std::string text() const;
};

bool check_naturality(const NatTransform& a, const std::vector<SetObject>& objs,
                      const std::vector<SetMorphism>& morphs);

// --- model homomorphisms -----------------------------------------------------

struct ModelHom {
  std::map<Name, SetMorphism> components;  // per node
  std::string text() const;
};

// Derives the components on universal apexes from the given primitive-node
// components; returns nothing if the family does not extend to a homomorphism.
std::optional<ModelHom> derive_homomorphism(const Model& m1, const Model& m2,
                                            const std::map<Name, SetMorphism>& prim_components);

std::vector<ModelHom> enumerate_homomorphisms(const ContextPtr& ctx, const Model& m1,
                                              const Model& m2, int depth,
                                              ExecMode mode = ExecMode::Serial);

bool hom_is_identity(const ModelHom& h);
bool hom_is_iso(const ModelHom& h);
std::optional<ModelHom> invert_hom(const ModelHom& h);
ModelHom compose_homs(const ModelHom& f, const ModelHom& g);

// The unique primitive-recursive map out of a list object: nil_image is the
// value at the empty list, cons_alg maps pair(head, acc) to the next value.
SetMorphism recursor_fillin(const SetObject& list_obj, const SetObject& target,
                            const Value& nil_image, const SetMorphism& cons_alg);

// Parametrized recursion out of list x param: param_map gives the value at
// (nil, y), cons_alg folds pair(head, acc).
SetMorphism param_recursor_fillin(const SetObject& dom_product, const SetObject& target,
                                  const SetMorphism& param_map, const SetMorphism& cons_alg);

// Justification oracle backed by bounded model enumeration.
struct BoundedOracle : JustificationOracle {
  Settings settings{{"a", "b"}, 2, 3};
  bool paths_equal(const std::vector<Step>& steps, const std::vector<Name>& p1,
                   const std::vector<Name>& p2) const override;
  bool edge_invertible(const std::vector<Step>& steps, const Name& edge) const override;

 private:
  mutable std::map<std::string, bool> memo_;
  bool memoized(const std::string& key, const std::function<bool()>& compute) const;
};

const JustificationOracle* default_oracle();
KernelOptions default_kernel_options();

// A cheaper oracle for kernel-generated scaffolding (arrow contexts and
// transported witnesses), where the heavyweight bound is prohibitive; the
// acceptance suite re-verifies the generated structure semantically.
const JustificationOracle* light_oracle();
KernelOptions light_kernel_options();

}  // namespace ausk
