#pragma once

#include "ausk/morphism.hpp"

namespace ausk {

// An isomorphism of models over one context: invertible components per node,
// commuting with every edge interpretation.
struct ModelIso {
  ModelHom components;  // from -> to
  bool is_identity() const { return hom_is_identity(components); }
  std::string text() const { return components.text(); }
};

ModelIso identity_iso(const Model& m);
// Validates endpoints, invertibility and edge compatibility.
void check_model_iso(const Model& from, const Model& to, const ModelIso& iso);

struct StrictifyResult {
  Model model;   // the strict replacement
  ModelIso iso;  // model -> input, equality on the extension's primitive nodes
};

// Strict reindexing along an extension map u (for base |> extended): given a
// model m1 of the extended context, a strict model m0s of the base, and an
// iso phi0 : m0s -> m1|base, produces the unique strict m1s with
// m1s|base = m0s, phi1|base = phi0, and phi1 the identity on the extension's
// primitive nodes. Computed by induction over the extension steps.
StrictifyResult strictify(const ContextMap& u, const Model& m1, const Model& m0s,
                          const ModelIso& phi0);

// Restriction of a (possibly non-strict) model to a prefix context.
Model restrict_model(const Model& m, const ContextPtr& base);

// f*M: the unique strict model isomorphic to f.M agreeing with it on the
// primitive nodes.
StrictifyResult reindex_with_iso(const AuFunctor& f, const Model& m);
Model reindex(const AuFunctor& f, const Model& m);

// alpha*M : f0*M -> f1*M by conjugating the component of alpha with the two
// strictification isos.
ModelHom reindex_2cell(const NatTransform& alpha, const Model& m);

// f*h : f*src -> f*tgt for a homomorphism h : src -> tgt of strict models.
ModelHom reindex_hom(const AuFunctor& f, const Model& src, const Model& tgt, const ModelHom& h);

struct SigmaCell {
  AuFunctor f;
  std::string map_name;
  Model lhs, rhs;  // f*(MH) and (f*M)H
  ModelIso iso;    // lhs -> rhs
  bool identity() const;
  std::string text() const;
};

// The coherence iso f*(MH) ~ (f*M)H, pasted from the strictification isos.
SigmaCell sigma(const AuFunctor& f, const ContextMap& h, const Model& m);

// reindex(f1, reindex(f0, m)) must serialize identically to
// reindex(composite(f0,f1), m).
bool verify_strict_composition(const AuFunctor& f0, const AuFunctor& f1, const Model& m);

struct GrayInputs {
  AuFunctor f0, f1;
  NatTransform alpha;          // f0 -> f1
  ContextMap h, hp;            // composable: h : T0 -> T1, hp : T1 -> T2
  const TwoCell* beta = nullptr;        // a 2-cell between maps T0 -> T1
  const ArrowContext* beta_arrow = nullptr;  // arrow context of T1, for beta
  Model m;                     // strict model of T0
  KernelOptions opts;
};

struct GrayReport {
  bool horizontal = false;   // pasting over composition in the map direction
  bool vertical = false;     // pasting over composition of functors
  bool cells_functor = false;  // compatibility with alpha
  bool cells_map = false;      // compatibility with beta
  std::vector<std::string> failures;
  bool pass() const { return horizontal && vertical && cells_functor && cells_map; }
  std::string text() const;
};

GrayReport verify_gray(const GrayInputs& in);

}  // namespace ausk
