#pragma once

#include "ausk/semantics.hpp"

namespace ausk {

struct Homomorphism {
  ContextPtr src, tgt;
  std::map<Name, Name> node_map;
  std::map<Name, Name> edge_map;

  Name node(const Name& n) const;
  Name edge(const Name& e) const;
};

std::vector<Violation> homomorphism_violations(const std::map<Name, Name>& node_map,
                                               const std::map<Name, Name>& edge_map,
                                               const ContextPtr& src, const ContextPtr& tgt);

// Checks preservation; identity edges may be omitted from edge_map and are
// filled in. Throws PreservationViolation.
Homomorphism check_homomorphism(const std::map<Name, Name>& node_map,
                                const std::map<Name, Name>& edge_map, const ContextPtr& src,
                                const ContextPtr& tgt);

// A map dom -> cod, witnessed by an opspan: an equivalence extension
// dom |> widened together with a homomorphism cod -> widened.
struct ContextMap {
  std::string name;
  ContextPtr dom, cod;
  ContextPtr widened;  // dom plus equivalence steps
  Homomorphism hom;    // cod -> widened

  bool is_extension_map() const;  // cod a prefix of dom, hom the inclusion
  std::string text() const;
};

ContextMap identity_map(const ContextPtr& ctx);
ContextMap map_from_hom(const Homomorphism& h);  // the dual of h
// The extension map ext -> base for a prefix extension base of ext.
ContextMap extension_map(const ContextPtr& base, const ContextPtr& ext);
// The inverse of an equivalence extension: base -> ext when ext adds only
// equivalence steps over base.
ContextMap equivalence_inverse_map(const ContextPtr& base, const ContextPtr& ext);

// The right action: a strict model of H.dom becomes a strict model of H.cod
// (extend strictly along the widening, then pull back along the witness).
Model act(const ContextMap& h, const Model& m);
// Action on homomorphisms between strict models of H.dom.
ModelHom act_hom(const ContextMap& h, const ModelHom& f);

ContextMap compose_maps(const ContextMap& m1, const ContextMap& m2,
                        const KernelOptions& opts = {});

struct MapsEqualResult {
  bool equal = false;
  std::string detail;           // settings echo and, when unequal, the witness
  std::optional<Model> witness; // a distinguishing model of the common domain
};

MapsEqualResult maps_equal(const ContextMap& m1, const ContextMap& m2, const Settings& s);

// --- arrow context -----------------------------------------------------------

struct ArrowContext {
  ContextPtr ctx;          // two copies, hom edges, naturality squares
  ContextMap src, tgt;     // arrow -> base
  ContextMap degeneracy;   // base -> arrow
  std::map<Name, Name> copy0, copy1;   // base item -> copy item
  std::map<Name, Name> hom_component;  // base node -> component edge in arrow
};

ArrowContext arrow_context(const ContextPtr& ctx, const KernelOptions& opts = {});

struct ArrowModelSplit {
  Model source, target;
  ModelHom hom;
};

ArrowModelSplit split_arrow_model(const ArrowContext& arr, const Model& arrow_model);
Model assemble_arrow_model(const ArrowContext& arr, const Model& m0, const Model& m1,
                           const ModelHom& h, int depth);

// --- 2-cells -----------------------------------------------------------------

struct TwoCell {
  ContextMap cell;  // into the arrow context of the codomain
  ContextMap source_boundary, target_boundary;
};

TwoCell two_cell(const ContextMap& into_arrow, const ArrowContext& arr,
                 const KernelOptions& opts = {});
TwoCell identity_two_cell(const ContextMap& f, const ArrowContext& arr_of_cod,
                          const KernelOptions& opts = {});
// Composition via the composite hom family; requires the codomain context to
// have no list universals. Throws BoundaryMismatch when the witnesses of the
// shared boundary disagree.
TwoCell vertical_compose(const TwoCell& a, const TwoCell& b, const ArrowContext& arr,
                         const KernelOptions& opts = {});

// The hom on strict models of the cell's domain picked out by the 2-cell:
// a homomorphism act(source_boundary, m) -> act(target_boundary, m).
ModelHom cell_component(const TwoCell& c, const ArrowContext& arr, const Model& m);

}  // namespace ausk
