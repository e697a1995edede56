#pragma once

#include <memory>

#include "ausk/morphism.hpp"

namespace ausk {

// Expression language for constructs over a base theory. Object and morphism
// expressions are evaluated against a base model plus an assignment of the
// adjoined sorts and function symbols; evaluation is independent of the
// context-replay path so the two routes can be compared.
struct GeoObj;
struct GeoMor;
using GeoObjPtr = std::shared_ptr<const GeoObj>;
using GeoMorPtr = std::shared_ptr<const GeoMor>;

struct GeoObj {
  enum class Kind { Base, Adjoined, One, Zero, Pb, Po, ListOf, Eq, Const };
  Kind kind = Kind::One;
  Name name;          // Base / Adjoined
  GeoMorPtr f, g;     // Pb (cospan) / Po (span) / Eq (parallel pair)
  GeoObjPtr inner;    // ListOf
  SetObject value;    // Const
  std::string display;  // context item this construct interprets, for reports
  std::string text() const;
};

struct GeoMor {
  enum class Kind {
    BaseEdge, AdjoinedFun, Id, Comp, Bang, Absurd,
    Proj1, Proj2, PairInto, Inj1, Inj2, CopairFrom,
    Nil, Cons, Fold, PFold, EqIncl, Inverse, Const
  };
  Kind kind = Kind::Id;
  Name name;              // BaseEdge / AdjoinedFun
  GeoObjPtr obj;          // the structured object the former belongs to
  GeoObjPtr dom, cod;     // AdjoinedFun endpoints
  GeoMorPtr a, b;         // Comp / PairInto / CopairFrom legs / EqIncl pair / Inverse inner
  GeoMorPtr nil_image, cons_alg, param_map;  // folds
  SetMorphism value;      // Const
  std::string display;
  std::string text() const;
};

struct SimpleStep {
  enum class Kind { PrimitiveSort, FunctionalExtension, GeometricQuotient };
  Kind kind = Kind::PrimitiveSort;
  Name name;          // sort or function symbol
  GeoObjPtr h0, h1;   // FunctionalExtension endpoints
  GeoMorPtr phi;      // GeometricQuotient target
  std::string provenance;
  std::string text() const;
};

struct GeometricExtension {
  std::string base_name;
  std::vector<SimpleStep> steps;
  std::map<Name, GeoObjPtr> objects;     // every node of the extended context
  std::map<Name, GeoMorPtr> morphisms;   // every edge
  std::string text() const;
};

GeometricExtension compile_geometric(const ContextPtr& base, const ContextPtr& ext);

struct NormalStep {
  enum class Kind { TorsorFiniteSets, TorsorFinPoset, Invert };
  Kind kind = Kind::Invert;
  Name name;        // presented sort / function
  GeoObjPtr x, y;   // TorsorFinPoset: the poset Fin(x * y)
  GeoMorPtr phi;    // Invert
  int role = 0;     // functional-extension bookkeeping: 1 single-valued, 2 total
  std::string text() const;
};

std::vector<NormalStep> normalize(const GeometricExtension& g);

// Substitutes the base references of g through the theory morphism h
// (a context map base' -> base of g), yielding an extension over h's domain.
GeometricExtension pullback_gext(const GeometricExtension& g, const ContextMap& h);

struct InstantiatedTheory {
  GeometricExtension ext;
  Model base;          // strict finite model grounding the base references
  int depth = 4;
  std::string text() const;
};

InstantiatedTheory instantiate(const GeometricExtension& g, const Model& m);

struct Point {
  std::map<Name, SetObject> sorts;
  std::map<Name, SetMorphism> funs;
  std::string text() const;
};

std::vector<Point> enumerate_points(const InstantiatedTheory& t, const Settings& s,
                                    ExecMode mode = ExecMode::Parallel);
// Same points, driven by the torsor/invert normal form.
std::vector<Point> enumerate_points_normalized(const InstantiatedTheory& t,
                                               const std::vector<NormalStep>& norm,
                                               const Settings& s,
                                               ExecMode mode = ExecMode::Parallel);

// The strict model of the extended context a point corresponds to.
Model point_to_model(const ContextPtr& ext, const InstantiatedTheory& t, const Point& p);

}  // namespace ausk
