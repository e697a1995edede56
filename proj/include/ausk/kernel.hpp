#pragma once

#include "ausk/sketch.hpp"

namespace ausk {

// Semantic fallback for equivalence-step justifications. Implemented by the
// model layer; the kernel only sees this interface.
struct JustificationOracle {
  virtual ~JustificationOracle() = default;
  // Do the two edge paths agree in every strict model, at the oracle's bound,
  // of the context formed by the given steps?
  virtual bool paths_equal(const std::vector<Step>& steps, const std::vector<Name>& p1,
                           const std::vector<Name>& p2) const = 0;
  // Is the edge invertible in every strict model at the oracle's bound?
  virtual bool edge_invertible(const std::vector<Step>& steps, const Name& edge) const = 0;
};

struct KernelOptions {
  const JustificationOracle* oracle = nullptr;
  bool check_justifications = true;  // trusted replay turns this off
};

WellFormedReport validate_sketch(const Sketch& s);

// Appends one step after checking freshness, dangling references, universal
// shape, and (for equivalence steps) the justification. Pure: returns a new
// context.
ContextPtr extend(const ContextPtr& ctx, const Step& step, const KernelOptions& opts = {});
ContextPtr extend_equiv(const ContextPtr& ctx, const Step& step, const KernelOptions& opts = {});

ContextPtr replay(const std::string& name, const std::vector<Step>& steps,
                  const KernelOptions& opts = {});

std::pair<std::set<Name>, std::set<Name>> primitive_items(const Context& ctx);

// Endpoint typing for the edge a fillin introduces.
EdgeDecl fillin_edge_decl(const Sketch& s, const FillinSpec& spec, const Name& result);

// Renames every item of a step through the given map (identity for names not
// present). Used by copy/transport machinery.
Step rename_step(const Step& s, const std::map<Name, Name>& ren);

}  // namespace ausk
