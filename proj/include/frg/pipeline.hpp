#pragma once

// Model file to fixed points in one place, shared by the command line tool
// and the acceptance run.

#include <optional>

#include "frg/fixedpoint.hpp"
#include "frg/flow.hpp"
#include "frg/model.hpp"

namespace frg {

// Command line values override the model's options block.
struct Overrides {
  std::optional<unsigned> k_max;
  std::optional<unsigned> coupling_order;
  std::optional<std::size_t> degree_max;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> starts;
};

inline Model apply(Model m, const Overrides& o) {
  if (o.k_max) m.options.k_max = *o.k_max;
  if (o.coupling_order) m.options.coupling_order = *o.coupling_order;
  if (o.degree_max) m.options.degree_max = *o.degree_max;
  if (o.seed) m.options.seed = *o.seed;
  if (o.starts) m.options.starts = static_cast<unsigned>(*o.starts);
  return m;
}

struct Analysis {
  ActionSeries action;  // with the basis filled in
  RhsOptions rhs_options;
  RhsResult rhs;
  BetaSystem beta;
  ScalingSolution scaling;
  std::optional<BetaSystem> large_n;  // only when the scaling is feasible
};

inline Analysis analyze(const Model& m) {
  Analysis a;
  a.action = expanded_action(m);
  a.rhs_options = rhs_options(m, a.action);
  a.rhs = rhs_wetterich(a.action, a.rhs_options);
  a.beta = extract_beta(a.rhs.terms, a.action);
  a.scaling = solve_scaling(a.beta, m.options.kappa);
  if (a.scaling.feasible) a.large_n = large_n_limit(a.beta, a.scaling, m.options.normalization.value_or(1));
  return a;
}

inline NewtonOptions newton_options(const Model& m) {
  NewtonOptions o;
  if (m.options.seed) o.seed = *m.options.seed;
  if (m.options.starts) o.starts = *m.options.starts;
  if (m.options.radius) o.start_radius = m.options.radius->get_d();
  return o;
}

}  // namespace frg
