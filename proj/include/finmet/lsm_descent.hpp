#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "finmet/fin_space.hpp"
#include "finmet/metric_core.hpp"

namespace finmet {

/// Largest radius r for which the ball-onto-ball condition holds around x:
/// for every x' in ball(x, r) and every 0 < s < r - d(x, x'),
/// f(ball_X(x', s)) = ball_Y(f(x'), s). Always positive on finite metric
/// spaces; computed exactly over breakpoint radii. Throws E_NOT_METRIC for
/// pseudometric or extended inputs.
ExtValue local_submetry_radius(const Morphism &f, const std::string &x);

/// Family of legs over a common base satisfying the exact three-point
/// lifting condition.
struct Covering {
  FinSpace base;
  std::vector<Morphism> legs;
};

/// Validates the covering: legs share the codomain `base`, every leg is a
/// local submetry (asserted; automatic at finite scale), and every triple of
/// base points lifts exactly into some leg. Throws E_CODOMAIN_MISMATCH,
/// E_NOT_METRIC, or E_TRIPLE_UNLIFTABLE (with the least witnessing triple and
/// the best achievable slack).
Covering lsm_covering_check(const FinSpace &base, std::vector<Morphism> legs);

/// Legs are the restrictions of f to unions of three open balls of radius r,
/// one leg per triple of domain points, deduplicated. f must pass
/// submetry_check (E_NOT_SUBMETRY).
Covering covering_from_submetry(const Morphism &f, const ExtValue &r);

/// Base change: legs become the projections U_i x_X Y -> Y; empty legs are
/// dropped.
Covering covering_pullback(const Covering &cov, const Morphism &g);

/// Refines each leg by a covering of its domain and flattens the composites.
Covering covering_compose(const Covering &cov,
                          const std::vector<Covering> &refinements);

/// Glues compatible pieces g_i : U_i -> Z along a covering of T into the
/// unique map g with g o f_i = g_i. Throws E_INCOMPATIBLE (pair and point
/// witness) or E_ARITY.
Morphism glue_morphisms(const Covering &cov, const std::vector<Morphism> &pieces);

/// Transition data for one ordered chart pair: maps LHS points
/// (a, u, v) with p_i(a) = u, f_i(u) = f_j(v) to RHS points (b, u, v) with
/// p_j(b) = v. Both triples are stored so "over the overlap" is checkable.
using TransitionTable =
    std::map<std::array<std::size_t, 3>, std::array<std::size_t, 3>>;

struct DescentDatum {
  Covering covering;
  std::vector<Morphism> charts; // p_i : P_i -> U_i, cod == legs[i].dom()
  std::map<std::pair<std::size_t, std::size_t>, TransitionTable> transitions;

  /// Identity transitions P_i x Q -> P_i x Q over every overlap; the datum of
  /// a family pulled back chartwise from a single global family.
  static DescentDatum canonical(const Covering &cov, const Morphism &family);
};

struct CocycleViolation {
  std::string code; // E_NOT_ISOMETRY, E_NOT_OVER_OVERLAP, E_COCYCLE
  nlohmann::json detail;
};

struct CocycleReport {
  std::vector<CocycleViolation> violations;
  bool ok() const { return violations.empty(); }
  nlohmann::json to_json() const;
};

/// Verifies each transition is a bijective isometry over its overlap, that
/// the diagonal part of each phi_ii is the identity, and the triple-overlap
/// cocycle identity pointwise.
CocycleReport check_cocycle(const DescentDatum &datum);

struct GluedSpace {
  FinSpace total;
  Morphism projection;              // total -> covering base
  std::vector<Morphism> chart_maps; // P_i -> total (the canonical maps g_i)
  std::vector<Morphism> chart_isos; // P_i -> total x_X U_i, verified isometries
};

/// Effective descent: glues the charts along the transitions. The distance is
/// the minimum over single-chart representative pairs; the triangle
/// inequality, chart max-formula, and metric preservation are asserted.
/// Throws the first cocycle violation, or E_TRIANGLE_VIOLATION with a full
/// witness dump if an invalid covering slipped through.
GluedSpace glue_descent(const DescentDatum &datum);

} // namespace finmet
