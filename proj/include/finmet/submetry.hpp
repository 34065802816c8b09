#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "finmet/fin_space.hpp"
#include "finmet/metric_core.hpp"

namespace finmet {

/// Subset of a space's points, possibly empty.
struct SubsetRef {
  FinSpace space;
  std::vector<std::size_t> members;

  static SubsetRef of_labels(const FinSpace &space,
                             const std::vector<std::string> &labels);
};

/// Hausdorff distance between two subsets of the same space. Conventions:
/// d(∅, F) = ∞ for nonempty F, d(∅, ∅) = 0 (sup over the empty family is 0).
/// Throws E_SPACE_MISMATCH when the ambient spaces differ.
ExtValue hausdorff_distance(const SubsetRef &f0, const SubsetRef &f1);

/// Result of checking a map against the three equivalent submetry criteria.
/// The criterion verdicts are computed independently and asserted equal.
struct SubmetryReport {
  bool verdict = false;
  bool definitional = false; // fiber Hausdorff distance <= base distance
  bool fiber_min = false;    // min_{x' in fiber} d(x,x') == d(f x, b)
  bool ball = false;         // ball_B(f x, r) == f(ball_X(x, r)) at breakpoints
  bool surjective = false;
  std::vector<std::string> uncovered;    // base points missed, when any
  std::optional<nlohmann::json> witness; // point, target fiber, deficit

  nlohmann::json to_json() const;
};

/// Evaluates the submetry criteria exactly. Non-surjective maps yield verdict
/// false with the uncovered points in the witness. Throws
/// E_INFINITE_BASE_DISTANCE when the base has an infinite distance between
/// inhabited fibers (the definition requires finite base distances).
SubmetryReport submetry_check(const Morphism &f);

/// Surjective submetry with its fiber partition cached.
struct Family {
  Morphism projection;
  std::vector<std::vector<std::size_t>> fibers; // indexed by base point

  const FinSpace &total() const { return projection.dom(); }
  const FinSpace &base() const { return projection.cod(); }
  FinSpace fiber_space(std::size_t base_index) const;
};

/// Builds a Family; throws E_NOT_SURJECTIVE (with uncovered base points) or
/// E_NOT_SUBMETRY (forwarding the criterion witness).
Family proper_family_check(const Morphism &p);

/// The hyperspace of fiberwise subsets together with the data needed to
/// interpret its points.
struct HyperspaceResult {
  FinSpace space;      // points are subsets, metrized by Hausdorff distance
  Morphism to_base;    // A -> f(A)
  Morphism source;     // the defining morphism f : X -> B
  std::vector<std::vector<std::size_t>> members; // X indices per hyper point
};

/// Points = nonempty subsets A of X with f(A) a single point, labeled by
/// sorted member labels joined with "|". Throws E_TOO_LARGE when 2^|X| - 1
/// exceeds the cap.
HyperspaceResult hyperspace(const Morphism &f, std::size_t cap = 4095);
/// Absolute hyperspace Cpt(X): the case B = one-point space.
HyperspaceResult hyperspace_absolute(const FinSpace &x, std::size_t cap = 4095);

/// Unfolds a map T -> Cpt(X/B) into the family {(x,t) | x in g(t)} over T.
/// The result passes proper_family_check (asserted).
Family map_to_family(const HyperspaceResult &hyper, const Morphism &g);

/// Inverse construction: sends t to its fiber, projected to X. The family's
/// total space must consist of "(x|t)" pairs inside X x_B T; throws
/// E_NOT_PROPER if the fiberwise subsets do not define hyperspace points.
Morphism family_to_map(const HyperspaceResult &hyper, const Family &fam);

/// Proper family with an ordered list of sections.
struct PointedFamily {
  Family family;
  std::vector<Morphism> sections; // base -> total, p o s = id

  PointedFamily(Family fam, std::vector<Morphism> sections);
};

/// Base change: total = P x_X T, sections induced coordinatewise. The result
/// is proper (asserted). Throws E_EMPTY if the pullback is empty.
PointedFamily pointed_pullback(const PointedFamily &fam, const Morphism &f);

/// The universal-family square: pulls the family back along its own
/// projection and appends the diagonal section.
PointedFamily diagonal_family(const PointedFamily &fam);

} // namespace finmet
