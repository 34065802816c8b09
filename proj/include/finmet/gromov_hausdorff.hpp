#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "finmet/fin_space.hpp"
#include "finmet/submetry.hpp"

namespace finmet {

/// Left- and right-total relation between two spaces.
struct Correspondence {
  FinSpace left;
  FinSpace right;
  std::set<std::pair<std::size_t, std::size_t>> pairs;

  /// Validates totality (E_NOT_TOTAL) and point membership.
  static Correspondence make(FinSpace left, FinSpace right,
                             const std::vector<std::pair<std::string, std::string>>
                                 &label_pairs);

  std::vector<std::pair<std::string, std::string>> label_pairs() const;
};

/// Worst distance discrepancy across matched pairs: max over (x,y),(x',y') in
/// R of |d_X(x,x') - d_Y(y,y')| (infinite if exactly one side is infinite).
ExtValue distortion(const Correspondence &r);

struct GHResult {
  ExtValue value;
  Correspondence witness; // distortion(witness) == 2 * value
  std::map<std::string, std::string> phi; // X -> Y, not necessarily 1-Lipschitz
  std::map<std::string, std::string> psi; // Y -> X
};

/// Exact Gromov-Hausdorff distance: half the minimal distortion over
/// correspondences, computed by exhaustive search over map pairs (phi, psi)
/// with cost max{dis(phi), dis(psi), cross term}; the witness is the
/// lexicographically least optimal pair under point index order.
/// Throws E_NOT_METRIC, E_INFINITE_DISTANCE, or E_BUDGET when
/// |X|^|Y| * |Y|^|X| exceeds `budget`.
GHResult gh_exact(const FinSpace &x, const FinSpace &y,
                  std::uint64_t budget = 10000000);

/// Independent oracle: half the minimal distortion over ALL left- and
/// right-total relations, by subset enumeration. Requires |X|*|Y| <= 16
/// (E_TOO_LARGE).
ExtValue gh_enum_oracle(const FinSpace &x, const FinSpace &y);

/// Proper family over the two-point base 2_r.
struct TwoPointFamily {
  Family family;
  ExtValue r;
  std::size_t fiber_zero; // base index of the "0" end
  std::size_t fiber_r;

  /// Wraps a family whose base has exactly two points at a positive finite
  /// distance; the lexicographically first base point is the "0" end.
  static TwoPointFamily wrap(Family family);

  FinSpace fiber_zero_space() const { return family.fiber_space(fiber_zero); }
  FinSpace fiber_r_space() const { return family.fiber_space(fiber_r); }
};

/// Glues X and Y over 2_r through a correspondence:
/// d(x, y) = r + min over R of (d_X(x,x') + d_Y(y,y')). The result is
/// validated as a metric space, its projection passes proper_family_check,
/// and the fiber Hausdorff distance equals r exactly (all asserted).
/// Points are labeled "0:<x>" and "1:<y>".
/// Throws E_DEGENERATE_RADIUS (r not positive finite) and E_RADIUS_TOO_SMALL
/// (2r < dis(R)).
TwoPointFamily glue_over_two_points(const FinSpace &x, const FinSpace &y,
                                    const Correspondence &r_corr,
                                    const ExtValue &r);

/// Converse construction: R = {(x, y) : d_Q(x, y) <= r} between the two
/// fibers; totality and distortion(R) <= 2r are asserted.
Correspondence correspondence_from_family(const TwoPointFamily &fam);

/// Sum of the radii of a chain of two-point families linked by isometries
/// matching the r-fiber of step k to the 0-fiber of step k+1; a certified
/// upper bound for gh_exact(first fiber, last fiber).
/// Throws E_LINK_NOT_ISOMETRY or E_ARITY.
ExtValue chain_upper_bound(const std::vector<TwoPointFamily> &families,
                           const std::vector<Morphism> &links);

} // namespace finmet
