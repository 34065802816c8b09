#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "finmet/fin_space.hpp"

namespace finmet {

struct QuotientResult {
  FinSpace space;
  Morphism projection;
};

/// Collapses zero-distance point pairs. Classes are named after their
/// lexicographically least member; the induced distance is the distance of
/// any representatives (well-defined by the triangle inequality, asserted).
QuotientResult metric_identification(const FinSpace &x);

struct ProductResult {
  FinSpace space;
  Morphism to_left;
  Morphism to_right;
};

/// Product in the sup metric: d((x,y),(x',y')) = max(d_X, d_Y); points are
/// labeled "(x|y)".
ProductResult l_infty_product(const FinSpace &x, const FinSpace &y);

/// Subspace of the sup product on pairs with f(x) = g(y); throws E_EMPTY when
/// no compatible pair exists and E_SPACE_MISMATCH when codomains differ.
ProductResult fiber_product(const Morphism &f, const Morphism &g);

/// One identification: point `a` of spaces[left] is glued to point `b` of
/// spaces[right].
struct Identification {
  std::size_t left_space;
  std::string left_point;
  std::size_t right_space;
  std::string right_point;
};

struct ColimitResult {
  FinSpace space; // possibly pseudometric
  std::vector<Morphism> injections;
};

/// Disjoint union modulo the identifications, with the chain-infimum distance
/// computed exactly as all-pairs shortest paths over intra-space distances
/// plus weight-0 identification edges. Glued classes are named
/// "<index>:<label>" after their least member.
ColimitResult colimit_glue(const std::vector<FinSpace> &spaces,
                           const std::vector<Identification> &identifications);

/// Finite group action presented by generating self-isometries.
struct GroupAction {
  FinSpace space;
  std::vector<Morphism> generators; // each dom == cod == space

  /// Materializes the generated group by closure over generators (as index
  /// permutations); throws E_GROUP_TOO_LARGE past `cap` elements and
  /// E_NOT_ISOMETRY if a generator is not a self-isometry.
  std::vector<std::vector<std::size_t>> elements(std::size_t cap = 10000) const;
};

/// Orbit space with d(orbit(x), orbit(y)) = min over group elements g of
/// d(x, g y); orbits are named after their least member.
QuotientResult quotient_by_group(const GroupAction &action,
                                 std::size_t group_cap = 10000);

} // namespace finmet
