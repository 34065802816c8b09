#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "finmet/ext_value.hpp"

namespace finmet {

struct SpaceClass {
  bool is_metric; // no zero off-diagonal entries
  bool is_pseudo; // no infinite entries
};

/// Finite extended pseudometric space: distinct string labels (>= 1) plus a
/// symmetric, zero-diagonal, triangle-satisfying distance matrix.
///
/// Points are stored sorted lexicographically, so equal spaces have equal
/// representations and serialization is canonical.
class FinSpace {
public:
  /// Validating constructor; throws SemanticError on any invariant breach.
  FinSpace(std::vector<std::string> points, std::vector<ExtValue> matrix);

  static FinSpace single_point(const std::string &label);
  /// The two-point space {"0", r.str()} at distance r (r positive).
  static FinSpace two_point(const ExtValue &r);

  std::size_t size() const { return points_.size(); }
  const std::vector<std::string> &points() const { return points_; }
  const std::string &label(std::size_t i) const { return points_[i]; }
  std::size_t index(const std::string &label) const; // throws E_UNKNOWN_POINT
  std::optional<std::size_t> find(const std::string &label) const;

  const ExtValue &dist(std::size_t i, std::size_t j) const {
    return d_[i * points_.size() + j];
  }
  const ExtValue &dist(const std::string &a, const std::string &b) const {
    return dist(index(a), index(b));
  }

  SpaceClass space_class() const;
  ExtValue diameter() const;

  /// Subspace induced on the given point indices (sorted, deduplicated).
  FinSpace subspace(const std::vector<std::size_t> &members) const;

  /// Distinct positive finite distance values, ascending.
  std::vector<ExtValue> positive_finite_values() const;

  bool operator==(const FinSpace &o) const = default;

private:
  FinSpace() = default;

  std::vector<std::string> points_;
  std::vector<ExtValue> d_;
};

/// One violated constraint found by validate_space, with its witness indices.
struct SpaceViolation {
  std::string code; // E_ASYMMETRIC, E_NONZERO_DIAGONAL, E_TRIANGLE, E_NEGATIVE
  nlohmann::json detail;
};

struct ValidationResult {
  std::optional<FinSpace> space; // present iff violations empty
  SpaceClass space_class{false, false};
  std::vector<SpaceViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// Raw matrix cell for validation: a possibly-negative rational or infinity.
struct RawCell {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool infinite = false;

  RawCell() = default;
  RawCell(std::int64_t n) : num(n) {}
  RawCell(std::int64_t n, std::int64_t d) : num(n), den(d) {}
  static RawCell inf() {
    RawCell c;
    c.infinite = true;
    return c;
  }
  static RawCell from(const ExtValue &v);
};

/// Checks a raw square matrix against the extended-pseudometric axioms and
/// reports every violated constraint with indices (in the order given, before
/// canonical sorting).
ValidationResult validate_space(const std::vector<std::string> &points,
                                const std::vector<std::vector<RawCell>> &matrix);
ValidationResult validate_space(const std::vector<std::string> &points,
                                const std::vector<std::vector<ExtValue>> &matrix);

/// 1-Lipschitz map between finite spaces. Construction validates totality and
/// the Lipschitz bound.
class Morphism {
public:
  Morphism(FinSpace dom, FinSpace cod, const std::map<std::string, std::string> &map);

  static Morphism identity(const FinSpace &x);
  static Morphism constant(const FinSpace &dom, const FinSpace &cod,
                           const std::string &target);

  const FinSpace &dom() const { return dom_; }
  const FinSpace &cod() const { return cod_; }
  std::size_t apply(std::size_t dom_index) const { return map_[dom_index]; }
  const std::string &apply_label(const std::string &p) const {
    return cod_.label(map_[dom_.index(p)]);
  }
  const std::vector<std::size_t> &table() const { return map_; }

  bool is_surjective() const;
  std::vector<std::size_t> uncovered() const; // cod indices missing from image
  bool is_injective() const;
  /// Distance-preserving bijection.
  bool is_isometry() const;

  std::map<std::string, std::string> as_label_map() const;

  /// g after *this; requires cod() == g.dom().
  Morphism then(const Morphism &g) const;

  /// Fibers indexed by codomain point: fibers()[b] = dom indices mapping to b.
  std::vector<std::vector<std::size_t>> fibers() const;

  bool operator==(const Morphism &o) const = default;

private:
  Morphism(FinSpace dom, FinSpace cod, std::vector<std::size_t> table);

  FinSpace dom_;
  FinSpace cod_;
  std::vector<std::size_t> map_;
};

/// Validates a label map as a morphism; throws E_UNKNOWN_POINT for labels
/// outside the spaces and E_NOT_LIPSCHITZ (with the witness pair and both
/// distances) when the bound fails.
Morphism check_morphism(const FinSpace &dom, const FinSpace &cod,
                        const std::map<std::string, std::string> &map);

/// Label for the pair (a, b) in a product-style construction.
std::string pair_label(const std::string &a, const std::string &b);

/// Inverse of pair_label given the candidate label sets for each side; the
/// split position is resolved by membership, not by syntax.
std::pair<std::string, std::string>
split_pair_label(const std::string &label, const std::vector<std::string> &lefts,
                 const std::vector<std::string> &rights);

} // namespace finmet
