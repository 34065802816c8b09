#include "finmet/gromov_hausdorff.hpp"

#include <algorithm>

#include "finmet/error.hpp"

namespace finmet {

namespace {

void require_finite_metric(const FinSpace &space, const char *role) {
  const SpaceClass cls = space.space_class();
  if (!cls.is_pseudo)
    throw SemanticError("E_INFINITE_DISTANCE",
                        std::string(role) + " has an infinite distance");
  if (!cls.is_metric)
    throw SemanticError("E_NOT_METRIC",
                        std::string(role) + " is not a metric space");
}

ExtValue map_distortion(const FinSpace &x, const FinSpace &y,
                        const std::vector<std::size_t> &phi) {
  ExtValue worst;
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = a + 1; b < x.size(); ++b)
      worst = ExtValue::max(
          worst, ExtValue::abs_diff(x.dist(a, b), y.dist(phi[a], phi[b])));
  return worst;
}

} // namespace

Correspondence Correspondence::make(
    FinSpace left, FinSpace right,
    const std::vector<std::pair<std::string, std::string>> &label_pairs) {
  Correspondence r{std::move(left), std::move(right), {}};
  for (const auto &[a, b] : label_pairs)
    r.pairs.emplace(r.left.index(a), r.right.index(b));
  std::vector<bool> l_hit(r.left.size(), false), r_hit(r.right.size(), false);
  for (const auto &[a, b] : r.pairs) {
    l_hit[a] = true;
    r_hit[b] = true;
  }
  for (std::size_t a = 0; a < l_hit.size(); ++a)
    if (!l_hit[a])
      throw SemanticError("E_NOT_TOTAL",
                          "correspondence misses left point '" +
                              r.left.label(a) + "'");
  for (std::size_t b = 0; b < r_hit.size(); ++b)
    if (!r_hit[b])
      throw SemanticError("E_NOT_TOTAL",
                          "correspondence misses right point '" +
                              r.right.label(b) + "'");
  return r;
}

std::vector<std::pair<std::string, std::string>>
Correspondence::label_pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(pairs.size());
  for (const auto &[a, b] : pairs)
    out.emplace_back(left.label(a), right.label(b));
  return out;
}

ExtValue distortion(const Correspondence &r) {
  ExtValue worst;
  for (auto p = r.pairs.begin(); p != r.pairs.end(); ++p)
    for (auto q = p; q != r.pairs.end(); ++q)
      worst = ExtValue::max(worst,
                            ExtValue::abs_diff(r.left.dist(p->first, q->first),
                                               r.right.dist(p->second, q->second)));
  return worst;
}

GHResult gh_exact(const FinSpace &x, const FinSpace &y, std::uint64_t budget) {
  require_finite_metric(x, "left space");
  require_finite_metric(y, "right space");

  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  {
    long double cost = 1.0L;
    for (std::size_t i = 0; i < nx; ++i)
      cost *= static_cast<long double>(ny);
    for (std::size_t j = 0; j < ny; ++j)
      cost *= static_cast<long double>(nx);
    if (cost > static_cast<long double>(budget))
      throw SemanticError("E_BUDGET",
                          "search space exceeds the budget",
                          {{"left", nx}, {"right", ny}, {"budget", budget}});
  }

  // Odometer over maps in lex order on (value at point 0, point 1, ...).
  auto advance = [](std::vector<std::size_t> &digits, std::size_t base) {
    for (std::size_t pos = digits.size(); pos-- > 0;) {
      if (++digits[pos] < base)
        return true;
      digits[pos] = 0;
    }
    return false;
  };

  ExtValue best = ExtValue::infinity();
  std::vector<std::size_t> best_phi, best_psi;

  std::vector<std::size_t> phi(nx, 0);
  do {
    const ExtValue dis_phi = map_distortion(x, y, phi);
    if (!best.is_infinite() && dis_phi >= best)
      continue;
    std::vector<std::size_t> psi(ny, 0);
    do {
      const ExtValue dis_psi = map_distortion(y, x, psi);
      ExtValue cost = ExtValue::max(dis_phi, dis_psi);
      if (!best.is_infinite() && cost >= best)
        continue;
      for (std::size_t a = 0; a < nx && cost < best; ++a)
        for (std::size_t b = 0; b < ny; ++b) {
          cost = ExtValue::max(
              cost, ExtValue::abs_diff(x.dist(a, psi[b]), y.dist(phi[a], b)));
          if (cost >= best)
            break;
        }
      if (cost < best) {
        best = cost;
        best_phi = phi;
        best_psi = psi;
      }
    } while (advance(psi, nx));
  } while (advance(phi, ny));

  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t a = 0; a < nx; ++a)
    pairs.emplace_back(x.label(a), y.label(best_phi[a]));
  for (std::size_t b = 0; b < ny; ++b)
    pairs.emplace_back(x.label(best_psi[b]), y.label(b));
  GHResult result{best.half(), Correspondence::make(x, y, pairs), {}, {}};
  for (std::size_t a = 0; a < nx; ++a)
    result.phi[x.label(a)] = y.label(best_phi[a]);
  for (std::size_t b = 0; b < ny; ++b)
    result.psi[y.label(b)] = x.label(best_psi[b]);

  if (distortion(result.witness) != best)
    throw SemanticError("E_INTERNAL",
                        "witness correspondence does not realize the cost");
  return result;
}

ExtValue gh_enum_oracle(const FinSpace &x, const FinSpace &y) {
  require_finite_metric(x, "left space");
  require_finite_metric(y, "right space");
  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  const std::size_t cells = nx * ny;
  if (cells > 16)
    throw SemanticError("E_TOO_LARGE", "oracle limited to |X|*|Y| <= 16",
                        {{"cells", cells}});

  // Pair-distortion table indexed into the sorted distinct values, so the
  // subset sweep below runs on small integers.
  std::vector<ExtValue> values;
  std::vector<std::size_t> table(cells * cells);
  {
    std::set<ExtValue> distinct;
    std::vector<ExtValue> raw(cells * cells);
    for (std::size_t p = 0; p < cells; ++p)
      for (std::size_t q = 0; q < cells; ++q) {
        const std::size_t xa = p / ny, yb = p % ny;
        const std::size_t xc = q / ny, yd = q % ny;
        raw[p * cells + q] =
            ExtValue::abs_diff(x.dist(xa, xc), y.dist(yb, yd));
        distinct.insert(raw[p * cells + q]);
      }
    values.assign(distinct.begin(), distinct.end());
    for (std::size_t i = 0; i < raw.size(); ++i)
      table[i] = static_cast<std::size_t>(
          std::lower_bound(values.begin(), values.end(), raw[i]) -
          values.begin());
  }

  std::vector<std::uint32_t> row_mask(cells), col_mask(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    row_mask[c] = std::uint32_t(1) << (c / ny);
    col_mask[c] = std::uint32_t(1) << (c % ny);
  }
  const std::uint32_t full_rows = (std::uint32_t(1) << nx) - 1;
  const std::uint32_t full_cols = (std::uint32_t(1) << ny) - 1;

  std::size_t best_idx = values.size(); // sentinel: no valid relation yet
  const std::uint32_t top = std::uint32_t(1) << cells;
  for (std::uint32_t mask = 1; mask < top; ++mask) {
    std::uint32_t rows = 0, cols = 0;
    for (std::uint32_t rest = mask; rest;) {
      const int c = __builtin_ctz(rest);
      rest &= rest - 1;
      rows |= row_mask[c];
      cols |= col_mask[c];
    }
    if (rows != full_rows || cols != full_cols)
      continue;
    std::size_t worst = 0;
    std::vector<int> picked;
    for (std::uint32_t rest = mask; rest;) {
      picked.push_back(__builtin_ctz(rest));
      rest &= rest - 1;
    }
    for (std::size_t a = 0; a < picked.size() && worst < best_idx; ++a)
      for (std::size_t b = a + 1; b < picked.size(); ++b) {
        worst = std::max(worst, table[std::size_t(picked[a]) * cells + picked[b]]);
        if (worst >= best_idx)
          break;
      }
    if (worst < best_idx)
      best_idx = worst;
  }
  return values[best_idx].half();
}

TwoPointFamily TwoPointFamily::wrap(Family family) {
  const FinSpace &base = family.base();
  if (base.size() != 2)
    throw SemanticError("E_SPACE_MISMATCH", "base must have exactly two points");
  const ExtValue r = base.dist(0, 1);
  if (r.is_zero() || r.is_infinite())
    throw SemanticError("E_DEGENERATE_RADIUS",
                        "two-point base distance must be positive finite");
  return TwoPointFamily{std::move(family), r, 0, 1};
}

TwoPointFamily glue_over_two_points(const FinSpace &x, const FinSpace &y,
                                    const Correspondence &r_corr,
                                    const ExtValue &r) {
  require_finite_metric(x, "left space");
  require_finite_metric(y, "right space");
  if (r_corr.left != x || r_corr.right != y)
    throw SemanticError("E_SPACE_MISMATCH",
                        "correspondence does not relate the given spaces");
  if (r.is_zero() || r.is_infinite())
    throw SemanticError("E_DEGENERATE_RADIUS",
                        "gluing radius must be positive finite");
  const ExtValue dis = distortion(r_corr);
  if (r + r < dis)
    throw SemanticError("E_RADIUS_TOO_SMALL", "2r must be at least dis(R)",
                        {{"r", r.str()}, {"distortion", dis.str()}});

  const std::size_t nx = x.size(), ny = y.size();
  const std::size_t n = nx + ny;
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < nx; ++i)
    labels[i] = "0:" + x.label(i);
  for (std::size_t j = 0; j < ny; ++j)
    labels[nx + j] = "1:" + y.label(j);

  std::vector<ExtValue> d(n * n);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nx; ++j)
      d[i * n + j] = x.dist(i, j);
  for (std::size_t i = 0; i < ny; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      d[(nx + i) * n + (nx + j)] = y.dist(i, j);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      ExtValue chain = ExtValue::infinity();
      for (const auto &[a, b] : r_corr.pairs)
        chain = ExtValue::min(chain, x.dist(i, a) + y.dist(j, b));
      d[i * n + (nx + j)] = r + chain;
      d[(nx + j) * n + i] = r + chain;
    }

  Family family = [&] {
    try {
      FinSpace total(labels, d);
      const FinSpace base = FinSpace::two_point(r);
      std::map<std::string, std::string> proj;
      for (std::size_t i = 0; i < nx; ++i)
        proj[labels[i]] = base.label(0);
      for (std::size_t j = 0; j < ny; ++j)
        proj[labels[nx + j]] = base.label(1);
      return proper_family_check(Morphism(total, base, proj));
    } catch (const SemanticError &e) {
      if (e.code() == "E_TRIANGLE")
        throw SemanticError("E_TRIANGLE_VIOLATION",
                            "glued two-point space is not a metric space",
                            e.detail());
      throw;
    }
  }();

  TwoPointFamily out = TwoPointFamily::wrap(std::move(family));
  const ExtValue dh = hausdorff_distance(
      SubsetRef{out.family.total(), out.family.fibers[out.fiber_zero]},
      SubsetRef{out.family.total(), out.family.fibers[out.fiber_r]});
  if (dh != r)
    throw SemanticError("E_INTERNAL",
                        "fiber Hausdorff distance does not equal r",
                        {{"dh", dh.str()}, {"r", r.str()}});
  return out;
}

Correspondence correspondence_from_family(const TwoPointFamily &fam) {
  const FinSpace &q = fam.family.total();
  const auto &fiber0 = fam.family.fibers[fam.fiber_zero];
  const auto &fiber1 = fam.family.fibers[fam.fiber_r];
  const FinSpace left = q.subspace(fiber0);
  const FinSpace right = q.subspace(fiber1);

  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t a : fiber0)
    for (std::size_t b : fiber1)
      if (q.dist(a, b) <= fam.r)
        pairs.emplace_back(q.label(a), q.label(b));

  // Totality follows from the fiber Hausdorff bound with attained minima.
  Correspondence r = Correspondence::make(left, right, pairs);
  if (distortion(r) > fam.r + fam.r)
    throw SemanticError("E_INTERNAL", "extracted distortion exceeds 2r");
  return r;
}

ExtValue chain_upper_bound(const std::vector<TwoPointFamily> &families,
                           const std::vector<Morphism> &links) {
  if (families.empty())
    throw SemanticError("E_ARITY", "chain needs at least one family");
  if (links.size() + 1 != families.size())
    throw SemanticError("E_ARITY", "a chain of n families needs n-1 links");

  for (std::size_t k = 0; k < links.size(); ++k) {
    if (links[k].dom() != families[k].fiber_r_space() ||
        links[k].cod() != families[k + 1].fiber_zero_space())
      throw SemanticError("E_SPACE_MISMATCH",
                          "link " + std::to_string(k) +
                              " does not join consecutive fibers");
    if (!links[k].is_isometry())
      throw SemanticError("E_LINK_NOT_ISOMETRY",
                          "link " + std::to_string(k) + " is not an isometry");
  }

  ExtValue sum;
  for (const TwoPointFamily &fam : families)
    sum += fam.r;
  return sum;
}

} // namespace finmet
