#include "finmet/submetry.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "finmet/error.hpp"

namespace finmet {

namespace {

ExtValue directed_hausdorff(const FinSpace &space,
                            const std::vector<std::size_t> &from,
                            const std::vector<std::size_t> &to) {
  ExtValue sup; // sup over the empty family is 0
  for (std::size_t a : from) {
    ExtValue inf = ExtValue::infinity(); // inf over the empty family is inf
    for (std::size_t b : to)
      inf = ExtValue::min(inf, space.dist(a, b));
    sup = ExtValue::max(sup, inf);
  }
  return sup;
}

std::vector<std::size_t> open_ball(const FinSpace &space, std::size_t center,
                                   const ExtValue &radius) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < space.size(); ++i)
    if (space.dist(center, i) < radius)
      out.push_back(i);
  return out;
}

/// Breakpoint radii for ball comparisons: the distinct positive finite
/// distance values of both spaces plus (max value + 1). Open balls are
/// constant between consecutive values, so these radii decide every radius.
std::vector<ExtValue> breakpoint_radii(const FinSpace &a, const FinSpace &b) {
  std::set<ExtValue> vals;
  for (const ExtValue &v : a.positive_finite_values())
    vals.insert(v);
  for (const ExtValue &v : b.positive_finite_values())
    vals.insert(v);
  ExtValue top = vals.empty() ? ExtValue() : *vals.rbegin();
  vals.insert(top + ExtValue::from_int(1));
  return {vals.begin(), vals.end()};
}

} // namespace

SubsetRef SubsetRef::of_labels(const FinSpace &space,
                               const std::vector<std::string> &labels) {
  SubsetRef ref{space, {}};
  for (const auto &l : labels)
    ref.members.push_back(space.index(l));
  std::sort(ref.members.begin(), ref.members.end());
  ref.members.erase(std::unique(ref.members.begin(), ref.members.end()),
                    ref.members.end());
  return ref;
}

ExtValue hausdorff_distance(const SubsetRef &f0, const SubsetRef &f1) {
  if (f0.space != f1.space)
    throw SemanticError("E_SPACE_MISMATCH",
                        "Hausdorff distance needs subsets of one space");
  return ExtValue::max(directed_hausdorff(f0.space, f0.members, f1.members),
                       directed_hausdorff(f0.space, f1.members, f0.members));
}

nlohmann::json SubmetryReport::to_json() const {
  nlohmann::json j{{"verdict", verdict},
                   {"criteria",
                    {{"definitional", definitional},
                     {"fiber_min", fiber_min},
                     {"ball", ball}}},
                   {"surjective", surjective}};
  if (!surjective)
    j["uncovered"] = uncovered;
  if (witness)
    j["witness"] = *witness;
  return j;
}

SubmetryReport submetry_check(const Morphism &f) {
  const FinSpace &x = f.dom();
  const FinSpace &b = f.cod();
  const auto fibers = f.fibers();

  for (std::size_t b0 = 0; b0 < b.size(); ++b0)
    for (std::size_t b1 = b0 + 1; b1 < b.size(); ++b1)
      if (!fibers[b0].empty() && !fibers[b1].empty() &&
          b.dist(b0, b1).is_infinite())
        throw SemanticError("E_INFINITE_BASE_DISTANCE",
                            "infinite base distance between inhabited fibers",
                            {{"pair", {b.label(b0), b.label(b1)}}});

  SubmetryReport report;
  report.surjective = f.is_surjective();

  // (a) definitional: fiber Hausdorff distance bounded by base distance.
  report.definitional = true;
  for (std::size_t b0 = 0; b0 < b.size() && report.definitional; ++b0)
    for (std::size_t b1 = 0; b1 < b.size(); ++b1) {
      const ExtValue dh = ExtValue::max(
          directed_hausdorff(x, fibers[b0], fibers[b1]),
          directed_hausdorff(x, fibers[b1], fibers[b0]));
      if (dh > b.dist(b0, b1)) {
        report.definitional = false;
        break;
      }
    }

  // (b) fiber-min: distances to fibers are attained at the base distance.
  report.fiber_min = true;
  for (std::size_t i = 0; i < x.size() && report.fiber_min; ++i)
    for (std::size_t bt = 0; bt < b.size(); ++bt) {
      ExtValue best = ExtValue::infinity();
      for (std::size_t j : fibers[bt])
        best = ExtValue::min(best, x.dist(i, j));
      if (best != b.dist(f.apply(i), bt)) {
        report.fiber_min = false;
        report.witness = {{"point", x.label(i)},
                          {"target_fiber", b.label(bt)},
                          {"fiber_min", best.str()},
                          {"base_distance", b.dist(f.apply(i), bt).str()},
                          {"deficit",
                           ExtValue::abs_diff(best, b.dist(f.apply(i), bt)).str()}};
        break;
      }
    }

  // (c) balls map onto balls of equal radius, tested at breakpoint radii.
  report.ball = true;
  const auto radii = breakpoint_radii(x, b);
  for (std::size_t i = 0; i < x.size() && report.ball; ++i)
    for (const ExtValue &r : radii) {
      std::set<std::size_t> image;
      for (std::size_t j : open_ball(x, i, r))
        image.insert(f.apply(j));
      const auto base_ball = open_ball(b, f.apply(i), r);
      if (image != std::set<std::size_t>(base_ball.begin(), base_ball.end())) {
        report.ball = false;
        break;
      }
    }

  if (report.definitional != report.fiber_min || report.fiber_min != report.ball)
    throw SemanticError("E_INTERNAL", "submetry criteria disagree",
                        report.to_json());

  report.verdict = report.surjective && report.definitional;
  if (!report.surjective)
    for (std::size_t u : f.uncovered())
      report.uncovered.push_back(b.label(u));
  return report;
}

FinSpace Family::fiber_space(std::size_t base_index) const {
  return total().subspace(fibers[base_index]);
}

Family proper_family_check(const Morphism &p) {
  const auto missing = p.uncovered();
  if (!missing.empty()) {
    nlohmann::json labels = nlohmann::json::array();
    for (std::size_t u : missing)
      labels.push_back(p.cod().label(u));
    throw SemanticError("E_NOT_SURJECTIVE", "family projection is not surjective",
                        {{"uncovered", labels}});
  }
  const SubmetryReport report = submetry_check(p);
  if (!report.verdict)
    throw SemanticError("E_NOT_SUBMETRY", "family projection is not a submetry",
                        report.to_json());
  return Family{p, p.fibers()};
}

namespace {

HyperspaceResult hyperspace_impl(const Morphism &f, std::size_t cap) {
  const FinSpace &x = f.dom();
  if (x.size() >= 63 || ((std::uint64_t(1) << x.size()) - 1) > cap)
    throw SemanticError("E_TOO_LARGE",
                        "hyperspace would exceed the subset cap",
                        {{"points", x.size()}, {"cap", cap}});

  const auto fibers = f.fibers();
  std::vector<std::pair<std::string, std::vector<std::size_t>>> entries;
  for (std::size_t bi = 0; bi < fibers.size(); ++bi) {
    const auto &fiber = fibers[bi];
    const std::size_t k = fiber.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << k); ++mask) {
      std::vector<std::size_t> subset;
      for (std::size_t t = 0; t < k; ++t)
        if (mask & (std::uint64_t(1) << t))
          subset.push_back(fiber[t]);
      std::string label;
      for (std::size_t m : subset) {
        if (!label.empty())
          label += "|";
        label += x.label(m);
      }
      entries.emplace_back(std::move(label), std::move(subset));
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });

  const std::size_t n = entries.size();
  std::vector<std::string> labels(n);
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = entries[i].first;
    members[i] = entries[i].second;
  }
  std::vector<ExtValue> d(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t bq = a; bq < n; ++bq) {
      const ExtValue dh =
          ExtValue::max(directed_hausdorff(x, members[a], members[bq]),
                        directed_hausdorff(x, members[bq], members[a]));
      d[a * n + bq] = dh;
      d[bq * n + a] = dh;
    }
  FinSpace hyper(labels, d);
  std::map<std::string, std::string> base_map;
  for (std::size_t i = 0; i < n; ++i)
    base_map[labels[i]] = f.cod().label(f.apply(members[i].front()));
  Morphism to_base(hyper, f.cod(), base_map);
  return {hyper, to_base, f, members};
}

} // namespace

HyperspaceResult hyperspace(const Morphism &f, std::size_t cap) {
  return hyperspace_impl(f, cap);
}

HyperspaceResult hyperspace_absolute(const FinSpace &x, std::size_t cap) {
  const FinSpace point = FinSpace::single_point("*");
  return hyperspace_impl(Morphism::constant(x, point, "*"), cap);
}

Family map_to_family(const HyperspaceResult &hyper, const Morphism &g) {
  if (g.cod() != hyper.space)
    throw SemanticError("E_SPACE_MISMATCH",
                        "map codomain is not the given hyperspace");
  const FinSpace &x = hyper.source.dom();
  const FinSpace &t = g.dom();

  std::vector<std::string> labels;
  std::vector<std::pair<std::size_t, std::size_t>> coords; // (x index, t index)
  for (std::size_t ti = 0; ti < t.size(); ++ti)
    for (std::size_t xi : hyper.members[g.apply(ti)]) {
      labels.push_back(pair_label(x.label(xi), t.label(ti)));
      coords.emplace_back(xi, ti);
    }
  const std::size_t n = labels.size();
  std::vector<ExtValue> d(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t bq = 0; bq < n; ++bq)
      d[a * n + bq] = ExtValue::max(x.dist(coords[a].first, coords[bq].first),
                                    t.dist(coords[a].second, coords[bq].second));
  FinSpace total(labels, d);
  std::map<std::string, std::string> proj;
  for (std::size_t a = 0; a < n; ++a)
    proj[labels[a]] = t.label(coords[a].second);
  return proper_family_check(Morphism(total, t, proj));
}

Morphism family_to_map(const HyperspaceResult &hyper, const Family &fam) {
  const FinSpace &x = hyper.source.dom();
  const FinSpace &t = fam.base();

  // Verify the input family is proper; the Family type itself only caches.
  Family checked = [&] {
    try {
      return proper_family_check(fam.projection);
    } catch (const SemanticError &e) {
      throw SemanticError("E_NOT_PROPER", "family is not proper", e.detail());
    }
  }();

  std::map<std::string, std::string> out;
  for (std::size_t ti = 0; ti < t.size(); ++ti) {
    std::vector<std::size_t> subset;
    for (std::size_t pi : checked.fibers[ti]) {
      const auto [x_label, t_label] =
          split_pair_label(fam.total().label(pi), x.points(), t.points());
      if (t_label != t.label(ti))
        throw SemanticError("E_NOT_PROPER",
                            "total point lies over the wrong base point",
                            {{"point", fam.total().label(pi)}});
      subset.push_back(x.index(x_label));
    }
    std::sort(subset.begin(), subset.end());
    const auto it = std::find(hyper.members.begin(), hyper.members.end(), subset);
    if (it == hyper.members.end())
      throw SemanticError("E_NOT_PROPER",
                          "fiber is not a point of the hyperspace",
                          {{"base_point", t.label(ti)}});
    out[t.label(ti)] =
        hyper.space.label(static_cast<std::size_t>(it - hyper.members.begin()));
  }
  return Morphism(t, hyper.space, out);
}

PointedFamily::PointedFamily(Family fam, std::vector<Morphism> secs)
    : family(std::move(fam)), sections(std::move(secs)) {
  for (const Morphism &s : sections) {
    if (s.dom() != family.base() || s.cod() != family.total())
      throw SemanticError("E_SPACE_MISMATCH", "section spaces do not match");
    if (s.then(family.projection) != Morphism::identity(family.base()))
      throw SemanticError("E_NOT_SECTION", "p o s is not the identity");
  }
}

PointedFamily pointed_pullback(const PointedFamily &fam, const Morphism &f) {
  if (f.cod() != fam.family.base())
    throw SemanticError("E_SPACE_MISMATCH", "pullback base does not match");
  const ProductResult pb = fiber_product(fam.family.projection, f);
  const FinSpace &t = f.dom();
  Family pulled = proper_family_check(pb.to_right);

  std::vector<Morphism> sections;
  for (const Morphism &s : fam.sections) {
    std::map<std::string, std::string> table;
    for (std::size_t ti = 0; ti < t.size(); ++ti) {
      const std::size_t p_index = s.apply(f.apply(ti));
      table[t.label(ti)] =
          pair_label(fam.family.total().label(p_index), t.label(ti));
    }
    sections.emplace_back(t, pulled.total(), table);
  }
  return PointedFamily(std::move(pulled), std::move(sections));
}

PointedFamily diagonal_family(const PointedFamily &fam) {
  const Morphism &p = fam.family.projection;
  PointedFamily pulled = pointed_pullback(fam, p);
  const FinSpace &total = fam.family.total();

  std::map<std::string, std::string> diag;
  for (std::size_t i = 0; i < total.size(); ++i)
    diag[total.label(i)] = pair_label(total.label(i), total.label(i));
  std::vector<Morphism> sections = pulled.sections;
  sections.emplace_back(total, pulled.family.total(), diag);

  // The universal-family square: forgetting the diagonal recovers the
  // pullback along p exactly.
  PointedFamily result(pulled.family, std::move(sections));
  if (result.family.projection != pulled.family.projection)
    throw SemanticError("E_INTERNAL", "diagonal family square does not commute");
  return result;
}

} // namespace finmet
