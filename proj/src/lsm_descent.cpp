#include "finmet/lsm_descent.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "finmet/error.hpp"
#include "finmet/submetry.hpp"

namespace finmet {

namespace {

void require_metric(const FinSpace &space, const char *role) {
  const SpaceClass cls = space.space_class();
  if (!cls.is_metric || !cls.is_pseudo)
    throw SemanticError("E_NOT_METRIC",
                        std::string(role) + " must be a metric space (no zero "
                                            "or infinite off-diagonal entries)");
}

std::vector<std::size_t> open_ball(const FinSpace &space, std::size_t center,
                                   const ExtValue &radius) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < space.size(); ++i)
    if (space.dist(center, i) < radius)
      out.push_back(i);
  return out;
}

/// Does f map ball(u, s) onto ball(f u, s)?
bool ball_onto_ball(const Morphism &f, std::size_t u, const ExtValue &s) {
  std::set<std::size_t> image;
  for (std::size_t j : open_ball(f.dom(), u, s))
    image.insert(f.apply(j));
  const auto target = open_ball(f.cod(), f.apply(u), s);
  return image == std::set<std::size_t>(target.begin(), target.end());
}

} // namespace

ExtValue local_submetry_radius(const Morphism &f, const std::string &x) {
  require_metric(f.dom(), "domain");
  require_metric(f.cod(), "codomain");
  const FinSpace &dom = f.dom();

  // Breakpoint radii: distinct positive values of both spaces plus a
  // sentinel past the largest; ball contents are constant in between.
  std::set<ExtValue> s_values;
  for (const ExtValue &v : dom.positive_finite_values())
    s_values.insert(v);
  for (const ExtValue &v : f.cod().positive_finite_values())
    s_values.insert(v);
  const ExtValue top = s_values.empty() ? ExtValue() : *s_values.rbegin();
  s_values.insert(top + ExtValue::from_int(1));
  const std::vector<ExtValue> radii(s_values.begin(), s_values.end());

  // good_below[u]: largest T such that the ball condition holds at u for all
  // 0 < s < T (infinite when it never fails, the previous breakpoint when the
  // first failure is at breakpoint k, zero when k == 0).
  auto good_below = [&](std::size_t u) -> ExtValue {
    for (std::size_t k = 0; k < radii.size(); ++k)
      if (!ball_onto_ball(f, u, radii[k]))
        return k == 0 ? ExtValue() : radii[k - 1];
    return ExtValue::infinity();
  };

  const std::size_t xi = dom.index(x);
  ExtValue radius = ExtValue::infinity();
  for (std::size_t u = 0; u < dom.size(); ++u)
    radius = ExtValue::min(radius, dom.dist(xi, u) + good_below(u));
  return radius;
}

Covering lsm_covering_check(const FinSpace &base, std::vector<Morphism> legs) {
  if (legs.empty())
    throw SemanticError("E_CODOMAIN_MISMATCH", "a covering needs at least one leg");
  for (std::size_t i = 0; i < legs.size(); ++i)
    if (legs[i].cod() != base)
      throw SemanticError("E_CODOMAIN_MISMATCH",
                          "leg " + std::to_string(i) +
                              " does not map into the base");
  require_metric(base, "covering base");
  for (const Morphism &leg : legs)
    require_metric(leg.dom(), "covering leg domain");

  // Local-submetry assertion; automatic on finite metric spaces.
  for (std::size_t i = 0; i < legs.size(); ++i)
    for (const std::string &p : legs[i].dom().points())
      if (local_submetry_radius(legs[i], p).is_zero())
        throw SemanticError("E_INTERNAL",
                            "leg unexpectedly fails to be a local submetry",
                            {{"leg", i}, {"point", p}});

  std::vector<std::vector<std::vector<std::size_t>>> fibers;
  fibers.reserve(legs.size());
  for (const Morphism &leg : legs)
    fibers.push_back(leg.fibers());

  const std::size_t n = base.size();
  for (std::size_t x1 = 0; x1 < n; ++x1)
    for (std::size_t x2 = 0; x2 < n; ++x2)
      for (std::size_t x3 = 0; x3 < n; ++x3) {
        const ExtValue &d12 = base.dist(x1, x2);
        const ExtValue &d23 = base.dist(x2, x3);
        bool lifted = false;
        ExtValue best_slack = ExtValue::infinity();
        for (std::size_t i = 0; i < legs.size() && !lifted; ++i) {
          const FinSpace &u_space = legs[i].dom();
          for (std::size_t u2 : fibers[i][x2]) {
            ExtValue slack12 = ExtValue::infinity();
            for (std::size_t u1 : fibers[i][x1])
              slack12 = ExtValue::min(
                  slack12, ExtValue::minus(u_space.dist(u1, u2), d12));
            ExtValue slack23 = ExtValue::infinity();
            for (std::size_t u3 : fibers[i][x3])
              slack23 = ExtValue::min(
                  slack23, ExtValue::minus(u_space.dist(u2, u3), d23));
            const ExtValue slack = ExtValue::max(slack12, slack23);
            best_slack = ExtValue::min(best_slack, slack);
            if (slack.is_zero()) {
              lifted = true;
              break;
            }
          }
        }
        if (!lifted)
          throw SemanticError(
              "E_TRIPLE_UNLIFTABLE", "triple has no exact lift in any leg",
              {{"triple", {base.label(x1), base.label(x2), base.label(x3)}},
               {"best_slack", best_slack.str()}});
      }

  return Covering{base, std::move(legs)};
}

Covering covering_from_submetry(const Morphism &f, const ExtValue &r) {
  if (r.is_zero())
    throw SemanticError("E_DEGENERATE_RADIUS", "ball radius must be positive");
  const SubmetryReport report = submetry_check(f);
  if (!report.verdict)
    throw SemanticError("E_NOT_SUBMETRY", "map is not a submetry",
                        report.to_json());

  const FinSpace &x = f.dom();
  std::set<std::vector<std::size_t>> subsets;
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = a; b < x.size(); ++b)
      for (std::size_t c = b; c < x.size(); ++c) {
        std::set<std::size_t> members;
        for (std::size_t center : {a, b, c})
          for (std::size_t p : open_ball(x, center, r))
            members.insert(p);
        subsets.insert({members.begin(), members.end()});
      }

  std::vector<Morphism> legs;
  for (const auto &members : subsets) {
    const FinSpace sub = x.subspace(members);
    std::map<std::string, std::string> table;
    for (std::size_t m : members)
      table[x.label(m)] = f.cod().label(f.apply(m));
    legs.emplace_back(sub, f.cod(), table);
  }
  return lsm_covering_check(f.cod(), std::move(legs));
}

Covering covering_pullback(const Covering &cov, const Morphism &g) {
  if (g.cod() != cov.base)
    throw SemanticError("E_SPACE_MISMATCH", "pullback map must land in the base");
  std::vector<Morphism> legs;
  for (const Morphism &leg : cov.legs) {
    try {
      legs.push_back(fiber_product(leg, g).to_right);
    } catch (const SemanticError &e) {
      if (e.code() != "E_EMPTY")
        throw;
      // empty legs are dropped
    }
  }
  return lsm_covering_check(g.dom(), std::move(legs));
}

Covering covering_compose(const Covering &cov,
                          const std::vector<Covering> &refinements) {
  if (refinements.size() != cov.legs.size())
    throw SemanticError("E_ARITY", "one refinement covering per leg required");
  std::vector<Morphism> legs;
  for (std::size_t i = 0; i < cov.legs.size(); ++i) {
    if (refinements[i].base != cov.legs[i].dom())
      throw SemanticError("E_SPACE_MISMATCH",
                          "refinement " + std::to_string(i) +
                              " does not cover the leg domain");
    for (const Morphism &g : refinements[i].legs)
      legs.push_back(g.then(cov.legs[i]));
  }
  return lsm_covering_check(cov.base, std::move(legs));
}

Morphism glue_morphisms(const Covering &cov, const std::vector<Morphism> &pieces) {
  if (pieces.size() != cov.legs.size())
    throw SemanticError("E_ARITY", "one piece per covering leg required");
  for (std::size_t i = 0; i < pieces.size(); ++i)
    if (pieces[i].dom() != cov.legs[i].dom())
      throw SemanticError("E_SPACE_MISMATCH",
                          "piece " + std::to_string(i) +
                              " is not defined on its leg domain");
  const FinSpace &target = pieces.front().cod();
  for (const Morphism &piece : pieces)
    if (piece.cod() != target)
      throw SemanticError("E_SPACE_MISMATCH", "pieces must share a codomain");

  // Compatibility over every overlap, including self-overlaps.
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (std::size_t j = 0; j < pieces.size(); ++j)
      for (std::size_t u = 0; u < cov.legs[i].dom().size(); ++u)
        for (std::size_t v = 0; v < cov.legs[j].dom().size(); ++v)
          if (cov.legs[i].apply(u) == cov.legs[j].apply(v) &&
              pieces[i].apply(u) != pieces[j].apply(v))
            throw SemanticError(
                "E_INCOMPATIBLE", "pieces disagree on an overlap point",
                {{"legs", {i, j}},
                 {"overlap_point",
                  {cov.legs[i].dom().label(u), cov.legs[j].dom().label(v)}},
                 {"values",
                  {pieces[i].cod().label(pieces[i].apply(u)),
                   pieces[j].cod().label(pieces[j].apply(v))}}});

  std::map<std::string, std::string> glued;
  for (std::size_t t = 0; t < cov.base.size(); ++t) {
    bool found = false;
    for (std::size_t i = 0; i < cov.legs.size() && !found; ++i)
      for (std::size_t u = 0; u < cov.legs[i].dom().size(); ++u)
        if (cov.legs[i].apply(u) == t) {
          glued[cov.base.label(t)] = target.label(pieces[i].apply(u));
          found = true;
          break;
        }
    if (!found)
      throw SemanticError("E_NOT_COVERING",
                          "base point not covered by any leg",
                          {{"point", cov.base.label(t)}});
  }
  return Morphism(cov.base, target, glued);
}

namespace {

/// All (u, v) with f_i(u) = f_j(v).
std::vector<std::pair<std::size_t, std::size_t>>
overlap_points(const Covering &cov, std::size_t i, std::size_t j) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t u = 0; u < cov.legs[i].dom().size(); ++u)
    for (std::size_t v = 0; v < cov.legs[j].dom().size(); ++v)
      if (cov.legs[i].apply(u) == cov.legs[j].apply(v))
        out.emplace_back(u, v);
  return out;
}

std::string transition_point_name(const DescentDatum &datum, std::size_t chart,
                                  const std::array<std::size_t, 3> &point,
                                  std::size_t other) {
  return "(" + datum.charts[chart].dom().label(point[0]) + "|" +
         datum.covering.legs[chart].dom().label(point[1]) + "|" +
         datum.covering.legs[other].dom().label(point[2]) + ")";
}

} // namespace

DescentDatum DescentDatum::canonical(const Covering &cov, const Morphism &family) {
  if (family.cod() != cov.base)
    throw SemanticError("E_SPACE_MISMATCH", "family must live over the base");
  DescentDatum datum{cov, {}, {}};
  std::vector<ProductResult> pullbacks;
  for (const Morphism &leg : cov.legs) {
    pullbacks.push_back(fiber_product(family, leg));
    datum.charts.push_back(pullbacks.back().to_right);
  }
  const FinSpace &q = family.dom();
  for (std::size_t i = 0; i < cov.legs.size(); ++i)
    for (std::size_t j = 0; j < cov.legs.size(); ++j) {
      TransitionTable table;
      for (const auto &[u, v] : overlap_points(cov, i, j)) {
        const std::string u_label = cov.legs[i].dom().label(u);
        const std::string v_label = cov.legs[j].dom().label(v);
        for (std::size_t z = 0; z < q.size(); ++z) {
          if (family.apply(z) != cov.legs[i].apply(u))
            continue;
          const std::size_t a =
              pullbacks[i].space.index(pair_label(q.label(z), u_label));
          const std::size_t b =
              pullbacks[j].space.index(pair_label(q.label(z), v_label));
          table[{a, u, v}] = {b, u, v};
        }
      }
      if (!table.empty())
        datum.transitions[{i, j}] = std::move(table);
    }
  return datum;
}

nlohmann::json CocycleReport::to_json() const {
  nlohmann::json items = nlohmann::json::array();
  for (const auto &v : violations)
    items.push_back({{"code", v.code}, {"detail", v.detail}});
  return {{"ok", ok()}, {"violations", items}};
}

CocycleReport check_cocycle(const DescentDatum &datum) {
  const Covering &cov = datum.covering;
  if (datum.charts.size() != cov.legs.size())
    throw SemanticError("E_ARITY", "one chart per covering leg required");
  for (std::size_t i = 0; i < datum.charts.size(); ++i)
    if (datum.charts[i].cod() != cov.legs[i].dom())
      throw SemanticError("E_SPACE_MISMATCH",
                          "chart " + std::to_string(i) +
                              " does not live over its leg domain");

  CocycleReport report;
  auto violate = [&](const std::string &code, nlohmann::json detail) {
    report.violations.push_back({code, std::move(detail)});
  };

  const std::size_t k = datum.charts.size();
  std::vector<std::vector<std::vector<std::size_t>>> chart_fibers;
  chart_fibers.reserve(k);
  for (const Morphism &chart : datum.charts)
    chart_fibers.push_back(chart.fibers());

  // Effective transition tables with diagonal identities filled in.
  std::map<std::pair<std::size_t, std::size_t>, TransitionTable> effective;

  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      std::set<std::array<std::size_t, 3>> lhs, rhs;
      for (const auto &[u, v] : overlap_points(cov, i, j)) {
        for (std::size_t a : chart_fibers[i][u])
          lhs.insert({a, u, v});
        for (std::size_t b : chart_fibers[j][v])
          rhs.insert({b, u, v});
      }

      TransitionTable table;
      const auto it = datum.transitions.find({i, j});
      if (it != datum.transitions.end())
        table = it->second;
      else if (i == j) {
        // missing self-transition: identity on the diagonal part only
        bool off_diagonal = false;
        for (const auto &point : lhs) {
          if (point[1] == point[2])
            table[point] = point;
          else
            off_diagonal = true;
        }
        if (off_diagonal) {
          violate("E_NOT_OVER_OVERLAP",
                  {{"pair", {i, j}},
                   {"reason", "self-overlap has off-diagonal points but no "
                              "transition was given"}});
          continue;
        }
      }

      if (table.empty() && lhs.empty())
        continue;

      bool structural_ok = true;
      for (const auto &[from, to] : table) {
        if (!lhs.count(from)) {
          violate("E_NOT_OVER_OVERLAP",
                  {{"pair", {i, j}},
                   {"point", transition_point_name(datum, i, from, j)},
                   {"reason", "not a point of the overlap fiber product"}});
          structural_ok = false;
        } else if (!rhs.count(to) || to[1] != from[1] || to[2] != from[2]) {
          violate("E_NOT_OVER_OVERLAP",
                  {{"pair", {i, j}},
                   {"point", transition_point_name(datum, i, from, j)},
                   {"reason", "image does not lie over the same overlap point"}});
          structural_ok = false;
        }
      }
      if (structural_ok) {
        std::set<std::array<std::size_t, 3>> image;
        for (const auto &[from, to] : table)
          image.insert(to);
        if (table.size() != lhs.size() || image.size() != rhs.size() ||
            table.size() != image.size()) {
          violate("E_NOT_OVER_OVERLAP",
                  {{"pair", {i, j}},
                   {"reason", "transition is not a bijection over the overlap"}});
          structural_ok = false;
        }
      }
      if (!structural_ok)
        continue;

      // isometry over the overlap
      const FinSpace &pi = datum.charts[i].dom();
      const FinSpace &pj = datum.charts[j].dom();
      const FinSpace &ui = cov.legs[i].dom();
      const FinSpace &uj = cov.legs[j].dom();
      for (auto a = table.begin(); a != table.end(); ++a)
        for (auto b = std::next(a); b != table.end(); ++b) {
          const ExtValue overlap_part =
              ExtValue::max(ui.dist(a->first[1], b->first[1]),
                            uj.dist(a->first[2], b->first[2]));
          const ExtValue lhs_d =
              ExtValue::max(pi.dist(a->first[0], b->first[0]), overlap_part);
          const ExtValue rhs_d =
              ExtValue::max(pj.dist(a->second[0], b->second[0]), overlap_part);
          if (lhs_d != rhs_d)
            violate("E_NOT_ISOMETRY",
                    {{"pair", {i, j}},
                     {"points",
                      {transition_point_name(datum, i, a->first, j),
                       transition_point_name(datum, i, b->first, j)}},
                     {"d_lhs", lhs_d.str()},
                     {"d_rhs", rhs_d.str()}});
        }

      // diagonal part of phi_ii is the identity
      if (i == j)
        for (const auto &[from, to] : table)
          if (from[1] == from[2] && to != from)
            violate("E_COCYCLE",
                    {{"pair", {i, j}},
                     {"point", transition_point_name(datum, i, from, j)},
                     {"reason", "phi_ii is not the identity on the diagonal"}});

      effective[{i, j}] = std::move(table);
    }

  if (!report.ok())
    return report;

  // cocycle identity on triple overlaps, pointwise
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t l = 0; l < k; ++l) {
        const auto ij = effective.find({i, j});
        const auto jl = effective.find({j, l});
        const auto il = effective.find({i, l});
        if (ij == effective.end())
          continue;
        for (const auto &[from, to] : ij->second) {
          const std::size_t u = from[1], v = from[2];
          for (std::size_t w = 0; w < cov.legs[l].dom().size(); ++w) {
            if (cov.legs[l].apply(w) != cov.legs[i].apply(u))
              continue;
            if (jl == effective.end() || il == effective.end()) {
              violate("E_COCYCLE", {{"triple", {i, j, l}},
                                    {"reason", "missing transition on a triple "
                                               "overlap"}});
              continue;
            }
            const auto step1 = jl->second.find({to[0], v, w});
            const auto direct = il->second.find({from[0], u, w});
            if (step1 == jl->second.end() || direct == il->second.end())
              continue; // structural failure already reported
            if (step1->second[0] != direct->second[0])
              violate("E_COCYCLE",
                      {{"triple", {i, j, l}},
                       {"point",
                        {datum.charts[i].dom().label(from[0]),
                         cov.legs[i].dom().label(u), cov.legs[j].dom().label(v),
                         cov.legs[l].dom().label(w)}},
                       {"via", datum.charts[l].dom().label(step1->second[0])},
                       {"direct", datum.charts[l].dom().label(direct->second[0])}});
          }
        }
      }

  return report;
}

GluedSpace glue_descent(const DescentDatum &datum) {
  const CocycleReport report = check_cocycle(datum);
  if (!report.ok())
    throw SemanticError(report.violations.front().code,
                        "descent datum rejected", report.to_json());

  const Covering &cov = datum.covering;
  const std::size_t k = datum.charts.size();
  std::vector<std::size_t> offset(k + 1, 0);
  for (std::size_t i = 0; i < k; ++i)
    offset[i + 1] = offset[i] + datum.charts[i].dom().size();
  const std::size_t total_points = offset.back();

  // Union-find over the glued relation.
  std::vector<std::size_t> parent(total_points);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  for (const auto &[pair, table] : datum.transitions)
    for (const auto &[from, to] : table)
      parent[find(offset[pair.first] + from[0])] =
          find(offset[pair.second] + to[0]);

  auto member_name = [&](std::size_t g) {
    std::size_t i = 0;
    while (offset[i + 1] <= g)
      ++i;
    return std::make_pair(i, datum.charts[i].dom().label(g - offset[i]));
  };

  std::map<std::size_t, std::pair<std::size_t, std::string>> least;
  for (std::size_t g = 0; g < total_points; ++g) {
    const std::size_t root = find(g);
    const auto name = member_name(g);
    auto it = least.find(root);
    if (it == least.end() || name < it->second)
      least[root] = name;
  }
  std::vector<std::string> labels;
  std::map<std::size_t, std::size_t> class_of_root;
  {
    std::vector<std::pair<std::pair<std::size_t, std::string>, std::size_t>> order;
    for (const auto &[root, name] : least)
      order.emplace_back(name, root);
    std::sort(order.begin(), order.end());
    for (const auto &[name, root] : order) {
      class_of_root[root] = labels.size();
      labels.push_back(std::to_string(name.first) + ":" + name.second);
    }
  }
  const std::size_t m = labels.size();
  std::vector<std::size_t> cls(total_points);
  for (std::size_t g = 0; g < total_points; ++g)
    cls[g] = class_of_root[find(g)];
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> members(m);
  for (std::size_t g = 0; g < total_points; ++g) {
    const auto name = member_name(g);
    members[cls[g]].emplace_back(name.first, g - offset[name.first]);
  }

  // Base image per class; consistent across members by the glue relation.
  std::vector<std::size_t> base_of(m);
  for (std::size_t c = 0; c < m; ++c) {
    const auto [i, a] = members[c].front();
    base_of[c] = cov.legs[i].apply(datum.charts[i].apply(a));
    for (const auto &[j, b] : members[c])
      if (cov.legs[j].apply(datum.charts[j].apply(b)) != base_of[c])
        throw SemanticError("E_INTERNAL", "glued class has inconsistent base");
  }

  // The proof's distance: minimum over single-chart representative pairs.
  std::vector<ExtValue> d(m * m, ExtValue::infinity());
  for (std::size_t c0 = 0; c0 < m; ++c0) {
    d[c0 * m + c0] = ExtValue();
    for (std::size_t c1 = c0 + 1; c1 < m; ++c1) {
      ExtValue best = ExtValue::infinity();
      for (const auto &[i, a0] : members[c0])
        for (const auto &[j, a1] : members[c1])
          if (i == j)
            best = ExtValue::min(best, datum.charts[i].dom().dist(a0, a1));
      d[c0 * m + c1] = best;
      d[c1 * m + c0] = best;
    }
  }

  GluedSpace out = [&] {
    try {
      FinSpace total(labels, d);
      std::map<std::string, std::string> proj;
      for (std::size_t c = 0; c < m; ++c)
        proj[labels[c]] = cov.base.label(base_of[c]);
      Morphism projection(total, cov.base, proj);
      return GluedSpace{std::move(total), std::move(projection), {}, {}};
    } catch (const SemanticError &e) {
      nlohmann::json dump{{"labels", labels}, {"error", e.detail()}};
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t a = 0; a < m; ++a) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t b = 0; b < m; ++b)
          row.push_back(d[a * m + b].str());
        rows.push_back(row);
      }
      dump["matrix"] = rows;
      throw SemanticError("E_TRIANGLE_VIOLATION",
                          "glued distance is not a pseudometric; the covering "
                          "must be invalid",
                          dump);
    }
  }();

  for (std::size_t i = 0; i < k; ++i) {
    const FinSpace &pi = datum.charts[i].dom();
    std::map<std::string, std::string> table;
    for (std::size_t a = 0; a < pi.size(); ++a)
      table[pi.label(a)] = out.total.label(cls[offset[i] + a]);
    out.chart_maps.emplace_back(pi, out.total, table);
  }

  // Chart max-formula, then the chart isometries onto the pullbacks.
  for (std::size_t i = 0; i < k; ++i) {
    const FinSpace &pi = datum.charts[i].dom();
    const FinSpace &ui = cov.legs[i].dom();
    for (std::size_t a = 0; a < pi.size(); ++a)
      for (std::size_t b = 0; b < pi.size(); ++b) {
        const ExtValue expected = ExtValue::max(
            out.total.dist(out.chart_maps[i].apply(a), out.chart_maps[i].apply(b)),
            ui.dist(datum.charts[i].apply(a), datum.charts[i].apply(b)));
        if (pi.dist(a, b) != expected)
          throw SemanticError("E_INTERNAL", "chart max-formula fails",
                              {{"chart", i},
                               {"points", {pi.label(a), pi.label(b)}},
                               {"chart_distance", pi.dist(a, b).str()},
                               {"max_formula", expected.str()}});
      }

    const ProductResult pullback = fiber_product(out.projection, cov.legs[i]);
    std::map<std::string, std::string> iso;
    for (std::size_t a = 0; a < pi.size(); ++a)
      iso[pi.label(a)] =
          pair_label(out.total.label(cls[offset[i] + a]),
                     ui.label(datum.charts[i].apply(a)));
    Morphism phi(pi, pullback.space, iso);
    if (!phi.is_isometry() || pi.size() != pullback.space.size())
      throw SemanticError("E_INTERNAL",
                          "chart is not isometric to the glued pullback",
                          {{"chart", i}});
    out.chart_isos.push_back(std::move(phi));
  }

  // Metric class preservation.
  bool charts_metric = true, charts_pseudo = true;
  for (const Morphism &chart : datum.charts) {
    const SpaceClass cls_i = chart.dom().space_class();
    charts_metric = charts_metric && cls_i.is_metric;
    charts_pseudo = charts_pseudo && cls_i.is_pseudo;
  }
  const SpaceClass glued_cls = out.total.space_class();
  if ((charts_metric && !glued_cls.is_metric) ||
      (charts_pseudo && !glued_cls.is_pseudo))
    throw SemanticError("E_INTERNAL", "gluing did not preserve the space class");

  return out;
}

} // namespace finmet
