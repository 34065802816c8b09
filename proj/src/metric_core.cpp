#include "finmet/metric_core.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "finmet/error.hpp"

namespace finmet {

namespace {

/// Union-find over 0..n-1 with path compression.
class Partition {
public:
  explicit Partition(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
  std::vector<std::size_t> parent_;
};

void floyd_warshall(std::vector<ExtValue> &d, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i * n + k].is_infinite())
        continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (d[k * n + j].is_infinite())
          continue;
        const ExtValue via = d[i * n + k] + d[k * n + j];
        if (via < d[i * n + j])
          d[i * n + j] = via;
      }
    }
}

} // namespace

QuotientResult metric_identification(const FinSpace &x) {
  const std::size_t n = x.size();
  Partition part(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (x.dist(i, j).is_zero())
        part.unite(i, j);

  // Class representative: least label in the class (labels are sorted,
  // so the least index works).
  std::vector<std::size_t> rep_of(n);
  std::map<std::size_t, std::size_t> class_index; // root -> class id
  std::vector<std::size_t> class_rep;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = part.find(i);
    auto it = class_index.find(root);
    if (it == class_index.end()) {
      it = class_index.emplace(root, class_rep.size()).first;
      class_rep.push_back(i);
    }
    rep_of[i] = it->second;
  }

  const std::size_t m = class_rep.size();
  std::vector<std::string> labels(m);
  for (std::size_t c = 0; c < m; ++c)
    labels[c] = x.label(class_rep[c]);
  std::vector<ExtValue> d(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      d[a * m + b] = x.dist(class_rep[a], class_rep[b]);

  // Representative independence: any member pair gives the same distance.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (x.dist(class_rep[rep_of[i]], class_rep[rep_of[j]]) != x.dist(i, j))
        throw SemanticError("E_INTERNAL",
                            "zero-distance quotient distance not well-defined");

  FinSpace quotient(labels, d);
  std::map<std::string, std::string> proj;
  for (std::size_t i = 0; i < n; ++i)
    proj[x.label(i)] = labels[rep_of[i]];
  return {quotient, Morphism(x, quotient, proj)};
}

ProductResult l_infty_product(const FinSpace &x, const FinSpace &y) {
  std::vector<std::string> labels;
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  labels.reserve(x.size() * y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) {
      labels.push_back(pair_label(x.label(i), y.label(j)));
      coords.emplace_back(i, j);
    }
  const std::size_t n = labels.size();
  std::vector<ExtValue> d(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      d[a * n + b] = ExtValue::max(x.dist(coords[a].first, coords[b].first),
                                   y.dist(coords[a].second, coords[b].second));
  FinSpace product(labels, d);
  std::map<std::string, std::string> to_x, to_y;
  for (std::size_t a = 0; a < n; ++a) {
    to_x[labels[a]] = x.label(coords[a].first);
    to_y[labels[a]] = y.label(coords[a].second);
  }
  return {product, Morphism(product, x, to_x), Morphism(product, y, to_y)};
}

ProductResult fiber_product(const Morphism &f, const Morphism &g) {
  if (f.cod() != g.cod())
    throw SemanticError("E_SPACE_MISMATCH",
                        "fiber product requires a shared codomain");
  const FinSpace &x = f.dom();
  const FinSpace &y = g.dom();
  std::vector<std::string> labels;
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (f.apply(i) == g.apply(j)) {
        labels.push_back(pair_label(x.label(i), y.label(j)));
        coords.emplace_back(i, j);
      }
  if (labels.empty())
    throw SemanticError("E_EMPTY", "fiber product has no compatible pairs");
  const std::size_t n = labels.size();
  std::vector<ExtValue> d(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      d[a * n + b] = ExtValue::max(x.dist(coords[a].first, coords[b].first),
                                   y.dist(coords[a].second, coords[b].second));
  FinSpace total(labels, d);
  std::map<std::string, std::string> to_x, to_y;
  for (std::size_t a = 0; a < n; ++a) {
    to_x[labels[a]] = x.label(coords[a].first);
    to_y[labels[a]] = y.label(coords[a].second);
  }
  return {total, Morphism(total, x, to_x), Morphism(total, y, to_y)};
}

ColimitResult colimit_glue(const std::vector<FinSpace> &spaces,
                           const std::vector<Identification> &identifications) {
  if (spaces.empty())
    throw SemanticError("E_EMPTY", "colimit needs at least one space");

  std::vector<std::size_t> offset(spaces.size() + 1, 0);
  for (std::size_t s = 0; s < spaces.size(); ++s)
    offset[s + 1] = offset[s] + spaces[s].size();
  const std::size_t total = offset.back();

  Partition part(total);
  for (const Identification &ident : identifications) {
    if (ident.left_space >= spaces.size() || ident.right_space >= spaces.size())
      throw SemanticError("E_UNKNOWN_POINT", "identification references a space "
                                             "index out of range");
    const std::size_t a =
        offset[ident.left_space] + spaces[ident.left_space].index(ident.left_point);
    const std::size_t b = offset[ident.right_space] +
                          spaces[ident.right_space].index(ident.right_point);
    part.unite(a, b);
  }

  // Class naming: least (space index, label) member.
  auto member_name = [&](std::size_t global) {
    std::size_t s = 0;
    while (offset[s + 1] <= global)
      ++s;
    return std::make_pair(s, spaces[s].label(global - offset[s]));
  };
  std::map<std::size_t, std::pair<std::size_t, std::string>> least; // root -> name
  for (std::size_t g = 0; g < total; ++g) {
    const std::size_t root = part.find(g);
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
  std::vector<std::size_t> cls(total);
  for (std::size_t g = 0; g < total; ++g)
    cls[g] = class_of_root[part.find(g)];

  // Edge weights: min intra-space distance between members, then close
  // under concatenation.
  std::vector<ExtValue> d(m * m, ExtValue::infinity());
  for (std::size_t c = 0; c < m; ++c)
    d[c * m + c] = ExtValue();
  for (std::size_t s = 0; s < spaces.size(); ++s)
    for (std::size_t i = 0; i < spaces[s].size(); ++i)
      for (std::size_t j = 0; j < spaces[s].size(); ++j) {
        const std::size_t a = cls[offset[s] + i];
        const std::size_t b = cls[offset[s] + j];
        if (spaces[s].dist(i, j) < d[a * m + b])
          d[a * m + b] = spaces[s].dist(i, j);
      }
  floyd_warshall(d, m);

  FinSpace glued(labels, d);
  std::vector<Morphism> injections;
  injections.reserve(spaces.size());
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    std::map<std::string, std::string> table;
    for (std::size_t i = 0; i < spaces[s].size(); ++i)
      table[spaces[s].label(i)] = labels[cls[offset[s] + i]];
    injections.emplace_back(spaces[s], glued, table);
  }
  return {glued, std::move(injections)};
}

std::vector<std::vector<std::size_t>>
GroupAction::elements(std::size_t cap) const {
  for (std::size_t g = 0; g < generators.size(); ++g) {
    const Morphism &gen = generators[g];
    if (gen.dom() != space || gen.cod() != space)
      throw SemanticError("E_SPACE_MISMATCH",
                          "generator " + std::to_string(g) +
                              " is not a self-map of the space");
    if (!gen.is_isometry()) {
      for (std::size_t i = 0; i < space.size(); ++i)
        for (std::size_t j = i + 1; j < space.size(); ++j)
          if (space.dist(i, j) != space.dist(gen.apply(i), gen.apply(j)))
            throw SemanticError(
                "E_NOT_ISOMETRY", "generator is not a self-isometry",
                {{"generator", g},
                 {"pair", {space.label(i), space.label(j)}},
                 {"d", space.dist(i, j).str()},
                 {"d_image", space.dist(gen.apply(i), gen.apply(j)).str()}});
      throw SemanticError("E_NOT_ISOMETRY", "generator is not a bijection",
                          {{"generator", g}});
    }
  }

  const std::size_t n = space.size();
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), 0);
  std::set<std::vector<std::size_t>> seen{id};
  std::vector<std::vector<std::size_t>> queue{id};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (const Morphism &gen : generators) {
      std::vector<std::size_t> next(n);
      for (std::size_t i = 0; i < n; ++i)
        next[i] = gen.apply(queue[head][i]);
      if (seen.insert(next).second) {
        if (seen.size() > cap)
          throw SemanticError("E_GROUP_TOO_LARGE",
                              "generated group exceeds cap " + std::to_string(cap));
        queue.push_back(std::move(next));
      }
    }
  }
  return {seen.begin(), seen.end()};
}

QuotientResult quotient_by_group(const GroupAction &action, std::size_t group_cap) {
  const auto group = action.elements(group_cap);
  const FinSpace &x = action.space;
  const std::size_t n = x.size();

  Partition part(n);
  for (const auto &g : group)
    for (std::size_t i = 0; i < n; ++i)
      part.unite(i, g[i]);

  std::vector<std::size_t> orbit_of(n);
  std::map<std::size_t, std::size_t> orbit_index;
  std::vector<std::size_t> orbit_rep;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = part.find(i);
    auto it = orbit_index.find(root);
    if (it == orbit_index.end()) {
      it = orbit_index.emplace(root, orbit_rep.size()).first;
      orbit_rep.push_back(i);
    }
    orbit_of[i] = it->second;
  }

  const std::size_t m = orbit_rep.size();
  std::vector<std::string> labels(m);
  for (std::size_t c = 0; c < m; ++c)
    labels[c] = x.label(orbit_rep[c]);

  // d(orbit a, orbit b) = min over g of d(rep_a, g rep_b).
  std::vector<ExtValue> d(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      ExtValue best = ExtValue::infinity();
      for (const auto &g : group)
        best = ExtValue::min(best, x.dist(orbit_rep[a], g[orbit_rep[b]]));
      d[a * m + b] = best;
    }

  FinSpace quotient(labels, d);
  std::map<std::string, std::string> proj;
  for (std::size_t i = 0; i < n; ++i)
    proj[x.label(i)] = labels[orbit_of[i]];
  return {quotient, Morphism(x, quotient, proj)};
}

} // namespace finmet
