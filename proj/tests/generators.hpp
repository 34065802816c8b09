#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "finmet/gromov_hausdorff.hpp"
#include "finmet/lsm_descent.hpp"
#include "finmet/metric_core.hpp"
#include "finmet/submetry.hpp"

namespace finmet::testgen {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng &rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline ExtValue small_positive_rational(Rng &rng) {
  static const std::int64_t dens[] = {1, 1, 2, 3, 4};
  return ExtValue(static_cast<std::int64_t>(pick(rng, 1, 8)),
                  dens[pick(rng, 0, 4)]);
}

/// Random finite metric space: a random positive symmetric matrix repaired by
/// shortest paths so the triangle inequality holds exactly.
inline FinSpace random_metric_space(Rng &rng, std::size_t max_points,
                                    const std::string &prefix = "p") {
  const std::size_t n = pick(rng, 1, max_points);
  std::vector<std::string> points;
  for (std::size_t i = 0; i < n; ++i)
    points.push_back(prefix + std::to_string(i));
  std::vector<ExtValue> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const ExtValue v = small_positive_rational(rng);
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && d[i * n + k] + d[k * n + j] < d[i * n + j])
          d[i * n + j] = d[i * n + k] + d[k * n + j];
  return FinSpace(points, d);
}

/// Random extended pseudometric space: a metric core, optionally with
/// zero-distance clones and an infinitely-far block.
inline FinSpace random_space(Rng &rng, std::size_t max_points,
                             const std::string &prefix = "p") {
  FinSpace core = random_metric_space(rng, max_points, prefix);
  const bool add_clone = core.size() < max_points && pick(rng, 0, 3) == 0;
  const bool add_far = core.size() + (add_clone ? 1 : 0) < max_points &&
                       pick(rng, 0, 3) == 0;
  if (!add_clone && !add_far)
    return core;

  std::vector<std::string> points = core.points();
  std::size_t n = core.size();
  std::vector<ExtValue> d((n + 2) * (n + 2)); // room for both extras
  auto rebuild = [&](std::size_t m, auto &&dist) {
    std::vector<ExtValue> out(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        out[i * m + j] = dist(i, j);
    return out;
  };
  std::vector<ExtValue> base(core.size() * core.size());
  for (std::size_t i = 0; i < core.size(); ++i)
    for (std::size_t j = 0; j < core.size(); ++j)
      base[i * core.size() + j] = core.dist(i, j);

  if (add_clone) {
    const std::size_t twin = pick(rng, 0, n - 1);
    points.push_back(prefix + std::to_string(n) + "z");
    const std::size_t m = n + 1;
    base = rebuild(m, [&](std::size_t i, std::size_t j) {
      const std::size_t a = (i == n) ? twin : i;
      const std::size_t b = (j == n) ? twin : j;
      if (i == j)
        return ExtValue();
      return core.dist(a, b);
    });
    n = m;
  }
  if (add_far) {
    points.push_back(prefix + std::to_string(n) + "w");
    const std::size_t m = n + 1;
    std::vector<ExtValue> prev = base;
    base = rebuild(m, [&](std::size_t i, std::size_t j) -> ExtValue {
      if (i == j)
        return ExtValue();
      if (i == m - 1 || j == m - 1)
        return ExtValue::infinity();
      return prev[i * n + j];
    });
    n = m;
  }
  return FinSpace(points, base);
}

/// Random surjective 1-Lipschitz map: the base is a quotient of the domain by
/// a random partition, with base distances capped by the minimal cross-block
/// distance and repaired by shortest paths.
inline Morphism random_surjective_lipschitz(Rng &rng, std::size_t max_points) {
  const FinSpace x = random_space(rng, max_points, "x");
  const std::size_t n = x.size();
  const std::size_t blocks = pick(rng, 1, n);
  std::vector<std::size_t> block_of(n);
  for (std::size_t i = 0; i < n; ++i)
    block_of[i] = (i < blocks) ? i : pick(rng, 0, blocks - 1);

  std::vector<ExtValue> d(blocks * blocks, ExtValue::infinity());
  for (std::size_t b = 0; b < blocks; ++b)
    d[b * blocks + b] = ExtValue();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t a = block_of[i], b = block_of[j];
      if (a != b && x.dist(i, j) < d[a * blocks + b])
        d[a * blocks + b] = x.dist(i, j);
    }
  for (std::size_t a = 0; a < blocks; ++a)
    for (std::size_t b = a + 1; b < blocks; ++b) {
      if (pick(rng, 0, 2) == 0 && !d[a * blocks + b].is_infinite()) {
        // shrink some base distances to vary the verdicts
        const ExtValue v = small_positive_rational(rng);
        if (v < d[a * blocks + b]) {
          d[a * blocks + b] = v;
          d[b * blocks + a] = v;
        }
      }
      d[b * blocks + a] = d[a * blocks + b];
    }
  for (std::size_t k = 0; k < blocks; ++k)
    for (std::size_t i = 0; i < blocks; ++i)
      for (std::size_t j = 0; j < blocks; ++j)
        if (i != j && !d[i * blocks + k].is_infinite() &&
            !d[k * blocks + j].is_infinite() &&
            d[i * blocks + k] + d[k * blocks + j] < d[i * blocks + j])
          d[i * blocks + j] = d[i * blocks + k] + d[k * blocks + j];

  std::vector<std::string> labels;
  for (std::size_t b = 0; b < blocks; ++b)
    labels.push_back("b" + std::to_string(b));
  FinSpace base(labels, d);
  std::map<std::string, std::string> table;
  for (std::size_t i = 0; i < n; ++i)
    table[x.label(i)] = labels[block_of[i]];
  return Morphism(x, base, table);
}

/// Random 1-Lipschitz map between the given spaces, built point by point with
/// restarts; falls back to a constant map.
inline Morphism random_lipschitz_map(Rng &rng, const FinSpace &dom,
                                     const FinSpace &cod) {
  for (int attempt = 0; attempt < 32; ++attempt) {
    std::map<std::string, std::string> table;
    std::vector<std::size_t> image(dom.size());
    bool ok = true;
    for (std::size_t i = 0; i < dom.size() && ok; ++i) {
      std::vector<std::size_t> candidates;
      for (std::size_t y = 0; y < cod.size(); ++y) {
        bool fits = true;
        for (std::size_t j = 0; j < i; ++j)
          if (dom.dist(i, j) < cod.dist(y, image[j])) {
            fits = false;
            break;
          }
        if (fits)
          candidates.push_back(y);
      }
      if (candidates.empty()) {
        ok = false;
        break;
      }
      image[i] = candidates[pick(rng, 0, candidates.size() - 1)];
      table[dom.label(i)] = cod.label(image[i]);
    }
    if (ok)
      return Morphism(dom, cod, table);
  }
  return Morphism::constant(dom, cod, cod.label(pick(rng, 0, cod.size() - 1)));
}

/// Random structurally-true submetry: a sup-product projection, a group
/// quotient by a label swap, a two-point gluing, or a pullback of one.
inline Morphism random_submetry(Rng &rng, std::size_t max_points) {
  switch (pick(rng, 0, 3)) {
  case 0: {
    const FinSpace base = random_metric_space(rng, max_points, "b");
    const FinSpace fiber = random_metric_space(rng, 3, "f");
    return l_infty_product(base, fiber).to_left;
  }
  case 1: {
    // doubled space with the swap isometry
    const FinSpace half = random_metric_space(rng, std::max<std::size_t>(
                                                        1, max_points / 2),
                                              "h");
    const FinSpace two = FinSpace::two_point(ExtValue(1, 1));
    const ProductResult doubled = l_infty_product(half, two);
    std::map<std::string, std::string> swap;
    for (std::size_t i = 0; i < half.size(); ++i) {
      swap[pair_label(half.label(i), "0")] = pair_label(half.label(i), "1");
      swap[pair_label(half.label(i), "1")] = pair_label(half.label(i), "0");
    }
    GroupAction action{doubled.space,
                       {Morphism(doubled.space, doubled.space, swap)}};
    return quotient_by_group(action).projection;
  }
  case 2: {
    const FinSpace x = random_metric_space(rng, 3, "l");
    const FinSpace y = random_metric_space(rng, 3, "r");
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t i = 0; i < x.size(); ++i)
      pairs.emplace_back(x.label(i), y.label(pick(rng, 0, y.size() - 1)));
    for (std::size_t j = 0; j < y.size(); ++j)
      pairs.emplace_back(x.label(pick(rng, 0, x.size() - 1)), y.label(j));
    const Correspondence corr = Correspondence::make(x, y, pairs);
    const ExtValue dis = distortion(corr);
    const ExtValue r = dis.is_zero() ? ExtValue(1, 2) : dis.half();
    return glue_over_two_points(x, y, corr, r).family.projection;
  }
  default: {
    const FinSpace base = random_metric_space(rng, max_points, "b");
    const FinSpace fiber = random_metric_space(rng, 2, "f");
    const Morphism p = l_infty_product(base, fiber).to_left;
    const FinSpace t = random_metric_space(rng, 3, "t");
    const Morphism g = random_lipschitz_map(rng, t, base);
    return fiber_product(p, g).to_right;
  }
  }
}

/// Random proper family over a given metric base.
inline Family random_family_over(Rng &rng, const FinSpace &base) {
  const FinSpace fiber = random_metric_space(rng, 3, "q");
  Morphism proj = l_infty_product(base, fiber).to_left;
  if (pick(rng, 0, 1) == 0) {
    // thicken by a second factor through a fiber product
    const FinSpace extra = random_metric_space(rng, 2, "e");
    const Morphism other = l_infty_product(base, extra).to_left;
    proj = fiber_product(proj, other).to_right.then(other);
  }
  return proper_family_check(proj);
}

/// Random valid lsm covering of a given metric space.
inline Covering random_covering(Rng &rng, const FinSpace &base) {
  switch (pick(rng, 0, 2)) {
  case 0:
    return lsm_covering_check(base, {Morphism::identity(base)});
  case 1: {
    // every three-point subspace, included isometrically
    std::vector<Morphism> legs;
    const std::size_t n = base.size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b)
        for (std::size_t c = b; c < n; ++c) {
          const FinSpace sub = base.subspace({a, b, c});
          std::map<std::string, std::string> table;
          for (const std::string &p : sub.points())
            table[p] = p;
          legs.emplace_back(sub, base, table);
        }
    return lsm_covering_check(base, legs);
  }
  default:
    return covering_from_submetry(Morphism::identity(base),
                                  small_positive_rational(rng));
  }
}

/// Random valid descent datum together with the global family it was derived
/// from (for round-trip checks).
struct DescentInstance {
  DescentDatum datum;
  Morphism family;
};

inline DescentInstance random_descent(Rng &rng, std::size_t max_base_points) {
  const FinSpace base = random_metric_space(rng, max_base_points, "b");
  const Covering cov = random_covering(rng, base);
  const Family fam = random_family_over(rng, base);
  return {DescentDatum::canonical(cov, fam.projection), fam.projection};
}

/// Brute-force isometry search (for "up to relabeling" comparisons).
inline std::optional<std::vector<std::size_t>> find_isometry(const FinSpace &a,
                                                             const FinSpace &b) {
  if (a.size() != b.size())
    return std::nullopt;
  std::vector<std::size_t> perm(a.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    perm[i] = i;
  do {
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i)
      for (std::size_t j = i + 1; j < a.size(); ++j)
        if (a.dist(i, j) != b.dist(perm[i], perm[j])) {
          ok = false;
          break;
        }
    if (ok)
      return perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

} // namespace finmet::testgen
