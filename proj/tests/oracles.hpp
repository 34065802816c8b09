#pragma once

#include <set>
#include <vector>

#include "finmet/lsm_descent.hpp"
#include "finmet/metric_core.hpp"

namespace finmet::testoracle {

/// Independent chain-enumeration oracle for colimit distances: dynamic
/// programming over disjoint-union points with explicit zero-cost jumps
/// between identified points, chain length bounded by the number of glued
/// classes. No shortest-path closure on the class graph is reused.
class ColimitChainOracle {
public:
  ColimitChainOracle(const std::vector<FinSpace> &spaces,
                     const std::vector<Identification> &idents)
      : spaces_(spaces) {
    offsets_.assign(spaces.size() + 1, 0);
    for (std::size_t s = 0; s < spaces.size(); ++s)
      offsets_[s + 1] = offsets_[s] + spaces[s].size();
    class_of_.resize(offsets_.back());
    // naive closure of the identification relation
    for (std::size_t g = 0; g < class_of_.size(); ++g)
      class_of_[g] = g;
    bool changed = true;
    auto global = [&](std::size_t space, const std::string &label) {
      return offsets_[space] + spaces_[space].index(label);
    };
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const Identification &ident : idents)
      edges.emplace_back(global(ident.left_space, ident.left_point),
                         global(ident.right_space, ident.right_point));
    while (changed) {
      changed = false;
      for (const auto &[a, b] : edges) {
        const std::size_t lo = std::min(class_of_[a], class_of_[b]);
        if (class_of_[a] != lo || class_of_[b] != lo) {
          class_of_[a] = lo;
          class_of_[b] = lo;
          changed = true;
        }
      }
    }
    std::set<std::size_t> roots(class_of_.begin(), class_of_.end());
    classes_ = roots.size();
  }

  /// Minimal chain cost between two disjoint-union points, as a bare
  /// enumeration of chains with at most `classes` segments.
  ExtValue distance(std::size_t from_space, const std::string &from,
                    std::size_t to_space, const std::string &to) const {
    const std::size_t n = offsets_.back();
    const std::size_t start = offsets_[from_space] + spaces_[from_space].index(from);
    const std::size_t goal = offsets_[to_space] + spaces_[to_space].index(to);

    std::vector<ExtValue> best(n, ExtValue::infinity());
    for (std::size_t g = 0; g < n; ++g)
      if (class_of_[g] == class_of_[start])
        best[g] = ExtValue();
    for (std::size_t step = 0; step < classes_; ++step) {
      std::vector<ExtValue> next = best;
      for (std::size_t s = 0; s < spaces_.size(); ++s)
        for (std::size_t i = 0; i < spaces_[s].size(); ++i)
          for (std::size_t j = 0; j < spaces_[s].size(); ++j) {
            const ExtValue via = best[offsets_[s] + i] + spaces_[s].dist(i, j);
            if (via < next[offsets_[s] + j])
              next[offsets_[s] + j] = via;
          }
      // zero-cost jumps within a class
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (class_of_[a] == class_of_[b] && next[a] < next[b])
            next[b] = next[a];
      best = std::move(next);
    }
    return best[goal];
  }

private:
  std::vector<FinSpace> spaces_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> class_of_;
  std::size_t classes_ = 0;
};

/// Direct sweep oracle for the local submetry radius: tries every candidate
/// radius d(x,u) + v and checks the ball condition by cases over the
/// constancy intervals of s.
inline ExtValue local_submetry_radius_sweep(const Morphism &f,
                                            const std::string &x) {
  const FinSpace &dom = f.dom();
  const FinSpace &cod = f.cod();
  const std::size_t xi = dom.index(x);

  std::set<ExtValue> bp_set;
  for (const ExtValue &v : dom.positive_finite_values())
    bp_set.insert(v);
  for (const ExtValue &v : cod.positive_finite_values())
    bp_set.insert(v);
  const ExtValue top = bp_set.empty() ? ExtValue() : *bp_set.rbegin();
  bp_set.insert(top + ExtValue::from_int(1));
  const std::vector<ExtValue> bps(bp_set.begin(), bp_set.end());

  auto ball_condition = [&](std::size_t u, const ExtValue &s) {
    std::set<std::size_t> image, target;
    for (std::size_t i = 0; i < dom.size(); ++i)
      if (dom.dist(u, i) < s)
        image.insert(f.apply(i));
    for (std::size_t b = 0; b < cod.size(); ++b)
      if (cod.dist(f.apply(u), b) < s)
        target.insert(b);
    return image == target;
  };

  // "for all real s in (0, T)" checked interval by interval: the condition on
  // (v_i, v_{i+1}] equals the condition at v_{i+1}.
  auto holds_below = [&](std::size_t u, const ExtValue &t) {
    if (t.is_zero())
      return true;
    ExtValue prev; // v_0 = 0
    for (const ExtValue &v : bps) {
      if (prev < t && !ball_condition(u, v))
        return false;
      prev = v;
    }
    return true; // beyond the sentinel the balls are constant
  };

  auto valid = [&](const ExtValue &r) {
    for (std::size_t u = 0; u < dom.size(); ++u) {
      if (!(dom.dist(xi, u) < r))
        continue;
      if (r.is_infinite()) {
        if (!holds_below(u, ExtValue::infinity()))
          return false;
      } else if (!holds_below(u, ExtValue::minus(r, dom.dist(xi, u)))) {
        return false;
      }
    }
    return true;
  };

  std::set<ExtValue> candidates;
  candidates.insert(ExtValue::infinity());
  for (std::size_t u = 0; u < dom.size(); ++u) {
    candidates.insert(dom.dist(xi, u));
    for (const ExtValue &v : bps)
      candidates.insert(dom.dist(xi, u) + v);
  }
  ExtValue best;
  for (const ExtValue &r : candidates)
    if (valid(r))
      best = ExtValue::max(best, r);
  return best;
}

} // namespace finmet::testoracle
