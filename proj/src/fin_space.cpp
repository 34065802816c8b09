#include "finmet/fin_space.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "finmet/error.hpp"

namespace finmet {

namespace {

void require(bool cond, const char *code, const std::string &msg,
             nlohmann::json detail = nlohmann::json::object()) {
  if (!cond)
    throw SemanticError(code, msg, std::move(detail));
}

} // namespace

RawCell RawCell::from(const ExtValue &v) {
  if (v.is_infinite())
    return RawCell::inf();
  return RawCell(v.num(), v.den());
}

FinSpace::FinSpace(std::vector<std::string> points, std::vector<ExtValue> matrix) {
  const std::size_t n = points.size();
  require(n >= 1, "E_EMPTY", "a space needs at least one point");
  require(matrix.size() == n * n, "E_SHAPE", "matrix size does not match point count");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  for (std::size_t k = 0; k + 1 < n; ++k)
    require(points[order[k]] != points[order[k + 1]], "E_DUPLICATE_POINT",
            "duplicate point label '" + points[order[k]] + "'");

  points_.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
    points_.push_back(points[order[k]]);
  d_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      d_[i * n + j] = matrix[order[i] * n + order[j]];

  for (std::size_t i = 0; i < n; ++i)
    require(dist(i, i).is_zero(), "E_NONZERO_DIAGONAL",
            "nonzero diagonal at '" + points_[i] + "'");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      require(dist(i, j) == dist(j, i), "E_ASYMMETRIC",
              "asymmetry between '" + points_[i] + "' and '" + points_[j] + "'");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        require(dist(i, j) + dist(j, k) >= dist(i, k), "E_TRIANGLE",
                "triangle violation at ('" + points_[i] + "','" + points_[j] +
                    "','" + points_[k] + "')");
}

FinSpace FinSpace::single_point(const std::string &label) {
  return FinSpace({label}, {ExtValue()});
}

FinSpace FinSpace::two_point(const ExtValue &r) {
  require(!r.is_zero(), "E_DEGENERATE_RADIUS", "two-point space needs r > 0");
  const ExtValue zero;
  return FinSpace({"0", r.str()}, {zero, r, r, zero});
}

std::size_t FinSpace::index(const std::string &label) const {
  const auto it = std::lower_bound(points_.begin(), points_.end(), label);
  if (it == points_.end() || *it != label)
    throw SemanticError("E_UNKNOWN_POINT", "unknown point '" + label + "'");
  return static_cast<std::size_t>(it - points_.begin());
}

std::optional<std::size_t> FinSpace::find(const std::string &label) const {
  const auto it = std::lower_bound(points_.begin(), points_.end(), label);
  if (it == points_.end() || *it != label)
    return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin());
}

SpaceClass FinSpace::space_class() const {
  SpaceClass cls{true, true};
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist(i, j).is_zero())
        cls.is_metric = false;
      if (dist(i, j).is_infinite())
        cls.is_pseudo = false;
    }
  return cls;
}

ExtValue FinSpace::diameter() const {
  ExtValue best;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j)
      best = ExtValue::max(best, dist(i, j));
  return best;
}

FinSpace FinSpace::subspace(const std::vector<std::size_t> &members) const {
  std::vector<std::size_t> idx = members;
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  require(!idx.empty(), "E_EMPTY", "subspace needs at least one point");
  std::vector<std::string> pts;
  pts.reserve(idx.size());
  for (std::size_t i : idx)
    pts.push_back(points_[i]);
  std::vector<ExtValue> sub(idx.size() * idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b)
      sub[a * idx.size() + b] = dist(idx[a], idx[b]);
  return FinSpace(std::move(pts), std::move(sub));
}

std::vector<ExtValue> FinSpace::positive_finite_values() const {
  std::set<ExtValue> vals;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j)
      if (!dist(i, j).is_zero() && !dist(i, j).is_infinite())
        vals.insert(dist(i, j));
  return {vals.begin(), vals.end()};
}

ValidationResult validate_space(const std::vector<std::string> &points,
                                const std::vector<std::vector<RawCell>> &matrix) {
  ValidationResult result;
  const std::size_t n = points.size();
  auto violate = [&](const std::string &code, nlohmann::json detail) {
    result.violations.push_back({code, std::move(detail)});
  };

  if (n == 0) {
    violate("E_EMPTY", {{"message", "a space needs at least one point"}});
    return result;
  }
  if (matrix.size() != n) {
    violate("E_SHAPE", {{"rows", matrix.size()}, {"expected", n}});
    return result;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (matrix[i].size() != n) {
      violate("E_SHAPE", {{"row", i}, {"cols", matrix[i].size()}, {"expected", n}});
      return result;
    }
  {
    std::set<std::string> seen;
    for (const auto &p : points)
      if (!seen.insert(p).second)
        violate("E_DUPLICATE_POINT", {{"label", p}});
  }

  std::vector<ExtValue> d(n * n);
  bool negative = false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const RawCell &c = matrix[i][j];
      if (c.infinite) {
        d[i * n + j] = ExtValue::infinity();
      } else if (c.num < 0 || c.den <= 0) {
        violate("E_NEGATIVE", {{"i", i}, {"j", j}});
        negative = true;
      } else {
        d[i * n + j] = ExtValue(c.num, c.den);
      }
    }
  if (negative || !result.violations.empty())
    return result;

  for (std::size_t i = 0; i < n; ++i)
    if (!d[i * n + i].is_zero())
      violate("E_NONZERO_DIAGONAL", {{"i", i}, {"value", d[i * n + i].str()}});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (d[i * n + j] != d[j * n + i])
        violate("E_ASYMMETRIC", {{"i", i},
                                 {"j", j},
                                 {"d_ij", d[i * n + j].str()},
                                 {"d_ji", d[j * n + i].str()}});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (d[i * n + j] + d[j * n + k] < d[i * n + k])
          violate("E_TRIANGLE", {{"triple", {i, k, j}},
                                 {"d_ik", d[i * n + k].str()},
                                 {"d_ij", d[i * n + j].str()},
                                 {"d_jk", d[j * n + k].str()}});

  if (!result.violations.empty())
    return result;

  result.space = FinSpace(points, std::move(d));
  result.space_class = result.space->space_class();
  return result;
}

ValidationResult validate_space(const std::vector<std::string> &points,
                                const std::vector<std::vector<ExtValue>> &matrix) {
  std::vector<std::vector<RawCell>> raw(matrix.size());
  for (std::size_t i = 0; i < matrix.size(); ++i)
    for (const ExtValue &v : matrix[i])
      raw[i].push_back(RawCell::from(v));
  return validate_space(points, raw);
}

Morphism::Morphism(FinSpace dom, FinSpace cod, std::vector<std::size_t> table)
    : dom_(std::move(dom)), cod_(std::move(cod)), map_(std::move(table)) {}

Morphism::Morphism(FinSpace dom, FinSpace cod,
                   const std::map<std::string, std::string> &map)
    : dom_(std::move(dom)), cod_(std::move(cod)) {
  map_.resize(dom_.size());
  std::vector<bool> seen(dom_.size(), false);
  for (const auto &[from, to] : map) {
    const std::size_t i = dom_.index(from);
    map_[i] = cod_.index(to);
    seen[i] = true;
  }
  for (std::size_t i = 0; i < dom_.size(); ++i)
    require(seen[i], "E_UNKNOWN_POINT",
            "map does not cover point '" + dom_.label(i) + "'");
  for (std::size_t i = 0; i < dom_.size(); ++i)
    for (std::size_t j = i + 1; j < dom_.size(); ++j)
      require(dom_.dist(i, j) >= cod_.dist(map_[i], map_[j]), "E_NOT_LIPSCHITZ",
              "distance increases on ('" + dom_.label(i) + "','" + dom_.label(j) +
                  "')",
              {{"pair", {dom_.label(i), dom_.label(j)}},
               {"d_dom", dom_.dist(i, j).str()},
               {"d_cod", cod_.dist(map_[i], map_[j]).str()}});
}

Morphism Morphism::identity(const FinSpace &x) {
  std::vector<std::size_t> table(x.size());
  std::iota(table.begin(), table.end(), 0);
  return Morphism(x, x, std::move(table));
}

Morphism Morphism::constant(const FinSpace &dom, const FinSpace &cod,
                            const std::string &target) {
  std::vector<std::size_t> table(dom.size(), cod.index(target));
  return Morphism(dom, cod, std::move(table));
}

bool Morphism::is_surjective() const { return uncovered().empty(); }

std::vector<std::size_t> Morphism::uncovered() const {
  std::vector<bool> hit(cod_.size(), false);
  for (std::size_t t : map_)
    hit[t] = true;
  std::vector<std::size_t> missing;
  for (std::size_t b = 0; b < cod_.size(); ++b)
    if (!hit[b])
      missing.push_back(b);
  return missing;
}

bool Morphism::is_injective() const {
  std::vector<bool> hit(cod_.size(), false);
  for (std::size_t t : map_) {
    if (hit[t])
      return false;
    hit[t] = true;
  }
  return true;
}

bool Morphism::is_isometry() const {
  if (dom_.size() != cod_.size() || !is_injective())
    return false;
  for (std::size_t i = 0; i < dom_.size(); ++i)
    for (std::size_t j = i + 1; j < dom_.size(); ++j)
      if (dom_.dist(i, j) != cod_.dist(map_[i], map_[j]))
        return false;
  return true;
}

std::map<std::string, std::string> Morphism::as_label_map() const {
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < dom_.size(); ++i)
    out[dom_.label(i)] = cod_.label(map_[i]);
  return out;
}

Morphism Morphism::then(const Morphism &g) const {
  require(cod_ == g.dom(), "E_SPACE_MISMATCH",
          "composition requires matching middle space");
  std::vector<std::size_t> table(dom_.size());
  for (std::size_t i = 0; i < dom_.size(); ++i)
    table[i] = g.map_[map_[i]];
  return Morphism(dom_, g.cod(), std::move(table));
}

std::vector<std::vector<std::size_t>> Morphism::fibers() const {
  std::vector<std::vector<std::size_t>> out(cod_.size());
  for (std::size_t i = 0; i < dom_.size(); ++i)
    out[map_[i]].push_back(i);
  return out;
}

Morphism check_morphism(const FinSpace &dom, const FinSpace &cod,
                        const std::map<std::string, std::string> &map) {
  return Morphism(dom, cod, map);
}

std::string pair_label(const std::string &a, const std::string &b) {
  return "(" + a + "|" + b + ")";
}

std::pair<std::string, std::string>
split_pair_label(const std::string &label, const std::vector<std::string> &lefts,
                 const std::vector<std::string> &rights) {
  if (label.size() >= 2 && label.front() == '(' && label.back() == ')') {
    const std::string body = label.substr(1, label.size() - 2);
    auto known = [](const std::vector<std::string> &set, const std::string &s) {
      return std::find(set.begin(), set.end(), s) != set.end();
    };
    for (std::size_t cut = 0; cut < body.size(); ++cut) {
      if (body[cut] != '|')
        continue;
      const std::string left = body.substr(0, cut);
      const std::string right = body.substr(cut + 1);
      if (known(lefts, left) && known(rights, right))
        return {left, right};
    }
  }
  throw SemanticError("E_UNKNOWN_POINT",
                      "label '" + label + "' is not a pair over the given spaces");
}

} // namespace finmet
