#include "finmet/documents.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "finmet/error.hpp"

namespace finmet {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string &message) {
  throw ParseError("E_PARSE", message);
}

const json &field(const json &j, const char *name) {
  const auto it = j.find(name);
  if (it == j.end())
    bad(std::string("missing field '") + name + "'");
  return *it;
}

std::string string_field(const json &j, const char *name) {
  const json &v = field(j, name);
  if (!v.is_string())
    bad(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

/// Structural space payload: sorted points, canonical rational strings.
/// No metric axioms are checked here.
json canonical_space_payload(const json &j, const char *what) {
  if (!j.is_object())
    bad(std::string(what) + " must be an object");
  const json &points = field(j, "points");
  const json &d = field(j, "d");
  if (!points.is_array() || points.empty())
    bad(std::string(what) + ".points must be a nonempty array");
  const std::size_t n = points.size();
  std::vector<std::string> labels;
  labels.reserve(n);
  for (const json &p : points) {
    if (!p.is_string())
      bad(std::string(what) + ".points entries must be strings");
    labels.push_back(p.get<std::string>());
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (labels[order[i]] == labels[order[i + 1]])
      bad(std::string(what) + " has duplicate point '" + labels[order[i]] + "'");

  if (!d.is_array() || d.size() != n)
    bad(std::string(what) + ".d must be an " + std::to_string(n) + "x" +
        std::to_string(n) + " matrix");
  std::vector<std::vector<std::string>> cells(n, std::vector<std::string>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!d[i].is_array() || d[i].size() != n)
      bad(std::string(what) + ".d must be a square matrix");
    for (std::size_t j2 = 0; j2 < n; ++j2) {
      if (!d[i][j2].is_string())
        bad(std::string(what) + ".d cells must be rational strings");
      cells[i][j2] = ExtValue::parse(d[i][j2].get<std::string>()).str();
    }
  }

  json out_points = json::array();
  json out_d = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    out_points.push_back(labels[order[i]]);
    json row = json::array();
    for (std::size_t j2 = 0; j2 < n; ++j2)
      row.push_back(cells[order[i]][order[j2]]);
    out_d.push_back(row);
  }
  return json{{"d", out_d}, {"points", out_points}};
}

json canonical_label_map(const json &j, const char *what) {
  if (!j.is_object())
    bad(std::string(what) + " must be an object of label pairs");
  json out = json::object();
  for (const auto &[key, value] : j.items()) {
    if (!value.is_string())
      bad(std::string(what) + " values must be strings");
    out[key] = value.get<std::string>();
  }
  return out;
}

json canonical_morphism_payload(const json &j, const char *what) {
  if (!j.is_object())
    bad(std::string(what) + " must be an object");
  return json{{"cod", canonical_space_payload(field(j, "cod"), "cod")},
              {"dom", canonical_space_payload(field(j, "dom"), "dom")},
              {"map", canonical_label_map(field(j, "map"), "map")}};
}

json canonical_morphism_list(const json &j, const char *what) {
  if (!j.is_array() || j.empty())
    bad(std::string(what) + " must be a nonempty array of morphisms");
  json out = json::array();
  for (const json &m : j)
    out.push_back(canonical_morphism_payload(m, what));
  return out;
}

json canonical_pairs(const json &j, const char *what) {
  if (!j.is_array())
    bad(std::string(what) + " must be an array of label pairs");
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const json &p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
      bad(std::string(what) + " entries must be [string, string]");
    pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  json out = json::array();
  for (const auto &[a, b] : pairs)
    out.push_back(json::array({a, b}));
  return out;
}

FinSpace space_from_payload(const json &payload) {
  std::vector<std::string> points;
  for (const json &p : payload.at("points"))
    points.push_back(p.get<std::string>());
  const std::size_t n = points.size();
  std::vector<std::vector<ExtValue>> matrix(n, std::vector<ExtValue>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      matrix[i][j] = ExtValue::parse(payload.at("d")[i][j].get<std::string>());
  ValidationResult result = validate_space(points, matrix);
  if (!result.ok()) {
    json violations = json::array();
    for (const auto &v : result.violations)
      violations.push_back({{"code", v.code}, {"detail", v.detail}});
    throw SemanticError(result.violations.front().code, "space is not valid",
                        {{"violations", violations}});
  }
  return *result.space;
}

std::map<std::string, std::string> map_from_payload(const json &payload) {
  std::map<std::string, std::string> out;
  for (const auto &[key, value] : payload.items())
    out[key] = value.get<std::string>();
  return out;
}

Morphism morphism_from_payload(const json &payload) {
  return Morphism(space_from_payload(payload.at("dom")),
                  space_from_payload(payload.at("cod")),
                  map_from_payload(payload.at("map")));
}

} // namespace

std::string kind_name(DocKind kind) {
  switch (kind) {
  case DocKind::space:
    return "space";
  case DocKind::morphism:
    return "morphism";
  case DocKind::covering:
    return "covering";
  case DocKind::descent:
    return "descent";
  case DocKind::correspondence:
    return "correspondence";
  case DocKind::family:
    return "family";
  case DocKind::pointed_family:
    return "pointed-family";
  case DocKind::result:
    return "result";
  }
  bad("unreachable kind");
}

DocKind kind_from_name(const std::string &name) {
  for (DocKind kind :
       {DocKind::space, DocKind::morphism, DocKind::covering, DocKind::descent,
        DocKind::correspondence, DocKind::family, DocKind::pointed_family,
        DocKind::result})
    if (kind_name(kind) == name)
      return kind;
  throw ParseError("E_UNKNOWN_KIND", "unknown document kind '" + name + "'");
}

Document parse_document(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError("E_PARSE", e.what());
  }
  if (!j.is_object())
    bad("a document must be a JSON object");
  const DocKind kind = kind_from_name(string_field(j, "kind"));

  json body{{"kind", kind_name(kind)}};
  switch (kind) {
  case DocKind::space: {
    const json payload = canonical_space_payload(j, "space");
    body["points"] = payload["points"];
    body["d"] = payload["d"];
    break;
  }
  case DocKind::morphism: {
    const json payload = canonical_morphism_payload(j, "morphism");
    body["dom"] = payload["dom"];
    body["cod"] = payload["cod"];
    body["map"] = payload["map"];
    break;
  }
  case DocKind::covering: {
    body["base"] = canonical_space_payload(field(j, "base"), "base");
    body["legs"] = canonical_morphism_list(field(j, "legs"), "legs");
    break;
  }
  case DocKind::descent: {
    body["base"] = canonical_space_payload(field(j, "base"), "base");
    body["covering"] = canonical_morphism_list(field(j, "covering"), "covering");
    body["charts"] = canonical_morphism_list(field(j, "charts"), "charts");
    const json &transitions = field(j, "transitions");
    if (!transitions.is_object())
      bad("descent.transitions must be an object keyed \"i,j\"");
    json out = json::object();
    for (const auto &[key, value] : transitions.items()) {
      const auto comma = key.find(',');
      if (comma == std::string::npos)
        bad("transition key '" + key + "' is not of the form \"i,j\"");
      for (char c : key)
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != ',')
          bad("transition key '" + key + "' is not of the form \"i,j\"");
      out[key] = canonical_pairs(value, "transitions");
    }
    body["transitions"] = out;
    break;
  }
  case DocKind::correspondence: {
    body["pairs"] = canonical_pairs(field(j, "pairs"), "pairs");
    break;
  }
  case DocKind::family: {
    body["total"] = canonical_space_payload(field(j, "total"), "total");
    body["base"] = canonical_space_payload(field(j, "base"), "base");
    body["map"] = canonical_label_map(field(j, "map"), "map");
    break;
  }
  case DocKind::pointed_family: {
    body["total"] = canonical_space_payload(field(j, "total"), "total");
    body["base"] = canonical_space_payload(field(j, "base"), "base");
    body["map"] = canonical_label_map(field(j, "map"), "map");
    const json &sections = field(j, "sections");
    if (!sections.is_array())
      bad("pointed-family.sections must be an array of label maps");
    json out = json::array();
    for (const json &s : sections)
      out.push_back(canonical_label_map(s, "section"));
    body["sections"] = out;
    break;
  }
  case DocKind::result: {
    for (const auto &[key, value] : j.items())
      body[key] = value;
    break;
  }
  }
  return Document{kind, body};
}

std::string serialize_document(const Document &doc) {
  return doc.body.dump(2) + "\n";
}

nlohmann::json document_schema(DocKind kind) {
  const json rational{{"type", "string"},
                      {"pattern", "^(inf|[0-9]+(/[1-9][0-9]*)?)$"},
                      {"description", "reduced nonnegative rational or inf"}};
  const json space{
      {"type", "object"},
      {"properties",
       {{"points", {{"type", "array"}, {"items", {{"type", "string"}}}}},
        {"d",
         {{"type", "array"},
          {"items", {{"type", "array"}, {"items", rational}}}}}}},
      {"required", {"points", "d"}}};
  json morphism{
      {"type", "object"},
      {"properties",
       {{"dom", space},
        {"cod", space},
        {"map", {{"type", "object"}, {"additionalProperties", {{"type", "string"}}}}}}},
      {"required", {"dom", "cod", "map"}}};
  json schema{{"$schema", "https://json-schema.org/draft/2020-12/schema"},
              {"title", kind_name(kind)}};
  switch (kind) {
  case DocKind::space:
    schema.update(space);
    break;
  case DocKind::morphism:
    schema.update(morphism);
    break;
  case DocKind::covering:
    schema["type"] = "object";
    schema["properties"] = {{"base", space},
                            {"legs", {{"type", "array"}, {"items", morphism}}}};
    schema["required"] = {"base", "legs"};
    break;
  case DocKind::descent:
    schema["type"] = "object";
    schema["properties"] = {
        {"base", space},
        {"covering", {{"type", "array"}, {"items", morphism}}},
        {"charts", {{"type", "array"}, {"items", morphism}}},
        {"transitions",
         {{"type", "object"},
          {"description", "keyed \"i,j\"; values are [lhs, rhs] label pairs "
                          "with overlap points named \"(p|u|v)\""}}}};
    schema["required"] = {"base", "covering", "charts", "transitions"};
    break;
  case DocKind::correspondence:
    schema["type"] = "object";
    schema["properties"] = {
        {"pairs",
         {{"type", "array"},
          {"items",
           {{"type", "array"}, {"items", {{"type", "string"}}}, {"minItems", 2},
            {"maxItems", 2}}}}}};
    schema["required"] = {"pairs"};
    break;
  case DocKind::family:
    schema["type"] = "object";
    schema["properties"] = {
        {"total", space},
        {"base", space},
        {"map", {{"type", "object"}, {"additionalProperties", {{"type", "string"}}}}}};
    schema["required"] = {"total", "base", "map"};
    break;
  case DocKind::pointed_family:
    schema["type"] = "object";
    schema["properties"] = {
        {"total", space},
        {"base", space},
        {"map", {{"type", "object"}}},
        {"sections", {{"type", "array"}, {"items", {{"type", "object"}}}}}};
    schema["required"] = {"total", "base", "map", "sections"};
    break;
  case DocKind::result:
    schema["type"] = "object";
    schema["description"] = "operation output; fields depend on the command";
    break;
  }
  return schema;
}

FinSpace space_from_document(const Document &doc) {
  if (doc.kind != DocKind::space)
    throw SemanticError("E_SPACE_MISMATCH", "expected a space document");
  return space_from_payload(doc.body);
}

Morphism morphism_from_document(const Document &doc) {
  if (doc.kind != DocKind::morphism)
    throw SemanticError("E_SPACE_MISMATCH", "expected a morphism document");
  return morphism_from_payload(doc.body);
}

Covering covering_from_document(const Document &doc) {
  if (doc.kind != DocKind::covering)
    throw SemanticError("E_SPACE_MISMATCH", "expected a covering document");
  const FinSpace base = space_from_payload(doc.body.at("base"));
  std::vector<Morphism> legs;
  for (const json &m : doc.body.at("legs"))
    legs.push_back(morphism_from_payload(m));
  return lsm_covering_check(base, std::move(legs));
}

DescentDatum descent_from_document(const Document &doc) {
  if (doc.kind != DocKind::descent)
    throw SemanticError("E_SPACE_MISMATCH", "expected a descent document");
  const FinSpace base = space_from_payload(doc.body.at("base"));
  std::vector<Morphism> legs;
  for (const json &m : doc.body.at("covering"))
    legs.push_back(morphism_from_payload(m));
  DescentDatum datum{lsm_covering_check(base, std::move(legs)), {}, {}};
  for (const json &m : doc.body.at("charts"))
    datum.charts.push_back(morphism_from_payload(m));
  if (datum.charts.size() != datum.covering.legs.size())
    throw SemanticError("E_ARITY", "one chart per covering leg required");

  // Transition labels are "(p|u|v)" with p in the chart over one side and
  // (u, v) the overlap coordinates of the ordered pair (i, j); the split is
  // resolved by membership.
  auto parse_triple = [&](const std::string &label, std::size_t chart,
                          std::size_t i, std::size_t j)
      -> std::array<std::size_t, 3> {
    const FinSpace &p = datum.charts[chart].dom();
    const FinSpace &ui = datum.covering.legs[i].dom();
    const FinSpace &uj = datum.covering.legs[j].dom();
    if (label.size() < 2 || label.front() != '(' || label.back() != ')')
      throw SemanticError("E_UNKNOWN_POINT",
                          "transition point '" + label + "' is not a triple");
    const std::string body = label.substr(1, label.size() - 2);
    for (std::size_t c1 = 0; c1 < body.size(); ++c1) {
      if (body[c1] != '|')
        continue;
      for (std::size_t c2 = c1 + 1; c2 < body.size(); ++c2) {
        if (body[c2] != '|')
          continue;
        const std::string a = body.substr(0, c1);
        const std::string u = body.substr(c1 + 1, c2 - c1 - 1);
        const std::string v = body.substr(c2 + 1);
        const auto pa = p.find(a);
        const auto uu = ui.find(u);
        const auto vv = uj.find(v);
        if (pa && uu && vv)
          return {*pa, *uu, *vv};
      }
    }
    throw SemanticError("E_UNKNOWN_POINT",
                        "transition point '" + label +
                            "' does not name (chart|leg_i|leg_j) points");
  };

  for (const auto &[key, value] : doc.body.at("transitions").items()) {
    const auto comma = key.find(',');
    const std::size_t i = std::stoul(key.substr(0, comma));
    const std::size_t j = std::stoul(key.substr(comma + 1));
    if (i >= datum.charts.size() || j >= datum.charts.size())
      throw SemanticError("E_ARITY", "transition key '" + key +
                                         "' references a missing chart");
    TransitionTable table;
    for (const json &entry : value)
      table[parse_triple(entry[0].get<std::string>(), i, i, j)] =
          parse_triple(entry[1].get<std::string>(), j, i, j);
    datum.transitions[{i, j}] = std::move(table);
  }
  return datum;
}

Family family_from_document(const Document &doc) {
  if (doc.kind != DocKind::family && doc.kind != DocKind::pointed_family)
    throw SemanticError("E_SPACE_MISMATCH", "expected a family document");
  Morphism proj(space_from_payload(doc.body.at("total")),
                space_from_payload(doc.body.at("base")),
                map_from_payload(doc.body.at("map")));
  return proper_family_check(proj);
}

PointedFamily pointed_family_from_document(const Document &doc) {
  if (doc.kind != DocKind::pointed_family)
    throw SemanticError("E_SPACE_MISMATCH", "expected a pointed-family document");
  Family fam = family_from_document(doc);
  std::vector<Morphism> sections;
  for (const json &s : doc.body.at("sections"))
    sections.emplace_back(fam.base(), fam.total(), map_from_payload(s));
  return PointedFamily(std::move(fam), std::move(sections));
}

Correspondence correspondence_from_document(const Document &doc,
                                            const FinSpace &left,
                                            const FinSpace &right) {
  if (doc.kind != DocKind::correspondence)
    throw SemanticError("E_SPACE_MISMATCH", "expected a correspondence document");
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const json &p : doc.body.at("pairs"))
    pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
  return Correspondence::make(left, right, pairs);
}

nlohmann::json space_payload(const FinSpace &space) {
  json points = json::array();
  json d = json::array();
  for (std::size_t i = 0; i < space.size(); ++i) {
    points.push_back(space.label(i));
    json row = json::array();
    for (std::size_t j = 0; j < space.size(); ++j)
      row.push_back(space.dist(i, j).str());
    d.push_back(row);
  }
  return json{{"d", d}, {"points", points}};
}

nlohmann::json morphism_payload(const Morphism &f) {
  json map = json::object();
  for (const auto &[from, to] : f.as_label_map())
    map[from] = to;
  return json{{"cod", space_payload(f.cod())},
              {"dom", space_payload(f.dom())},
              {"map", map}};
}

Document space_document(const FinSpace &space) {
  json body = space_payload(space);
  body["kind"] = "space";
  return Document{DocKind::space, body};
}

Document morphism_document(const Morphism &f) {
  json body = morphism_payload(f);
  body["kind"] = "morphism";
  return Document{DocKind::morphism, body};
}

Document covering_document(const Covering &cov) {
  json legs = json::array();
  for (const Morphism &leg : cov.legs)
    legs.push_back(morphism_payload(leg));
  return Document{DocKind::covering,
                  json{{"kind", "covering"},
                       {"base", space_payload(cov.base)},
                       {"legs", legs}}};
}

Document descent_document(const DescentDatum &datum) {
  json legs = json::array();
  for (const Morphism &leg : datum.covering.legs)
    legs.push_back(morphism_payload(leg));
  json charts = json::array();
  for (const Morphism &chart : datum.charts)
    charts.push_back(morphism_payload(chart));
  json transitions = json::object();
  for (const auto &[pair, table] : datum.transitions) {
    const auto name = [&](std::size_t chart, const std::array<std::size_t, 3> &p) {
      return "(" + datum.charts[chart].dom().label(p[0]) + "|" +
             datum.covering.legs[pair.first].dom().label(p[1]) + "|" +
             datum.covering.legs[pair.second].dom().label(p[2]) + ")";
    };
    json entries = json::array();
    for (const auto &[from, to] : table)
      entries.push_back(json::array({name(pair.first, from),
                                     name(pair.second, to)}));
    transitions[std::to_string(pair.first) + "," +
                std::to_string(pair.second)] = entries;
  }
  return Document{DocKind::descent,
                  json{{"kind", "descent"},
                       {"base", space_payload(datum.covering.base)},
                       {"covering", legs},
                       {"charts", charts},
                       {"transitions", transitions}}};
}

Document family_document(const Family &fam) {
  json map = json::object();
  for (const auto &[from, to] : fam.projection.as_label_map())
    map[from] = to;
  return Document{DocKind::family,
                  json{{"kind", "family"},
                       {"total", space_payload(fam.total())},
                       {"base", space_payload(fam.base())},
                       {"map", map}}};
}

Document pointed_family_document(const PointedFamily &fam) {
  Document doc = family_document(fam.family);
  doc.kind = DocKind::pointed_family;
  doc.body["kind"] = "pointed-family";
  json sections = json::array();
  for (const Morphism &s : fam.sections) {
    json map = json::object();
    for (const auto &[from, to] : s.as_label_map())
      map[from] = to;
    sections.push_back(map);
  }
  doc.body["sections"] = sections;
  return doc;
}

Document correspondence_document(const Correspondence &corr) {
  json pairs = json::array();
  for (const auto &[a, b] : corr.label_pairs())
    pairs.push_back(json::array({a, b}));
  return Document{DocKind::correspondence,
                  json{{"kind", "correspondence"}, {"pairs", pairs}}};
}

Document result_document(nlohmann::json payload) {
  payload["kind"] = "result";
  return Document{DocKind::result, std::move(payload)};
}

} // namespace finmet
