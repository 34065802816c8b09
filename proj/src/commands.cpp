#include "finmet/commands.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include "finmet/error.hpp"

namespace finmet {

namespace {

using nlohmann::json;

[[noreturn]] void usage(const std::string &message) {
  throw ParseError("E_ARITY", message);
}

void need_inputs(const std::vector<Document> &inputs, std::size_t count,
                 const char *what) {
  if (inputs.size() != count)
    usage(std::string(what) + " expects " + std::to_string(count) +
          " input document(s), got " + std::to_string(inputs.size()));
}

json map_json(const std::map<std::string, std::string> &map) {
  json out = json::object();
  for (const auto &[from, to] : map)
    out[from] = to;
  return out;
}

/// `f` inputs may be a morphism X -> B or a bare space X (absolute case).
HyperspaceResult hyperspace_input(const Document &doc, std::size_t cap) {
  if (doc.kind == DocKind::space)
    return hyperspace_absolute(space_from_document(doc), cap);
  return hyperspace(morphism_from_document(doc), cap);
}

std::vector<std::string> string_list(const json &j, const char *what) {
  if (!j.is_array())
    usage(std::string(what) + " must be an array of point labels");
  std::vector<std::string> out;
  for (const json &s : j) {
    if (!s.is_string())
      usage(std::string(what) + " must be an array of point labels");
    out.push_back(s.get<std::string>());
  }
  return out;
}

Document dispatch(const std::string &command, const std::vector<Document> &inputs,
                  const CommandOptions &options, int &exit_code) {
  exit_code = 0;

  if (command == "validate") {
    need_inputs(inputs, 1, "validate");
    if (inputs[0].kind == DocKind::space) {
      const FinSpace space = space_from_document(inputs[0]);
      const SpaceClass cls = space.space_class();
      return result_document({{"ok", true},
                              {"class",
                               {{"is_metric", cls.is_metric},
                                {"is_pseudo", cls.is_pseudo}}}});
    }
    if (inputs[0].kind == DocKind::morphism) {
      morphism_from_document(inputs[0]);
      return result_document({{"ok", true}});
    }
    usage("validate expects a space or morphism document");
  }

  if (command == "identify") {
    need_inputs(inputs, 1, "identify");
    const QuotientResult q = metric_identification(space_from_document(inputs[0]));
    return result_document({{"space", space_payload(q.space)},
                            {"projection", map_json(q.projection.as_label_map())}});
  }

  if (command == "product" || command == "fiber-product") {
    need_inputs(inputs, 2, command.c_str());
    const ProductResult p =
        command == "product"
            ? l_infty_product(space_from_document(inputs[0]),
                              space_from_document(inputs[1]))
            : fiber_product(morphism_from_document(inputs[0]),
                            morphism_from_document(inputs[1]));
    return result_document({{"space", space_payload(p.space)},
                            {"to_left", map_json(p.to_left.as_label_map())},
                            {"to_right", map_json(p.to_right.as_label_map())}});
  }

  if (command == "colimit") {
    if (inputs.empty())
      usage("colimit expects at least one space document");
    std::vector<FinSpace> spaces;
    std::vector<Identification> idents;
    std::size_t n_spaces = inputs.size();
    if (inputs.back().kind == DocKind::correspondence)
      --n_spaces;
    if (n_spaces == 0)
      usage("colimit expects at least one space document");
    for (std::size_t i = 0; i < n_spaces; ++i)
      spaces.push_back(space_from_document(inputs[i]));
    if (n_spaces < inputs.size()) {
      // identification pairs use "index:label" names on both sides
      auto parse_side = [&](const std::string &s) {
        const auto colon = s.find(':');
        if (colon == std::string::npos || colon == 0)
          throw SemanticError("E_UNKNOWN_POINT",
                              "identification '" + s +
                                  "' is not of the form index:label");
        for (std::size_t k = 0; k < colon; ++k)
          if (!std::isdigit(static_cast<unsigned char>(s[k])))
            throw SemanticError("E_UNKNOWN_POINT",
                                "identification '" + s +
                                    "' is not of the form index:label");
        return std::make_pair<std::size_t, std::string>(
            std::stoul(s.substr(0, colon)), s.substr(colon + 1));
      };
      for (const json &p : inputs.back().body.at("pairs")) {
        const auto [ls, lp] = parse_side(p[0].get<std::string>());
        const auto [rs, rp] = parse_side(p[1].get<std::string>());
        idents.push_back({ls, lp, rs, rp});
      }
    }
    const ColimitResult c = colimit_glue(spaces, idents);
    json injections = json::array();
    for (const Morphism &inj : c.injections)
      injections.push_back(map_json(inj.as_label_map()));
    return result_document(
        {{"space", space_payload(c.space)}, {"injections", injections}});
  }

  if (command == "quotient-group") {
    if (inputs.empty())
      usage("quotient-group expects a space and generator morphisms");
    GroupAction action{space_from_document(inputs[0]), {}};
    for (std::size_t i = 1; i < inputs.size(); ++i)
      action.generators.push_back(morphism_from_document(inputs[i]));
    const QuotientResult q =
        quotient_by_group(action, options.cap.value_or(10000));
    return result_document({{"space", space_payload(q.space)},
                            {"projection", map_json(q.projection.as_label_map())}});
  }

  if (command == "hausdorff") {
    need_inputs(inputs, 2, "hausdorff");
    const FinSpace space = space_from_document(inputs[0]);
    if (inputs[1].kind != DocKind::result)
      usage("hausdorff expects a result document with f0/f1 member lists");
    const json &params = inputs[1].body;
    if (!params.contains("f0") || !params.contains("f1"))
      usage("hausdorff expects a result document with f0/f1 member lists");
    const ExtValue value = hausdorff_distance(
        SubsetRef::of_labels(space, string_list(params.at("f0"), "f0")),
        SubsetRef::of_labels(space, string_list(params.at("f1"), "f1")));
    return result_document({{"value", value.str()}});
  }

  if (command == "submetry") {
    need_inputs(inputs, 1, "submetry");
    const SubmetryReport report = submetry_check(morphism_from_document(inputs[0]));
    return result_document(report.to_json());
  }

  if (command == "proper") {
    need_inputs(inputs, 1, "proper");
    return family_document(proper_family_check(morphism_from_document(inputs[0])));
  }

  if (command == "hyperspace") {
    need_inputs(inputs, 1, "hyperspace");
    const HyperspaceResult h =
        hyperspace_input(inputs[0], options.cap.value_or(4095));
    return morphism_document(h.to_base);
  }

  if (command == "map-to-family") {
    need_inputs(inputs, 2, "map-to-family");
    const HyperspaceResult h =
        hyperspace_input(inputs[0], options.cap.value_or(4095));
    return family_document(map_to_family(h, morphism_from_document(inputs[1])));
  }

  if (command == "family-to-map") {
    need_inputs(inputs, 2, "family-to-map");
    const HyperspaceResult h =
        hyperspace_input(inputs[0], options.cap.value_or(4095));
    return morphism_document(family_to_map(h, family_from_document(inputs[1])));
  }

  if (command == "pointed-pullback") {
    need_inputs(inputs, 2, "pointed-pullback");
    return pointed_family_document(
        pointed_pullback(pointed_family_from_document(inputs[0]),
                         morphism_from_document(inputs[1])));
  }

  if (command == "diagonal-family") {
    need_inputs(inputs, 1, "diagonal-family");
    return pointed_family_document(
        diagonal_family(pointed_family_from_document(inputs[0])));
  }

  if (command == "lsm-check") {
    need_inputs(inputs, 1, "lsm-check");
    if (inputs[0].kind == DocKind::covering)
      return covering_document(covering_from_document(inputs[0]));
    if (inputs[0].kind == DocKind::morphism) {
      const Morphism f = morphism_from_document(inputs[0]);
      json radii = json::object();
      for (const std::string &p : f.dom().points())
        radii[p] = local_submetry_radius(f, p).str();
      return result_document({{"radii", radii}});
    }
    usage("lsm-check expects a covering or morphism document");
  }

  if (command == "covering-from-submetry") {
    need_inputs(inputs, 1, "covering-from-submetry");
    if (!options.radius)
      usage("covering-from-submetry requires --radius R");
    return covering_document(
        covering_from_submetry(morphism_from_document(inputs[0]), *options.radius));
  }

  if (command == "covering-pullback") {
    need_inputs(inputs, 2, "covering-pullback");
    return covering_document(covering_pullback(
        covering_from_document(inputs[0]), morphism_from_document(inputs[1])));
  }

  if (command == "covering-compose") {
    if (inputs.size() < 2)
      usage("covering-compose expects a covering plus one refinement per leg");
    const Covering cov = covering_from_document(inputs[0]);
    std::vector<Covering> refinements;
    for (std::size_t i = 1; i < inputs.size(); ++i)
      refinements.push_back(covering_from_document(inputs[i]));
    return covering_document(covering_compose(cov, refinements));
  }

  if (command == "glue-morphisms") {
    if (inputs.size() < 2)
      usage("glue-morphisms expects a covering plus one piece per leg");
    const Covering cov = covering_from_document(inputs[0]);
    std::vector<Morphism> pieces;
    for (std::size_t i = 1; i < inputs.size(); ++i)
      pieces.push_back(morphism_from_document(inputs[i]));
    return morphism_document(glue_morphisms(cov, pieces));
  }

  if (command == "cocycle") {
    need_inputs(inputs, 1, "cocycle");
    const CocycleReport report = check_cocycle(descent_from_document(inputs[0]));
    if (!report.ok())
      exit_code = 1;
    return result_document(report.to_json());
  }

  if (command == "glue-descent") {
    need_inputs(inputs, 1, "glue-descent");
    const GluedSpace glued = glue_descent(descent_from_document(inputs[0]));
    json isos = json::array();
    for (const Morphism &iso : glued.chart_isos)
      isos.push_back(map_json(iso.as_label_map()));
    json maps = json::array();
    for (const Morphism &g : glued.chart_maps)
      maps.push_back(map_json(g.as_label_map()));
    return result_document(
        {{"total", space_payload(glued.total)},
         {"projection", map_json(glued.projection.as_label_map())},
         {"chart_isos", isos},
         {"chart_maps", maps}});
  }

  if (command == "gh") {
    need_inputs(inputs, 2, "gh");
    const GHResult r =
        gh_exact(space_from_document(inputs[0]), space_from_document(inputs[1]),
                 options.cap.value_or(10000000));
    json pairs = json::array();
    for (const auto &[a, b] : r.witness.label_pairs())
      pairs.push_back(json::array({a, b}));
    return result_document({{"value", r.value.str()},
                            {"pairs", pairs},
                            {"phi", map_json(r.phi)},
                            {"psi", map_json(r.psi)}});
  }

  if (command == "gh-oracle") {
    need_inputs(inputs, 2, "gh-oracle");
    const ExtValue value = gh_enum_oracle(space_from_document(inputs[0]),
                                          space_from_document(inputs[1]));
    return result_document({{"value", value.str()}});
  }

  if (command == "distortion") {
    need_inputs(inputs, 3, "distortion");
    const FinSpace left = space_from_document(inputs[0]);
    const FinSpace right = space_from_document(inputs[1]);
    const ExtValue value =
        distortion(correspondence_from_document(inputs[2], left, right));
    return result_document({{"value", value.str()}});
  }

  if (command == "glue-2r") {
    need_inputs(inputs, 3, "glue-2r");
    const FinSpace left = space_from_document(inputs[0]);
    const FinSpace right = space_from_document(inputs[1]);
    const Correspondence corr =
        correspondence_from_document(inputs[2], left, right);
    const ExtValue r = options.radius ? *options.radius : distortion(corr).half();
    return family_document(glue_over_two_points(left, right, corr, r).family);
  }

  if (command == "corr-from-family") {
    need_inputs(inputs, 1, "corr-from-family");
    const TwoPointFamily fam =
        TwoPointFamily::wrap(family_from_document(inputs[0]));
    return correspondence_document(correspondence_from_family(fam));
  }

  if (command == "chain-bound") {
    if (inputs.empty() || inputs.size() % 2 == 0)
      usage("chain-bound expects families alternating with link morphisms");
    std::vector<TwoPointFamily> families;
    std::vector<Morphism> links;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (i % 2 == 0)
        families.push_back(TwoPointFamily::wrap(family_from_document(inputs[i])));
      else
        links.push_back(morphism_from_document(inputs[i]));
    }
    return result_document({{"value", chain_upper_bound(families, links).str()}});
  }

  throw ParseError("E_UNKNOWN_COMMAND", "unknown command '" + command + "'");
}

} // namespace

const std::vector<CommandSpec> &command_registry() {
  static const std::vector<CommandSpec> registry = {
      {"validate", {"validate_space", "check_morphism"}},
      {"product", {"l_infty_product"}},
      {"fiber-product", {"fiber_product"}},
      {"colimit", {"colimit_glue"}},
      {"quotient-group", {"quotient_by_group"}},
      {"identify", {"metric_identification"}},
      {"hausdorff", {"hausdorff_distance"}},
      {"submetry", {"submetry_check"}},
      {"proper", {"proper_family_check"}},
      {"hyperspace", {"hyperspace"}},
      {"map-to-family", {"map_to_family"}},
      {"family-to-map", {"family_to_map"}},
      {"pointed-pullback", {"pointed_pullback"}},
      {"diagonal-family", {"diagonal_family"}},
      {"lsm-check", {"lsm_covering_check", "local_submetry_radius"}},
      {"covering-from-submetry", {"covering_from_submetry"}},
      {"covering-pullback", {"covering_pullback"}},
      {"covering-compose", {"covering_compose"}},
      {"glue-morphisms", {"glue_morphisms"}},
      {"cocycle", {"check_cocycle"}},
      {"glue-descent", {"glue_descent"}},
      {"gh", {"gh_exact"}},
      {"gh-oracle", {"gh_enum_oracle"}},
      {"distortion", {"distortion"}},
      {"glue-2r", {"glue_over_two_points"}},
      {"corr-from-family", {"correspondence_from_family"}},
      {"chain-bound", {"chain_upper_bound"}},
  };
  return registry;
}

std::vector<std::string> operation_inventory() {
  return {
      "validate_space",     "metric_identification", "l_infty_product",
      "fiber_product",      "colimit_glue",          "quotient_by_group",
      "check_morphism",     "hausdorff_distance",    "submetry_check",
      "proper_family_check", "hyperspace",           "map_to_family",
      "family_to_map",      "pointed_pullback",      "diagonal_family",
      "local_submetry_radius", "lsm_covering_check", "covering_from_submetry",
      "covering_pullback",  "covering_compose",      "glue_morphisms",
      "check_cocycle",      "glue_descent",          "distortion",
      "gh_exact",           "gh_enum_oracle",        "glue_over_two_points",
      "correspondence_from_family", "chain_upper_bound",
  };
}

CommandOutcome run_command(const std::string &command,
                           const std::vector<Document> &inputs,
                           const CommandOptions &options) {
  try {
    int exit_code = 0;
    Document output = dispatch(command, inputs, options, exit_code);
    return {std::move(output), exit_code};
  } catch (const SemanticError &e) {
    return {result_document({{"ok", false},
                             {"error", e.code()},
                             {"message", e.what()},
                             {"detail", e.detail()}}),
            1};
  } catch (const ParseError &e) {
    return {result_document(
                {{"ok", false}, {"error", e.code()}, {"message", e.what()}}),
            2};
  } catch (const std::exception &e) {
    return {result_document(
                {{"ok", false}, {"error", "E_INTERNAL"}, {"message", e.what()}}),
            1};
  }
}

CommandOutcome run_command_line(const std::vector<std::string> &argv,
                                std::string &out_path) {
  out_path.clear();
  try {
    std::string command;
    std::vector<Document> inputs;
    CommandOptions options;

    std::size_t i = 0;
    if (i < argv.size() && argv[i].rfind("--", 0) != 0)
      command = argv[i++];

    for (; i < argv.size(); ++i) {
      const std::string &arg = argv[i];
      auto value = [&]() -> const std::string & {
        if (i + 1 >= argv.size())
          usage("flag " + arg + " needs a value");
        return argv[++i];
      };
      if (arg == "--in") {
        const std::string &path = value();
        std::ifstream file(path);
        if (!file)
          throw ParseError("E_PARSE", "cannot read input file '" + path + "'");
        std::ostringstream text;
        text << file.rdbuf();
        inputs.push_back(parse_document(text.str()));
      } else if (arg == "--out") {
        out_path = value();
      } else if (arg == "--cap") {
        options.cap = std::stoull(value());
      } else if (arg == "--seed") {
        options.seed = std::stoull(value());
      } else if (arg == "--radius") {
        options.radius = ExtValue::parse(value());
      } else if (arg == "--schema") {
        const DocKind kind = kind_from_name(value());
        return {result_document({{"schema", document_schema(kind)}}), 0};
      } else {
        usage("unknown flag '" + arg + "'");
      }
    }

    if (command.empty())
      throw ParseError("E_UNKNOWN_COMMAND", "no command given");
    return run_command(command, inputs, options);
  } catch (const ParseError &e) {
    return {result_document(
                {{"ok", false}, {"error", e.code()}, {"message", e.what()}}),
            2};
  } catch (const std::exception &e) {
    return {result_document(
                {{"ok", false}, {"error", "E_PARSE"}, {"message", e.what()}}),
            2};
  }
}

} // namespace finmet
