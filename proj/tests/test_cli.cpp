#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "finmet/commands.hpp"
#include "finmet/error.hpp"
#include "generators.hpp"

using namespace finmet;
using testgen::Rng;

namespace {

const std::string kSpaceTwoOne =
    R"({"kind":"space","points":["0","1"],"d":[["0","1"],["1","0"]]})";
const std::string kSpaceTwoTwo =
    R"({"kind":"space","points":["0","2"],"d":[["0","2"],["2","0"]]})";

Document doc(const std::string &text) { return parse_document(text); }

} // namespace

TEST_CASE("parse_document on the basic space forms") {
  const Document space = doc(kSpaceTwoOne);
  CHECK(space.kind == DocKind::space);
  CHECK(space.body.at("points") == nlohmann::json::array({"0", "1"}));

  const Document inf_space = doc(
      R"({"kind":"space","points":["a","b"],"d":[["0","inf"],["inf","0"]]})");
  CHECK(inf_space.body.at("d")[0][1] == "inf");

  CHECK_THROWS_WITH_AS(
      doc(R"({"kind":"space","points":["a"],"d":[["1/0"]]})"),
      doctest::Contains("E_BAD_RATIONAL"), ParseError);
  CHECK_THROWS_WITH_AS(
      doc(R"({"kind":"space","points":["a"],"d":[["-1"]]})"),
      doctest::Contains("E_BAD_RATIONAL"), ParseError);
  CHECK_THROWS_WITH_AS(doc(R"({"kind":"blob","points":[]})"),
                       doctest::Contains("E_UNKNOWN_KIND"), ParseError);
  CHECK_THROWS_AS(doc("not json at all"), ParseError);
  CHECK_THROWS_AS(doc(R"({"kind":"space","points":["a","a"],"d":
      [["0","0"],["0","0"]]})"),
                  ParseError);
}

TEST_CASE("parsing canonicalizes point order, rationals and key order") {
  const Document messy = doc(
      R"({"kind":"space","points":["b","a"],"d":[["0","2/4"],["4/8","0"]]})");
  CHECK(messy.body.at("points") == nlohmann::json::array({"a", "b"}));
  CHECK(messy.body.at("d")[0][1] == "1/2");
  const std::string text = serialize_document(messy);
  CHECK(serialize_document(parse_document(text)) == text);
}

TEST_CASE("serialization round-trips byte-identically") {
  Rng rng(173);
  for (int trial = 0; trial < 20; ++trial) {
    const FinSpace x = testgen::random_space(rng, 4, "x");
    const FinSpace y = testgen::random_metric_space(rng, 3, "y");
    const Morphism f = testgen::random_lipschitz_map(rng, x, y);
    for (const Document &d :
         {space_document(x), morphism_document(f),
          covering_document(testgen::random_covering(rng, y)),
          family_document(testgen::random_family_over(rng, y))}) {
      const std::string once = serialize_document(d);
      CHECK(serialize_document(parse_document(once)) == once);
    }
  }
}

TEST_CASE("gh command returns the half-integer value") {
  const CommandOutcome out =
      run_command("gh", {doc(kSpaceTwoOne), doc(kSpaceTwoTwo)});
  CHECK(out.exit_code == 0);
  CHECK(out.output.body.at("value") == "1/2");
  CHECK(out.output.body.contains("phi"));
  CHECK(out.output.body.contains("psi"));
  CHECK(out.output.body.contains("pairs"));
}

TEST_CASE("validate reports violations with exit code 1") {
  const CommandOutcome out = run_command(
      "validate",
      {doc(R"({"kind":"space","points":["a","b","c"],
               "d":[["0","1","5"],["1","0","1"],["5","1","0"]]})")});
  CHECK(out.exit_code == 1);
  CHECK(out.output.body.at("error") == "E_TRIANGLE");
  CHECK(out.output.body.at("detail").contains("violations"));
}

TEST_CASE("submetry on the identity reports verdict true") {
  const CommandOutcome out = run_command(
      "submetry",
      {doc(R"({"kind":"morphism",
               "dom":{"points":["0","1"],"d":[["0","1"],["1","0"]]},
               "cod":{"points":["0","1"],"d":[["0","1"],["1","0"]]},
               "map":{"0":"0","1":"1"}})")});
  CHECK(out.exit_code == 0);
  CHECK(out.output.body.at("verdict") == true);
}

TEST_CASE("unknown commands and bad arity use exit code 2") {
  CHECK(run_command("frobnicate", {}).exit_code == 2);
  CHECK(run_command("gh", {doc(kSpaceTwoOne)}).exit_code == 2);
  CHECK(run_command("gh", {}).exit_code == 2);
}

TEST_CASE("the dispatch table is a bijection onto the operation inventory") {
  std::set<std::string> covered;
  for (const CommandSpec &spec : command_registry())
    for (const std::string &op : spec.operations) {
      const bool fresh = covered.insert(op).second;
      CHECK(fresh); // no operation reachable from two commands
    }
  const std::vector<std::string> inventory = operation_inventory();
  CHECK(covered.size() == inventory.size());
  for (const std::string &op : inventory)
    CHECK(covered.count(op) == 1);
  CHECK(command_registry().size() == 27);
}

TEST_CASE("run_command_line reads files and honors --out") {
  const std::string dir = "cli_test_tmp";
  std::remove((dir + "_x.json").c_str());
  std::ofstream x(dir + "_x.json");
  x << kSpaceTwoOne;
  x.close();
  std::ofstream y(dir + "_y.json");
  y << kSpaceTwoTwo;
  y.close();

  std::string out_path;
  const CommandOutcome out = run_command_line(
      {"gh", "--in", dir + "_x.json", "--in", dir + "_y.json", "--out",
       dir + "_result.json"},
      out_path);
  CHECK(out.exit_code == 0);
  CHECK(out_path == dir + "_result.json");
  CHECK(out.output.body.at("value") == "1/2");

  std::string ignored;
  CHECK(run_command_line({"gh", "--in", "definitely_missing.json"}, ignored)
            .exit_code == 2);
  CHECK(run_command_line({}, ignored).exit_code == 2);
  CHECK(run_command_line({"gh", "--bogus"}, ignored).exit_code == 2);

  std::remove((dir + "_x.json").c_str());
  std::remove((dir + "_y.json").c_str());
  std::remove((dir + "_result.json").c_str());
}

TEST_CASE("--schema prints a schema for every kind") {
  for (const std::string kind :
       {"space", "morphism", "covering", "descent", "correspondence", "family",
        "pointed-family", "result"}) {
    std::string out_path;
    const CommandOutcome out = run_command_line({"--schema", kind}, out_path);
    CHECK(out.exit_code == 0);
    CHECK(out.output.body.contains("schema"));
  }
  std::string out_path;
  CHECK(run_command_line({"--schema", "blob"}, out_path).exit_code == 2);
}

TEST_CASE("hausdorff command with subset parameters") {
  const CommandOutcome out = run_command(
      "hausdorff",
      {doc(R"({"kind":"space","points":["0","1","3"],
               "d":[["0","1","3"],["1","0","2"],["3","2","0"]]})"),
       doc(R"({"kind":"result","f0":["0"],"f1":["1","3"]})")});
  CHECK(out.exit_code == 0);
  CHECK(out.output.body.at("value") == "3");
}

TEST_CASE("identify and product command outputs are canonical documents") {
  const CommandOutcome ident = run_command(
      "identify", {doc(R"({"kind":"space","points":["a","b"],
                           "d":[["0","0"],["0","0"]]})")});
  CHECK(ident.exit_code == 0);
  CHECK(ident.output.body.at("space").at("points") ==
        nlohmann::json::array({"a"}));

  const CommandOutcome prod =
      run_command("product", {doc(kSpaceTwoOne), doc(kSpaceTwoTwo)});
  CHECK(prod.exit_code == 0);
  CHECK(prod.output.body.at("space").at("points").size() == 4);
}

TEST_CASE("glue-2r defaults the radius to half the distortion") {
  const CommandOutcome out = run_command(
      "glue-2r",
      {doc(kSpaceTwoOne), doc(kSpaceTwoTwo),
       doc(R"({"kind":"correspondence","pairs":[["0","0"],["1","2"]]})")});
  CHECK(out.exit_code == 0);
  CHECK(out.output.kind == DocKind::family);
  CHECK(out.output.body.at("base").at("points") ==
        nlohmann::json::array({"0", "1/2"}));
}

TEST_CASE("corr-from-family and chain-bound round trip through documents") {
  const CommandOutcome fam = run_command(
      "glue-2r",
      {doc(kSpaceTwoOne), doc(kSpaceTwoTwo),
       doc(R"({"kind":"correspondence","pairs":[["0","0"],["1","2"]]})")});
  REQUIRE(fam.exit_code == 0);
  const Document fam_doc = parse_document(serialize_document(fam.output));

  const CommandOutcome corr = run_command("corr-from-family", {fam_doc});
  CHECK(corr.exit_code == 0);
  CHECK(corr.output.kind == DocKind::correspondence);

  const CommandOutcome bound = run_command("chain-bound", {fam_doc});
  CHECK(bound.exit_code == 0);
  CHECK(bound.output.body.at("value") == "1/2");
}

TEST_CASE("gh honors the --cap budget with a semantic error") {
  CommandOptions options;
  options.cap = 1;
  const CommandOutcome out =
      run_command("gh", {doc(kSpaceTwoOne), doc(kSpaceTwoTwo)}, options);
  CHECK(out.exit_code == 1);
  CHECK(out.output.body.at("error") == "E_BUDGET");
}

TEST_CASE("cocycle violations exit 1 with the report") {
  // two charts over a point with a swapped transition breaking the cocycle
  const std::string pt = R"({"points":["*"],"d":[["0"]]})";
  const std::string fiber = R"({"points":["a","b"],"d":[["0","1"],["1","0"]]})";
  const std::string chart = R"({"dom":)" + fiber + R"(,"cod":)" + pt +
                            R"(,"map":{"a":"*","b":"*"}})";
  const std::string leg = R"({"dom":)" + pt + R"(,"cod":)" + pt +
                          R"(,"map":{"*":"*"}})";
  const std::string descent = R"({"kind":"descent","base":)" + pt +
                              R"(,"covering":[)" + leg + "," + leg +
                              R"(],"charts":[)" + chart + "," + chart +
                              R"json(],"transitions":{
      "0,0":[["(a|*|*)","(a|*|*)"],["(b|*|*)","(b|*|*)"]],
      "1,1":[["(a|*|*)","(a|*|*)"],["(b|*|*)","(b|*|*)"]],
      "0,1":[["(a|*|*)","(b|*|*)"],["(b|*|*)","(a|*|*)"]],
      "1,0":[["(a|*|*)","(a|*|*)"],["(b|*|*)","(b|*|*)"]]}})json";
  const CommandOutcome out = run_command("cocycle", {doc(descent)});
  CHECK(out.exit_code == 1);
  CHECK(out.output.body.at("ok") == false);

  const CommandOutcome glue = run_command("glue-descent", {doc(descent)});
  CHECK(glue.exit_code == 1);
}

TEST_CASE("lsm-check on a morphism reports the local submetry radii") {
  const CommandOutcome out = run_command(
      "lsm-check",
      {doc(R"({"kind":"morphism",
               "dom":{"points":["0","2"],"d":[["0","2"],["2","0"]]},
               "cod":{"points":["0","1"],"d":[["0","1"],["1","0"]]},
               "map":{"0":"0","2":"1"}})")});
  CHECK(out.exit_code == 0);
  CHECK(out.output.body.at("radii").at("0") == "1");
  CHECK(out.output.body.at("radii").at("2") == "1");
}

TEST_CASE("covering-from-submetry requires the radius flag") {
  const std::string ident = R"({"kind":"morphism",
      "dom":{"points":["0","1"],"d":[["0","1"],["1","0"]]},
      "cod":{"points":["0","1"],"d":[["0","1"],["1","0"]]},
      "map":{"0":"0","1":"1"}})";
  CHECK(run_command("covering-from-submetry", {doc(ident)}).exit_code == 2);
  CommandOptions options;
  options.radius = ExtValue(1, 2);
  const CommandOutcome out =
      run_command("covering-from-submetry", {doc(ident)}, options);
  CHECK(out.exit_code == 0);
  CHECK(out.output.kind == DocKind::covering);
}
