#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "finmet/commands.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string out_path;
  const finmet::CommandOutcome outcome = finmet::run_command_line(args, out_path);
  const std::string text = finmet::serialize_document(outcome.output);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot write output file '" << out_path << "'\n";
      return 2;
    }
    out << text;
  }
  return outcome.exit_code;
}
