#pragma once

#include <optional>
#include <string>
#include <vector>

#include "finmet/documents.hpp"

namespace finmet {

struct CommandOptions {
  std::optional<std::uint64_t> cap;
  std::optional<std::uint64_t> seed; // reserved for the test harness generators
  std::optional<ExtValue> radius;
};

struct CommandOutcome {
  Document output;
  int exit_code; // 0 success, 1 semantic violation, 2 parse/usage error
};

/// One dispatch-table row: a command name and the library operations it
/// reaches. Every operation appears in exactly one row.
struct CommandSpec {
  std::string name;
  std::vector<std::string> operations;
};

const std::vector<CommandSpec> &command_registry();

/// Inventory of all library operations, for the registry bijectivity test.
std::vector<std::string> operation_inventory();

/// Dispatches a command over already-parsed documents. Never throws: errors
/// are encoded in the outcome (exit 1 for semantic violations, 2 for
/// parse/usage errors).
CommandOutcome run_command(const std::string &command,
                           const std::vector<Document> &inputs,
                           const CommandOptions &options = {});

/// Full argv interface: parses flags (--in FILE repeatable, --out FILE,
/// --cap N, --seed N, --radius R, --schema KIND), reads input files, and
/// dispatches. `argv` excludes the program name.
CommandOutcome run_command_line(const std::vector<std::string> &argv,
                                std::string &out_path);

} // namespace finmet
