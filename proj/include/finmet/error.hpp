#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

namespace finmet {

/// Machine-readable failure raised by library operations.
///
/// `code` is a stable identifier (e.g. "E_TRIANGLE"); `detail` carries the
/// witness data a caller needs to reproduce or report the failure.
class SemanticError : public std::runtime_error {
public:
  SemanticError(std::string code, std::string message,
                nlohmann::json detail = nlohmann::json::object())
      : std::runtime_error(code + ": " + message), code_(std::move(code)),
        detail_(std::move(detail)) {}

  const std::string &code() const { return code_; }
  const nlohmann::json &detail() const { return detail_; }

private:
  std::string code_;
  nlohmann::json detail_;
};

/// Structural/parse failure in a document; distinct from SemanticError so the
/// CLI can map it to a different exit code.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string code, std::string message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string &code() const { return code_; }

private:
  std::string code_;
};

} // namespace finmet
