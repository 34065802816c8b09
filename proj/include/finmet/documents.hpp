#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "finmet/fin_space.hpp"
#include "finmet/gromov_hausdorff.hpp"
#include "finmet/lsm_descent.hpp"
#include "finmet/submetry.hpp"

namespace finmet {

enum class DocKind {
  space,
  morphism,
  covering,
  descent,
  correspondence,
  family,
  pointed_family,
  result,
};

std::string kind_name(DocKind kind);
DocKind kind_from_name(const std::string &name); // throws E_UNKNOWN_KIND

/// A structurally validated document in canonical form: points sorted
/// lexicographically, rationals reduced, "inf" literal for infinity, object
/// keys sorted. Semantic validation (triangle inequality, Lipschitz bounds,
/// cocycle conditions) is left to the targeted operation.
struct Document {
  DocKind kind;
  nlohmann::json body; // canonical, includes "kind"
};

/// Parses and canonicalizes a document. Throws ParseError with code E_PARSE
/// (malformed JSON or wrong shape), E_BAD_RATIONAL, or E_UNKNOWN_KIND.
Document parse_document(const std::string &text);

/// Canonical serialization; serialize(parse(serialize(x))) == serialize(x).
std::string serialize_document(const Document &doc);

/// JSON schema text for one document kind (for the --schema flag).
nlohmann::json document_schema(DocKind kind);

// Typed extraction from canonical documents. These run semantic validation
// and throw SemanticError on failure.
FinSpace space_from_document(const Document &doc);
Morphism morphism_from_document(const Document &doc);
Covering covering_from_document(const Document &doc);
DescentDatum descent_from_document(const Document &doc);
Family family_from_document(const Document &doc);
PointedFamily pointed_family_from_document(const Document &doc);
Correspondence correspondence_from_document(const Document &doc,
                                            const FinSpace &left,
                                            const FinSpace &right);

// Document construction from typed values (already canonical).
nlohmann::json space_payload(const FinSpace &space);
nlohmann::json morphism_payload(const Morphism &f);
Document space_document(const FinSpace &space);
Document morphism_document(const Morphism &f);
Document covering_document(const Covering &cov);
Document descent_document(const DescentDatum &datum);
Document family_document(const Family &fam);
Document pointed_family_document(const PointedFamily &fam);
Document correspondence_document(const Correspondence &corr);
Document result_document(nlohmann::json payload);

} // namespace finmet
