#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tcurator/sparql/ast.hpp"

namespace tcurator::sparql {

using ParseResult = std::variant<ParsedQuery, std::vector<SyntaxIssue>>;

/// Parses the supported SPARQL subset. Property paths, sub-selects, VALUES,
/// SERVICE and RDF collections are kept as opaque elements and flip
/// `complex_unsupported`; they do not fail the parse.
ParseResult parse_query(std::string_view text);

inline bool parsed_ok(const ParseResult& r) noexcept { return std::holds_alternative<ParsedQuery>(r); }

/// Prefixes available without a PREFIX declaration.
const std::map<std::string, std::string, std::less<>>& builtin_prefixes();

/// Expands `prefix:local` against the query's declarations, then the
/// builtin table. nullopt when the prefix is unknown.
std::optional<std::string> expand_prefixed(std::string_view pname, const std::map<std::string, std::string>& declared);

}  // namespace tcurator::sparql
