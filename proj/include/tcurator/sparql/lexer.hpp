#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tcurator/sparql/ast.hpp"

namespace tcurator::sparql {

struct LexResult {
  TokenSeq tokens;  // always terminated by an End token
  std::vector<SyntaxIssue> issues;
};

/// Total tokenizer: lexical problems (unterminated IRI/string, stray bytes)
/// are reported as issues and scanning continues.
LexResult tokenize(std::string_view text);

/// Leading query-form keyword after PREFIX/BASE declarations and comments,
/// found without a full parse.
std::optional<QueryForm> detect_query_form(std::string_view text);

bool iequals(std::string_view a, std::string_view b) noexcept;
std::string to_upper(std::string_view s);

}  // namespace tcurator::sparql
