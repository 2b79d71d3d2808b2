#pragma once

#include <string>

#include "tcurator/sparql/ast.hpp"

namespace tcurator::sparql {

/// Deterministic rendering used as the deduplication key.
///
/// Patterns inside a group are ordered by (predicate, subject, object) with
/// variables compared by structural colour, variables are renamed ?v0, ?v1...
/// in first-occurrence order, IRIs are written expanded, keywords upper-cased
/// and tokens separated by single spaces. FILTERs are moved to the end of
/// their group. The result re-parses to a query with the same canonical text.
std::string canonicalize(const ParsedQuery& q);

}  // namespace tcurator::sparql
