#include "tcurator/sparql/ast.hpp"

#include <array>

#include "tcurator/sparql/lexer.hpp"

namespace tcurator::sparql {
namespace {

constexpr std::array<const char*, 4> kForms = {"Select", "Construct", "Ask", "Describe"};
constexpr std::array<const char*, 6> kShapes = {"Point", "Star", "Chain", "Tree", "Cycle", "Disconnected"};

}  // namespace

std::string Term::written() const {
  switch (kind) {
    case TermKind::Variable: return value.starts_with("_:") ? value : "?" + value;
    case TermKind::Literal: return value;
    case TermKind::Iri:
      if (!prefixed.empty()) return prefixed;
      return resolved ? "<" + value + ">" : value;
  }
  return value;
}

const char* to_string(QueryForm form) noexcept { return kForms[static_cast<std::size_t>(form)]; }

std::optional<QueryForm> parse_query_form(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kForms.size(); ++i) {
    if (iequals(name, kForms[i])) return static_cast<QueryForm>(i);
  }
  return std::nullopt;
}

const char* to_string(QueryShape shape) noexcept { return kShapes[static_cast<std::size_t>(shape)]; }

std::optional<QueryShape> parse_query_shape(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kShapes.size(); ++i) {
    if (iequals(name, kShapes[i])) return static_cast<QueryShape>(i);
  }
  return std::nullopt;
}

}  // namespace tcurator::sparql
