#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tcurator::sparql {

enum class TokenKind : std::uint8_t {
  IriRef,        // text = IRI without angle brackets
  PrefixedName,  // text = "prefix:local" as written
  Variable,      // text = name without '?'/'$'
  BlankNode,     // text = "_:label"
  String,        // text = normalized double-quoted form
  Number,
  LangTag,       // text includes '@'
  Identifier,    // keywords, builtin names, `a`, true/false
  Punct,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::size_t offset = 0;
  std::size_t length = 0;
};

using TokenSeq = std::vector<Token>;

enum class TermKind : std::uint8_t { Iri, Literal, Variable };

/// One position of a triple pattern.
///
/// Iri terms hold the namespace-expanded IRI in `value`; a prefixed name
/// whose prefix could not be resolved keeps its written form and
/// `resolved == false`. Literals hold a normalized lexical rendering
/// (`"abc"@en`, `"5"^^<...#int>`, `42`). Variables hold the bare name; blank
/// nodes are treated as variables and keep their `_:` label.
struct Term {
  TermKind kind = TermKind::Variable;
  std::string value;
  std::string prefixed;  // prefixed spelling when written as pname
  bool resolved = true;
  std::size_t offset = 0;
  std::size_t length = 0;

  bool is_variable() const noexcept { return kind == TermKind::Variable; }
  bool is_constant() const noexcept { return kind != TermKind::Variable; }
  /// Text as it appears in the source (prefixed name or <iri>).
  std::string written() const;

  /// Identity ignores source position and spelling.
  friend bool operator==(const Term& a, const Term& b) noexcept {
    return a.kind == b.kind && a.value == b.value;
  }
};

struct TriplePattern {
  Term subject;
  Term predicate;
  Term object;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

struct GroupPattern;

struct PatternElement {
  enum class Kind : std::uint8_t { Triples, Filter, Bind, Optional, Union, Minus, Graph, Group, Opaque };

  Kind kind = Kind::Triples;
  std::vector<TriplePattern> triples;  // Triples
  TokenSeq tokens;                     // Filter/Bind/Opaque expression; Graph name
  std::vector<GroupPattern> groups;    // nested groups (Union holds >= 2)
};

struct GroupPattern {
  std::vector<PatternElement> elements;
};

enum class QueryForm : std::uint8_t { Select, Construct, Ask, Describe };
enum class Modifier : std::uint8_t { Limit, Offset, OrderBy, Filter, Optional, Union };

struct ParsedQuery {
  QueryForm form = QueryForm::Select;
  bool distinct = false;
  bool reduced = false;
  std::vector<TriplePattern> triple_patterns;  // flattened over every group
  std::vector<std::string> aggregates;         // upper-cased function names
  bool group_by = false;
  std::map<std::string, std::string> prefixes;
  std::optional<std::string> base;
  std::set<Modifier> modifiers;
  bool complex_unsupported = false;

  TokenSeq projection;  // SELECT items or DESCRIBE targets ('*' kept as token)
  std::vector<TriplePattern> construct_template;
  TokenSeq dataset;  // FROM / FROM NAMED clauses
  bool has_where = true;
  GroupPattern where;
  TokenSeq solution_modifiers;  // GROUP BY ... LIMIT ... as written
};

enum class QueryShape : std::uint8_t { Point, Star, Chain, Tree, Cycle, Disconnected };

struct QueryFeatures {
  std::size_t pattern_count = 0;
  QueryShape shape = QueryShape::Point;
  std::size_t depth = 0;
  bool has_aggregate = false;
  bool has_group_by = false;
  bool distinct = false;
  std::size_t variable_count = 0;

  friend bool operator==(const QueryFeatures&, const QueryFeatures&) = default;
};

struct SyntaxIssue {
  std::string rule;
  std::size_t position = 0;
  std::string message;

  friend bool operator==(const SyntaxIssue&, const SyntaxIssue&) = default;
};

const char* to_string(QueryForm form) noexcept;
std::optional<QueryForm> parse_query_form(std::string_view name) noexcept;
const char* to_string(QueryShape shape) noexcept;
std::optional<QueryShape> parse_query_shape(std::string_view name) noexcept;

}  // namespace tcurator::sparql
