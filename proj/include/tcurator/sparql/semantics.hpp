#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tcurator/sparql/ast.hpp"

namespace tcurator::sparql {

std::size_t levenshtein(std::string_view a, std::string_view b);

/// IRI up to and including its last '#' or '/'.
std::string namespace_of(std::string_view iri);

/// Flat term list. The vocabulary is authoritative for every namespace in
/// which it declares at least one term.
class ReferenceVocabulary {
 public:
  ReferenceVocabulary() = default;
  ReferenceVocabulary(const std::vector<std::string>& iris, std::map<std::string, std::string> prefixes = {});

  /// One absolute IRI per line, '#' comment lines; optional sidecar with
  /// `prefix<TAB>namespace` lines. Throws FileNotReadable.
  static ReferenceVocabulary load(const std::filesystem::path& terms,
                                  const std::optional<std::filesystem::path>& prefix_table = std::nullopt);

  bool contains(std::string_view iri) const;
  bool authoritative_for(std::string_view ns) const;
  /// Local names declared in `ns`, sorted.
  std::vector<std::string> locals_in(std::string_view ns) const;
  const std::map<std::string, std::string>& prefixes() const noexcept { return prefixes_; }
  std::size_t size() const noexcept { return terms_.size(); }

 private:
  std::set<std::string, std::less<>> terms_;
  std::map<std::string, std::set<std::string>, std::less<>> by_namespace_;
  std::map<std::string, std::string> prefixes_;
};

struct SemanticIssue {
  enum class Kind : std::uint8_t { UnknownPrefix, UnknownTerm, PredicateIsLiteral };

  Kind kind = Kind::UnknownTerm;
  /// Prefix name for UnknownPrefix, written term otherwise.
  std::string subject;
  std::size_t position = 0;

  friend bool operator==(const SemanticIssue&, const SemanticIssue&) = default;
};

const char* to_string(SemanticIssue::Kind kind) noexcept;

/// One issue per distinct offending prefix or term, in order of first use.
std::vector<SemanticIssue> check_semantics(const ParsedQuery& q, const ReferenceVocabulary& vocab);

struct SemanticRepair {
  enum class Status : std::uint8_t { Repaired, Ambiguous, NoCandidate };

  /// One occurrence in the source text with its own replacement spelling.
  struct Span {
    std::size_t offset = 0;
    std::size_t length = 0;
    std::string replacement;

    friend bool operator==(const Span&, const Span&) = default;
  };

  Status status = Status::NoCandidate;
  std::string original;      // written form
  std::string replacement;   // written form of the first occurrence, Repaired only
  std::vector<std::string> candidates;
  std::vector<Span> spans;
};

const char* to_string(SemanticRepair::Status status) noexcept;

struct SemanticCorrection {
  ParsedQuery query;
  std::vector<SemanticRepair> repairs;

  bool changed() const noexcept;
};

/// Replaces each UnknownTerm whose local name has exactly one vocabulary
/// neighbour within `max_distance` in the same namespace. Throws
/// InvalidArgument when max_distance is 0.
SemanticCorrection correct_semantics(const ParsedQuery& q, const ReferenceVocabulary& vocab,
                                     std::size_t max_distance = 2);

/// Patches the source text at the spans of every Repaired entry.
std::string apply_repairs(std::string_view text, const std::vector<SemanticRepair>& repairs);

}  // namespace tcurator::sparql
