#include "tcurator/sparql/corrector.hpp"

#include <algorithm>
#include <array>

#include "tcurator/sparql/lexer.hpp"
#include "tcurator/sparql/parser.hpp"
#include "tcurator/sparql/semantics.hpp"

namespace tcurator::sparql {
namespace {

constexpr std::array<std::string_view, 6> kRuleNames = {
    "KeywordTypo",         "BalanceBraces",        "MissingDotBetweenPatterns",
    "StripTrailingSemicolon", "CloseUnterminatedIri", "CloseUnterminatedString",
};

constexpr std::array<std::string_view, 37> kKeywords = {
    "SELECT", "CONSTRUCT", "ASK",   "DESCRIBE", "WHERE",  "PREFIX", "BASE",   "DISTINCT", "REDUCED", "FROM",
    "NAMED",  "OPTIONAL",  "FILTER", "UNION",   "MINUS",  "GRAPH",  "SERVICE", "BIND",    "VALUES",  "GROUP",
    "BY",     "HAVING",    "ORDER", "LIMIT",    "OFFSET", "ASC",    "DESC",   "AS",       "COUNT",   "SUM",
    "AVG",    "MIN",       "MAX",   "EXISTS",   "NOT",    "UNDEF",  "SILENT",
};

constexpr std::array<std::string_view, 56> kBuiltins = {
    "STR",       "LANG",      "LANGMATCHES", "DATATYPE",  "BOUND",     "IRI",       "URI",      "BNODE",
    "RAND",      "ABS",       "CEIL",        "FLOOR",     "ROUND",     "CONCAT",    "STRLEN",   "UCASE",
    "LCASE",     "CONTAINS",  "STRSTARTS",   "STRENDS",   "STRBEFORE", "STRAFTER",  "YEAR",     "MONTH",
    "DAY",       "HOURS",     "MINUTES",     "SECONDS",   "TIMEZONE",  "TZ",        "NOW",      "UUID",
    "STRUUID",   "MD5",       "SHA1",        "SHA256",    "SHA384",    "SHA512",    "COALESCE", "IF",
    "STRLANG",   "STRDT",     "SAMETERM",    "ISIRI",     "ISURI",     "ISBLANK",   "ISLITERAL", "ISNUMERIC",
    "REGEX",     "SUBSTR",    "REPLACE",     "SAMPLE",    "GROUP_CONCAT", "SEPARATOR", "IN",     "ENCODE_FOR_URI",
};

bool known_word(std::string_view upper) {
  return std::find(kKeywords.begin(), kKeywords.end(), upper) != kKeywords.end() ||
         std::find(kBuiltins.begin(), kBuiltins.end(), upper) != kBuiltins.end();
}

std::vector<SyntaxIssue> issues_of(std::string_view text) {
  auto r = parse_query(text);
  if (auto* issues = std::get_if<std::vector<SyntaxIssue>>(&r)) return *issues;
  return {};
}

struct Edit {
  std::size_t offset;
  std::size_t length;
  std::string replacement;
};

std::string apply_edits(std::string text, std::vector<Edit> edits) {
  std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.offset > b.offset; });
  for (const auto& e : edits) text.replace(e.offset, e.length, e.replacement);
  return text;
}

std::optional<std::string> fix_keywords(const std::string& text) {
  std::vector<Edit> edits;
  for (const auto& tok : tokenize(text).tokens) {
    if (tok.kind != TokenKind::Identifier || tok.text.size() < 3) continue;
    if (auto fix = keyword_typo_fix(tok.text)) edits.push_back({tok.offset, tok.length, *fix});
  }
  if (edits.empty()) return std::nullopt;
  return apply_edits(text, std::move(edits));
}

std::optional<std::string> close_iris(const std::string& text);
std::optional<std::string> close_strings(const std::string& text);

// Braces are counted as if broken IRIs and strings were already closed, so
// a string that swallowed a '}' does not cause a second one to be appended.
std::optional<std::string> balance_braces(const std::string& text) {
  std::string view = text;
  if (auto closed = close_iris(view)) view = std::move(*closed);
  if (auto closed = close_strings(view)) view = std::move(*closed);
  long depth = 0;
  for (const auto& tok : tokenize(view).tokens) {
    if (tok.kind != TokenKind::Punct) continue;
    if (tok.text == "{") ++depth;
    else if (tok.text == "}") --depth;
  }
  if (depth <= 0) return std::nullopt;
  std::string out = text;
  while (depth-- > 0) out += " }";
  return out;
}

std::optional<std::string> insert_missing_dots(const std::string& text) {
  std::string cur = text;
  bool changed = false;
  for (int guard = 0; guard < 256; ++guard) {
    auto issues = issues_of(cur);
    if (issues.empty() || issues.front().rule != "MissingDotBetweenPatterns") break;
    cur.insert(issues.front().position, ". ");
    changed = true;
  }
  if (!changed) return std::nullopt;
  return cur;
}

std::optional<std::string> strip_trailing_semicolon(const std::string& text) {
  auto end = text.find_last_not_of(" \t\r\n");
  if (end == std::string::npos || text[end] != ';') return std::nullopt;
  while (end != std::string::npos && (text[end] == ';' || text[end] == ' ' || text[end] == '\t' ||
                                      text[end] == '\r' || text[end] == '\n')) {
    if (end == 0) return std::string();
    --end;
  }
  return text.substr(0, end + 1);
}

std::optional<std::string> close_iris(const std::string& text) {
  std::vector<Edit> edits;
  for (const auto& issue : tokenize(text).issues) {
    if (issue.rule != "UnterminatedIri") continue;
    std::size_t j = issue.position + 1;
    while (j < text.size()) {
      const char c = text[j];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '<' || c == '>' || c == '"' || c == '{' ||
          c == '}' || c == '|' || c == '^' || c == '`' || c == '\\') {
        break;
      }
      ++j;
    }
    while (j > issue.position + 1 && (text[j - 1] == '.' || text[j - 1] == ';' || text[j - 1] == ',' ||
                                      text[j - 1] == ')')) {
      --j;
    }
    edits.push_back({j, 0, ">"});
  }
  if (edits.empty()) return std::nullopt;
  return apply_edits(text, std::move(edits));
}

std::optional<std::string> close_strings(const std::string& text) {
  std::vector<Edit> edits;
  for (const auto& issue : tokenize(text).issues) {
    if (issue.rule != "UnterminatedString") continue;
    const char quote = text[issue.position];
    std::size_t eol = text.find_first_of("\r\n", issue.position);
    if (eol == std::string::npos) eol = text.size();
    std::size_t j = eol;
    while (j > issue.position + 1) {
      const char c = text[j - 1];
      if (c == ' ' || c == '\t' || c == '}' || c == '.' || c == ';' || c == ')') --j;
      else break;
    }
    edits.push_back({j, 0, std::string(1, quote)});
  }
  if (edits.empty()) return std::nullopt;
  return apply_edits(text, std::move(edits));
}

}  // namespace

const char* to_string(RepairRule rule) noexcept { return kRuleNames[static_cast<std::size_t>(rule)].data(); }

std::optional<RepairRule> parse_repair_rule(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kRuleNames.size(); ++i) {
    if (kRuleNames[i] == name) return static_cast<RepairRule>(i);
  }
  return std::nullopt;
}

std::optional<std::string> keyword_typo_fix(std::string_view word) {
  const auto upper = to_upper(word);
  if (known_word(upper)) return std::nullopt;
  std::optional<std::string> match;
  for (auto kw : kKeywords) {
    if (kw.size() + 1 < upper.size() || upper.size() + 1 < kw.size()) continue;
    if (levenshtein(upper, kw) != 1) continue;
    if (match) return std::nullopt;
    match = std::string(kw);
  }
  return match;
}

SyntaxCorrection correct_syntax(std::string_view text) {
  SyntaxCorrection out{std::string(text), {}, issues_of(text)};
  if (out.issues.empty()) return out;

  using Rule = std::optional<std::string> (*)(const std::string&);
  constexpr std::array<std::pair<RepairRule, Rule>, 6> table = {{
      {RepairRule::KeywordTypo, fix_keywords},
      {RepairRule::BalanceBraces, balance_braces},
      {RepairRule::MissingDotBetweenPatterns, insert_missing_dots},
      {RepairRule::StripTrailingSemicolon, strip_trailing_semicolon},
      {RepairRule::CloseUnterminatedIri, close_iris},
      {RepairRule::CloseUnterminatedString, close_strings},
  }};

  std::string cur(text);
  std::vector<RepairRule> applied;
  for (const auto& [rule, fn] : table) {
    auto next = fn(cur);
    if (!next || *next == cur) continue;
    cur = std::move(*next);
    applied.push_back(rule);
    if (issues_of(cur).empty()) return SyntaxCorrection{std::move(cur), std::move(applied), {}};
  }
  return out;
}

}  // namespace tcurator::sparql
