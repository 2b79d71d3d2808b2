#include "tcurator/sparql/semantics.hpp"

#include <algorithm>
#include <fstream>
#include <functional>

#include "tcurator/error.hpp"

namespace tcurator::sparql {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

/// Effective IRI of an IRI term, using the vocabulary's prefix table for
/// prefixes the query itself could not resolve.
std::optional<std::string> effective_iri(const Term& t, const ReferenceVocabulary& vocab) {
  if (t.kind != TermKind::Iri) return std::nullopt;
  if (t.resolved) return t.value;
  const auto colon = t.value.find(':');
  if (colon == std::string::npos) return std::nullopt;
  auto it = vocab.prefixes().find(t.value.substr(0, colon));
  if (it == vocab.prefixes().end()) return std::nullopt;
  return it->second + t.value.substr(colon + 1);
}

std::string written(const Term& t) {
  if (!t.prefixed.empty()) return t.prefixed;
  return t.resolved ? "<" + t.value + ">" : t.value;
}

void for_each_pattern_term(const ParsedQuery& q, const std::function<void(const Term&, int)>& fn) {
  for (const auto* list : {&q.triple_patterns, &q.construct_template}) {
    for (const auto& tp : *list) {
      fn(tp.subject, 0);
      fn(tp.predicate, 1);
      fn(tp.object, 2);
    }
  }
}

void rewrite_group(GroupPattern& g, const std::function<void(Term&)>& fn);

void rewrite_patterns(std::vector<TriplePattern>& pats, const std::function<void(Term&)>& fn) {
  for (auto& tp : pats) {
    fn(tp.subject);
    fn(tp.predicate);
    fn(tp.object);
  }
}

void rewrite_group(GroupPattern& g, const std::function<void(Term&)>& fn) {
  for (auto& el : g.elements) {
    rewrite_patterns(el.triples, fn);
    for (auto& sub : el.groups) rewrite_group(sub, fn);
  }
}

}  // namespace

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string namespace_of(std::string_view iri) {
  const auto cut = iri.find_last_of("#/");
  if (cut == std::string_view::npos) return {};
  return std::string(iri.substr(0, cut + 1));
}

ReferenceVocabulary::ReferenceVocabulary(const std::vector<std::string>& iris, std::map<std::string, std::string> prefixes)
    : prefixes_(std::move(prefixes)) {
  for (const auto& iri : iris) {
    terms_.insert(iri);
    const auto ns = namespace_of(iri);
    by_namespace_[ns].insert(iri.substr(ns.size()));
  }
}

ReferenceVocabulary ReferenceVocabulary::load(const std::filesystem::path& terms,
                                              const std::optional<std::filesystem::path>& prefix_table) {
  std::ifstream in(terms);
  if (!in) throw Error(ErrorCode::FileNotReadable, terms.string());
  std::vector<std::string> iris;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '<' && t.back() == '>') t = t.substr(1, t.size() - 2);
    iris.push_back(std::move(t));
  }
  std::map<std::string, std::string> prefixes;
  if (prefix_table) {
    std::ifstream pin(*prefix_table);
    if (!pin) throw Error(ErrorCode::FileNotReadable, prefix_table->string());
    while (std::getline(pin, line)) {
      const auto t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      const auto tab = t.find('\t');
      if (tab == std::string::npos) throw Error(ErrorCode::InvalidKnowledgeBase, "prefix table line without TAB: " + t);
      auto ns = trim(t.substr(tab + 1));
      if (ns.size() >= 2 && ns.front() == '<' && ns.back() == '>') ns = ns.substr(1, ns.size() - 2);
      auto name = trim(t.substr(0, tab));
      if (!name.empty() && name.back() == ':') name.pop_back();
      prefixes[name] = ns;
    }
  }
  return ReferenceVocabulary(iris, std::move(prefixes));
}

bool ReferenceVocabulary::contains(std::string_view iri) const { return terms_.find(iri) != terms_.end(); }

bool ReferenceVocabulary::authoritative_for(std::string_view ns) const {
  return by_namespace_.find(ns) != by_namespace_.end();
}

std::vector<std::string> ReferenceVocabulary::locals_in(std::string_view ns) const {
  auto it = by_namespace_.find(ns);
  if (it == by_namespace_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

const char* to_string(SemanticIssue::Kind kind) noexcept {
  switch (kind) {
    case SemanticIssue::Kind::UnknownPrefix: return "UnknownPrefix";
    case SemanticIssue::Kind::UnknownTerm: return "UnknownTerm";
    case SemanticIssue::Kind::PredicateIsLiteral: return "PredicateIsLiteral";
  }
  return "?";
}

const char* to_string(SemanticRepair::Status status) noexcept {
  switch (status) {
    case SemanticRepair::Status::Repaired: return "Repaired";
    case SemanticRepair::Status::Ambiguous: return "Ambiguous";
    case SemanticRepair::Status::NoCandidate: return "NoCandidate";
  }
  return "?";
}

std::vector<SemanticIssue> check_semantics(const ParsedQuery& q, const ReferenceVocabulary& vocab) {
  std::vector<SemanticIssue> out;
  auto add = [&out](SemanticIssue::Kind kind, std::string subject, std::size_t pos) {
    for (const auto& i : out) {
      if (i.kind == kind && i.subject == subject) return;
    }
    out.push_back({kind, std::move(subject), pos});
  };
  for_each_pattern_term(q, [&](const Term& t, int position) {
    if (position == 1 && t.kind == TermKind::Literal) {
      add(SemanticIssue::Kind::PredicateIsLiteral, t.value, t.offset);
      return;
    }
    if (t.kind != TermKind::Iri) return;
    auto iri = effective_iri(t, vocab);
    if (!iri) {
      add(SemanticIssue::Kind::UnknownPrefix, t.value.substr(0, t.value.find(':')), t.offset);
      return;
    }
    if (vocab.authoritative_for(namespace_of(*iri)) && !vocab.contains(*iri)) {
      add(SemanticIssue::Kind::UnknownTerm, written(t), t.offset);
    }
  });
  return out;
}

bool SemanticCorrection::changed() const noexcept {
  return std::any_of(repairs.begin(), repairs.end(),
                     [](const SemanticRepair& r) { return r.status == SemanticRepair::Status::Repaired; });
}

namespace {

std::string respell(const Term& t, const std::string& new_iri) {
  const auto local = new_iri.substr(namespace_of(new_iri).size());
  if (!t.prefixed.empty() && t.prefixed != "a") return t.prefixed.substr(0, t.prefixed.find(':') + 1) + local;
  if (!t.resolved) return t.value.substr(0, t.value.find(':') + 1) + local;
  return "<" + new_iri + ">";
}

}  // namespace

SemanticCorrection correct_semantics(const ParsedQuery& q, const ReferenceVocabulary& vocab, std::size_t max_distance) {
  if (max_distance == 0) throw Error(ErrorCode::InvalidArgument, "max_distance must be at least 1");
  SemanticCorrection out{q, {}};
  // Unknown IRIs keyed by effective IRI, in order of first use.
  std::vector<std::string> unknown;
  std::map<std::string, std::vector<const Term*>> uses;
  for_each_pattern_term(q, [&](const Term& t, int) {
    auto iri = effective_iri(t, vocab);
    if (!iri || !vocab.authoritative_for(namespace_of(*iri)) || vocab.contains(*iri)) return;
    auto [it, fresh] = uses.try_emplace(*iri);
    if (fresh) unknown.push_back(*iri);
    it->second.push_back(&t);
  });

  std::map<std::string, std::string> replace;
  for (const auto& iri : unknown) {
    SemanticRepair r;
    const auto& occurrences = uses[iri];
    r.original = written(*occurrences.front());
    const auto ns = namespace_of(iri);
    const auto local = iri.substr(ns.size());
    for (const auto& cand : vocab.locals_in(ns)) {
      if (levenshtein(local, cand) <= max_distance) r.candidates.push_back(ns + cand);
    }
    if (r.candidates.size() == 1) {
      r.status = SemanticRepair::Status::Repaired;
      const auto& new_iri = r.candidates.front();
      r.replacement = respell(*occurrences.front(), new_iri);
      replace[iri] = new_iri;
    } else {
      r.status = r.candidates.empty() ? SemanticRepair::Status::NoCandidate : SemanticRepair::Status::Ambiguous;
    }
    for (const Term* t : occurrences) {
      SemanticRepair::Span span{t->offset, t->length, r.status == SemanticRepair::Status::Repaired
                                                          ? respell(*t, r.candidates.front())
                                                          : std::string()};
      if (std::find(r.spans.begin(), r.spans.end(), span) == r.spans.end()) r.spans.push_back(std::move(span));
    }
    out.repairs.push_back(std::move(r));
  }

  if (!replace.empty()) {
    auto fix = [&](Term& t) {
      auto iri = effective_iri(t, vocab);
      if (!iri) return;
      auto it = replace.find(*iri);
      if (it == replace.end()) return;
      const auto spelled = respell(t, it->second);
      t.value = it->second;
      t.resolved = true;
      if (spelled.front() != '<') t.prefixed = spelled;
    };
    rewrite_patterns(out.query.triple_patterns, fix);
    rewrite_patterns(out.query.construct_template, fix);
    rewrite_group(out.query.where, fix);
  }
  return out;
}

std::string apply_repairs(std::string_view text, const std::vector<SemanticRepair>& repairs) {
  std::vector<const SemanticRepair::Span*> edits;
  for (const auto& r : repairs) {
    if (r.status != SemanticRepair::Status::Repaired) continue;
    for (const auto& span : r.spans) edits.push_back(&span);
  }
  std::sort(edits.begin(), edits.end(), [](const auto* a, const auto* b) { return a->offset > b->offset; });
  std::string out(text);
  for (const auto* e : edits) {
    if (e->offset + e->length <= out.size()) out.replace(e->offset, e->length, e->replacement);
  }
  return out;
}

}  // namespace tcurator::sparql
