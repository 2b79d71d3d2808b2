#include "tcurator/sparql/parser.hpp"

#include <algorithm>
#include <array>

#include "tcurator/sparql/lexer.hpp"

namespace tcurator::sparql {
namespace {

constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

struct Failure {
  SyntaxIssue issue;
};
struct Unsupported {};

constexpr std::array<std::string_view, 7> kGraphKeywords = {"FILTER", "OPTIONAL", "MINUS", "GRAPH",
                                                            "SERVICE", "BIND",   "VALUES"};
constexpr std::array<std::string_view, 6> kModifierKeywords = {"GROUP", "HAVING", "ORDER",
                                                               "LIMIT", "OFFSET", "VALUES"};
constexpr std::array<std::string_view, 5> kAggregates = {"COUNT", "SUM", "AVG", "MIN", "MAX"};

template <std::size_t N>
bool is_one_of(const Token& t, const std::array<std::string_view, N>& words) {
  if (t.kind != TokenKind::Identifier) return false;
  return std::any_of(words.begin(), words.end(), [&](std::string_view w) { return iequals(t.text, w); });
}

std::string unescape_local(std::string_view local) {
  std::string out;
  out.reserve(local.size());
  for (std::size_t i = 0; i < local.size(); ++i) {
    if (local[i] == '\\' && i + 1 < local.size()) ++i;
    out += local[i];
  }
  return out;
}

class Parser {
 public:
  explicit Parser(TokenSeq tokens) : toks_(std::move(tokens)) {}

  ParsedQuery run() {
    prologue();
    const Token& t = peek();
    std::optional<QueryForm> form;
    if (t.kind == TokenKind::Identifier) form = parse_query_form(t.text);
    if (!form) fail("UnknownQueryForm", t.offset, "expected SELECT, CONSTRUCT, ASK or DESCRIBE");
    advance();
    q_.form = *form;
    switch (*form) {
      case QueryForm::Select: select(); break;
      case QueryForm::Construct: construct(); break;
      case QueryForm::Ask:
        dataset();
        where_clause(true);
        break;
      case QueryForm::Describe: describe(); break;
    }
    solution_modifiers();
    if (!at_end()) fail("TrailingInput", peek().offset, "unexpected '" + peek().text + "' after the query");
    collect_aggregates(q_.projection);
    collect_aggregates(q_.solution_modifiers);
    return std::move(q_);
  }

 private:
  // -- token helpers -------------------------------------------------------

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokenKind::End; }
  static bool is_punct(const Token& t, std::string_view p) { return t.kind == TokenKind::Punct && t.text == p; }
  static bool is_kw(const Token& t, std::string_view k) {
    return t.kind == TokenKind::Identifier && iequals(t.text, k);
  }

  // Running out of input inside a group is reported against the innermost
  // open brace.
  [[noreturn]] void fail(std::string rule, std::size_t position, std::string message) const {
    if (rule == "UnexpectedEnd" && !open_groups_.empty()) {
      throw Failure{SyntaxIssue{"UnterminatedGroup", open_groups_.back(), "group opened here is never closed"}};
    }
    throw Failure{SyntaxIssue{std::move(rule), position, std::move(message)}};
  }

  void require_punct(std::string_view p, std::string_view what) {
    if (!is_punct(peek(), p)) {
      if (at_end()) fail("UnexpectedEnd", peek().offset, "query ends where " + std::string(what) + " was expected");
      fail("UnexpectedToken", peek().offset, "expected " + std::string(what) + ", found '" + peek().text + "'");
    }
  }

  std::optional<std::string> resolve(std::string_view pname) const { return expand_prefixed(pname, q_.prefixes); }

  /// Copies a token for an opaque sequence, expanding resolvable pnames.
  Token opaque_copy(const Token& t) const {
    Token out = t;
    if (t.kind == TokenKind::PrefixedName) {
      if (auto iri = resolve(t.text)) {
        out.kind = TokenKind::IriRef;
        out.text = *iri;
      }
    }
    return out;
  }

  /// Consumes a bracketed run starting at the current `open` token.
  TokenSeq balanced(std::string_view open, std::string_view close) {
    const Token& first = peek();
    TokenSeq out;
    int depth = 0;
    while (true) {
      const Token& t = peek();
      if (t.kind == TokenKind::End) {
        if (open == "{") fail("UnterminatedGroup", first.offset, "group opened here is never closed");
        fail(open == "(" ? "UnbalancedParen" : "UnbalancedBracket", first.offset,
             "'" + std::string(open) + "' opened here is never closed");
      }
      if (is_punct(t, open)) ++depth;
      if (is_punct(t, close)) --depth;
      out.push_back(opaque_copy(t));
      advance();
      if (depth == 0) return out;
    }
  }

  // -- prologue and query forms ---------------------------------------------

  void prologue() {
    while (true) {
      if (is_kw(peek(), "PREFIX")) {
        advance();
        const Token& ns = peek();
        if (ns.kind != TokenKind::PrefixedName || ns.text.back() != ':' ||
            ns.text.find(':') != ns.text.size() - 1) {
          fail("MalformedPrefix", ns.offset, "expected a prefix name such as 'foaf:'");
        }
        advance();
        const Token& iri = peek();
        if (iri.kind != TokenKind::IriRef) fail("MalformedPrefix", iri.offset, "expected <namespace-IRI>");
        advance();
        q_.prefixes[ns.text.substr(0, ns.text.size() - 1)] = iri.text;
      } else if (is_kw(peek(), "BASE")) {
        advance();
        const Token& iri = peek();
        if (iri.kind != TokenKind::IriRef) fail("MalformedBase", iri.offset, "expected <base-IRI>");
        advance();
        q_.base = iri.text;
      } else {
        return;
      }
    }
  }

  void select() {
    if (is_kw(peek(), "DISTINCT")) {
      q_.distinct = true;
      advance();
    } else if (is_kw(peek(), "REDUCED")) {
      q_.reduced = true;
      advance();
    }
    if (is_punct(peek(), "*")) {
      q_.projection.push_back(advance());
    } else {
      while (true) {
        if (peek().kind == TokenKind::Variable) {
          q_.projection.push_back(advance());
        } else if (is_punct(peek(), "(")) {
          auto item = balanced("(", ")");
          q_.projection.insert(q_.projection.end(), item.begin(), item.end());
        } else {
          break;
        }
      }
      if (q_.projection.empty()) fail("EmptyProjection", peek().offset, "SELECT needs '*' or at least one variable");
    }
    dataset();
    where_clause(true);
  }

  void construct() {
    if (is_punct(peek(), "{")) {
      const Token& open = advance();
      open_groups_.push_back(open.offset);
      in_template_ = true;
      while (true) {
        const Token& t = peek();
        if (t.kind == TokenKind::End) fail("UnterminatedGroup", open.offset, "CONSTRUCT template is never closed");
        if (is_punct(t, "}")) {
          advance();
          open_groups_.pop_back();
          break;
        }
        if (is_punct(t, ".")) {
          advance();
          continue;
        }
        triples_statement(q_.construct_template);
      }
      in_template_ = false;
      dataset();
      where_clause(true);
      return;
    }
    dataset();
    if (!is_kw(peek(), "WHERE")) fail("MissingWhere", peek().offset, "expected a template or WHERE");
    where_clause(true);
    for (const auto& el : q_.where.elements) {
      if (el.kind != PatternElement::Kind::Triples) {
        fail("InvalidConstructWhere", peek().offset, "CONSTRUCT WHERE allows triple patterns only");
      }
      q_.construct_template.insert(q_.construct_template.end(), el.triples.begin(), el.triples.end());
    }
  }

  void describe() {
    if (is_punct(peek(), "*")) {
      q_.projection.push_back(advance());
    } else {
      while (peek().kind == TokenKind::Variable || peek().kind == TokenKind::IriRef ||
             peek().kind == TokenKind::PrefixedName) {
        q_.projection.push_back(opaque_copy(advance()));
      }
      if (q_.projection.empty()) fail("EmptyProjection", peek().offset, "DESCRIBE needs '*' or a resource");
    }
    dataset();
    q_.has_where = where_clause(false);
  }

  void dataset() {
    while (is_kw(peek(), "FROM")) {
      q_.dataset.push_back(advance());
      if (is_kw(peek(), "NAMED")) q_.dataset.push_back(advance());
      const Token& g = peek();
      if (g.kind != TokenKind::IriRef && g.kind != TokenKind::PrefixedName) {
        fail("MalformedDataset", g.offset, "FROM expects an IRI");
      }
      q_.dataset.push_back(opaque_copy(advance()));
    }
  }

  bool where_clause(bool required) {
    if (is_kw(peek(), "WHERE")) {
      advance();
      require_punct("{", "'{'");
    } else if (!is_punct(peek(), "{")) {
      if (!required) return false;
      if (at_end()) fail("UnexpectedEnd", peek().offset, "query ends before its WHERE clause");
      fail("MissingWhere", peek().offset, "expected WHERE or '{'");
    }
    q_.where = group();
    return true;
  }

  // -- graph patterns ---------------------------------------------------------

  GroupPattern group() {
    const Token& open = peek();
    GroupPattern g;
    if (is_kw(peek(1), "SELECT")) {
      q_.complex_unsupported = true;
      auto body = balanced("{", "}");
      body.erase(body.begin());
      body.pop_back();
      g.elements.push_back(PatternElement{PatternElement::Kind::Opaque, {}, std::move(body), {}});
      return g;
    }
    advance();
    open_groups_.push_back(open.offset);
    while (true) {
      const Token& t = peek();
      if (t.kind == TokenKind::End) fail("UnterminatedGroup", open.offset, "group opened here is never closed");
      if (is_punct(t, "}")) {
        advance();
        open_groups_.pop_back();
        return g;
      }
      if (is_punct(t, ".")) {
        advance();
        continue;
      }
      if (is_kw(t, "OPTIONAL") || is_kw(t, "MINUS")) {
        const bool optional = is_kw(t, "OPTIONAL");
        advance();
        require_punct("{", "'{'");
        PatternElement el;
        el.kind = optional ? PatternElement::Kind::Optional : PatternElement::Kind::Minus;
        el.groups.push_back(group());
        if (optional) q_.modifiers.insert(Modifier::Optional);
        g.elements.push_back(std::move(el));
      } else if (is_kw(t, "GRAPH")) {
        advance();
        const Token& name = peek();
        if (name.kind != TokenKind::Variable && name.kind != TokenKind::IriRef &&
            name.kind != TokenKind::PrefixedName) {
          fail("MissingTerm", name.offset, "GRAPH expects a variable or IRI");
        }
        PatternElement el;
        el.kind = PatternElement::Kind::Graph;
        el.tokens.push_back(opaque_copy(advance()));
        require_punct("{", "'{'");
        el.groups.push_back(group());
        g.elements.push_back(std::move(el));
      } else if (is_kw(t, "FILTER")) {
        advance();
        g.elements.push_back(PatternElement{PatternElement::Kind::Filter, {}, constraint(), {}});
        q_.modifiers.insert(Modifier::Filter);
      } else if (is_kw(t, "BIND")) {
        advance();
        require_punct("(", "'('");
        g.elements.push_back(PatternElement{PatternElement::Kind::Bind, {}, balanced("(", ")"), {}});
      } else if (is_kw(t, "SERVICE") || is_kw(t, "VALUES")) {
        q_.complex_unsupported = true;
        const bool service = is_kw(t, "SERVICE");
        TokenSeq toks{advance()};
        if (service) {
          if (is_kw(peek(), "SILENT")) toks.push_back(advance());
          toks.push_back(opaque_copy(advance()));
        } else if (is_punct(peek(), "(")) {
          auto vars = balanced("(", ")");
          toks.insert(toks.end(), vars.begin(), vars.end());
        } else {
          toks.push_back(advance());
        }
        require_punct("{", "'{'");
        auto body = balanced("{", "}");
        toks.insert(toks.end(), body.begin(), body.end());
        g.elements.push_back(PatternElement{PatternElement::Kind::Opaque, {}, std::move(toks), {}});
      } else if (is_punct(t, "{")) {
        PatternElement el;
        el.groups.push_back(group());
        if (is_kw(peek(), "UNION")) {
          el.kind = PatternElement::Kind::Union;
          q_.modifiers.insert(Modifier::Union);
          while (is_kw(peek(), "UNION")) {
            advance();
            require_punct("{", "'{'");
            el.groups.push_back(group());
          }
        } else {
          el.kind = PatternElement::Kind::Group;
        }
        g.elements.push_back(std::move(el));
      } else {
        std::vector<TriplePattern> block;
        if (triples_statement(block)) {
          q_.triple_patterns.insert(q_.triple_patterns.end(), block.begin(), block.end());
          if (g.elements.empty() || g.elements.back().kind != PatternElement::Kind::Triples) {
            g.elements.push_back(PatternElement{});
          }
          auto& dst = g.elements.back().triples;
          dst.insert(dst.end(), block.begin(), block.end());
        } else {
          g.elements.push_back(PatternElement{PatternElement::Kind::Opaque, {}, std::move(last_opaque_), {}});
        }
      }
    }
  }

  TokenSeq constraint() {
    const Token& t = peek();
    if (is_punct(t, "(")) return balanced("(", ")");
    TokenSeq out;
    if (is_kw(t, "EXISTS") || is_kw(t, "NOT")) {
      out.push_back(advance());
      if (is_kw(out.back(), "NOT")) {
        if (!is_kw(peek(), "EXISTS")) fail("MalformedFilter", peek().offset, "expected EXISTS after NOT");
        out.push_back(advance());
      }
      require_punct("{", "'{'");
      auto body = balanced("{", "}");
      out.insert(out.end(), body.begin(), body.end());
      return out;
    }
    if (t.kind == TokenKind::Identifier || t.kind == TokenKind::IriRef || t.kind == TokenKind::PrefixedName) {
      out.push_back(opaque_copy(advance()));
      require_punct("(", "'('");
      auto args = balanced("(", ")");
      out.insert(out.end(), args.begin(), args.end());
      return out;
    }
    fail("MalformedFilter", t.offset, "FILTER expects a bracketed expression or a function call");
  }

  // -- triples ------------------------------------------------------------------

  /// One subject with its predicate-object list. Returns false (and leaves
  /// the skipped tokens in last_opaque_) when the statement uses syntax kept
  /// opaque, such as property paths or collections.
  bool triples_statement(std::vector<TriplePattern>& out) {
    const std::size_t start = pos_;
    const std::size_t anon_mark = anon_;
    try {
      std::vector<TriplePattern> local;
      const bool anon_subject = is_punct(peek(), "[") && !is_punct(peek(1), "]");
      Term subject = subject_term(local);
      const bool bare_plist = anon_subject && (is_punct(peek(), ".") || is_punct(peek(), "}"));
      if (!bare_plist) predicate_object_list(subject, local);
      end_check();
      out.insert(out.end(), local.begin(), local.end());
      return true;
    } catch (const Unsupported&) {
      pos_ = start;
      anon_ = anon_mark;
      q_.complex_unsupported = true;
      last_opaque_ = skip_statement();
      return false;
    }
  }

  TokenSeq skip_statement() {
    TokenSeq out;
    int depth = 0;
    while (true) {
      const Token& t = peek();
      if (t.kind == TokenKind::End) return out;
      if (depth == 0 && (is_punct(t, ".") || is_punct(t, "}"))) return out;
      if (is_punct(t, "(") || is_punct(t, "[") || is_punct(t, "{")) ++depth;
      if (is_punct(t, ")") || is_punct(t, "]") || is_punct(t, "}")) --depth;
      out.push_back(opaque_copy(advance()));
    }
  }

  void end_check() {
    const Token& t = peek();
    if (t.kind == TokenKind::End || is_punct(t, ".") || is_punct(t, "}")) return;
    if (!in_template_ && (is_punct(t, "{") || is_one_of(t, kGraphKeywords))) return;
    fail("MissingDotBetweenPatterns", t.offset, "expected '.' before '" + t.text + "'");
  }

  Term subject_term(std::vector<TriplePattern>& local) {
    const Token& t = peek();
    if (is_punct(t, "[")) return anon_node(local);
    if (is_punct(t, "(")) throw Unsupported{};
    if (auto term = plain_term()) return *term;
    if (t.kind == TokenKind::End) fail("UnexpectedEnd", t.offset, "query ends where a subject was expected");
    fail("MissingTerm", t.offset, "expected a subject, found '" + t.text + "'");
  }

  void predicate_object_list(const Term& subject, std::vector<TriplePattern>& local) {
    while (true) {
      Term predicate = verb();
      object_list(subject, predicate, local);
      if (!is_punct(peek(), ";")) return;
      while (is_punct(peek(), ";")) advance();
      const Token& n = peek();
      const bool verb_start = n.kind == TokenKind::Variable || n.kind == TokenKind::IriRef ||
                              n.kind == TokenKind::PrefixedName || (n.kind == TokenKind::Identifier && n.text == "a") ||
                              is_punct(n, "^") || is_punct(n, "!") || is_punct(n, "(");
      if (!verb_start) return;
    }
  }

  Term verb() {
    const Token& t = peek();
    if (is_punct(t, "^") || is_punct(t, "!") || is_punct(t, "(")) throw Unsupported{};
    Term term;
    if (t.kind == TokenKind::Identifier && t.text == "a") {
      term = Term{TermKind::Iri, std::string(kRdfType), "a", true, t.offset, t.length};
      advance();
    } else if (t.kind == TokenKind::Variable || t.kind == TokenKind::IriRef || t.kind == TokenKind::PrefixedName) {
      term = *plain_term();
    } else if (t.kind == TokenKind::String || t.kind == TokenKind::Number || is_kw(t, "true") || is_kw(t, "false")) {
      fail("PredicateIsLiteral", t.offset, "a literal cannot be a predicate");
    } else if (t.kind == TokenKind::End) {
      fail("UnexpectedEnd", t.offset, "query ends where a predicate was expected");
    } else {
      fail("MissingTerm", t.offset, "expected a predicate, found '" + t.text + "'");
    }
    const Token& n = peek();
    if (is_punct(n, "/") || is_punct(n, "|") || is_punct(n, "*") || is_punct(n, "?") ||
        (is_punct(n, "+") && peek(1).kind != TokenKind::Number)) {
      throw Unsupported{};
    }
    return term;
  }

  void object_list(const Term& subject, const Term& predicate, std::vector<TriplePattern>& local) {
    while (true) {
      const Token& t = peek();
      Term object;
      if (is_punct(t, "[")) {
        object = anon_node(local);
      } else if (is_punct(t, "(")) {
        throw Unsupported{};
      } else if (auto term = plain_term()) {
        object = *term;
      } else if (t.kind == TokenKind::End) {
        fail("UnexpectedEnd", t.offset, "query ends where an object was expected");
      } else {
        fail("MissingTerm", t.offset, "expected an object, found '" + t.text + "'");
      }
      local.push_back(TriplePattern{subject, predicate, std::move(object)});
      if (!is_punct(peek(), ",")) return;
      advance();
    }
  }

  Term anon_node(std::vector<TriplePattern>& local) {
    const Token& open = advance();
    Term node{TermKind::Variable, "_:anon" + std::to_string(anon_++), "", true, open.offset, 1};
    if (is_punct(peek(), "]")) {
      node.length = peek().offset + 1 - open.offset;
      advance();
      return node;
    }
    predicate_object_list(node, local);
    if (!is_punct(peek(), "]")) {
      if (at_end()) fail("UnbalancedBracket", open.offset, "'[' opened here is never closed");
      fail("UnexpectedToken", peek().offset, "expected ']', found '" + peek().text + "'");
    }
    advance();
    return node;
  }

  /// Var, blank node, IRI, prefixed name or literal at the cursor.
  std::optional<Term> plain_term() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Variable:
        advance();
        return Term{TermKind::Variable, t.text, "", true, t.offset, t.length};
      case TokenKind::BlankNode:
        advance();
        return Term{TermKind::Variable, t.text, "", true, t.offset, t.length};
      case TokenKind::IriRef:
        advance();
        return Term{TermKind::Iri, t.text, "", true, t.offset, t.length};
      case TokenKind::PrefixedName: {
        advance();
        if (auto iri = resolve(t.text)) return Term{TermKind::Iri, *iri, t.text, true, t.offset, t.length};
        return Term{TermKind::Iri, t.text, t.text, false, t.offset, t.length};
      }
      case TokenKind::String: {
        advance();
        Term lit{TermKind::Literal, t.text, "", true, t.offset, t.length};
        if (peek().kind == TokenKind::LangTag) {
          lit.value += peek().text;
          lit.length = peek().offset + peek().length - t.offset;
          advance();
        } else if (is_punct(peek(), "^^")) {
          advance();
          const Token& dt = peek();
          if (dt.kind == TokenKind::IriRef) {
            lit.value += "^^<" + dt.text + ">";
          } else if (dt.kind == TokenKind::PrefixedName) {
            auto iri = resolve(dt.text);
            lit.value += iri ? "^^<" + *iri + ">" : "^^" + dt.text;
          } else {
            fail("MissingTerm", dt.offset, "expected a datatype IRI after '^^'");
          }
          lit.length = dt.offset + dt.length - t.offset;
          advance();
        }
        return lit;
      }
      case TokenKind::Number:
        advance();
        return Term{TermKind::Literal, t.text, "", true, t.offset, t.length};
      case TokenKind::Identifier:
        if (t.text == "true" || t.text == "false") {
          advance();
          return Term{TermKind::Literal, t.text, "", true, t.offset, t.length};
        }
        return std::nullopt;
      case TokenKind::Punct:
        if ((t.text == "-" || t.text == "+") && peek(1).kind == TokenKind::Number) {
          const Token& num = peek(1);
          advance();
          advance();
          std::string value = t.text == "-" ? "-" + num.text : num.text;
          return Term{TermKind::Literal, value, "", true, t.offset, num.offset + num.length - t.offset};
        }
        return std::nullopt;
      default: return std::nullopt;
    }
  }

  // -- solution modifiers -------------------------------------------------------

  void solution_modifiers() {
    while (true) {
      const Token& t = peek();
      if (is_kw(t, "GROUP") || is_kw(t, "ORDER")) {
        const bool grouping = is_kw(t, "GROUP");
        q_.solution_modifiers.push_back(advance());
        if (!is_kw(peek(), "BY")) fail("MalformedModifier", peek().offset, "expected BY");
        q_.solution_modifiers.push_back(advance());
        if (grouping) q_.group_by = true;
        else q_.modifiers.insert(Modifier::OrderBy);
        conditions();
      } else if (is_kw(t, "HAVING")) {
        q_.solution_modifiers.push_back(advance());
        conditions();
      } else if (is_kw(t, "LIMIT") || is_kw(t, "OFFSET")) {
        q_.modifiers.insert(is_kw(t, "LIMIT") ? Modifier::Limit : Modifier::Offset);
        q_.solution_modifiers.push_back(advance());
        if (peek().kind != TokenKind::Number) fail("MalformedModifier", peek().offset, "expected an integer");
        q_.solution_modifiers.push_back(advance());
      } else if (is_kw(t, "VALUES")) {
        q_.complex_unsupported = true;
        while (!at_end()) q_.solution_modifiers.push_back(opaque_copy(advance()));
      } else {
        return;
      }
    }
  }

  void conditions() {
    std::size_t count = 0;
    while (!at_end() && !is_one_of(peek(), kModifierKeywords)) {
      const Token& t = peek();
      if (is_punct(t, "(")) {
        auto expr = balanced("(", ")");
        q_.solution_modifiers.insert(q_.solution_modifiers.end(), expr.begin(), expr.end());
      } else if (t.kind == TokenKind::Identifier || t.kind == TokenKind::IriRef ||
                 t.kind == TokenKind::PrefixedName) {
        q_.solution_modifiers.push_back(opaque_copy(advance()));
        if (is_punct(peek(), "(")) {
          auto expr = balanced("(", ")");
          q_.solution_modifiers.insert(q_.solution_modifiers.end(), expr.begin(), expr.end());
        }
      } else if (t.kind == TokenKind::Variable) {
        q_.solution_modifiers.push_back(advance());
      } else {
        break;
      }
      ++count;
    }
    if (count == 0) fail("MalformedModifier", peek().offset, "expected at least one condition");
  }

  void collect_aggregates(const TokenSeq& toks) {
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
      if (is_one_of(toks[i], kAggregates) && is_punct(toks[i + 1], "(")) q_.aggregates.push_back(to_upper(toks[i].text));
    }
  }

  TokenSeq toks_;
  std::size_t pos_ = 0;
  std::size_t anon_ = 0;
  bool in_template_ = false;
  TokenSeq last_opaque_;
  std::vector<std::size_t> open_groups_;
  ParsedQuery q_;
};

}  // namespace

const std::map<std::string, std::string, std::less<>>& builtin_prefixes() {
  static const std::map<std::string, std::string, std::less<>> table = {
      {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
      {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
      {"xsd", "http://www.w3.org/2001/XMLSchema#"},
      {"owl", "http://www.w3.org/2002/07/owl#"},
      {"foaf", "http://xmlns.com/foaf/0.1/"},
      {"dc", "http://purl.org/dc/elements/1.1/"},
      {"dcterms", "http://purl.org/dc/terms/"},
      {"skos", "http://www.w3.org/2004/02/skos/core#"},
      {"schema", "http://schema.org/"},
      {"dbo", "http://dbpedia.org/ontology/"},
      {"dbp", "http://dbpedia.org/property/"},
      {"dbr", "http://dbpedia.org/resource/"},
      {"geo", "http://www.w3.org/2003/01/geo/wgs84_pos#"},
      {"prov", "http://www.w3.org/ns/prov#"},
  };
  return table;
}

std::optional<std::string> expand_prefixed(std::string_view pname, const std::map<std::string, std::string>& declared) {
  const auto colon = pname.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const std::string prefix(pname.substr(0, colon));
  const auto local = unescape_local(pname.substr(colon + 1));
  if (auto it = declared.find(prefix); it != declared.end()) return it->second + local;
  const auto& builtins = builtin_prefixes();
  if (auto it = builtins.find(prefix); it != builtins.end()) return it->second + local;
  return std::nullopt;
}

ParseResult parse_query(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    return std::vector<SyntaxIssue>{SyntaxIssue{"EmptyQuery", 0, "query text is blank"}};
  }
  auto lexed = tokenize(text);
  if (!lexed.issues.empty()) return std::move(lexed.issues);
  try {
    return Parser(std::move(lexed.tokens)).run();
  } catch (const Failure& f) {
    return std::vector<SyntaxIssue>{f.issue};
  }
}

}  // namespace tcurator::sparql
