#include "tcurator/sparql/canonical.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>
#include <string_view>

#include "tcurator/sparql/lexer.hpp"

namespace tcurator::sparql {
namespace {

constexpr std::size_t kOrderingBudget = 5040;

GroupPattern normalize_group(const GroupPattern& in) {
  GroupPattern out;
  std::vector<PatternElement> filters;
  for (const auto& el : in.elements) {
    if (el.kind == PatternElement::Kind::Filter) {
      filters.push_back(el);
      continue;
    }
    PatternElement copy = el;
    for (auto& g : copy.groups) g = normalize_group(g);
    if (copy.kind == PatternElement::Kind::Triples && !out.elements.empty() &&
        out.elements.back().kind == PatternElement::Kind::Triples) {
      auto& dst = out.elements.back().triples;
      dst.insert(dst.end(), copy.triples.begin(), copy.triples.end());
    } else {
      out.elements.push_back(std::move(copy));
    }
  }
  for (auto& f : filters) out.elements.push_back(std::move(f));
  return out;
}

struct Block {
  std::string path;
  const std::vector<TriplePattern>* patterns;
};

void collect_blocks(const GroupPattern& g, const std::string& path, std::vector<Block>& out) {
  for (std::size_t i = 0; i < g.elements.size(); ++i) {
    const auto& el = g.elements[i];
    const std::string here = path + "." + std::to_string(i);
    if (el.kind == PatternElement::Kind::Triples) out.push_back({here, &el.triples});
    for (std::size_t k = 0; k < el.groups.size(); ++k) collect_blocks(el.groups[k], here + ":" + std::to_string(k), out);
  }
}

std::string constant_text(const Term& t) {
  if (t.kind == TermKind::Iri) return t.resolved ? "<" + t.value + ">" : t.value;
  return t.value;
}

class Colouring {
 public:
  explicit Colouring(const std::vector<Block>& blocks) : blocks_(blocks) {
    for (const auto& b : blocks) {
      for (const auto& tp : *b.patterns) {
        for (const Term* t : {&tp.subject, &tp.predicate, &tp.object}) {
          if (t->is_variable()) colour_.emplace(t->value, 0);
        }
      }
    }
    std::size_t classes = 1;
    for (std::size_t round = 0; round <= colour_.size(); ++round) {
      const auto next = refine();
      if (next <= classes && round > 0) break;
      classes = next;
    }
  }

  std::string key_term(const Term& t) const {
    return t.is_variable() ? "?" + std::to_string(colour_.at(t.value)) : constant_text(t);
  }

 private:
  std::size_t refine() {
    static constexpr std::string_view kPos[] = {"s", "p", "o"};
    std::map<std::string, std::vector<std::string>> descriptors;
    for (const auto& b : blocks_) {
      for (const auto& tp : *b.patterns) {
        const Term* terms[] = {&tp.subject, &tp.predicate, &tp.object};
        for (int pos = 0; pos < 3; ++pos) {
          if (!terms[pos]->is_variable()) continue;
          const auto& self = terms[pos]->value;
          std::string d = b.path;
          d += '/';
          d += kPos[pos];
          for (const Term* t : terms) {
            d += ' ';
            if (t->is_variable()) d += t->value == self ? "*" : "?" + std::to_string(colour_.at(t->value));
            else d += constant_text(*t);
          }
          descriptors[self].push_back(std::move(d));
        }
      }
    }
    std::map<std::string, std::string> signature;
    std::set<std::string> distinct;
    for (auto& [var, ds] : descriptors) {
      std::sort(ds.begin(), ds.end());
      std::string sig = std::to_string(colour_.at(var));
      for (auto& d : ds) {
        sig += '\x1f';
        sig += d;
      }
      distinct.insert(sig);
      signature[var] = std::move(sig);
    }
    std::map<std::string, std::size_t> rank;
    for (const auto& s : distinct) rank.emplace(s, rank.size());
    for (auto& [var, sig] : signature) colour_[var] = rank.at(sig);
    return distinct.size();
  }

  const std::vector<Block>& blocks_;
  std::map<std::string, std::size_t> colour_;
};

class Renderer {
 public:
  Renderer(const ParsedQuery& q, const GroupPattern& where, const std::vector<Block>& blocks,
           const std::vector<std::vector<std::size_t>>& orders)
      : q_(q), where_(where), blocks_(blocks), orders_(orders) {}

  std::string render() {
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      for (auto i : orders_[b]) {
        const auto& tp = (*blocks_[b].patterns)[i];
        for (const Term* t : {&tp.subject, &tp.predicate, &tp.object}) {
          if (t->is_variable()) name(t->value);
        }
      }
    }
    if (q_.base) out_.push_back("BASE <" + *q_.base + ">");
    switch (q_.form) {
      case QueryForm::Select:
        out_.push_back("SELECT");
        if (q_.distinct) out_.push_back("DISTINCT");
        if (q_.reduced) out_.push_back("REDUCED");
        tokens(q_.projection);
        break;
      case QueryForm::Construct:
        out_.push_back("CONSTRUCT");
        out_.push_back("{");
        patterns(blocks_.size() - 1);
        out_.push_back("}");
        break;
      case QueryForm::Ask: out_.push_back("ASK"); break;
      case QueryForm::Describe:
        out_.push_back("DESCRIBE");
        tokens(q_.projection);
        break;
    }
    tokens(q_.dataset);
    if (q_.has_where) {
      out_.push_back("WHERE");
      group(where_);
    }
    tokens(q_.solution_modifiers);
    std::string text;
    for (const auto& part : out_) {
      if (!text.empty()) text += ' ';
      text += part;
    }
    return text;
  }

 private:
  std::string name(const std::string& var) {
    auto [it, fresh] = names_.try_emplace(var, "");
    if (fresh) it->second = "?v" + std::to_string(names_.size() - 1);
    return it->second;
  }

  std::string term(const Term& t) { return t.is_variable() ? name(t.value) : constant_text(t); }

  void tokens(const TokenSeq& seq) {
    for (const auto& t : seq) {
      switch (t.kind) {
        case TokenKind::IriRef: out_.push_back("<" + t.text + ">"); break;
        case TokenKind::Variable: out_.push_back(name(t.text)); break;
        case TokenKind::Identifier:
          out_.push_back(t.text == "a" || t.text == "true" || t.text == "false" ? t.text : to_upper(t.text));
          break;
        case TokenKind::End: break;
        default: out_.push_back(t.text); break;
      }
    }
  }

  void patterns(std::size_t block) {
    for (auto i : orders_[block]) {
      const auto& tp = (*blocks_[block].patterns)[i];
      out_.push_back(term(tp.subject));
      out_.push_back(term(tp.predicate));
      out_.push_back(term(tp.object));
      out_.push_back(".");
    }
  }

  void group(const GroupPattern& g) {
    out_.push_back("{");
    for (const auto& el : g.elements) {
      switch (el.kind) {
        case PatternElement::Kind::Triples: patterns(next_block_++); break;
        case PatternElement::Kind::Filter:
          out_.push_back("FILTER");
          tokens(el.tokens);
          break;
        case PatternElement::Kind::Bind:
          out_.push_back("BIND");
          tokens(el.tokens);
          break;
        case PatternElement::Kind::Optional:
          out_.push_back("OPTIONAL");
          group(el.groups.front());
          break;
        case PatternElement::Kind::Minus:
          out_.push_back("MINUS");
          group(el.groups.front());
          break;
        case PatternElement::Kind::Graph:
          out_.push_back("GRAPH");
          tokens(el.tokens);
          group(el.groups.front());
          break;
        case PatternElement::Kind::Union:
          for (std::size_t k = 0; k < el.groups.size(); ++k) {
            if (k > 0) out_.push_back("UNION");
            group(el.groups[k]);
          }
          break;
        case PatternElement::Kind::Group: group(el.groups.front()); break;
        case PatternElement::Kind::Opaque:
          tokens(el.tokens);
          if (!el.tokens.empty() && el.tokens.back().text != "}") out_.push_back(".");
          break;
      }
    }
    out_.push_back("}");
  }

  const ParsedQuery& q_;
  const GroupPattern& where_;
  const std::vector<Block>& blocks_;
  const std::vector<std::vector<std::size_t>>& orders_;
  std::size_t next_block_ = 0;
  std::map<std::string, std::string> names_;
  std::vector<std::string> out_;
};

struct TieClass {
  std::size_t block;
  std::size_t begin;
  std::size_t end;
};

}  // namespace

std::string canonicalize(const ParsedQuery& q) {
  const GroupPattern where = normalize_group(q.where);
  std::vector<Block> blocks;
  if (q.has_where) collect_blocks(where, "w", blocks);
  if (q.form == QueryForm::Construct) blocks.push_back({"t", &q.construct_template});

  const Colouring colours(blocks);
  std::vector<std::vector<std::size_t>> orders(blocks.size());
  std::vector<TieClass> ties;
  std::size_t combinations = 1;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& pats = *blocks[b].patterns;
    std::vector<std::array<std::string, 3>> keys;
    keys.reserve(pats.size());
    for (const auto& tp : pats) {
      keys.push_back({colours.key_term(tp.predicate), colours.key_term(tp.subject), colours.key_term(tp.object)});
    }
    auto& order = orders[b];
    order.resize(pats.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return keys[x] < keys[y]; });
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i + 1;
      while (j < order.size() && keys[order[j]] == keys[order[i]]) ++j;
      if (j - i > 1) {
        ties.push_back({b, i, j});
        for (std::size_t k = 2; k <= j - i && combinations <= kOrderingBudget; ++k) combinations *= k;
      }
      i = j;
    }
  }

  auto render = [&] { return Renderer(q, where, blocks, orders).render(); };
  if (ties.empty() || combinations > kOrderingBudget) return render();

  for (auto& t : ties) std::sort(orders[t.block].begin() + t.begin, orders[t.block].begin() + t.end);
  std::string best = render();
  // Odometer over the permutations of every tie class.
  while (true) {
    std::size_t k = 0;
    for (; k < ties.size(); ++k) {
      auto& ord = orders[ties[k].block];
      if (std::next_permutation(ord.begin() + ties[k].begin, ord.begin() + ties[k].end)) break;
    }
    if (k == ties.size()) break;
    best = std::min(best, render());
  }
  return best;
}

}  // namespace tcurator::sparql
