#include "tcurator/sparql/lexer.hpp"

#include <cctype>
#include <cstdint>

namespace tcurator::sparql {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_high(char c) { return static_cast<unsigned char>(c) >= 0x80; }
bool is_name_char(char c) { return is_alpha(c) || is_digit(c) || c == '_' || is_high(c); }
bool is_word_char(char c) { return is_name_char(c) || c == '-' || c == '.'; }
bool is_local_char(char c) { return is_word_char(c) || c == ':' || c == '%'; }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::string quote(std::string_view content) {
  std::string out = "\"";
  for (char c : content) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  LexResult run() {
    while (true) {
      skip_trivia();
      if (pos_ >= text_.size()) break;
      lex_one();
    }
    result_.tokens.push_back(Token{TokenKind::End, "", text_.size(), 0});
    return std::move(result_);
  }

 private:
  char at(std::size_t i) const { return i < text_.size() ? text_[i] : '\0'; }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      if (is_space(text_[pos_])) {
        ++pos_;
      } else if (text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void push(TokenKind kind, std::string text, std::size_t start) {
    result_.tokens.push_back(Token{kind, std::move(text), start, pos_ - start});
  }

  void issue(std::string rule, std::size_t position, std::string message) {
    result_.issues.push_back(SyntaxIssue{std::move(rule), position, std::move(message)});
  }

  void lex_one() {
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (c == '<') return lex_angle(start);
    if (c == '"' || c == '\'') return lex_string(start);
    if ((c == '?' || c == '$') && is_name_char(at(pos_ + 1))) {
      ++pos_;
      while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
      return push(TokenKind::Variable, std::string(text_.substr(start + 1, pos_ - start - 1)), start);
    }
    if (c == '_' && at(pos_ + 1) == ':') {
      pos_ += 2;
      while (pos_ < text_.size() && is_word_char(text_[pos_])) ++pos_;
      while (pos_ > start + 2 && text_[pos_ - 1] == '.') --pos_;
      return push(TokenKind::BlankNode, std::string(text_.substr(start, pos_ - start)), start);
    }
    if (c == '@' && is_alpha(at(pos_ + 1))) {
      ++pos_;
      while (pos_ < text_.size() && (is_alpha(text_[pos_]) || is_digit(text_[pos_]) || text_[pos_] == '-')) ++pos_;
      std::string tag(text_.substr(start, pos_ - start));
      for (auto& ch : tag) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      return push(TokenKind::LangTag, std::move(tag), start);
    }
    if (is_digit(c) || (c == '.' && is_digit(at(pos_ + 1)))) return lex_number(start);
    if (is_alpha(c) || is_high(c) || c == ':' || (c == '_' && is_name_char(at(pos_ + 1)))) return lex_word(start);
    lex_punct(start);
  }

  void lex_angle(std::size_t start) {
    std::size_t j = pos_ + 1;
    auto iri_char = [](char ch) {
      return !is_space(ch) && ch != '<' && ch != '>' && ch != '"' && ch != '{' && ch != '}' && ch != '|' &&
             ch != '^' && ch != '`' && ch != '\\';
    };
    while (j < text_.size() && iri_char(text_[j])) ++j;
    if (j < text_.size() && text_[j] == '>') {
      pos_ = j + 1;
      return push(TokenKind::IriRef, std::string(text_.substr(start + 1, j - start - 1)), start);
    }
    // `<scheme:` without a closing '>' is a broken IRI, anything else is a comparison.
    std::size_t k = pos_ + 1;
    if (is_alpha(at(k))) {
      while (k < j && (is_alpha(text_[k]) || is_digit(text_[k]) || text_[k] == '+' || text_[k] == '-' ||
                       text_[k] == '.')) {
        ++k;
      }
      if (k < j && text_[k] == ':') {
        issue("UnterminatedIri", start, "IRI is missing its closing '>'");
        pos_ = j;
        return push(TokenKind::IriRef, std::string(text_.substr(start + 1, j - start - 1)), start);
      }
    }
    if (at(pos_ + 1) == '=') {
      pos_ += 2;
      return push(TokenKind::Punct, "<=", start);
    }
    ++pos_;
    push(TokenKind::Punct, "<", start);
  }

  void lex_string(std::size_t start) {
    const char q = text_[pos_];
    const bool long_form = at(pos_ + 1) == q && at(pos_ + 2) == q;
    pos_ += long_form ? 3 : 1;
    std::string content;
    while (true) {
      if (pos_ >= text_.size() || (!long_form && (text_[pos_] == '\n' || text_[pos_] == '\r'))) {
        issue("UnterminatedString", start, "string literal is not closed");
        return push(TokenKind::String, quote(content), start);
      }
      const char ch = text_[pos_];
      if (ch == '\\') {
        const char e = at(pos_ + 1);
        pos_ += 2;
        switch (e) {
          case 't': content += '\t'; break;
          case 'n': content += '\n'; break;
          case 'r': content += '\r'; break;
          case 'b': content += '\b'; break;
          case 'f': content += '\f'; break;
          case '"': content += '"'; break;
          case '\'': content += '\''; break;
          case '\\': content += '\\'; break;
          case 'u':
          case 'U': {
            const std::size_t width = e == 'u' ? 4 : 8;
            std::uint32_t cp = 0;
            bool ok = pos_ + width <= text_.size();
            for (std::size_t i = 0; ok && i < width; ++i) {
              const char h = text_[pos_ + i];
              cp <<= 4;
              if (is_digit(h)) cp |= static_cast<std::uint32_t>(h - '0');
              else if (h >= 'a' && h <= 'f') cp |= static_cast<std::uint32_t>(h - 'a' + 10);
              else if (h >= 'A' && h <= 'F') cp |= static_cast<std::uint32_t>(h - 'A' + 10);
              else ok = false;
            }
            if (ok && cp <= 0x10FFFF) {
              append_utf8(content, cp);
              pos_ += width;
            } else {
              issue("InvalidEscape", pos_ - 2, "malformed unicode escape");
            }
            break;
          }
          default: issue("InvalidEscape", pos_ - 2, "unknown escape sequence"); break;
        }
        continue;
      }
      if (ch == q) {
        if (!long_form) {
          ++pos_;
          return push(TokenKind::String, quote(content), start);
        }
        if (at(pos_ + 1) == q && at(pos_ + 2) == q) {
          pos_ += 3;
          // """a""""" : extra quotes before the terminator belong to the content
          while (at(pos_) == q) {
            content += q;
            ++pos_;
          }
          return push(TokenKind::String, quote(content), start);
        }
      }
      content += ch;
      ++pos_;
    }
  }

  void lex_number(std::size_t start) {
    while (is_digit(at(pos_))) ++pos_;
    if (at(pos_) == '.' && is_digit(at(pos_ + 1))) {
      ++pos_;
      while (is_digit(at(pos_))) ++pos_;
    }
    if ((at(pos_) == 'e' || at(pos_) == 'E') &&
        (is_digit(at(pos_ + 1)) || ((at(pos_ + 1) == '+' || at(pos_ + 1) == '-') && is_digit(at(pos_ + 2))))) {
      pos_ += 2;
      while (is_digit(at(pos_))) ++pos_;
    }
    push(TokenKind::Number, std::string(text_.substr(start, pos_ - start)), start);
  }

  void lex_word(std::size_t start) {
    while (pos_ < text_.size() && is_word_char(text_[pos_])) ++pos_;
    while (pos_ > start && text_[pos_ - 1] == '.') --pos_;
    if (at(pos_) == ':') {
      ++pos_;
      while (pos_ < text_.size()) {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
          pos_ += 2;
        } else if (is_local_char(text_[pos_])) {
          ++pos_;
        } else {
          break;
        }
      }
      while (text_[pos_ - 1] == '.' && pos_ - 1 > start) --pos_;
      return push(TokenKind::PrefixedName, std::string(text_.substr(start, pos_ - start)), start);
    }
    if (pos_ == start) {
      // lone high byte sequence or similar
      ++pos_;
      issue("UnexpectedCharacter", start, "unexpected character");
      return;
    }
    push(TokenKind::Identifier, std::string(text_.substr(start, pos_ - start)), start);
  }

  void lex_punct(std::size_t start) {
    const char c = text_[pos_];
    const char n = at(pos_ + 1);
    auto two = [&](const char* op) {
      pos_ += 2;
      push(TokenKind::Punct, op, start);
    };
    if (c == '^' && n == '^') return two("^^");
    if (c == '!' && n == '=') return two("!=");
    if (c == '>' && n == '=') return two(">=");
    if (c == '&' && n == '&') return two("&&");
    if (c == '|' && n == '|') return two("||");
    static constexpr std::string_view kSingles = "{}()[].,;*=+-/|!^>?";
    if (kSingles.find(c) != std::string_view::npos) {
      ++pos_;
      return push(TokenKind::Punct, std::string(1, c), start);
    }
    ++pos_;
    while (pos_ < text_.size() && (static_cast<unsigned char>(text_[pos_]) & 0xC0) == 0x80) ++pos_;
    issue("UnexpectedCharacter", start, std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  LexResult result_;
};

}  // namespace

LexResult tokenize(std::string_view text) { return Lexer(text).run(); }

bool iequals(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(a[i])) != std::toupper(static_cast<unsigned char>(b[i]))) return false;
  }
  return true;
}

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::optional<QueryForm> detect_query_form(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (is_space(c)) {
      ++pos;
      continue;
    }
    if (c == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
      continue;
    }
    if (!is_alpha(c)) return std::nullopt;
    const std::size_t start = pos;
    while (pos < text.size() && is_alpha(text[pos])) ++pos;
    const auto word = text.substr(start, pos - start);
    if (iequals(word, "PREFIX") || iequals(word, "BASE")) {
      const auto close = text.find('>', pos);
      if (close == std::string_view::npos) return std::nullopt;
      pos = close + 1;
      continue;
    }
    return parse_query_form(word);
  }
  return std::nullopt;
}

}  // namespace tcurator::sparql
