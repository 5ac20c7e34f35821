#include "stlfd/stl/parser.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>

namespace stlfd::stl {

namespace {

std::string describe(std::string message, int line, int column,
                     const std::vector<std::string>& expected) {
  std::ostringstream os;
  os << line << ':' << column << ": " << message;
  if (!expected.empty()) {
    os << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) os << (i + 1 == expected.size() ? " or " : ", ");
      os << expected[i];
    }
    os << ')';
  }
  return os.str();
}

enum class Tok {
  Ident, Number, LParen, RParen, LBracket, RBracket, Comma,
  Gt, Ge, Lt, Le, EqEq, Arrow, Minus, End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          advance();
        }
        t.kind = Tok::Ident;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
          advance();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
          advance();
          if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            advance();
          }
        }
        t.kind = Tok::Number;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else {
        auto two = src_.substr(pos_, 2);
        if (two == ">=") t.kind = Tok::Ge;
        else if (two == "<=") t.kind = Tok::Le;
        else if (two == "==") t.kind = Tok::EqEq;
        else if (two == "->") t.kind = Tok::Arrow;
        if (t.kind != Tok::End) {
          t.text = std::string(two);
          advance();
          advance();
        } else {
          switch (c) {
            case '(': t.kind = Tok::LParen; break;
            case ')': t.kind = Tok::RParen; break;
            case '[': t.kind = Tok::LBracket; break;
            case ']': t.kind = Tok::RBracket; break;
            case ',': t.kind = Tok::Comma; break;
            case '>': t.kind = Tok::Gt; break;
            case '<': t.kind = Tok::Lt; break;
            case '-': t.kind = Tok::Minus; break;
            default:
              throw ParseError(std::string("unexpected character '") + c + "'", line_, col_, {});
          }
          t.text = std::string(1, c);
          advance();
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_keyword(const Token& t, std::string_view word) {
  return t.kind == Tok::Ident && t.text == word;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Formula run() {
    Formula f = implies();
    if (peek().kind != Tok::End) {
      if (peek().kind == Tok::Ident && !is_keyword(peek(), "and") && !is_keyword(peek(), "or")) {
        fail("unknown operator '" + peek().text + "'", {"'and'", "'or'", "'->'", "'U'", "end of input"});
      }
      fail("unexpected '" + peek().text + "'", {"'and'", "'or'", "'->'", "'U'", "end of input"});
    }
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  Token take() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void fail(std::string message, std::vector<std::string> expected) const {
    const Token& t = peek();
    throw ParseError(std::move(message), t.line, t.column, std::move(expected));
  }
  void expect(Tok kind, std::string_view what) {
    if (peek().kind != kind) {
      std::string got = peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
      fail("unexpected " + got, {std::string(what)});
    }
    take();
  }

  bool at_temporal(std::string_view word) const {
    return is_keyword(peek(), word) && peek(1).kind == Tok::LBracket;
  }

  Formula implies() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::Arrow) {
      take();
      return Formula::implication(std::move(lhs), implies());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (is_keyword(peek(), "or")) {
      take();
      lhs = Formula::disjunction(std::move(lhs), conjunction());
    }
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = until();
    while (is_keyword(peek(), "and")) {
      take();
      lhs = Formula::conjunction(std::move(lhs), until());
    }
    return lhs;
  }

  Formula until() {
    Formula lhs = unary();
    while (at_temporal("U")) {
      take();
      Interval w = window();
      lhs = Formula::until(std::move(w), std::move(lhs), unary());
    }
    return lhs;
  }

  Formula unary() {
    const Token& t = peek();
    if (is_keyword(t, "not")) {
      take();
      return Formula::negation(unary());
    }
    if (at_temporal("G") || at_temporal("F")) {
      bool always = take().text == "G";
      Interval w = window();
      expect(Tok::LParen, "'('");
      Formula body = implies();
      expect(Tok::RParen, "')'");
      return always ? Formula::always(std::move(w), std::move(body))
                    : Formula::eventually(std::move(w), std::move(body));
    }
    if (t.kind == Tok::LParen) {
      take();
      Formula inner = implies();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (t.kind == Tok::Ident) {
      if (peek(1).kind == Tok::LBracket) fail("unknown operator '" + t.text + "'", {"'G'", "'F'"});
      if (t.text == "and" || t.text == "or" || t.text == "U") {
        fail("unexpected '" + t.text + "'", {"formula"});
      }
      return predicate();
    }
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    fail("unexpected " + got, {"'not'", "'G'", "'F'", "'('", "identifier"});
  }

  Formula predicate() {
    Token name = take();
    Comparator cmp;
    switch (peek().kind) {
      case Tok::Gt: cmp = Comparator::Greater; break;
      case Tok::Ge: cmp = Comparator::GreaterEq; break;
      case Tok::Lt: cmp = Comparator::Less; break;
      case Tok::Le: cmp = Comparator::LessEq; break;
      case Tok::EqEq: cmp = Comparator::Equal; break;
      default: {
        std::string got = peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
        fail("unexpected " + got + " after channel '" + name.text + "'",
             {"'>'", "'>='", "'<'", "'<='", "'=='"});
      }
    }
    take();
    return Formula::predicate(name.text, cmp, value());
  }

  Bound value() {
    bool negative = false;
    if (peek().kind == Tok::Minus) {
      take();
      negative = true;
    }
    if (peek().kind == Tok::Ident && !negative) return Bound::named(take().text);
    if (peek().kind != Tok::Number) fail("expected a number", {"number", "parameter name"});
    const Token& t = peek();
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      fail("malformed number '" + t.text + "'", {"number"});
    }
    take();
    return Bound::literal(negative ? -v : v);
  }

  Bound window_bound() {
    const Token& t = peek();
    if (t.kind == Tok::Ident) return Bound::named(take().text);
    if (t.kind == Tok::Number) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
        fail("interval bounds must be non-negative integers", {"integer"});
      }
      take();
      return Bound::literal(v);
    }
    fail("interval bounds must be non-negative integers", {"integer", "parameter name"});
  }

  Interval window() {
    const Token& open = peek();
    int line = open.line;
    int column = open.column;
    expect(Tok::LBracket, "'['");
    Interval w;
    w.lo = window_bound();
    expect(Tok::Comma, "','");
    w.hi = window_bound();
    expect(Tok::RBracket, "']'");
    if (w.lo.is_literal() && w.hi.is_literal() && w.hi.value < w.lo.value) {
      throw ParseError("interval upper bound below lower bound", line, column, {});
    }
    return w;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseError::ParseError(std::string message, int line, int column, std::vector<std::string> expected)
    : ValidationError(describe(std::move(message), line, column, expected)),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

Formula parse_formula(std::string_view text) {
  return Parser(Lexer(text).run()).run();
}

}  // namespace stlfd::stl
