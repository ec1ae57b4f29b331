#include <set>

#include "ags/crypto/hash.hpp"
#include "ags/slalang/program.hpp"

namespace ags::sla {

ParseError::ParseError(Kind kind, int line, int column, const std::string& message)
    : Error(ErrorCode::invalid, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      kind_(kind),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { number, ident, keyword, symbol, end };

struct Token {
  Tok type;
  std::string text;
  int line;
  int column;
};

bool is_keyword(std::string_view word) {
  static const std::set<std::string_view> kKeywords = {"param", "metric", "payable", "if",   "then",
                                                       "else",  "min",    "max",     "round"};
  return kKeywords.count(word) > 0;
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };

  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const int tl = line, tc = col;
    if (is_digit(c)) {
      std::size_t j = i;
      while (j < src.size() && is_digit(src[j])) ++j;
      if (j < src.size() && src[j] == '.') {
        const std::size_t frac_start = ++j;
        while (j < src.size() && is_digit(src[j])) ++j;
        if (j == frac_start) throw ParseError(ParseError::Kind::lexical, tl, tc, "number has no fractional digits");
        if (j - frac_start > 9) throw ParseError(ParseError::Kind::lexical, tl, tc, "number has more than 9 fractional digits");
      }
      if (j < src.size() && is_alpha(src[j])) throw ParseError(ParseError::Kind::lexical, tl, tc, "malformed number");
      out.push_back({Tok::number, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (is_alpha(c)) {
      std::size_t j = i;
      while (j < src.size() && (is_alpha(src[j]) || is_digit(src[j]))) ++j;
      std::string word(src.substr(i, j - i));
      out.push_back({is_keyword(word) ? Tok::keyword : Tok::ident, std::move(word), tl, tc});
      advance(j - i);
      continue;
    }
    static const char* kTwoChar[] = {">=", "<=", "==", "!="};
    bool matched = false;
    for (const char* sym : kTwoChar) {
      if (src.substr(i, 2) == sym) {
        out.push_back({Tok::symbol, sym, tl, tc});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("()+-*/:,=<>").find(c) != std::string_view::npos) {
      out.push_back({Tok::symbol, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    throw ParseError(ParseError::Kind::lexical, tl, tc, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::end, "", line, col});
  return out;
}

ExprPtr make(auto node) { return std::make_shared<const Expr>(Expr{std::move(node)}); }

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program program() {
    Program prog;
    std::set<std::string> declared;
    auto declare = [&](const Token& name) {
      if (!declared.insert(name.text).second)
        throw ParseError(ParseError::Kind::duplicate, name.line, name.column, "duplicate declaration of " + name.text);
    };
    while (peek_keyword("param") || peek_keyword("metric")) {
      if (take_keyword("param")) {
        const Token name = expect(Tok::ident, "parameter name");
        declare(name);
        expect_symbol("=");
        prog.params.push_back({name.text, signed_number()});
      } else {
        take_keyword("metric");
        const Token name = expect(Tok::ident, "metric name");
        declare(name);
        prog.metrics.push_back(name.text);
      }
    }
    if (!take_keyword("payable")) fail("expected 'param', 'metric' or 'payable'");
    expect_symbol(":");
    prog.body = expr();
    if (cur().type != Tok::end) fail("unexpected trailing input '" + cur().text + "'");
    check_declared(*prog.body, declared);
    return prog;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(ParseError::Kind::syntax, cur().line, cur().column, msg);
  }

  bool peek_keyword(std::string_view kw) const { return cur().type == Tok::keyword && cur().text == kw; }
  bool peek_symbol(std::string_view s) const { return cur().type == Tok::symbol && cur().text == s; }

  bool take_keyword(std::string_view kw) {
    if (!peek_keyword(kw)) return false;
    ++pos_;
    return true;
  }
  bool take_symbol(std::string_view s) {
    if (!peek_symbol(s)) return false;
    ++pos_;
    return true;
  }

  Token expect(Tok type, const std::string& what) {
    if (cur().type != type) fail("expected " + what);
    return toks_[pos_++];
  }
  void expect_symbol(std::string_view s) {
    if (!take_symbol(s)) fail("expected '" + std::string(s) + "'");
  }
  void expect_keyword(std::string_view kw) {
    if (!take_keyword(kw)) fail("expected '" + std::string(kw) + "'");
  }

  // NUMBER with its optional sign.
  Decimal signed_number() {
    bool neg = false;
    if (peek_symbol("-") || peek_symbol("+")) {
      neg = cur().text == "-";
      ++pos_;
    }
    const Token num = expect(Tok::number, "number");
    const Decimal value = Decimal::parse(num.text);
    return neg ? -value : value;
  }

  ExprPtr expr() {
    if (take_keyword("if")) {
      Comparison test = comparison();
      expect_keyword("then");
      ExprPtr then_branch = expr();
      expect_keyword("else");
      ExprPtr else_branch = expr();
      return make(Conditional{std::move(test), std::move(then_branch), std::move(else_branch)});
    }
    return sum();
  }

  Comparison comparison() {
    ExprPtr lhs = sum();
    static const std::pair<const char*, CompareOp> kOps[] = {{">=", CompareOp::ge}, {"<=", CompareOp::le},
                                                             {">", CompareOp::gt},  {"<", CompareOp::lt},
                                                             {"==", CompareOp::eq}, {"!=", CompareOp::ne}};
    for (const auto& [sym, op] : kOps) {
      if (take_symbol(sym)) return {op, std::move(lhs), sum()};
    }
    fail("expected a comparison operator");
  }

  ExprPtr sum() {
    ExprPtr lhs = term();
    while (peek_symbol("+") || peek_symbol("-")) {
      const BinaryOp op = toks_[pos_++].text == "+" ? BinaryOp::add : BinaryOp::sub;
      lhs = make(Binary{op, std::move(lhs), term()});
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = factor();
    while (peek_symbol("*") || peek_symbol("/")) {
      const BinaryOp op = toks_[pos_++].text == "*" ? BinaryOp::mul : BinaryOp::div;
      lhs = make(Binary{op, std::move(lhs), factor()});
    }
    return lhs;
  }

  ExprPtr factor() {
    if (cur().type == Tok::number || ((peek_symbol("-") || peek_symbol("+")) && toks_[pos_ + 1].type == Tok::number))
      return make(Literal{signed_number()});
    if (cur().type == Tok::ident) {
      ident_positions_.push_back(pos_);
      return make(Identifier{toks_[pos_++].text});
    }
    if (take_symbol("(")) {
      ExprPtr inner = expr();
      expect_symbol(")");
      return inner;
    }
    if (peek_keyword("min") || peek_keyword("max")) {
      const Function fn = toks_[pos_++].text == "min" ? Function::min : Function::max;
      expect_symbol("(");
      ExprPtr a = expr();
      expect_symbol(",");
      ExprPtr b = expr();
      expect_symbol(")");
      return make(Call{fn, std::move(a), std::move(b), 0});
    }
    if (take_keyword("round")) {
      expect_symbol("(");
      ExprPtr a = expr();
      expect_symbol(",");
      const Token places = expect(Tok::number, "integer places");
      if (places.text.find('.') != std::string::npos || places.text.size() > 1)
        throw ParseError(ParseError::Kind::syntax, places.line, places.column, "round places must be an integer 0..9");
      expect_symbol(")");
      return make(Call{Function::round, std::move(a), nullptr, places.text[0] - '0'});
    }
    fail(cur().type == Tok::end ? "unexpected end of input" : "unexpected '" + cur().text + "'");
  }

  void check_declared(const Expr&, const std::set<std::string>& declared) const {
    for (std::size_t idx : ident_positions_) {
      const Token& t = toks_[idx];
      if (!declared.count(t.text))
        throw ParseError(ParseError::Kind::undeclared, t.line, t.column, "undeclared identifier " + t.text);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::size_t> ident_positions_;
};

}  // namespace

Program parse(std::string_view source) {
  Program prog = Parser(lex(source)).program();
  prog.source = std::string(source);
  prog.source_digest = crypto::sha256(source);
  return prog;
}

}  // namespace ags::sla
