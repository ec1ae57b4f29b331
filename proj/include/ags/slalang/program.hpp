#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ags/bytes.hpp"
#include "ags/decimal.hpp"
#include "ags/error.hpp"

namespace ags::sla {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinaryOp { add, sub, mul, div };
enum class CompareOp { ge, le, gt, lt, eq, ne };
enum class Function { min, max, round };

struct Literal {
  Decimal value;
};

struct Identifier {
  std::string name;
};

struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

// Comparisons appear only as the test of a conditional.
struct Comparison {
  CompareOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Conditional {
  Comparison test;
  ExprPtr then_branch;
  ExprPtr else_branch;
};

// min(a, b), max(a, b) or round(a, places); `second` is null for round.
struct Call {
  Function fn;
  ExprPtr first;
  ExprPtr second;
  int places = 0;
};

struct Expr {
  std::variant<Literal, Identifier, Binary, Conditional, Call> node;
};

// Structural equality of trees.
bool operator==(const Expr& a, const Expr& b);

struct Param {
  std::string name;
  Decimal default_value;

  friend bool operator==(const Param&, const Param&) = default;
};

// Immutable after parsing; copies share the tree.
struct Program {
  std::vector<Param> params;
  std::vector<std::string> metrics;
  ExprPtr body;
  std::string source;
  Digest source_digest;  // sha256 of the UTF-8 source
};

// Same declarations and body, ignoring source text.
bool same_structure(const Program& a, const Program& b);

class ParseError : public Error {
 public:
  enum class Kind { lexical, syntax, undeclared, duplicate };

  ParseError(Kind kind, int line, int column, const std::string& message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  int line_;
  int column_;
};

//   program := decl* "payable" ":" expr
//   decl    := "param" IDENT "=" NUMBER | "metric" IDENT
//   expr    := "if" cmp "then" expr "else" expr | sum
//   cmp     := sum (">="|"<="|">"|"<"|"=="|"!=") sum
//   sum     := term (("+"|"-") term)*
//   term    := factor (("*"|"/") factor)*
//   factor  := NUMBER | IDENT | "(" expr ")"
//            | ("min"|"max") "(" expr "," expr ")" | "round" "(" expr "," INT ")"
// '#' starts a comment running to end of line. NUMBER carries an optional sign
// and at most 9 fractional digits.
Program parse(std::string_view source);

// Canonical rendering; parse(print(p)) is structurally equal to p.
std::string print(const Program& program);
std::string print(const Expr& expr);
std::string_view to_string(CompareOp op);

}  // namespace ags::sla
