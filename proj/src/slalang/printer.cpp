#include "ags/slalang/program.hpp"

namespace ags::sla {

namespace {

// Binding levels: 0 conditional, 1 sum, 2 term, 3 factor.
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void emit(std::string& out, const Expr& e, int min_level) {
  std::visit(overloaded{
                 [&](const Literal& lit) { out += lit.value.to_string(); },
                 [&](const Identifier& id) { out += id.name; },
                 [&](const Binary& b) {
                   const bool additive = b.op == BinaryOp::add || b.op == BinaryOp::sub;
                   const int level = additive ? 1 : 2;
                   const bool parens = min_level > level;
                   if (parens) out += '(';
                   emit(out, *b.lhs, level);
                   static const char* kSym[] = {" + ", " - ", " * ", " / "};
                   out += kSym[static_cast<int>(b.op)];
                   emit(out, *b.rhs, level + 1);
                   if (parens) out += ')';
                 },
                 [&](const Conditional& c) {
                   const bool parens = min_level > 0;
                   if (parens) out += '(';
                   out += "if ";
                   emit(out, *c.test.lhs, 1);
                   out += ' ';
                   out += to_string(c.test.op);
                   out += ' ';
                   emit(out, *c.test.rhs, 1);
                   out += " then ";
                   emit(out, *c.then_branch, 0);
                   out += " else ";
                   emit(out, *c.else_branch, 0);
                   if (parens) out += ')';
                 },
                 [&](const Call& call) {
                   static const char* kName[] = {"min(", "max(", "round("};
                   out += kName[static_cast<int>(call.fn)];
                   emit(out, *call.first, 0);
                   out += ", ";
                   if (call.fn == Function::round) {
                     out += std::to_string(call.places);
                   } else {
                     emit(out, *call.second, 0);
                   }
                   out += ')';
                 },
             },
             e.node);
}

}  // namespace

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::ge: return ">=";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::lt: return "<";
    case CompareOp::eq: return "==";
    case CompareOp::ne: return "!=";
  }
  return "?";
}

std::string print(const Expr& expr) {
  std::string out;
  emit(out, expr, 0);
  return out;
}

std::string print(const Program& program) {
  std::string out;
  for (const auto& p : program.params) out += "param " + p.name + " = " + p.default_value.to_string() + "\n";
  for (const auto& m : program.metrics) out += "metric " + m + "\n";
  out += "payable: " + print(*program.body) + "\n";
  return out;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  auto eq = [](const ExprPtr& x, const ExprPtr& y) {
    if (!x || !y) return !x && !y;
    return *x == *y;
  };
  return std::visit(
      overloaded{
          [&](const Literal& x) { return x.value == std::get<Literal>(b.node).value; },
          [&](const Identifier& x) { return x.name == std::get<Identifier>(b.node).name; },
          [&](const Binary& x) {
            const auto& y = std::get<Binary>(b.node);
            return x.op == y.op && eq(x.lhs, y.lhs) && eq(x.rhs, y.rhs);
          },
          [&](const Conditional& x) {
            const auto& y = std::get<Conditional>(b.node);
            return x.test.op == y.test.op && eq(x.test.lhs, y.test.lhs) && eq(x.test.rhs, y.test.rhs) &&
                   eq(x.then_branch, y.then_branch) && eq(x.else_branch, y.else_branch);
          },
          [&](const Call& x) {
            const auto& y = std::get<Call>(b.node);
            return x.fn == y.fn && x.places == y.places && eq(x.first, y.first) && eq(x.second, y.second);
          },
      },
      a.node);
}

bool same_structure(const Program& a, const Program& b) {
  return a.params == b.params && a.metrics == b.metrics && a.body && b.body && *a.body == *b.body;
}

}  // namespace ags::sla
