#include "ags/slalang/evaluator.hpp"

#include "ags/codec/report.hpp"
#include "ags/crypto/hash.hpp"
#include "ags/error.hpp"

namespace ags::sla {

namespace {

// Effective values: declared metrics from `metrics`, params from defaults
// with overrides applied.
ValueMap bind(const Program& program, const ValueMap& metrics, const ValueMap& overrides) {
  ValueMap env;
  for (const auto& [name, value] : overrides) {
    bool known = false;
    for (const auto& p : program.params) known = known || p.name == name;
    if (!known) throw Error(ErrorCode::evaluation, "override for undeclared parameter " + name);
  }
  for (const auto& p : program.params) {
    auto it = overrides.find(p.name);
    env[p.name] = it == overrides.end() ? p.default_value : it->second;
  }
  for (const auto& m : program.metrics) {
    auto it = metrics.find(m);
    if (it == metrics.end()) throw Error(ErrorCode::evaluation, "missing metric " + m);
    env[m] = it->second;
  }
  return env;
}

class Evaluator {
 public:
  Evaluator(const ValueMap& env, std::vector<TraceEntry>* trace) : env_(env), trace_(trace) {}

  Decimal eval(const Expr& e) {
    if (const auto* lit = std::get_if<Literal>(&e.node)) return lit->value;
    if (const auto* id = std::get_if<Identifier>(&e.node)) return env_.at(id->name);
    if (const auto* b = std::get_if<Binary>(&e.node)) {
      const Decimal l = eval(*b->lhs);
      const Decimal r = eval(*b->rhs);
      Decimal v;
      switch (b->op) {
        case BinaryOp::add: v = l + r; break;
        case BinaryOp::sub: v = l - r; break;
        case BinaryOp::mul: v = l * r; break;
        case BinaryOp::div: v = Decimal::divide(l, r); break;
      }
      record(e, v);
      return v;
    }
    if (const auto* c = std::get_if<Conditional>(&e.node)) {
      const bool taken = test(c->test);
      if (trace_) trace_->push_back({print(*c->test.lhs) + " " + std::string(to_string(c->test.op)) + " " +
                                         print(*c->test.rhs),
                                     taken});
      return eval(taken ? *c->then_branch : *c->else_branch);
    }
    const auto& call = std::get<Call>(e.node);
    const Decimal a = eval(*call.first);
    Decimal v;
    switch (call.fn) {
      case Function::min: v = std::min(a, eval(*call.second)); break;
      case Function::max: v = std::max(a, eval(*call.second)); break;
      case Function::round: v = a.round(call.places); break;
    }
    record(e, v);
    return v;
  }

 private:
  bool test(const Comparison& c) {
    const Decimal l = eval(*c.lhs);
    const Decimal r = eval(*c.rhs);
    switch (c.op) {
      case CompareOp::ge: return l >= r;
      case CompareOp::le: return l <= r;
      case CompareOp::gt: return l > r;
      case CompareOp::lt: return l < r;
      case CompareOp::eq: return l == r;
      case CompareOp::ne: return l != r;
    }
    return false;
  }

  void record(const Expr& e, const Decimal& v) {
    if (trace_) trace_->push_back({print(e), v});
  }

  const ValueMap& env_;
  std::vector<TraceEntry>* trace_;
};

}  // namespace

Digest input_digest(const Program& program, const ValueMap& metrics, const ValueMap& overrides) {
  const ValueMap env = bind(program, metrics, overrides);
  Bytes buf;
  append_be32(buf, static_cast<std::uint32_t>(env.size()));
  for (const auto& [name, value] : env) {
    append_be32(buf, static_cast<std::uint32_t>(name.size()));
    append(buf, as_bytes(name));
    codec::append_decimal(buf, value);
  }
  return crypto::sha256(buf);
}

std::vector<TraceEntry> explain(const Program& program, const ValueMap& metrics, const ValueMap& overrides) {
  const ValueMap env = bind(program, metrics, overrides);
  std::vector<TraceEntry> trace;
  const Decimal total = Evaluator(env, &trace).eval(*program.body);
  trace.push_back({"payable", total});
  return trace;
}

PayableStatement evaluate(const Program& program, const ValueMap& metrics, const ValueMap& overrides) {
  PayableStatement st;
  for (auto& entry : explain(program, metrics, overrides)) {
    if (const auto* d = std::get_if<Decimal>(&entry.value)) {
      if (entry.label == "payable") {
        st.total = *d;
      } else {
        st.line_items.push_back({std::move(entry.label), *d});
      }
    }
  }
  st.input_digest = input_digest(program, metrics, overrides);
  st.program_digest = program.source_digest;
  return st;
}

Bytes canonical_bytes(const PayableStatement& st) {
  Bytes out;
  append(out, st.program_digest.view());
  append(out, st.input_digest.view());
  append_be32(out, static_cast<std::uint32_t>(st.line_items.size()));
  for (const auto& item : st.line_items) {
    append_be32(out, static_cast<std::uint32_t>(item.label.size()));
    append(out, as_bytes(item.label));
    codec::append_decimal(out, item.amount);
  }
  codec::append_decimal(out, st.total);
  return out;
}

Digest payable_digest(const PayableStatement& st) { return crypto::sha256(canonical_bytes(st)); }

nlohmann::json to_json(const PayableStatement& st) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : st.line_items) items.push_back({{"label", item.label}, {"amount", item.amount.to_string()}});
  return {{"line_items", items},
          {"total", st.total.to_string()},
          {"input_digest", st.input_digest.hex()},
          {"program_digest", st.program_digest.hex()}};
}

PayableStatement payable_from_json(const nlohmann::json& j) {
  try {
    PayableStatement st;
    for (const auto& item : j.at("line_items"))
      st.line_items.push_back({item.at("label").get<std::string>(), codec::decimal_from_json(item.at("amount"))});
    st.total = codec::decimal_from_json(j.at("total"));
    st.input_digest = Digest::from_hex(j.at("input_digest").get<std::string>());
    st.program_digest = Digest::from_hex(j.at("program_digest").get<std::string>());
    return st;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid, std::string("malformed payable statement: ") + e.what());
  }
}

Decimal overbilling_pct(const Decimal& legacy, const Decimal& automated) {
  if (legacy.is_zero()) throw Error(ErrorCode::invalid, "legacy amount must be nonzero");
  return Decimal::divide((legacy - automated) * Decimal(100), legacy, 4);
}

}  // namespace ags::sla
