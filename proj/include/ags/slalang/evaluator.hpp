#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ags/bytes.hpp"
#include "ags/decimal.hpp"
#include "ags/slalang/program.hpp"

namespace ags::sla {

using ValueMap = std::map<std::string, Decimal>;

// One step of an evaluation; `label` is the canonical text of the subexpression.
// Conditions record a bool, everything else a Decimal. The final entry is
// labelled "payable" and holds the total.
struct TraceEntry {
  std::string label;
  std::variant<Decimal, bool> value;
};

struct LineItem {
  std::string label;
  Decimal amount;

  friend bool operator==(const LineItem&, const LineItem&) = default;
};

struct PayableStatement {
  std::vector<LineItem> line_items;
  Decimal total;
  Digest input_digest;    // over the effective metric and parameter values
  Digest program_digest;  // sha256 of the program source

  friend bool operator==(const PayableStatement&, const PayableStatement&) = default;
};

// Throws Error(evaluation) for a missing metric or an override naming an
// undeclared parameter, and Error(arithmetic) for division by zero or
// overflow. Metrics not declared by the program are ignored.
PayableStatement evaluate(const Program& program, const ValueMap& metrics, const ValueMap& overrides = {});
std::vector<TraceEntry> explain(const Program& program, const ValueMap& metrics, const ValueMap& overrides = {});

Digest input_digest(const Program& program, const ValueMap& metrics, const ValueMap& overrides = {});

Bytes canonical_bytes(const PayableStatement& statement);
Digest payable_digest(const PayableStatement& statement);
nlohmann::json to_json(const PayableStatement& statement);
PayableStatement payable_from_json(const nlohmann::json& j);

// 100 * (legacy - automated) / legacy, rounded half-even to 4 places.
// Throws Error(invalid) when legacy is zero.
Decimal overbilling_pct(const Decimal& legacy, const Decimal& automated);

}  // namespace ags::sla
