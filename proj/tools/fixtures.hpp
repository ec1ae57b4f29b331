#pragma once

#include <json.hpp>

namespace ags::fixtures {

// Signature vectors for client implementations: key, canonical message
// bytes, digest, deterministic nonce and signature.
nlohmann::json sigvectors();

// Canonical byte layouts of reports, votes, observations, policies,
// envelopes, anchor blocks and payable statements, with their inputs.
nlohmann::json canonical_dumps();

}  // namespace ags::fixtures
