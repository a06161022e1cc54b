#pragma once

#include <json.hpp>

#include "paragraph/graph.hpp"

namespace paragraph {

inline constexpr int kGraphSchemaVersion = 1;

/// Deterministic serialization (see docs/paragraph-schema.md); edges are
/// emitted in (src, dst, type) order.
nlohmann::json paragraph_to_json(const ParaGraph& g);

/// Throws SchemaError on malformed input, including weight/type
/// violations (only Child edges may carry nonzero weight).
ParaGraph paragraph_from_json(const nlohmann::json& doc);

}  // namespace paragraph
