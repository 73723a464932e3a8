#pragma once

#include <string>

#include <json.hpp>

namespace riskbench::detail {

/// Formats a double with 17 significant digits (exact round trip).
std::string format_double(double value);

/// Serializes JSON with fixed 17-significant-digit floats and insertion key order.
std::string dump_json(const nlohmann::ordered_json& value, int indent = 2);

}  // namespace riskbench::detail
