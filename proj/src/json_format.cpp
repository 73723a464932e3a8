#include "json_format.hpp"

#include <cmath>
#include <cstdio>

namespace riskbench::detail {

std::string format_double(double value) {
    if (!std::isfinite(value)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    std::string out(buf);
    // Keep integral-valued doubles recognizable as floats when parsed back.
    if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
    return out;
}

namespace {

void dump(const nlohmann::ordered_json& v, int indent, int depth, std::string& out) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (v.type()) {
        case nlohmann::ordered_json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            out += nl;
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) {
                    out += ",";
                    out += nl;
                }
                first = false;
                out += pad;
                out += nlohmann::ordered_json(it.key()).dump();
                out += indent > 0 ? ": " : ":";
                dump(it.value(), indent, depth + 1, out);
            }
            out += nl;
            out += close_pad;
            out += "}";
            return;
        }
        case nlohmann::ordered_json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            out += nl;
            bool first = true;
            for (const auto& item : v) {
                if (!first) {
                    out += ",";
                    out += nl;
                }
                first = false;
                out += pad;
                dump(item, indent, depth + 1, out);
            }
            out += nl;
            out += close_pad;
            out += "]";
            return;
        }
        case nlohmann::ordered_json::value_t::number_float:
            out += format_double(v.get<double>());
            return;
        default:
            out += v.dump();
            return;
    }
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& value, int indent) {
    std::string out;
    dump(value, indent, 0, out);
    return out;
}

}  // namespace riskbench::detail
