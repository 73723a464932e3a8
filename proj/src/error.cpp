#include "riskbench/error.hpp"

namespace riskbench {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::size: return "size";
        case ErrorKind::domain: return "domain";
        case ErrorKind::data: return "data";
        case ErrorKind::ingestion: return "ingestion";
        case ErrorKind::empty_tail: return "empty_tail";
        case ErrorKind::insufficient_tail: return "insufficient_tail";
        case ErrorKind::degenerate_fit: return "degenerate_fit";
        case ErrorKind::level_too_high: return "level_too_high";
        case ErrorKind::infinite_mean_tail: return "infinite_mean_tail";
        case ErrorKind::estimation: return "estimation";
        case ErrorKind::calibration_missing: return "calibration_missing";
        case ErrorKind::calibration_failure: return "calibration_failure";
        case ErrorKind::configuration: return "configuration";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

}  // namespace riskbench
