#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace riskbench {

enum class ErrorKind {
    size,                 // sample or series too short
    domain,               // argument outside its mathematical domain
    data,                 // non-finite or degenerate input data
    ingestion,            // CSV parse / sentinel / missing column
    empty_tail,           // empirical ES with no strict exceedances
    insufficient_tail,    // fewer than 5 observations below the GPD threshold
    degenerate_fit,       // PWM denominator not positive
    level_too_high,       // GPD tail formula used above the threshold mass
    infinite_mean_tail,   // GPD shape >= 1
    estimation,           // likelihood search failed
    calibration_missing,  // no (n, alpha) entry and on-demand calibration off
    calibration_failure,  // root bracket not found
    configuration,        // unknown method tag or inconsistent config
    io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace riskbench
