#pragma once

#include <stdexcept>
#include <string>

namespace nmp {

enum class ErrorCode {
    invalid_mode,
    invalid_argument,
    configuration,
    no_path,
    stale_snapshot,
    invalid_path,
    mode_mismatch,
    floor_violation,
    validation,
    empty_trace,
    io,
};

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace nmp
