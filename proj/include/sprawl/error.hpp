// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace sprawl {

enum class ErrorCode {
    InvalidInput,
    InvalidState,
    Io,
    Parse,
};

/// Library exception. The C API maps `code()` onto its status enum.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_invalid_input(const std::string& what) {
    throw Error(ErrorCode::InvalidInput, what);
}

[[noreturn]] inline void throw_invalid_state(const std::string& what) {
    throw Error(ErrorCode::InvalidState, what);
}

[[noreturn]] inline void throw_io(const std::string& what) { throw Error(ErrorCode::Io, what); }

[[noreturn]] inline void throw_parse(const std::string& what) { throw Error(ErrorCode::Parse, what); }

}  // namespace sprawl
