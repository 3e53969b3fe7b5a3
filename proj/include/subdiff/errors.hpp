#pragma once

#include <stdexcept>
#include <string>

namespace subdiff {

enum class ErrorCode : int {
    ok = 0,
    domain = 1,
    range = 2,
    singular_kernel = 3,
    resolution = 4,
    truncation = 5,
    precondition = 6,
    config = 7,
    io = 8,
    internal = 9,
};

const char* error_code_name(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C boundary can translate it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) fail(code, what);
}

}  // namespace subdiff
