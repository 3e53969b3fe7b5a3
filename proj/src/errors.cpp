#include "subdiff/errors.hpp"

namespace subdiff {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ok: return "ok";
        case ErrorCode::domain: return "domain";
        case ErrorCode::range: return "range";
        case ErrorCode::singular_kernel: return "singular_kernel";
        case ErrorCode::resolution: return "resolution";
        case ErrorCode::truncation: return "truncation";
        case ErrorCode::precondition: return "precondition";
        case ErrorCode::config: return "config";
        case ErrorCode::io: return "io";
        case ErrorCode::internal: return "internal";
    }
    return "unknown";
}

}  // namespace subdiff
