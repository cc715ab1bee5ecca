// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace agswap {

enum class ErrorCode {
    InvalidArgument,
    ShapeMismatch,
    InvalidWidth,
    IndexOutOfBounds,
    LengthMismatch,
    NotUnitNorm,
    NonFinite,
    BiasUnresolvable,
    WidthTooLarge,
    OracleFailure,
    ProtocolError,
    UnknownCategory,
    NoPathToRoot,
    ConflictingLists,
    InsufficientHyponyms,
    InvalidGraph,
    Io,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above; the C
// layer maps them one-to-one onto agswap_status values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Transport or service-side failure. `attempts` counts round trips made before
// giving up; `http_status` is 0 when no response was received at all.
class OracleFailure : public Error {
public:
    OracleFailure(const std::string& what, int attempts = 1, int http_status = 0)
        : Error(ErrorCode::OracleFailure, what), attempts_(attempts), http_status_(http_status) {}

    [[nodiscard]] int attempts() const noexcept { return attempts_; }
    [[nodiscard]] int http_status() const noexcept { return http_status_; }

private:
    int attempts_;
    int http_status_;
};

}  // namespace agswap
