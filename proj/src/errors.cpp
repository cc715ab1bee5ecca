// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#include "agswap/errors.hpp"

namespace agswap {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::InvalidWidth: return "InvalidWidth";
        case ErrorCode::IndexOutOfBounds: return "IndexOutOfBounds";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NotUnitNorm: return "NotUnitNorm";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::BiasUnresolvable: return "BiasUnresolvable";
        case ErrorCode::WidthTooLarge: return "WidthTooLarge";
        case ErrorCode::OracleFailure: return "OracleFailure";
        case ErrorCode::ProtocolError: return "ProtocolError";
        case ErrorCode::UnknownCategory: return "UnknownCategory";
        case ErrorCode::NoPathToRoot: return "NoPathToRoot";
        case ErrorCode::ConflictingLists: return "ConflictingLists";
        case ErrorCode::InsufficientHyponyms: return "InsufficientHyponyms";
        case ErrorCode::InvalidGraph: return "InvalidGraph";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace agswap
