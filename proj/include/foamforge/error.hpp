// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace foamforge {

enum class ErrorCode {
    MalformedFile,
    EmptyMesh,
    UnsupportedFeature,
    DimensionMismatch,
    InvalidParams,
    LayerOutOfRange,
    Unavailable,
    DegenerateRay,
};

inline std::string_view to_string( ErrorCode code ) {
    switch( code ) {
    case ErrorCode::MalformedFile:
        return "MalformedFile";
    case ErrorCode::EmptyMesh:
        return "EmptyMesh";
    case ErrorCode::UnsupportedFeature:
        return "UnsupportedFeature";
    case ErrorCode::DimensionMismatch:
        return "DimensionMismatch";
    case ErrorCode::InvalidParams:
        return "InvalidParams";
    case ErrorCode::LayerOutOfRange:
        return "LayerOutOfRange";
    case ErrorCode::Unavailable:
        return "Unavailable";
    case ErrorCode::DegenerateRay:
        return "DegenerateRay";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so that the CLI and the
/// service can map it onto exit codes / HTTP statuses without parsing messages.
class Error : public std::runtime_error {
  public:
    Error( ErrorCode code, const std::string& message )
        : std::runtime_error( std::string( to_string( code ) ) + ": " + message )
        , m_code( code ) {}

    ErrorCode code() const noexcept { return m_code; }

  private:
    ErrorCode m_code;
};

} // namespace foamforge
