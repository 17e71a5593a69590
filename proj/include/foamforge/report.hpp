// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include <foamforge/angle_opt.hpp>
#include <foamforge/error.hpp>
#include <foamforge/foam_export.hpp>
#include <foamforge/mesh_io.hpp>
#include <foamforge/pipeline.hpp>

namespace foamforge {

inline constexpr int REPORT_SCHEMA_VERSION = 1;
inline constexpr int MAX_SUPERSAMPLE = 64;

// Parse, then center on the origin.
inline TriangleMesh load_centered( std::string_view bytes, MeshFormat format ) {
    TriangleMesh mesh = load_mesh( bytes, format );
    mesh = center_mesh( std::move( mesh ) );
    return mesh;
}

inline std::string content_hash( std::string_view bytes ) {
    return fmt::format( "{:016x}", std::hash<std::string_view>{}( bytes ) );
}

// "30x18x18" style triples (x or X), or "0,45,90" with sep = ','.
template <class T>
std::array<T, 3> parse_triple( std::string_view text, char sep = 'x' ) {
    const std::string_view seps = sep == 'x' ? std::string_view( "xX" ) : std::string_view( &sep, 1 );
    std::array<T, 3> out{};
    std::size_t pos = 0;
    for( int n = 0; n < 3; ++n ) {
        const std::size_t end = n < 2 ? text.find_first_of( seps, pos ) : text.size();
        if( end == std::string_view::npos )
            throw Error( ErrorCode::InvalidParams, fmt::format( "expected three values in '{}'", text ) );
        const std::string_view tok = text.substr( pos, end - pos );
        const auto [p, ec] = std::from_chars( tok.data(), tok.data() + tok.size(), out[n] );
        if( ec != std::errc() || p != tok.data() + tok.size() || tok.empty() )
            throw Error( ErrorCode::InvalidParams, fmt::format( "bad number '{}' in '{}'", tok, text ) );
        pos = end + 1;
    }
    return out;
}

inline std::vector<int> parse_int_list( std::string_view text ) {
    std::vector<int> out;
    std::size_t pos = 0;
    while( pos <= text.size() ) {
        const std::size_t end = std::min( text.find( ',', pos ), text.size() );
        const std::string_view tok = text.substr( pos, end - pos );
        int v = 0;
        const auto [p, ec] = std::from_chars( tok.data(), tok.data() + tok.size(), v );
        if( tok.empty() || ec != std::errc() || p != tok.data() + tok.size() || v <= 0 )
            throw Error( ErrorCode::InvalidParams, fmt::format( "bad resolution '{}' in '{}'", tok, text ) );
        out.push_back( v );
        pos = end + 1;
    }
    return out;
}

inline void validate( const GenerationParams& p ) {
    validate( p.space );
    if( !is_finite( p.angles ) )
        throw Error( ErrorCode::InvalidParams, "angles must be finite" );
    if( p.supersample < 1 || p.supersample > MAX_SUPERSAMPLE )
        throw Error( ErrorCode::InvalidParams, fmt::format( "supersample must be in [1, {}]", MAX_SUPERSAMPLE ) );
}

inline nlohmann::json to_json( const GenerationParams& p ) {
    const DesignSpace& s = p.space;
    return { { "resolution", { s.nx, s.ny, s.nz } },
             { "block_size_mm", { s.bx, s.by, s.bz } },
             { "angles_deg", { p.angles.psi, p.angles.theta, p.angles.phi } },
             { "supersample", p.supersample } };
}

namespace detail {

template <class T>
std::array<T, 3> json_triple( const nlohmann::json& j, std::string_view key ) {
    if( !j.is_array() || j.size() != 3 )
        throw Error( ErrorCode::InvalidParams, fmt::format( "'{}' must be an array of three numbers", key ) );
    std::array<T, 3> out{};
    for( int n = 0; n < 3; ++n ) {
        if( !j[n].is_number() )
            throw Error( ErrorCode::InvalidParams, fmt::format( "'{}' must be an array of three numbers", key ) );
        if constexpr( std::is_integral_v<T> ) {
            if( !j[n].is_number_integer() )
                throw Error( ErrorCode::InvalidParams, fmt::format( "'{}' must hold integers", key ) );
        }
        out[n] = j[n].get<T>();
    }
    return out;
}

} // namespace detail

/// Applies the fields present in j on top of base. Unknown keys are rejected.
inline GenerationParams apply_params_json( GenerationParams base, const nlohmann::json& j ) {
    if( !j.is_object() )
        throw Error( ErrorCode::InvalidParams, "params must be a JSON object" );
    for( const auto& [key, value] : j.items() ) {
        if( key == "resolution" ) {
            const auto r = detail::json_triple<long long>( value, key );
            for( long long v : r )
                if( v < 1 || v > 4096 )
                    throw Error( ErrorCode::InvalidParams, "resolution entries must be in [1, 4096]" );
            base.space.nx = int( r[0] );
            base.space.ny = int( r[1] );
            base.space.nz = int( r[2] );
        } else if( key == "block_size_mm" ) {
            const auto b = detail::json_triple<double>( value, key );
            base.space.bx = b[0];
            base.space.by = b[1];
            base.space.bz = b[2];
        } else if( key == "angles_deg" ) {
            const auto a = detail::json_triple<double>( value, key );
            base.angles = { a[0], a[1], a[2] };
        } else if( key == "supersample" ) {
            if( !value.is_number_integer() )
                throw Error( ErrorCode::InvalidParams, "'supersample' must be an integer" );
            base.supersample = value.get<int>();
        } else {
            throw Error( ErrorCode::InvalidParams, fmt::format( "unknown parameter '{}'", key ) );
        }
    }
    validate( base );
    return base;
}

inline nlohmann::json to_json( const GapReport& g ) {
    return { { "occupied_blocks", g.occupied_blocks },
             { "solid_blocks", g.solid_blocks },
             { "gap_blocks", g.gap_blocks },
             { "gap_mm3", g.gap_mm3 } };
}

inline nlohmann::json to_json( const ScoreReport& r ) {
    return { { "angles_deg", { r.angles.psi, r.angles.theta, r.angles.phi } },
             { "F", r.F },
             { "start_F", r.start_F },
             { "rounds_used", r.rounds_used },
             { "evaluations", r.evaluations } };
}

inline nlohmann::json summary_json( const FoamResult& r ) {
    const BlockMap& bm = r.block_map;
    nlohmann::json gap = nullptr;
    if( r.gap )
        gap = to_json( *r.gap );
    else
        gap = { { "unavailable", r.gap_unavailable_reason } };
    return { { "params", to_json( r.params ) },
             { "F", r.foam_fraction() },
             { "foam_blocks", bm.foam_count() },
             { "occupied_blocks", bm.count( Label::Occupied ) },
             { "foam_plus_blocks", bm.count( Label::FoamPlus ) },
             { "foam_minus_blocks", bm.count( Label::FoamMinus ) },
             { "one_sided_columns", bm.diagnostics.one_sided_columns },
             { "foam_plus_triangles", r.mesh_plus.triangles.size() },
             { "foam_minus_triangles", r.mesh_minus.triangles.size() },
             { "timing_ms", r.timing_ms },
             { "gap", std::move( gap ) } };
}

/// report.json written by the generate command.
inline nlohmann::json generation_report( const FoamResult& r, const std::optional<ScoreReport>& opt,
                                         std::string_view input ) {
    nlohmann::json j = { { "schema_version", REPORT_SCHEMA_VERSION },
                         { "input", input },
                         { "timing_scope", "rotate, render, reduce, block map, region split" } };
    j.update( summary_json( r ) );
    if( opt )
        j["optimizer"] = to_json( *opt );
    return j;
}

// Artifact bytes shared by every front end so downloads and files match exactly.
inline Bytes foam_artifact( const FoamResult& r, Label region, ExportFormat format ) {
    return write_mesh( region == Label::FoamPlus ? r.mesh_plus : r.mesh_minus, format );
}

inline Bytes slices_json_artifact( const FoamResult& r ) { return slices_to_json( r.slices ).dump( 1 ) + "\n"; }

inline std::string slice_svg_name( int layer ) { return fmt::format( "layer_{:03d}.svg", layer ); }

} // namespace foamforge
