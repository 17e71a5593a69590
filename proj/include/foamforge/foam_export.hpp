// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include <foamforge/block_map.hpp>
#include <foamforge/blockmap_io.hpp>
#include <foamforge/error.hpp>
#include <foamforge/mesh.hpp>

namespace foamforge {

/// Blocky boundary of one label region: every block face whose neighbour (or the space
/// exterior) carries a different label becomes an outward-wound quad of two triangles. Vertices
/// sit on the block lattice and are not shared between faces. Faces are emitted in
/// (i, j, k, face) order with faces -x, +x, -y, +y, -z, +z.
inline TriangleMesh extract_region_mesh( const BlockMap& bm, Label region ) {
    const DesignSpace& s = bm.space;
    TriangleMesh mesh;
    const auto lx = [&]( int i ) { return -0.5 * s.width() + i * s.bx; };
    const auto ly = [&]( int j ) { return -0.5 * s.height() + j * s.by; };
    const auto lz = [&]( int k ) { return -0.5 * s.depth() + k * s.bz; };
    const auto inside = [&]( int i, int j, int k ) {
        return i >= 0 && i < s.nx && j >= 0 && j < s.ny && k >= 0 && k < s.nz && bm.at( i, j, k ) == region;
    };
    const auto quad = [&]( const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d ) {
        const auto base = static_cast<std::uint32_t>( mesh.vertices.size() );
        mesh.vertices.insert( mesh.vertices.end(), { a, b, c, d } );
        mesh.triangles.push_back( { base, base + 1, base + 2 } );
        mesh.triangles.push_back( { base, base + 2, base + 3 } );
    };

    for( int i = 0; i < s.nx; ++i ) {
        for( int j = 0; j < s.ny; ++j ) {
            for( int k = 0; k < s.nz; ++k ) {
                if( bm.at( i, j, k ) != region )
                    continue;
                const double x0 = lx( i ), x1 = lx( i + 1 );
                const double y0 = ly( j ), y1 = ly( j + 1 );
                const double z0 = lz( k ), z1 = lz( k + 1 );
                if( !inside( i - 1, j, k ) )
                    quad( { x0, y0, z0 }, { x0, y0, z1 }, { x0, y1, z1 }, { x0, y1, z0 } );
                if( !inside( i + 1, j, k ) )
                    quad( { x1, y0, z0 }, { x1, y1, z0 }, { x1, y1, z1 }, { x1, y0, z1 } );
                if( !inside( i, j - 1, k ) )
                    quad( { x0, y0, z0 }, { x1, y0, z0 }, { x1, y0, z1 }, { x0, y0, z1 } );
                if( !inside( i, j + 1, k ) )
                    quad( { x0, y1, z0 }, { x0, y1, z1 }, { x1, y1, z1 }, { x1, y1, z0 } );
                if( !inside( i, j, k - 1 ) )
                    quad( { x0, y0, z0 }, { x0, y1, z0 }, { x1, y1, z0 }, { x1, y0, z0 } );
                if( !inside( i, j, k + 1 ) )
                    quad( { x0, y0, z1 }, { x1, y0, z1 }, { x1, y1, z1 }, { x0, y1, z1 } );
            }
        }
    }
    return mesh;
}

/// Cross-sections of a block map perpendicular to x. Layer i holds ny*nz labels, j fastest.
struct SliceStack {
    DesignSpace space;
    std::vector<std::vector<Label>> layers;

    Label at( int i, int j, int k ) const { return layers[i][space.column( j, k )]; }
};

inline SliceStack extract_slices( const BlockMap& bm ) {
    const DesignSpace& s = bm.space;
    SliceStack stack{ s, std::vector<std::vector<Label>>( s.nx, std::vector<Label>( s.column_count() ) ) };
    for( int k = 0; k < s.nz; ++k )
        for( int j = 0; j < s.ny; ++j )
            for( int i = 0; i < s.nx; ++i )
                stack.layers[i][s.column( j, k )] = bm.at( i, j, k );
    return stack;
}

inline BlockMap assemble( const SliceStack& stack ) {
    BlockMap bm( stack.space );
    for( int i = 0; i < stack.space.nx; ++i )
        for( int k = 0; k < stack.space.nz; ++k )
            for( int j = 0; j < stack.space.ny; ++j )
                bm.at( i, j, k ) = stack.at( i, j, k );
    bm.diagnostics.occupied_blocks = bm.count( Label::Occupied );
    bm.diagnostics.foam_blocks = bm.foam_count();
    return bm;
}

struct SlicePalette {
    static constexpr std::string_view foam_minus = "#1f77b4";
    static constexpr std::string_view foam_plus = "#ff7f0e";
    static constexpr std::string_view occupied = "#ffffff";
    static constexpr std::string_view occupied_outline = "#808080";
    static constexpr std::string_view unsplit_foam = "#c7c7c7";
};

inline std::string_view slice_fill( Label l ) {
    switch( l ) {
    case Label::FoamMinus:
        return SlicePalette::foam_minus;
    case Label::FoamPlus:
        return SlicePalette::foam_plus;
    case Label::Occupied:
        return SlicePalette::occupied;
    case Label::Foam:
        return SlicePalette::unsplit_foam;
    }
    return SlicePalette::unsplit_foam;
}

/// One rect per cell, in mm user units, +z pointing up the page.
inline std::string render_slice_svg( const SliceStack& stack, int layer ) {
    const DesignSpace& s = stack.space;
    if( layer < 0 || layer >= s.nx || std::size_t( layer ) >= stack.layers.size() )
        throw Error( ErrorCode::LayerOutOfRange, fmt::format( "layer {} outside [0, {})", layer, s.nx ) );
    const double w = s.height(), h = s.depth();
    fmt::memory_buffer buf;
    auto out = std::back_inserter( buf );
    fmt::format_to( out,
                    "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                    "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}mm\" height=\"{}mm\" "
                    "viewBox=\"0 0 {} {}\">\n<title>layer {} of {}</title>\n",
                    w, h, w, h, layer, s.nx );
    const double outline = std::min( s.by, s.bz ) / 20.0;
    for( int k = s.nz - 1; k >= 0; --k ) {
        for( int j = 0; j < s.ny; ++j ) {
            const Label l = stack.at( layer, j, k );
            fmt::format_to( out, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"", j * s.by,
                            ( s.nz - 1 - k ) * s.bz, s.by, s.bz, slice_fill( l ) );
            if( l == Label::Occupied )
                fmt::format_to( out, " stroke=\"{}\" stroke-width=\"{}\"", SlicePalette::occupied_outline, outline );
            fmt::format_to( out, "/>\n" );
        }
    }
    fmt::format_to( out, "</svg>\n" );
    return fmt::to_string( buf );
}

struct LabelHistogram {
    std::int64_t occupied = 0;
    std::int64_t foam_plus = 0;
    std::int64_t foam_minus = 0;
    std::int64_t unsplit = 0;

    bool operator==( const LabelHistogram& ) const = default;
};

inline LabelHistogram histogram( const std::vector<Label>& labels ) {
    LabelHistogram h;
    for( Label l : labels ) {
        switch( l ) {
        case Label::Occupied:
            ++h.occupied;
            break;
        case Label::FoamPlus:
            ++h.foam_plus;
            break;
        case Label::FoamMinus:
            ++h.foam_minus;
            break;
        case Label::Foam:
            ++h.unsplit;
            break;
        }
    }
    return h;
}

/// Slice stack as JSON: per layer one string per z row (k ascending), one label code per j.
inline nlohmann::json slices_to_json( const SliceStack& stack ) {
    const DesignSpace& s = stack.space;
    nlohmann::json layers = nlohmann::json::array();
    for( int i = 0; i < s.nx; ++i ) {
        nlohmann::json rows = nlohmann::json::array();
        for( int k = 0; k < s.nz; ++k ) {
            std::string row( std::size_t( s.ny ), ' ' );
            for( int j = 0; j < s.ny; ++j )
                row[j] = label_code( stack.at( i, j, k ) );
            rows.push_back( std::move( row ) );
        }
        const LabelHistogram h = histogram( stack.layers[i] );
        layers.push_back( { { "index", i },
                            { "rows", std::move( rows ) },
                            { "histogram",
                              { { "occupied", h.occupied },
                                { "foam_plus", h.foam_plus },
                                { "foam_minus", h.foam_minus } } } } );
    }
    return { { "format", "foamforge.slices" },
             { "version", 1 },
             { "dims", { s.nx, s.ny, s.nz } },
             { "block_size_mm", { s.bx, s.by, s.bz } },
             { "palette",
               { { "foam_minus", SlicePalette::foam_minus },
                 { "foam_plus", SlicePalette::foam_plus },
                 { "occupied", SlicePalette::occupied } } },
             { "layers", std::move( layers ) } };
}

} // namespace foamforge
