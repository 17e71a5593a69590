// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include <json.hpp>

#include <foamforge/block_map.hpp>
#include <foamforge/error.hpp>
#include <foamforge/mesh_io.hpp>

namespace foamforge {

inline char label_code( Label l ) {
    switch( l ) {
    case Label::Occupied:
        return 'O';
    case Label::Foam:
        return 'F';
    case Label::FoamPlus:
        return 'P';
    case Label::FoamMinus:
        return 'M';
    }
    return '?';
}

inline Label label_from_code( char c ) {
    switch( c ) {
    case 'O':
        return Label::Occupied;
    case 'F':
        return Label::Foam;
    case 'P':
        return Label::FoamPlus;
    case 'M':
        return Label::FoamMinus;
    default:
        throw Error( ErrorCode::MalformedFile, std::string( "unknown label code '" ) + c + "'" );
    }
}

// Binary layout (little-endian): "FFBM", u32 version, i32 nx ny nz, f64 bx by bz, then one label
// byte per block with i fastest, then j, then k.
inline constexpr std::uint32_t BLOCKMAP_BINARY_VERSION = 1;

inline Bytes encode_block_map( const BlockMap& bm ) {
    Bytes out = "FFBM";
    const DesignSpace& s = bm.space;
    detail::append_le( out, BLOCKMAP_BINARY_VERSION );
    for( std::int32_t n : { s.nx, s.ny, s.nz } )
        detail::append_le( out, n );
    for( double b : { s.bx, s.by, s.bz } )
        detail::append_le( out, b );
    for( Label l : bm.labels )
        out.push_back( static_cast<char>( l ) );
    return out;
}

inline BlockMap decode_block_map( std::string_view bytes ) {
    constexpr std::size_t header = 4 + 4 + 3 * 4 + 3 * 8;
    if( bytes.size() < header || bytes.substr( 0, 4 ) != "FFBM" )
        throw Error( ErrorCode::MalformedFile, "not a block map blob" );
    if( detail::read_le<std::uint32_t>( bytes, 4 ) != BLOCKMAP_BINARY_VERSION )
        throw Error( ErrorCode::UnsupportedFeature, "unknown block map version" );
    DesignSpace s;
    s.nx = detail::read_le<std::int32_t>( bytes, 8 );
    s.ny = detail::read_le<std::int32_t>( bytes, 12 );
    s.nz = detail::read_le<std::int32_t>( bytes, 16 );
    s.bx = detail::read_le<double>( bytes, 20 );
    s.by = detail::read_le<double>( bytes, 28 );
    s.bz = detail::read_le<double>( bytes, 36 );
    validate( s );
    if( bytes.size() != header + s.block_count() )
        throw Error( ErrorCode::MalformedFile, "block map blob length does not match its dimensions" );
    BlockMap bm( s );
    for( std::size_t i = 0; i < bm.labels.size(); ++i ) {
        const auto raw = static_cast<std::uint8_t>( bytes[header + i] );
        if( raw > static_cast<std::uint8_t>( Label::FoamMinus ) )
            throw Error( ErrorCode::MalformedFile, "invalid label byte" );
        bm.labels[i] = static_cast<Label>( raw );
    }
    bm.diagnostics.occupied_blocks = bm.count( Label::Occupied );
    bm.diagnostics.foam_blocks = bm.foam_count();
    return bm;
}

/// Lossless JSON form: dims, block size and, per (j,k) column (j fastest), the run-length
/// encoded labels along x as [code, length] pairs.
inline nlohmann::json block_map_to_json( const BlockMap& bm ) {
    const DesignSpace& s = bm.space;
    nlohmann::json columns = nlohmann::json::array();
    for( int k = 0; k < s.nz; ++k ) {
        for( int j = 0; j < s.ny; ++j ) {
            nlohmann::json runs = nlohmann::json::array();
            int i = 0;
            while( i < s.nx ) {
                const Label l = bm.at( i, j, k );
                int len = 1;
                while( i + len < s.nx && bm.at( i + len, j, k ) == l )
                    ++len;
                runs.push_back( { std::string( 1, label_code( l ) ), len } );
                i += len;
            }
            columns.push_back( std::move( runs ) );
        }
    }
    return { { "format", "foamforge.blockmap" },
             { "version", 1 },
             { "dims", { s.nx, s.ny, s.nz } },
             { "block_size_mm", { s.bx, s.by, s.bz } },
             { "columns", std::move( columns ) } };
}

inline BlockMap block_map_from_json( const nlohmann::json& j ) {
    try {
        DesignSpace s;
        s.nx = j.at( "dims" ).at( 0 ).get<int>();
        s.ny = j.at( "dims" ).at( 1 ).get<int>();
        s.nz = j.at( "dims" ).at( 2 ).get<int>();
        s.bx = j.at( "block_size_mm" ).at( 0 ).get<double>();
        s.by = j.at( "block_size_mm" ).at( 1 ).get<double>();
        s.bz = j.at( "block_size_mm" ).at( 2 ).get<double>();
        validate( s );
        const auto& columns = j.at( "columns" );
        if( columns.size() != s.column_count() )
            throw Error( ErrorCode::MalformedFile, "column count does not match dims" );
        BlockMap bm( s );
        for( int k = 0; k < s.nz; ++k ) {
            for( int jj = 0; jj < s.ny; ++jj ) {
                int i = 0;
                for( const auto& run : columns[s.column( jj, k )] ) {
                    const auto code = run.at( 0 ).get<std::string>();
                    const int len = run.at( 1 ).get<int>();
                    if( code.size() != 1 || len <= 0 || i + len > s.nx )
                        throw Error( ErrorCode::MalformedFile, "bad run in block map column" );
                    for( int r = 0; r < len; ++r )
                        bm.at( i++, jj, k ) = label_from_code( code[0] );
                }
                if( i != s.nx )
                    throw Error( ErrorCode::MalformedFile, "block map column does not cover nx blocks" );
            }
        }
        bm.diagnostics.occupied_blocks = bm.count( Label::Occupied );
        bm.diagnostics.foam_blocks = bm.foam_count();
        return bm;
    } catch( const nlohmann::json::exception& e ) {
        throw Error( ErrorCode::MalformedFile, e.what() );
    }
}

} // namespace foamforge
