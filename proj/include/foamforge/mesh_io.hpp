// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include <foamforge/error.hpp>
#include <foamforge/mesh.hpp>

namespace foamforge {

enum class ExportFormat { STL_BINARY, PLY_ASCII };

// Byte buffers are carried in std::string, which is also what the HTTP layer uses for bodies.
using Bytes = std::string;

inline std::optional<MeshFormat> format_from_extension( const std::filesystem::path& path ) {
    std::string ext = path.extension().string();
    std::transform( ext.begin(), ext.end(), ext.begin(), []( unsigned char c ) { return std::tolower( c ); } );
    if( ext == ".stl" )
        return MeshFormat::STL;
    if( ext == ".ply" )
        return MeshFormat::PLY;
    if( ext == ".obj" )
        return MeshFormat::OBJ;
    return std::nullopt;
}

namespace detail {

static_assert( std::endian::native == std::endian::little, "binary STL I/O assumes a little-endian host" );

class Tokenizer {
  public:
    explicit Tokenizer( std::string_view text )
        : m_text( text ) {}

    std::optional<std::string_view> next() {
        while( m_pos < m_text.size() && is_space( m_text[m_pos] ) )
            ++m_pos;
        if( m_pos >= m_text.size() )
            return std::nullopt;
        const std::size_t start = m_pos;
        while( m_pos < m_text.size() && !is_space( m_text[m_pos] ) )
            ++m_pos;
        return m_text.substr( start, m_pos - start );
    }

    std::string_view expect( const char* what ) {
        auto tok = next();
        if( !tok )
            throw Error( ErrorCode::MalformedFile, fmt::format( "unexpected end of file, expected {}", what ) );
        return *tok;
    }

  private:
    static bool is_space( char c ) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

    std::string_view m_text;
    std::size_t m_pos = 0;
};

inline double parse_double( std::string_view tok ) {
    double value = 0.0;
    const char* first = tok.data();
    if( !tok.empty() && tok.front() == '+' )
        ++first;
    const auto [ptr, ec] = std::from_chars( first, tok.data() + tok.size(), value );
    if( ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite( value ) )
        throw Error( ErrorCode::MalformedFile, fmt::format( "invalid number '{}'", tok ) );
    return value;
}

inline long long parse_int( std::string_view tok ) {
    long long value = 0;
    const char* first = tok.data();
    if( !tok.empty() && tok.front() == '+' )
        ++first;
    const auto [ptr, ec] = std::from_chars( first, tok.data() + tok.size(), value );
    if( ec != std::errc() || ptr != tok.data() + tok.size() )
        throw Error( ErrorCode::MalformedFile, fmt::format( "invalid integer '{}'", tok ) );
    return value;
}

inline std::vector<std::string_view> split_lines( std::string_view text ) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while( start <= text.size() ) {
        std::size_t end = text.find( '\n', start );
        if( end == std::string_view::npos )
            end = text.size();
        std::string_view line = text.substr( start, end - start );
        if( !line.empty() && line.back() == '\r' )
            line.remove_suffix( 1 );
        lines.push_back( line );
        start = end + 1;
    }
    return lines;
}

inline std::vector<std::string_view> split_words( std::string_view line ) {
    std::vector<std::string_view> words;
    Tokenizer tok( line );
    while( auto w = tok.next() )
        words.push_back( *w );
    return words;
}

template <class T>
T read_le( std::string_view bytes, std::size_t offset ) {
    T value;
    std::memcpy( &value, bytes.data() + offset, sizeof( T ) );
    return value;
}

template <class T>
void append_le( Bytes& out, T value ) {
    char buf[sizeof( T )];
    std::memcpy( buf, &value, sizeof( T ) );
    out.append( buf, sizeof( T ) );
}

inline void push_fan( TriangleMesh& mesh, const std::vector<std::uint32_t>& polygon ) {
    if( polygon.size() < 3 )
        throw Error( ErrorCode::MalformedFile, "face with fewer than three vertices" );
    for( std::size_t i = 1; i + 1 < polygon.size(); ++i ) {
        const Triangle t{ polygon[0], polygon[i], polygon[i + 1] };
        // Degenerate fan pieces are dropped rather than rejected.
        if( t[0] != t[1] && t[1] != t[2] && t[0] != t[2] )
            mesh.triangles.push_back( t );
    }
}

inline TriangleMesh load_stl_binary( std::string_view bytes ) {
    const auto count = read_le<std::uint32_t>( bytes, 80 );
    TriangleMesh soup;
    soup.vertices.reserve( std::size_t( count ) * 3 );
    soup.triangles.reserve( count );
    for( std::uint32_t f = 0; f < count; ++f ) {
        const std::size_t base = 84 + std::size_t( f ) * 50 + 12;
        for( int c = 0; c < 3; ++c ) {
            const std::size_t off = base + std::size_t( c ) * 12;
            soup.vertices.push_back( { read_le<float>( bytes, off ), read_le<float>( bytes, off + 4 ),
                                       read_le<float>( bytes, off + 8 ) } );
        }
        soup.triangles.push_back( { 3 * f, 3 * f + 1, 3 * f + 2 } );
    }
    return soup;
}

inline TriangleMesh load_stl_ascii( std::string_view text ) {
    Tokenizer tok( text );
    if( tok.expect( "solid" ) != "solid" )
        throw Error( ErrorCode::MalformedFile, "ASCII STL must start with 'solid'" );
    TriangleMesh soup;
    bool ended = false;
    while( auto word = tok.next() ) {
        if( *word == "facet" ) {
            std::uint32_t corners = 0;
            for( auto w = tok.expect( "vertex" ); w != "endfacet"; w = tok.expect( "endfacet" ) ) {
                if( w == "vertex" ) {
                    const double x = parse_double( tok.expect( "x" ) );
                    const double y = parse_double( tok.expect( "y" ) );
                    const double z = parse_double( tok.expect( "z" ) );
                    soup.vertices.push_back( { x, y, z } );
                    ++corners;
                }
            }
            if( corners != 3 )
                throw Error( ErrorCode::MalformedFile, "STL facet without exactly three vertices" );
            const auto b = static_cast<std::uint32_t>( soup.vertices.size() - 3 );
            soup.triangles.push_back( { b, b + 1, b + 2 } );
        } else if( *word == "endsolid" ) {
            ended = true;
            break;
        }
    }
    if( !ended )
        throw Error( ErrorCode::MalformedFile, "ASCII STL is missing 'endsolid'" );
    return soup;
}

inline TriangleMesh load_stl( std::string_view bytes ) {
    TriangleMesh soup;
    if( bytes.size() >= 84 && 84 + std::uint64_t( read_le<std::uint32_t>( bytes, 80 ) ) * 50 == bytes.size() ) {
        soup = load_stl_binary( bytes );
    } else {
        const auto first = bytes.find_first_not_of( " \t\r\n" );
        if( first == std::string_view::npos || bytes.substr( first, 5 ) != "solid" )
            throw Error( ErrorCode::MalformedFile, "neither a binary STL of consistent length nor ASCII STL" );
        soup = load_stl_ascii( bytes.substr( first ) );
    }
    // Welding keeps shared corners shared so that edge-based checks see the real topology.
    return weld_vertices( soup );
}

struct PlyProperty {
    std::string name;
    bool is_list = false;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

inline TriangleMesh load_ply( std::string_view bytes ) {
    const auto header_end = bytes.find( "end_header" );
    if( bytes.substr( 0, 3 ) != "ply" || header_end == std::string_view::npos )
        throw Error( ErrorCode::MalformedFile, "missing PLY magic or end_header" );
    std::vector<PlyElement> elements;
    bool ascii = false;
    for( std::string_view line : split_lines( bytes.substr( 0, header_end ) ) ) {
        const auto words = split_words( line );
        if( words.empty() || words[0] == "ply" || words[0] == "comment" || words[0] == "obj_info" )
            continue;
        if( words[0] == "format" ) {
            if( words.size() < 2 )
                throw Error( ErrorCode::MalformedFile, "incomplete PLY format line" );
            if( words[1] != "ascii" )
                throw Error( ErrorCode::UnsupportedFeature, fmt::format( "PLY format '{}'", words[1] ) );
            ascii = true;
        } else if( words[0] == "element" ) {
            if( words.size() != 3 )
                throw Error( ErrorCode::MalformedFile, "bad PLY element line" );
            const long long count = parse_int( words[2] );
            if( count < 0 )
                throw Error( ErrorCode::MalformedFile, "negative PLY element count" );
            elements.push_back( { std::string( words[1] ), std::size_t( count ), {} } );
        } else if( words[0] == "property" ) {
            if( elements.empty() )
                throw Error( ErrorCode::MalformedFile, "PLY property before any element" );
            const bool is_list = words.size() >= 2 && words[1] == "list";
            if( words.size() != ( is_list ? 5u : 3u ) )
                throw Error( ErrorCode::MalformedFile, "bad PLY property line" );
            elements.back().properties.push_back( { std::string( words.back() ), is_list } );
        } else {
            throw Error( ErrorCode::MalformedFile, fmt::format( "unknown PLY header keyword '{}'", words[0] ) );
        }
    }
    if( !ascii )
        throw Error( ErrorCode::MalformedFile, "PLY header lacks a format line" );

    TriangleMesh mesh;
    Tokenizer tok( bytes.substr( header_end + std::string_view( "end_header" ).size() ) );
    for( const PlyElement& el : elements ) {
        if( el.name == "vertex" ) {
            int slot[3] = { -1, -1, -1 };
            for( std::size_t p = 0; p < el.properties.size(); ++p ) {
                const auto& name = el.properties[p].name;
                if( name == "x" || name == "y" || name == "z" )
                    slot[name[0] - 'x'] = static_cast<int>( p );
            }
            if( slot[0] < 0 || slot[1] < 0 || slot[2] < 0 )
                throw Error( ErrorCode::MalformedFile, "PLY vertex element lacks x/y/z" );
            mesh.vertices.reserve( el.count );
            for( std::size_t v = 0; v < el.count; ++v ) {
                Vec3 p;
                for( std::size_t q = 0; q < el.properties.size(); ++q ) {
                    if( el.properties[q].is_list ) {
                        const long long n = parse_int( tok.expect( "list length" ) );
                        for( long long s = 0; s < n; ++s )
                            tok.expect( "list item" );
                        continue;
                    }
                    const auto word = tok.expect( "vertex property" );
                    for( int a = 0; a < 3; ++a ) {
                        if( slot[a] == static_cast<int>( q ) )
                            p[a] = parse_double( word );
                    }
                }
                mesh.vertices.push_back( p );
            }
        } else if( el.name == "face" ) {
            const auto list = std::find_if( el.properties.begin(), el.properties.end(), []( const PlyProperty& p ) {
                return p.is_list && ( p.name == "vertex_indices" || p.name == "vertex_index" );
            } );
            if( list == el.properties.end() )
                throw Error( ErrorCode::MalformedFile, "PLY face element lacks vertex_indices" );
            mesh.triangles.reserve( el.count );
            std::vector<std::uint32_t> polygon;
            for( std::size_t f = 0; f < el.count; ++f ) {
                for( const PlyProperty& prop : el.properties ) {
                    if( !prop.is_list ) {
                        tok.expect( "face property" );
                        continue;
                    }
                    const long long n = parse_int( tok.expect( "face size" ) );
                    if( n < 0 )
                        throw Error( ErrorCode::MalformedFile, "negative PLY list length" );
                    polygon.clear();
                    for( long long s = 0; s < n; ++s ) {
                        const long long idx = parse_int( tok.expect( "face index" ) );
                        if( idx < 0 || std::size_t( idx ) >= mesh.vertices.size() )
                            throw Error( ErrorCode::MalformedFile, "PLY face index out of range" );
                        polygon.push_back( static_cast<std::uint32_t>( idx ) );
                    }
                    if( &prop == &*list )
                        push_fan( mesh, polygon );
                }
            }
        } else {
            throw Error( ErrorCode::UnsupportedFeature, fmt::format( "non-polygonal PLY element '{}'", el.name ) );
        }
    }
    return mesh;
}

inline TriangleMesh load_obj( std::string_view bytes ) {
    TriangleMesh mesh;
    std::vector<std::uint32_t> polygon;
    for( std::string_view line : split_lines( bytes ) ) {
        const auto words = split_words( line );
        if( words.empty() || words[0].front() == '#' )
            continue;
        if( words[0] == "v" ) {
            if( words.size() < 4 )
                throw Error( ErrorCode::MalformedFile, "OBJ vertex with fewer than three coordinates" );
            mesh.vertices.push_back( { parse_double( words[1] ), parse_double( words[2] ), parse_double( words[3] ) } );
        } else if( words[0] == "f" ) {
            polygon.clear();
            for( std::size_t w = 1; w < words.size(); ++w ) {
                const auto slash = words[w].find( '/' );
                long long idx = parse_int( words[w].substr( 0, slash ) );
                const auto n = static_cast<long long>( mesh.vertices.size() );
                idx = idx < 0 ? n + idx : idx - 1;
                if( idx < 0 || idx >= n )
                    throw Error( ErrorCode::MalformedFile, "OBJ face index out of range" );
                polygon.push_back( static_cast<std::uint32_t>( idx ) );
            }
            push_fan( mesh, polygon );
        }
        // vt, vn, groups, materials and polylines carry nothing we need.
    }
    return mesh;
}

} // namespace detail

/// Parses a mesh from raw file bytes. STL input is welded on identical coordinates. Throws
/// MalformedFile, EmptyMesh or UnsupportedFeature.
inline TriangleMesh load_mesh( std::string_view bytes, MeshFormat format ) {
    if( bytes.empty() )
        throw Error( ErrorCode::MalformedFile, "empty input" );
    TriangleMesh mesh;
    switch( format ) {
    case MeshFormat::STL:
        mesh = detail::load_stl( bytes );
        break;
    case MeshFormat::PLY:
        mesh = detail::load_ply( bytes );
        break;
    case MeshFormat::OBJ:
        mesh = detail::load_obj( bytes );
        break;
    }
    mesh.source_format = format;
    validate( mesh );
    if( mesh.triangles.empty() )
        throw Error( ErrorCode::EmptyMesh, "mesh has no triangles" );
    if( !is_watertight( mesh ) )
        mesh.warnings.push_back( "mesh has open boundary edges; gap metrics are unavailable" );
    return mesh;
}

inline Bytes read_file( const std::filesystem::path& path ) {
    std::ifstream in( path, std::ios::binary );
    if( !in )
        throw std::runtime_error( "cannot open " + path.string() );
    return Bytes( std::istreambuf_iterator<char>( in ), std::istreambuf_iterator<char>() );
}

inline void write_file( const std::filesystem::path& path, std::string_view bytes ) {
    std::ofstream out( path, std::ios::binary );
    if( !out )
        throw std::runtime_error( "cannot write " + path.string() );
    out.write( bytes.data(), static_cast<std::streamsize>( bytes.size() ) );
}

inline TriangleMesh load_mesh_file( const std::filesystem::path& path ) {
    const auto format = format_from_extension( path );
    if( !format )
        throw Error( ErrorCode::UnsupportedFeature, "unknown mesh extension: " + path.string() );
    return load_mesh( read_file( path ), *format );
}

inline Bytes write_stl_binary( const TriangleMesh& mesh ) {
    Bytes out;
    out.reserve( 84 + mesh.triangles.size() * 50 );
    char header[80] = {};
    std::memcpy( header, "foamforge", 9 );
    out.append( header, 80 );
    detail::append_le( out, static_cast<std::uint32_t>( mesh.triangles.size() ) );
    for( std::size_t t = 0; t < mesh.triangles.size(); ++t ) {
        const Vec3 a = mesh.corner( t, 0 ), b = mesh.corner( t, 1 ), c = mesh.corner( t, 2 );
        Vec3 n = cross( b - a, c - a );
        const double len = length( n );
        if( len > 0.0 )
            n = n * ( 1.0 / len );
        for( const Vec3& v : { n, a, b, c } ) {
            detail::append_le( out, static_cast<float>( v.x ) );
            detail::append_le( out, static_cast<float>( v.y ) );
            detail::append_le( out, static_cast<float>( v.z ) );
        }
        detail::append_le( out, std::uint16_t( 0 ) );
    }
    return out;
}

inline Bytes write_ply_ascii( const TriangleMesh& mesh ) {
    fmt::memory_buffer buf;
    fmt::format_to( std::back_inserter( buf ),
                    "ply\nformat ascii 1.0\ncomment foamforge\nelement vertex {}\nproperty double x\n"
                    "property double y\nproperty double z\nelement face {}\n"
                    "property list uchar int vertex_indices\nend_header\n",
                    mesh.vertices.size(), mesh.triangles.size() );
    for( const Vec3& v : mesh.vertices )
        fmt::format_to( std::back_inserter( buf ), "{} {} {}\n", v.x, v.y, v.z );
    for( const Triangle& t : mesh.triangles )
        fmt::format_to( std::back_inserter( buf ), "3 {} {} {}\n", t[0], t[1], t[2] );
    return fmt::to_string( buf );
}

inline Bytes write_mesh( const TriangleMesh& mesh, ExportFormat format ) {
    return format == ExportFormat::STL_BINARY ? write_stl_binary( mesh ) : write_ply_ascii( mesh );
}

} // namespace foamforge
