// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <foamforge/error.hpp>
#include <foamforge/vec3.hpp>

namespace foamforge {

enum class MeshFormat { STL, PLY, OBJ };

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle soup in millimeters.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::optional<MeshFormat> source_format;
    // Non-fatal load diagnostics, e.g. an open boundary on a scanned soup.
    std::vector<std::string> warnings;

    bool empty() const { return triangles.empty(); }

    Vec3 corner( std::size_t tri, int c ) const { return vertices[triangles[tri][c]]; }
};

/// Rotation in degrees: psi about x, theta about y, phi about z.
struct EulerAngles {
    double psi = 0.0;
    double theta = 0.0;
    double phi = 0.0;

    bool operator==( const EulerAngles& ) const = default;

    double& operator[]( int axis ) { return axis == 0 ? psi : ( axis == 1 ? theta : phi ); }
    double operator[]( int axis ) const { return axis == 0 ? psi : ( axis == 1 ? theta : phi ); }
};

inline double canonical_degrees( double deg ) {
    double r = std::fmod( deg, 360.0 );
    if( r < 0.0 )
        r += 360.0;
    if( r >= 360.0 )
        r = 0.0;
    return r;
}

inline EulerAngles canonical( EulerAngles a ) {
    return { canonical_degrees( a.psi ), canonical_degrees( a.theta ), canonical_degrees( a.phi ) };
}

inline bool is_finite( const EulerAngles& a ) {
    return std::isfinite( a.psi ) && std::isfinite( a.theta ) && std::isfinite( a.phi );
}

/// Throws MalformedFile when an index is out of range, a triangle repeats a vertex, or a
/// coordinate is not finite.
inline void validate( const TriangleMesh& mesh ) {
    for( const Vec3& v : mesh.vertices ) {
        if( !std::isfinite( v.x ) || !std::isfinite( v.y ) || !std::isfinite( v.z ) )
            throw Error( ErrorCode::MalformedFile, "non-finite vertex coordinate" );
    }
    const auto n = mesh.vertices.size();
    for( const Triangle& t : mesh.triangles ) {
        if( t[0] >= n || t[1] >= n || t[2] >= n )
            throw Error( ErrorCode::MalformedFile, "triangle index out of range" );
        if( t[0] == t[1] || t[1] == t[2] || t[0] == t[2] )
            throw Error( ErrorCode::MalformedFile, "triangle repeats a vertex index" );
    }
}

namespace detail {

// sin/cos in degrees, exact at multiples of 90 so that quarter turns map lattice points onto
// lattice points without round-off.
inline std::pair<double, double> sincos_degrees( double deg ) {
    const double c = canonical_degrees( deg );
    if( c == 0.0 )
        return { 0.0, 1.0 };
    if( c == 90.0 )
        return { 1.0, 0.0 };
    if( c == 180.0 )
        return { 0.0, -1.0 };
    if( c == 270.0 )
        return { -1.0, 0.0 };
    const double rad = c * ( 3.14159265358979323846 / 180.0 );
    return { std::sin( rad ), std::cos( rad ) };
}

} // namespace detail

using Mat3 = std::array<std::array<double, 3>, 3>;

/// R = Rz(phi) * Ry(theta) * Rx(psi) (extrinsic x, then y, then z).
inline Mat3 rotation_matrix( const EulerAngles& a ) {
    const auto [sx, cx] = detail::sincos_degrees( a.psi );
    const auto [sy, cy] = detail::sincos_degrees( a.theta );
    const auto [sz, cz] = detail::sincos_degrees( a.phi );
    return { { { cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx },
               { sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx },
               { -sy, cy * sx, cy * cx } } };
}

inline Vec3 transform( const Mat3& m, const Vec3& v ) {
    return { m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z, m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
             m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z };
}

[[nodiscard]] inline TriangleMesh rotate_mesh( TriangleMesh mesh, const EulerAngles& angles ) {
    if( angles == EulerAngles{} )
        return mesh;
    const Mat3 r = rotation_matrix( angles );
    for( Vec3& v : mesh.vertices )
        v = transform( r, v );
    return mesh;
}

struct BoundingBox {
    Vec3 min;
    Vec3 max;

    Vec3 center() const { return ( min + max ) * 0.5; }
    Vec3 extent() const { return max - min; }
};

inline BoundingBox bounding_box( const TriangleMesh& mesh ) {
    if( mesh.vertices.empty() || mesh.triangles.empty() )
        throw Error( ErrorCode::EmptyMesh, "bounding box of an empty mesh" );
    constexpr double inf = std::numeric_limits<double>::infinity();
    BoundingBox box{ Vec3{ inf, inf, inf }, Vec3{ -inf, -inf, -inf } };
    for( const Vec3& v : mesh.vertices ) {
        for( int a = 0; a < 3; ++a ) {
            box.min[a] = std::min( box.min[a], v[a] );
            box.max[a] = std::max( box.max[a], v[a] );
        }
    }
    return box;
}

/// Translates the mesh so that its bounding-box center sits at the origin.
[[nodiscard]] inline TriangleMesh center_mesh( TriangleMesh mesh ) {
    const Vec3 c = bounding_box( mesh ).center();
    if( c == Vec3{} )
        return mesh;
    for( Vec3& v : mesh.vertices )
        v = v - c;
    return mesh;
}

/// Divergence-theorem volume; positive for closed, outward-wound meshes.
inline double signed_volume( const TriangleMesh& mesh ) {
    double sum = 0.0;
    for( std::size_t t = 0; t < mesh.triangles.size(); ++t )
        sum += dot( mesh.corner( t, 0 ), cross( mesh.corner( t, 1 ), mesh.corner( t, 2 ) ) );
    return sum / 6.0;
}

namespace detail {

struct Vec3BitsHash {
    std::size_t operator()( const Vec3& v ) const noexcept {
        const std::hash<double> h;
        std::size_t seed = h( v.x );
        seed ^= h( v.y ) + 0x9e3779b97f4a7c15ULL + ( seed << 6 ) + ( seed >> 2 );
        seed ^= h( v.z ) + 0x9e3779b97f4a7c15ULL + ( seed << 6 ) + ( seed >> 2 );
        return seed;
    }
};

// Maps every vertex to the first vertex with bit-identical coordinates.
inline std::vector<std::uint32_t> position_ids( const TriangleMesh& mesh ) {
    std::unordered_map<Vec3, std::uint32_t, Vec3BitsHash> seen;
    seen.reserve( mesh.vertices.size() );
    std::vector<std::uint32_t> ids( mesh.vertices.size() );
    for( std::uint32_t i = 0; i < mesh.vertices.size(); ++i )
        ids[i] = seen.emplace( mesh.vertices[i], i ).first->second;
    return ids;
}

} // namespace detail

/// Merges vertices with identical coordinates and drops triangles that collapse.
inline TriangleMesh weld_vertices( const TriangleMesh& mesh ) {
    TriangleMesh out;
    out.source_format = mesh.source_format;
    out.warnings = mesh.warnings;
    std::unordered_map<Vec3, std::uint32_t, detail::Vec3BitsHash> index;
    index.reserve( mesh.vertices.size() );
    std::vector<std::uint32_t> remap( mesh.vertices.size() );
    for( std::size_t i = 0; i < mesh.vertices.size(); ++i ) {
        auto [it, inserted] = index.emplace( mesh.vertices[i], static_cast<std::uint32_t>( out.vertices.size() ) );
        if( inserted )
            out.vertices.push_back( mesh.vertices[i] );
        remap[i] = it->second;
    }
    out.triangles.reserve( mesh.triangles.size() );
    for( const Triangle& t : mesh.triangles ) {
        const Triangle w{ remap[t[0]], remap[t[1]], remap[t[2]] };
        if( w[0] != w[1] && w[1] != w[2] && w[0] != w[2] )
            out.triangles.push_back( w );
    }
    return out;
}

/// True when every edge (vertices identified by position) is used by an even, non-zero number
/// of triangles, i.e. the surface has no open boundary. Blocky meshes with edges shared by four
/// faces at diagonal contacts still count as closed.
inline bool is_watertight( const TriangleMesh& mesh ) {
    if( mesh.triangles.empty() )
        return false;
    const auto ids = detail::position_ids( mesh );
    std::unordered_map<std::uint64_t, std::uint32_t> edges;
    edges.reserve( mesh.triangles.size() * 3 );
    for( const Triangle& t : mesh.triangles ) {
        for( int e = 0; e < 3; ++e ) {
            std::uint64_t a = ids[t[e]];
            std::uint64_t b = ids[t[( e + 1 ) % 3]];
            if( a > b )
                std::swap( a, b );
            ++edges[( a << 32 ) | b];
        }
    }
    for( const auto& [key, count] : edges ) {
        if( count % 2 != 0 )
            return false;
    }
    return true;
}

} // namespace foamforge
