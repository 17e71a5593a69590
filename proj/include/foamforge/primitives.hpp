// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <foamforge/mesh.hpp>

// Closed, outward-wound test and benchmark shapes.
namespace foamforge::primitives {

inline constexpr double pi = 3.14159265358979323846;

inline TriangleMesh box( const Vec3& lo, const Vec3& hi ) {
    TriangleMesh m;
    for( int c = 0; c < 8; ++c )
        m.vertices.push_back( { ( c & 1 ) ? hi.x : lo.x, ( c & 2 ) ? hi.y : lo.y, ( c & 4 ) ? hi.z : lo.z } );
    // Corner c has bit 0 = +x, bit 1 = +y, bit 2 = +z.
    const std::array<std::array<std::uint32_t, 4>, 6> faces{ { { 0, 4, 6, 2 },
                                                                { 1, 3, 7, 5 },
                                                                { 0, 1, 5, 4 },
                                                                { 2, 6, 7, 3 },
                                                                { 0, 2, 3, 1 },
                                                                { 4, 5, 7, 6 } } };
    for( const auto& f : faces ) {
        m.triangles.push_back( { f[0], f[1], f[2] } );
        m.triangles.push_back( { f[0], f[2], f[3] } );
    }
    return m;
}

/// Disjoint union of closed meshes (no boolean merge).
inline TriangleMesh merge( const std::vector<TriangleMesh>& parts ) {
    TriangleMesh m;
    for( const TriangleMesh& p : parts ) {
        const auto base = static_cast<std::uint32_t>( m.vertices.size() );
        m.vertices.insert( m.vertices.end(), p.vertices.begin(), p.vertices.end() );
        for( const Triangle& t : p.triangles )
            m.triangles.push_back( { t[0] + base, t[1] + base, t[2] + base } );
    }
    return m;
}

inline TriangleMesh translated( TriangleMesh m, const Vec3& offset ) {
    for( Vec3& v : m.vertices )
        v += offset;
    return m;
}

/// Ring in the xy-plane around the z axis; vertex count = major_segments * minor_segments.
inline TriangleMesh torus( double major_radius, double minor_radius, int major_segments, int minor_segments ) {
    TriangleMesh m;
    for( int a = 0; a < major_segments; ++a ) {
        const double u = 2.0 * pi * a / major_segments;
        for( int b = 0; b < minor_segments; ++b ) {
            const double v = 2.0 * pi * b / minor_segments;
            const double rr = major_radius + minor_radius * std::cos( v );
            m.vertices.push_back( { rr * std::cos( u ), rr * std::sin( u ), minor_radius * std::sin( v ) } );
        }
    }
    const auto id = [&]( int a, int b ) {
        return static_cast<std::uint32_t>( ( a % major_segments ) * minor_segments + ( b % minor_segments ) );
    };
    for( int a = 0; a < major_segments; ++a ) {
        for( int b = 0; b < minor_segments; ++b ) {
            m.triangles.push_back( { id( a, b ), id( a + 1, b ), id( a + 1, b + 1 ) } );
            m.triangles.push_back( { id( a, b ), id( a + 1, b + 1 ), id( a, b + 1 ) } );
        }
    }
    return m;
}

/// Latitude/longitude sphere around the origin.
inline TriangleMesh uv_sphere( double radius, int slices, int stacks ) {
    TriangleMesh m;
    m.vertices.push_back( { 0, 0, -radius } );
    for( int s = 1; s < stacks; ++s ) {
        const double phi = -pi / 2 + pi * s / stacks;
        for( int l = 0; l < slices; ++l ) {
            const double th = 2.0 * pi * l / slices;
            m.vertices.push_back(
                { radius * std::cos( phi ) * std::cos( th ), radius * std::cos( phi ) * std::sin( th ), radius * std::sin( phi ) } );
        }
    }
    m.vertices.push_back( { 0, 0, radius } );
    const auto ring = [&]( int s, int l ) { return static_cast<std::uint32_t>( 1 + ( s - 1 ) * slices + ( l % slices ) ); };
    const auto top = static_cast<std::uint32_t>( m.vertices.size() - 1 );
    for( int l = 0; l < slices; ++l ) {
        m.triangles.push_back( { 0, ring( 1, l + 1 ), ring( 1, l ) } );
        for( int s = 1; s + 1 < stacks; ++s ) {
            m.triangles.push_back( { ring( s, l ), ring( s, l + 1 ), ring( s + 1, l + 1 ) } );
            m.triangles.push_back( { ring( s, l ), ring( s + 1, l + 1 ), ring( s + 1, l ) } );
        }
        m.triangles.push_back( { ring( stacks - 1, l ), ring( stacks - 1, l + 1 ), top } );
    }
    return m;
}

/// Subdivided icosahedron projected onto the sphere.
inline TriangleMesh icosphere( double radius, int subdivisions ) {
    const double t = ( 1.0 + std::sqrt( 5.0 ) ) / 2.0;
    std::vector<Vec3> v{ { -1, t, 0 }, { 1, t, 0 }, { -1, -t, 0 }, { 1, -t, 0 }, { 0, -1, t }, { 0, 1, t },
                         { 0, -1, -t }, { 0, 1, -t }, { t, 0, -1 }, { t, 0, 1 }, { -t, 0, -1 }, { -t, 0, 1 } };
    std::vector<Triangle> f{ { 0, 11, 5 }, { 0, 5, 1 },  { 0, 1, 7 },   { 0, 7, 10 }, { 0, 10, 11 },
                             { 1, 5, 9 },  { 5, 11, 4 }, { 11, 10, 2 }, { 10, 7, 6 }, { 7, 1, 8 },
                             { 3, 9, 4 },  { 3, 4, 2 },  { 3, 2, 6 },   { 3, 6, 8 },  { 3, 8, 9 },
                             { 4, 9, 5 },  { 2, 4, 11 }, { 6, 2, 10 },  { 8, 6, 7 },  { 9, 8, 1 } };
    const auto unit = []( const Vec3& p ) { return p * ( 1.0 / length( p ) ); };
    for( Vec3& p : v )
        p = unit( p );
    for( int s = 0; s < subdivisions; ++s ) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
        const auto midpoint = [&]( std::uint32_t a, std::uint32_t b ) {
            const auto key = std::minmax( a, b );
            auto it = mid.find( key );
            if( it != mid.end() )
                return it->second;
            v.push_back( unit( ( v[a] + v[b] ) * 0.5 ) );
            const auto id = static_cast<std::uint32_t>( v.size() - 1 );
            mid.emplace( key, id );
            return id;
        };
        std::vector<Triangle> next;
        next.reserve( f.size() * 4 );
        for( const Triangle& tri : f ) {
            const auto ab = midpoint( tri[0], tri[1] ), bc = midpoint( tri[1], tri[2] ), ca = midpoint( tri[2], tri[0] );
            next.push_back( { tri[0], ab, ca } );
            next.push_back( { tri[1], bc, ab } );
            next.push_back( { tri[2], ca, bc } );
            next.push_back( { ab, bc, ca } );
        }
        f = std::move( next );
    }
    TriangleMesh m;
    m.vertices.reserve( v.size() );
    for( const Vec3& p : v )
        m.vertices.push_back( p * radius );
    m.triangles = std::move( f );
    return m;
}

/// Closed n-gon prism (rod) of the given radius between two points.
inline TriangleMesh rod( const Vec3& from, const Vec3& to, double radius, int segments ) {
    const Vec3 axis = to - from;
    const Vec3 dir = axis * ( 1.0 / length( axis ) );
    const Vec3 helper = std::abs( dir.x ) < 0.9 ? Vec3{ 1, 0, 0 } : Vec3{ 0, 1, 0 };
    Vec3 e1 = cross( dir, helper );
    e1 = e1 * ( 1.0 / length( e1 ) );
    const Vec3 e2 = cross( dir, e1 );
    TriangleMesh m;
    for( const Vec3& base : { from, to } ) {
        for( int s = 0; s < segments; ++s ) {
            const double a = 2.0 * pi * s / segments;
            m.vertices.push_back( base + e1 * ( radius * std::cos( a ) ) + e2 * ( radius * std::sin( a ) ) );
        }
    }
    m.vertices.push_back( from );
    m.vertices.push_back( to );
    const auto n = static_cast<std::uint32_t>( segments );
    const std::uint32_t cap0 = 2 * n, cap1 = 2 * n + 1;
    for( std::uint32_t s = 0; s < n; ++s ) {
        const std::uint32_t s1 = ( s + 1 ) % n;
        m.triangles.push_back( { s, s1, n + s1 } );
        m.triangles.push_back( { s, n + s1, n + s } );
        m.triangles.push_back( { cap0, s1, s } );
        m.triangles.push_back( { cap1, n + s, n + s1 } );
    }
    return m;
}

/// Square frame around the z axis: outer half-width `outer`, square hole of half-width `inner`,
/// z in [-half_height, half_height]. A genus-one solid whose hole is hidden from +-x.
inline TriangleMesh square_ring( double outer, double inner, double half_height ) {
    TriangleMesh m;
    const std::array<std::array<double, 2>, 4> dirs{ { { -1, -1 }, { 1, -1 }, { 1, 1 }, { -1, 1 } } };
    // Index layout: [level][ring][corner], level 0 = bottom, ring 0 = outer.
    for( double z : { -half_height, half_height } )
        for( double r : { outer, inner } )
            for( const auto& d : dirs )
                m.vertices.push_back( { d[0] * r, d[1] * r, z } );
    const auto id = []( int level, int ring, int c ) { return static_cast<std::uint32_t>( level * 8 + ring * 4 + ( c % 4 ) ); };
    const auto quad = [&]( std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d ) {
        m.triangles.push_back( { a, b, c } );
        m.triangles.push_back( { a, c, d } );
    };
    for( int c = 0; c < 4; ++c ) {
        // Corners run counter-clockwise seen from +z.
        quad( id( 0, 0, c ), id( 0, 0, c + 1 ), id( 1, 0, c + 1 ), id( 1, 0, c ) );
        quad( id( 0, 1, c ), id( 1, 1, c ), id( 1, 1, c + 1 ), id( 0, 1, c + 1 ) );
        quad( id( 1, 0, c ), id( 1, 0, c + 1 ), id( 1, 1, c + 1 ), id( 1, 1, c ) );
        quad( id( 0, 0, c ), id( 0, 1, c ), id( 0, 1, c + 1 ), id( 0, 0, c + 1 ) );
    }
    return m;
}

inline TriangleMesh tetrahedron( const Vec3& center, double size ) {
    TriangleMesh m;
    const double s = size / 2.0;
    m.vertices = { center + Vec3{ s, s, s }, center + Vec3{ s, -s, -s }, center + Vec3{ -s, s, -s },
                   center + Vec3{ -s, -s, s } };
    m.triangles = { { 0, 1, 2 }, { 0, 3, 1 }, { 0, 2, 3 }, { 1, 3, 2 } };
    return m;
}

} // namespace foamforge::primitives
