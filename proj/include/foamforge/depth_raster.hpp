// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include <foamforge/design_space.hpp>
#include <foamforge/error.hpp>
#include <foamforge/mesh.hpp>

namespace foamforge {

enum class Direction { PlusX, MinusX };

/// Orthographic depth image seen from the +x or -x camera. Texel (u,v) samples the ray with
/// constant (y,z) at the texel center; u runs along y, v along z.
struct DepthTexture {
    static constexpr double NO_HIT = std::numeric_limits<double>::quiet_NaN();

    Direction direction = Direction::PlusX;
    int width = 0;
    int height = 0;
    int supersample = 1;
    std::vector<double> values;

    static bool is_hit( double v ) { return !std::isnan( v ); }

    double at( int u, int v ) const { return values[std::size_t( u ) + std::size_t( width ) * std::size_t( v )]; }
    double& at( int u, int v ) { return values[std::size_t( u ) + std::size_t( width ) * std::size_t( v )]; }
};

/// Depth texture reduced to block resolution: one x block index per (j,k) column.
struct ColumnDepthMap {
    static constexpr std::int32_t EMPTY = -1;

    Direction direction = Direction::PlusX;
    int ny = 0;
    int nz = 0;
    std::vector<std::int32_t> index;

    ColumnDepthMap() = default;
    ColumnDepthMap( Direction dir, int ny_, int nz_ )
        : direction( dir )
        , ny( ny_ )
        , nz( nz_ )
        , index( std::size_t( ny_ ) * std::size_t( nz_ ), EMPTY ) {}

    std::int32_t at( int j, int k ) const { return index[std::size_t( j ) + std::size_t( ny ) * std::size_t( k )]; }
    std::int32_t& at( int j, int k ) { return index[std::size_t( j ) + std::size_t( ny ) * std::size_t( k )]; }

    bool operator==( const ColumnDepthMap& ) const = default;
};

namespace detail {

inline DepthTexture blank_texture( const DesignSpace& space, Direction dir, int supersample ) {
    DepthTexture tex;
    tex.direction = dir;
    tex.supersample = supersample;
    tex.width = space.ny * supersample;
    tex.height = space.nz * supersample;
    tex.values.assign( std::size_t( tex.width ) * std::size_t( tex.height ), DepthTexture::NO_HIT );
    return tex;
}

// Scan-converts triangles [first, last) into both textures. A texel is covered when its center
// lies inside or on the projected (y,z) triangle; the depth is the barycentric interpolation of
// the corner x values, which is exactly the x of the ray/plane intersection.
inline void rasterize_range( std::span<const Vec3> vertices, std::span<const Triangle> triangles,
                             const DesignSpace& space, DepthTexture& plus, DepthTexture& minus ) {
    const double half_w = 0.5 * space.width();
    const double half_h = 0.5 * space.height();
    const double half_d = 0.5 * space.depth();
    const double ty = space.by / plus.supersample;
    const double tz = space.bz / plus.supersample;
    const int w = plus.width;
    const int h = plus.height;

    for( const Triangle& t : triangles ) {
        const Vec3& a = vertices[t[0]];
        const Vec3& b = vertices[t[1]];
        const Vec3& c = vertices[t[2]];
        const double area = ( b.y - a.y ) * ( c.z - a.z ) - ( b.z - a.z ) * ( c.y - a.y );
        // Triangles parallel to the view direction are only seen edge-on; their neighbours cover them.
        if( area == 0.0 || !std::isfinite( area ) )
            continue;
        const double sign = area > 0.0 ? 1.0 : -1.0;

        const double ylo = std::min( { a.y, b.y, c.y } ), yhi = std::max( { a.y, b.y, c.y } );
        const double zlo = std::min( { a.z, b.z, c.z } ), zhi = std::max( { a.z, b.z, c.z } );
        const int u0 = std::max( 0, static_cast<int>( std::ceil( ( ylo + half_h ) / ty - 0.5 ) ) );
        const int u1 = std::min( w - 1, static_cast<int>( std::floor( ( yhi + half_h ) / ty - 0.5 ) ) );
        const int v0 = std::max( 0, static_cast<int>( std::ceil( ( zlo + half_d ) / tz - 0.5 ) ) );
        const int v1 = std::min( h - 1, static_cast<int>( std::floor( ( zhi + half_d ) / tz - 0.5 ) ) );
        if( u0 > u1 || v0 > v1 )
            continue;
        const double xlo = std::max( std::min( { a.x, b.x, c.x } ), -half_w );
        const double xhi = std::min( std::max( { a.x, b.x, c.x } ), half_w );

        for( int v = v0; v <= v1; ++v ) {
            const double z = -half_d + ( v + 0.5 ) * tz;
            for( int u = u0; u <= u1; ++u ) {
                const double y = -half_h + ( u + 0.5 ) * ty;
                const double e0 = sign * ( ( c.y - b.y ) * ( z - b.z ) - ( c.z - b.z ) * ( y - b.y ) );
                const double e1 = sign * ( ( a.y - c.y ) * ( z - c.z ) - ( a.z - c.z ) * ( y - c.y ) );
                const double e2 = sign * ( ( b.y - a.y ) * ( z - a.z ) - ( b.z - a.z ) * ( y - a.y ) );
                if( e0 < 0.0 || e1 < 0.0 || e2 < 0.0 )
                    continue;
                const double sum = e0 + e1 + e2;
                if( sum <= 0.0 )
                    continue;
                const double x = std::clamp( ( e0 * a.x + e1 * b.x + e2 * c.x ) / sum, xlo, xhi );
                double& p = plus.at( u, v );
                double& m = minus.at( u, v );
                if( !DepthTexture::is_hit( p ) || x > p )
                    p = x;
                if( !DepthTexture::is_hit( m ) || x < m )
                    m = x;
            }
        }
    }
}

inline void merge_into( DepthTexture& dst, const DepthTexture& src ) {
    const bool plus = dst.direction == Direction::PlusX;
    for( std::size_t i = 0; i < dst.values.size(); ++i ) {
        const double s = src.values[i];
        if( !DepthTexture::is_hit( s ) )
            continue;
        double& d = dst.values[i];
        if( !DepthTexture::is_hit( d ) || ( plus ? s > d : s < d ) )
            d = s;
    }
}

} // namespace detail

/// Renders the +x and -x depth textures in one pass over the triangles. With threads > 1 the
/// triangle list is split into chunks rendered into private textures and merged by max/min, so
/// the result is bit-identical to the sequential one. Hits outside the space clamp to its x range.
inline std::pair<DepthTexture, DepthTexture> render_depth_pair( std::span<const Vec3> vertices,
                                                                std::span<const Triangle> triangles,
                                                                const DesignSpace& space, int supersample,
                                                                int threads = 1 ) {
    validate( space );
    if( supersample < 1 )
        throw Error( ErrorCode::InvalidParams, fmt::format( "supersample must be >= 1, got {}", supersample ) );
    DepthTexture plus = detail::blank_texture( space, Direction::PlusX, supersample );
    DepthTexture minus = detail::blank_texture( space, Direction::MinusX, supersample );

    const std::size_t chunks = std::clamp<std::size_t>( threads < 1 ? 1 : std::size_t( threads ), 1,
                                                        std::max<std::size_t>( 1, triangles.size() / 4096 ) );
    if( chunks == 1 ) {
        detail::rasterize_range( vertices, triangles, space, plus, minus );
        return { std::move( plus ), std::move( minus ) };
    }
    std::vector<std::pair<DepthTexture, DepthTexture>> partial( chunks, { plus, minus } );
    {
        std::vector<std::jthread> workers;
        const std::size_t per = ( triangles.size() + chunks - 1 ) / chunks;
        for( std::size_t c = 0; c < chunks; ++c ) {
            const std::size_t first = std::min( triangles.size(), c * per );
            const std::size_t count = std::min( triangles.size() - first, per );
            workers.emplace_back( [&, c, first, count] {
                detail::rasterize_range( vertices, triangles.subspan( first, count ), space, partial[c].first,
                                         partial[c].second );
            } );
        }
    }
    for( const auto& [p, m] : partial ) {
        detail::merge_into( plus, p );
        detail::merge_into( minus, m );
    }
    return { std::move( plus ), std::move( minus ) };
}

inline DepthTexture render_depth( const TriangleMesh& mesh, const DesignSpace& space, Direction direction,
                                  int supersample ) {
    auto [plus, minus] = render_depth_pair( mesh.vertices, mesh.triangles, space, supersample );
    return direction == Direction::PlusX ? std::move( plus ) : std::move( minus );
}

/// Block index holding an x coordinate. Values on a block boundary go to the higher block for
/// the +x map and to the lower block for the -x map, so both maps err toward the object.
inline int block_index_for_depth( double x, const DesignSpace& space, Direction direction ) {
    const double t = ( x + 0.5 * space.width() ) / space.bx;
    const double i = direction == Direction::PlusX ? std::floor( t ) : std::ceil( t ) - 1.0;
    return static_cast<int>( std::clamp( i, 0.0, double( space.nx - 1 ) ) );
}

/// Pools each s*s texel footprint to one block index: max depth for +x, min depth for -x.
/// Footprints without any hit become EMPTY.
inline ColumnDepthMap reduce_to_blocks( const DepthTexture& tex, const DesignSpace& space ) {
    validate( space );
    const int s = tex.supersample;
    if( s < 1 || tex.width != space.ny * s || tex.height != space.nz * s ||
        tex.values.size() != std::size_t( tex.width ) * std::size_t( tex.height ) )
        throw Error( ErrorCode::DimensionMismatch,
                     fmt::format( "texture {}x{} (s={}) does not match {}x{} columns", tex.width, tex.height, s,
                                  space.ny, space.nz ) );
    const bool plus = tex.direction == Direction::PlusX;
    ColumnDepthMap map( tex.direction, space.ny, space.nz );
    for( int k = 0; k < space.nz; ++k ) {
        for( int j = 0; j < space.ny; ++j ) {
            bool hit = false;
            double pooled = 0.0;
            for( int v = k * s; v < ( k + 1 ) * s; ++v ) {
                for( int u = j * s; u < ( j + 1 ) * s; ++u ) {
                    const double d = tex.at( u, v );
                    if( !DepthTexture::is_hit( d ) )
                        continue;
                    if( !hit || ( plus ? d > pooled : d < pooled ) )
                        pooled = d;
                    hit = true;
                }
            }
            if( hit )
                map.at( j, k ) = block_index_for_depth( pooled, space, tex.direction );
        }
    }
    return map;
}

} // namespace foamforge
