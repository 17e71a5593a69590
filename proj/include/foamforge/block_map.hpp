// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include <fmt/format.h>

#include <foamforge/depth_raster.hpp>
#include <foamforge/design_space.hpp>
#include <foamforge/error.hpp>
#include <foamforge/mesh.hpp>

namespace foamforge {

/// Foam is the provisional label produced by build_block_map; split_regions replaces it by
/// FoamPlus (extracted toward +x) or FoamMinus (extracted toward -x).
enum class Label : std::uint8_t { Occupied = 0, Foam = 1, FoamPlus = 2, FoamMinus = 3 };

inline bool is_foam( Label l ) { return l != Label::Occupied; }

struct BlockMapDiagnostics {
    std::int64_t occupied_blocks = 0;
    std::int64_t foam_blocks = 0;
    // Columns seen by one camera only (open or clipped input); they are left entirely foam.
    std::int64_t one_sided_columns = 0;

    bool operator==( const BlockMapDiagnostics& ) const = default;
};

struct BlockMap {
    DesignSpace space;
    std::vector<Label> labels;
    BlockMapDiagnostics diagnostics;

    BlockMap() = default;
    explicit BlockMap( const DesignSpace& s, Label fill = Label::Foam )
        : space( s )
        , labels( s.block_count(), fill ) {}

    Label at( int i, int j, int k ) const { return labels[space.index( i, j, k )]; }
    Label& at( int i, int j, int k ) { return labels[space.index( i, j, k )]; }

    std::int64_t count( Label l ) const { return std::count( labels.begin(), labels.end(), l ); }
    std::int64_t foam_count() const { return std::int64_t( labels.size() ) - count( Label::Occupied ); }

    bool operator==( const BlockMap& ) const = default;
};

/// BM = NOT(A AND B): a block is occupied when it lies at or behind the +x visible surface and
/// at or behind the -x visible surface. Everything else is (provisional) foam.
inline BlockMap build_block_map( const ColumnDepthMap& a, const ColumnDepthMap& b, const DesignSpace& space ) {
    validate( space );
    if( a.direction != Direction::PlusX || b.direction != Direction::MinusX )
        throw Error( ErrorCode::InvalidParams, "build_block_map expects the +x map first and the -x map second" );
    for( const ColumnDepthMap* m : { &a, &b } ) {
        if( m->ny != space.ny || m->nz != space.nz || m->index.size() != space.column_count() )
            throw Error( ErrorCode::DimensionMismatch,
                         fmt::format( "column map {}x{} vs space {}x{}", m->ny, m->nz, space.ny, space.nz ) );
    }

    BlockMap bm( space, Label::Foam );
    for( int k = 0; k < space.nz; ++k ) {
        for( int j = 0; j < space.ny; ++j ) {
            const int hi = a.at( j, k );
            const int lo = b.at( j, k );
            if( ( hi == ColumnDepthMap::EMPTY ) != ( lo == ColumnDepthMap::EMPTY ) ) {
                ++bm.diagnostics.one_sided_columns;
                continue;
            }
            if( hi == ColumnDepthMap::EMPTY )
                continue;
            for( int i = std::max( lo, 0 ); i <= std::min( hi, space.nx - 1 ); ++i )
                bm.at( i, j, k ) = Label::Occupied;
        }
    }
    bm.diagnostics.occupied_blocks = bm.count( Label::Occupied );
    bm.diagnostics.foam_blocks = std::int64_t( bm.labels.size() ) - bm.diagnostics.occupied_blocks;
    return bm;
}

/// Splits foam into the +x and -x height fields.
///
/// Columns crossing the object are forced: foam beyond the occupied run goes to the camera side
/// it faces. Columns the object never crosses are labeled by growing both regions breadth-first
/// (6-connected, one layer at a time) from the i = nx-1 and i = 0 faces; a block reached by
/// both fronts in the same layer goes to FoamPlus when 2i >= nx. Each such column is then cut at
/// its lowest FoamPlus block so that both regions stay one contiguous run anchored at a face.
inline BlockMap split_regions( BlockMap bm ) {
    const DesignSpace& s = bm.space;
    const int nx = s.nx, ny = s.ny, nz = s.nz;
    constexpr std::uint8_t MINUS = 1, PLUS = 2;

    std::vector<std::uint8_t> grown( bm.labels.size(), 0 );
    std::vector<std::int32_t> layer( bm.labels.size(), -1 );
    std::vector<std::size_t> frontier, next;

    const auto resolve = [&]( std::size_t idx, int i ) {
        if( grown[idx] == ( MINUS | PLUS ) )
            grown[idx] = 2 * i >= nx ? PLUS : MINUS;
    };

    for( int k = 0; k < nz; ++k ) {
        for( int j = 0; j < ny; ++j ) {
            for( const auto& [i, bit] : { std::pair{ 0, MINUS }, std::pair{ nx - 1, PLUS } } ) {
                const std::size_t idx = s.index( i, j, k );
                if( !is_foam( bm.labels[idx] ) )
                    continue;
                if( layer[idx] < 0 )
                    frontier.push_back( idx );
                layer[idx] = 0;
                grown[idx] |= bit;
            }
        }
    }
    for( std::size_t idx : frontier )
        resolve( idx, static_cast<int>( idx % nx ) );

    for( std::int32_t depth = 0; !frontier.empty(); ++depth ) {
        next.clear();
        for( std::size_t idx : frontier ) {
            const int i = static_cast<int>( idx % nx );
            const int j = static_cast<int>( ( idx / nx ) % ny );
            const int k = static_cast<int>( idx / ( std::size_t( nx ) * ny ) );
            const std::array<std::array<int, 3>, 6> nbrs{ { { i - 1, j, k },
                                                             { i + 1, j, k },
                                                             { i, j - 1, k },
                                                             { i, j + 1, k },
                                                             { i, j, k - 1 },
                                                             { i, j, k + 1 } } };
            for( const auto& n : nbrs ) {
                if( n[0] < 0 || n[0] >= nx || n[1] < 0 || n[1] >= ny || n[2] < 0 || n[2] >= nz )
                    continue;
                const std::size_t nidx = s.index( n[0], n[1], n[2] );
                if( !is_foam( bm.labels[nidx] ) )
                    continue;
                if( layer[nidx] < 0 ) {
                    layer[nidx] = depth + 1;
                    next.push_back( nidx );
                }
                if( layer[nidx] == depth + 1 )
                    grown[nidx] |= grown[idx];
            }
        }
        for( std::size_t idx : next )
            resolve( idx, static_cast<int>( idx % nx ) );
        std::swap( frontier, next );
    }

    for( int k = 0; k < nz; ++k ) {
        for( int j = 0; j < ny; ++j ) {
            int lo = nx, hi = -1;
            for( int i = 0; i < nx; ++i ) {
                if( bm.at( i, j, k ) == Label::Occupied ) {
                    lo = std::min( lo, i );
                    hi = std::max( hi, i );
                }
            }
            if( hi >= 0 ) {
                for( int i = 0; i < nx; ++i ) {
                    if( i < lo )
                        bm.at( i, j, k ) = Label::FoamMinus;
                    else if( i > hi )
                        bm.at( i, j, k ) = Label::FoamPlus;
                }
                continue;
            }
            int cut = nx;
            for( int i = 0; i < nx; ++i ) {
                if( grown[s.index( i, j, k )] == PLUS ) {
                    cut = i;
                    break;
                }
            }
            for( int i = 0; i < nx; ++i )
                bm.at( i, j, k ) = i < cut ? Label::FoamMinus : Label::FoamPlus;
        }
    }
    return bm;
}

struct GapReport {
    std::int64_t occupied_blocks = 0;
    std::int64_t solid_blocks = 0;
    // Signed: the conservative occupied set can miss a block whose center is inside the mesh.
    std::int64_t gap_blocks = 0;
    double gap_mm3 = 0.0;
};

namespace detail {

// Sorted x coordinates where the ray {(t, y, z)} crosses the mesh. Returns false when the ray
// grazes an edge or vertex of a candidate triangle.
inline bool ray_crossings( const TriangleMesh& mesh, const std::vector<std::uint32_t>& candidates, double y, double z,
                           std::vector<double>& out ) {
    out.clear();
    for( std::uint32_t t : candidates ) {
        const Vec3 a = mesh.corner( t, 0 ), b = mesh.corner( t, 1 ), c = mesh.corner( t, 2 );
        const double area = ( b.y - a.y ) * ( c.z - a.z ) - ( b.z - a.z ) * ( c.y - a.y );
        const double e0 = ( c.y - b.y ) * ( z - b.z ) - ( c.z - b.z ) * ( y - b.y );
        const double e1 = ( a.y - c.y ) * ( z - c.z ) - ( a.z - c.z ) * ( y - c.y );
        const double e2 = ( b.y - a.y ) * ( z - a.z ) - ( b.z - a.z ) * ( y - a.y );
        const double tol = 1e-10 * std::abs( area );
        const bool pos = e0 > tol && e1 > tol && e2 > tol;
        const bool neg = e0 < -tol && e1 < -tol && e2 < -tol;
        if( pos || neg ) {
            out.push_back( ( e0 * a.x + e1 * b.x + e2 * c.x ) / ( e0 + e1 + e2 ) );
            continue;
        }
        const bool outside = ( e0 < -tol || e1 < -tol || e2 < -tol ) && ( e0 > tol || e1 > tol || e2 > tol );
        if( !outside && area != 0.0 )
            return false;
        if( area == 0.0 ) {
            // Edge-on triangle: degenerate only if the ray actually meets its projected segment.
            const double ylo = std::min( { a.y, b.y, c.y } ), yhi = std::max( { a.y, b.y, c.y } );
            const double zlo = std::min( { a.z, b.z, c.z } ), zhi = std::max( { a.z, b.z, c.z } );
            if( y >= ylo && y <= yhi && z >= zlo && z <= zhi && e0 == 0.0 && e1 == 0.0 && e2 == 0.0 )
                return false;
        }
    }
    std::sort( out.begin(), out.end() );
    return true;
}

} // namespace detail

/// Solid voxelization by crossing parity at block centers: a block is solid when the +x ray
/// from x = -inf to its center crosses the surface an odd number of times. Rays that graze an
/// edge are shifted by +bz/1000 in z, at most three times.
inline std::vector<bool> solid_voxels( const TriangleMesh& mesh, const DesignSpace& space ) {
    validate( space );
    if( !is_watertight( mesh ) )
        throw Error( ErrorCode::Unavailable, "parity voxelization needs a closed mesh" );
    constexpr int max_perturbations = 3;
    const double half_h = 0.5 * space.height(), half_d = 0.5 * space.depth();
    const double shift = space.bz / 1000.0;

    std::vector<std::vector<std::uint32_t>> bins( space.column_count() );
    for( std::uint32_t t = 0; t < mesh.triangles.size(); ++t ) {
        const Vec3 a = mesh.corner( t, 0 ), b = mesh.corner( t, 1 ), c = mesh.corner( t, 2 );
        const double ylo = std::min( { a.y, b.y, c.y } ), yhi = std::max( { a.y, b.y, c.y } );
        const double zlo = std::min( { a.z, b.z, c.z } ) - max_perturbations * shift;
        const double zhi = std::max( { a.z, b.z, c.z } );
        const int j0 = std::max( 0, static_cast<int>( std::ceil( ( ylo + half_h ) / space.by - 0.5 ) ) );
        const int j1 = std::min( space.ny - 1, static_cast<int>( std::floor( ( yhi + half_h ) / space.by - 0.5 ) ) );
        const int k0 = std::max( 0, static_cast<int>( std::ceil( ( zlo + half_d ) / space.bz - 0.5 ) ) );
        const int k1 = std::min( space.nz - 1, static_cast<int>( std::floor( ( zhi + half_d ) / space.bz - 0.5 ) ) );
        for( int k = k0; k <= k1; ++k )
            for( int j = j0; j <= j1; ++j )
                bins[space.column( j, k )].push_back( t );
    }

    std::vector<bool> solid( space.block_count(), false );
    std::vector<double> hits;
    for( int k = 0; k < space.nz; ++k ) {
        for( int j = 0; j < space.ny; ++j ) {
            const Vec3 c0 = space.block_center( 0, j, k );
            bool ok = false;
            for( int attempt = 0; attempt <= max_perturbations && !ok; ++attempt )
                ok = detail::ray_crossings( mesh, bins[space.column( j, k )], c0.y, c0.z + attempt * shift, hits );
            if( !ok )
                throw Error( ErrorCode::DegenerateRay, fmt::format( "column ({},{}) grazes mesh edges", j, k ) );
            std::size_t passed = 0;
            for( int i = 0; i < space.nx; ++i ) {
                const double xc = space.block_center( i, j, k ).x;
                while( passed < hits.size() && hits[passed] < xc )
                    ++passed;
                solid[space.index( i, j, k )] = passed % 2 == 1;
            }
        }
    }
    return solid;
}

/// Occupied-block count minus parity-solid count, in blocks and mm^3. Throws Unavailable for
/// meshes with open boundaries.
inline GapReport gap_volume( const BlockMap& bm, const TriangleMesh& mesh, const DesignSpace& space ) {
    if( !( bm.space == space ) )
        throw Error( ErrorCode::DimensionMismatch, "block map and design space differ" );
    const auto solid = solid_voxels( mesh, space );
    GapReport r;
    r.occupied_blocks = bm.count( Label::Occupied );
    r.solid_blocks = std::count( solid.begin(), solid.end(), true );
    r.gap_blocks = r.occupied_blocks - r.solid_blocks;
    r.gap_mm3 = double( r.gap_blocks ) * space.block_volume();
    return r;
}

} // namespace foamforge
