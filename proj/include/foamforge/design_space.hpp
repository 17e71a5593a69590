// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>

#include <fmt/format.h>

#include <foamforge/error.hpp>
#include <foamforge/vec3.hpp>

namespace foamforge {

/// The case interior: nx*ny*nz blocks of bx*by*bz mm, centered at the origin. Block (i,j,k)
/// spans x in [-W/2 + i*bx, -W/2 + (i+1)*bx] and analogously in y and z.
struct DesignSpace {
    int nx = 30;
    int ny = 18;
    int nz = 18;
    double bx = 15.0;
    double by = 15.0;
    double bz = 22.0;

    bool operator==( const DesignSpace& ) const = default;

    /// Defaults sized after a commercial slit-sponge foam.
    static DesignSpace defaults() { return {}; }

    double width() const { return nx * bx; }
    double height() const { return ny * by; }
    double depth() const { return nz * bz; }
    std::size_t block_count() const { return std::size_t( nx ) * std::size_t( ny ) * std::size_t( nz ); }
    double block_volume() const { return bx * by * bz; }

    double x_min( int i ) const { return -0.5 * width() + i * bx; }
    double y_min( int j ) const { return -0.5 * height() + j * by; }
    double z_min( int k ) const { return -0.5 * depth() + k * bz; }

    Vec3 block_center( int i, int j, int k ) const {
        return { x_min( i ) + 0.5 * bx, y_min( j ) + 0.5 * by, z_min( k ) + 0.5 * bz };
    }

    std::size_t index( int i, int j, int k ) const {
        return std::size_t( i ) + std::size_t( nx ) * ( std::size_t( j ) + std::size_t( ny ) * std::size_t( k ) );
    }
    std::size_t column( int j, int k ) const { return std::size_t( j ) + std::size_t( ny ) * std::size_t( k ); }
    std::size_t column_count() const { return std::size_t( ny ) * std::size_t( nz ); }
};

inline void validate( const DesignSpace& s ) {
    if( s.nx <= 0 || s.ny <= 0 || s.nz <= 0 )
        throw Error( ErrorCode::InvalidParams,
                     fmt::format( "block resolution must be positive, got {}x{}x{}", s.nx, s.ny, s.nz ) );
    const auto ok = []( double v ) { return std::isfinite( v ) && v > 0.0; };
    if( !ok( s.bx ) || !ok( s.by ) || !ok( s.bz ) )
        throw Error( ErrorCode::InvalidParams,
                     fmt::format( "block size must be positive, got {}x{}x{} mm", s.bx, s.by, s.bz ) );
}

} // namespace foamforge
