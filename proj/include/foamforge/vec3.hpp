// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

namespace foamforge {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3( double x_, double y_, double z_ )
        : x( x_ )
        , y( y_ )
        , z( z_ ) {}

    constexpr double operator[]( int axis ) const { return axis == 0 ? x : ( axis == 1 ? y : z ); }
    constexpr double& operator[]( int axis ) { return axis == 0 ? x : ( axis == 1 ? y : z ); }

    constexpr Vec3 operator+( const Vec3& o ) const { return { x + o.x, y + o.y, z + o.z }; }
    constexpr Vec3 operator-( const Vec3& o ) const { return { x - o.x, y - o.y, z - o.z }; }
    constexpr Vec3 operator*( double s ) const { return { x * s, y * s, z * s }; }
    constexpr Vec3& operator+=( const Vec3& o ) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr bool operator==( const Vec3& ) const = default;
};

constexpr double dot( const Vec3& a, const Vec3& b ) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross( const Vec3& a, const Vec3& b ) {
    return { a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x };
}

inline double length( const Vec3& v ) { return std::sqrt( dot( v, v ) ); }

inline double distance( const Vec3& a, const Vec3& b ) { return length( a - b ); }

} // namespace foamforge
