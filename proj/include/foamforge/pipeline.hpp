// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <foamforge/block_map.hpp>
#include <foamforge/depth_raster.hpp>
#include <foamforge/design_space.hpp>
#include <foamforge/foam_export.hpp>
#include <foamforge/mesh.hpp>

namespace foamforge {

inline constexpr int DEFAULT_SUPERSAMPLE = 8;

struct GenerationParams {
    DesignSpace space;
    EulerAngles angles;
    int supersample = DEFAULT_SUPERSAMPLE;
    // Rasterization worker count; results do not depend on it.
    int threads = 1;

    bool operator==( const GenerationParams& ) const = default;
};

/// rotate -> render +x/-x -> reduce -> build. The mesh is rotated about the origin, so callers
/// center it once after loading.
inline BlockMap compute_block_map( const TriangleMesh& mesh, const DesignSpace& space, const EulerAngles& angles,
                                   int supersample = DEFAULT_SUPERSAMPLE, int threads = 1 ) {
    validate( space );
    std::vector<Vec3> rotated;
    std::span<const Vec3> vertices = mesh.vertices;
    if( !( angles == EulerAngles{} ) ) {
        const Mat3 r = rotation_matrix( angles );
        rotated.reserve( mesh.vertices.size() );
        for( const Vec3& v : mesh.vertices )
            rotated.push_back( transform( r, v ) );
        vertices = rotated;
    }
    const auto [plus, minus] = render_depth_pair( vertices, mesh.triangles, space, supersample, threads );
    return build_block_map( reduce_to_blocks( plus, space ), reduce_to_blocks( minus, space ), space );
}

/// The interactive generation step: compute_block_map followed by the region split.
inline BlockMap generate_block_map( const TriangleMesh& mesh, const GenerationParams& params ) {
    return split_regions(
        compute_block_map( mesh, params.space, params.angles, params.supersample, params.threads ) );
}

struct FoamResult {
    GenerationParams params;
    BlockMap block_map;
    TriangleMesh mesh_plus;
    TriangleMesh mesh_minus;
    SliceStack slices;
    // Wall-clock time of generate_block_map only; export and gap metrics are excluded.
    double timing_ms = 0.0;
    std::optional<GapReport> gap;
    std::string gap_unavailable_reason;

    double foam_fraction() const {
        return double( block_map.foam_count() ) / double( block_map.space.block_count() );
    }
};

inline FoamResult generate_foam( const TriangleMesh& mesh, const GenerationParams& params ) {
    FoamResult r;
    r.params = params;
    const auto t0 = std::chrono::steady_clock::now();
    r.block_map = generate_block_map( mesh, params );
    r.timing_ms = std::chrono::duration<double, std::milli>( std::chrono::steady_clock::now() - t0 ).count();
    r.mesh_plus = extract_region_mesh( r.block_map, Label::FoamPlus );
    r.mesh_minus = extract_region_mesh( r.block_map, Label::FoamMinus );
    r.slices = extract_slices( r.block_map );
    try {
        r.gap = gap_volume( r.block_map, rotate_mesh( mesh, params.angles ), params.space );
    } catch( const Error& e ) {
        if( e.code() != ErrorCode::Unavailable && e.code() != ErrorCode::DegenerateRay )
            throw;
        r.gap_unavailable_reason = e.what();
    }
    return r;
}

} // namespace foamforge
