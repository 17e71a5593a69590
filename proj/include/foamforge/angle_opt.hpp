// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include <foamforge/design_space.hpp>
#include <foamforge/error.hpp>
#include <foamforge/mesh.hpp>
#include <foamforge/pipeline.hpp>

namespace foamforge {

/// Greedy per-axis sweep schedule. Axes are always visited psi, theta, phi.
struct OptimizerConfig {
    double step = 5.0;
    int max_rounds = 10;
    int supersample = DEFAULT_SUPERSAMPLE;
    // Candidate evaluations of one sweep may run concurrently; the outcome is unaffected.
    int threads = 1;

    int steps_per_turn() const { return static_cast<int>( std::lround( 360.0 / step ) ); }
};

inline void validate( const OptimizerConfig& cfg ) {
    if( !( cfg.step > 0.0 ) || !std::isfinite( cfg.step ) || std::abs( 360.0 / cfg.step - cfg.steps_per_turn() ) > 1e-9 )
        throw Error( ErrorCode::InvalidParams, fmt::format( "step {} must divide 360", cfg.step ) );
    if( cfg.max_rounds < 1 )
        throw Error( ErrorCode::InvalidParams, "max_rounds must be at least 1" );
    if( cfg.supersample < 1 )
        throw Error( ErrorCode::InvalidParams, "supersample must be at least 1" );
}

struct ScoreEvaluation {
    EulerAngles angles;
    double score = 0.0;
};

struct ScoreReport {
    EulerAngles angles;
    double F = 0.0;
    double start_F = 0.0;
    int rounds_used = 0;
    int evaluations = 0;
    // Score after every accepted move, in order.
    std::vector<double> accepted;
    // Every distinct pipeline evaluation, in evaluation order.
    std::vector<ScoreEvaluation> log;
};

/// Normalized foam volume |BM| / (nx*ny*nz) of the mesh in the given pose.
inline double foam_volume_score( const TriangleMesh& mesh, const DesignSpace& space, const EulerAngles& angles,
                                 int supersample = DEFAULT_SUPERSAMPLE ) {
    const BlockMap bm = compute_block_map( mesh, space, angles, supersample );
    return double( bm.foam_count() ) / double( space.block_count() );
}

/// Coordinate ascent on the foam score. Each axis in turn is swept over a full turn in steps of
/// `step` with the other two held; the pose moves only on a strict improvement, to the smallest
/// angle attaining the sweep maximum. Stops after max_rounds or a round without moves.
inline ScoreReport optimize_rotation( const TriangleMesh& mesh, const DesignSpace& space, const OptimizerConfig& cfg,
                                      const EulerAngles& start = {} ) {
    validate( cfg );
    validate( space );
    if( !is_finite( start ) )
        throw Error( ErrorCode::InvalidParams, "start angles must be finite" );

    ScoreReport report;
    std::map<std::array<double, 3>, double> cache;
    const auto key = []( const EulerAngles& a ) { return std::array<double, 3>{ a.psi, a.theta, a.phi }; };

    const auto evaluate_all = [&]( const std::vector<EulerAngles>& poses ) {
        std::vector<EulerAngles> todo;
        for( const EulerAngles& p : poses ) {
            if( !cache.contains( key( p ) ) &&
                std::none_of( todo.begin(), todo.end(), [&]( const EulerAngles& q ) { return q == p; } ) )
                todo.push_back( p );
        }
        std::vector<double> scores( todo.size() );
        const std::size_t workers = std::clamp<std::size_t>( std::size_t( std::max( cfg.threads, 1 ) ), 1,
                                                             std::max<std::size_t>( todo.size(), 1 ) );
        if( workers == 1 ) {
            for( std::size_t t = 0; t < todo.size(); ++t )
                scores[t] = foam_volume_score( mesh, space, todo[t], cfg.supersample );
        } else {
            std::vector<std::jthread> pool;
            for( std::size_t w = 0; w < workers; ++w ) {
                pool.emplace_back( [&, w] {
                    for( std::size_t t = w; t < todo.size(); t += workers )
                        scores[t] = foam_volume_score( mesh, space, todo[t], cfg.supersample );
                } );
            }
        }
        for( std::size_t t = 0; t < todo.size(); ++t ) {
            cache.emplace( key( todo[t] ), scores[t] );
            report.log.push_back( { todo[t], scores[t] } );
        }
    };

    EulerAngles current = canonical( start );
    evaluate_all( { current } );
    double best = cache.at( key( current ) );
    report.start_F = best;

    const int n = cfg.steps_per_turn();
    for( int round = 1; round <= cfg.max_rounds; ++round ) {
        report.rounds_used = round;
        bool moved = false;
        for( int axis = 0; axis < 3; ++axis ) {
            // The step lattice through the current angle; on-grid poses see plain multiples of step.
            std::vector<EulerAngles> candidates;
            candidates.reserve( n );
            for( int m = 0; m < n; ++m ) {
                EulerAngles c = current;
                c[axis] = canonical_degrees( current[axis] + ( m <= n / 2 ? m : m - n ) * cfg.step );
                candidates.push_back( c );
            }
            evaluate_all( candidates );
            double sweep_max = best;
            for( const EulerAngles& c : candidates )
                sweep_max = std::max( sweep_max, cache.at( key( c ) ) );
            const EulerAngles* chosen = nullptr;
            if( sweep_max > best ) {
                for( const EulerAngles& c : candidates )
                    if( cache.at( key( c ) ) == sweep_max && ( !chosen || c[axis] < ( *chosen )[axis] ) )
                        chosen = &c;
                best = sweep_max;
            }
            if( chosen && !( *chosen == current ) ) {
                current = *chosen;
                report.accepted.push_back( best );
                moved = true;
            }
        }
        if( !moved )
            break;
    }
    report.angles = current;
    report.F = best;
    report.evaluations = static_cast<int>( cache.size() );
    return report;
}

} // namespace foamforge
