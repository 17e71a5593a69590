// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include <foamforge/angle_opt.hpp>
#include <foamforge/primitives.hpp>

#include "oracles.hpp"

using namespace foamforge;

namespace {

const DesignSpace kCubeSpace{ 8, 8, 8, 10, 10, 10 };

TriangleMesh inset_cube() {
    const double eps = 1e-6;
    return primitives::box( { -20 + eps, -20 + eps, -20 + eps }, { 20 - eps, 20 - eps, 20 - eps } );
}

OptimizerConfig coarse( double step ) {
    OptimizerConfig cfg;
    cfg.step = step;
    cfg.supersample = 2;
    return cfg;
}

void expect_contract( const TriangleMesh& mesh, const DesignSpace& s, const OptimizerConfig& cfg,
                      const ScoreReport& r, const EulerAngles& start ) {
    EXPECT_GE( r.F, r.start_F );
    EXPECT_DOUBLE_EQ( r.start_F, foam_volume_score( mesh, s, canonical( start ), cfg.supersample ) );
    for( std::size_t a = 1; a < r.accepted.size(); ++a )
        EXPECT_GE( r.accepted[a], r.accepted[a - 1] );
    EXPECT_LE( r.evaluations, 1 + cfg.max_rounds * 3 * cfg.steps_per_turn() );
    EXPECT_EQ( std::size_t( r.evaluations ), r.log.size() );
    double best = 0.0;
    for( const auto& e : r.log )
        best = std::max( best, e.score );
    EXPECT_EQ( r.F, best );
    EXPECT_DOUBLE_EQ( foam_volume_score( mesh, s, r.angles, cfg.supersample ), r.F );
    if( r.rounds_used < cfg.max_rounds ) {
        for( int axis = 0; axis < 3; ++axis )
            for( double d : { -cfg.step, cfg.step } ) {
                EulerAngles p = r.angles;
                p[axis] = canonical_degrees( p[axis] + d );
                EXPECT_LE( foam_volume_score( mesh, s, p, cfg.supersample ), r.F );
            }
    }
}

} // namespace

TEST( FoamScore, EmptyMeshIsAllFoam ) {
    EXPECT_EQ( foam_volume_score( TriangleMesh{}, kCubeSpace, {} ), 1.0 );
}

TEST( FoamScore, FullSpanObjectLeavesNoFoam ) {
    const auto slab = primitives::box( { -41, -41, -41 }, { 41, 41, 41 } );
    EXPECT_EQ( foam_volume_score( slab, kCubeSpace, {} ), 0.0 );
}

TEST( FoamScore, InsetCube ) {
    EXPECT_EQ( foam_volume_score( inset_cube(), kCubeSpace, {} ), 0.875 );
}

TEST( FoamScore, AlignedCubeQuarterTurnsAreBest ) {
    const auto cube = inset_cube();
    std::vector<double> f;
    for( int m = 0; m < 72; ++m )
        f.push_back( foam_volume_score( cube, kCubeSpace, { m * 5.0, 0, 0 }, 16 ) );
    const double best = *std::max_element( f.begin(), f.end() );
    EXPECT_EQ( best, f[0] );
    EXPECT_EQ( f[18], f[0] );
    EXPECT_LT( f[9], f[0] );
    for( int m = 0; m < 72; ++m ) {
        if( m % 18 != 0 ) {
            EXPECT_LT( f[m], best ) << m * 5;
        }
    }
}

TEST( Optimizer, AlignedCubeStaysPut ) {
    const auto cfg = coarse( 15 );
    const auto r = optimize_rotation( inset_cube(), kCubeSpace, cfg );
    EXPECT_EQ( r.angles, ( EulerAngles{ 0, 0, 0 } ) );
    EXPECT_EQ( r.F, 0.875 );
    EXPECT_EQ( r.rounds_used, 1 );
    EXPECT_TRUE( r.accepted.empty() );
}

TEST( Optimizer, SymmetricSphereKeepsStartAngles ) {
    const DesignSpace s{ 5, 5, 5, 10, 10, 10 };
    const auto sphere = primitives::icosphere( 12, 2 );
    for( const EulerAngles start : { EulerAngles{ 0, 0, 0 }, EulerAngles{ 30, 45, 60 }, EulerAngles{ 7, 0, 0 } } ) {
        const auto r = optimize_rotation( sphere, s, coarse( 30 ), start );
        EXPECT_EQ( r.angles, canonical( start ) );
        EXPECT_EQ( r.F, r.start_F );
        EXPECT_EQ( r.F, 1.0 - 27.0 / 125.0 );
    }
}

TEST( Optimizer, DiagonalRodImproves ) {
    const DesignSpace s{ 8, 8, 8, 10, 10, 10 };
    const auto rod = primitives::rod( { -30, -30, -30 }, { 30, 30, 30 }, 3, 12 );
    const auto cfg = coarse( 15 );
    const auto r = optimize_rotation( rod, s, cfg );
    expect_contract( rod, s, cfg, r, {} );
    EXPECT_GT( r.F, r.start_F );
    EXPECT_FALSE( r.accepted.empty() );
}

TEST( Optimizer, ContractOnRandomMeshes ) {
    std::mt19937 rng( 77 );
    const DesignSpace s{ 6, 5, 5, 12, 12, 14 };
    for( int trial = 0; trial < 6; ++trial ) {
        const auto mesh = rotate_mesh( oracle::random_watertight_mesh( rng, 30 ), oracle::random_angles( rng ) );
        const auto cfg = coarse( 30 );
        const EulerAngles start = trial % 2 ? oracle::random_angles( rng ) : EulerAngles{};
        expect_contract( mesh, s, cfg, optimize_rotation( mesh, s, cfg, start ), start );
    }
}

TEST( Optimizer, RoundLimitIsRespected ) {
    const DesignSpace s{ 8, 8, 8, 10, 10, 10 };
    const auto rod = primitives::rod( { -30, -30, -30 }, { 30, 30, 30 }, 3, 12 );
    auto cfg = coarse( 30 );
    cfg.max_rounds = 1;
    const auto r = optimize_rotation( rod, s, cfg );
    EXPECT_EQ( r.rounds_used, 1 );
    EXPECT_LE( r.evaluations, 1 + 3 * 12 );
}

TEST( Optimizer, ThreadsDoNotChangeTheResult ) {
    std::mt19937 rng( 78 );
    const DesignSpace s{ 6, 6, 6, 10, 10, 10 };
    const auto mesh = rotate_mesh( oracle::random_watertight_mesh( rng, 25 ), oracle::random_angles( rng ) );
    auto cfg = coarse( 20 );
    const auto seq = optimize_rotation( mesh, s, cfg );
    cfg.threads = 3;
    const auto par = optimize_rotation( mesh, s, cfg );
    EXPECT_EQ( par.angles, seq.angles );
    EXPECT_EQ( par.F, seq.F );
    EXPECT_EQ( par.evaluations, seq.evaluations );
    EXPECT_EQ( par.accepted, seq.accepted );
}

TEST( Optimizer, RejectsBadConfig ) {
    const auto cube = inset_cube();
    for( double step : { 0.0, -5.0, 7.0, std::nan( "" ) } ) {
        auto cfg = coarse( 30 );
        cfg.step = step;
        EXPECT_THROW( optimize_rotation( cube, kCubeSpace, cfg ), Error ) << step;
    }
    auto cfg = coarse( 30 );
    cfg.max_rounds = 0;
    EXPECT_THROW( optimize_rotation( cube, kCubeSpace, cfg ), Error );
    EXPECT_THROW( optimize_rotation( cube, kCubeSpace, coarse( 30 ), { std::nan( "" ), 0, 0 } ), Error );
}

TEST( Optimizer, OffGridStartEndsAtLocalOptimum ) {
    std::mt19937 rng( 79 );
    const DesignSpace s{ 7, 6, 6, 10, 10, 10 };
    auto cfg = coarse( 10 );
    for( int trial = 0; trial < 4; ++trial ) {
        const auto mesh = rotate_mesh( oracle::random_watertight_mesh( rng, 40 ), oracle::random_angles( rng ) );
        const EulerAngles start{ 3.7 + trial, 121.25, 359.5 };
        const auto r = optimize_rotation( mesh, s, cfg, start );
        ASSERT_LT( r.rounds_used, cfg.max_rounds );
        expect_contract( mesh, s, cfg, r, start );
    }
}
