// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include <foamforge/block_map.hpp>
#include <foamforge/blockmap_io.hpp>
#include <foamforge/pipeline.hpp>
#include <foamforge/primitives.hpp>

#include "oracles.hpp"

using namespace foamforge;

namespace {

ColumnDepthMap filled( Direction d, const DesignSpace& s, int value ) {
    ColumnDepthMap m( d, s.ny, s.nz );
    std::fill( m.index.begin(), m.index.end(), value );
    return m;
}

// Per-column height-field check; returns false on the first violation.
bool is_height_field( const BlockMap& bm ) {
    const DesignSpace& s = bm.space;
    for( int k = 0; k < s.nz; ++k )
        for( int j = 0; j < s.ny; ++j ) {
            int i = 0;
            while( i < s.nx && bm.at( i, j, k ) == Label::FoamMinus )
                ++i;
            while( i < s.nx && bm.at( i, j, k ) == Label::Occupied )
                ++i;
            while( i < s.nx && bm.at( i, j, k ) == Label::FoamPlus )
                ++i;
            if( i != s.nx )
                return false;
        }
    return true;
}

BlockMap random_map( std::mt19937& rng, const DesignSpace& s, double empty_fraction ) {
    std::bernoulli_distribution empty( empty_fraction );
    std::uniform_int_distribution<int> idx( 0, s.nx - 1 );
    ColumnDepthMap a( Direction::PlusX, s.ny, s.nz ), b( Direction::MinusX, s.ny, s.nz );
    for( std::size_t c = 0; c < a.index.size(); ++c ) {
        if( empty( rng ) )
            continue;
        const int p = idx( rng ), q = idx( rng );
        a.index[c] = std::max( p, q );
        b.index[c] = std::min( p, q );
    }
    return build_block_map( a, b, s );
}

} // namespace

TEST( BuildBlockMap, AllEmptyIsAllFoam ) {
    const DesignSpace s{ 5, 4, 3, 1, 1, 1 };
    const auto bm = build_block_map( filled( Direction::PlusX, s, -1 ), filled( Direction::MinusX, s, -1 ), s );
    EXPECT_EQ( bm.foam_count(), 60 );
    EXPECT_EQ( bm.diagnostics.foam_blocks, 60 );
    EXPECT_EQ( bm.diagnostics.occupied_blocks, 0 );
}

TEST( BuildBlockMap, FullSpanIsAllOccupied ) {
    const DesignSpace s{ 5, 4, 3, 1, 1, 1 };
    const auto bm = build_block_map( filled( Direction::PlusX, s, 4 ), filled( Direction::MinusX, s, 0 ), s );
    EXPECT_EQ( bm.foam_count(), 0 );
}

TEST( BuildBlockMap, SingleColumnTruthTable ) {
    const DesignSpace s{ 8, 1, 1, 1, 1, 1 };
    const auto bm = build_block_map( filled( Direction::PlusX, s, 5 ), filled( Direction::MinusX, s, 2 ), s );
    for( int i = 0; i < 8; ++i ) {
        EXPECT_EQ( is_foam( bm.at( i, 0, 0 ) ), oracle::foam_by_rule( i, 5, 2 ) );
        EXPECT_EQ( bm.at( i, 0, 0 ) == Label::Occupied, i >= 2 && i <= 5 );
    }
}

TEST( BuildBlockMap, OneSidedColumnsStayFoam ) {
    const DesignSpace s{ 6, 2, 1, 1, 1, 1 };
    auto a = filled( Direction::PlusX, s, 4 );
    auto b = filled( Direction::MinusX, s, 1 );
    b.at( 1, 0 ) = ColumnDepthMap::EMPTY;
    const auto bm = build_block_map( a, b, s );
    EXPECT_EQ( bm.diagnostics.one_sided_columns, 1 );
    for( int i = 0; i < 6; ++i )
        EXPECT_EQ( bm.at( i, 1, 0 ), Label::Foam );
    EXPECT_EQ( bm.count( Label::Occupied ), 4 );
}

TEST( BuildBlockMap, RejectsSwappedOrMisSizedMaps ) {
    const DesignSpace s{ 6, 2, 2, 1, 1, 1 };
    const auto a = filled( Direction::PlusX, s, 1 ), b = filled( Direction::MinusX, s, 1 );
    EXPECT_THROW( build_block_map( b, a, s ), Error );
    try {
        build_block_map( a, b, DesignSpace{ 6, 3, 2, 1, 1, 1 } );
        FAIL();
    } catch( const Error& e ) {
        EXPECT_EQ( e.code(), ErrorCode::DimensionMismatch );
    }
}

TEST( BuildBlockMap, RandomPairsMatchDirectEvaluation ) {
    std::mt19937 rng( 21 );
    std::uniform_int_distribution<int> dim( 1, 12 );
    for( int trial = 0; trial < 300; ++trial ) {
        const DesignSpace s{ dim( rng ), dim( rng ), dim( rng ), 1, 1, 1 };
        std::uniform_int_distribution<int> idx( -1, s.nx - 1 );
        ColumnDepthMap a( Direction::PlusX, s.ny, s.nz ), b( Direction::MinusX, s.ny, s.nz );
        for( auto& v : a.index )
            v = idx( rng );
        for( auto& v : b.index )
            v = idx( rng );
        const auto bm = build_block_map( a, b, s );
        for( int k = 0; k < s.nz; ++k )
            for( int j = 0; j < s.ny; ++j )
                for( int i = 0; i < s.nx; ++i )
                    ASSERT_EQ( is_foam( bm.at( i, j, k ) ), oracle::foam_by_rule( i, a.at( j, k ), b.at( j, k ) ) );
    }
}

TEST( SplitRegions, AllFoamMeetsInTheMiddle ) {
    const DesignSpace s{ 8, 3, 2, 1, 1, 1 };
    const auto bm = split_regions( BlockMap( s ) );
    for( int k = 0; k < 2; ++k )
        for( int j = 0; j < 3; ++j )
            for( int i = 0; i < 8; ++i )
                EXPECT_EQ( bm.at( i, j, k ), i < 4 ? Label::FoamMinus : Label::FoamPlus );
}

TEST( SplitRegions, OddAndUnitDepth ) {
    const auto odd = split_regions( BlockMap( DesignSpace{ 7, 1, 1, 1, 1, 1 } ) );
    for( int i = 0; i < 7; ++i )
        EXPECT_EQ( odd.at( i, 0, 0 ), i < 4 ? Label::FoamMinus : Label::FoamPlus ) << i;
    const auto one = split_regions( BlockMap( DesignSpace{ 1, 2, 2, 1, 1, 1 } ) );
    EXPECT_EQ( one.count( Label::FoamMinus ), 4 );
}

TEST( SplitRegions, OccupiedColumnIsForced ) {
    const DesignSpace s{ 8, 3, 3, 1, 1, 1 };
    auto a = filled( Direction::PlusX, s, 7 ), b = filled( Direction::MinusX, s, 0 );
    a.at( 1, 1 ) = 5;
    b.at( 1, 1 ) = 2;
    const auto bm = split_regions( build_block_map( a, b, s ) );
    const Label expect[8] = { Label::FoamMinus, Label::FoamMinus, Label::Occupied, Label::Occupied,
                              Label::Occupied,  Label::Occupied,  Label::FoamPlus, Label::FoamPlus };
    for( int i = 0; i < 8; ++i )
        EXPECT_EQ( bm.at( i, 1, 1 ), expect[i] );
    EXPECT_EQ( bm.count( Label::FoamPlus ), 2 );
    EXPECT_EQ( bm.count( Label::FoamMinus ), 2 );
}

TEST( SplitRegions, SphereMatchesSweepOracle ) {
    const DesignSpace s{ 12, 12, 12, 10, 10, 10 };
    const auto bm = compute_block_map( primitives::icosphere( 38, 3 ), s, { 10, 20, 30 } );
    ASSERT_GT( bm.count( Label::Occupied ), 0 );
    const auto split = split_regions( bm );
    EXPECT_EQ( split.labels, oracle::split_oracle( bm ) );
}

TEST( SplitRegions, RandomMapsMatchOracleAndStayHeightFields ) {
    std::mt19937 rng( 17 );
    std::uniform_int_distribution<int> dim( 1, 10 );
    for( int trial = 0; trial < 300; ++trial ) {
        const DesignSpace s{ dim( rng ), dim( rng ), dim( rng ), 1, 1, 1 };
        const auto bm = random_map( rng, s, trial % 2 ? 0.7 : 0.2 );
        const auto split = split_regions( bm );
        ASSERT_EQ( split.labels, oracle::split_oracle( bm ) ) << "trial " << trial;
        ASSERT_TRUE( is_height_field( split ) );
        EXPECT_EQ( split.count( Label::Occupied ) + split.count( Label::FoamPlus ) + split.count( Label::FoamMinus ),
                   std::int64_t( s.block_count() ) );
        EXPECT_EQ( split.count( Label::Foam ), 0 );
        EXPECT_EQ( split.count( Label::Occupied ), bm.count( Label::Occupied ) );
        // Re-splitting is a no-op.
        EXPECT_EQ( split_regions( split ).labels, split.labels );
    }
}

TEST( SplitRegions, ObjectCanSlideOutAlongX ) {
    // Shifting the occupied set toward +x never meets FoamMinus, toward -x never meets FoamPlus.
    std::mt19937 rng( 23 );
    for( int trial = 0; trial < 100; ++trial ) {
        const DesignSpace s{ 6, 4, 3, 1, 1, 1 };
        const auto split = split_regions( random_map( rng, s, 0.3 ) );
        for( int shift = 1; shift <= s.nx; ++shift )
            for( int k = 0; k < s.nz; ++k )
                for( int j = 0; j < s.ny; ++j )
                    for( int i = 0; i < s.nx; ++i ) {
                        if( split.at( i, j, k ) != Label::Occupied )
                            continue;
                        if( i + shift < s.nx ) {
                            ASSERT_NE( split.at( i + shift, j, k ), Label::FoamMinus );
                        }
                        if( i - shift >= 0 ) {
                            ASSERT_NE( split.at( i - shift, j, k ), Label::FoamPlus );
                        }
                    }
    }
}

TEST( BlockMapSymmetry, QuarterTurnOfAlignedCube ) {
    const DesignSpace s{ 8, 8, 8, 10, 10, 10 };
    const auto cube = primitives::box( { -20, -20, -20 }, { 20, 20, 20 } );
    const auto a = compute_block_map( cube, s, { 0, 0, 0 } );
    const auto b = compute_block_map( cube, s, { 90, 0, 0 } );
    EXPECT_EQ( a.foam_count(), b.foam_count() );
    EXPECT_EQ( a.labels, b.labels );
}

TEST( GapVolume, AlignedBoxWithInsetFacesHasNoGap ) {
    const DesignSpace s{ 8, 6, 6, 10, 10, 10 };
    // Blocks {2..5} x {1..4} x {1..4}; x faces pulled in by 1e-6 mm so they do not touch the
    // neighbouring blocks.
    const double eps = 1e-6;
    const auto box = primitives::box( { -20 + eps, -20, -20 }, { 20 - eps, 20, 20 } );
    const auto bm = compute_block_map( box, s, {} );
    const auto gap = gap_volume( bm, box, s );
    EXPECT_EQ( gap.occupied_blocks, 64 );
    EXPECT_EQ( gap.solid_blocks, 64 );
    EXPECT_EQ( gap.gap_blocks, 0 );
    EXPECT_EQ( gap.gap_mm3, 0.0 );
}

TEST( GapVolume, FacesOnBlockBoundariesTouchTheNeighbours ) {
    const DesignSpace s{ 8, 6, 6, 10, 10, 10 };
    const auto box = primitives::box( { -20, -20, -20 }, { 20, 20, 20 } );
    const auto gap = gap_volume( compute_block_map( box, s, {} ), box, s );
    // Touch rule widens x to {1..6}; y and z are sampled at texel centers and stay {1..4}.
    EXPECT_EQ( gap.occupied_blocks, 6 * 4 * 4 );
    EXPECT_EQ( gap.gap_blocks, 32 );
    EXPECT_EQ( gap.gap_mm3, 32000.0 );
}

TEST( GapVolume, RoundTorusFillsItsHiddenHole ) {
    const DesignSpace s{ 10, 10, 4, 10, 10, 10 };
    const auto torus = primitives::torus( 30, 12, 48, 24 );
    const auto bm = compute_block_map( torus, s, {} );
    const auto gap = gap_volume( bm, torus, s );
    const auto parity = oracle::parity_voxels( torus, s );
    const auto solid = std::count( parity.begin(), parity.end(), true );
    EXPECT_EQ( gap.solid_blocks, solid );
    EXPECT_EQ( gap.gap_blocks, bm.count( Label::Occupied ) - solid );
    // Blocks whose centers lie in the hole (radius < R - r) are occupied but not solid.
    std::int64_t hole = 0;
    for( int k = 0; k < s.nz; ++k )
        for( int j = 0; j < s.ny; ++j )
            for( int i = 0; i < s.nx; ++i ) {
                const Vec3 c = s.block_center( i, j, k );
                if( std::hypot( c.x, c.y ) < 30 - 12 && std::abs( c.z ) < 12 && bm.at( i, j, k ) == Label::Occupied )
                    ++hole;
            }
    EXPECT_GT( hole, 0 );
    EXPECT_GE( gap.gap_blocks, hole );
}

TEST( GapVolume, TinyTetrahedron ) {
    const DesignSpace s{ 5, 5, 5, 10, 10, 10 };
    // Around a block center, between texel centers: solid but never rasterized.
    const auto at_center = primitives::tetrahedron( { 0, 0, 0 }, 0.2 );
    const auto g1 = gap_volume( compute_block_map( at_center, s, {} ), at_center, s );
    EXPECT_EQ( g1.occupied_blocks, 0 );
    EXPECT_EQ( g1.gap_blocks, -1 );
    // Away from block centers and texel centers.
    const auto stray = primitives::tetrahedron( { 2.5, 2.5, 2.5 }, 0.2 );
    EXPECT_EQ( gap_volume( compute_block_map( stray, s, {} ), stray, s ).gap_blocks, 0 );
    // Covering a texel center but not the block center gives +1.
    const auto texel = primitives::tetrahedron( { 0.5 + 0.625, 0.625, 0.625 }, 0.4 );
    EXPECT_EQ( gap_volume( compute_block_map( texel, s, {} ), texel, s ).gap_blocks, 1 );
}

TEST( GapVolume, OpenMeshIsUnavailable ) {
    auto open = primitives::box( { -5, -5, -5 }, { 5, 5, 5 } );
    open.triangles.pop_back();
    const DesignSpace s{ 4, 4, 4, 10, 10, 10 };
    try {
        gap_volume( compute_block_map( open, s, {} ), open, s );
        FAIL();
    } catch( const Error& e ) {
        EXPECT_EQ( e.code(), ErrorCode::Unavailable );
    }
}

TEST( SolidVoxels, AgreesWithBruteForceParity ) {
    std::mt19937 rng( 31 );
    const DesignSpace s{ 9, 8, 7, 7, 8, 9 };
    for( int trial = 0; trial < 15; ++trial ) {
        const auto mesh = rotate_mesh( oracle::random_watertight_mesh( rng, 55 ), oracle::random_angles( rng ) );
        EXPECT_EQ( solid_voxels( mesh, s ), oracle::parity_voxels( mesh, s ) ) << "trial " << trial;
    }
}

TEST( SolidVoxels, GrazingRayIsPerturbed ) {
    // The column ray at y = z = 0 runs exactly along the shared diagonal of the box's x faces.
    const DesignSpace s{ 3, 1, 1, 10, 10, 10 };
    const auto box = primitives::box( { -5, -5, -5 }, { 5, 5, 5 } );
    const auto solid = solid_voxels( box, s );
    EXPECT_EQ( solid, ( std::vector<bool>{ false, true, false } ) );
}

TEST( BlockMapIo, BinaryAndJsonRoundTrip ) {
    std::mt19937 rng( 41 );
    std::uniform_int_distribution<int> dim( 1, 9 );
    for( int trial = 0; trial < 50; ++trial ) {
        const DesignSpace s{ dim( rng ), dim( rng ), dim( rng ), 15, 15, 22 };
        auto bm = random_map( rng, s, 0.4 );
        if( trial % 2 )
            bm = split_regions( bm );
        const auto bin = decode_block_map( encode_block_map( bm ) );
        EXPECT_EQ( bin.space, bm.space );
        EXPECT_EQ( bin.labels, bm.labels );
        const auto js = block_map_from_json( nlohmann::json::parse( block_map_to_json( bm ).dump() ) );
        EXPECT_EQ( js.space, bm.space );
        EXPECT_EQ( js.labels, bm.labels );
    }
    EXPECT_EQ( encode_block_map( BlockMap( DesignSpace{ 2, 3, 4, 1, 1, 1 } ) ).size(), 44u + 24u );
}

TEST( BlockMapIo, RejectsCorruptInput ) {
    auto bytes = encode_block_map( BlockMap( DesignSpace{ 2, 2, 2, 1, 1, 1 } ) );
    EXPECT_THROW( decode_block_map( bytes.substr( 0, bytes.size() - 1 ) ), Error );
    bytes.back() = 9;
    EXPECT_THROW( decode_block_map( bytes ), Error );
    EXPECT_THROW( decode_block_map( "XXXX" ), Error );
    auto j = block_map_to_json( BlockMap( DesignSpace{ 2, 1, 1, 1, 1, 1 } ) );
    j["columns"][0][0][1] = 3;
    EXPECT_THROW( block_map_from_json( j ), Error );
}
