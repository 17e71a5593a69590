// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include <gtest/gtest.h>

#include <foamforge/cli.hpp>
#include <foamforge/primitives.hpp>

#include "service_fixture.hpp"

using namespace foamforge;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli( std::vector<std::string> args ) {
    std::ostringstream out, err;
    const int code = run_cli( args, out, err );
    return { code, out.str(), err.str() };
}

fs::path write_cube( const fs::path& dir, double half = 20 ) {
    const auto path = dir / "cube.stl";
    write_file( path, write_mesh( primitives::box( { -half, -half, -half }, { half, half, half } ),
                                  ExportFormat::STL_BINARY ) );
    return path;
}

} // namespace

TEST( Cli, BadArgumentsExitTwo ) {
    EXPECT_EQ( cli( {} ).code, 2 );
    const auto missing = cli( { "generate" } );
    EXPECT_EQ( missing.code, 2 );
    EXPECT_NE( missing.err.find( "--input" ), std::string::npos );
    const auto dir = testing_support::fresh_dir( "cli" );
    const auto cube = write_cube( dir ).string();
    EXPECT_EQ( cli( { "generate", "--input", cube, "--res", "8x8" } ).code, 2 );
    EXPECT_EQ( cli( { "generate", "--input", cube, "--block", "0x1x1" } ).code, 2 );
    EXPECT_EQ( cli( { "generate", "--input", cube, "--format", "obj" } ).code, 2 );
    EXPECT_EQ( cli( { "bench", "--input", cube, "--runs", "4" } ).code, 2 );
    EXPECT_EQ( cli( { "--help" } ).code, 0 );
}

TEST( Cli, MalformedInputExitsThree ) {
    const auto dir = testing_support::fresh_dir( "cli" );
    write_file( dir / "bad.stl", "garbage" );
    write_file( dir / "empty.ply", "" );
    EXPECT_EQ( cli( { "generate", "--input", ( dir / "bad.stl" ).string(), "--out-dir", dir.string() } ).code, 3 );
    EXPECT_EQ( cli( { "generate", "--input", ( dir / "empty.ply" ).string(), "--out-dir", dir.string() } ).code, 3 );
    EXPECT_EQ( cli( { "generate", "--input", ( dir / "none.stl" ).string() } ).code, 3 );
    EXPECT_EQ( cli( { "bench", "--input", ( dir / "bad.stl" ).string() } ).code, 3 );
}

TEST( Cli, GenerateWritesArtifacts ) {
    const auto dir = testing_support::fresh_dir( "cli" );
    // x faces pulled in from the block boundaries, so occupancy is exactly 4x4x4.
    const auto path = dir / "cube.stl";
    write_file( path, write_mesh( primitives::box( { -19.999, -20, -20 }, { 19.999, 20, 20 } ), ExportFormat::STL_BINARY ) );
    const auto out = dir / "out";
    const auto r = cli( { "generate", "--input", path.string(), "--res", "8x8x8", "--block", "10x10x10", "--out-dir",
                          out.string() } );
    ASSERT_EQ( r.code, 0 ) << r.err;
    const auto plus = load_mesh_file( out / "foam_plus.stl" );
    const auto minus = load_mesh_file( out / "foam_minus.stl" );
    EXPECT_NEAR( signed_volume( plus ) + signed_volume( minus ), ( 512 - 64 ) * 1000.0, 1e-6 );
    for( int i = 0; i < 8; ++i )
        EXPECT_TRUE( fs::exists( out / "slices" / slice_svg_name( i ) ) );
    const auto report = nlohmann::json::parse( read_file( out / "report.json" ) );
    EXPECT_EQ( report["schema_version"], 1 );
    EXPECT_EQ( report["occupied_blocks"], 64 );
    EXPECT_EQ( report["F"], 0.875 );
    EXPECT_EQ( report["gap"]["gap_blocks"], 0 );
    EXPECT_TRUE( report["timing_ms"].is_number() );
}

TEST( Cli, GenerateOptionsAndResolutionReport ) {
    const auto dir = testing_support::fresh_dir( "cli" );
    const auto cube = write_cube( dir, 30 ).string();
    const auto out = dir / "ply";
    const auto r = cli( { "generate", "--input", cube, "--res", "12x8x8", "--block", "10x10x10", "--format", "ply",
                          "--slices", "json", "--optimize", "--step", "45", "--out-dir", out.string() } );
    ASSERT_EQ( r.code, 0 ) << r.err;
    EXPECT_TRUE( fs::exists( out / "foam_plus.ply" ) );
    EXPECT_TRUE( fs::exists( out / "slices" / "slices.json" ) );
    const auto report = nlohmann::json::parse( read_file( out / "report.json" ) );
    EXPECT_EQ( report["params"]["resolution"], nlohmann::json( { 12, 8, 8 } ) );
    EXPECT_TRUE( report.contains( "optimizer" ) );
    EXPECT_GE( report["optimizer"]["F"].get<double>(), report["optimizer"]["start_F"].get<double>() );
    EXPECT_EQ( report["F"], report["optimizer"]["F"] );
}

TEST( Cli, BenchReportsMeanAndStd ) {
    const auto dir = testing_support::fresh_dir( "cli" );
    const auto cube = write_cube( dir ).string();
    const auto r = cli( { "bench", "--input", cube, "--res-list", "4,6", "--runs", "5", "--single-thread", "--json",
                          ( dir / "bench.json" ).string() } );
    ASSERT_EQ( r.code, 0 ) << r.err;
    EXPECT_NE( r.out.find( "6x6x6" ), std::string::npos );
    const auto j = nlohmann::json::parse( read_file( dir / "bench.json" ) );
    ASSERT_EQ( j["rows"].size(), 2u );
    EXPECT_EQ( j["rows"][1]["runs"], 5 );
    EXPECT_EQ( j["rows"][1]["resolution"], nlohmann::json( { 6, 6, 6 } ) );
    EXPECT_EQ( j["rows"][0]["vertices"], 8 );
    EXPECT_TRUE( j["rows"][0]["std_ms"].is_number() );
    EXPECT_EQ( j["single_thread"], true );
}

TEST( Cli, MakeMesh ) {
    const auto dir = testing_support::fresh_dir( "cli" );
    const auto path = ( dir / "torus.stl" ).string();
    const auto r = cli( { "make-mesh", "torus", "--out", path } );
    ASSERT_EQ( r.code, 0 ) << r.err;
    EXPECT_EQ( load_mesh_file( path ).vertices.size(), 7200u );
    EXPECT_EQ( cli( { "make-mesh", "cone", "--out", path } ).code, 2 );
}

TEST( Cli, InputIsCenteredBeforeGeneration ) {
    const auto dir = testing_support::fresh_dir( "cli" );
    const auto far = dir / "far.stl";
    write_file( far, write_mesh( primitives::box( { 980.001, -520, 180 }, { 1019.999, -480, 220 } ),
                                 ExportFormat::STL_BINARY ) );
    const auto r = cli( { "generate", "--input", far.string(), "--res", "8x8x8", "--block", "10x10x10", "--slices",
                          "none", "--out-dir", ( dir / "out" ).string() } );
    ASSERT_EQ( r.code, 0 ) << r.err;
    const auto report = nlohmann::json::parse( read_file( dir / "out" / "report.json" ) );
    EXPECT_EQ( report["occupied_blocks"], 64 );
    EXPECT_EQ( report["gap"]["gap_blocks"], 0 );
}
