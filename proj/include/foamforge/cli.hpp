// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <foamforge/angle_opt.hpp>
#include <foamforge/mesh_io.hpp>
#include <foamforge/pipeline.hpp>
#include <foamforge/primitives.hpp>
#include <foamforge/report.hpp>
#include <foamforge/service.hpp>

namespace foamforge {

enum ExitCode : int { EXIT_OK = 0, EXIT_FAILURE_OTHER = 1, EXIT_BAD_ARGS = 2, EXIT_BAD_INPUT = 3 };

struct BenchRow {
    std::string model;
    std::size_t vertices = 0;
    int resolution = 0;
    int runs = 0;
    double mean_ms = 0.0;
    double std_ms = 0.0;
};

/// Times generate_block_map (no parsing, no export) `runs` times at each n x n x n resolution.
inline std::vector<BenchRow> run_bench( const TriangleMesh& mesh, std::string_view name,
                                        const std::vector<int>& resolutions, const DesignSpace& block, int runs,
                                        int supersample, int threads ) {
    std::vector<BenchRow> rows;
    for( int n : resolutions ) {
        GenerationParams params{ DesignSpace{ n, n, n, block.bx, block.by, block.bz }, {}, supersample, threads };
        std::vector<double> t;
        for( int r = 0; r < runs; ++r ) {
            const auto t0 = std::chrono::steady_clock::now();
            const BlockMap bm = generate_block_map( mesh, params );
            t.push_back( std::chrono::duration<double, std::milli>( std::chrono::steady_clock::now() - t0 ).count() );
            if( bm.labels.empty() )
                throw Error( ErrorCode::InvalidParams, "empty design space" );
        }
        double mean = 0.0, var = 0.0;
        for( double v : t )
            mean += v / runs;
        for( double v : t )
            var += ( v - mean ) * ( v - mean ) / std::max( runs - 1, 1 );
        rows.push_back( { std::string( name ), mesh.vertices.size(), n, runs, mean, std::sqrt( var ) } );
    }
    return rows;
}

inline nlohmann::json bench_json( const std::vector<BenchRow>& rows, bool single_thread, int threads ) {
    nlohmann::json j = { { "schema_version", REPORT_SCHEMA_VERSION },
                         { "single_thread", single_thread },
                         { "threads", threads },
                         { "timing_scope", "rotate, render, reduce, block map, region split" },
                         { "rows", nlohmann::json::array() } };
    for( const auto& r : rows )
        j["rows"].push_back( { { "model", r.model },
                               { "vertices", r.vertices },
                               { "resolution", { r.resolution, r.resolution, r.resolution } },
                               { "runs", r.runs },
                               { "mean_ms", r.mean_ms },
                               { "std_ms", r.std_ms } } );
    return j;
}

namespace detail {

inline FoamService* active_service = nullptr;

inline void stop_active_service( int ) {
    if( active_service )
        active_service->stop();
}

inline bool is_input_error( ErrorCode c ) {
    return c == ErrorCode::MalformedFile || c == ErrorCode::EmptyMesh || c == ErrorCode::UnsupportedFeature;
}

inline TriangleMesh load_input( const std::filesystem::path& path ) {
    if( !std::filesystem::is_regular_file( path ) )
        throw Error( ErrorCode::MalformedFile, "cannot read " + path.string() );
    const auto format = format_from_extension( path );
    if( !format )
        throw Error( ErrorCode::UnsupportedFeature, "unknown mesh extension: " + path.string() );
    return load_centered( read_file( path ), *format );
}

} // namespace detail

/// Entry point shared by the foamforge executable and the tests. args excludes the program name.
inline int run_cli( const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr ) {
    CLI::App app{ "Protective foam generator for transport cases", "foamforge" };
    app.require_subcommand( 1 );

    // generate
    auto* gen = app.add_subcommand( "generate", "Generate the two foam halves for a mesh" );
    std::string input, res = "30x18x18", block = "15x15x22", angles = "0,0,0", out_dir = "foam_out";
    std::string mesh_format = "stl", slice_format = "svg", report_format = "json";
    bool optimize = false;
    int supersample = DEFAULT_SUPERSAMPLE, threads = 1;
    double step = 5.0;
    int max_rounds = 10;
    gen->add_option( "--input", input, "Input mesh (.stl, .ply, .obj)" )->required();
    gen->add_option( "--res", res, "Block resolution NXxNYxNZ" )->capture_default_str();
    gen->add_option( "--block", block, "Block size BXxBYxBZ in mm" )->capture_default_str();
    gen->add_option( "--angles", angles, "Rotation psi,theta,phi in degrees" )->capture_default_str();
    gen->add_flag( "--optimize", optimize, "Search for a rotation starting from --angles" );
    gen->add_option( "--step", step, "Optimizer step in degrees" )->capture_default_str();
    gen->add_option( "--max-rounds", max_rounds, "Optimizer round limit" )->capture_default_str();
    gen->add_option( "--supersample", supersample, "Depth samples per block edge" )
        ->capture_default_str()
        ->check( CLI::Range( 1, MAX_SUPERSAMPLE ) );
    gen->add_option( "--threads", threads, "Rasterization threads" )->capture_default_str()->check( CLI::Range( 1, 256 ) );
    gen->add_option( "--out-dir", out_dir, "Output directory" )->capture_default_str();
    gen->add_option( "--format", mesh_format, "Foam mesh format" )
        ->capture_default_str()
        ->check( CLI::IsMember( { "stl", "ply" } ) );
    gen->add_option( "--slices", slice_format, "Slice output" )
        ->capture_default_str()
        ->check( CLI::IsMember( { "svg", "json", "none" } ) );
    gen->add_option( "--report", report_format, "Report output" )
        ->capture_default_str()
        ->check( CLI::IsMember( { "json", "none" } ) );

    // bench
    auto* bench = app.add_subcommand( "bench", "Time the generation step at n x n x n resolutions" );
    std::string bench_input, res_list = "10,15,20,25,30", bench_block = "15x15x22", bench_json_path;
    int runs = 5, bench_supersample = DEFAULT_SUPERSAMPLE;
    bool single_thread = false;
    bench->add_option( "--input", bench_input, "Input mesh" )->required();
    bench->add_option( "--res-list", res_list, "Comma-separated n values" )->capture_default_str();
    bench->add_option( "--block", bench_block, "Block size BXxBYxBZ in mm" )->capture_default_str();
    bench->add_option( "--runs", runs, "Timed runs per resolution" )->capture_default_str()->check( CLI::Range( 5, 100000 ) );
    bench->add_option( "--supersample", bench_supersample, "Depth samples per block edge" )
        ->capture_default_str()
        ->check( CLI::Range( 1, MAX_SUPERSAMPLE ) );
    bench->add_flag( "--single-thread", single_thread, "Sequential pipeline" );
    bench->add_option( "--json", bench_json_path, "Also write the JSON report here" );

    // serve
    auto* serve = app.add_subcommand( "serve", "Run the HTTP session service" );
    ServiceConfig svc;
    std::string spool, snapshot;
    serve->add_option( "--host", svc.host )->capture_default_str();
    serve->add_option( "--port", svc.port )->capture_default_str()->check( CLI::Range( 0, 65535 ) );
    serve->add_option( "--spool-dir", spool, "Where uploaded models are kept" );
    serve->add_option( "--max-upload-bytes", svc.max_upload_bytes )->capture_default_str();
    serve->add_option( "--supersample", svc.supersample )->capture_default_str()->check( CLI::Range( 1, MAX_SUPERSAMPLE ) );
    serve->add_option( "--threads", svc.threads )->capture_default_str()->check( CLI::Range( 1, 256 ) );
    serve->add_option( "--snapshot", snapshot, "Session snapshot file (restored at start, written at exit)" );

    // make-mesh
    auto* make = app.add_subcommand( "make-mesh", "Write a test primitive" );
    std::string shape, make_out;
    std::vector<int> segments{ 120, 60 };
    double size_a = 120.0, size_b = 50.0, size_c = 50.0;
    int detail = 3;
    make->add_option( "shape", shape, "torus, sphere, cube or ring" )
        ->required()
        ->check( CLI::IsMember( { "torus", "sphere", "cube", "ring" } ) );
    make->add_option( "--out", make_out, "Output mesh path" )->required();
    make->add_option( "--a", size_a, "Torus major radius, sphere radius, cube edge, ring outer half-width" )
        ->capture_default_str();
    make->add_option( "--b", size_b, "Torus minor radius, ring inner half-width" )->capture_default_str();
    make->add_option( "--c", size_c, "Ring half-height" )->capture_default_str();
    make->add_option( "--segments", segments, "Torus major and minor segment counts" )
        ->expected( 2 )
        ->check( CLI::Range( 3, 100000 ) );
    make->add_option( "--subdivisions", detail, "Icosphere subdivisions" )->capture_default_str()->check( CLI::Range( 0, 8 ) );

    std::vector<std::string> reversed( args.rbegin(), args.rend() );
    try {
        app.parse( reversed );
    } catch( const CLI::ParseError& e ) {
        const int code = app.exit( e, out, err );
        return code == 0 ? EXIT_OK : EXIT_BAD_ARGS;
    }

    try {
        if( *gen ) {
            GenerationParams params;
            const auto r = parse_triple<int>( res );
            const auto b = parse_triple<double>( block );
            const auto a = parse_triple<double>( angles, ',' );
            params.space = { r[0], r[1], r[2], b[0], b[1], b[2] };
            params.angles = { a[0], a[1], a[2] };
            params.supersample = supersample;
            params.threads = threads;
            validate( params );
            const TriangleMesh mesh = detail::load_input( input );
            for( const auto& w : mesh.warnings )
                fmt::print( err, "warning: {}\n", w );

            std::optional<ScoreReport> opt;
            if( optimize ) {
                OptimizerConfig cfg;
                cfg.step = step;
                cfg.max_rounds = max_rounds;
                cfg.supersample = supersample;
                cfg.threads = threads;
                opt = optimize_rotation( mesh, params.space, cfg, params.angles );
                params.angles = opt->angles;
            }
            const FoamResult result = generate_foam( mesh, params );

            const std::filesystem::path dir = out_dir;
            std::filesystem::create_directories( dir );
            const ExportFormat fmt_out = mesh_format == "ply" ? ExportFormat::PLY_ASCII : ExportFormat::STL_BINARY;
            write_file( dir / ( "foam_plus." + mesh_format ), foam_artifact( result, Label::FoamPlus, fmt_out ) );
            write_file( dir / ( "foam_minus." + mesh_format ), foam_artifact( result, Label::FoamMinus, fmt_out ) );
            if( slice_format != "none" ) {
                const auto slice_dir = dir / "slices";
                std::filesystem::create_directories( slice_dir );
                if( slice_format == "svg" ) {
                    for( int i = 0; i < params.space.nx; ++i )
                        write_file( slice_dir / slice_svg_name( i ), render_slice_svg( result.slices, i ) );
                } else {
                    write_file( slice_dir / "slices.json", slices_json_artifact( result ) );
                }
            }
            if( report_format == "json" )
                write_file( dir / "report.json", generation_report( result, opt, input ).dump( 2 ) + "\n" );
            fmt::print( out, "F={:.6f} foam_blocks={} occupied_blocks={} timing_ms={:.1f} -> {}\n",
                        result.foam_fraction(), result.block_map.foam_count(),
                        result.block_map.count( Label::Occupied ), result.timing_ms, dir.string() );
            return EXIT_OK;
        }

        if( *bench ) {
            const auto b = parse_triple<double>( bench_block );
            const DesignSpace block_size{ 1, 1, 1, b[0], b[1], b[2] };
            validate( block_size );
            const std::vector<int> resolutions = parse_int_list( res_list );
            const TriangleMesh mesh = detail::load_input( bench_input );
            const int threads_used =
                single_thread ? 1 : std::max( 1, static_cast<int>( std::thread::hardware_concurrency() ) );
            const auto rows = run_bench( mesh, std::filesystem::path( bench_input ).stem().string(), resolutions,
                                         block_size, runs, bench_supersample, threads_used );
            fmt::print( out, "{:<16} {:>9} {:>12} {:>5} {:>10} {:>9}\n", "model", "vertices", "resolution", "runs",
                        "mean_ms", "std_ms" );
            for( const auto& r : rows )
                fmt::print( out, "{:<16} {:>9} {:>12} {:>5} {:>10.1f} {:>9.1f}\n", r.model, r.vertices,
                            fmt::format( "{0}x{0}x{0}", r.resolution ), r.runs, r.mean_ms, r.std_ms );
            const auto j = bench_json( rows, single_thread, threads_used );
            fmt::print( out, "{}\n", j.dump() );
            if( !bench_json_path.empty() )
                write_file( bench_json_path, j.dump( 2 ) + "\n" );
            return EXIT_OK;
        }

        if( *serve ) {
            if( !spool.empty() )
                svc.spool_dir = spool;
            if( !snapshot.empty() )
                svc.snapshot = std::filesystem::path( snapshot );
            FoamService service( svc );
            if( service.bind() < 0 ) {
                fmt::print( err, "cannot bind {}:{}\n", svc.host, svc.port );
                return EXIT_FAILURE_OTHER;
            }
            detail::active_service = &service;
            std::signal( SIGINT, detail::stop_active_service );
            std::signal( SIGTERM, detail::stop_active_service );
            fmt::print( out, "listening on http://{}:{}\n", svc.host, service.port() );
            out.flush();
            service.run();
            detail::active_service = nullptr;
            return EXIT_OK;
        }

        if( *make ) {
            TriangleMesh mesh;
            if( shape == "torus" ) {
                mesh = primitives::torus( size_a, size_b, segments[0], segments[1] );
            } else if( shape == "sphere" ) {
                mesh = primitives::icosphere( size_a, detail );
            } else if( shape == "cube" ) {
                mesh = primitives::box( { -size_a / 2, -size_a / 2, -size_a / 2 }, { size_a / 2, size_a / 2, size_a / 2 } );
            } else {
                mesh = primitives::square_ring( size_a, size_b, size_c );
            }
            const auto format = format_from_extension( make_out );
            if( !format || *format == MeshFormat::OBJ )
                throw Error( ErrorCode::InvalidParams, "output must end in .stl or .ply" );
            write_file( make_out, write_mesh( mesh, *format == MeshFormat::PLY ? ExportFormat::PLY_ASCII
                                                                               : ExportFormat::STL_BINARY ) );
            fmt::print( out, "{}: {} vertices, {} triangles\n", make_out, mesh.vertices.size(), mesh.triangles.size() );
            return EXIT_OK;
        }
    } catch( const Error& e ) {
        fmt::print( err, "error: {}\n", e.what() );
        if( e.code() == ErrorCode::InvalidParams )
            return EXIT_BAD_ARGS;
        return detail::is_input_error( e.code() ) ? EXIT_BAD_INPUT : EXIT_FAILURE_OTHER;
    } catch( const std::exception& e ) {
        fmt::print( err, "error: {}\n", e.what() );
        return EXIT_FAILURE_OTHER;
    }
    return EXIT_BAD_ARGS;
}

} // namespace foamforge
