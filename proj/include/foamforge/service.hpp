// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include <foamforge/angle_opt.hpp>
#include <foamforge/error.hpp>
#include <foamforge/mesh_io.hpp>
#include <foamforge/pipeline.hpp>
#include <foamforge/report.hpp>

namespace foamforge {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8787;
    std::filesystem::path spool_dir;
    std::size_t max_upload_bytes = std::size_t( 256 ) << 20;
    int supersample = DEFAULT_SUPERSAMPLE;
    int threads = 1;
    // Largest nx*ny*nz a session may request.
    std::size_t max_blocks = std::size_t( 1 ) << 24;
    // Sessions and model references are written here on stop() and restored on construction.
    std::optional<std::filesystem::path> snapshot;
};

/// Session-based HTTP front end. Models are immutable once uploaded; sessions hold parameters and
/// the latest generation, and each session runs at most one pipeline job at a time.
class FoamService {
public:
    struct Model {
        std::string id;
        std::string name;
        MeshFormat format = MeshFormat::STL;
        std::filesystem::path file;
        TriangleMesh mesh;
        BoundingBox bbox;
        bool watertight = false;
    };

    struct Session {
        std::string id;
        std::string model_id;
        GenerationParams params;
        std::shared_ptr<const FoamResult> result;
        std::string created_at;
        std::string updated_at;
        std::mutex running;
    };

    explicit FoamService( ServiceConfig config ) : config_( std::move( config ) ) {
        if( config_.spool_dir.empty() )
            config_.spool_dir = std::filesystem::temp_directory_path() / "foamforge-spool";
        std::filesystem::create_directories( config_.spool_dir );
        if( config_.snapshot && std::filesystem::exists( *config_.snapshot ) )
            restore( nlohmann::json::parse( read_file( *config_.snapshot ) ) );
        routes();
    }

    FoamService( const FoamService& ) = delete;
    FoamService& operator=( const FoamService& ) = delete;

    ~FoamService() { stop(); }

    // Binds the configured host and port (0 picks a free port) and returns the bound port, or -1.
    int bind() {
        if( config_.port == 0 )
            return port_ = server_.bind_to_any_port( config_.host );
        return port_ = server_.bind_to_port( config_.host, config_.port ) ? config_.port : -1;
    }

    // Blocks serving requests until stop().
    bool run() { return server_.listen_after_bind(); }

    void wait_until_ready() const { server_.wait_until_ready(); }

    void stop() {
        if( server_.is_running() )
            server_.stop();
        if( config_.snapshot )
            write_file( *config_.snapshot, snapshot().dump( 2 ) );
    }

    int port() const { return port_; }

    // Pipeline executions started by /generate, cached responses excluded.
    std::size_t generation_count() const { return generations_.load(); }

    nlohmann::json snapshot() const {
        std::lock_guard lock( state_ );
        nlohmann::json models = nlohmann::json::array(), sessions = nlohmann::json::array();
        for( const auto& [id, m] : models_ )
            models.push_back( { { "id", id }, { "name", m->name }, { "file", m->file.string() },
                                { "format", extension_of( m->format ) } } );
        for( const auto& [id, s] : sessions_ )
            sessions.push_back( { { "id", id }, { "model_id", s->model_id }, { "params", to_json( s->params ) },
                                  { "created_at", s->created_at }, { "updated_at", s->updated_at } } );
        return { { "models", models }, { "sessions", sessions }, { "next_session", next_session_ } };
    }

private:
    static std::string now_iso() {
        return fmt::format( "{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime( std::chrono::system_clock::to_time_t(
                                                         std::chrono::system_clock::now() ) ) );
    }

    static std::string extension_of( MeshFormat f ) {
        switch( f ) {
        case MeshFormat::STL:
            return "stl";
        case MeshFormat::PLY:
            return "ply";
        case MeshFormat::OBJ:
            return "obj";
        }
        return "stl";
    }

    static void send_json( httplib::Response& res, int status, const nlohmann::json& body ) {
        res.status = status;
        res.set_content( body.dump(), "application/json" );
    }

    static void send_error( httplib::Response& res, int status, std::string_view code, std::string_view message ) {
        send_json( res, status, { { "error", code }, { "message", message } } );
    }

    // Conditional GET keyed on the artifact bytes.
    static void send_artifact( const httplib::Request& req, httplib::Response& res, std::string bytes,
                               const char* type ) {
        const std::string etag = fmt::format( "\"{}\"", content_hash( bytes ) );
        res.set_header( "ETag", etag );
        if( req.get_header_value( "If-None-Match" ) == etag ) {
            res.status = 304;
            return;
        }
        res.status = 200;
        res.set_content( std::move( bytes ), type );
    }

    template <class F>
    static auto guarded( F&& handler ) {
        return [h = std::forward<F>( handler )]( const httplib::Request& req, httplib::Response& res ) {
            try {
                h( req, res );
            } catch( const Error& e ) {
                switch( e.code() ) {
                case ErrorCode::InvalidParams:
                case ErrorCode::DimensionMismatch:
                case ErrorCode::DegenerateRay:
                case ErrorCode::Unavailable:
                    send_error( res, 422, to_string( e.code() ), e.what() );
                    break;
                case ErrorCode::LayerOutOfRange:
                    send_error( res, 404, to_string( e.code() ), e.what() );
                    break;
                default:
                    send_error( res, 400, to_string( e.code() ), e.what() );
                }
            } catch( const nlohmann::json::exception& e ) {
                send_error( res, 400, "MalformedJson", e.what() );
            }
        };
    }

    std::shared_ptr<Session> find_session( const std::string& id ) const {
        std::lock_guard lock( state_ );
        const auto it = sessions_.find( id );
        return it == sessions_.end() ? nullptr : it->second;
    }

    std::shared_ptr<const Model> find_model( const std::string& id ) const {
        std::lock_guard lock( state_ );
        const auto it = models_.find( id );
        return it == models_.end() ? nullptr : it->second;
    }

    // Caller holds state_.
    nlohmann::json session_json( const Session& s ) const {
        return { { "id", s.id },
                 { "model_id", s.model_id },
                 { "params", to_json( s.params ) },
                 { "generated", s.result != nullptr },
                 { "created_at", s.created_at },
                 { "updated_at", s.updated_at } };
    }

    static nlohmann::json model_json( const Model& m ) {
        return { { "model_id", m.id },
                 { "name", m.name },
                 { "vertex_count", m.mesh.vertices.size() },
                 { "triangle_count", m.mesh.triangles.size() },
                 { "bbox", { { "min", { m.bbox.min.x, m.bbox.min.y, m.bbox.min.z } },
                             { "max", { m.bbox.max.x, m.bbox.max.y, m.bbox.max.z } } } },
                 { "watertight", m.watertight } };
    }

    void check_limits( const GenerationParams& p ) const {
        if( p.space.block_count() > config_.max_blocks )
            throw Error( ErrorCode::InvalidParams,
                         fmt::format( "resolution exceeds {} blocks", config_.max_blocks ) );
    }

    std::shared_ptr<Model> ingest( std::string id, std::string name, MeshFormat format,
                                   const std::filesystem::path& file, std::string_view bytes ) {
        auto m = std::make_shared<Model>();
        m->mesh = load_mesh( bytes, format );
        m->bbox = bounding_box( m->mesh );
        m->watertight = is_watertight( m->mesh );
        m->mesh = center_mesh( std::move( m->mesh ) );
        m->id = std::move( id );
        m->name = std::move( name );
        m->format = format;
        m->file = file;
        return m;
    }

    void restore( const nlohmann::json& snap ) {
        for( const auto& jm : snap.at( "models" ) ) {
            const std::filesystem::path file = jm.at( "file" ).get<std::string>();
            const auto format = format_from_extension( "x." + jm.at( "format" ).get<std::string>() );
            if( !format || !std::filesystem::exists( file ) )
                continue;
            models_[jm.at( "id" )] = ingest( jm.at( "id" ), jm.at( "name" ), *format, file, read_file( file ) );
        }
        for( const auto& js : snap.at( "sessions" ) ) {
            if( !models_.contains( js.at( "model_id" ).get<std::string>() ) )
                continue;
            auto s = std::make_shared<Session>();
            s->id = js.at( "id" );
            s->model_id = js.at( "model_id" );
            s->params = apply_params_json( default_params(), js.at( "params" ) );
            s->created_at = js.value( "created_at", now_iso() );
            s->updated_at = js.value( "updated_at", s->created_at );
            sessions_[s->id] = std::move( s );
        }
        next_session_ = snap.value( "next_session", std::uint64_t( sessions_.size() ) );
    }

    GenerationParams default_params() const {
        GenerationParams p;
        p.space = DesignSpace::defaults();
        p.supersample = config_.supersample;
        p.threads = config_.threads;
        return p;
    }

    void routes() {
        server_.set_payload_max_length( config_.max_upload_bytes );

        server_.Get( "/api/health", []( const httplib::Request&, httplib::Response& res ) {
            send_json( res, 200, { { "status", "ok" } } );
        } );

        server_.Post( "/api/models", guarded( [this]( const httplib::Request& req, httplib::Response& res ) {
                          if( !req.has_file( "file" ) )
                              return send_error( res, 400, "MalformedFile", "multipart field 'file' is required" );
                          const auto part = req.get_file_value( "file" );
                          const auto format = format_from_extension( part.filename );
                          if( !format )
                              return send_error( res, 400, "UnsupportedFeature",
                                                 "file extension must be .stl, .ply or .obj" );
                          const std::string id = content_hash( part.content + extension_of( *format ) );
                          const auto file = config_.spool_dir / ( id + "." + extension_of( *format ) );
                          auto model = ingest( id, part.filename, *format, file, part.content );
                          if( !std::filesystem::exists( file ) )
                              write_file( file, part.content );
                          {
                              std::lock_guard lock( state_ );
                              models_.try_emplace( id, model );
                          }
                          send_json( res, 201, model_json( *model ) );
                      } ) );

        server_.Get( "/api/models/:id", [this]( const httplib::Request& req, httplib::Response& res ) {
            const auto m = find_model( req.path_params.at( "id" ) );
            if( !m )
                return send_error( res, 404, "UnknownModel", "no such model" );
            send_json( res, 200, model_json( *m ) );
        } );

        server_.Post( "/api/sessions", guarded( [this]( const httplib::Request& req, httplib::Response& res ) {
                          const auto body = nlohmann::json::parse( req.body );
                          if( !body.is_object() || !body.contains( "model_id" ) || !body["model_id"].is_string() )
                              return send_error( res, 400, "MalformedJson", "'model_id' string is required" );
                          if( !find_model( body["model_id"] ) )
                              return send_error( res, 404, "UnknownModel", "no such model" );
                          auto s = std::make_shared<Session>();
                          s->model_id = body["model_id"];
                          s->params = default_params();
                          if( body.contains( "params" ) )
                              s->params = apply_params_json( s->params, body["params"] );
                          check_limits( s->params );
                          s->created_at = s->updated_at = now_iso();
                          std::lock_guard lock( state_ );
                          s->id = fmt::format( "s{:06d}", ++next_session_ );
                          sessions_[s->id] = s;
                          send_json( res, 201, session_json( *s ) );
                      } ) );

        server_.Get( "/api/sessions/:id", [this]( const httplib::Request& req, httplib::Response& res ) {
            const auto s = find_session( req.path_params.at( "id" ) );
            if( !s )
                return send_error( res, 404, "UnknownSession", "no such session" );
            std::lock_guard lock( state_ );
            send_json( res, 200, session_json( *s ) );
        } );

        server_.Patch( "/api/sessions/:id/params",
                       guarded( [this]( const httplib::Request& req, httplib::Response& res ) {
                           const auto s = find_session( req.path_params.at( "id" ) );
                           if( !s )
                               return send_error( res, 404, "UnknownSession", "no such session" );
                           const auto body = nlohmann::json::parse( req.body );
                           std::lock_guard lock( state_ );
                           GenerationParams next = apply_params_json( s->params, body );
                           check_limits( next );
                           if( !( next == s->params ) ) {
                               s->params = next;
                               s->result.reset();
                           }
                           s->updated_at = now_iso();
                           send_json( res, 200, session_json( *s ) );
                       } ) );

        server_.Post( "/api/sessions/:id/generate",
                      guarded( [this]( const httplib::Request& req, httplib::Response& res ) {
                          const auto s = find_session( req.path_params.at( "id" ) );
                          if( !s )
                              return send_error( res, 404, "UnknownSession", "no such session" );
                          std::unique_lock running( s->running, std::try_to_lock );
                          if( !running.owns_lock() )
                              return send_error( res, 409, "GenerationInFlight", "a job is already running" );
                          GenerationParams params;
                          std::shared_ptr<const FoamResult> result;
                          {
                              std::lock_guard lock( state_ );
                              params = s->params;
                              if( s->result && s->result->params == params )
                                  result = s->result;
                          }
                          if( !result ) {
                              const auto model = find_model( s->model_id );
                              if( !model )
                                  return send_error( res, 404, "UnknownModel", "session model is gone" );
                              ++generations_;
                              result = std::make_shared<const FoamResult>( generate_foam( model->mesh, params ) );
                              std::lock_guard lock( state_ );
                              if( s->params == params )
                                  s->result = result;
                          }
                          auto body = summary_json( *result );
                          const std::string base = "/api/sessions/" + s->id;
                          body["links"] = { { "foam_plus_stl", base + "/foam/plus.stl" },
                                            { "foam_minus_stl", base + "/foam/minus.stl" },
                                            { "foam_plus_ply", base + "/foam/plus.ply" },
                                            { "foam_minus_ply", base + "/foam/minus.ply" },
                                            { "slices", base + "/slices" },
                                            { "blockmap", base + "/blockmap" } };
                          send_json( res, 200, body );
                      } ) );

        server_.Post( "/api/sessions/:id/optimize-angle",
                      guarded( [this]( const httplib::Request& req, httplib::Response& res ) {
                          const auto s = find_session( req.path_params.at( "id" ) );
                          if( !s )
                              return send_error( res, 404, "UnknownSession", "no such session" );
                          OptimizerConfig cfg;
                          if( !req.body.empty() ) {
                              const auto body = nlohmann::json::parse( req.body );
                              if( !body.is_object() )
                                  return send_error( res, 400, "MalformedJson", "body must be an object" );
                              cfg.step = body.value( "step", cfg.step );
                              cfg.max_rounds = body.value( "max_rounds", cfg.max_rounds );
                          }
                          std::unique_lock running( s->running, std::try_to_lock );
                          if( !running.owns_lock() )
                              return send_error( res, 409, "GenerationInFlight", "a job is already running" );
                          GenerationParams params;
                          {
                              std::lock_guard lock( state_ );
                              params = s->params;
                          }
                          const auto model = find_model( s->model_id );
                          if( !model )
                              return send_error( res, 404, "UnknownModel", "session model is gone" );
                          cfg.supersample = params.supersample;
                          cfg.threads = params.threads;
                          const ScoreReport report = optimize_rotation( model->mesh, params.space, cfg, params.angles );
                          std::lock_guard lock( state_ );
                          if( !( s->params.angles == report.angles ) ) {
                              s->params.angles = report.angles;
                              s->result.reset();
                          }
                          s->updated_at = now_iso();
                          auto body = to_json( report );
                          body["session"] = session_json( *s );
                          send_json( res, 200, body );
                      } ) );

        const auto with_result = [this]( const httplib::Request& req, httplib::Response& res )
            -> std::shared_ptr<const FoamResult> {
            const auto s = find_session( req.path_params.at( "id" ) );
            if( !s ) {
                send_error( res, 404, "UnknownSession", "no such session" );
                return nullptr;
            }
            std::lock_guard lock( state_ );
            if( !s->result )
                send_error( res, 404, "NotGenerated", "run generate first" );
            return s->result;
        };

        server_.Get( "/api/sessions/:id/slices",
                     guarded( [with_result]( const httplib::Request& req, httplib::Response& res ) {
                         if( const auto r = with_result( req, res ) )
                             send_artifact( req, res, slices_json_artifact( *r ), "application/json" );
                     } ) );

        server_.Get( "/api/sessions/:id/slices/:file",
                     guarded( [with_result]( const httplib::Request& req, httplib::Response& res ) {
                         const std::string& file = req.path_params.at( "file" );
                         int layer = -1;
                         const auto dot = file.find( ".svg" );
                         const auto [p, ec] = std::from_chars( file.data(), file.data() + dot, layer );
                         if( dot == std::string::npos || dot + 4 != file.size() || ec != std::errc() ||
                             p != file.data() + dot )
                             return send_error( res, 404, "NotFound", "expected /slices/{layer}.svg" );
                         if( const auto r = with_result( req, res ) )
                             send_artifact( req, res, render_slice_svg( r->slices, layer ), "image/svg+xml" );
                     } ) );

        server_.Get( "/api/sessions/:id/foam/:file",
                     guarded( [with_result]( const httplib::Request& req, httplib::Response& res ) {
                         static const std::map<std::string, std::pair<Label, ExportFormat>> files = {
                             { "plus.stl", { Label::FoamPlus, ExportFormat::STL_BINARY } },
                             { "minus.stl", { Label::FoamMinus, ExportFormat::STL_BINARY } },
                             { "plus.ply", { Label::FoamPlus, ExportFormat::PLY_ASCII } },
                             { "minus.ply", { Label::FoamMinus, ExportFormat::PLY_ASCII } } };
                         const auto it = files.find( req.path_params.at( "file" ) );
                         if( it == files.end() )
                             return send_error( res, 404, "NotFound", "expected {plus|minus}.{stl|ply}" );
                         const auto [region, format] = it->second;
                         if( const auto r = with_result( req, res ) )
                             send_artifact( req, res, foam_artifact( *r, region, format ),
                                            format == ExportFormat::STL_BINARY ? "model/stl" : "text/plain" );
                     } ) );

        server_.Get( "/api/sessions/:id/blockmap",
                     guarded( [with_result]( const httplib::Request& req, httplib::Response& res ) {
                         if( const auto r = with_result( req, res ) )
                             send_artifact( req, res, block_map_to_json( r->block_map ).dump(), "application/json" );
                     } ) );

        server_.Get( "/api/sessions/:id/blockmap.bin",
                     guarded( [with_result]( const httplib::Request& req, httplib::Response& res ) {
                         if( const auto r = with_result( req, res ) )
                             send_artifact( req, res, encode_block_map( r->block_map ), "application/octet-stream" );
                     } ) );
    }

    ServiceConfig config_;
    httplib::Server server_;
    int port_ = -1;
    mutable std::mutex state_;
    std::map<std::string, std::shared_ptr<const Model>> models_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_session_ = 0;
    std::atomic<std::size_t> generations_{ 0 };
};

} // namespace foamforge
