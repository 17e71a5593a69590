// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include <foamforge/service.hpp>

namespace testing_support {

inline std::filesystem::path fresh_dir( const std::string& tag ) {
    std::random_device rd;
    auto dir = std::filesystem::temp_directory_path() / ( "foamforge-test-" + tag + "-" + std::to_string( rd() ) );
    std::filesystem::create_directories( dir );
    return dir;
}

// In-process service on a free loopback port.
class LiveService {
public:
    explicit LiveService( foamforge::ServiceConfig cfg ) : service_( with_free_port( std::move( cfg ) ) ) {
        if( service_.bind() < 0 )
            throw std::runtime_error( "bind failed" );
        thread_ = std::thread( [this] { service_.run(); } );
        service_.wait_until_ready();
    }

    ~LiveService() {
        service_.stop();
        thread_.join();
    }

    foamforge::FoamService& service() { return service_; }

    httplib::Client client() const {
        httplib::Client c( "127.0.0.1", service_.port() );
        c.set_read_timeout( 120, 0 );
        return c;
    }

    // Upload + session creation; returns the session id.
    std::string open_session( const std::string& filename, const std::string& bytes,
                              const nlohmann::json& params = nlohmann::json::object() ) {
        auto c = client();
        const auto up = c.Post( "/api/models", httplib::MultipartFormDataItems{ { "file", bytes, filename, "" } } );
        if( !up || up->status != 201 )
            throw std::runtime_error( "upload failed" );
        const auto model = nlohmann::json::parse( up->body );
        const auto s = c.Post( "/api/sessions", nlohmann::json{ { "model_id", model["model_id"] } }.dump(),
                               "application/json" );
        if( !s || s->status != 201 )
            throw std::runtime_error( "session failed" );
        const std::string id = nlohmann::json::parse( s->body )["id"];
        if( !params.empty() ) {
            const auto p = c.Patch( "/api/sessions/" + id + "/params", params.dump(), "application/json" );
            if( !p || p->status != 200 )
                throw std::runtime_error( "patch failed" );
        }
        return id;
    }

private:
    static foamforge::ServiceConfig with_free_port( foamforge::ServiceConfig cfg ) {
        cfg.port = 0;
        if( cfg.spool_dir.empty() )
            cfg.spool_dir = fresh_dir( "spool" );
        return cfg;
    }

    foamforge::FoamService service_;
    std::thread thread_;
};

} // namespace testing_support
