// Copyright 2026 The foamforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <foamforge/cli.hpp>

int main( int argc, char** argv ) {
    return foamforge::run_cli( std::vector<std::string>( argv + 1, argv + argc ) );
}
