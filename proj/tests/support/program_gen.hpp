#pragma once

#include <cstdint>
#include <string>

#include "paragraph/rng.hpp"

namespace paragraph::testing {

struct ProgramGenConfig {
    int max_loop_depth = 3;
    int max_trip = 10;
    int max_stmts_per_block = 4;
};

/// Random branch-free program for the execution-count oracle: integer
/// declarations, assignments, arithmetic, and canonical constant-bound
/// for loops nested up to max_loop_depth.
std::string generate_oracle_program(Rng& rng, const ProgramGenConfig& cfg = {});

}  // namespace paragraph::testing
