#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace arqsched {

// Columnar experiment artifact. to_csv() renders '#'-prefixed provenance
// comments, one header line, then the data rows, all LF-terminated; cells are
// RFC-4180 quoted when needed. Identical inputs produce byte-identical text.
struct TableArtifact {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string to_csv() const;
};

// Built-in parameter grids of the four reference result tables, steady-state
// initial beliefs throughout. Table 1 is fully exact and ignores episodes and
// seed; tables 2-4 pair the genie closed form with a Monte Carlo greedy run
// (`episodes` >= 1 required, row i seeded with seed + i).
TableArtifact run_table(int table_id, std::uint64_t episodes, std::uint64_t seed);

// Three-curve sum-rate sweep on the motivating three-user instance
// (p = 0.87, r = 0.1083, uniform delay over {0,1,2}, beliefs
// [0.3358, 0.1851, 0.5483]) for m = 1..max_horizon (<= 10): genie value,
// exact ARQ-optimal value, and the feedback-blind random policy, each
// divided by m.
TableArtifact run_figure1(int max_horizon = 8);

} // namespace arqsched
