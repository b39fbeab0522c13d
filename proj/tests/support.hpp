#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "smatv/engine.hpp"
#include "smatv/network.hpp"

namespace smatv::testing {

// Generic parts for synthetic networks: splitters SPL2/SPL3, amplifier AMP
// (4-position regulator "gain"), attenuator EQ (4-position "att"), cables
// "coax" and "hard".
std::shared_ptr<const Catalog> test_catalog();

struct TreeOptions {
    int max_depth = 4;
    int max_outputs = 60;
    int max_knobs = 1000;
    bool coarse_grid = false;
    bool cnr_sometimes_unconstrained = true;
};

// Single source "src" emitting all five lines, feeding a random tree.
Network random_tree(std::mt19937_64& rng, const TreeOptions& opts = {});

// Level and noise at an output, computed by walking edges backwards from
// the output and summing gains along the way. Shares no code with the
// engine's traversal. nullopt when the line does not reach the output.
struct OracleTrace {
    std::vector<double> frequencies_mhz;
    std::vector<double> levels_dbuv;
    std::vector<double> noise_ratio;
};
std::optional<OracleTrace> oracle_trace(const Network& net, const std::string& output, SignalLine line,
                                        const Scenario& scenario);

// Compliant outputs under `scenario`, from the oracle traces.
int oracle_count(const Network& net, const Scenario& scenario);

// source (80 dBuV flat, all lines) -> cable -> output; no components.
Network toy_drop(double length_m, const std::string& cable = "coax");

}  // namespace smatv::testing
