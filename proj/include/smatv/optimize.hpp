#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smatv/compliance.hpp"
#include "smatv/engine.hpp"
#include "smatv/network.hpp"

namespace smatv {

struct SweepRow {
    double level_dbuv;
    int within;
    int outside;

    bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
    std::string source;
    SignalLine line = SignalLine::TERR;
    std::vector<SweepRow> rows;       // sorted by level
    double argmax_level_dbuv = 0.0;   // lowest level reaching the coarse maximum
    std::vector<SweepRow> fine_rows;  // 1 dB steps around the argmax
    double optimum_lo_dbuv = 0.0;     // levels of the fine sweep reaching its maximum
    double optimum_hi_dbuv = 0.0;
    int total = 0;
};

// Replaces the serving source's spectrum on `line` with a flat level (any
// scenario trim on that line is dropped) and counts compliant outputs for
// each level. The fine sweep covers argmax +/- the coarse spacing (5 dB for a
// single level) in 1 dB steps. Throws AmbiguousSource / NotReachable.
SweepResult sweep_input_level(const Network& net, SignalLine line, std::span<const double> levels,
                              const Scenario& base = {});

// The network with `line` of its single serving source set to a flat level.
Network with_flat_source(const Network& net, SignalLine line, double level_dbuv);

enum class SearchMethod { Exhaustive, CoordinateDescent };
std::string_view to_string(SearchMethod m);

struct TraceEntry {
    std::size_t evaluation;
    int count;
    int best;

    bool operator==(const TraceEntry&) const = default;
};

struct OptimizeResult {
    Scenario best;
    std::vector<int> best_indices;  // one per knob, Evaluator::knobs() order
    int best_count = 0;
    int start_count = 0;
    int total = 0;
    std::vector<TraceEntry> trace;
    SearchMethod method = SearchMethod::Exhaustive;
    std::size_t evaluations = 0;
};

inline constexpr std::size_t kExhaustiveLimit = 1'000'000;

// Maximizes the number of compliant outputs over discrete regulator
// positions. Exhaustive when the cross product fits the budget (and 10^6),
// otherwise coordinate descent to a fixed point with seeded random restarts
// until the budget is spent. Ties keep the starting scenario, then the
// lexicographically smallest index vector. Source trims in `start` are held
// fixed. Throws NoRegulators.
OptimizeResult optimize_gains(const Network& net, const DesignConstraints& constraints, std::size_t budget,
                              std::uint64_t seed, const Scenario& start = {});

struct Sensitivity {
    std::string node;
    std::string knob;        // regulator id, or "trim" for a source trim
    bool source_trim = false;
    int current_index = 0;
    std::vector<double> step_effects_db;  // positions[i+1] - positions[i]
    std::optional<double> up_db;          // effect of index + 1
    std::optional<double> down_db;        // effect of index - 1
    double db_per_db = 0.0;               // trims only

    bool operator==(const Sensitivity&) const = default;
};

// Knobs on the output's path for `line` with their per-step level effect at
// the output (exact, levels being additive in dB). Throws NotReachable.
std::vector<Sensitivity> sensitivity(const Network& net, std::string_view output, SignalLine line,
                                     const Scenario& scenario = {});

}  // namespace smatv
