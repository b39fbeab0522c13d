#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smatv/engine.hpp"
#include "smatv/network.hpp"

namespace smatv {

enum class ViolationKind { LevelLow, LevelHigh, CnrLow, Overload, IsolationLow };
std::string_view to_string(ViolationKind k);
std::optional<ViolationKind> parse_violation_kind(std::string_view text);

struct Violation {
    std::string node;
    std::string port;
    std::optional<SignalLine> line;
    std::optional<double> frequency_mhz;
    ViolationKind kind = ViolationKind::LevelLow;
    double measured = 0.0;
    double limit = 0.0;
    std::string unit;  // "dBuV" or "dB"

    bool operator==(const Violation&) const = default;
};

struct LineVerdict {
    SignalLine line;
    bool pass;

    bool operator==(const LineVerdict&) const = default;
};

struct OutputVerdict {
    std::string output;
    bool pass = true;
    std::vector<LineVerdict> lines;
    std::vector<Violation> violations;

    bool operator==(const OutputVerdict&) const = default;
};

struct ComplianceReport {
    std::vector<OutputVerdict> outputs;  // sorted by output id
    std::vector<Violation> component_violations;
    int outputs_within = 0;
    int outputs_outside = 0;

    int total() const { return outputs_within + outputs_outside; }
    bool clean() const { return outputs_outside == 0 && component_violations.empty(); }
    const OutputVerdict* verdict(std::string_view output) const;

    bool operator==(const ComplianceReport&) const = default;
};

// An output passes iff every grid level of every line it carries lies in the
// band window (inclusive) and the worst C/N reaches the band floor. Outputs
// carrying no signal at all fail.
ComplianceReport check_outputs(const SimulationResult& result, const Network& net,
                               const DesignConstraints& constraints);

// Same pass/fail rule from summaries alone.
bool summary_passes(const OutputSummary& s, const DesignConstraints& constraints);
int count_within(std::span<const OutputSummary> summaries, const DesignConstraints& constraints);

// Allowed per-channel output ceiling for a rated power on a line with
// n_channels.
double overload_limit_dbuv(double max_output_power_dbm, int n_channels);

// Output ports of rated components whose peak level on a line exceeds the
// per-channel ceiling. N(line) comes from the network channel plan; a line
// without a declared plan counts as one channel.
std::vector<Violation> check_overload(const SimulationResult& result, const Network& net,
                                      const DesignConstraints& constraints);

// Taps and multiswitches whose isolation datum is below the minimum
// (strict mode raises it to 40 dB).
std::vector<Violation> check_isolation(const Network& net, const Catalog& catalog,
                                       const DesignConstraints& constraints);

// Outputs + overload + isolation in one report.
ComplianceReport check_all(const SimulationResult& result, const Network& net, const DesignConstraints& constraints);

}  // namespace smatv
