#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "smatv/catalog.hpp"
#include "smatv/model.hpp"

namespace smatv {

struct SpectrumAnchor {
    double frequency_mhz;
    double level_dbuv;

    bool operator==(const SpectrumAnchor&) const = default;
};

// One line emitted by a source. The level is either an explicit spectrum
// (piecewise linear, held flat beyond the end anchors) or a total power in
// dBm derated per channel over the line's channel plan.
struct SourceLine {
    SignalLine line = SignalLine::TERR;
    std::vector<SpectrumAnchor> spectrum;
    std::optional<double> power_dbm;
    std::optional<double> cnr_db;
    std::vector<Channel> channels;

    bool operator==(const SourceLine&) const = default;
};

struct SourceNode {
    std::vector<SourceLine> lines;

    const SourceLine* find(SignalLine line) const;
    LineSet emitted() const;
    bool operator==(const SourceNode&) const = default;
};

struct ComponentNode {
    std::string component_id;
    // Stored regulator positions; regulators not listed keep the catalog index.
    std::map<std::string, int> settings;

    bool operator==(const ComponentNode&) const = default;
};

enum class OutputKind { SatReceiverPort, TvPort };
std::string_view to_string(OutputKind k);
std::optional<OutputKind> parse_output_kind(std::string_view text);

struct OutputNode {
    OutputKind kind = OutputKind::TvPort;
    int floor = 0;
    int apartment = 0;

    bool operator==(const OutputNode&) const = default;
};

enum class NodeKind { Source, Component, Output };
std::string_view to_string(NodeKind k);

struct Node {
    std::string id;
    std::variant<SourceNode, ComponentNode, OutputNode> body;

    NodeKind kind() const { return static_cast<NodeKind>(body.index()); }
    const SourceNode* source() const { return std::get_if<SourceNode>(&body); }
    const ComponentNode* component() const { return std::get_if<ComponentNode>(&body); }
    const OutputNode* output() const { return std::get_if<OutputNode>(&body); }

    bool operator==(const Node&) const = default;
};

// Fixed port names of sources and outputs.
inline constexpr std::string_view kSourcePort = "out";
inline constexpr std::string_view kOutputPort = "in";

struct PortRef {
    std::string node;
    std::string port;

    auto operator<=>(const PortRef&) const = default;
};

struct Edge {
    std::string id;
    PortRef from;
    PortRef to;
    std::string cable;
    double length_m = 0.0;
    LineSet lines;

    bool operator==(const Edge&) const = default;
};

struct LevelWindow {
    double min_dbuv;
    double max_dbuv;

    bool operator==(const LevelWindow&) const = default;
};

struct BandConstraints {
    LevelWindow window;
    double cnr_min_db;

    bool operator==(const BandConstraints&) const = default;
};

struct DesignConstraints {
    BandConstraints terrestrial{{57.0, 80.0}, 57.0};
    BandConstraints sat_if{{47.0, 77.0}, 11.0};
    double tap_isolation_min_db = 20.0;
    // Multichannel-receiver networks: tap isolation raised to 40 dB.
    bool strict_isolation = false;
    // Apply the per-channel derating of component output ratings.
    bool overload_derating = true;
    double max_drop_length_m = 80.0;

    static constexpr double kStrictIsolationDb = 40.0;

    const BandConstraints& for_band(Band b) const { return b == Band::Terrestrial ? terrestrial : sat_if; }
    BandConstraints& for_band(Band b) { return b == Band::Terrestrial ? terrestrial : sat_if; }
    double isolation_minimum() const {
        return strict_isolation ? std::max(tap_isolation_min_db, kStrictIsolationDb) : tap_isolation_min_db;
    }

    bool operator==(const DesignConstraints&) const = default;
};

struct Network {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    FrequencyGrid grid = FrequencyGrid::standard();
    DesignConstraints constraints;
    std::shared_ptr<const Catalog> catalog;
    // Name of the catalog for serialization: "builtin" or empty for inline.
    std::string catalog_ref = "builtin";

    const Node* find_node(std::string_view id) const;
    const Edge* find_edge(std::string_view id) const;
    // Ports of a node with their supported lines (sources/outputs included).
    std::vector<PortSpec> ports_of(const Node& node) const;
    // Channel plan aggregated over every source.
    ChannelPlan channel_plan() const;
    std::vector<const Node*> outputs() const;

    bool operator==(const Network& o) const;
};

enum class Severity { Error, Warning };
std::string_view to_string(Severity s);

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string invariant;  // short machine tag, e.g. "acyclic", "drop-length"
    std::string subject;    // offending node / edge id
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

// Empty iff every network invariant holds. Warnings (e.g. long drops) are
// reported but do not make the network invalid.
std::vector<Diagnostic> validate_network(const Network& net);
bool has_errors(const std::vector<Diagnostic>& diags);

struct Hop {
    std::string node;
    std::string in_port;   // empty at the source
    std::string out_port;  // empty at the output
    std::string edge;      // edge arriving at in_port; empty at the source

    bool operator==(const Hop&) const = default;
};

// The unique source-to-output path of `line`. Throws NotReachable or
// AmbiguousPath.
std::vector<Hop> line_path(const Network& net, std::string_view output, SignalLine line);

// Lines arriving at an output node (those carried by its inbound edge).
LineSet output_lines(const Network& net, std::string_view output);

}  // namespace smatv
