#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smatv/model.hpp"

namespace smatv {

enum class ComponentClass {
    MultiswitchCascadable,
    MultiswitchTerminal,
    MultiswitchRadial,
    Tap,
    Splitter,
    Amplifier,
    Attenuator,
    HeadendIfIf,
};

std::string_view to_string(ComponentClass c);
std::optional<ComponentClass> parse_component_class(std::string_view text);
bool is_multiswitch(ComponentClass c);

enum class PortDirection { In, Out };
enum class PortRole { Trunk, Subscriber, Terrestrial, SatInput };

std::string_view to_string(PortDirection d);
std::string_view to_string(PortRole r);
std::optional<PortDirection> parse_port_direction(std::string_view text);
std::optional<PortRole> parse_port_role(std::string_view text);

struct PortSpec {
    std::string id;
    PortDirection direction = PortDirection::In;
    LineSet lines;
    PortRole role = PortRole::Trunk;

    bool operator==(const PortSpec&) const = default;
};

struct GainAnchor {
    double frequency_mhz;
    double gain_db;

    bool operator==(const GainAnchor&) const = default;
};

// Piecewise-linear gain over frequency, shared by a group of lines.
struct GainCurve {
    LineSet lines;
    std::vector<GainAnchor> anchors;

    // Throws FrequencyOutOfRange outside the anchor span.
    double at(double mhz) const;

    bool operator==(const GainCurve&) const = default;
};

struct TransferEntry {
    std::string from_port;
    std::string to_port;
    std::vector<GainCurve> curves;
    double noise_figure_db = 0.0;
    bool active = false;
    // Regulators whose offset is added on this path (for the lines they cover).
    std::vector<std::string> regulators;

    const GainCurve* curve_for(SignalLine line) const;
    LineSet lines() const;

    bool operator==(const TransferEntry&) const = default;
};

// Discrete gain trim: strictly increasing dB offsets and a selected index.
class GainRegulator {
public:
    GainRegulator(std::vector<double> positions_db, int current_index);

    const std::vector<double>& positions() const { return positions_; }
    int current_index() const { return current_; }
    int size() const { return static_cast<int>(positions_.size()); }
    double offset(int index) const;

    bool operator==(const GainRegulator&) const = default;

private:
    std::vector<double> positions_;
    int current_;
};

struct RegulatorSpec {
    std::string id;
    LineSet lines;
    GainRegulator regulator;

    bool operator==(const RegulatorSpec&) const = default;
};

struct ComponentSpec {
    std::string id;
    ComponentClass cls = ComponentClass::Attenuator;
    std::vector<PortSpec> ports;
    std::vector<TransferEntry> transfers;
    std::vector<RegulatorSpec> regulators;
    std::optional<double> max_output_power_dbm;
    std::optional<double> tap_isolation_db;
    std::map<std::string, std::string> metadata;

    const PortSpec* port(std::string_view port_id) const;
    const RegulatorSpec* regulator(std::string_view reg_id) const;

    bool operator==(const ComponentSpec&) const = default;
};

struct CableAnchor {
    double frequency_mhz;
    double db_per_100m;

    bool operator==(const CableAnchor&) const = default;
};

// Coax attenuation A(f) = a + b*sqrt(f) [dB/100 m], least-squares fitted
// through the anchors.
class CableSpec {
public:
    CableSpec(std::string id, std::vector<CableAnchor> anchors);

    const std::string& id() const { return id_; }
    const std::vector<CableAnchor>& anchors() const { return anchors_; }
    double a() const { return a_; }
    double b() const { return b_; }
    double db_per_100m(double mhz) const { return a_ + b_ * std::sqrt(mhz); }

    bool operator==(const CableSpec& o) const { return id_ == o.id_ && anchors_ == o.anchors_; }

private:
    std::string id_;
    std::vector<CableAnchor> anchors_;
    double a_ = 0.0;
    double b_ = 0.0;
};

// Returns -(length/100) * A(f). Throws FrequencyOutOfRange when f is in
// neither band.
GainDB cable_attenuation(const CableSpec& cable, Frequency f, double length_m);

class Catalog {
public:
    void add(ComponentSpec spec);
    void add(CableSpec cable);

    const ComponentSpec* find_component(std::string_view id) const;
    const CableSpec* find_cable(std::string_view id) const;
    const ComponentSpec& component(std::string_view id) const;  // throws UnknownComponent

    const std::map<std::string, ComponentSpec, std::less<>>& components() const { return components_; }
    const std::map<std::string, CableSpec, std::less<>>& cables() const { return cables_; }

    bool operator==(const Catalog&) const = default;

private:
    std::map<std::string, ComponentSpec, std::less<>> components_;
    std::map<std::string, CableSpec, std::less<>> cables_;
};

// Structural problems of one component spec (class rules, port ids,
// curve coverage). Empty when the spec is well formed.
std::vector<std::string> check_component_spec(const ComponentSpec& spec);

// The MV5xx / MR512 / SD5xx families plus a generic amplifier, attenuator
// and trunk/drop cables. Loaded from the embedded catalog data file.
const Catalog& builtin_catalog();
std::shared_ptr<const Catalog> builtin_catalog_ptr();

// Effective transfer of one component at fixed regulator positions.
class ComponentInstance {
public:
    ComponentInstance(const ComponentSpec& spec, std::map<std::string, int> indices);

    const ComponentSpec& spec() const { return *spec_; }
    int index(std::string_view regulator_id) const;
    const std::map<std::string, int>& indices() const { return indices_; }

    // Sum of selected regulator offsets applying to `line` on `transfer`.
    double regulator_offset(const TransferEntry& transfer, SignalLine line) const;
    // Base curve + regulator offsets. Throws if the path does not carry `line`.
    GainDB transfer_gain(const TransferEntry& transfer, SignalLine line, Frequency f) const;

private:
    const ComponentSpec* spec_;
    std::map<std::string, int> indices_;
};

// Throws UnknownComponent / RegulatorIndexOutOfRange. Regulators absent
// from `indices` keep their stored index.
ComponentInstance instantiate(const Catalog& catalog, std::string_view component_id,
                              const std::map<std::string, int>& indices = {});

}  // namespace smatv
