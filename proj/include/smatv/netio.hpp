#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "smatv/catalog.hpp"
#include "smatv/compliance.hpp"
#include "smatv/engine.hpp"
#include "smatv/errors.hpp"
#include "smatv/network.hpp"
#include "smatv/optimize.hpp"

namespace smatv {

inline constexpr int kFormatVersion = 1;

// Malformed JSON text; the message carries the byte offset.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, std::size_t byte) : Error(msg), byte_(byte) {}
    std::size_t byte() const { return byte_; }

private:
    std::size_t byte_;
};

// Well-formed JSON that does not match the schema (unknown or missing
// fields, bad enum values, undefined catalog ids). `path` is a JSON pointer.
class SchemaError : public Error {
public:
    SchemaError(const std::string& msg, std::string path) : Error(msg + " at " + path), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// Schema-valid document describing a network that fails validation.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Diagnostic> diags);
    const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

struct NetworkDocument {
    Network network;
    std::optional<Scenario> scenario;
};

NetworkDocument parse_network(std::string_view text);
NetworkDocument network_from_json(const nlohmann::json& doc);
std::string serialize_network(const Network& net, const std::optional<Scenario>& scenario = std::nullopt);
nlohmann::json network_to_json(const Network& net, const std::optional<Scenario>& scenario = std::nullopt);

Catalog parse_catalog(std::string_view text);
std::string serialize_catalog(const Catalog& catalog);

// Scenario blocks: {"regulators": {node: {reg: index}}, "source_trims_db": {node: {line: dB}}}
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

std::vector<Diagnostic> diagnostics_from_json(const nlohmann::json& j);
nlohmann::json diagnostics_to_json(const std::vector<Diagnostic>& diags);

// The five-floor, four-apartment building: 60 outputs (two SAT receiver
// ports and one TV port per apartment) behind a chain of MV5xx
// multiswitches. Lengths and stored positions come from the frozen tuning
// table.
NetworkDocument build_case_study();
NetworkDocument build_case_study(const nlohmann::json& tuning);

enum class ReportFormat { Table, Machine };

nlohmann::json report_to_json(const ComplianceReport& report, const SimulationResult* sim = nullptr);
ComplianceReport report_from_json(const nlohmann::json& j);
nlohmann::json sweep_to_json(const SweepResult& sweep);
SweepResult sweep_from_json(const nlohmann::json& j);
nlohmann::json optimize_to_json(const OptimizeResult& result);
nlohmann::json trace_to_json(const SimulationResult& sim, const Network& net, std::string_view output);

std::string export_report(const ComplianceReport& report, ReportFormat format, const SimulationResult* sim = nullptr);
std::string export_sweep(const SweepResult& sweep, ReportFormat format);
std::string export_optimize(const OptimizeResult& result, ReportFormat format);

}  // namespace smatv
