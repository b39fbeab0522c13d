#include "smatv/compliance.hpp"

#include <algorithm>
#include <array>

namespace smatv {

namespace {

constexpr std::array<std::pair<ViolationKind, std::string_view>, 5> kKindNames{{
    {ViolationKind::LevelLow, "level_low"},
    {ViolationKind::LevelHigh, "level_high"},
    {ViolationKind::CnrLow, "cnr_low"},
    {ViolationKind::Overload, "overload"},
    {ViolationKind::IsolationLow, "isolation_low"},
}};

}  // namespace

std::string_view to_string(ViolationKind k) {
    for (auto [kind, name] : kKindNames)
        if (kind == k) return name;
    return "?";
}

std::optional<ViolationKind> parse_violation_kind(std::string_view text) {
    for (auto [kind, name] : kKindNames)
        if (name == text) return kind;
    return std::nullopt;
}

const OutputVerdict* ComplianceReport::verdict(std::string_view output) const {
    for (const auto& v : outputs)
        if (v.output == output) return &v;
    return nullptr;
}

bool summary_passes(const OutputSummary& s, const DesignConstraints& constraints) {
    const auto& bc = constraints.for_band(band_of(s.line));
    if (s.min_level_dbuv < bc.window.min_dbuv || s.max_level_dbuv > bc.window.max_dbuv) return false;
    return s.worst_cnr.is_unconstrained() || s.worst_cnr.value() >= bc.cnr_min_db;
}

int count_within(std::span<const OutputSummary> summaries, const DesignConstraints& constraints) {
    // Summaries are grouped by output id.
    int within = 0;
    std::size_t i = 0;
    while (i < summaries.size()) {
        std::size_t j = i;
        bool pass = true;
        while (j < summaries.size() && summaries[j].output == summaries[i].output) {
            pass = pass && summary_passes(summaries[j], constraints);
            ++j;
        }
        if (pass) ++within;
        i = j;
    }
    return within;
}

ComplianceReport check_outputs(const SimulationResult& result, const Network& net,
                               const DesignConstraints& constraints) {
    ComplianceReport report;
    for (const Node* o : net.outputs()) {
        OutputVerdict v;
        v.output = o->id;
        PortRef port{o->id, std::string(kOutputPort)};
        bool any_line = false;
        for (auto line : kAllLines) {
            const LineTrace* t = result.trace(port, line);
            if (!t) continue;
            any_line = true;
            const auto& bc = constraints.for_band(band_of(line));
            bool line_pass = true;
            std::size_t worst = 0;
            double worst_noise = 0.0;
            for (std::size_t i = 0; i < t->levels_dbuv.size(); ++i) {
                double lvl = t->levels_dbuv[i];
                double f = t->frequencies_mhz[i];
                if (lvl < bc.window.min_dbuv) {
                    v.violations.push_back({o->id, port.port, line, f, ViolationKind::LevelLow, lvl, bc.window.min_dbuv, "dBuV"});
                    line_pass = false;
                } else if (lvl > bc.window.max_dbuv) {
                    v.violations.push_back({o->id, port.port, line, f, ViolationKind::LevelHigh, lvl, bc.window.max_dbuv, "dBuV"});
                    line_pass = false;
                }
                if (t->noise_ratio[i] > worst_noise) {
                    worst_noise = t->noise_ratio[i];
                    worst = i;
                }
            }
            CNRatioDB cnr = CNRatioDB::from_noise_ratio(worst_noise);
            if (!cnr.is_unconstrained() && cnr.value() < bc.cnr_min_db) {
                v.violations.push_back({o->id, port.port, line, t->frequencies_mhz[worst], ViolationKind::CnrLow,
                                        cnr.value(), bc.cnr_min_db, "dB"});
                line_pass = false;
            }
            v.lines.push_back({line, line_pass});
        }
        v.pass = any_line && v.violations.empty();
        (v.pass ? report.outputs_within : report.outputs_outside)++;
        report.outputs.push_back(std::move(v));
    }
    return report;
}

double overload_limit_dbuv(double max_output_power_dbm, int n_channels) {
    return power_to_level(PowerDBm{max_output_power_dbm}, std::max(1, n_channels)).value;
}

std::vector<Violation> check_overload(const SimulationResult& result, const Network& net,
                                      const DesignConstraints& constraints) {
    std::vector<Violation> out;
    if (!net.catalog) return out;
    ChannelPlan plan = net.channel_plan();
    std::vector<const Node*> nodes;
    for (const auto& n : net.nodes)
        if (n.component()) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(), [](const Node* a, const Node* b) { return a->id < b->id; });
    for (const Node* n : nodes) {
        const auto* spec = net.catalog->find_component(n->component()->component_id);
        if (!spec || !spec->max_output_power_dbm) continue;
        for (const auto& port : spec->ports) {
            if (port.direction != PortDirection::Out) continue;
            for (auto line : kAllLines) {
                const LineTrace* t = result.trace({n->id, port.id}, line);
                if (!t) continue;
                int channels = constraints.overload_derating ? plan.count(line) : 1;
                double limit = overload_limit_dbuv(*spec->max_output_power_dbm, channels);
                auto peak = std::max_element(t->levels_dbuv.begin(), t->levels_dbuv.end());
                if (peak != t->levels_dbuv.end() && *peak > limit) {
                    double f = t->frequencies_mhz[static_cast<std::size_t>(peak - t->levels_dbuv.begin())];
                    out.push_back({n->id, port.id, line, f, ViolationKind::Overload, *peak, limit, "dBuV"});
                }
            }
        }
    }
    return out;
}

std::vector<Violation> check_isolation(const Network& net, const Catalog& catalog,
                                       const DesignConstraints& constraints) {
    std::vector<Violation> out;
    double minimum = constraints.isolation_minimum();
    std::vector<const Node*> nodes;
    for (const auto& n : net.nodes)
        if (n.component()) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(), [](const Node* a, const Node* b) { return a->id < b->id; });
    for (const Node* n : nodes) {
        const auto* spec = catalog.find_component(n->component()->component_id);
        if (!spec || !spec->tap_isolation_db) continue;
        if (spec->cls != ComponentClass::Tap && !is_multiswitch(spec->cls)) continue;
        if (*spec->tap_isolation_db < minimum)
            out.push_back({n->id, "", std::nullopt, std::nullopt, ViolationKind::IsolationLow, *spec->tap_isolation_db,
                           minimum, "dB"});
    }
    return out;
}

ComplianceReport check_all(const SimulationResult& result, const Network& net, const DesignConstraints& constraints) {
    ComplianceReport report = check_outputs(result, net, constraints);
    report.component_violations = check_overload(result, net, constraints);
    if (net.catalog) {
        auto iso = check_isolation(net, *net.catalog, constraints);
        report.component_violations.insert(report.component_violations.end(), iso.begin(), iso.end());
    }
    return report;
}

}  // namespace smatv
