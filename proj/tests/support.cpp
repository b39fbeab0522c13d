#include "support.hpp"

#include <algorithm>
#include <cmath>

#include "smatv/compliance.hpp"

namespace smatv::testing {

namespace {

GainCurve curve(LineSet lines, std::vector<GainAnchor> anchors) { return {lines, std::move(anchors)}; }

const LineSet kTerr{SignalLine::TERR};

std::vector<GainCurve> band_curves(double terr_lo, double terr_mid, double terr_hi, double sat_lo, double sat_hi) {
    return {curve(kTerr, {{47, terr_lo}, {450, terr_mid}, {862, terr_hi}}),
            curve(LineSet::sat(), {{950, sat_lo}, {2150, sat_hi}})};
}

ComponentSpec splitter(const std::string& id, int legs, double loss) {
    ComponentSpec c;
    c.id = id;
    c.cls = ComponentClass::Splitter;
    c.ports.push_back({"in", PortDirection::In, LineSet::all(), PortRole::Trunk});
    for (int k = 1; k <= legs; ++k) {
        std::string out = "out" + std::to_string(k);
        c.ports.push_back({out, PortDirection::Out, LineSet::all(), PortRole::Trunk});
        c.transfers.push_back({"in", out, band_curves(-loss, -loss - 0.3, -loss - 0.6, -loss - 0.8, -loss - 1.7), 0.0, false, {}});
    }
    c.tap_isolation_db = 24.0;
    return c;
}

ComponentSpec two_port(const std::string& id, ComponentClass cls, std::vector<GainCurve> curves, double nf, bool active,
                       const std::string& reg, std::vector<double> positions) {
    ComponentSpec c;
    c.id = id;
    c.cls = cls;
    c.ports = {{"in", PortDirection::In, LineSet::all(), PortRole::Trunk},
               {"out", PortDirection::Out, LineSet::all(), PortRole::Trunk}};
    c.transfers.push_back({"in", "out", std::move(curves), nf, active, {reg}});
    int last = static_cast<int>(positions.size()) - 1;
    c.regulators.push_back({reg, LineSet::all(), GainRegulator(std::move(positions), last)});
    return c;
}

double interp(const std::vector<std::pair<double, double>>& pts, double f) {
    if (f <= pts.front().first) return pts.front().second;
    if (f >= pts.back().first) return pts.back().second;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (f <= pts[i].first) {
            auto [x0, y0] = pts[i - 1];
            auto [x1, y1] = pts[i];
            return y0 + (y1 - y0) * (f - x0) / (x1 - x0);
        }
    }
    return pts.back().second;
}

double oracle_cable_db_per_100m(const CableSpec& c, double f) {
    const auto& a = c.anchors();
    if (a.size() == 1) return a[0].db_per_100m;
    // Two-anchor exact solve of a + b*sqrt(f).
    double s0 = std::sqrt(a[0].frequency_mhz), s1 = std::sqrt(a[1].frequency_mhz);
    double b = (a[1].db_per_100m - a[0].db_per_100m) / (s1 - s0);
    return a[0].db_per_100m + b * (std::sqrt(f) - s0);
}

struct Builder {
    std::mt19937_64& rng;
    const TreeOptions& opts;
    Network net;
    int nodes = 0, edges = 0, outputs = 0, knobs = 0;

    double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    std::string next_node() {
        char buf[16];
        std::snprintf(buf, sizeof buf, "n%03d", nodes++);
        return buf;
    }

    void connect(PortRef from, const std::string& to_node, const std::string& to_port) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "e%03d", edges++);
        net.edges.push_back({buf, std::move(from), {to_node, to_port}, pick(0, 1) ? "coax" : "hard", uni(0.0, 40.0),
                             LineSet::all()});
    }

    void leaf(PortRef from) {
        std::string id = next_node();
        ++outputs;
        net.nodes.push_back({id, OutputNode{pick(0, 1) ? OutputKind::TvPort : OutputKind::SatReceiverPort, 1 + outputs / 4,
                                            1 + outputs % 4}});
        connect(std::move(from), id, std::string(kOutputPort));
    }

    void grow(PortRef from, int depth) {
        int budget_left = opts.max_outputs - outputs;
        bool stop = depth >= opts.max_depth || budget_left <= 1 || pick(0, 9) < 2;
        if (stop) return leaf(std::move(from));
        static const char* kParts[] = {"SPL2", "SPL3", "AMP", "EQ"};
        std::string part = kParts[pick(0, 3)];
        bool regulated = part == "AMP" || part == "EQ";
        if (regulated && knobs >= opts.max_knobs) part = "SPL2";
        if (part == "SPL3" && budget_left < 3) part = "SPL2";
        std::string id = next_node();
        ComponentNode c{part, {}};
        if (part == "AMP" || part == "EQ") {
            ++knobs;
            if (pick(0, 1)) c.settings[part == "AMP" ? "gain" : "att"] = pick(0, 3);
        }
        net.nodes.push_back({id, c});
        connect(std::move(from), id, "in");
        if (part == "AMP" || part == "EQ") return grow({id, "out"}, depth + 1);
        int legs = part == "SPL2" ? 2 : 3;
        for (int k = 1; k <= legs; ++k) grow({id, "out" + std::to_string(k)}, depth + 1);
    }
};

}  // namespace

std::shared_ptr<const Catalog> test_catalog() {
    static const std::shared_ptr<const Catalog> cat = [] {
        auto c = std::make_shared<Catalog>();
        c->add(splitter("SPL2", 2, 3.6));
        c->add(splitter("SPL3", 3, 5.8));
        c->add(two_port("AMP", ComponentClass::Amplifier, band_curves(18, 19, 20, 16, 20), 7.0, true, "gain",
                        {-9, -6, -3, 0}));
        c->add(two_port("EQ", ComponentClass::Attenuator, band_curves(-1, -1, -1, -1.5, -1.5), 0.0, false, "att",
                        {-6, -4, -2, 0}));
        c->add(CableSpec("coax", {{200, 8.5}, {800, 17.0}}));
        c->add(CableSpec("hard", {{100, 3.0}, {1000, 9.0}}));
        return std::shared_ptr<const Catalog>(c);
    }();
    return cat;
}

Network random_tree(std::mt19937_64& rng, const TreeOptions& opts) {
    Builder b{rng, opts, {}};
    b.net.catalog = test_catalog();
    b.net.catalog_ref.clear();
    if (opts.coarse_grid) {
        b.net.grid.points.clear();
        b.net.grid.points[SignalLine::TERR] = {47, 200, 474, 862};
        for (auto l : kSatLines) b.net.grid.points[l] = {950, 1550, 2150};
    }

    SourceNode src;
    for (auto line : kAllLines) {
        SourceLine sl;
        sl.line = line;
        if (line == SignalLine::TERR) {
            sl.spectrum = {{47, b.uni(70, 95)}, {b.uni(200, 600), b.uni(70, 95)}, {862, b.uni(70, 95)}};
            if (!opts.cnr_sometimes_unconstrained || b.pick(0, 4)) sl.cnr_db = b.uni(50, 70);
        } else {
            sl.spectrum = {{950, b.uni(62, 82)}, {2150, b.uni(62, 82)}};
            if (!opts.cnr_sometimes_unconstrained || b.pick(0, 4)) sl.cnr_db = b.uni(12, 20);
        }
        src.lines.push_back(std::move(sl));
    }
    b.net.nodes.push_back({"src", std::move(src)});
    b.grow({"src", std::string(kSourcePort)}, 0);
    // Canonical order, as the parser produces.
    std::sort(b.net.nodes.begin(), b.net.nodes.end(), [](const Node& x, const Node& y) { return x.id < y.id; });
    std::sort(b.net.edges.begin(), b.net.edges.end(), [](const Edge& x, const Edge& y) { return x.id < y.id; });
    return std::move(b.net);
}

std::optional<OracleTrace> oracle_trace(const Network& net, const std::string& output, SignalLine line,
                                        const Scenario& scenario) {
    struct Step {
        const Edge* edge = nullptr;
        const TransferEntry* transfer = nullptr;
        const ComponentSpec* spec = nullptr;
        std::string node;
    };
    auto inbound = [&](const std::string& node, const std::string& port) -> const Edge* {
        for (const auto& e : net.edges)
            if (e.to.node == node && e.to.port == port && e.lines.contains(line)) return &e;
        return nullptr;
    };

    // Walk back to the source, collecting steps output-first.
    std::vector<Step> back;
    const Edge* e = inbound(output, std::string(kOutputPort));
    if (!e) return std::nullopt;
    const SourceLine* src = nullptr;
    std::string src_node;
    while (true) {
        back.push_back({e, nullptr, nullptr, ""});
        const Node* from = net.find_node(e->from.node);
        if (const auto* s = from->source()) {
            src = s->find(line);
            src_node = from->id;
            break;
        }
        const auto& spec = net.catalog->component(from->component()->component_id);
        const TransferEntry* hit = nullptr;
        for (const auto& t : spec.transfers)
            if (t.to_port == e->from.port && t.curve_for(line)) hit = &t;
        if (!hit) return std::nullopt;
        back.push_back({nullptr, hit, &spec, from->id});
        e = inbound(from->id, hit->from_port);
        if (!e) return std::nullopt;
    }
    if (!src) return std::nullopt;

    OracleTrace out;
    out.frequencies_mhz = net.grid.at(line);
    std::vector<std::pair<double, double>> spectrum;
    for (const auto& a : src->spectrum) spectrum.push_back({a.frequency_mhz, a.level_dbuv});
    double trim = 0.0;
    if (auto it = scenario.source_trims_db.find({src_node, line}); it != scenario.source_trims_db.end()) trim = it->second;

    for (double f : out.frequencies_mhz) {
        double level = interp(spectrum, f) + trim;
        double noise = src->cnr_db ? std::pow(10.0, -*src->cnr_db / 10.0) : 0.0;
        for (auto it = back.rbegin(); it != back.rend(); ++it) {
            if (it->edge) {
                const auto* cable = net.catalog->find_cable(it->edge->cable);
                level -= it->edge->length_m / 100.0 * oracle_cable_db_per_100m(*cable, f);
                continue;
            }
            const GainCurve* c = it->transfer->curve_for(line);
            std::vector<std::pair<double, double>> pts;
            for (const auto& a : c->anchors) pts.push_back({a.frequency_mhz, a.gain_db});
            double k = interp(pts, f);
            const Node* node = net.find_node(it->node);
            for (const auto& rid : it->transfer->regulators) {
                const auto* r = it->spec->regulator(rid);
                if (!r->lines.contains(line)) continue;
                int idx = r->regulator.current_index();
                if (auto s = node->component()->settings.find(rid); s != node->component()->settings.end()) idx = s->second;
                if (auto s = scenario.regulators.find({it->node, rid}); s != scenario.regulators.end()) idx = s->second;
                k += r->regulator.positions()[static_cast<std::size_t>(idx)];
            }
            if (it->transfer->active) noise += std::pow(10.0, -(level - it->transfer->noise_figure_db) / 10.0);
            level += k;
        }
        out.levels_dbuv.push_back(level);
        out.noise_ratio.push_back(noise);
    }
    return out;
}

int oracle_count(const Network& net, const Scenario& scenario) {
    int count = 0;
    for (const auto& n : net.nodes) {
        if (!n.output()) continue;
        bool pass = true, any = false;
        for (auto line : kAllLines) {
            auto t = oracle_trace(net, n.id, line, scenario);
            if (!t) continue;
            any = true;
            const auto& bc = net.constraints.for_band(band_of(line));
            double worst = 0.0;
            for (std::size_t i = 0; i < t->levels_dbuv.size(); ++i) {
                if (t->levels_dbuv[i] < bc.window.min_dbuv || t->levels_dbuv[i] > bc.window.max_dbuv) pass = false;
                worst = std::max(worst, t->noise_ratio[i]);
            }
            if (worst > 0.0 && -10.0 * std::log10(worst) < bc.cnr_min_db) pass = false;
        }
        if (any && pass) ++count;
    }
    return count;
}

Network toy_drop(double length_m, const std::string& cable) {
    Network net;
    net.catalog = test_catalog();
    net.catalog_ref.clear();
    SourceNode src;
    for (auto line : kAllLines) {
        auto r = band_range(band_of(line));
        src.lines.push_back({line, {{r.lo_mhz, 80.0}, {r.hi_mhz, 80.0}}, std::nullopt, std::nullopt, {}});
    }
    net.nodes.push_back({"src", std::move(src)});
    net.nodes.push_back({"out", OutputNode{OutputKind::TvPort, 1, 1}});
    net.edges.push_back({"drop", {"src", std::string(kSourcePort)}, {"out", std::string(kOutputPort)}, cable, length_m,
                         LineSet::all()});
    return net;
}

}  // namespace smatv::testing
