#include "smatv/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "smatv/errors.hpp"

namespace smatv {

LevelDBuV power_to_level(PowerDBm p, int n_channels) {
    if (n_channels < 1) throw std::invalid_argument("channel count must be >= 1");
    return LevelDBuV{p.value + kDbmToDbuv75 - 10.0 * std::log10(static_cast<double>(n_channels))};
}

CNRatioDB cascade_cnr(CNRatioDB cn_in, int n_amps, LevelDBuV u_out, GainDB k, NoiseFigureDB f) {
    if (n_amps < 1) throw std::invalid_argument("amplifier count must be >= 1");
    double stage = u_out.value - k.value - f.value - 10.0 * std::log10(static_cast<double>(n_amps));
    return CNRatioDB::from_noise_ratio(cn_in.noise_ratio() + std::pow(10.0, -stage / 10.0));
}

CNRatioDB combine_cnr(std::span<const CNRatioDB> contributions) {
    if (contributions.empty()) throw std::invalid_argument("combine_cnr needs at least one contribution");
    double sum = 0.0;
    for (const auto& c : contributions) sum += c.noise_ratio();
    return CNRatioDB::from_noise_ratio(sum);
}

std::vector<SpectrumAnchor> source_from_power(PowerDBm p, const ChannelPlan& plan, SignalLine line) {
    int n = plan.count(line);
    if (n < 1) throw EmptyPlan("channel plan has no channel on " + std::string(to_string(line)));
    double level = power_to_level(p, n).value;
    auto r = band_range(band_of(line));
    return {{r.lo_mhz, level}, {r.hi_mhz, level}};
}

const LineTrace* SimulationResult::trace(const PortRef& port, SignalLine line) const {
    auto it = traces.find(port);
    if (it == traces.end()) return nullptr;
    auto jt = it->second.find(line);
    return jt == it->second.end() ? nullptr : &jt->second;
}

const LineTrace* SimulationResult::output_trace(std::string_view output, SignalLine line) const {
    return trace(PortRef{std::string(output), std::string(kOutputPort)}, line);
}

std::vector<const OutputSummary*> SimulationResult::summaries_for(std::string_view output) const {
    std::vector<const OutputSummary*> out;
    for (const auto& s : summaries)
        if (s.output == output) out.push_back(&s);
    return out;
}

namespace {

double spectrum_at(const std::vector<SpectrumAnchor>& anchors, double mhz) {
    if (mhz <= anchors.front().frequency_mhz) return anchors.front().level_dbuv;
    if (mhz >= anchors.back().frequency_mhz) return anchors.back().level_dbuv;
    auto hi = std::lower_bound(anchors.begin(), anchors.end(), mhz,
                               [](const SpectrumAnchor& a, double f) { return a.frequency_mhz < f; });
    if (hi->frequency_mhz == mhz) return hi->level_dbuv;
    auto lo = hi - 1;
    double t = (mhz - lo->frequency_mhz) / (hi->frequency_mhz - lo->frequency_mhz);
    return lo->level_dbuv + t * (hi->level_dbuv - lo->level_dbuv);
}

}  // namespace

struct Evaluator::Plan {
    struct Slot {
        PortRef port;
        SignalLine line;
        std::size_t offset;
        std::size_t size;
    };
    struct SourceOp {
        std::size_t slot;
        std::vector<double> levels;
        double noise;
        std::pair<std::string, SignalLine> trim_key;
    };
    struct EdgeOp {
        std::size_t from, to;
        std::vector<double> gain;
    };
    struct TransferOp {
        std::size_t from, to;
        std::vector<double> gain;
        std::vector<std::size_t> knobs;
        bool active;
        double noise_figure;
    };
    struct Op {
        enum Kind { Source, Edge, Transfer } kind;
        std::size_t index;
    };
    struct OutputEntry {
        std::string output;
        SignalLine line;
        std::size_t slot;
    };

    std::vector<Slot> slots;
    std::size_t total = 0;
    std::vector<SourceOp> sources;
    std::vector<EdgeOp> edges;
    std::vector<TransferOp> transfers;
    std::vector<Op> ops;
    std::vector<OutputEntry> outputs;
    std::vector<RegulatorKnob> knobs;
    std::map<std::pair<std::string, std::string>, std::size_t> knob_index;
    std::size_t output_nodes = 0;

    void compute(std::span<const int> indices, const Scenario& trims, std::vector<double>& level,
                 std::vector<double>& noise) const {
        level.assign(total, 0.0);
        noise.assign(total, 0.0);
        for (const auto& op : ops) {
            switch (op.kind) {
                case Op::Source: {
                    const auto& s = sources[op.index];
                    const auto& slot = slots[s.slot];
                    double trim = 0.0;
                    if (auto it = trims.source_trims_db.find(s.trim_key); it != trims.source_trims_db.end())
                        trim = it->second;
                    for (std::size_t i = 0; i < slot.size; ++i) {
                        level[slot.offset + i] = s.levels[i] + trim;
                        noise[slot.offset + i] = s.noise;
                    }
                    break;
                }
                case Op::Edge: {
                    const auto& e = edges[op.index];
                    const auto& from = slots[e.from];
                    const auto& to = slots[e.to];
                    for (std::size_t i = 0; i < to.size; ++i) {
                        level[to.offset + i] = level[from.offset + i] + e.gain[i];
                        noise[to.offset + i] = noise[from.offset + i];
                    }
                    break;
                }
                case Op::Transfer: {
                    const auto& t = transfers[op.index];
                    const auto& from = slots[t.from];
                    const auto& to = slots[t.to];
                    double offset = 0.0;
                    for (auto k : t.knobs) offset += knobs[k].positions[static_cast<std::size_t>(indices[k])];
                    for (std::size_t i = 0; i < to.size; ++i) {
                        double k = t.gain[i] + offset;
                        double u_out = level[from.offset + i] + k;
                        level[to.offset + i] = u_out;
                        double n = noise[from.offset + i];
                        if (t.active) {
                            double stage_cnr = u_out - k - t.noise_figure;
                            n += std::pow(10.0, -stage_cnr / 10.0);
                        }
                        noise[to.offset + i] = n;
                    }
                    break;
                }
            }
        }
    }

    OutputSummary summarize_entry(const OutputEntry& o, const std::vector<double>& level,
                                  const std::vector<double>& noise, const std::vector<double>& freqs) const {
        const auto& slot = slots[o.slot];
        OutputSummary s;
        s.output = o.output;
        s.line = o.line;
        s.min_level_dbuv = std::numeric_limits<double>::infinity();
        s.max_level_dbuv = -std::numeric_limits<double>::infinity();
        double worst_noise = 0.0;
        std::size_t worst_i = 0;
        for (std::size_t i = 0; i < slot.size; ++i) {
            double v = level[slot.offset + i];
            s.min_level_dbuv = std::min(s.min_level_dbuv, v);
            s.max_level_dbuv = std::max(s.max_level_dbuv, v);
            if (noise[slot.offset + i] > worst_noise) {
                worst_noise = noise[slot.offset + i];
                worst_i = i;
            }
        }
        s.worst_cnr = CNRatioDB::from_noise_ratio(worst_noise);
        s.worst_cnr_frequency_mhz = freqs[worst_i];
        return s;
    }

    FrequencyGrid grid;
};

Evaluator::Evaluator(const Network& net) : plan_(std::make_unique<Plan>()) {
    auto diags = validate_network(net);
    if (has_errors(diags)) {
        std::string msg = "network is invalid:";
        for (const auto& d : diags)
            if (d.severity == Severity::Error) msg += " [" + d.invariant + " @ " + d.subject + ": " + d.message + "]";
        throw InvalidNetwork(msg);
    }
    Plan& p = *plan_;
    p.grid = net.grid;
    const Catalog& catalog = *net.catalog;

    for (const auto& n : net.nodes) {
        const auto* c = n.component();
        if (!c) continue;
        const auto& spec = catalog.component(c->component_id);
        std::vector<const RegulatorSpec*> regs;
        for (const auto& r : spec.regulators) regs.push_back(&r);
        std::sort(regs.begin(), regs.end(), [](auto* a, auto* b) { return a->id < b->id; });
        for (const auto* r : regs) {
            int stored = r->regulator.current_index();
            if (auto it = c->settings.find(r->id); it != c->settings.end()) stored = it->second;
            p.knobs.push_back({n.id, r->id, r->regulator.positions(), stored});
        }
    }
    std::stable_sort(p.knobs.begin(), p.knobs.end(), [](const RegulatorKnob& a, const RegulatorKnob& b) {
        return std::tie(a.node, a.regulator) < std::tie(b.node, b.regulator);
    });
    for (std::size_t i = 0; i < p.knobs.size(); ++i) p.knob_index[{p.knobs[i].node, p.knobs[i].regulator}] = i;

    // Topological order over nodes.
    std::unordered_map<std::string, std::size_t> node_pos;
    for (std::size_t i = 0; i < net.nodes.size(); ++i) node_pos[net.nodes[i].id] = i;
    std::vector<int> indeg(net.nodes.size(), 0);
    std::vector<std::vector<const Edge*>> out_edges(net.nodes.size());
    for (const auto& e : net.edges) {
        out_edges[node_pos.at(e.from.node)].push_back(&e);
        ++indeg[node_pos.at(e.to.node)];
    }
    for (auto& v : out_edges)
        std::sort(v.begin(), v.end(), [](const Edge* a, const Edge* b) { return a->id < b->id; });
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < net.nodes.size(); ++i)
        if (indeg[i] == 0) ready.push_back(i);

    std::map<std::pair<PortRef, SignalLine>, std::size_t> slot_of;
    auto make_slot = [&](const PortRef& port, SignalLine line) {
        std::size_t n = p.grid.at(line).size();
        p.slots.push_back({port, line, p.total, n});
        p.total += n;
        slot_of[{port, line}] = p.slots.size() - 1;
        return p.slots.size() - 1;
    };
    auto find_slot = [&](const PortRef& port, SignalLine line) -> std::optional<std::size_t> {
        auto it = slot_of.find({port, line});
        if (it == slot_of.end()) return std::nullopt;
        return it->second;
    };

    ChannelPlan plan = net.channel_plan();
    while (!ready.empty()) {
        std::size_t ni = ready.front();
        ready.pop_front();
        const Node& n = net.nodes[ni];
        if (const auto* s = n.source()) {
            PortRef port{n.id, std::string(kSourcePort)};
            for (const auto& l : s->lines) {
                std::vector<SpectrumAnchor> spectrum = l.spectrum;
                if (spectrum.empty()) {
                    if (!l.power_dbm)
                        throw MissingSource("source '" + n.id + "' has no spectrum or power for " +
                                            std::string(to_string(l.line)));
                    spectrum = source_from_power(PowerDBm{*l.power_dbm}, ChannelPlan(l.channels), l.line);
                }
                std::size_t slot = make_slot(port, l.line);
                Plan::SourceOp op;
                op.slot = slot;
                for (double f : p.grid.at(l.line)) op.levels.push_back(spectrum_at(spectrum, f));
                op.noise = l.cnr_db ? CNRatioDB(*l.cnr_db).noise_ratio() : 0.0;
                op.trim_key = {n.id, l.line};
                p.sources.push_back(std::move(op));
                p.ops.push_back({Plan::Op::Source, p.sources.size() - 1});
            }
        } else if (const auto* c = n.component()) {
            const auto& spec = catalog.component(c->component_id);
            for (const auto& t : spec.transfers) {
                for (auto line : t.lines().lines()) {
                    auto from = find_slot({n.id, t.from_port}, line);
                    if (!from) continue;
                    Plan::TransferOp op;
                    op.from = *from;
                    op.to = make_slot({n.id, t.to_port}, line);
                    const auto* curve = t.curve_for(line);
                    for (double f : p.grid.at(line)) op.gain.push_back(curve->at(f));
                    for (const auto& rid : t.regulators) {
                        const auto* r = spec.regulator(rid);
                        if (r && r->lines.contains(line)) op.knobs.push_back(p.knob_index.at({n.id, rid}));
                    }
                    op.active = t.active;
                    op.noise_figure = t.noise_figure_db;
                    p.transfers.push_back(std::move(op));
                    p.ops.push_back({Plan::Op::Transfer, p.transfers.size() - 1});
                }
            }
        }
        for (const Edge* e : out_edges[ni]) {
            const auto& cable = *catalog.find_cable(e->cable);
            for (auto line : e->lines.lines()) {
                auto from = find_slot(e->from, line);
                if (!from) continue;
                Plan::EdgeOp op;
                op.from = *from;
                op.to = make_slot(e->to, line);
                for (double f : p.grid.at(line)) op.gain.push_back(cable_attenuation(cable, Frequency(f), e->length_m).value);
                p.edges.push_back(std::move(op));
                p.ops.push_back({Plan::Op::Edge, p.edges.size() - 1});
            }
            if (--indeg[node_pos.at(e->to.node)] == 0) ready.push_back(node_pos.at(e->to.node));
        }
    }

    for (const Node* o : net.outputs()) {
        ++p.output_nodes;
        for (auto line : kAllLines)
            if (auto s = find_slot({o->id, std::string(kOutputPort)}, line)) p.outputs.push_back({o->id, line, *s});
    }
}

Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;
Evaluator& Evaluator::operator=(Evaluator&&) noexcept = default;

const std::vector<Evaluator::RegulatorKnob>& Evaluator::knobs() const { return plan_->knobs; }

std::size_t Evaluator::output_count() const { return plan_->output_nodes; }

std::vector<int> Evaluator::resolve(const Scenario& scenario) const {
    std::vector<int> idx;
    for (const auto& k : plan_->knobs) idx.push_back(k.stored_index);
    for (const auto& [key, value] : scenario.regulators) {
        auto it = plan_->knob_index.find(key);
        if (it == plan_->knob_index.end())
            throw RegulatorIndexOutOfRange("scenario names unknown regulator " + key.first + "/" + key.second);
        const auto& knob = plan_->knobs[it->second];
        if (value < 0 || value >= static_cast<int>(knob.positions.size()))
            throw RegulatorIndexOutOfRange("index " + std::to_string(value) + " out of range for " + key.first + "/" +
                                           key.second);
        idx[it->second] = value;
    }
    for (const auto& [key, trim] : scenario.source_trims_db) {
        bool found = std::any_of(plan_->sources.begin(), plan_->sources.end(),
                                 [&](const Plan::SourceOp& s) { return s.trim_key == key; });
        if (!found) throw Error("scenario trims unknown source line " + key.first + "/" + std::string(to_string(key.second)));
        if (!std::isfinite(trim)) throw Error("source trim must be finite");
    }
    return idx;
}

Scenario Evaluator::to_scenario(std::span<const int> indices) const {
    Scenario s;
    for (std::size_t i = 0; i < plan_->knobs.size(); ++i)
        s.regulators[{plan_->knobs[i].node, plan_->knobs[i].regulator}] = indices[i];
    return s;
}

SimulationResult Evaluator::run(const Scenario& scenario) const {
    auto indices = resolve(scenario);
    std::vector<double> level, noise;
    plan_->compute(indices, scenario, level, noise);

    SimulationResult result;
    result.scenario = scenario;
    for (const auto& slot : plan_->slots) {
        LineTrace t;
        const auto& freqs = plan_->grid.at(slot.line);
        t.frequencies_mhz = freqs;
        t.levels_dbuv.assign(level.begin() + static_cast<std::ptrdiff_t>(slot.offset),
                             level.begin() + static_cast<std::ptrdiff_t>(slot.offset + slot.size));
        t.noise_ratio.assign(noise.begin() + static_cast<std::ptrdiff_t>(slot.offset),
                             noise.begin() + static_cast<std::ptrdiff_t>(slot.offset + slot.size));
        result.traces[slot.port][slot.line] = std::move(t);
    }
    for (const auto& o : plan_->outputs)
        result.summaries.push_back(plan_->summarize_entry(o, level, noise, plan_->grid.at(o.line)));
    return result;
}

std::vector<OutputSummary> Evaluator::summarize(std::span<const int> indices, const Scenario& base) const {
    if (indices.size() != plan_->knobs.size()) throw std::invalid_argument("index vector size mismatch");
    for (std::size_t i = 0; i < indices.size(); ++i)
        if (indices[i] < 0 || indices[i] >= static_cast<int>(plan_->knobs[i].positions.size()))
            throw RegulatorIndexOutOfRange("knob index out of range");
    std::vector<double> level, noise;
    plan_->compute(indices, base, level, noise);
    std::vector<OutputSummary> out;
    out.reserve(plan_->outputs.size());
    for (const auto& o : plan_->outputs) out.push_back(plan_->summarize_entry(o, level, noise, plan_->grid.at(o.line)));
    return out;
}

SimulationResult propagate(const Network& net, const Scenario& scenario) { return Evaluator(net).run(scenario); }

}  // namespace smatv
