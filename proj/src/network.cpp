#include "smatv/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <unordered_map>

#include "smatv/errors.hpp"

namespace smatv {

const SourceLine* SourceNode::find(SignalLine line) const {
    for (const auto& l : lines)
        if (l.line == line) return &l;
    return nullptr;
}

LineSet SourceNode::emitted() const {
    LineSet s;
    for (const auto& l : lines) s.insert(l.line);
    return s;
}

std::string_view to_string(OutputKind k) { return k == OutputKind::SatReceiverPort ? "sat_receiver" : "tv"; }

std::optional<OutputKind> parse_output_kind(std::string_view text) {
    if (text == "sat_receiver") return OutputKind::SatReceiverPort;
    if (text == "tv") return OutputKind::TvPort;
    return std::nullopt;
}

std::string_view to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Source: return "source";
        case NodeKind::Component: return "component";
        case NodeKind::Output: return "output";
    }
    return "?";
}

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

const Node* Network::find_node(std::string_view id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

const Edge* Network::find_edge(std::string_view id) const {
    for (const auto& e : edges)
        if (e.id == id) return &e;
    return nullptr;
}

std::vector<PortSpec> Network::ports_of(const Node& node) const {
    if (const auto* s = node.source())
        return {PortSpec{std::string(kSourcePort), PortDirection::Out, s->emitted(), PortRole::Trunk}};
    if (node.output()) return {PortSpec{std::string(kOutputPort), PortDirection::In, LineSet::all(), PortRole::Subscriber}};
    const auto* c = node.component();
    if (!catalog) return {};
    if (const auto* spec = catalog->find_component(c->component_id)) return spec->ports;
    return {};
}

ChannelPlan Network::channel_plan() const {
    std::vector<Channel> all;
    for (const auto& n : nodes)
        if (const auto* s = n.source())
            for (const auto& l : s->lines) all.insert(all.end(), l.channels.begin(), l.channels.end());
    return ChannelPlan(std::move(all));
}

std::vector<const Node*> Network::outputs() const {
    std::vector<const Node*> out;
    for (const auto& n : nodes)
        if (n.output()) out.push_back(&n);
    std::sort(out.begin(), out.end(), [](const Node* a, const Node* b) { return a->id < b->id; });
    return out;
}

bool Network::operator==(const Network& o) const {
    bool same_catalog = (catalog == o.catalog) || (catalog && o.catalog && *catalog == *o.catalog);
    return same_catalog && nodes == o.nodes && edges == o.edges && grid == o.grid && constraints == o.constraints &&
           catalog_ref == o.catalog_ref;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

class Validator {
public:
    explicit Validator(const Network& net) : net_(net) {}

    std::vector<Diagnostic> run() {
        check_ids();
        check_constraints();
        check_grid();
        check_nodes();
        check_edges();
        if (auto order = topological_order())
            check_line_trees(*order);
        return std::move(diags_);
    }

private:
    void error(std::string inv, std::string subject, std::string msg) {
        diags_.push_back({Severity::Error, std::move(inv), std::move(subject), std::move(msg)});
    }
    void warning(std::string inv, std::string subject, std::string msg) {
        diags_.push_back({Severity::Warning, std::move(inv), std::move(subject), std::move(msg)});
    }

    void check_ids() {
        std::set<std::string> seen;
        for (const auto& n : net_.nodes) {
            if (n.id.empty()) error("identifier", n.id, "node with empty id");
            if (!seen.insert(n.id).second) error("unique-id", n.id, "duplicate node id");
            node_index_.emplace(n.id, &n);
        }
        seen.clear();
        for (const auto& e : net_.edges) {
            if (e.id.empty()) error("identifier", e.id, "edge with empty id");
            if (!seen.insert(e.id).second) error("unique-id", e.id, "duplicate edge id");
        }
    }

    void check_constraints() {
        const auto& c = net_.constraints;
        for (auto b : {Band::Terrestrial, Band::SatIF}) {
            const auto& bc = c.for_band(b);
            std::string name(to_string(b));
            if (!std::isfinite(bc.window.min_dbuv) || !std::isfinite(bc.window.max_dbuv))
                error("constraints", name, "level window must be finite");
            else if (!(bc.window.min_dbuv < bc.window.max_dbuv))
                error("level-window", name, "level window min must be below max");
            if (!std::isfinite(bc.cnr_min_db)) error("constraints", name, "C/N floor must be finite");
        }
        if (!std::isfinite(c.tap_isolation_min_db) || c.tap_isolation_min_db < 0.0)
            error("constraints", "tap_isolation", "tap isolation minimum must be finite and >= 0");
        if (!std::isfinite(c.max_drop_length_m) || c.max_drop_length_m < 0.0)
            error("constraints", "max_drop_length", "drop length ceiling must be finite and >= 0");
    }

    void check_grid() {
        for (const auto& [line, pts] : net_.grid.points) {
            std::string subject = "grid:" + std::string(to_string(line));
            auto range = band_range(band_of(line));
            if (pts.size() < 2) error("grid", subject, "needs at least 2 points");
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (!range.contains(pts[i])) error("grid", subject, "point " + std::to_string(pts[i]) + " MHz outside band");
                if (i > 0 && !(pts[i] > pts[i - 1])) error("grid", subject, "points must be strictly increasing");
            }
        }
    }

    void check_nodes() {
        if (!net_.catalog) error("catalog", "", "network has no catalog");
        std::set<std::string> checked_specs;
        for (const auto& n : net_.nodes) {
            if (const auto* s = n.source()) {
                LineSet seen;
                for (const auto& l : s->lines) {
                    std::string line_name(to_string(l.line));
                    if (seen.contains(l.line)) error("source", n.id, "line " + line_name + " emitted twice");
                    seen.insert(l.line);
                    if (!net_.grid.points.count(l.line)) error("grid", n.id, "no grid for emitted line " + line_name);
                    auto range = band_range(band_of(l.line));
                    for (std::size_t i = 0; i < l.spectrum.size(); ++i) {
                        const auto& a = l.spectrum[i];
                        if (!std::isfinite(a.level_dbuv) || !range.contains(a.frequency_mhz))
                            error("source", n.id, "spectrum anchor invalid for line " + line_name);
                        if (i > 0 && !(a.frequency_mhz > l.spectrum[i - 1].frequency_mhz))
                            error("source", n.id, "spectrum anchors must be strictly increasing");
                    }
                    if (l.power_dbm && !std::isfinite(*l.power_dbm)) error("source", n.id, "power must be finite");
                    if (l.cnr_db && !std::isfinite(*l.cnr_db)) error("source", n.id, "C/N must be finite");
                    for (const auto& ch : l.channels) {
                        if (ch.line != l.line) error("channel-plan", n.id, "channel assigned to another line");
                        if (!(ch.bandwidth_mhz > 0.0) ||
                            !range.contains(ch.center_mhz - ch.bandwidth_mhz / 2) ||
                            !range.contains(ch.center_mhz + ch.bandwidth_mhz / 2))
                            error("channel-plan", n.id, "channel at " + std::to_string(ch.center_mhz) +
                                                            " MHz does not fit the " + line_name + " band");
                    }
                }
            } else if (const auto* c = n.component()) {
                if (!net_.catalog) continue;
                const auto* spec = net_.catalog->find_component(c->component_id);
                if (!spec) {
                    error("unknown-component", n.id, "unknown component '" + c->component_id + "'");
                    continue;
                }
                if (checked_specs.insert(spec->id).second)
                    for (auto& p : check_component_spec(*spec)) error("component-spec", n.id, p);
                for (const auto& [reg, idx] : c->settings) {
                    const auto* r = spec->regulator(reg);
                    if (!r)
                        error("regulator", n.id, "no regulator '" + reg + "' on " + spec->id);
                    else if (idx < 0 || idx >= r->regulator.size())
                        error("regulator", n.id, "index " + std::to_string(idx) + " out of range for '" + reg + "'");
                }
            }
        }
    }

    const PortSpec* find_port(const Node& node, std::string_view port_id) {
        auto& cache = port_cache_[node.id];
        if (cache.empty()) cache = net_.ports_of(node);
        for (const auto& p : cache)
            if (p.id == port_id) return &p;
        return nullptr;
    }

    void check_edges() {
        for (const auto& e : net_.edges) {
            auto from_it = node_index_.find(e.from.node);
            auto to_it = node_index_.find(e.to.node);
            if (from_it == node_index_.end()) error("dangling", e.id, "unknown from node '" + e.from.node + "'");
            if (to_it == node_index_.end()) error("dangling", e.id, "unknown to node '" + e.to.node + "'");
            if (!net_.catalog || !net_.catalog->find_cable(e.cable)) error("dangling", e.id, "unknown cable '" + e.cable + "'");
            if (!std::isfinite(e.length_m) || e.length_m < 0.0) error("edge-length", e.id, "length must be >= 0");
            if (e.lines.empty()) error("edge-lines", e.id, "edge carries no lines");
            if (from_it == node_index_.end() || to_it == node_index_.end()) continue;

            const Node& from = *from_it->second;
            const Node& to = *to_it->second;
            if (to.source()) error("source-inbound", e.id, "source '" + to.id + "' has an inbound edge");
            if (from.output()) error("output-outbound", e.id, "output '" + from.id + "' has an outbound edge");
            if (to.output()) {
                ++output_inbound_[to.id];
                if (e.length_m > net_.constraints.max_drop_length_m)
                    warning("drop-length", e.id,
                            "drop of " + std::to_string(e.length_m) + " m exceeds the " +
                                std::to_string(net_.constraints.max_drop_length_m) + " m subscriber line length");
            }
            const auto* fp = find_port(from, e.from.port);
            const auto* tp = find_port(to, e.to.port);
            if (!fp) error("dangling", e.id, "node '" + from.id + "' has no port '" + e.from.port + "'");
            else if (fp->direction != PortDirection::Out) error("port-direction", e.id, "port '" + e.from.port + "' is not an output");
            if (!tp) error("dangling", e.id, "node '" + to.id + "' has no port '" + e.to.port + "'");
            else if (tp->direction != PortDirection::In) error("port-direction", e.id, "port '" + e.to.port + "' is not an input");
            if (fp && tp && !e.lines.subset_of(fp->lines.intersect(tp->lines)))
                error("edge-lines", e.id, "edge carries lines not supported by both ports");
        }
        for (const auto& n : net_.nodes)
            if (n.output() && output_inbound_[n.id] != 1)
                error("output-inbound", n.id, "output needs exactly one inbound edge");
    }

    std::optional<std::vector<const Node*>> topological_order() {
        std::unordered_map<std::string, int> indeg;
        std::unordered_map<std::string, std::vector<std::string>> succ;
        for (const auto& n : net_.nodes) indeg[n.id];
        for (const auto& e : net_.edges) {
            if (!node_index_.count(e.from.node) || !node_index_.count(e.to.node)) continue;
            succ[e.from.node].push_back(e.to.node);
            ++indeg[e.to.node];
        }
        std::deque<std::string> ready;
        for (const auto& n : net_.nodes)
            if (indeg[n.id] == 0) ready.push_back(n.id);
        std::vector<const Node*> order;
        while (!ready.empty()) {
            auto id = ready.front();
            ready.pop_front();
            order.push_back(node_index_.at(id));
            for (const auto& s : succ[id])
                if (--indeg[s] == 0) ready.push_back(s);
        }
        if (order.size() != node_index_.size()) {
            for (const auto& [id, d] : indeg)
                if (d > 0) {
                    error("acyclic", id, "node '" + id + "' lies on a cycle");
                    break;
                }
            return std::nullopt;
        }
        return order;
    }

    // Forward reachability per (port, line): every line arriving anywhere
    // must have exactly one upstream writer.
    void check_line_trees(const std::vector<const Node*>& order) {
        std::map<PortRef, LineSet> fed;
        std::map<std::string, std::vector<const Edge*>> out_edges;
        for (const auto& e : net_.edges) out_edges[e.from.node].push_back(&e);

        for (const Node* n : order) {
            if (const auto* s = n->source()) {
                fed[{n->id, std::string(kSourcePort)}] = s->emitted();
            } else if (const auto* c = n->component(); c && net_.catalog) {
                const auto* spec = net_.catalog->find_component(c->component_id);
                if (!spec) continue;
                for (const auto& t : spec->transfers) {
                    LineSet in = fed[{n->id, t.from_port}];
                    LineSet arriving = t.lines().intersect(in);
                    auto& out = fed[{n->id, t.to_port}];
                    if (!out.disjoint(arriving))
                        error("tree-per-line", n->id,
                              "port '" + t.to_port + "' receives the same line over two paths");
                    out = out.unite(arriving);
                }
            }
            for (const Edge* e : out_edges[n->id]) {
                LineSet avail = fed[e->from];
                LineSet missing;
                for (auto l : e->lines.lines())
                    if (!avail.contains(l)) missing.insert(l);
                if (!missing.empty()) {
                    std::string names;
                    for (auto l : missing.lines()) names += std::string(names.empty() ? "" : ",") + std::string(to_string(l));
                    error("unfed-line", e->id, "edge declares lines with no upstream signal: " + names);
                }
                LineSet arriving = e->lines.intersect(avail);
                auto& in = fed[e->to];
                if (!in.disjoint(arriving))
                    error("tree-per-line", e->to.node, "port '" + e->to.port + "' receives the same line from two edges");
                in = in.unite(arriving);
            }
        }
    }

    const Network& net_;
    std::vector<Diagnostic> diags_;
    std::unordered_map<std::string, const Node*> node_index_;
    std::unordered_map<std::string, std::vector<PortSpec>> port_cache_;
    std::unordered_map<std::string, int> output_inbound_;
};

}  // namespace

std::vector<Diagnostic> validate_network(const Network& net) { return Validator(net).run(); }

std::vector<Hop> line_path(const Network& net, std::string_view output, SignalLine line) {
    std::string line_name(to_string(line));
    const Node* node = net.find_node(output);
    if (!node || !node->output()) throw NotReachable("'" + std::string(output) + "' is not an output");

    auto edges_into = [&](const std::string& node_id, const std::string& port) {
        std::vector<const Edge*> found;
        for (const auto& e : net.edges)
            if (e.to.node == node_id && e.to.port == port && e.lines.contains(line)) found.push_back(&e);
        return found;
    };

    std::vector<Hop> reversed;
    std::string cur_node = node->id;
    std::string in_port(kOutputPort);
    std::string out_port;
    for (std::size_t steps = 0;; ++steps) {
        if (steps > net.nodes.size()) throw AmbiguousPath("path for " + line_name + " does not terminate");
        auto in_edges = edges_into(cur_node, in_port);
        if (in_edges.empty())
            throw NotReachable(line_name + " does not arrive at '" + cur_node + "' port '" + in_port + "'");
        if (in_edges.size() > 1)
            throw AmbiguousPath(line_name + " arrives at '" + cur_node + "' port '" + in_port + "' over several edges");
        const Edge* e = in_edges.front();
        reversed.push_back({cur_node, in_port, out_port, e->id});

        const Node* up = net.find_node(e->from.node);
        if (!up) throw NotReachable("edge '" + e->id + "' starts at an unknown node");
        if (const auto* s = up->source()) {
            if (!s->find(line)) throw NotReachable("source '" + up->id + "' does not emit " + line_name);
            reversed.push_back({up->id, "", e->from.port, ""});
            break;
        }
        if (up->output()) throw NotReachable("edge '" + e->id + "' starts at an output");
        const auto* c = up->component();
        if (!net.catalog) throw NotReachable("network has no catalog");
        const auto& spec = net.catalog->component(c->component_id);
        std::vector<const TransferEntry*> candidates;
        for (const auto& t : spec.transfers)
            if (t.to_port == e->from.port && t.curve_for(line) && !edges_into(up->id, t.from_port).empty())
                candidates.push_back(&t);
        if (candidates.empty())
            throw NotReachable(line_name + " has no path into '" + up->id + "' port '" + e->from.port + "'");
        if (candidates.size() > 1)
            throw AmbiguousPath(line_name + " reaches '" + up->id + "' port '" + e->from.port + "' over several paths");
        cur_node = up->id;
        in_port = candidates.front()->from_port;
        out_port = e->from.port;
    }
    std::reverse(reversed.begin(), reversed.end());
    return reversed;
}

LineSet output_lines(const Network& net, std::string_view output) {
    LineSet s;
    for (const auto& e : net.edges)
        if (e.to.node == output) s = s.unite(e.lines);
    return s;
}

}  // namespace smatv
