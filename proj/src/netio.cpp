#include "smatv/netio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <set>
#include <sstream>

#include "smatv/errors.hpp"

namespace smatv {

using nlohmann::json;

ValidationError::ValidationError(std::vector<Diagnostic> diags)
    : Error([&] {
          std::string msg = "network validation failed:";
          for (const auto& d : diags)
              if (d.severity == Severity::Error) msg += "\n  " + d.invariant + " @ " + d.subject + ": " + d.message;
          return msg;
      }()),
      diags_(std::move(diags)) {}

namespace {

// Strict object reader: every key must be consumed, otherwise done() raises.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw SchemaError("expected an object", path_.empty() ? "/" : path_);
    }

    std::string at(std::string_view key) const { return path_ + "/" + std::string(key); }

    const json& req(const char* key) {
        auto it = j_.find(key);
        if (it == j_.end()) throw SchemaError(std::string("missing field '") + key + "'", path_.empty() ? "/" : path_);
        used_.insert(key);
        return *it;
    }

    const json* opt(const char* key) {
        auto it = j_.find(key);
        if (it == j_.end()) return nullptr;
        used_.insert(key);
        return &*it;
    }

    double num(const char* key) { return as_number(req(key), at(key)); }
    std::optional<double> opt_num(const char* key) {
        const json* v = opt(key);
        return v ? std::optional<double>(as_number(*v, at(key))) : std::nullopt;
    }
    std::string str(const char* key) { return as_string(req(key), at(key)); }
    int integer(const char* key) { return as_int(req(key), at(key)); }
    bool boolean(const char* key) {
        const json& v = req(key);
        if (!v.is_boolean()) throw SchemaError("expected a boolean", at(key));
        return v.get<bool>();
    }

    void done() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw SchemaError("unknown field '" + it.key() + "'", path_.empty() ? "/" : path_);
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) throw SchemaError("expected a number", path);
        double d = v.get<double>();
        if (!std::isfinite(d)) throw SchemaError("expected a finite number", path);
        return d;
    }
    static std::string as_string(const json& v, const std::string& path) {
        if (!v.is_string()) throw SchemaError("expected a string", path);
        return v.get<std::string>();
    }
    static int as_int(const json& v, const std::string& path) {
        if (!v.is_number_integer()) throw SchemaError("expected an integer", path);
        return v.get<int>();
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

const json& as_array(const json& v, const std::string& path) {
    if (!v.is_array()) throw SchemaError("expected an array", path);
    return v;
}

SignalLine line_of(const json& v, const std::string& path) {
    auto s = Obj::as_string(v, path);
    auto l = parse_signal_line(s);
    if (!l) throw SchemaError("unknown signal line '" + s + "'", path);
    return *l;
}

LineSet lines_of(const json& v, const std::string& path) {
    LineSet s;
    std::size_t i = 0;
    for (const auto& item : as_array(v, path)) s.insert(line_of(item, path + "/" + std::to_string(i++)));
    return s;
}

json lines_to_json(LineSet s) {
    json a = json::array();
    for (auto l : s.lines()) a.push_back(std::string(to_string(l)));
    return a;
}

void check_version(Obj& o) {
    const json& v = o.req("format_version");
    if (!v.is_number_integer() || v.get<int>() != kFormatVersion)
        throw SchemaError("unsupported format_version (expected " + std::to_string(kFormatVersion) + ")",
                          o.at("format_version"));
}

json parse_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("syntax error at byte ") + std::to_string(e.byte) + ": " + e.what(), e.byte);
    }
}

// ---- catalog ----

ComponentSpec component_from_json(const json& j, const std::string& path) {
    Obj o(j, path);
    ComponentSpec c;
    c.id = o.str("id");
    auto cls = o.str("class");
    auto pc = parse_component_class(cls);
    if (!pc) throw SchemaError("unknown component class '" + cls + "'", o.at("class"));
    c.cls = *pc;

    std::size_t i = 0;
    for (const auto& pj : as_array(o.req("ports"), o.at("ports"))) {
        std::string pp = o.at("ports") + "/" + std::to_string(i++);
        Obj po(pj, pp);
        PortSpec p;
        p.id = po.str("id");
        auto dir = po.str("direction");
        auto pd = parse_port_direction(dir);
        if (!pd) throw SchemaError("unknown port direction '" + dir + "'", po.at("direction"));
        p.direction = *pd;
        p.lines = lines_of(po.req("lines"), po.at("lines"));
        auto role = po.str("role");
        auto pr = parse_port_role(role);
        if (!pr) throw SchemaError("unknown port role '" + role + "'", po.at("role"));
        p.role = *pr;
        po.done();
        c.ports.push_back(std::move(p));
    }

    i = 0;
    for (const auto& tj : as_array(o.req("transfers"), o.at("transfers"))) {
        std::string tp = o.at("transfers") + "/" + std::to_string(i++);
        Obj to(tj, tp);
        TransferEntry t;
        t.from_port = to.str("from");
        t.to_port = to.str("to");
        std::size_t k = 0;
        for (const auto& cj : as_array(to.req("curves"), to.at("curves"))) {
            std::string cp = to.at("curves") + "/" + std::to_string(k++);
            Obj co(cj, cp);
            GainCurve curve;
            curve.lines = lines_of(co.req("lines"), co.at("lines"));
            std::size_t a = 0;
            for (const auto& aj : as_array(co.req("anchors"), co.at("anchors"))) {
                Obj ao(aj, co.at("anchors") + "/" + std::to_string(a++));
                curve.anchors.push_back({ao.num("frequency_mhz"), ao.num("gain_db")});
                ao.done();
            }
            co.done();
            t.curves.push_back(std::move(curve));
        }
        t.noise_figure_db = to.num("noise_figure_db");
        t.active = to.boolean("active");
        if (const json* r = to.opt("regulators")) {
            std::size_t n = 0;
            for (const auto& rj : as_array(*r, to.at("regulators")))
                t.regulators.push_back(Obj::as_string(rj, to.at("regulators") + "/" + std::to_string(n++)));
        }
        to.done();
        c.transfers.push_back(std::move(t));
    }

    if (const json* regs = o.opt("regulators")) {
        i = 0;
        for (const auto& rj : as_array(*regs, o.at("regulators"))) {
            std::string rp = o.at("regulators") + "/" + std::to_string(i++);
            Obj ro(rj, rp);
            std::string id = ro.str("id");
            LineSet lines = lines_of(ro.req("lines"), ro.at("lines"));
            std::vector<double> positions;
            std::size_t n = 0;
            for (const auto& pj : as_array(ro.req("positions_db"), ro.at("positions_db")))
                positions.push_back(Obj::as_number(pj, ro.at("positions_db") + "/" + std::to_string(n++)));
            int idx = ro.integer("default_index");
            ro.done();
            try {
                c.regulators.push_back({id, lines, GainRegulator(std::move(positions), idx)});
            } catch (const std::exception& e) {
                throw SchemaError(e.what(), rp);
            }
        }
    }
    c.max_output_power_dbm = o.opt_num("max_output_power_dbm");
    c.tap_isolation_db = o.opt_num("tap_isolation_db");
    if (const json* m = o.opt("metadata")) {
        if (!m->is_object()) throw SchemaError("expected an object", o.at("metadata"));
        for (auto it = m->begin(); it != m->end(); ++it)
            c.metadata[it.key()] = Obj::as_string(it.value(), o.at("metadata") + "/" + it.key());
    }
    o.done();
    auto problems = check_component_spec(c);
    if (!problems.empty()) throw SchemaError(problems.front(), path);
    return c;
}

json component_to_json(const ComponentSpec& c) {
    json j;
    j["id"] = c.id;
    j["class"] = std::string(to_string(c.cls));
    json ports = json::array();
    for (const auto& p : c.ports)
        ports.push_back({{"id", p.id},
                         {"direction", std::string(to_string(p.direction))},
                         {"lines", lines_to_json(p.lines)},
                         {"role", std::string(to_string(p.role))}});
    j["ports"] = std::move(ports);
    json transfers = json::array();
    for (const auto& t : c.transfers) {
        json curves = json::array();
        for (const auto& cv : t.curves) {
            json anchors = json::array();
            for (const auto& a : cv.anchors) anchors.push_back({{"frequency_mhz", a.frequency_mhz}, {"gain_db", a.gain_db}});
            curves.push_back({{"lines", lines_to_json(cv.lines)}, {"anchors", std::move(anchors)}});
        }
        json tj{{"from", t.from_port},
                {"to", t.to_port},
                {"curves", std::move(curves)},
                {"noise_figure_db", t.noise_figure_db},
                {"active", t.active}};
        if (!t.regulators.empty()) tj["regulators"] = t.regulators;
        transfers.push_back(std::move(tj));
    }
    j["transfers"] = std::move(transfers);
    if (!c.regulators.empty()) {
        json regs = json::array();
        for (const auto& r : c.regulators)
            regs.push_back({{"id", r.id},
                            {"lines", lines_to_json(r.lines)},
                            {"positions_db", r.regulator.positions()},
                            {"default_index", r.regulator.current_index()}});
        j["regulators"] = std::move(regs);
    }
    if (c.max_output_power_dbm) j["max_output_power_dbm"] = *c.max_output_power_dbm;
    if (c.tap_isolation_db) j["tap_isolation_db"] = *c.tap_isolation_db;
    if (!c.metadata.empty()) j["metadata"] = c.metadata;
    return j;
}

Catalog catalog_from_json(const json& j, const std::string& path) {
    Obj o(j, path);
    check_version(o);
    Catalog cat;
    std::size_t i = 0;
    for (const auto& cj : as_array(o.req("components"), o.at("components"))) {
        std::string cp = o.at("components") + "/" + std::to_string(i++);
        auto spec = component_from_json(cj, cp);
        if (cat.find_component(spec.id)) throw SchemaError("duplicate component id '" + spec.id + "'", cp);
        cat.add(std::move(spec));
    }
    i = 0;
    for (const auto& cj : as_array(o.req("cables"), o.at("cables"))) {
        std::string cp = o.at("cables") + "/" + std::to_string(i++);
        Obj co(cj, cp);
        std::string id = co.str("id");
        std::vector<CableAnchor> anchors;
        std::size_t n = 0;
        for (const auto& aj : as_array(co.req("attenuation"), co.at("attenuation"))) {
            Obj ao(aj, co.at("attenuation") + "/" + std::to_string(n++));
            anchors.push_back({ao.num("frequency_mhz"), ao.num("db_per_100m")});
            ao.done();
        }
        co.done();
        if (cat.find_cable(id)) throw SchemaError("duplicate cable id '" + id + "'", cp);
        try {
            cat.add(CableSpec(id, std::move(anchors)));
        } catch (const std::invalid_argument& e) {
            throw SchemaError(e.what(), cp);
        }
    }
    o.done();
    return cat;
}

json catalog_to_json(const Catalog& cat) {
    json comps = json::array();
    for (const auto& [id, c] : cat.components()) comps.push_back(component_to_json(c));
    json cables = json::array();
    for (const auto& [id, c] : cat.cables()) {
        json anchors = json::array();
        for (const auto& a : c.anchors()) anchors.push_back({{"frequency_mhz", a.frequency_mhz}, {"db_per_100m", a.db_per_100m}});
        cables.push_back({{"id", id}, {"attenuation", std::move(anchors)}});
    }
    return {{"format_version", kFormatVersion}, {"components", std::move(comps)}, {"cables", std::move(cables)}};
}

// ---- network ----

BandConstraints band_constraints_from_json(const json& j, const std::string& path, BandConstraints dflt) {
    Obj o(j, path);
    if (auto v = o.opt_num("level_min_dbuv")) dflt.window.min_dbuv = *v;
    if (auto v = o.opt_num("level_max_dbuv")) dflt.window.max_dbuv = *v;
    if (auto v = o.opt_num("cnr_min_db")) dflt.cnr_min_db = *v;
    o.done();
    return dflt;
}

DesignConstraints constraints_from_json(const json& j, const std::string& path) {
    Obj o(j, path);
    DesignConstraints c;
    if (const json* t = o.opt("terrestrial")) c.terrestrial = band_constraints_from_json(*t, o.at("terrestrial"), c.terrestrial);
    if (const json* s = o.opt("sat_if")) c.sat_if = band_constraints_from_json(*s, o.at("sat_if"), c.sat_if);
    if (auto v = o.opt_num("tap_isolation_min_db")) c.tap_isolation_min_db = *v;
    if (o.opt("strict_isolation")) c.strict_isolation = o.boolean("strict_isolation");
    if (o.opt("overload_derating")) c.overload_derating = o.boolean("overload_derating");
    if (auto v = o.opt_num("max_drop_length_m")) c.max_drop_length_m = *v;
    o.done();
    return c;
}

json constraints_to_json(const DesignConstraints& c) {
    auto band = [](const BandConstraints& b) {
        return json{{"level_min_dbuv", b.window.min_dbuv}, {"level_max_dbuv", b.window.max_dbuv}, {"cnr_min_db", b.cnr_min_db}};
    };
    return {{"terrestrial", band(c.terrestrial)},
            {"sat_if", band(c.sat_if)},
            {"tap_isolation_min_db", c.tap_isolation_min_db},
            {"strict_isolation", c.strict_isolation},
            {"overload_derating", c.overload_derating},
            {"max_drop_length_m", c.max_drop_length_m}};
}

SourceLine source_line_from_json(const json& j, const std::string& path) {
    Obj o(j, path);
    SourceLine l;
    l.line = line_of(o.req("line"), o.at("line"));
    if (const json* sp = o.opt("spectrum")) {
        std::size_t i = 0;
        for (const auto& aj : as_array(*sp, o.at("spectrum"))) {
            Obj ao(aj, o.at("spectrum") + "/" + std::to_string(i++));
            l.spectrum.push_back({ao.num("frequency_mhz"), ao.num("level_dbuv")});
            ao.done();
        }
    }
    l.power_dbm = o.opt_num("power_dbm");
    l.cnr_db = o.opt_num("cnr_db");
    if (const json* ch = o.opt("channels")) {
        std::size_t i = 0;
        for (const auto& cj : as_array(*ch, o.at("channels"))) {
            Obj co(cj, o.at("channels") + "/" + std::to_string(i++));
            l.channels.push_back({co.num("center_mhz"), co.num("bandwidth_mhz"), l.line});
            co.done();
        }
    }
    o.done();
    return l;
}

json source_line_to_json(const SourceLine& l) {
    json j{{"line", std::string(to_string(l.line))}};
    if (!l.spectrum.empty()) {
        json sp = json::array();
        for (const auto& a : l.spectrum) sp.push_back({{"frequency_mhz", a.frequency_mhz}, {"level_dbuv", a.level_dbuv}});
        j["spectrum"] = std::move(sp);
    }
    if (l.power_dbm) j["power_dbm"] = *l.power_dbm;
    if (l.cnr_db) j["cnr_db"] = *l.cnr_db;
    if (!l.channels.empty()) {
        json ch = json::array();
        for (const auto& c : l.channels) ch.push_back({{"center_mhz", c.center_mhz}, {"bandwidth_mhz", c.bandwidth_mhz}});
        j["channels"] = std::move(ch);
    }
    return j;
}

Node node_from_json(const json& j, const std::string& path) {
    Obj o(j, path);
    Node n;
    n.id = o.str("id");
    auto kind = o.str("kind");
    if (kind == "source") {
        SourceNode s;
        std::size_t i = 0;
        for (const auto& lj : as_array(o.req("lines"), o.at("lines")))
            s.lines.push_back(source_line_from_json(lj, o.at("lines") + "/" + std::to_string(i++)));
        std::sort(s.lines.begin(), s.lines.end(), [](const SourceLine& a, const SourceLine& b) { return a.line < b.line; });
        n.body = std::move(s);
    } else if (kind == "component") {
        ComponentNode c;
        c.component_id = o.str("component");
        if (const json* st = o.opt("settings")) {
            if (!st->is_object()) throw SchemaError("expected an object", o.at("settings"));
            for (auto it = st->begin(); it != st->end(); ++it)
                c.settings[it.key()] = Obj::as_int(it.value(), o.at("settings") + "/" + it.key());
        }
        n.body = std::move(c);
    } else if (kind == "output") {
        OutputNode out;
        auto ok = o.str("output_kind");
        auto pk = parse_output_kind(ok);
        if (!pk) throw SchemaError("unknown output kind '" + ok + "'", o.at("output_kind"));
        out.kind = *pk;
        out.floor = o.integer("floor");
        out.apartment = o.integer("apartment");
        n.body = out;
    } else {
        throw SchemaError("unknown node kind '" + kind + "'", o.at("kind"));
    }
    o.done();
    return n;
}

json node_to_json(const Node& n) {
    json j{{"id", n.id}, {"kind", std::string(to_string(n.kind()))}};
    if (const auto* s = n.source()) {
        json lines = json::array();
        for (const auto& l : s->lines) lines.push_back(source_line_to_json(l));
        j["lines"] = std::move(lines);
    } else if (const auto* c = n.component()) {
        j["component"] = c->component_id;
        if (!c->settings.empty()) j["settings"] = c->settings;
    } else if (const auto* o = n.output()) {
        j["output_kind"] = std::string(to_string(o->kind));
        j["floor"] = o->floor;
        j["apartment"] = o->apartment;
    }
    return j;
}

PortRef port_ref_from_json(const json& j, const std::string& path) {
    Obj o(j, path);
    PortRef r{o.str("node"), o.str("port")};
    o.done();
    return r;
}

Edge edge_from_json(const json& j, const std::string& path) {
    Obj o(j, path);
    Edge e;
    e.id = o.str("id");
    e.from = port_ref_from_json(o.req("from"), o.at("from"));
    e.to = port_ref_from_json(o.req("to"), o.at("to"));
    e.cable = o.str("cable");
    e.length_m = o.num("length_m");
    e.lines = lines_of(o.req("lines"), o.at("lines"));
    o.done();
    return e;
}

json edge_to_json(const Edge& e) {
    return {{"id", e.id},
            {"from", {{"node", e.from.node}, {"port", e.from.port}}},
            {"to", {{"node", e.to.node}, {"port", e.to.port}}},
            {"cable", e.cable},
            {"length_m", e.length_m},
            {"lines", lines_to_json(e.lines)}};
}

FrequencyGrid grid_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError("expected an object", path);
    FrequencyGrid g;
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string p = path + "/" + it.key();
        auto line = parse_signal_line(it.key());
        if (!line) throw SchemaError("unknown signal line '" + it.key() + "'", p);
        std::vector<double> pts;
        std::size_t i = 0;
        for (const auto& v : as_array(it.value(), p)) pts.push_back(Obj::as_number(v, p + "/" + std::to_string(i++)));
        g.points[*line] = std::move(pts);
    }
    return g;
}

json grid_to_json(const FrequencyGrid& g) {
    json j = json::object();
    for (const auto& [line, pts] : g.points) j[std::string(to_string(line))] = pts;
    return j;
}

void check_references(const Network& net, const json& doc) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < net.nodes.size(); ++i) index.emplace(net.nodes[i].id, i);
    // Node order in `net` may be sorted; look the original position up for the path.
    auto node_path = [&](const std::string& id) {
        const auto& arr = doc.at("nodes");
        for (std::size_t i = 0; i < arr.size(); ++i)
            if (arr[i].is_object() && arr[i].value("id", "") == id) return "/nodes/" + std::to_string(i);
        return std::string("/nodes");
    };
    for (const auto& n : net.nodes) {
        if (const auto* c = n.component(); c && !net.catalog->find_component(c->component_id))
            throw SchemaError("undefined component id '" + c->component_id + "'", node_path(n.id) + "/component");
    }
    const auto& edges = doc.at("edges");
    for (std::size_t i = 0; i < net.edges.size(); ++i) {
        const auto& e = net.edges[i];
        if (!net.catalog->find_cable(e.cable)) {
            std::string p = "/edges";
            for (std::size_t k = 0; k < edges.size(); ++k)
                if (edges[k].value("id", "") == e.id) p = "/edges/" + std::to_string(k);
            throw SchemaError("undefined cable id '" + e.cable + "'", p + "/cable");
        }
    }
}

void check_scenario_refs(const Network& net, const Scenario& s) {
    for (const auto& [key, idx] : s.regulators) {
        const Node* n = net.find_node(key.first);
        std::string p = "/scenario/regulators/" + key.first;
        if (!n || !n->component()) throw SchemaError("scenario names unknown component node '" + key.first + "'", p);
        const auto& spec = net.catalog->component(n->component()->component_id);
        const auto* r = spec.regulator(key.second);
        if (!r) throw SchemaError("component has no regulator '" + key.second + "'", p + "/" + key.second);
        if (idx < 0 || idx >= r->regulator.size())
            throw SchemaError("regulator index out of range", p + "/" + key.second);
    }
    for (const auto& [key, trim] : s.source_trims_db) {
        const Node* n = net.find_node(key.first);
        std::string p = "/scenario/source_trims_db/" + key.first;
        if (!n || !n->source() || !n->source()->find(key.second))
            throw SchemaError("scenario trims unknown source line", p + "/" + std::string(to_string(key.second)));
    }
}

std::string fmt(double v, int prec = 2) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
}

json violation_to_json(const Violation& v) {
    json j{{"node", v.node}, {"kind", std::string(to_string(v.kind))}, {"measured", v.measured}, {"limit", v.limit}, {"unit", v.unit}};
    if (!v.port.empty()) j["port"] = v.port;
    if (v.line) j["line"] = std::string(to_string(*v.line));
    if (v.frequency_mhz) j["frequency_mhz"] = *v.frequency_mhz;
    return j;
}

Violation violation_from_json(const json& j, const std::string& path) {
    Obj o(j, path);
    Violation v;
    v.node = o.str("node");
    if (o.opt("port")) v.port = o.str("port");
    if (const json* l = o.opt("line")) v.line = line_of(*l, o.at("line"));
    v.frequency_mhz = o.opt_num("frequency_mhz");
    auto kind = o.str("kind");
    auto pk = parse_violation_kind(kind);
    if (!pk) throw SchemaError("unknown violation kind '" + kind + "'", o.at("kind"));
    v.kind = *pk;
    v.measured = o.num("measured");
    v.limit = o.num("limit");
    v.unit = o.str("unit");
    o.done();
    return v;
}

std::string describe(const Violation& v) {
    std::string s = v.node;
    if (v.line) s += " " + std::string(to_string(*v.line));
    if (v.frequency_mhz) s += " @ " + fmt(*v.frequency_mhz, 1) + " MHz";
    s += ": " + std::string(to_string(v.kind)) + " measured " + fmt(v.measured) + " " + v.unit + ", limit " +
         fmt(v.limit) + " " + v.unit;
    return s;
}

json rows_to_json(const std::vector<SweepRow>& rows) {
    json a = json::array();
    for (const auto& r : rows) a.push_back({{"level_dbuv", r.level_dbuv}, {"within", r.within}, {"outside", r.outside}});
    return a;
}

std::vector<SweepRow> rows_from_json(const json& j, const std::string& path) {
    std::vector<SweepRow> rows;
    std::size_t i = 0;
    for (const auto& rj : as_array(j, path)) {
        Obj o(rj, path + "/" + std::to_string(i++));
        rows.push_back({o.num("level_dbuv"), o.integer("within"), o.integer("outside")});
        o.done();
    }
    return rows;
}

}  // namespace

Catalog parse_catalog(std::string_view text) { return catalog_from_json(parse_text(text), ""); }

std::string serialize_catalog(const Catalog& catalog) { return catalog_to_json(catalog).dump(2) + "\n"; }

Scenario scenario_from_json(const json& j) {
    Obj o(j, "/scenario");
    Scenario s;
    if (const json* regs = o.opt("regulators")) {
        if (!regs->is_object()) throw SchemaError("expected an object", o.at("regulators"));
        for (auto it = regs->begin(); it != regs->end(); ++it) {
            std::string p = o.at("regulators") + "/" + it.key();
            if (!it.value().is_object()) throw SchemaError("expected an object", p);
            for (auto jt = it.value().begin(); jt != it.value().end(); ++jt)
                s.regulators[{it.key(), jt.key()}] = Obj::as_int(jt.value(), p + "/" + jt.key());
        }
    }
    if (const json* trims = o.opt("source_trims_db")) {
        if (!trims->is_object()) throw SchemaError("expected an object", o.at("source_trims_db"));
        for (auto it = trims->begin(); it != trims->end(); ++it) {
            std::string p = o.at("source_trims_db") + "/" + it.key();
            if (!it.value().is_object()) throw SchemaError("expected an object", p);
            for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
                auto line = parse_signal_line(jt.key());
                if (!line) throw SchemaError("unknown signal line '" + jt.key() + "'", p + "/" + jt.key());
                s.source_trims_db[{it.key(), *line}] = Obj::as_number(jt.value(), p + "/" + jt.key());
            }
        }
    }
    o.done();
    return s;
}

json scenario_to_json(const Scenario& s) {
    json regs = json::object();
    for (const auto& [key, idx] : s.regulators) regs[key.first][key.second] = idx;
    json trims = json::object();
    for (const auto& [key, v] : s.source_trims_db) trims[key.first][std::string(to_string(key.second))] = v;
    return {{"regulators", std::move(regs)}, {"source_trims_db", std::move(trims)}};
}

NetworkDocument network_from_json(const json& doc) {
    Obj o(doc, "");
    check_version(o);
    NetworkDocument out;
    Network& net = out.network;

    const json& cat = o.req("catalog");
    if (cat.is_string()) {
        if (cat.get<std::string>() != "builtin")
            throw SchemaError("catalog reference must be \"builtin\" or an inline catalog", "/catalog");
        net.catalog = builtin_catalog_ptr();
        net.catalog_ref = "builtin";
    } else {
        net.catalog = std::make_shared<const Catalog>(catalog_from_json(cat, "/catalog"));
        net.catalog_ref.clear();
    }
    if (const json* g = o.opt("grid_mhz")) net.grid = grid_from_json(*g, "/grid_mhz");
    if (const json* c = o.opt("constraints")) net.constraints = constraints_from_json(*c, "/constraints");

    std::size_t i = 0;
    for (const auto& nj : as_array(o.req("nodes"), "/nodes")) net.nodes.push_back(node_from_json(nj, "/nodes/" + std::to_string(i++)));
    i = 0;
    for (const auto& ej : as_array(o.req("edges"), "/edges")) net.edges.push_back(edge_from_json(ej, "/edges/" + std::to_string(i++)));
    if (const json* s = o.opt("scenario")) out.scenario = scenario_from_json(*s);
    o.done();

    check_references(net, doc);
    std::stable_sort(net.nodes.begin(), net.nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    std::stable_sort(net.edges.begin(), net.edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });

    auto diags = validate_network(net);
    if (has_errors(diags)) throw ValidationError(std::move(diags));
    if (out.scenario) check_scenario_refs(net, *out.scenario);
    return out;
}

NetworkDocument parse_network(std::string_view text) { return network_from_json(parse_text(text)); }

json network_to_json(const Network& net, const std::optional<Scenario>& scenario) {
    json j;
    j["format_version"] = kFormatVersion;
    if (net.catalog_ref == "builtin")
        j["catalog"] = "builtin";
    else
        j["catalog"] = net.catalog ? catalog_to_json(*net.catalog) : json::object();
    j["grid_mhz"] = grid_to_json(net.grid);
    j["constraints"] = constraints_to_json(net.constraints);

    std::vector<const Node*> nodes;
    for (const auto& n : net.nodes) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(), [](const Node* a, const Node* b) { return a->id < b->id; });
    json nj = json::array();
    for (const auto* n : nodes) nj.push_back(node_to_json(*n));
    j["nodes"] = std::move(nj);

    std::vector<const Edge*> edges;
    for (const auto& e : net.edges) edges.push_back(&e);
    std::sort(edges.begin(), edges.end(), [](const Edge* a, const Edge* b) { return a->id < b->id; });
    json ej = json::array();
    for (const auto* e : edges) ej.push_back(edge_to_json(*e));
    j["edges"] = std::move(ej);

    if (scenario) j["scenario"] = scenario_to_json(*scenario);
    return j;
}

std::string serialize_network(const Network& net, const std::optional<Scenario>& scenario) {
    return network_to_json(net, scenario).dump(2) + "\n";
}

json diagnostics_to_json(const std::vector<Diagnostic>& diags) {
    json a = json::array();
    for (const auto& d : diags)
        a.push_back({{"severity", std::string(to_string(d.severity))},
                     {"invariant", d.invariant},
                     {"subject", d.subject},
                     {"message", d.message}});
    return a;
}

std::vector<Diagnostic> diagnostics_from_json(const json& j) {
    std::vector<Diagnostic> out;
    std::size_t i = 0;
    for (const auto& dj : as_array(j, "/diagnostics")) {
        Obj o(dj, "/diagnostics/" + std::to_string(i++));
        Diagnostic d;
        auto sev = o.str("severity");
        if (sev != "error" && sev != "warning") throw SchemaError("unknown severity '" + sev + "'", o.at("severity"));
        d.severity = sev == "error" ? Severity::Error : Severity::Warning;
        d.invariant = o.str("invariant");
        d.subject = o.str("subject");
        d.message = o.str("message");
        o.done();
        out.push_back(std::move(d));
    }
    return out;
}

// ---- reports ----

json report_to_json(const ComplianceReport& report, const SimulationResult* sim) {
    json outputs = json::array();
    for (const auto& v : report.outputs) {
        json lines = json::array();
        for (const auto& l : v.lines) lines.push_back({{"line", std::string(to_string(l.line))}, {"pass", l.pass}});
        json viols = json::array();
        for (const auto& x : v.violations) viols.push_back(violation_to_json(x));
        json oj{{"output", v.output}, {"pass", v.pass}, {"lines", std::move(lines)}, {"violations", std::move(viols)}};
        if (sim) {
            json summary = json::array();
            for (const auto* s : sim->summaries_for(v.output)) {
                json sj{{"line", std::string(to_string(s->line))},
                        {"min_level_dbuv", s->min_level_dbuv},
                        {"max_level_dbuv", s->max_level_dbuv},
                        {"worst_cnr_frequency_mhz", s->worst_cnr_frequency_mhz}};
                sj["worst_cnr_db"] = s->worst_cnr.is_unconstrained() ? json(nullptr) : json(s->worst_cnr.value());
                summary.push_back(std::move(sj));
            }
            oj["summary"] = std::move(summary);
        }
        outputs.push_back(std::move(oj));
    }
    json comp = json::array();
    for (const auto& x : report.component_violations) comp.push_back(violation_to_json(x));
    return {{"format_version", kFormatVersion},
            {"kind", "compliance_report"},
            {"outputs_within", report.outputs_within},
            {"outputs_outside", report.outputs_outside},
            {"total", report.total()},
            {"outputs", std::move(outputs)},
            {"component_violations", std::move(comp)}};
}

ComplianceReport report_from_json(const json& j) {
    Obj o(j, "");
    check_version(o);
    if (o.str("kind") != "compliance_report") throw SchemaError("not a compliance report", "/kind");
    ComplianceReport r;
    r.outputs_within = o.integer("outputs_within");
    r.outputs_outside = o.integer("outputs_outside");
    if (o.integer("total") != r.total()) throw SchemaError("total does not match counts", "/total");
    std::size_t i = 0;
    for (const auto& vj : as_array(o.req("outputs"), "/outputs")) {
        std::string p = "/outputs/" + std::to_string(i++);
        Obj vo(vj, p);
        OutputVerdict v;
        v.output = vo.str("output");
        v.pass = vo.boolean("pass");
        std::size_t k = 0;
        for (const auto& lj : as_array(vo.req("lines"), vo.at("lines"))) {
            Obj lo(lj, vo.at("lines") + "/" + std::to_string(k++));
            v.lines.push_back({line_of(lo.req("line"), lo.at("line")), lo.boolean("pass")});
            lo.done();
        }
        k = 0;
        for (const auto& xj : as_array(vo.req("violations"), vo.at("violations")))
            v.violations.push_back(violation_from_json(xj, vo.at("violations") + "/" + std::to_string(k++)));
        vo.opt("summary");  // informational only
        vo.done();
        r.outputs.push_back(std::move(v));
    }
    i = 0;
    for (const auto& xj : as_array(o.req("component_violations"), "/component_violations"))
        r.component_violations.push_back(violation_from_json(xj, "/component_violations/" + std::to_string(i++)));
    o.done();
    return r;
}

json sweep_to_json(const SweepResult& s) {
    return {{"format_version", kFormatVersion},
            {"kind", "sweep"},
            {"source", s.source},
            {"line", std::string(to_string(s.line))},
            {"total", s.total},
            {"rows", rows_to_json(s.rows)},
            {"argmax_level_dbuv", s.argmax_level_dbuv},
            {"fine_rows", rows_to_json(s.fine_rows)},
            {"optimum_interval_dbuv", {s.optimum_lo_dbuv, s.optimum_hi_dbuv}}};
}

SweepResult sweep_from_json(const json& j) {
    Obj o(j, "");
    check_version(o);
    if (o.str("kind") != "sweep") throw SchemaError("not a sweep result", "/kind");
    SweepResult s;
    s.source = o.str("source");
    s.line = line_of(o.req("line"), "/line");
    s.total = o.integer("total");
    s.rows = rows_from_json(o.req("rows"), "/rows");
    s.argmax_level_dbuv = o.num("argmax_level_dbuv");
    s.fine_rows = rows_from_json(o.req("fine_rows"), "/fine_rows");
    const json& iv = as_array(o.req("optimum_interval_dbuv"), "/optimum_interval_dbuv");
    if (iv.size() != 2) throw SchemaError("expected [lo, hi]", "/optimum_interval_dbuv");
    s.optimum_lo_dbuv = Obj::as_number(iv[0], "/optimum_interval_dbuv/0");
    s.optimum_hi_dbuv = Obj::as_number(iv[1], "/optimum_interval_dbuv/1");
    o.done();
    return s;
}

json optimize_to_json(const OptimizeResult& r) {
    json improvements = json::array();
    int last = -1;
    for (const auto& t : r.trace)
        if (t.best != last) {
            improvements.push_back({{"evaluation", t.evaluation}, {"best", t.best}});
            last = t.best;
        }
    return {{"format_version", kFormatVersion},
            {"kind", "optimize"},
            {"method", std::string(to_string(r.method))},
            {"best_count", r.best_count},
            {"start_count", r.start_count},
            {"total", r.total},
            {"evaluations", r.evaluations},
            {"best_indices", r.best_indices},
            {"best_scenario", scenario_to_json(r.best)},
            {"improvements", std::move(improvements)}};
}

json trace_to_json(const SimulationResult& sim, const Network& net, std::string_view output) {
    const Node* n = net.find_node(output);
    if (!n || !n->output()) throw NotReachable("'" + std::string(output) + "' is not an output");
    json bands = json::object();
    for (auto band : {Band::SatIF, Band::Terrestrial}) {
        json lines = json::object();
        for (auto line : kAllLines) {
            if (band_of(line) != band) continue;
            const LineTrace* t = sim.output_trace(output, line);
            if (!t) continue;
            json cnr = json::array();
            for (std::size_t i = 0; i < t->noise_ratio.size(); ++i) {
                auto c = t->cnr_at(i);
                cnr.push_back(c.is_unconstrained() ? json(nullptr) : json(c.value()));
            }
            lines[std::string(to_string(line))] = {{"frequencies_mhz", t->frequencies_mhz},
                                                   {"levels_dbuv", t->levels_dbuv},
                                                   {"cnr_db", std::move(cnr)}};
        }
        if (lines.empty()) continue;
        const auto& bc = net.constraints.for_band(band);
        bands[std::string(to_string(band))] = {
            {"lines", std::move(lines)},
            {"limits", {{"level_min_dbuv", bc.window.min_dbuv}, {"level_max_dbuv", bc.window.max_dbuv}, {"cnr_min_db", bc.cnr_min_db}}}};
    }
    return {{"output", std::string(output)}, {"bands", std::move(bands)}};
}

std::string export_report(const ComplianceReport& report, ReportFormat format, const SimulationResult* sim) {
    if (format == ReportFormat::Machine) return report_to_json(report, sim).dump(2) + "\n";
    std::ostringstream os;
    os << "Outputs within limits:  " << report.outputs_within << "\n";
    os << "Outputs outside limits: " << report.outputs_outside << "\n\n";
    os << pad("OUTPUT", 14) << pad("VERDICT", 9) << pad("LINE", 6) << pad("MIN[dBuV]", 11) << pad("MAX[dBuV]", 11)
       << "C/N[dB]\n";
    for (const auto& v : report.outputs) {
        bool first = true;
        std::vector<const OutputSummary*> rows;
        if (sim) rows = sim->summaries_for(v.output);
        if (rows.empty()) {
            os << pad(v.output, 14) << (v.pass ? "pass" : "FAIL") << "\n";
            continue;
        }
        for (const auto* s : rows) {
            os << pad(first ? v.output : "", 14) << pad(first ? (v.pass ? "pass" : "FAIL") : "", 9)
               << pad(std::string(to_string(s->line)), 6) << pad(fmt(s->min_level_dbuv), 11)
               << pad(fmt(s->max_level_dbuv), 11) << (s->worst_cnr.is_unconstrained() ? "-" : fmt(s->worst_cnr.value()))
               << "\n";
            first = false;
        }
    }
    os << "\n";
    std::vector<const Violation*> all;
    for (const auto& v : report.outputs)
        for (const auto& x : v.violations) all.push_back(&x);
    if (all.empty())
        os << "all outputs within limits\n";
    else {
        os << "Output violations (" << all.size() << "):\n";
        for (const auto* x : all) os << "  " << describe(*x) << "\n";
    }
    if (!report.component_violations.empty()) {
        os << "Component violations (" << report.component_violations.size() << "):\n";
        for (const auto& x : report.component_violations) os << "  " << describe(x) << "\n";
    }
    return os.str();
}

std::string export_sweep(const SweepResult& s, ReportFormat format) {
    if (format == ReportFormat::Machine) return sweep_to_json(s).dump(2) + "\n";
    std::ostringstream os;
    std::string head = "Input level " + std::string(to_string(s.line)) + " [dBuV]";
    os << pad(head, 26) << pad("Outputs within limits", 24) << "Outputs outside limits\n";
    for (const auto& r : s.rows)
        os << pad(fmt(r.level_dbuv, 1), 26) << pad(std::to_string(r.within), 24) << r.outside << "\n";
    os << "\nBest coarse level: " << fmt(s.argmax_level_dbuv, 1) << " dBuV\n";
    os << "Fine sweep optimum: [" << fmt(s.optimum_lo_dbuv, 1) << ", " << fmt(s.optimum_hi_dbuv, 1) << "] dBuV\n";
    return os.str();
}

std::string export_optimize(const OptimizeResult& r, ReportFormat format) {
    if (format == ReportFormat::Machine) return optimize_to_json(r).dump(2) + "\n";
    std::ostringstream os;
    os << "Method:               " << to_string(r.method) << "\n";
    os << "Evaluations:          " << r.evaluations << "\n";
    os << "Outputs within (start): " << r.start_count << " / " << r.total << "\n";
    os << "Outputs within (best):  " << r.best_count << " / " << r.total << "\n";
    os << "Best regulator positions:\n";
    for (const auto& [key, idx] : r.best.regulators) os << "  " << pad(key.first + "/" + key.second, 24) << idx << "\n";
    return os.str();
}

}  // namespace smatv
