#include <algorithm>
#include <string>

#include "embedded_data.hpp"
#include "smatv/netio.hpp"

namespace smatv {

namespace {

using nlohmann::json;

constexpr int kFloors = 5;
constexpr int kApartments = 4;

Edge link(std::string id, PortRef from, PortRef to, std::string cable, double length, LineSet lines) {
    return {std::move(id), std::move(from), std::move(to), std::move(cable), length, lines};
}

Node output(std::string id, OutputKind kind, int floor, int apt) { return {std::move(id), OutputNode{kind, floor, apt}}; }

}  // namespace

NetworkDocument build_case_study() { return build_case_study(json::parse(embedded::case_study_tuning())); }

NetworkDocument build_case_study(const json& t) {
    NetworkDocument doc;
    Network& net = doc.network;
    net.catalog = builtin_catalog_ptr();
    net.catalog_ref = "builtin";

    const auto& sat = t.at("sat_source");
    for (auto line : kSatLines) {
        std::string name(to_string(line));
        SourceLine sl;
        sl.line = line;
        sl.spectrum = {{950.0, sat.at("level_dbuv_950").get<double>()}, {2150.0, sat.at("level_dbuv_2150").get<double>()}};
        sl.cnr_db = sat.at("cnr_db").get<double>();
        net.nodes.push_back({"lnb_" + name, SourceNode{{sl}}});
    }
    const auto& terr = t.at("terrestrial_source");
    SourceLine tl;
    tl.line = SignalLine::TERR;
    tl.spectrum = {{47.0, terr.at("level_dbuv").get<double>()}, {862.0, terr.at("level_dbuv").get<double>()}};
    const auto& ch = terr.at("channels");
    for (int k = 0; k < ch.at("count").get<int>(); ++k)
        tl.channels.push_back({ch.at("first_center_mhz").get<double>() + k * ch.at("spacing_mhz").get<double>(),
                               ch.at("bandwidth_mhz").get<double>(), SignalLine::TERR});
    net.nodes.push_back({"terr_ant", SourceNode{{tl}}});

    const std::string trunk = t.at("trunk_cable").get<std::string>();
    const std::string drop = t.at("drop_cable").get<std::string>();
    const auto& floors = t.at("floors");
    LineSet sub_lines = LineSet::all();
    LineSet terr_only;
    terr_only.insert(SignalLine::TERR);

    for (int f = 1; f <= kFloors; ++f) {
        const auto& fl = floors.at(f - 1);
        std::string fs = "f" + std::to_string(f);
        std::string ms = "ms" + std::to_string(f);
        ComponentNode mc{fl.at("multiswitch").get<std::string>(), {}};
        for (auto it = fl.at("settings").begin(); it != fl.at("settings").end(); ++it)
            mc.settings[it.key()] = it.value().get<int>();
        net.nodes.push_back({ms, mc});

        for (auto line : kAllLines) {
            std::string name(to_string(line));
            LineSet one;
            one.insert(line);
            if (f == 1) {
                std::string src = line == SignalLine::TERR ? "terr_ant" : "lnb_" + name;
                net.edges.push_back(link("head_" + name, {src, std::string(kSourcePort)}, {ms, "in_" + name}, trunk,
                                         t.at("head_length_m").get<double>(), one));
            } else {
                net.edges.push_back(link("riser" + std::to_string(f) + "_" + name,
                                         {"ms" + std::to_string(f - 1), "out_" + name}, {ms, "in_" + name}, trunk,
                                         t.at("riser_length_m").get<double>(), one));
            }
        }

        const auto& sat_drops = fl.at("sat_drops_m");
        for (int a = 1; a <= kApartments; ++a) {
            for (int s = 1; s <= 2; ++s) {
                std::string out = fs + "a" + std::to_string(a) + "_sat" + std::to_string(s);
                int sub = 2 * (a - 1) + s;
                net.nodes.push_back(output(out, OutputKind::SatReceiverPort, f, a));
                net.edges.push_back(link("drop_" + out, {ms, "sub" + std::to_string(sub)}, {out, std::string(kOutputPort)},
                                         drop, sat_drops.at(sub - 1).get<double>(), sub_lines));
            }
        }

        // TV sockets hang off a tap chain fed from the terrestrial output.
        const auto& taps = fl.at("taps");
        const auto& tv_drops = fl.at("tv_drops_m");
        PortRef prev{ms, "tv"};
        for (int a = 1; a <= kApartments; ++a) {
            std::string tap = fs + "_tap" + std::to_string(a);
            net.nodes.push_back({tap, ComponentNode{taps.at(a - 1).get<std::string>(), {}}});
            double len = a == 1 ? fl.at("tv_feed_m").get<double>() : fl.at("tap_spacing_m").get<double>();
            net.edges.push_back(link(tap + "_in", prev, {tap, "in"}, drop, len, terr_only));
            std::string out = fs + "a" + std::to_string(a) + "_tv";
            net.nodes.push_back(output(out, OutputKind::TvPort, f, a));
            net.edges.push_back(link("drop_" + out, {tap, "tap"}, {out, std::string(kOutputPort)}, drop,
                                     tv_drops.at(a - 1).get<double>(), terr_only));
            prev = {tap, "out"};
        }
    }

    std::sort(net.nodes.begin(), net.nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    std::sort(net.edges.begin(), net.edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
    auto diags = validate_network(net);
    if (has_errors(diags)) throw ValidationError(std::move(diags));
    return doc;
}

}  // namespace smatv
