#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "smatv/compliance.hpp"
#include "smatv/netio.hpp"
#include "support.hpp"

using namespace smatv;
using smatv::testing::random_tree;
using smatv::testing::test_catalog;
using smatv::testing::toy_drop;

namespace {

// Source -> rated 2-port -> output; the 2-port passes the source level through.
Network rated_chain(double level, int channels, std::optional<double> rating) {
    auto cat = std::make_shared<Catalog>(*test_catalog());
    ComponentSpec c;
    c.id = "RATED";
    c.cls = ComponentClass::Amplifier;
    c.ports = {{"in", PortDirection::In, LineSet::all(), PortRole::Trunk},
               {"out", PortDirection::Out, LineSet::all(), PortRole::Trunk}};
    c.transfers.push_back({"in", "out",
                           {{LineSet{SignalLine::TERR}, {{47, 0}, {862, 0}}}, {LineSet::sat(), {{950, 0}, {2150, 0}}}},
                           0.0, false, {}});
    c.max_output_power_dbm = rating;
    cat->add(c);
    auto net = toy_drop(0);
    net.catalog = cat;
    auto& src = std::get<SourceNode>(net.nodes[0].body);
    for (auto& l : src.lines) {
        for (auto& a : l.spectrum) a.level_dbuv = level;
        if (l.line == SignalLine::TERR)
            for (int i = 0; i < channels; ++i) l.channels.push_back({474.0 + 8 * i, 8.0, SignalLine::TERR});
    }
    net.edges.clear();
    net.nodes.push_back({"amp", ComponentNode{"RATED", {}}});
    net.edges.push_back({"e1", {"src", "out"}, {"amp", "in"}, "coax", 0.0, LineSet{SignalLine::TERR}});
    net.edges.push_back({"e2", {"amp", "out"}, {"out", "in"}, "coax", 0.0, LineSet{SignalLine::TERR}});
    return net;
}

std::vector<Violation> overload_of(const Network& net) {
    auto sim = propagate(net);
    return check_overload(sim, net, net.constraints);
}

}  // namespace

TEST_CASE("mid-window output with no noise passes") {
    auto net = toy_drop(0);
    for (auto& l : std::get<SourceNode>(net.nodes[0].body).lines)
        for (auto& a : l.spectrum) a.level_dbuv = l.line == SignalLine::TERR ? 68 : 62;
    auto report = check_outputs(propagate(net), net, net.constraints);
    REQUIRE(report.outputs.size() == 1);
    CHECK(report.outputs[0].pass);
    CHECK(report.outputs_within == 1);
    CHECK(report.clean());
}

TEST_CASE("three grid points above max give three LevelHigh violations") {
    auto net = toy_drop(0);
    net.edges[0].lines = LineSet{SignalLine::TERR};
    net.grid.points[SignalLine::TERR] = {47, 100, 200, 300, 400, 500};
    auto& terr = std::get<SourceNode>(net.nodes[0].body).lines[4];
    terr.spectrum = {{47, 70}, {200, 70}, {300, 85}, {862, 85}};
    auto report = check_outputs(propagate(net), net, net.constraints);
    REQUIRE(report.outputs.size() == 1);
    CHECK_FALSE(report.outputs[0].pass);
    REQUIRE(report.outputs[0].violations.size() == 3);
    for (const auto& v : report.outputs[0].violations) CHECK(v.kind == ViolationKind::LevelHigh);
}

TEST_CASE("window bounds are inclusive") {
    for (double level : {57.0, 80.0}) {
        auto net = toy_drop(0);
        net.edges[0].lines = LineSet{SignalLine::TERR};
        for (auto& a : std::get<SourceNode>(net.nodes[0].body).lines[4].spectrum) a.level_dbuv = level;
        auto report = check_outputs(propagate(net), net, net.constraints);
        CHECK(report.outputs[0].pass);
    }
    auto net = toy_drop(0);
    net.edges[0].lines = LineSet{SignalLine::TERR};
    for (auto& a : std::get<SourceNode>(net.nodes[0].body).lines[4].spectrum) a.level_dbuv = 80.0 + 1e-9;
    CHECK_FALSE(check_outputs(propagate(net), net, net.constraints).outputs[0].pass);
}

TEST_CASE("SAT port must pass on all four SAT lines") {
    auto net = toy_drop(0);
    for (auto& l : std::get<SourceNode>(net.nodes[0].body).lines)
        for (auto& a : l.spectrum) a.level_dbuv = l.line == SignalLine::TERR ? 68 : 62;
    std::get<SourceNode>(net.nodes[0].body).lines[2].spectrum[1].level_dbuv = 40;  // HL low at the top
    auto report = check_outputs(propagate(net), net, net.constraints);
    CHECK_FALSE(report.outputs[0].pass);
    for (const auto& lv : report.outputs[0].lines) CHECK(lv.pass == (lv.line != SignalLine::HL));
}

TEST_CASE("C/N floor") {
    auto net = toy_drop(0);
    net.edges[0].lines = LineSet{SignalLine::VL};
    auto& vl = std::get<SourceNode>(net.nodes[0].body).lines[0];
    for (auto& a : vl.spectrum) a.level_dbuv = 60;
    vl.cnr_db = 10.5;
    auto report = check_outputs(propagate(net), net, net.constraints);
    REQUIRE(report.outputs[0].violations.size() == 1);
    CHECK(report.outputs[0].violations[0].kind == ViolationKind::CnrLow);
    vl.cnr_db = 11.0;
    CHECK(check_outputs(propagate(net), net, net.constraints).outputs[0].pass);
}

TEST_CASE("overload follows the per-channel derating") {
    CHECK(overload_limit_dbuv(0, 2) == doctest::Approx(105.74).epsilon(1e-4));
    CHECK(overload_limit_dbuv(0, 30) == doctest::Approx(93.98).epsilon(1e-4));
    CHECK(overload_of(rated_chain(105.0, 2, 0.0)).empty());
    auto v = overload_of(rated_chain(105.0, 30, 0.0));
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ViolationKind::Overload);
    CHECK(v[0].node == "amp");
    CHECK(v[0].limit == doctest::Approx(93.98).epsilon(1e-4));
    CHECK(overload_of(rated_chain(150.0, 30, std::nullopt)).empty());
}

TEST_CASE("isolation minimum") {
    auto doc = build_case_study();
    CHECK(check_isolation(doc.network, builtin_catalog(), doc.network.constraints).empty());

    Catalog cat = *test_catalog();
    ComponentSpec tap = builtin_catalog().component("SD5T08");
    tap.id = "LEAKY";
    tap.tap_isolation_db = 18.0;
    cat.add(tap);
    ComponentSpec mid = builtin_catalog().component("SD5T15");
    mid.tap_isolation_db = 30.0;
    cat.add(mid);
    Network net = toy_drop(0);
    net.nodes.push_back({"t1", ComponentNode{"LEAKY", {}}});
    net.nodes.push_back({"t2", ComponentNode{"SD5T15", {}}});
    auto v = check_isolation(net, cat, net.constraints);
    REQUIRE(v.size() == 1);
    CHECK(v[0].node == "t1");
    CHECK(v[0].kind == ViolationKind::IsolationLow);
    net.constraints.strict_isolation = true;
    CHECK(check_isolation(net, cat, net.constraints).size() == 2);
}

TEST_CASE("counting identity and tightening on random trees") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        auto net = random_tree(rng);
        auto sim = propagate(net);
        auto report = check_all(sim, net, net.constraints);
        CHECK(report.outputs_within + report.outputs_outside == report.total());
        CHECK(report.total() == static_cast<int>(net.outputs().size()));
        CHECK(count_within(sim.summaries, net.constraints) == report.outputs_within);

        DesignConstraints tight = net.constraints;
        tight.terrestrial.window.min_dbuv += 3;
        tight.sat_if.window.max_dbuv -= 2;
        tight.sat_if.cnr_min_db += 1;
        auto tighter = check_outputs(sim, net, tight);
        for (std::size_t i = 0; i < report.outputs.size(); ++i)
            if (!report.outputs[i].pass) CHECK_FALSE(tighter.outputs[i].pass);
        CHECK(check_outputs(sim, net, net.constraints).outputs.size() == report.outputs.size());
    }
}
