#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "smatv/catalog.hpp"
#include "smatv/errors.hpp"

using namespace smatv;

namespace {

std::vector<const ComponentSpec*> family(const std::string& prefix) {
    std::vector<const ComponentSpec*> out;
    for (const auto& [id, c] : builtin_catalog().components())
        if (id.rfind(prefix, 0) == 0) out.push_back(&c);
    return out;
}

}  // namespace

TEST_CASE("built-in catalog is well formed") {
    const auto& cat = builtin_catalog();
    for (const auto& [id, c] : cat.components()) {
        INFO(id);
        CHECK(check_component_spec(c).empty());
    }
    CHECK(cat.find_cable("trunk"));
    CHECK(cat.find_cable("drop"));
}

TEST_CASE("MV5xx multiswitches") {
    auto mv = family("MV5");
    REQUIRE(!mv.empty());
    bool cascadable = false, terminal = false;
    for (const auto* c : mv) {
        INFO(c->id);
        cascadable = cascadable || c->cls == ComponentClass::MultiswitchCascadable;
        terminal = terminal || c->cls == ComponentClass::MultiswitchTerminal;
        for (auto l : kSatLines) {
            const auto* r = c->regulator("sat_" + std::string(to_string(l)));
            REQUIRE(r);
            CHECK(r->regulator.size() == 4);
        }
        REQUIRE(c->regulator("terr"));
        CHECK(c->regulator("terr")->regulator.size() == 16);
        int trunk_in = 0;
        for (const auto& p : c->ports)
            if (p.role == PortRole::Trunk && p.direction == PortDirection::In) ++trunk_in;
        CHECK(trunk_in == 5);
    }
    CHECK(cascadable);
    CHECK(terminal);
}

TEST_CASE("MR512 radial multiswitch: 12 subscribers, 16 terrestrial positions") {
    const auto& c = builtin_catalog().component("MR512");
    CHECK(c.cls == ComponentClass::MultiswitchRadial);
    int subs = 0;
    for (const auto& p : c.ports)
        if (p.role == PortRole::Subscriber) ++subs;
    CHECK(subs == 12);
    CHECK(c.regulator("terr")->regulator.size() == 16);
    CHECK_THROWS_AS(instantiate(builtin_catalog(), "MR512", {{"terr", 16}}), RegulatorIndexOutOfRange);
    CHECK_NOTHROW(instantiate(builtin_catalog(), "MR512", {{"terr", 15}}));
}

TEST_CASE("SD5xx tap losses lie within 4..15 dB") {
    auto sd = family("SD5");
    REQUIRE(sd.size() >= 4);
    double lo = 1e9, hi = -1e9;
    for (const auto* c : sd) {
        for (const auto& t : c->transfers) {
            const auto* to = c->port(t.to_port);
            if (c->cls == ComponentClass::Tap && to->role != PortRole::Subscriber) continue;
            for (const auto& cv : t.curves)
                for (const auto& a : cv.anchors) {
                    lo = std::min(lo, -a.gain_db);
                    hi = std::max(hi, -a.gain_db);
                }
        }
    }
    CHECK(lo >= 4.0);
    CHECK(hi <= 15.0);
    CHECK(lo == 4.0);
    CHECK(hi == 15.0);
}

TEST_CASE("built-in tap isolation is at least 20 dB") {
    for (const auto& [id, c] : builtin_catalog().components()) {
        if (c.cls != ComponentClass::Tap && !is_multiswitch(c.cls)) continue;
        INFO(id);
        REQUIRE(c.tap_isolation_db);
        CHECK(*c.tap_isolation_db >= 20.0);
    }
}

TEST_CASE("generic amplifier and attenuator") {
    int amps = 0;
    for (const auto& [id, c] : builtin_catalog().components())
        if (c.cls == ComponentClass::Amplifier) ++amps;
    CHECK(amps >= 1);
    const auto& att = builtin_catalog().component("ATT20");
    const auto& pos = att.regulator("att")->regulator.positions();
    REQUIRE(pos.size() == 21);
    CHECK(pos.front() == -20.0);
    CHECK(pos.back() == 0.0);
    for (std::size_t i = 1; i < pos.size(); ++i) CHECK(pos[i] - pos[i - 1] == 1.0);
}

TEST_CASE("cable attenuation") {
    const auto& drop = *builtin_catalog().find_cable("drop");
    CHECK(cable_attenuation(drop, Frequency(800), 100).value == doctest::Approx(-17.0).epsilon(1e-12));
    CHECK(cable_attenuation(drop, Frequency(200), 100).value == doctest::Approx(-8.5).epsilon(1e-12));
    CHECK(cable_attenuation(drop, Frequency(470), 0).value == 0.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> len(0, 200), f(47, 862);
    for (int i = 0; i < 200; ++i) {
        double l = len(rng), mhz = f(rng);
        double one = cable_attenuation(drop, Frequency(mhz), l).value;
        double two = cable_attenuation(drop, Frequency(mhz), 2 * l).value;
        CHECK(std::abs(two - 2 * one) <= 1e-12);
        CHECK(one <= 0.0);
    }
    CHECK_THROWS_AS(cable_attenuation(drop, Frequency(900), 10), FrequencyOutOfRange);
    CHECK_THROWS_AS(cable_attenuation(drop, Frequency(2500), 10), FrequencyOutOfRange);
}

TEST_CASE("cable fit is least squares through three anchors") {
    // Anchors exactly on a + b*sqrt(f) are reproduced.
    auto model = [](double f) { return 1.0 + 0.5 * std::sqrt(f); };
    CableSpec c("x", {{100, model(100)}, {400, model(400)}, {900, model(900)}});
    CHECK(c.a() == doctest::Approx(1.0));
    CHECK(c.b() == doctest::Approx(0.5));
    CHECK_THROWS(CableSpec("bad", {}));
    CHECK_THROWS(CableSpec("falling", {{100, 10}, {900, 5}}));
}

TEST_CASE("regulator offsets are uniform over frequency") {
    const auto& cat = builtin_catalog();
    auto a = instantiate(cat, "MV508", {{"sat_VL", 0}});
    auto b = instantiate(cat, "MV508", {{"sat_VL", 3}});
    const auto& spec = cat.component("MV508");
    const TransferEntry* t = nullptr;
    for (const auto& x : spec.transfers)
        if (x.from_port == "in_VL" && x.to_port == "sub1") t = &x;
    REQUIRE(t);
    const auto& pos = spec.regulator("sat_VL")->regulator.positions();
    for (double f = 950; f <= 2150; f += 25) {
        double d = b.transfer_gain(*t, SignalLine::VL, Frequency(f)).value -
                   a.transfer_gain(*t, SignalLine::VL, Frequency(f)).value;
        CHECK(d == doctest::Approx(pos[3] - pos[0]).epsilon(1e-12));
    }
}

TEST_CASE("instantiate errors") {
    CHECK_THROWS_AS(instantiate(builtin_catalog(), "XYZ"), UnknownComponent);
    CHECK_THROWS_AS(instantiate(builtin_catalog(), "MV508", {{"sat_VL", 4}}), RegulatorIndexOutOfRange);
    CHECK_THROWS_AS(instantiate(builtin_catalog(), "MV508", {{"sat_VL", -1}}), RegulatorIndexOutOfRange);
    auto inst = instantiate(builtin_catalog(), "MV508");
    CHECK(inst.index("terr") == 15);
}

TEST_CASE("gain curves interpolate linearly and refuse extrapolation") {
    GainCurve c{LineSet{SignalLine::TERR}, {{47, -2}, {862, -6}}};
    CHECK(c.at(47) == -2.0);
    CHECK(c.at(862) == -6.0);
    CHECK(c.at(454.5) == doctest::Approx(-4.0));
    CHECK_THROWS_AS(c.at(40), FrequencyOutOfRange);
}

TEST_CASE("component spec rules") {
    ComponentSpec c = builtin_catalog().component("MV508T");
    CHECK(check_component_spec(c).empty());
    c.ports.push_back({"out_VL", PortDirection::Out, LineSet{SignalLine::VL}, PortRole::Trunk});
    CHECK_FALSE(check_component_spec(c).empty());

    ComponentSpec casc = builtin_catalog().component("MV508");
    casc.ports.erase(std::remove_if(casc.ports.begin(), casc.ports.end(),
                                    [](const PortSpec& p) { return p.id == "out_HH"; }),
                     casc.ports.end());
    CHECK_FALSE(check_component_spec(casc).empty());

    ComponentSpec gap = builtin_catalog().component("SD5T08");
    gap.transfers[0].curves[0].anchors.pop_back();
    CHECK_FALSE(check_component_spec(gap).empty());

    CHECK_THROWS(GainRegulator({0, -1}, 0));
    CHECK_THROWS_AS(GainRegulator({-1, 0}, 2), RegulatorIndexOutOfRange);
}
