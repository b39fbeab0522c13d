#include "smatv/catalog.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "smatv/errors.hpp"

namespace smatv {

namespace {

constexpr std::array<std::pair<ComponentClass, std::string_view>, 8> kClassNames{{
    {ComponentClass::MultiswitchCascadable, "multiswitch_cascadable"},
    {ComponentClass::MultiswitchTerminal, "multiswitch_terminal"},
    {ComponentClass::MultiswitchRadial, "multiswitch_radial"},
    {ComponentClass::Tap, "tap"},
    {ComponentClass::Splitter, "splitter"},
    {ComponentClass::Amplifier, "amplifier"},
    {ComponentClass::Attenuator, "attenuator"},
    {ComponentClass::HeadendIfIf, "headend_if_if"},
}};

constexpr std::array<std::pair<PortRole, std::string_view>, 4> kRoleNames{{
    {PortRole::Trunk, "trunk"},
    {PortRole::Subscriber, "subscriber"},
    {PortRole::Terrestrial, "terrestrial"},
    {PortRole::SatInput, "sat_input"},
}};

}  // namespace

std::string_view to_string(ComponentClass c) {
    for (auto [k, n] : kClassNames)
        if (k == c) return n;
    return "?";
}

std::optional<ComponentClass> parse_component_class(std::string_view text) {
    for (auto [k, n] : kClassNames)
        if (n == text) return k;
    return std::nullopt;
}

bool is_multiswitch(ComponentClass c) {
    return c == ComponentClass::MultiswitchCascadable || c == ComponentClass::MultiswitchTerminal ||
           c == ComponentClass::MultiswitchRadial;
}

std::string_view to_string(PortDirection d) { return d == PortDirection::In ? "in" : "out"; }

std::string_view to_string(PortRole r) {
    for (auto [k, n] : kRoleNames)
        if (k == r) return n;
    return "?";
}

std::optional<PortDirection> parse_port_direction(std::string_view text) {
    if (text == "in") return PortDirection::In;
    if (text == "out") return PortDirection::Out;
    return std::nullopt;
}

std::optional<PortRole> parse_port_role(std::string_view text) {
    for (auto [k, n] : kRoleNames)
        if (n == text) return k;
    return std::nullopt;
}

double GainCurve::at(double mhz) const {
    if (anchors.empty()) throw std::logic_error("gain curve without anchors");
    if (anchors.size() == 1) {
        if (mhz != anchors.front().frequency_mhz)
            throw FrequencyOutOfRange("frequency outside single-anchor curve");
        return anchors.front().gain_db;
    }
    if (mhz < anchors.front().frequency_mhz || mhz > anchors.back().frequency_mhz)
        throw FrequencyOutOfRange("frequency " + std::to_string(mhz) + " MHz outside curve anchors");
    auto hi = std::lower_bound(anchors.begin(), anchors.end(), mhz,
                               [](const GainAnchor& a, double f) { return a.frequency_mhz < f; });
    if (hi->frequency_mhz == mhz) return hi->gain_db;
    auto lo = hi - 1;
    double t = (mhz - lo->frequency_mhz) / (hi->frequency_mhz - lo->frequency_mhz);
    return lo->gain_db + t * (hi->gain_db - lo->gain_db);
}

const GainCurve* TransferEntry::curve_for(SignalLine line) const {
    for (const auto& c : curves)
        if (c.lines.contains(line)) return &c;
    return nullptr;
}

LineSet TransferEntry::lines() const {
    LineSet s;
    for (const auto& c : curves) s = s.unite(c.lines);
    return s;
}

GainRegulator::GainRegulator(std::vector<double> positions_db, int current_index)
    : positions_(std::move(positions_db)), current_(current_index) {
    if (positions_.empty()) throw std::invalid_argument("gain regulator needs at least one position");
    for (std::size_t i = 1; i < positions_.size(); ++i)
        if (!(positions_[i] > positions_[i - 1]))
            throw std::invalid_argument("gain regulator positions must be strictly increasing");
    if (current_ < 0 || current_ >= size())
        throw RegulatorIndexOutOfRange("regulator index " + std::to_string(current_) + " outside [0, " +
                                       std::to_string(size() - 1) + "]");
}

double GainRegulator::offset(int index) const {
    if (index < 0 || index >= size())
        throw RegulatorIndexOutOfRange("regulator index " + std::to_string(index) + " outside [0, " +
                                       std::to_string(size() - 1) + "]");
    return positions_[static_cast<std::size_t>(index)];
}

const PortSpec* ComponentSpec::port(std::string_view port_id) const {
    for (const auto& p : ports)
        if (p.id == port_id) return &p;
    return nullptr;
}

const RegulatorSpec* ComponentSpec::regulator(std::string_view reg_id) const {
    for (const auto& r : regulators)
        if (r.id == reg_id) return &r;
    return nullptr;
}

CableSpec::CableSpec(std::string id, std::vector<CableAnchor> anchors)
    : id_(std::move(id)), anchors_(std::move(anchors)) {
    if (anchors_.empty()) throw std::invalid_argument("cable " + id_ + ": no attenuation anchors");
    std::sort(anchors_.begin(), anchors_.end(),
              [](const CableAnchor& x, const CableAnchor& y) { return x.frequency_mhz < y.frequency_mhz; });
    for (const auto& a : anchors_)
        if (!(a.frequency_mhz > 0.0) || !std::isfinite(a.db_per_100m))
            throw std::invalid_argument("cable " + id_ + ": invalid anchor");
    if (anchors_.size() == 1) {
        a_ = anchors_.front().db_per_100m;
        b_ = 0.0;
    } else {
        // Least squares on x = sqrt(f).
        double n = static_cast<double>(anchors_.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& a : anchors_) {
            double x = std::sqrt(a.frequency_mhz);
            sx += x;
            sy += a.db_per_100m;
            sxx += x * x;
            sxy += x * a.db_per_100m;
        }
        double den = n * sxx - sx * sx;
        if (den == 0.0) throw std::invalid_argument("cable " + id_ + ": duplicate anchor frequencies");
        b_ = (n * sxy - sx * sy) / den;
        a_ = (sy - b_ * sx) / n;
        if (anchors_.size() == 2) {
            // Exact two-point solve keeps anchor values reproducible to the last bit.
            double x0 = std::sqrt(anchors_[0].frequency_mhz), x1 = std::sqrt(anchors_[1].frequency_mhz);
            b_ = (anchors_[1].db_per_100m - anchors_[0].db_per_100m) / (x1 - x0);
            a_ = anchors_[0].db_per_100m - b_ * x0;
        }
    }
    if (b_ < 0.0) throw std::invalid_argument("cable " + id_ + ": attenuation must not decrease with frequency");
    if (!(db_per_100m(band_range(Band::Terrestrial).lo_mhz) > 0.0))
        throw std::invalid_argument("cable " + id_ + ": attenuation must be strictly positive");
}

GainDB cable_attenuation(const CableSpec& cable, Frequency f, double length_m) {
    if (!band_for_frequency(f.mhz()))
        throw FrequencyOutOfRange("cable attenuation requested at " + std::to_string(f.mhz()) +
                                  " MHz, outside both bands");
    if (length_m < 0.0) throw std::invalid_argument("negative cable length");
    return GainDB{-(length_m / 100.0) * cable.db_per_100m(f.mhz())};
}

void Catalog::add(ComponentSpec spec) {
    std::string id = spec.id;
    if (components_.count(id)) throw std::invalid_argument("duplicate component id " + id);
    components_.emplace(std::move(id), std::move(spec));
}

void Catalog::add(CableSpec cable) {
    std::string id = cable.id();
    if (cables_.count(id)) throw std::invalid_argument("duplicate cable id " + id);
    cables_.emplace(std::move(id), std::move(cable));
}

const ComponentSpec* Catalog::find_component(std::string_view id) const {
    auto it = components_.find(id);
    return it == components_.end() ? nullptr : &it->second;
}

const CableSpec* Catalog::find_cable(std::string_view id) const {
    auto it = cables_.find(id);
    return it == cables_.end() ? nullptr : &it->second;
}

const ComponentSpec& Catalog::component(std::string_view id) const {
    if (const auto* c = find_component(id)) return *c;
    throw UnknownComponent("unknown component '" + std::string(id) + "'");
}

std::vector<std::string> check_component_spec(const ComponentSpec& spec) {
    std::vector<std::string> problems;
    auto fail = [&](std::string msg) { problems.push_back(spec.id + ": " + std::move(msg)); };

    std::set<std::string> ids;
    for (const auto& p : spec.ports)
        if (!ids.insert(p.id).second) fail("duplicate port id '" + p.id + "'");

    std::set<std::string> reg_ids;
    for (const auto& r : spec.regulators)
        if (!reg_ids.insert(r.id).second) fail("duplicate regulator id '" + r.id + "'");

    int trunk_in = 0, trunk_out = 0, subscriber = 0;
    for (const auto& p : spec.ports) {
        if (p.role == PortRole::Trunk) (p.direction == PortDirection::In ? trunk_in : trunk_out)++;
        if (p.role == PortRole::Subscriber && p.direction == PortDirection::Out) ++subscriber;
    }
    switch (spec.cls) {
        case ComponentClass::MultiswitchTerminal:
            if (trunk_out > 0) fail("terminal multiswitch must not have trunk outputs");
            break;
        case ComponentClass::MultiswitchCascadable:
            if (trunk_in == 0 || trunk_in != trunk_out)
                fail("cascadable multiswitch needs matching trunk inputs and outputs");
            break;
        case ComponentClass::MultiswitchRadial:
            if (subscriber > 16) fail("radial multiswitch serves at most 16 subscriber ports");
            break;
        default:
            break;
    }

    for (const auto& t : spec.transfers) {
        const auto* from = spec.port(t.from_port);
        const auto* to = spec.port(t.to_port);
        if (!from || from->direction != PortDirection::In) {
            fail("transfer source '" + t.from_port + "' is not an input port");
            continue;
        }
        if (!to || to->direction != PortDirection::Out) {
            fail("transfer target '" + t.to_port + "' is not an output port");
            continue;
        }
        if (t.noise_figure_db < 0.0) fail("negative noise figure on " + t.from_port + "->" + t.to_port);
        LineSet seen;
        for (const auto& c : t.curves) {
            if (!c.lines.disjoint(seen)) fail("overlapping curves on " + t.from_port + "->" + t.to_port);
            seen = seen.unite(c.lines);
            if (!c.lines.subset_of(from->lines.intersect(to->lines)))
                fail("curve lines not carried by both ports on " + t.from_port + "->" + t.to_port);
            if (c.anchors.empty()) {
                fail("curve without anchors on " + t.from_port + "->" + t.to_port);
                continue;
            }
            for (std::size_t i = 0; i < c.anchors.size(); ++i) {
                if (!std::isfinite(c.anchors[i].gain_db)) fail("non-finite gain on " + t.from_port + "->" + t.to_port);
                if (i > 0 && !(c.anchors[i].frequency_mhz > c.anchors[i - 1].frequency_mhz))
                    fail("curve anchors not strictly increasing on " + t.from_port + "->" + t.to_port);
            }
            for (auto l : c.lines.lines()) {
                auto r = band_range(band_of(l));
                if (c.anchors.front().frequency_mhz > r.lo_mhz || c.anchors.back().frequency_mhz < r.hi_mhz)
                    fail("curve for " + std::string(to_string(l)) + " does not span its band on " + t.from_port +
                         "->" + t.to_port);
            }
        }
        for (const auto& r : t.regulators)
            if (!spec.regulator(r)) fail("transfer references unknown regulator '" + r + "'");
    }

    if (spec.tap_isolation_db && *spec.tap_isolation_db < 0.0) fail("negative tap isolation");
    return problems;
}

ComponentInstance::ComponentInstance(const ComponentSpec& spec, std::map<std::string, int> indices)
    : spec_(&spec), indices_(std::move(indices)) {
    for (const auto& r : spec.regulators) {
        auto it = indices_.find(r.id);
        if (it == indices_.end())
            indices_.emplace(r.id, r.regulator.current_index());
        else
            (void)r.regulator.offset(it->second);  // range check
    }
    for (const auto& [id, _] : indices_)
        if (!spec.regulator(id))
            throw RegulatorIndexOutOfRange("component " + spec.id + " has no regulator '" + id + "'");
}

int ComponentInstance::index(std::string_view regulator_id) const {
    auto it = indices_.find(std::string(regulator_id));
    if (it == indices_.end()) throw std::out_of_range("no regulator " + std::string(regulator_id));
    return it->second;
}

double ComponentInstance::regulator_offset(const TransferEntry& transfer, SignalLine line) const {
    double off = 0.0;
    for (const auto& id : transfer.regulators) {
        const auto* r = spec_->regulator(id);
        if (r && r->lines.contains(line)) off += r->regulator.offset(indices_.at(id));
    }
    return off;
}

GainDB ComponentInstance::transfer_gain(const TransferEntry& transfer, SignalLine line, Frequency f) const {
    const auto* curve = transfer.curve_for(line);
    if (!curve)
        throw NotReachable("transfer " + transfer.from_port + "->" + transfer.to_port + " does not carry " +
                           std::string(to_string(line)));
    return GainDB{curve->at(f.mhz()) + regulator_offset(transfer, line)};
}

ComponentInstance instantiate(const Catalog& catalog, std::string_view component_id,
                              const std::map<std::string, int>& indices) {
    return ComponentInstance(catalog.component(component_id), indices);
}

}  // namespace smatv
