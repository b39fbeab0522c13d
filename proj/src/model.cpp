#include "smatv/model.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "smatv/errors.hpp"

namespace smatv {

std::optional<Band> band_for_frequency(double mhz) {
    if (band_range(Band::Terrestrial).contains(mhz)) return Band::Terrestrial;
    if (band_range(Band::SatIF).contains(mhz)) return Band::SatIF;
    return std::nullopt;
}

std::string_view to_string(Band b) {
    return b == Band::Terrestrial ? "terrestrial" : "sat_if";
}

std::string_view to_string(SignalLine line) {
    switch (line) {
        case SignalLine::VL: return "VL";
        case SignalLine::VH: return "VH";
        case SignalLine::HL: return "HL";
        case SignalLine::HH: return "HH";
        case SignalLine::TERR: return "TERR";
    }
    return "?";
}

std::optional<SignalLine> parse_signal_line(std::string_view text) {
    for (auto l : kAllLines)
        if (to_string(l) == text) return l;
    return std::nullopt;
}

int LineSet::size() const { return std::popcount(mask_); }

std::vector<SignalLine> LineSet::lines() const {
    std::vector<SignalLine> out;
    for (auto l : kAllLines)
        if (contains(l)) out.push_back(l);
    return out;
}

Frequency::Frequency(double mhz) : mhz_(mhz) {
    if (!(mhz > 0.0 && mhz <= 3000.0))
        throw FrequencyOutOfRange("frequency " + std::to_string(mhz) + " MHz outside (0, 3000]");
}

CNRatioDB::CNRatioDB(double db) : db_(db) {
    if (!std::isfinite(db)) throw std::invalid_argument("C/N must be finite; use unconstrained()");
}

double CNRatioDB::value() const {
    if (!db_) throw std::logic_error("C/N is unconstrained");
    return *db_;
}

double CNRatioDB::noise_ratio() const {
    return db_ ? std::pow(10.0, -*db_ / 10.0) : 0.0;
}

CNRatioDB CNRatioDB::from_noise_ratio(double ratio) {
    if (ratio <= 0.0) return unconstrained();
    return CNRatioDB(-10.0 * std::log10(ratio));
}

ChannelPlan::ChannelPlan(std::vector<Channel> channels) : channels_(std::move(channels)) {}

int ChannelPlan::count(SignalLine line) const {
    int n = 0;
    for (const auto& c : channels_)
        if (c.line == line) ++n;
    return n;
}

FrequencyGrid FrequencyGrid::standard() {
    FrequencyGrid g;
    auto fill = [](double lo, double hi, double step) {
        std::vector<double> v;
        for (int i = 0;; ++i) {
            double f = lo + step * i;
            if (f > hi + 1e-9) break;
            v.push_back(f);
        }
        if (v.back() < hi) v.push_back(hi);
        return v;
    };
    g.points[SignalLine::TERR] = fill(47.0, 862.0, 8.0);
    auto sat = fill(950.0, 2150.0, 25.0);
    for (auto l : kSatLines) g.points[l] = sat;
    return g;
}

const std::vector<double>& FrequencyGrid::at(SignalLine line) const {
    auto it = points.find(line);
    if (it == points.end())
        throw std::out_of_range("no grid for line " + std::string(to_string(line)));
    return it->second;
}

}  // namespace smatv
