#pragma once

// Signal lines, bands, frequencies and decibel quantities shared by every
// module.

#include <array>
#include <cstdint>
#include <optional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace smatv {

enum class Band { Terrestrial, SatIF };

struct BandRange {
    double lo_mhz;
    double hi_mhz;

    bool contains(double mhz) const { return mhz >= lo_mhz && mhz <= hi_mhz; }
};

constexpr BandRange band_range(Band b) {
    return b == Band::Terrestrial ? BandRange{47.0, 862.0} : BandRange{950.0, 2150.0};
}

std::optional<Band> band_for_frequency(double mhz);
std::string_view to_string(Band b);

// The "4 SAT + 1 terrestrial" trunk bundle. VL/VH/HL/HH are the SAT IF
// polarity x sub-band lines; TERR is the terrestrial line.
enum class SignalLine : std::uint8_t { VL = 0, VH = 1, HL = 2, HH = 3, TERR = 4 };

inline constexpr std::array<SignalLine, 5> kAllLines{SignalLine::VL, SignalLine::VH, SignalLine::HL,
                                                     SignalLine::HH, SignalLine::TERR};
inline constexpr std::array<SignalLine, 4> kSatLines{SignalLine::VL, SignalLine::VH, SignalLine::HL,
                                                     SignalLine::HH};

constexpr Band band_of(SignalLine line) {
    return line == SignalLine::TERR ? Band::Terrestrial : Band::SatIF;
}

std::string_view to_string(SignalLine line);
std::optional<SignalLine> parse_signal_line(std::string_view text);

// Small value-type set of signal lines.
class LineSet {
public:
    constexpr LineSet() = default;
    constexpr LineSet(std::initializer_list<SignalLine> lines) {
        for (auto l : lines) insert(l);
    }

    static constexpr LineSet all() { return LineSet{SignalLine::VL, SignalLine::VH, SignalLine::HL, SignalLine::HH, SignalLine::TERR}; }
    static constexpr LineSet sat() { return LineSet{SignalLine::VL, SignalLine::VH, SignalLine::HL, SignalLine::HH}; }

    constexpr void insert(SignalLine l) { mask_ |= bit(l); }
    constexpr void erase(SignalLine l) { mask_ &= static_cast<std::uint8_t>(~bit(l)); }
    constexpr bool contains(SignalLine l) const { return (mask_ & bit(l)) != 0; }
    constexpr bool empty() const { return mask_ == 0; }
    constexpr bool subset_of(LineSet other) const { return (mask_ & ~other.mask_) == 0; }
    constexpr LineSet intersect(LineSet other) const { return from_mask(mask_ & other.mask_); }
    constexpr LineSet unite(LineSet other) const { return from_mask(mask_ | other.mask_); }
    constexpr bool disjoint(LineSet other) const { return (mask_ & other.mask_) == 0; }
    constexpr std::uint8_t mask() const { return mask_; }

    int size() const;
    std::vector<SignalLine> lines() const;

    constexpr bool operator==(const LineSet&) const = default;

private:
    static constexpr std::uint8_t bit(SignalLine l) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(l)); }
    static constexpr LineSet from_mask(unsigned m) {
        LineSet s;
        s.mask_ = static_cast<std::uint8_t>(m);
        return s;
    }
    std::uint8_t mask_ = 0;
};

// Strictly positive frequency in MHz, at most 3000.
class Frequency {
public:
    explicit Frequency(double mhz);
    double mhz() const { return mhz_; }
    auto operator<=>(const Frequency&) const = default;

private:
    double mhz_;
};

struct LevelDBuV {
    double value;
    auto operator<=>(const LevelDBuV&) const = default;
};

struct GainDB {
    double value;
    auto operator<=>(const GainDB&) const = default;
};

struct PowerDBm {
    double value;
    auto operator<=>(const PowerDBm&) const = default;
};

struct NoiseFigureDB {
    double value;
};

// Carrier-to-noise ratio; an ideal source has no noise and is
// "unconstrained" rather than carrying an infinite sentinel.
class CNRatioDB {
public:
    explicit CNRatioDB(double db);
    static CNRatioDB unconstrained() { return CNRatioDB(); }

    bool is_unconstrained() const { return !db_.has_value(); }
    double value() const;
    std::optional<double> get() const { return db_; }

    // Noise-to-carrier power ratio; 0 when unconstrained.
    double noise_ratio() const;
    static CNRatioDB from_noise_ratio(double ratio);

    bool operator==(const CNRatioDB&) const = default;

private:
    CNRatioDB() = default;
    std::optional<double> db_;
};

struct Channel {
    double center_mhz;
    double bandwidth_mhz;
    SignalLine line;

    bool operator==(const Channel&) const = default;
};

// Channels carried per signal line; N(line) drives the per-channel level
// derating.
class ChannelPlan {
public:
    ChannelPlan() = default;
    explicit ChannelPlan(std::vector<Channel> channels);

    const std::vector<Channel>& channels() const { return channels_; }
    int count(SignalLine line) const;

    // Transponder sub-selection: keeps only the channels accepted by `keep`.
    template <class Pred>
    ChannelPlan select(Pred keep) const {
        std::vector<Channel> out;
        for (const auto& c : channels_)
            if (keep(c)) out.push_back(c);
        return ChannelPlan(std::move(out));
    }

    bool operator==(const ChannelPlan&) const = default;

private:
    std::vector<Channel> channels_;
};

// Sampling lattice per signal line, MHz, strictly increasing.
struct FrequencyGrid {
    std::map<SignalLine, std::vector<double>> points;

    // 8 MHz steps over 47..862 for TERR, 25 MHz steps over 950..2150 for SAT.
    static FrequencyGrid standard();
    const std::vector<double>& at(SignalLine line) const;

    bool operator==(const FrequencyGrid&) const = default;
};

}  // namespace smatv
