#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smatv/catalog.hpp"
#include "smatv/model.hpp"
#include "smatv/network.hpp"

namespace smatv {

// dBm -> dBuV across 75 ohm: 20*log10(sqrt(1 mW * 75 ohm) / 1 uV).
inline constexpr double kDbmToDbuv75 = 108.75;

// Per-channel level when a total power is shared by n_channels.
LevelDBuV power_to_level(PowerDBm p, int n_channels);

// Output C/N of a chain of n identical amplifiers running at output level
// u_out with gain k and noise figure f:
//   -10 log10(10^(-cn_in/10) + 10^(-(u_out - k - f - 10 log10 n)/10))
// Amplifier noise is referred to 0 dBuV at the stage input, so a 16 dB feed
// through ten 36 dB / NF 8 stages at 80 dBuV comes out at 15.6 dB.
CNRatioDB cascade_cnr(CNRatioDB cn_in, int n_amps, LevelDBuV u_out, GainDB k, NoiseFigureDB f);

// Power sum of independent noise contributions; unconstrained entries are
// skipped. Throws std::invalid_argument on an empty list.
CNRatioDB combine_cnr(std::span<const CNRatioDB> contributions);

// Flat per-channel source level for `line` derived from a total power.
// Throws EmptyPlan when the plan has no channel on the line.
std::vector<SpectrumAnchor> source_from_power(PowerDBm p, const ChannelPlan& plan, SignalLine line);

// Regulator positions and source trims overriding the stored network state.
struct Scenario {
    // (component node id, regulator id) -> position index
    std::map<std::pair<std::string, std::string>, int> regulators;
    // (source node id, line) -> dB offset added to the source spectrum
    std::map<std::pair<std::string, SignalLine>, double> source_trims_db;

    bool empty() const { return regulators.empty() && source_trims_db.empty(); }
    bool operator==(const Scenario&) const = default;
};

// Levels (and noise) of one line at one port over the line's grid.
struct LineTrace {
    std::vector<double> frequencies_mhz;
    std::vector<double> levels_dbuv;
    // Accumulated noise-to-carrier power ratio per grid point; 0 = no noise.
    std::vector<double> noise_ratio;

    CNRatioDB cnr_at(std::size_t i) const { return CNRatioDB::from_noise_ratio(noise_ratio[i]); }
    bool operator==(const LineTrace&) const = default;
};

using SpectrumTrace = std::map<PortRef, std::map<SignalLine, LineTrace>>;

struct OutputSummary {
    std::string output;
    SignalLine line = SignalLine::TERR;
    double min_level_dbuv = 0.0;
    double max_level_dbuv = 0.0;
    CNRatioDB worst_cnr = CNRatioDB::unconstrained();
    double worst_cnr_frequency_mhz = 0.0;

    bool operator==(const OutputSummary&) const = default;
};

struct SimulationResult {
    SpectrumTrace traces;
    // Sorted by (output id, line).
    std::vector<OutputSummary> summaries;
    Scenario scenario;

    const LineTrace* trace(const PortRef& port, SignalLine line) const;
    const LineTrace* output_trace(std::string_view output, SignalLine line) const;
    std::vector<const OutputSummary*> summaries_for(std::string_view output) const;
};

// Compiled, immutable evaluation plan for one network. Construction resolves
// the catalog, interpolates every curve and cable onto the grid and orders
// the work topologically; evaluation is then plain dB additions, so the
// optimizer can evaluate many scenarios against one plan.
class Evaluator {
public:
    // Throws InvalidNetwork when validation reports errors, MissingSource
    // when an emitted line has neither spectrum nor power.
    explicit Evaluator(const Network& net);
    ~Evaluator();
    Evaluator(Evaluator&&) noexcept;
    Evaluator& operator=(Evaluator&&) noexcept;

    struct RegulatorKnob {
        std::string node;
        std::string regulator;
        std::vector<double> positions;
        int stored_index;
    };
    // Every (component, regulator) pair, ordered by node id then regulator id.
    const std::vector<RegulatorKnob>& knobs() const;

    // Index vector (one per knob) after applying the scenario to the stored
    // positions. Throws RegulatorIndexOutOfRange for bad overrides.
    std::vector<int> resolve(const Scenario& scenario) const;
    Scenario to_scenario(std::span<const int> indices) const;

    SimulationResult run(const Scenario& scenario) const;
    // Output summaries only, for the given knob indices; trims from `base`.
    std::vector<OutputSummary> summarize(std::span<const int> indices, const Scenario& base = {}) const;

    std::size_t output_count() const;

private:
    struct Plan;
    std::unique_ptr<Plan> plan_;
};

// Validates, compiles and runs in one step.
SimulationResult propagate(const Network& net, const Scenario& scenario = {});

}  // namespace smatv
