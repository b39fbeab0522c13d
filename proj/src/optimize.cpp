#include "smatv/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "smatv/errors.hpp"

namespace smatv {

namespace {

const Node& serving_source(const Network& net, SignalLine line) {
    const Node* found = nullptr;
    for (const auto& n : net.nodes) {
        const auto* s = n.source();
        if (!s || !s->find(line)) continue;
        if (found)
            throw AmbiguousSource("line " + std::string(to_string(line)) + " is fed by '" + found->id + "' and '" +
                                  n.id + "'");
        found = &n;
    }
    if (!found) throw NotReachable("no source emits " + std::string(to_string(line)));
    return *found;
}

}  // namespace

Network with_flat_source(const Network& net, SignalLine line, double level_dbuv) {
    const Node& src = serving_source(net, line);
    Network out = net;
    for (auto& n : out.nodes) {
        if (n.id != src.id) continue;
        auto& s = std::get<SourceNode>(n.body);
        for (auto& l : s.lines) {
            if (l.line != line) continue;
            auto r = band_range(band_of(line));
            l.spectrum = {{r.lo_mhz, level_dbuv}, {r.hi_mhz, level_dbuv}};
            l.power_dbm.reset();
        }
    }
    return out;
}

SweepResult sweep_input_level(const Network& net, SignalLine line, std::span<const double> levels,
                              const Scenario& base) {
    if (levels.empty()) throw std::invalid_argument("sweep needs at least one level");
    const Node& src = serving_source(net, line);

    // Flat 0 dBuV source; each swept level enters as the source trim, so one
    // compiled plan serves every row.
    Evaluator ev(with_flat_source(net, line, 0.0));
    Scenario scenario = base;
    std::pair<std::string, SignalLine> key{src.id, line};
    auto indices = ev.resolve(scenario);
    int total = static_cast<int>(ev.output_count());

    auto count_at = [&](double level) {
        scenario.source_trims_db[key] = level;
        auto summaries = ev.summarize(indices, scenario);
        int within = count_within(summaries, net.constraints);
        return SweepRow{level, within, total - within};
    };

    SweepResult result;
    result.source = src.id;
    result.line = line;
    result.total = total;

    std::vector<double> sorted(levels.begin(), levels.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (double level : sorted) result.rows.push_back(count_at(level));

    auto best = std::max_element(result.rows.begin(), result.rows.end(),
                                 [](const SweepRow& a, const SweepRow& b) { return a.within < b.within; });
    result.argmax_level_dbuv = best->level_dbuv;

    double spacing = 5.0;
    if (sorted.size() > 1) {
        spacing = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < sorted.size(); ++i) spacing = std::min(spacing, sorted[i] - sorted[i - 1]);
    }
    int steps = static_cast<int>(std::floor(spacing + 1e-9));
    for (int d = -steps; d <= steps; ++d) result.fine_rows.push_back(count_at(result.argmax_level_dbuv + d));

    int fine_max = 0;
    for (const auto& r : result.fine_rows) fine_max = std::max(fine_max, r.within);
    bool first = true;
    for (const auto& r : result.fine_rows) {
        if (r.within != fine_max) continue;
        if (first) result.optimum_lo_dbuv = r.level_dbuv;
        result.optimum_hi_dbuv = r.level_dbuv;
        first = false;
    }
    return result;
}

std::string_view to_string(SearchMethod m) {
    return m == SearchMethod::Exhaustive ? "exhaustive" : "coordinate-descent";
}

namespace {

class Search {
public:
    Search(const Evaluator& ev, const DesignConstraints& constraints, const Scenario& trims, std::size_t budget,
           std::vector<int> start)
        : ev_(ev), constraints_(constraints), trims_(trims), budget_(budget), start_(std::move(start)) {}

    // Evaluates (or recalls) a scenario; nullopt once the budget is spent.
    std::optional<int> eval(const std::vector<int>& idx) {
        if (auto it = cache_.find(idx); it != cache_.end()) return it->second;
        if (evaluations_ >= budget_) return std::nullopt;
        int count = count_within(ev_.summarize(idx, trims_), constraints_);
        ++evaluations_;
        cache_.emplace(idx, count);
        bool improve = !have_best_ || count > best_count_ ||
                       (count == best_count_ && best_ != start_ && idx < best_);
        if (improve) {
            best_ = idx;
            best_count_ = count;
            have_best_ = true;
        }
        max_seen_ = std::max(max_seen_, count);
        trace_.push_back({evaluations_, count, max_seen_});
        return count;
    }

    // Cyclic coordinate descent from `cur` to a fixed point. Returns false if
    // the budget ran out.
    bool descend(std::vector<int> cur) {
        auto cur_count = eval(cur);
        if (!cur_count) return false;
        const auto& knobs = ev_.knobs();
        for (;;) {
            bool changed = false;
            for (std::size_t k = 0; k < knobs.size(); ++k) {
                int best_pos = cur[k];
                int best = *cur_count;
                for (int p = 0; p < static_cast<int>(knobs[k].positions.size()); ++p) {
                    if (p == cur[k]) continue;
                    auto cand = cur;
                    cand[k] = p;
                    auto c = eval(cand);
                    if (!c) return false;
                    if (*c > best) {
                        best = *c;
                        best_pos = p;
                    }
                }
                if (best_pos != cur[k]) {
                    cur[k] = best_pos;
                    cur_count = best;
                    changed = true;
                }
            }
            if (!changed) return true;
        }
    }

    std::size_t evaluations() const { return evaluations_; }
    std::size_t distinct() const { return cache_.size(); }
    int best_count() const { return best_count_; }
    const std::vector<int>& best() const { return best_; }
    std::vector<TraceEntry> take_trace() { return std::move(trace_); }

private:
    const Evaluator& ev_;
    const DesignConstraints& constraints_;
    const Scenario& trims_;
    std::size_t budget_;
    std::vector<int> start_;
    std::map<std::vector<int>, int> cache_;
    std::size_t evaluations_ = 0;
    bool have_best_ = false;
    int best_count_ = 0;
    int max_seen_ = 0;
    std::vector<int> best_;
    std::vector<TraceEntry> trace_;
};

}  // namespace

OptimizeResult optimize_gains(const Network& net, const DesignConstraints& constraints, std::size_t budget,
                              std::uint64_t seed, const Scenario& start) {
    if (budget < 1) throw std::invalid_argument("optimizer budget must be >= 1");
    Evaluator ev(net);
    const auto& knobs = ev.knobs();
    if (knobs.empty()) throw NoRegulators("network has no gain regulators");

    Scenario trims;
    trims.source_trims_db = start.source_trims_db;
    auto start_idx = ev.resolve(start);

    std::size_t space = 1;
    bool small = true;
    for (const auto& k : knobs) {
        std::size_t n = k.positions.size();
        if (space > kExhaustiveLimit / n) {
            small = false;
            break;
        }
        space *= n;
    }
    small = small && space <= budget && space <= kExhaustiveLimit;

    Search search(ev, constraints, trims, budget, start_idx);
    OptimizeResult result;
    result.total = static_cast<int>(ev.output_count());
    result.start_count = *search.eval(start_idx);

    if (small) {
        result.method = SearchMethod::Exhaustive;
        std::vector<int> idx(knobs.size(), 0);
        for (;;) {
            search.eval(idx);
            bool wrapped = true;
            for (std::size_t k = knobs.size(); k-- > 0;) {
                if (++idx[k] < static_cast<int>(knobs[k].positions.size())) {
                    wrapped = false;
                    break;
                }
                idx[k] = 0;
            }
            if (wrapped) break;
        }
    } else {
        result.method = SearchMethod::CoordinateDescent;
        std::mt19937_64 rng(seed);
        bool more = search.descend(start_idx);
        int idle = 0;
        while (more && search.best_count() < result.total && idle < 1000) {
            std::vector<int> r(knobs.size());
            for (std::size_t k = 0; k < knobs.size(); ++k)
                r[k] = static_cast<int>(rng() % knobs[k].positions.size());
            std::size_t before = search.evaluations();
            more = search.descend(r);
            idle = search.evaluations() == before ? idle + 1 : 0;
        }
    }

    result.best_indices = search.best();
    result.best_count = search.best_count();
    result.best = ev.to_scenario(result.best_indices);
    result.best.source_trims_db = start.source_trims_db;
    result.evaluations = search.evaluations();
    result.trace = search.take_trace();
    return result;
}

std::vector<Sensitivity> sensitivity(const Network& net, std::string_view output, SignalLine line,
                                     const Scenario& scenario) {
    auto path = line_path(net, output, line);
    std::vector<Sensitivity> out;
    for (const auto& hop : path) {
        const Node* n = net.find_node(hop.node);
        if (n->source()) {
            Sensitivity s;
            s.node = n->id;
            s.knob = "trim";
            s.source_trim = true;
            s.db_per_db = 1.0;
            out.push_back(std::move(s));
            continue;
        }
        const auto* c = n->component();
        if (!c) continue;
        const auto& spec = net.catalog->component(c->component_id);
        for (const auto& t : spec.transfers) {
            if (t.from_port != hop.in_port || t.to_port != hop.out_port || !t.curve_for(line)) continue;
            for (const auto& rid : t.regulators) {
                const auto* r = spec.regulator(rid);
                if (!r || !r->lines.contains(line)) continue;
                int idx = r->regulator.current_index();
                if (auto it = c->settings.find(rid); it != c->settings.end()) idx = it->second;
                if (auto it = scenario.regulators.find({n->id, rid}); it != scenario.regulators.end()) idx = it->second;
                const auto& pos = r->regulator.positions();
                Sensitivity s;
                s.node = n->id;
                s.knob = rid;
                s.current_index = idx;
                for (std::size_t i = 1; i < pos.size(); ++i) s.step_effects_db.push_back(pos[i] - pos[i - 1]);
                auto ui = static_cast<std::size_t>(idx);
                if (ui + 1 < pos.size()) s.up_db = pos[ui + 1] - pos[ui];
                if (ui > 0) s.down_db = pos[ui - 1] - pos[ui];
                out.push_back(std::move(s));
            }
        }
    }
    return out;
}

}  // namespace smatv
