#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "smatv/netio.hpp"
#include "support.hpp"

namespace smatv::testing {

namespace {

constexpr double kTol = 1e-9;

TreeOptions small_opts() {
    TreeOptions o;
    o.max_outputs = 12;
    o.coarse_grid = true;
    return o;
}

ComponentSpec flat_stage(const std::string& id, double gain, double nf, bool active) {
    ComponentSpec c;
    c.id = id;
    c.cls = active ? ComponentClass::Amplifier : ComponentClass::Attenuator;
    c.ports = {{"in", PortDirection::In, LineSet::all(), PortRole::Trunk},
               {"out", PortDirection::Out, LineSet::all(), PortRole::Trunk}};
    c.transfers.push_back({"in", "out",
                           {{LineSet{SignalLine::TERR}, {{47, gain}, {862, gain}}},
                            {LineSet::sat(), {{950, gain}, {2150, gain}}}},
                           nf, active, {}});
    return c;
}

// Splits edges[k] at a random point and inserts `stage` as node "zz_ins".
Network insert_stage(const Network& net, std::size_t k, const ComponentSpec& stage, double split) {
    Network out = net;
    auto cat = std::make_shared<Catalog>(*net.catalog);
    cat->add(stage);
    out.catalog = cat;
    Edge head = out.edges[k];
    Edge tail = head;
    head.to = {"zz_ins", "in"};
    head.length_m = net.edges[k].length_m * split;
    tail.id = "zz_tail";
    tail.from = {"zz_ins", "out"};
    tail.length_m = net.edges[k].length_m - head.length_m;
    out.edges[k] = head;
    out.edges.push_back(tail);
    out.nodes.push_back({"zz_ins", ComponentNode{stage.id, {}}});
    return out;
}

std::set<std::string> downstream(const Network& net, const std::string& node) {
    std::set<std::string> seen{node};
    std::vector<std::string> todo{node};
    while (!todo.empty()) {
        auto n = todo.back();
        todo.pop_back();
        for (const auto& e : net.edges)
            if (e.from.node == n && seen.insert(e.to.node).second) todo.push_back(e.to.node);
    }
    return seen;
}

std::string where(int trial, const std::string& what) { return "trial " + std::to_string(trial) + ": " + what; }

}  // namespace

Failures check_pad_linearity(std::uint64_t seed, int trials) {
    Failures f;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        auto net = random_tree(rng, small_opts());
        std::size_t k = std::uniform_int_distribution<std::size_t>(0, net.edges.size() - 1)(rng);
        double x = std::uniform_real_distribution<double>(0.0, 20.0)(rng);
        double split = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        auto padded = insert_stage(net, k, flat_stage("PAD", -x, 0.0, false), split);
        auto below = downstream(net, net.edges[k].to.node);
        // A pad only adds noise through active stages it starves.
        bool active_below = std::any_of(below.begin(), below.end(), [&](const std::string& id) {
            const Node* n = net.find_node(id);
            return n->component() && n->component()->component_id == "AMP";
        });
        auto a = propagate(net), b = propagate(padded);
        for (const Node* o : net.outputs()) {
            double shift = below.count(o->id) ? -x : 0.0;
            for (auto line : kAllLines) {
                const auto* ta = a.output_trace(o->id, line);
                const auto* tb = b.output_trace(o->id, line);
                if (!ta || !tb) {
                    if (ta != tb) f.push_back(where(t, o->id + " lost a line"));
                    continue;
                }
                for (std::size_t i = 0; i < ta->levels_dbuv.size(); ++i) {
                    if (std::abs(tb->levels_dbuv[i] - ta->levels_dbuv[i] - shift) > kTol)
                        f.push_back(where(t, o->id + " level shift"));
                    double dn = tb->noise_ratio[i] - ta->noise_ratio[i];
                    double tol = kTol * std::max(1e-12, ta->noise_ratio[i]);
                    if (active_below ? dn < -tol : std::abs(dn) > tol) f.push_back(where(t, o->id + " noise changed"));
                }
            }
        }
    }
    return f;
}

Failures check_cnr_monotonic(std::uint64_t seed, int trials) {
    Failures f;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        auto net = random_tree(rng, small_opts());
        std::size_t k = std::uniform_int_distribution<std::size_t>(0, net.edges.size() - 1)(rng);
        // Unity or lossy, so later stages never see a higher input level.
        double gain = std::uniform_real_distribution<double>(-10.0, 0.0)(rng);
        double nf = std::uniform_real_distribution<double>(3.0, 10.0)(rng);
        auto noisy = insert_stage(net, k, flat_stage("STAGE", gain, nf, true), 0.5);

        Network cleaner = net;
        auto& src = std::get<SourceNode>(std::find_if(cleaner.nodes.begin(), cleaner.nodes.end(), [](const Node& n) {
                                              return n.id == "src";
                                          })->body);
        for (auto& l : src.lines)
            if (l.cnr_db) *l.cnr_db += 3.0;

        auto a = propagate(net), b = propagate(noisy), c = propagate(cleaner);
        for (std::size_t i = 0; i < a.summaries.size(); ++i) {
            const auto& s = a.summaries[i];
            double base = s.worst_cnr.noise_ratio();
            if (b.summaries[i].worst_cnr.noise_ratio() < base * (1 - kTol))
                f.push_back(where(t, s.output + " improved by an extra stage"));
            if (c.summaries[i].worst_cnr.noise_ratio() > base * (1 + kTol))
                f.push_back(where(t, s.output + " worsened by a cleaner source"));
        }
    }
    return f;
}

Failures check_combine_cnr(std::uint64_t seed, int trials) {
    Failures f;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> db(-10.0, 80.0);
    for (int t = 0; t < trials; ++t) {
        int n = std::uniform_int_distribution<int>(1, 8)(rng);
        std::vector<CNRatioDB> v;
        double worst = 1e300;
        for (int i = 0; i < n; ++i) {
            if (i > 0 && rng() % 5 == 0) {
                v.push_back(CNRatioDB::unconstrained());
                continue;
            }
            v.push_back(CNRatioDB(db(rng)));
            worst = std::min(worst, v.back().value());
        }
        auto total = combine_cnr(v);
        auto shuffled = v;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        auto again = combine_cnr(shuffled);
        if (std::abs(total.value() - again.value()) > kTol) f.push_back(where(t, "order dependent"));
        if (total.value() > worst + kTol) f.push_back(where(t, "better than the worst contribution"));
    }
    return f;
}

Failures check_counting_identity(std::uint64_t seed, int trials) {
    Failures f;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        auto net = random_tree(rng, small_opts());
        auto sim = propagate(net);
        auto r = check_all(sim, net, net.constraints);
        int n = static_cast<int>(net.outputs().size());
        if (r.outputs_within + r.outputs_outside != n) f.push_back(where(t, "within + outside != total"));
        if (count_within(sim.summaries, net.constraints) != r.outputs_within) f.push_back(where(t, "summary count differs"));
        int passing = 0;
        for (const auto& v : r.outputs) passing += v.pass;
        if (passing != r.outputs_within) f.push_back(where(t, "verdicts disagree with the count"));
    }
    return f;
}

Failures check_round_trip(std::uint64_t seed, int trials) {
    Failures f;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        TreeOptions o;
        o.coarse_grid = t % 2 == 0;
        auto net = random_tree(rng, o);
        Scenario s;
        s.source_trims_db[{"src", SignalLine::TERR}] = std::uniform_real_distribution<double>(-5, 5)(rng);
        for (const auto& n : net.nodes)
            if (const auto* c = n.component(); c && (c->component_id == "AMP" || c->component_id == "EQ") && rng() % 2)
                s.regulators[{n.id, c->component_id == "AMP" ? "gain" : "att"}] = static_cast<int>(rng() % 4);
        auto text = serialize_network(net, s);
        auto doc = parse_network(text);
        if (!(doc.network == net)) f.push_back(where(t, "network changed"));
        if (doc.scenario != std::optional<Scenario>(s)) f.push_back(where(t, "scenario changed"));
        if (serialize_network(doc.network, doc.scenario) != text) f.push_back(where(t, "text changed"));
    }
    return f;
}

Failures check_optimizer_determinism(std::uint64_t seed, int trials) {
    Failures f;
    std::mt19937_64 rng(seed);
    int done = 0;
    for (int t = 0; done < trials && t < trials * 20; ++t) {
        auto net = random_tree(rng, small_opts());
        bool knobs = std::any_of(net.nodes.begin(), net.nodes.end(), [](const Node& n) {
            return n.component() && (n.component()->component_id == "AMP" || n.component()->component_id == "EQ");
        });
        if (!knobs) continue;
        ++done;
        std::uint64_t s = rng();
        auto a = optimize_gains(net, net.constraints, 200, s);
        auto b = optimize_gains(net, net.constraints, 200, s);
        if (!(a.best == b.best) || a.best_indices != b.best_indices || a.trace != b.trace ||
            a.evaluations != b.evaluations || a.method != b.method)
            f.push_back(where(t, "runs differ"));
    }
    if (done < trials) f.push_back("too few regulated trees");
    return f;
}

}  // namespace smatv::testing
