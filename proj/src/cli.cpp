#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "smatv/interface.hpp"
#include "smatv/netio.hpp"

namespace smatv {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + path + "'");
    f << text;
}

ReportFormat parse_format(const std::string& s) { return s == "machine" ? ReportFormat::Machine : ReportFormat::Table; }

// "start:stop:step" (inclusive) or a comma-separated list.
std::vector<double> parse_levels(const std::string& spec) {
    std::vector<double> out;
    auto num = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || !std::isfinite(v)) throw UsageError("bad level '" + s + "' in --levels");
        return v;
    };
    if (spec.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw UsageError("--levels expects start:stop:step");
        double a = num(parts[0]), b = num(parts[1]), step = num(parts[2]);
        if (step <= 0 || b < a) throw UsageError("--levels needs step > 0 and stop >= start");
        for (int i = 0;; ++i) {
            double v = a + i * step;
            if (v > b + 1e-9) break;
            out.push_back(v);
        }
    } else {
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ',');) out.push_back(num(p));
    }
    if (out.empty()) throw UsageError("--levels is empty");
    return out;
}

Scenario merged_scenario(const NetworkDocument& doc, const std::string& scenario_path) {
    Scenario s = doc.scenario.value_or(Scenario{});
    if (scenario_path.empty()) return s;
    auto j = nlohmann::json::parse(read_file(scenario_path), nullptr, false);
    if (j.is_discarded()) throw UsageError("scenario file '" + scenario_path + "' is not valid JSON");
    Scenario extra = scenario_from_json(j);
    for (const auto& [k, v] : extra.regulators) s.regulators[k] = v;
    for (const auto& [k, v] : extra.source_trims_db) s.source_trims_db[k] = v;
    return s;
}

NetworkDocument load(const std::string& path) { return parse_network(read_file(path)); }

void print_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& os) {
    for (const auto& d : diags)
        os << to_string(d.severity) << ": " << d.invariant << " @ " << d.subject << ": " << d.message << "\n";
}

}  // namespace

int default_port() {
    if (const char* env = std::getenv("SMATV_PORT")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0 && v < 65536) return static_cast<int>(v);
    }
    return 8080;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"SMATV network design tool", "smatv"};
    app.require_subcommand(1);

    std::string network, scenario_path, out_path, format = "table", line_name = "TERR", levels = "50:90:10";
    std::string apply_path, output_id, network_dir, static_dir, host = "127.0.0.1";
    std::size_t budget = 100000;
    std::uint64_t seed = 1;
    int port = default_port();
    auto formats = CLI::IsMember({"table", "machine"});

    auto* sim = app.add_subcommand("simulate", "Propagate signals and check compliance");
    sim->add_option("network", network, "Network JSON file")->required();
    sim->add_option("--scenario", scenario_path, "Scenario JSON overriding the stored one");
    sim->add_option("--out", out_path, "Write the report here instead of stdout");
    sim->add_option("--format", format)->check(formats);

    auto* val = app.add_subcommand("validate", "Check network invariants");
    val->add_option("network", network)->required();

    auto* sweep = app.add_subcommand("sweep", "Sweep one line's input level");
    sweep->add_option("network", network)->required();
    sweep->add_option("--line", line_name);
    sweep->add_option("--levels", levels, "start:stop:step or a comma list (dBuV)");
    sweep->add_option("--scenario", scenario_path);
    sweep->add_option("--out", out_path);
    sweep->add_option("--format", format)->check(formats);

    auto* opt = app.add_subcommand("optimize", "Search regulator positions");
    opt->add_option("network", network)->required();
    opt->add_option("--budget", budget)->check(CLI::PositiveNumber);
    opt->add_option("--seed", seed);
    opt->add_option("--scenario", scenario_path);
    opt->add_option("--apply", apply_path, "Write the network with the best scenario stored");
    opt->add_option("--out", out_path);
    opt->add_option("--format", format)->check(formats);

    auto* trace = app.add_subcommand("trace", "Per-frequency levels at one output");
    trace->add_option("network", network)->required();
    trace->add_option("--output", output_id)->required();
    trace->add_option("--scenario", scenario_path);
    trace->add_option("--out", out_path);

    auto* sens = app.add_subcommand("sensitivity", "Knobs on an output's path");
    sens->add_option("network", network)->required();
    sens->add_option("--output", output_id)->required();
    sens->add_option("--line", line_name);
    sens->add_option("--scenario", scenario_path);

    auto* cs = app.add_subcommand("case-study", "Write the five-floor reference building");
    cs->add_option("--out", out_path);

    auto* cat = app.add_subcommand("catalog", "Write the built-in catalog");
    cat->add_option("--out", out_path);

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--port", port);
    serve->add_option("--host", host);
    serve->add_option("--network-dir", network_dir)->required();
    serve->add_option("--static-dir", static_dir);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    auto line_of = [&]() {
        auto l = parse_signal_line(line_name);
        if (!l) throw UsageError("unknown line '" + line_name + "'");
        return *l;
    };

    try {
        if (*sim) {
            auto doc = load(network);
            Scenario s = merged_scenario(doc, scenario_path);
            auto result = propagate(doc.network, s);
            auto report = check_all(result, doc.network, doc.network.constraints);
            write_output(out_path, export_report(report, parse_format(format), &result), out);
            return report.clean() ? kExitOk : kExitViolations;
        }
        if (*val) {
            auto text = read_file(network);
            try {
                auto doc = parse_network(text);
                print_diagnostics(validate_network(doc.network), out);
                out << "network is valid\n";
                return kExitOk;
            } catch (const ValidationError& e) {
                print_diagnostics(e.diagnostics(), out);
                return kExitViolations;
            }
        }
        if (*sweep) {
            auto doc = load(network);
            auto lv = parse_levels(levels);
            auto result = sweep_input_level(doc.network, line_of(), lv, merged_scenario(doc, scenario_path));
            write_output(out_path, export_sweep(result, parse_format(format)), out);
            return kExitOk;
        }
        if (*opt) {
            auto doc = load(network);
            auto result = optimize_gains(doc.network, doc.network.constraints, budget, seed,
                                         merged_scenario(doc, scenario_path));
            write_output(out_path, export_optimize(result, parse_format(format)), out);
            if (!apply_path.empty()) write_output(apply_path, serialize_network(doc.network, result.best), out);
            return kExitOk;
        }
        if (*trace) {
            auto doc = load(network);
            auto result = propagate(doc.network, merged_scenario(doc, scenario_path));
            write_output(out_path, trace_to_json(result, doc.network, output_id).dump(2) + "\n", out);
            return kExitOk;
        }
        if (*sens) {
            auto doc = load(network);
            auto rows = sensitivity(doc.network, output_id, line_of(), merged_scenario(doc, scenario_path));
            for (const auto& r : rows) {
                out << r.node << "/" << r.knob;
                if (r.source_trim) {
                    out << "  1 dB per dB of trim\n";
                    continue;
                }
                out << "  index " << r.current_index;
                out << "  up " << (r.up_db ? std::to_string(*r.up_db) : std::string("-"));
                out << "  down " << (r.down_db ? std::to_string(*r.down_db) : std::string("-")) << "\n";
            }
            return kExitOk;
        }
        if (*cs) {
            auto doc = build_case_study();
            write_output(out_path, serialize_network(doc.network, doc.scenario), out);
            return kExitOk;
        }
        if (*cat) {
            write_output(out_path, serialize_catalog(builtin_catalog()), out);
            return kExitOk;
        }
        if (*serve) {
            Service svc({network_dir, static_dir, host, port});
            int bound = svc.bind();
            out << "listening on http://" << host << ":" << bound << "\n" << std::flush;
            svc.listen();
            return kExitOk;
        }
    } catch (const ValidationError& e) {
        err << "error: network is invalid\n";
        print_diagnostics(e.diagnostics(), err);
        return kExitUsage;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace smatv
