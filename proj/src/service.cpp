#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "smatv/interface.hpp"
#include "smatv/netio.hpp"

namespace smatv {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kJson = "application/json";

struct Job {
    std::mutex mu;
    std::string status = "running";
    json result;
    std::string error;
};

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(2), kJson);
}

void reply_error(httplib::Response& res, int status, const std::string& msg, json extra = json::object()) {
    extra["error"] = msg;
    reply(res, status, extra);
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("request body: ") + e.what(), e.byte);
    }
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

struct Service::Impl {
    ServiceOptions opts;
    httplib::Server server;
    std::mutex mu;
    std::shared_ptr<const NetworkDocument> doc;
    std::uint64_t revision = 1;
    std::map<std::string, std::shared_ptr<Job>> jobs;
    std::uint64_t next_job = 1;
    std::vector<std::thread> workers;
    std::atomic<bool> stopping{false};

    explicit Impl(ServiceOptions o) : opts(std::move(o)) {
        fs::create_directories(opts.network_dir);
        fs::path file = network_file();
        if (fs::exists(file)) {
            doc = std::make_shared<const NetworkDocument>(parse_network(read_all(file)));
        } else {
            doc = std::make_shared<const NetworkDocument>(build_case_study());
            store(*doc);
        }
        routes();
    }

    ~Impl() {
        stopping = true;
        for (auto& t : workers)
            if (t.joinable()) t.join();
    }

    fs::path network_file() const { return fs::path(opts.network_dir) / "network.json"; }

    void store(const NetworkDocument& d) const {
        fs::path tmp = network_file();
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            out << serialize_network(d.network, d.scenario);
        }
        fs::rename(tmp, network_file());
    }

    std::pair<std::shared_ptr<const NetworkDocument>, std::uint64_t> snapshot() {
        std::lock_guard lock(mu);
        return {doc, revision};
    }

    Scenario scenario_for(const NetworkDocument& d, const json& body) {
        Scenario s = d.scenario.value_or(Scenario{});
        if (auto it = body.find("scenario"); it != body.end()) {
            Scenario extra = scenario_from_json(*it);
            for (const auto& [k, v] : extra.regulators) s.regulators[k] = v;
            for (const auto& [k, v] : extra.source_trims_db) s.source_trims_db[k] = v;
        }
        return s;
    }

    // Runs a handler, mapping library errors to 400 responses.
    template <class F>
    void guarded(httplib::Response& res, F&& f) {
        try {
            f();
        } catch (const ValidationError& e) {
            reply_error(res, 400, "network is invalid", {{"diagnostics", diagnostics_to_json(e.diagnostics())}});
        } catch (const SchemaError& e) {
            reply_error(res, 400, e.what(), {{"path", e.path()}});
        } catch (const std::exception& e) {
            reply_error(res, 400, e.what());
        }
    }

    void routes() {
        server.Get("/api/network", [this](const httplib::Request&, httplib::Response& res) {
            auto [d, rev] = snapshot();
            res.set_header("ETag", std::to_string(rev));
            reply(res, 200, {{"revision", std::to_string(rev)}, {"network", network_to_json(d->network, d->scenario)}});
        });

        server.Put("/api/network", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                json body = parse_body(req);
                std::string token = req.get_header_value("If-Match");
                if (auto it = body.find("revision"); it != body.end() && it->is_string()) token = it->get<std::string>();
                auto it = body.find("network");
                if (it == body.end()) throw SchemaError("missing field 'network'", "/");
                auto parsed = std::make_shared<const NetworkDocument>(network_from_json(*it));
                std::lock_guard lock(mu);
                if (token != std::to_string(revision)) {
                    reply_error(res, 409, "revision mismatch", {{"revision", std::to_string(revision)}});
                    return;
                }
                store(*parsed);
                doc = parsed;
                ++revision;
                res.set_header("ETag", std::to_string(revision));
                reply(res, 200, {{"revision", std::to_string(revision)}});
            });
        });

        server.Get("/api/catalog", [this](const httplib::Request&, httplib::Response& res) {
            auto [d, rev] = snapshot();
            res.set_content(serialize_catalog(*d->network.catalog), kJson);
        });

        server.Post("/api/validate", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                json body = parse_body(req);
                auto it = body.find("network");
                if (it == body.end()) throw SchemaError("missing field 'network'", "/");
                auto parsed = network_from_json(*it);
                reply(res, 200, {{"valid", true}, {"diagnostics", diagnostics_to_json(validate_network(parsed.network))}});
            });
        });

        server.Post("/api/simulate", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto [d, rev] = snapshot();
                json body = parse_body(req);
                auto sim = propagate(d->network, scenario_for(*d, body));
                auto report = check_all(sim, d->network, d->network.constraints);
                reply(res, 200, report_to_json(report, &sim));
            });
        });

        server.Post("/api/sweep", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto [d, rev] = snapshot();
                json body = parse_body(req);
                auto name = body.value("line", std::string("TERR"));
                auto line = parse_signal_line(name);
                if (!line) throw SchemaError("unknown signal line '" + name + "'", "/line");
                std::vector<double> levels{50, 60, 70, 80, 90};
                if (auto it = body.find("levels"); it != body.end()) {
                    if (!it->is_array()) throw SchemaError("expected an array", "/levels");
                    levels.clear();
                    for (const auto& v : *it) {
                        if (!v.is_number()) throw SchemaError("expected a number", "/levels");
                        levels.push_back(v.get<double>());
                    }
                }
                reply(res, 200, sweep_to_json(sweep_input_level(d->network, *line, levels, scenario_for(*d, body))));
            });
        });

        server.Post("/api/optimize", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto [d, rev] = snapshot();
                json body = parse_body(req);
                auto budget = body.value("budget", std::size_t{100000});
                auto seed = body.value("seed", std::uint64_t{1});
                if (budget < 1) throw SchemaError("budget must be >= 1", "/budget");
                Scenario start = scenario_for(*d, body);
                auto job = std::make_shared<Job>();
                std::string id;
                {
                    std::lock_guard lock(mu);
                    id = std::to_string(next_job++);
                    jobs[id] = job;
                    workers.emplace_back([d = d, job, budget, seed, start] {
                        try {
                            auto r = optimize_gains(d->network, d->network.constraints, budget, seed, start);
                            std::lock_guard jl(job->mu);
                            job->result = optimize_to_json(r);
                            job->status = "done";
                        } catch (const std::exception& e) {
                            std::lock_guard jl(job->mu);
                            job->error = e.what();
                            job->status = "failed";
                        }
                    });
                }
                reply(res, 202, {{"job", id}, {"status", "running"}});
            });
        });

        server.Get(R"(/api/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            std::shared_ptr<Job> job;
            {
                std::lock_guard lock(mu);
                auto it = jobs.find(req.matches[1].str());
                if (it != jobs.end()) job = it->second;
            }
            if (!job) return reply_error(res, 404, "unknown job '" + req.matches[1].str() + "'");
            std::lock_guard jl(job->mu);
            json body{{"job", req.matches[1].str()}, {"status", job->status}};
            if (job->status == "done") body["result"] = job->result;
            if (job->status == "failed") body["error"] = job->error;
            reply(res, 200, body);
        });

        server.Get(R"(/api/outputs/([^/]+)/trace)", [this](const httplib::Request& req, httplib::Response& res) {
            auto [d, rev] = snapshot();
            std::string id = req.matches[1].str();
            const Node* n = d->network.find_node(id);
            if (!n || !n->output()) return reply_error(res, 404, "unknown output '" + id + "'");
            guarded(res, [&] {
                auto sim = propagate(d->network, d->scenario.value_or(Scenario{}));
                reply(res, 200, trace_to_json(sim, d->network, id));
            });
        });

        if (!opts.static_dir.empty()) {
            server.set_mount_point("/", opts.static_dir);
        } else {
            server.Get("/", [](const httplib::Request&, httplib::Response& res) {
                res.set_content("smatv service: see /api/network\n", "text/plain");
            });
        }
        server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
            if (res.status == 404 && res.body.empty()) reply_error(res, 404, "no route for " + req.path);
        });
    }
};

Service::Service(ServiceOptions opts) : impl_(std::make_unique<Impl>(std::move(opts))) {}

Service::~Service() { stop(); }

int Service::bind() {
    if (impl_->opts.port == 0) {
        int p = impl_->server.bind_to_any_port(impl_->opts.host);
        if (p < 0) throw std::runtime_error("cannot bind " + impl_->opts.host);
        impl_->opts.port = p;
        return p;
    }
    if (!impl_->server.bind_to_port(impl_->opts.host, impl_->opts.port))
        throw std::runtime_error("cannot bind " + impl_->opts.host + ":" + std::to_string(impl_->opts.port));
    return impl_->opts.port;
}

void Service::listen() { impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace smatv
