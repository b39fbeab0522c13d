#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace smatv {

// Exit codes: 0 compliant / success, 1 violations found, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// SMATV_PORT when set and valid, else 8080.
int default_port();

struct ServiceOptions {
    std::string network_dir;  // holds network.json; created from the case study when missing
    std::string static_dir;   // optional front-end assets served at /
    std::string host = "127.0.0.1";
    int port = 0;             // 0 picks a free port
};

class Service {
public:
    explicit Service(ServiceOptions opts);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Binds the socket and returns the port actually used.
    int bind();
    // Serves until stop(); call bind() first.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace smatv
