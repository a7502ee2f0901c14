// hmobo: synthetic comparison harness, one-shot proposer, log analysis and API server.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "hmobo/analysis.hpp"
#include "hmobo/baseline.hpp"
#include "hmobo/error.hpp"
#include "hmobo/harness.hpp"
#include "hmobo/mobo.hpp"
#include "hmobo/observations.hpp"
#include "hmobo/service.hpp"
#include "hmobo/session.hpp"

// After Eigen: <resolv.h> (via httplib) defines a _res macro that breaks Eigen headers.
#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace {

using nlohmann::json;
using namespace hmobo;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct FileConfig {
    SessionConfig session;
    StrategyConfig strategy;
    DistanceDenominator denominator = DistanceDenominator::Designs;
};

FileConfig load_config(const std::string& path) {
    FileConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open config " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(ErrorKind::Config, path + ": not a JSON object");
    cfg.session = j.get<SessionConfig>();
    if (j.contains("strategy")) cfg.strategy = j.at("strategy").get<StrategyConfig>();
    if (j.contains("analysis")) {
        const auto denom = j.at("analysis").value("distance_denominator", std::string("N"));
        if (denom == "N") cfg.denominator = DistanceDenominator::Designs;
        else if (denom == "N-1") cfg.denominator = DistanceDenominator::Transitions;
        else fail(ErrorKind::Config, "analysis.distance_denominator must be \"N\" or \"N-1\"");
    }
    return cfg;
}

std::vector<int> parse_m_values(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int m = 0;
        try {
            m = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || m < 1) fail(ErrorKind::Validation, "--m: bad value '" + item + "'");
        out.push_back(m);
    }
    if (out.empty()) fail(ErrorKind::Validation, "--m: empty list");
    return out;
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Validation:
        case ErrorKind::Config: return kExitUsage;
        default: return kExitFailure;
    }
}

int run_simulate(int sessions, std::uint64_t seed, const std::string& modes, const std::string& baseline,
                 const std::string& out, const std::string& config_path, int jobs) {
    const FileConfig cfg = load_config(config_path);
    SimulateOptions options;
    options.sessions = sessions;
    options.seed = seed;
    options.run_optimizer = modes == "both" || modes == "optimizer";
    options.run_baselines = modes == "both" || modes == "baselines";
    options.strategy = cfg.strategy;
    options.strategy.kind = strategy_kind_from_string(baseline);
    options.mobo = cfg.session.mobo;
    options.denominator = cfg.denominator;
    options.jobs = jobs;
    options.out_dir = out;
    const auto outcome = run_simulation(options);
    std::cout << outcome.comparison.dump(2) << '\n';
    return kExitOk;
}

int run_propose(const std::string& observations, const std::string& config_path, std::uint64_t seed) {
    const FileConfig cfg = load_config(config_path);
    std::ifstream in(observations);
    if (!in) fail(ErrorKind::Io, "cannot open observations " + observations);
    const auto history = read_observations_csv(in);
    MoboConfig mobo = cfg.session.mobo;
    mobo.seed = seed;
    Rng rng = Rng::stream({seed, history.size(), 0x70726F706FULL});
    const Proposal p = propose_next(history, mobo, rng);
    std::cout << json{{"design", p.design}, {"tag", to_string(p.tag)}, {"observations", history.size()}}.dump() << '\n';
    return kExitOk;
}

int run_analyze(const std::string& log_path, const std::string& m_text, const std::string& config_path) {
    const FileConfig cfg = load_config(config_path);
    const auto ms = parse_m_values(m_text);
    std::ifstream in(log_path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open log " + log_path);
    const auto log = read_log(in);
    const SessionState state = replay(log);
    std::cout << session_report(state, ms, cfg.denominator).dump(2) << '\n';
    return kExitOk;
}

int run_serve(int port, const std::string& data_dir) {
    // Block termination signals in every thread; a dedicated waiter stops the server.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    SessionStore store(data_dir);
    httplib::Server server;
    register_routes(server, store);
    std::jthread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        std::cerr << "hmobo: shutting down\n";
        server.stop();
    });
    if (!server.bind_to_port("0.0.0.0", port)) {
        std::cerr << "hmobo serve: cannot bind port " << port << '\n';
        pthread_kill(waiter.native_handle(), SIGTERM);
        return kExitFailure;
    }
    std::cerr << "hmobo: serving on port " << port << ", data in " << data_dir << '\n';
    server.listen_after_bind();
    // Every event is flushed on append, so there is nothing left to write here.
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Human-in-the-loop multi-objective Bayesian optimization workbench"};
    app.require_subcommand(1);

    int sessions = 1;
    std::uint64_t seed = 0;
    std::string modes = "both";
    std::string baseline = "fixated";
    std::string out_dir;
    std::string config_path;
    int jobs = 1;
    auto* simulate = app.add_subcommand("simulate", "Run paired optimizer-driven and baseline synthetic sessions");
    simulate->add_option("--sessions", sessions, "Sessions per mode")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "Base seed");
    simulate->add_option("--modes", modes, "both|optimizer|baselines")->check(CLI::IsMember({"both", "optimizer", "baselines"}));
    simulate->add_option("--baseline", baseline, "random|fixated")->check(CLI::IsMember({"random", "fixated"}));
    simulate->add_option("--out", out_dir, "Output directory")->required();
    simulate->add_option("--config", config_path, "Config JSON (see docs/config.md)");
    simulate->add_option("--jobs", jobs, "Parallel sessions")->check(CLI::PositiveNumber);

    std::string observations;
    std::string propose_config;
    std::uint64_t propose_seed = 0;
    auto* propose = app.add_subcommand("propose", "Propose the next design from an observations CSV");
    propose->add_option("--observations", observations, "CSV: " + std::string(kObservationHeader))->required();
    propose->add_option("--config", propose_config, "Config JSON");
    propose->add_option("--seed", propose_seed, "Seed");

    std::string log_path;
    std::string m_text = "2,3,4,5";
    std::string analyze_config;
    auto* analyze = app.add_subcommand("analyze", "Replay a session log and report exploration metrics");
    analyze->add_option("--log", log_path, "Session .jsonl log")->required();
    analyze->add_option("--m", m_text, "Comma-separated hypercube divisions");
    analyze->add_option("--config", analyze_config, "Config JSON (analysis.distance_denominator)");

    int port = 8080;
    std::string data_dir = "data";
    auto* serve = app.add_subcommand("serve", "Serve the session HTTP API");
    serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
    serve->add_option("--data", data_dir, "Session log directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*simulate) return run_simulate(sessions, seed, modes, baseline, out_dir, config_path, jobs);
        if (*propose) return run_propose(observations, propose_config, propose_seed);
        if (*analyze) return run_analyze(log_path, m_text, analyze_config);
        if (*serve) return run_serve(port, data_dir);
    } catch (const Error& e) {
        std::cerr << "hmobo: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "hmobo: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
