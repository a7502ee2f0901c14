#include "hmobo/service.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <httplib.h>

#include "hmobo/analysis.hpp"
#include "hmobo/error.hpp"

namespace hmobo {

using nlohmann::json;

int http_status(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotFound: return 404;
        case ErrorKind::Range:
        case ErrorKind::Domain:
        case ErrorKind::Validation:
        case ErrorKind::Config:
        case ErrorKind::InvalidSelection:
        case ErrorKind::Protocol: return 400;
        case ErrorKind::Mode:
        case ErrorKind::Sequencing:
        case ErrorKind::Stage:
        case ErrorKind::ProtocolComplete:
        case ErrorKind::EmptyData: return 409;
        default: return 500;
    }
}

namespace {

bool safe_id(const std::string& id) {
    return !id.empty() && id.size() <= 64 &&
           std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'; });
}

}  // namespace

SessionStore::SessionStore(std::filesystem::path data_dir, Clock clock)
    : data_dir_(std::move(data_dir)), clock_(clock ? std::move(clock) : Clock(utc_now)) {
    std::error_code ec;
    std::filesystem::create_directories(data_dir_, ec);
    if (ec) fail(ErrorKind::Io, "cannot create data directory " + data_dir_.string() + ": " + ec.message());
}

Session::Sink SessionStore::file_sink(const std::string& id) const {
    const auto path = data_dir_ / (id + ".jsonl");
    return [path](const Event& e) {
        std::ofstream out(path, std::ios::app | std::ios::binary);
        out << serialize_event(e) << '\n';
        out.flush();
        if (!out) fail(ErrorKind::Io, "cannot append to " + path.string());
    };
}

std::string SessionStore::fresh_id() {
    static thread_local std::mt19937_64 gen{std::random_device{}()};
    for (;;) {
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(gen()));
        std::string id(buf);
        if (!sessions_.contains(id) && !std::filesystem::exists(data_dir_ / (id + ".jsonl"))) return id;
    }
}

std::string SessionStore::create(Mode mode, const SessionConfig& cfg) {
    std::lock_guard lock(index_mutex_);
    const std::string id = fresh_id();
    auto entry = std::make_shared<Entry>(Session::create(id, mode, cfg, clock_, file_sink(id)));
    sessions_.emplace(id, std::move(entry));
    return id;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) {
    std::lock_guard lock(index_mutex_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
    const auto path = data_dir_ / (id + ".jsonl");
    if (!safe_id(id) || !std::filesystem::exists(path)) fail(ErrorKind::NotFound, "no session '" + id + "'");
    std::ifstream in(path, std::ios::binary);
    auto entry = std::make_shared<Entry>(Session::restore(read_log(in), clock_, file_sink(id)));
    sessions_.emplace(id, entry);
    return entry;
}

namespace {

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(ErrorKind::Validation, "request body must be a JSON object");
    return j;
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

/// Wraps a handler so library errors become {"error", "message"} responses.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            send_json(res, json{{"error", to_string(e.kind())}, {"message", e.what()}}, http_status(e.kind()));
        } catch (const json::exception& e) {
            send_json(res, json{{"error", "validation_error"}, {"message", e.what()}}, 400);
        }
    };
}

std::vector<int> parse_m_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int m = std::stoi(item, &used);
            if (used != item.size() || m < 1 || m > 20) throw std::invalid_argument(item);
            out.push_back(m);
        } catch (const std::exception&) {
            fail(ErrorKind::Validation, "bad m value '" + item + "'");
        }
    }
    if (out.empty()) fail(ErrorKind::Validation, "m list is empty");
    return out;
}

json pareto_json(const ParetoView& v) { return json{{"front", v.front}, {"points", v.points}}; }

}  // namespace

void register_routes(httplib::Server& server, SessionStore& store) {
    const std::string session = R"(/api/sessions/([A-Za-z0-9_-]+))";

    server.Post("/api/sessions", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                    const json body = parse_body(req);
                    if (!body.contains("mode") || !body["mode"].is_string()) fail(ErrorKind::Validation, "mode is required");
                    const Mode mode = mode_from_string(body["mode"].get<std::string>());
                    SessionConfig cfg;
                    if (body.contains("cfg") && !body["cfg"].is_null()) cfg = body["cfg"].get<SessionConfig>();
                    send_json(res, json{{"id", store.create(mode, cfg)}}, 201);
                }));

    server.Get(session, guarded([&store](const httplib::Request& req, httplib::Response& res) {
                   send_json(res, store.with_session(req.matches[1], [](Session& s) { return to_json(s.state()); }));
               }));

    server.Get(session + "/proposal", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                   const Proposal p = store.with_session(req.matches[1], [](Session& s) { return s.get_proposal(); });
                   send_json(res, json{{"design", p.design}, {"tag", to_string(p.tag)}});
               }));

    server.Post(session + "/evaluations", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                    const json body = parse_body(req);
                    if (!body.contains("design")) fail(ErrorKind::Validation, "design is required");
                    const auto design = body["design"].get<DesignParams>();
                    const auto source = source_from_string(body.value("source", std::string("synthetic")));
                    std::optional<std::pair<double, double>> metrics;
                    if (body.contains("metrics") && !body["metrics"].is_null()) {
                        const json& m = body["metrics"];
                        if (!m.is_object() || !m.contains("mean_time_ms") || !m.contains("mean_error_cm") ||
                            !m["mean_time_ms"].is_number() || !m["mean_error_cm"].is_number()) {
                            fail(ErrorKind::Validation, "metrics need numeric mean_time_ms and mean_error_cm");
                        }
                        metrics.emplace(m["mean_time_ms"].get<double>(), m["mean_error_cm"].get<double>());
                    }
                    const auto result = store.with_session(
                        req.matches[1], [&](Session& s) { return s.submit_evaluation(design, source, metrics); });
                    send_json(res, json(result));
                }));

    server.Post(session + "/tests", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                    const json body = parse_body(req);
                    if (!body.contains("design")) fail(ErrorKind::Validation, "design is required");
                    const auto design = body["design"].get<DesignParams>();
                    const auto count = store.with_session(req.matches[1], [&](Session& s) {
                        s.record_informal_test(design);
                        return s.state().informal_tests.size();
                    });
                    send_json(res, json{{"ack", true}, {"informal_test_count", count}});
                }));

    server.Get(session + "/pareto", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                   send_json(res, store.with_session(req.matches[1], [](Session& s) { return pareto_json(s.get_pareto()); }));
               }));

    server.Post(session + "/decision", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                    const json body = parse_body(req);
                    if (!body.contains("picks") || !body["picks"].is_array()) fail(ErrorKind::Validation, "picks array is required");
                    std::vector<std::size_t> picks;
                    for (const auto& p : body["picks"]) {
                        if (!p.is_number_unsigned()) fail(ErrorKind::Validation, "picks must be non-negative integers");
                        picks.push_back(p.get<std::size_t>());
                    }
                    send_json(res, store.with_session(req.matches[1], [&](Session& s) { return s.submit_decision(picks); }));
                }));

    server.Get(session + "/analysis", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                   const auto ms = parse_m_list(req.has_param("m") ? req.get_param_value("m") : std::string("2,3"));
                   send_json(res, store.with_session(req.matches[1], [&](Session& s) { return session_report(s.state(), ms); }));
               }));
}

}  // namespace hmobo
