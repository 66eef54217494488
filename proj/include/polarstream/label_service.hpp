#pragma once

// HTTP bridge between the sequential learner and a human annotator.
//
//   GET  /api/query   200 + PendingQuery JSON, or 204 when nothing is pending
//   POST /api/label   {"v":1,"doc_id":n,"label":"pos"|"neg"}
//                     200 accepted | 409 stale or unknown doc_id | 400 bad body
//   GET  /api/status  200 + progress JSON
//
// Every payload carries a top-level "v" schema version.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "polarstream/harness.hpp"
#include "polarstream/oracle.hpp"

namespace polar {

inline constexpr int kApiVersion = 1;

inline nlohmann::json to_json(const PendingQuery& q) {
  return {{"v", kApiVersion},
          {"doc_id", q.doc_id},
          {"words", q.words},
          {"predicted", std::string(to_token(q.predicted))},
          {"score", q.score},
          {"context",
           {{"prior_pos", q.prior_positive},
            {"prior_neg", q.prior_negative},
            {"vocab_size", q.vocab_size},
            {"kappa", q.kappa}}}};
}

inline nlohmann::json to_json(const RunStatus& s) {
  return {{"v", kApiVersion},         {"started", s.started},     {"finished", s.finished},
          {"position", s.position},   {"queries", s.queries},     {"abandoned", s.abandoned},
          {"seed_size", s.seed_size}, {"spend_percent", s.spend_percent}, {"kappa", s.kappa},
          {"vocab_size", s.vocab_size}};
}

class LabelService {
 public:
  explicit LabelService(LabelExchange& exchange, const std::string& static_dir = {}) : exchange_(exchange) {
    server_.Get("/api/query", [this](const httplib::Request&, httplib::Response& res) {
      if (auto q = exchange_.pending()) {
        res.set_content(to_json(*q).dump(), "application/json");
      } else {
        res.status = 204;
      }
    });
    server_.Get("/api/status", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(to_json(exchange_.status()).dump(), "application/json");
    });
    server_.Post("/api/label", [this](const httplib::Request& req, httplib::Response& res) { handle_label(req, res); });
    if (!static_dir.empty() && std::filesystem::is_directory(static_dir)) server_.set_mount_point("/", static_dir);
  }

  LabelService(const LabelService&) = delete;
  LabelService& operator=(const LabelService&) = delete;
  ~LabelService() { stop(); }

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0) {
    if (port == 0) {
      port_ = server_.bind_to_any_port(host);
    } else if (server_.bind_to_port(host, port)) {
      port_ = port;
    } else {
      port_ = -1;
    }
    if (port_ < 0) throw Error("cannot bind label service to " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const noexcept { return port_; }

 private:
  void handle_label(const httplib::Request& req, httplib::Response& res) {
    auto reply = [&](int status, const std::string& state, const std::string& detail = {}) {
      nlohmann::json body{{"v", kApiVersion}, {"status", state}};
      if (!detail.empty()) body["error"] = detail;
      res.status = status;
      res.set_content(body.dump(), "application/json");
    };
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception&) {
      return reply(400, "bad-request", "body is not JSON");
    }
    if (!body.is_object() || !body.contains("doc_id") || !body["doc_id"].is_number_unsigned() ||
        !body.contains("label") || !body["label"].is_string()) {
      return reply(400, "bad-request", "expected {\"doc_id\": <id>, \"label\": \"pos\"|\"neg\"}");
    }
    const auto label = parse_label(body["label"].get<std::string>());
    if (!label) return reply(400, "bad-request", "label must be pos or neg");
    const auto doc_id = body["doc_id"].get<std::uint64_t>();
    if (exchange_.answer(doc_id, *label) == AnswerStatus::Accepted) return reply(200, "accepted");
    return reply(409, "conflict", "document " + std::to_string(doc_id) + " is not the pending query");
  }

  LabelExchange& exchange_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

/// Experiment loop driven by a human through `exchange`; records are flushed
/// per document so an interrupted session leaves a readable records.csv.
inline RunResult run_interactive(const ExperimentConfig& cfg, LabelExchange& exchange,
                                 const std::atomic<bool>* stop = nullptr) {
  InteractiveOracle oracle(exchange, std::chrono::milliseconds(cfg.oracle_timeout_ms));
  return run_experiment(
      cfg, oracle, [&](const RunStatus& s) { exchange.publish(s); }, stop, true);
}

}  // namespace polar
