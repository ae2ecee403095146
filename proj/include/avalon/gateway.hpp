#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "avalon/core.hpp"
#include "avalon/log.hpp"

namespace avalon {

// ---------------------------------------------------------------------------
// Requests and results
// ---------------------------------------------------------------------------

struct CompletionRequest {
  std::string system_text;
  std::string user_text;
  Effort reasoning_effort = Effort::Low;
  std::string model_id = "gpt-5.1";
  int max_attempts = 4;
  double timeout_seconds = 0.0;  // 0 -> effort default
};

// Defaults sized so the slowest deliberation level has comfortable headroom.
inline double effort_default_timeout(Effort effort) {
  switch (effort) {
    case Effort::Low: return 60.0;
    case Effort::Medium: return 180.0;
    case Effort::High: return 300.0;
  }
  return 60.0;
}

struct TokenUsage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
};

struct CompletionResult {
  std::string text;
  std::string response_body;  // verbatim provider body
  double latency_seconds = 0.0;
  int attempt_count = 1;
  std::optional<TokenUsage> token_usage;
};

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

struct TransportReply {
  int status = 0;    // 0 = request never completed (network error)
  std::string body;
  std::string error;  // network error detail when status == 0
  // Mock transports report a fixed latency so offline runs stay byte-stable.
  std::optional<double> synthetic_latency;
};

class Transport {
 public:
  virtual ~Transport() = default;
  // The bearer token travels as a header, never inside the logged body.
  virtual TransportReply post_chat(const Json& request_body, double timeout_seconds,
                                   const std::string& bearer) = 0;
  // Transports that synthesize replies locally need no credentials.
  virtual bool requires_credentials() const { return true; }
};

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

struct GatewayConfig {
  std::string api_key_env = "OPENAI_API_KEY";
  std::string api_key;  // explicit key wins over the environment
  int max_in_flight = 4;
  double min_request_interval_seconds = 0.0;
  double backoff_base_seconds = 0.5;  // attempt n sleeps base * 2^(n-1)
  double backoff_cap_seconds = 30.0;
};

// The only part of the system that talks to the network. Everything else is
// pure over logs and seeds, which is what lets the full suite run offline.
class LlmGateway {
 public:
  LlmGateway(GatewayConfig config, std::shared_ptr<Transport> transport)
      : config_(std::move(config)), transport_(std::move(transport)) {}

  const std::string& api_key() const { return resolved_key_; }

  CompletionResult complete(const CompletionRequest& request) {
    if (transport_->requires_credentials()) {
      resolve_credentials();
    }
    Json body{{"model", request.model_id},
              {"reasoning_effort", effort_token(request.reasoning_effort)},
              {"messages",
               Json::array({Json{{"role", "system"}, {"content", request.system_text}},
                            Json{{"role", "user"}, {"content", request.user_text}}})}};
    const double timeout = request.timeout_seconds > 0.0
                               ? request.timeout_seconds
                               : effort_default_timeout(request.reasoning_effort);

    const auto started = std::chrono::steady_clock::now();
    std::string last_error;
    for (int attempt = 1; attempt <= request.max_attempts; ++attempt) {
      TransportReply reply;
      {
        InFlightGuard guard(*this);
        pace_requests();
        reply = transport_->post_chat(body, timeout, resolved_key_);
      }
      if (reply.status == 401 || reply.status == 403) {
        throw CredentialError("chat service rejected credentials (HTTP " +
                              std::to_string(reply.status) + ")");
      }
      if (reply.status == 200) {
        CompletionResult result;
        if (extract_text(reply.body, result)) {
          result.attempt_count = attempt;
          result.latency_seconds =
              reply.synthetic_latency ? *reply.synthetic_latency : elapsed_seconds(started);
          return result;
        }
        last_error = "malformed completion body";
      } else if (reply.status == 0) {
        last_error = "network error: " + reply.error;
      } else if (reply.status == 429 || reply.status >= 500) {
        last_error = "HTTP " + std::to_string(reply.status);
      } else {
        // Other 4xx responses will not get better on retry.
        throw GatewayUnavailableError("chat service rejected request: HTTP " +
                                      std::to_string(reply.status) + " " + reply.body);
      }
      if (attempt < request.max_attempts) backoff_sleep(attempt);
    }
    throw GatewayUnavailableError("chat service unavailable after " +
                                  std::to_string(request.max_attempts) +
                                  " attempts; last error: " + last_error);
  }

 private:
  class InFlightGuard {
   public:
    explicit InFlightGuard(LlmGateway& g) : gateway_(g) {
      std::unique_lock lock(g.mutex_);
      g.capacity_cv_.wait(lock, [&] { return g.in_flight_ < g.config_.max_in_flight; });
      ++g.in_flight_;
    }
    ~InFlightGuard() {
      {
        std::lock_guard lock(gateway_.mutex_);
        --gateway_.in_flight_;
      }
      gateway_.capacity_cv_.notify_one();
    }

   private:
    LlmGateway& gateway_;
  };

  void resolve_credentials() {
    std::lock_guard lock(mutex_);
    if (!resolved_key_.empty()) return;
    if (!config_.api_key.empty()) {
      resolved_key_ = config_.api_key;
      return;
    }
    const char* env = std::getenv(config_.api_key_env.c_str());
    if (env == nullptr || *env == '\0') {
      throw CredentialError("no API key: set " + config_.api_key_env +
                            " or provide one in the gateway config");
    }
    resolved_key_ = env;
  }

  void pace_requests() {
    if (config_.min_request_interval_seconds <= 0.0) return;
    std::unique_lock lock(pace_mutex_);
    const auto now = std::chrono::steady_clock::now();
    const auto interval = std::chrono::duration<double>(config_.min_request_interval_seconds);
    if (last_request_.time_since_epoch().count() != 0) {
      const auto next_allowed = last_request_ + std::chrono::duration_cast<
          std::chrono::steady_clock::duration>(interval);
      if (now < next_allowed) {
        std::this_thread::sleep_for(next_allowed - now);
      }
    }
    last_request_ = std::chrono::steady_clock::now();
  }

  void backoff_sleep(int attempt) const {
    double delay = config_.backoff_base_seconds;
    for (int i = 1; i < attempt; ++i) delay *= 2.0;
    if (delay > config_.backoff_cap_seconds) delay = config_.backoff_cap_seconds;
    if (delay > 0.0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
  }

  static double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  static bool extract_text(const std::string& body, CompletionResult& result) {
    Json j = Json::parse(body, nullptr, false);
    if (j.is_discarded()) return false;
    if (!j.contains("choices") || !j.at("choices").is_array() || j.at("choices").empty()) {
      return false;
    }
    const Json& message = j.at("choices").at(0).value("message", Json::object());
    if (!message.contains("content") || !message.at("content").is_string()) return false;
    result.text = message.at("content").get<std::string>();
    if (result.text.empty()) return false;
    result.response_body = body;
    if (j.contains("usage") && j.at("usage").is_object()) {
      TokenUsage usage;
      usage.prompt_tokens = j.at("usage").value("prompt_tokens", 0LL);
      usage.completion_tokens = j.at("usage").value("completion_tokens", 0LL);
      result.token_usage = usage;
    }
    return true;
  }

  GatewayConfig config_;
  std::shared_ptr<Transport> transport_;
  std::string resolved_key_;
  std::mutex mutex_;
  std::condition_variable capacity_cv_;
  int in_flight_ = 0;
  std::mutex pace_mutex_;
  std::chrono::steady_clock::time_point last_request_{};
};

// ---------------------------------------------------------------------------
// Latency accounting
// ---------------------------------------------------------------------------

struct LatencyStat {
  int decisions = 0;
  double total_seconds = 0.0;
  double mean_seconds() const { return decisions ? total_seconds / decisions : 0.0; }
};

// Mean thinking time per decision, grouped by reasoning-effort label. Only
// gateway-backed decisions carry latency.
inline std::map<std::string, LatencyStat> record_latency_stats(
    const std::vector<GameLog>& logs) {
  std::map<std::string, LatencyStat> stats;
  for (const GameLog& log : logs) {
    for (const GameEvent& event : log.events) {
      const DecisionTrace* trace = nullptr;
      std::visit(
          [&](const auto& e) {
            using E = std::decay_t<decltype(e)>;
            if constexpr (!std::is_same_v<E, AnomalyEvent> &&
                          !std::is_same_v<E, OutcomeEvent> &&
                          !std::is_same_v<E, MissionResultEvent>) {
              if (e.trace) trace = &*e.trace;
            }
          },
          event);
      if (trace != nullptr) {
        LatencyStat& s = stats[trace->effort];
        s.decisions += 1;
        s.total_seconds += trace->latency_seconds;
      }
    }
  }
  return stats;
}

}  // namespace avalon
