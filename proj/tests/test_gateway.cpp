#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <thread>

#include "avalon/http_transport.hpp"
#include "support.hpp"

using namespace avalon;
using testsupport::SequenceTransport;

namespace {

CompletionRequest simple_request() {
  CompletionRequest request;
  request.system_text = "system";
  request.user_text = "user";
  request.model_id = "test-model";
  request.max_attempts = 4;
  return request;
}

LlmGateway make_gateway(std::shared_ptr<Transport> transport) {
  GatewayConfig config;
  config.backoff_base_seconds = 0.0;
  return LlmGateway(std::move(config), std::move(transport));
}

}  // namespace

TEST_CASE("a successful completion returns text, latency and usage") {
  auto transport = std::make_shared<SequenceTransport>(
      std::vector<TransportReply>{SequenceTransport::ok_reply("ok", 7.5)});
  LlmGateway gateway = make_gateway(transport);
  const CompletionResult result = gateway.complete(simple_request());
  CHECK(result.text == "ok");
  CHECK(result.attempt_count == 1);
  CHECK(result.latency_seconds == 7.5);
  REQUIRE(result.token_usage.has_value());
  CHECK(result.token_usage->prompt_tokens == 10);
  // The outbound body carries model, effort and both messages.
  CHECK(transport->last_body.at("model") == "test-model");
  CHECK(transport->last_body.at("reasoning_effort") == "low");
  CHECK(transport->last_body.at("messages").size() == 2);
}

TEST_CASE("transient failures are retried until success") {
  auto transport = std::make_shared<SequenceTransport>(std::vector<TransportReply>{
      SequenceTransport::network_error(),
      SequenceTransport::error_reply(503),
      SequenceTransport::ok_reply("recovered"),
  });
  LlmGateway gateway = make_gateway(transport);
  const CompletionResult result = gateway.complete(simple_request());
  CHECK(result.text == "recovered");
  CHECK(result.attempt_count == 3);
  CHECK(transport->calls == 3);
}

TEST_CASE("rate limiting (429) is retried like a transient failure") {
  auto transport = std::make_shared<SequenceTransport>(std::vector<TransportReply>{
      SequenceTransport::error_reply(429),
      SequenceTransport::ok_reply("after limit"),
  });
  LlmGateway gateway = make_gateway(transport);
  CHECK(gateway.complete(simple_request()).attempt_count == 2);
}

TEST_CASE("exhausted attempts raise gateway-unavailable") {
  auto transport = std::make_shared<SequenceTransport>(
      std::vector<TransportReply>{SequenceTransport::network_error("down")});
  LlmGateway gateway = make_gateway(transport);
  CompletionRequest request = simple_request();
  request.max_attempts = 3;
  CHECK_THROWS_AS(gateway.complete(request), GatewayUnavailableError);
  CHECK(transport->calls == 3);
}

TEST_CASE("auth rejections become credential errors without retry") {
  ::setenv("AVALON_TEST_KEY", "k-123", 1);
  auto transport = std::make_shared<SequenceTransport>(
      std::vector<TransportReply>{SequenceTransport::error_reply(401)}, true);
  GatewayConfig config;
  config.api_key_env = "AVALON_TEST_KEY";
  config.backoff_base_seconds = 0.0;
  LlmGateway gateway(config, transport);
  CHECK_THROWS_AS(gateway.complete(simple_request()), CredentialError);
  CHECK(transport->calls == 1);
  CHECK(transport->last_bearer == "k-123");
}

TEST_CASE("a missing credential fails before any network call") {
  ::unsetenv("AVALON_TEST_MISSING_KEY");
  auto transport = std::make_shared<SequenceTransport>(
      std::vector<TransportReply>{SequenceTransport::ok_reply("never sent")}, true);
  GatewayConfig config;
  config.api_key_env = "AVALON_TEST_MISSING_KEY";
  LlmGateway gateway(config, transport);
  CHECK_THROWS_AS(gateway.complete(simple_request()), CredentialError);
  CHECK(transport->calls == 0);
}

TEST_CASE("permanent client errors are not retried") {
  auto transport = std::make_shared<SequenceTransport>(
      std::vector<TransportReply>{SequenceTransport::error_reply(400, "bad request")});
  LlmGateway gateway = make_gateway(transport);
  CHECK_THROWS_AS(gateway.complete(simple_request()), GatewayUnavailableError);
  CHECK(transport->calls == 1);
}

TEST_CASE("malformed completion bodies count as transient failures") {
  TransportReply junk;
  junk.status = 200;
  junk.body = "{\"not\": \"a completion\"}";
  junk.synthetic_latency = 0.0;
  auto transport = std::make_shared<SequenceTransport>(
      std::vector<TransportReply>{junk, SequenceTransport::ok_reply("fine")});
  LlmGateway gateway = make_gateway(transport);
  const CompletionResult result = gateway.complete(simple_request());
  CHECK(result.text == "fine");
  CHECK(result.attempt_count == 2);
}

TEST_CASE("timeouts default by effort level") {
  CHECK(effort_default_timeout(Effort::Low) == 60.0);
  CHECK(effort_default_timeout(Effort::Medium) == 180.0);
  CHECK(effort_default_timeout(Effort::High) == 300.0);
}

TEST_CASE("latency stats aggregate per effort level") {
  auto make_log_with_latency = [](const std::string& effort, std::vector<double> latencies) {
    GameLog log = testsupport::synthetic_log(1, 5, effort);
    for (double latency : latencies) {
      DecisionTrace trace;
      trace.effort = effort;
      trace.latency_seconds = latency;
      log.events.push_back(DiscussionEvent{1, 1, 0, "text", trace});
    }
    return log;
  };
  SECTION("single low decision of 7.5 seconds") {
    const auto stats = record_latency_stats({make_log_with_latency("low", {7.5})});
    REQUIRE(stats.count("low"));
    CHECK(stats.at("low").mean_seconds() == Catch::Approx(7.5));
  }
  SECTION("empty logs produce an empty report") {
    CHECK(record_latency_stats({}).empty());
    CHECK(record_latency_stats({testsupport::synthetic_log(1)}).empty());
  }
  SECTION("two high decisions of 100 and 114 seconds average to 107") {
    const auto stats = record_latency_stats({make_log_with_latency("high", {100.0, 114.0})});
    REQUIRE(stats.count("high"));
    CHECK(stats.at("high").decisions == 2);
    CHECK(stats.at("high").mean_seconds() == Catch::Approx(107.0));
  }
}

TEST_CASE("the in-flight cap admits concurrent completions safely") {
  auto transport = std::make_shared<SequenceTransport>(
      std::vector<TransportReply>{SequenceTransport::ok_reply("shared")});
  GatewayConfig config;
  config.max_in_flight = 2;
  config.backoff_base_seconds = 0.0;
  LlmGateway gateway(config, transport);
  std::vector<std::thread> threads;
  std::atomic<int> done{0};
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      if (gateway.complete(simple_request()).text == "shared") ++done;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(done == 8);
  CHECK(transport->calls == 8);
}

TEST_CASE("http transport round-trips against a local server") {
  httplib::Server server;
  std::string seen_auth, seen_path;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_path = req.path;
    Json body{{"choices", Json::array({Json{{"message", Json{{"role", "assistant"},
                                                             {"content", "hello"}}}}})}};
    res.set_content(body.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpTransport transport("http://127.0.0.1:" + std::to_string(port) + "/v1");
  const TransportReply reply = transport.post_chat(Json{{"model", "m"}}, 5.0, "secret-key");
  server.stop();
  server_thread.join();

  CHECK(reply.status == 200);
  CHECK(seen_auth == "Bearer secret-key");
  CHECK(seen_path == "/v1/chat/completions");
  CHECK(reply.body.find("hello") != std::string::npos);
}
