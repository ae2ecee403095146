#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "avalon/agents.hpp"
#include "avalon/gateway.hpp"
#include "avalon/tournament.hpp"

namespace avalon {

// ---------------------------------------------------------------------------
// LLM-backed agent
// ---------------------------------------------------------------------------

struct LlmAgentConfig {
  std::string model_id = "gpt-5.1";
  int max_reprompts = 2;  // parse retries before the deterministic fallback
  int max_transport_attempts = 4;
  double timeout_seconds = 0.0;  // 0 -> effort default
};

// Renders Avalon prompts, calls the gateway, and parses the structured reply.
// A malformed reply earns up to `max_reprompts` retries with an error notice
// appended; after that the decision falls back to a deterministic legal
// default and the orchestrator records an anomaly.
class LlmAgent : public Agent {
 public:
  LlmAgent(std::shared_ptr<LlmGateway> gateway, LlmAgentConfig config = {})
      : gateway_(std::move(gateway)), config_(std::move(config)) {}

  std::string kind() const override { return "llm"; }

  TeamProposal propose(const AgentView& view) override {
    std::vector<std::string> available = view.config.roster;
    const std::string instruction = team_proposal_prompt(view.team_size, available);
    return structured_decision<TeamProposal>(
        view, instruction,
        [&](const std::string& raw) {
          TeamProposal p = parse_team_proposal(raw, view.config.roster);
          if (static_cast<int>(p.team.size()) != view.team_size) {
            throw ParseFailureError("team must have exactly " +
                                    std::to_string(view.team_size) + " members");
          }
          return p;
        },
        [&] { return fallback_proposal(view); });
  }

  std::string discuss(const AgentView& view) override {
    return free_text_decision(view, discussion_prompt(view.role));
  }

  VoteDecision vote(const AgentView& view) override {
    return structured_decision<VoteDecision>(
        view, vote_prompt(), [](const std::string& raw) { return parse_vote_decision(raw); },
        [] { return fallback_vote(); });
  }

  MissionDecision mission_act(const AgentView& view) override {
    return structured_decision<MissionDecision>(
        view, mission_action_prompt(),
        [](const std::string& raw) { return parse_mission_decision(raw); },
        [] { return fallback_mission(); });
  }

  std::string conclave(const AgentView& view) override {
    return free_text_decision(view, conclave_prompt());
  }

  AssassinGuess assassinate(const AgentView& view) override {
    return structured_decision<AssassinGuess>(
        view, assassination_prompt(),
        [&](const std::string& raw) { return parse_assassin_guess(raw, view.config.roster); },
        [&] { return fallback_guess(view); });
  }

  ReflectionPayload reflect(const AgentView& view) override {
    return structured_decision<ReflectionPayload>(
        view, reflection_prompt(),
        [&](const std::string& raw) {
          return parse_reflection(raw, view.config.roster, view.self);
        },
        [&] { return fallback_reflection(view); });
  }

  const DecisionTrace* last_trace() const override { return &trace_; }
  bool last_decision_fell_back() const override { return trace_.fallback; }

 private:
  std::string user_text_for(const AgentView& view, const std::string& instruction) const {
    std::string text = render_view_text(view);
    text += "\n" + instruction;
    return text;
  }

  CompletionResult call_gateway(const AgentView& view, const std::string& system_text,
                                const std::string& user_text) {
    CompletionRequest request;
    request.system_text = system_text;
    request.user_text = user_text;
    request.reasoning_effort = view.reasoning_effort;
    request.model_id = config_.model_id;
    request.max_attempts = config_.max_transport_attempts;
    request.timeout_seconds = config_.timeout_seconds;
    return gateway_->complete(request);
  }

  void start_trace(const AgentView& view, const std::string& system_text,
                   const std::string& user_text) {
    trace_ = DecisionTrace{};
    trace_.system_text = system_text;
    trace_.user_text = user_text;
    trace_.model = config_.model_id;
    trace_.effort = effort_token(view.reasoning_effort);
  }

  void absorb_result(const CompletionResult& result) {
    trace_.raw_response = result.text;
    trace_.response_body = result.response_body;
    trace_.latency_seconds += result.latency_seconds;
    trace_.attempts = result.attempt_count;
  }

  std::string free_text_decision(const AgentView& view, const std::string& instruction) {
    const std::string system_text = render_system_text(view);
    const std::string user_text = user_text_for(view, instruction);
    start_trace(view, system_text, user_text);
    const CompletionResult result = call_gateway(view, system_text, user_text);
    absorb_result(result);
    return result.text;
  }

  template <typename T>
  T structured_decision(const AgentView& view, const std::string& instruction,
                        const std::function<T(const std::string&)>& parse,
                        const std::function<T()>& fallback) {
    const std::string system_text = render_system_text(view);
    std::string user_text = user_text_for(view, instruction);
    if (!view.retry_notice.empty()) {
      user_text += "\n\nYour previous response could not be used: " + view.retry_notice +
                   "\nRespond ONLY with a JSON object in the required format.";
    }
    start_trace(view, system_text, user_text);
    for (int round = 0; round <= config_.max_reprompts; ++round) {
      trace_.user_text = user_text;
      trace_.reprompts = round;
      const CompletionResult result = call_gateway(view, system_text, user_text);
      absorb_result(result);
      try {
        return parse(result.text);
      } catch (const AvalonError& e) {
        user_text += "\n\nYour previous response could not be used: " + std::string(e.what()) +
                     "\nRespond ONLY with a JSON object in the required format.";
      }
    }
    trace_.fallback = true;
    return fallback();
  }

  std::shared_ptr<LlmGateway> gateway_;
  LlmAgentConfig config_;
  DecisionTrace trace_;
};

// ---------------------------------------------------------------------------
// Canned transport: a local stand-in for the chat service
// ---------------------------------------------------------------------------

// Produces well-formed responses in the same shapes the prompts ask for, so a
// whole tournament can run with the gateway mocked. Replies are a pure
// function of (seed, request), which keeps offline runs byte-identical.
class CannedLlmTransport : public Transport {
 public:
  explicit CannedLlmTransport(std::uint64_t seed = 0) : seed_(seed) {}

  bool requires_credentials() const override { return false; }

  TransportReply post_chat(const Json& body, double, const std::string&) override {
    std::string system_text, user_text;
    for (const auto& message : body.at("messages")) {
      const std::string role = message.value("role", "");
      if (role == "system") system_text = message.value("content", "");
      if (role == "user") user_text = message.value("content", "");
    }
    const Effort effort = parse_effort_token(body.value("reasoning_effort", "low"));
    Rng rng(mix_seed(seed_, mix_seed(hash_text(system_text), hash_text(user_text))));

    const std::string content = reply_text(system_text, user_text, rng);
    Json response{{"id", "canned-" + std::to_string(rng.next_u64() % 1000000)},
                  {"object", "chat.completion"},
                  {"model", body.value("model", "canned")},
                  {"choices", Json::array({Json{{"index", 0},
                                                {"message", Json{{"role", "assistant"},
                                                                 {"content", content}}},
                                                {"finish_reason", "stop"}}})},
                  {"usage", Json{{"prompt_tokens",
                                  static_cast<long long>(user_text.size() / 4)},
                                 {"completion_tokens",
                                  static_cast<long long>(content.size() / 4)}}}};
    TransportReply reply;
    reply.status = 200;
    reply.body = response.dump();
    reply.synthetic_latency = canned_latency(effort);
    return reply;
  }

  // Matches the per-effort mean thinking times used for latency reports.
  static double canned_latency(Effort effort) {
    switch (effort) {
      case Effort::Low: return 7.5;
      case Effort::Medium: return 37.5;
      case Effort::High: return 107.0;
    }
    return 7.5;
  }

 private:
  static std::uint64_t hash_text(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char c : text) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }

  static std::string find_line_list(const std::string& text, const std::string& marker) {
    const std::size_t at = text.find(marker);
    if (at == std::string::npos) return "";
    const std::size_t start = at + marker.size();
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    return text.substr(start, end - start);
  }

  static std::vector<std::string> split_names(std::string list) {
    // Trim a trailing sentence fragment such as ". Sabotage missions".
    const std::size_t dot = list.find('.');
    if (dot != std::string::npos) list = list.substr(0, dot);
    std::vector<std::string> names;
    std::size_t pos = 0;
    while (pos < list.size()) {
      std::size_t comma = list.find(',', pos);
      if (comma == std::string::npos) comma = list.size();
      std::string name = list.substr(pos, comma - pos);
      while (!name.empty() && name.front() == ' ') name.erase(name.begin());
      while (!name.empty() && (name.back() == ' ' || name.back() == '\n')) name.pop_back();
      if (!name.empty()) names.push_back(name);
      pos = comma + 1;
    }
    return names;
  }

  static std::string self_name_of(const std::string& system_text) {
    const std::string marker = "You are ";
    const std::size_t at = system_text.find(marker);
    if (at == std::string::npos) return "";
    const std::size_t start = at + marker.size();
    const std::size_t end = system_text.find(',', start);
    if (end == std::string::npos) return "";
    return system_text.substr(start, end - start);
  }

  static std::vector<std::string> roster_of(const std::string& system_text) {
    return split_names(find_line_list(system_text, " players: "));
  }

  static std::vector<std::string> teammates_of(const std::string& system_text) {
    std::string list = find_line_list(system_text, "teammates\nare: ");
    if (list.empty()) list = find_line_list(system_text, "teammates are:\n");
    return split_names(list);
  }

  std::string maybe_fence(const std::string& json_text, Rng& rng) const {
    switch (rng.uniform_int(0, 2)) {
      case 0:
        return "```json\n" + json_text + "\n```";
      case 1:
        return "Here is my decision:\n" + json_text;
      default:
        return json_text;
    }
  }

  std::string reply_text(const std::string& system_text, const std::string& user_text,
                         Rng& rng) const {
    const std::vector<std::string> roster = roster_of(system_text);
    const std::string self = self_name_of(system_text);

    if (user_text.find("Propose a team of ") != std::string::npos) {
      int size = 0;
      const std::size_t at = user_text.find("Propose a team of ") + 18;
      for (std::size_t i = at; i < user_text.size() && std::isdigit(static_cast<unsigned char>(
                                                           user_text[i]));
           ++i) {
        size = size * 10 + (user_text[i] - '0');
      }
      std::vector<std::string> pool =
          split_names(find_line_list(user_text, "Available players: "));
      if (pool.empty()) pool = roster;
      Json team = Json::array();
      const int offset = pool.empty() ? 0 : rng.uniform_int(0, static_cast<int>(pool.size()) - 1);
      for (int i = 0; i < size && i < static_cast<int>(pool.size()); ++i) {
        team.push_back(pool[static_cast<std::size_t>((offset + i) % pool.size())]);
      }
      Json j{{"team", team}, {"reasoning", "This group has kept missions on track so far."}};
      return maybe_fence(j.dump(), rng);
    }
    if (user_text.find("Vote on this team proposal") != std::string::npos) {
      const bool approve = rng.uniform_int(0, 3) != 0;  // mostly approve, games must end
      Json j{{"vote", approve ? "approve" : "reject"},
             {"comment", approve ? "Looks workable to me." : "I would rather see a different mix."}};
      return maybe_fence(j.dump(), rng);
    }
    if (user_text.find("'success' or 'fail'") != std::string::npos) {
      const bool fail = rng.coin();
      Json j{{"action", fail ? "fail" : "success"},
             {"reasoning", fail ? "The timing feels right." : "Holding back for now."}};
      return maybe_fence(j.dump(), rng);
    }
    if (user_text.find("choose who you think is Merlin") != std::string::npos) {
      const std::vector<std::string> teammates = teammates_of(system_text);
      std::vector<std::string> candidates;
      for (const std::string& name : roster) {
        if (name == self) continue;
        if (std::find(teammates.begin(), teammates.end(), name) != teammates.end()) continue;
        candidates.push_back(name);
      }
      const std::string guess =
          candidates.empty() ? (roster.empty() ? "Alice" : roster.front())
                             : candidates[static_cast<std::size_t>(
                                   rng.uniform_int(0, static_cast<int>(candidates.size()) - 1))];
      Json j{{"guess", guess},
             {"reasoning", "They spoke carefully and steered the team without standing out."}};
      return maybe_fence(j.dump(), rng);
    }
    if (user_text.find("Reflect on your performance") != std::string::npos) {
      Json observations = Json::object();
      for (const std::string& name : roster) {
        if (name == self) continue;
        observations[name] = observation_line(name, rng);
      }
      Json j{{"self_assessment",
              "I kept my votes consistent and avoided drawing attention; next time I could "
              "push harder on team composition."},
             {"player_observations", observations}};
      return maybe_fence(j.dump(), rng);
    }
    if (user_text.find("Discuss who you think Merlin is") != std::string::npos) {
      return "From my side, the quiet coordination on the winning teams points one way. I "
             "would focus on whoever nudged the safe lineups without ever exposing a read.";
    }
    // Discussion turn: plain conversational text.
    switch (rng.uniform_int(0, 2)) {
      case 0:
        return "I'm comfortable with this team, the record so far backs it up.";
      case 1:
        return "Let's keep the group tight and see how the mission lands.";
      default:
        return "I want to see how the votes line up before changing anything.";
    }
  }

  std::string observation_line(const std::string& name, Rng& rng) const {
    static const std::vector<std::string> descriptors = {
        "cautious", "quiet", "reliable", "subtle", "straightforward", "measured"};
    const std::string& d = descriptors[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(descriptors.size()) - 1))];
    return name + " was " + d + " this game.";
  }

  std::uint64_t seed_;
};

// ---------------------------------------------------------------------------
// Fixture transport: canned responses loaded from a file
// ---------------------------------------------------------------------------

// File format: a JSON array of {"match": <substring of the user prompt>,
// "response": <raw text>}; the first matching entry answers the request.
class FixtureTransport : public Transport {
 public:
  explicit FixtureTransport(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw AvalonError("cannot read fixture file: " + path.string());
    Json j = Json::parse(in);
    for (const auto& entry : j) {
      fixtures_.emplace_back(entry.at("match").get<std::string>(),
                             entry.at("response").get<std::string>());
    }
  }

  bool requires_credentials() const override { return false; }

  TransportReply post_chat(const Json& body, double, const std::string&) override {
    std::string user_text;
    for (const auto& message : body.at("messages")) {
      if (message.value("role", "") == "user") user_text = message.value("content", "");
    }
    for (const auto& [match, response] : fixtures_) {
      if (user_text.find(match) != std::string::npos) {
        Json out{{"object", "chat.completion"},
                 {"model", body.value("model", "fixture")},
                 {"choices",
                  Json::array({Json{{"index", 0},
                                    {"message", Json{{"role", "assistant"},
                                                     {"content", response}}},
                                    {"finish_reason", "stop"}}})}};
        TransportReply reply;
        reply.status = 200;
        reply.body = out.dump();
        reply.synthetic_latency = 0.0;
        return reply;
      }
    }
    TransportReply reply;
    reply.status = 0;
    reply.error = "no fixture matches the request";
    return reply;
  }

 private:
  std::vector<std::pair<std::string, std::string>> fixtures_;
};

// ---------------------------------------------------------------------------
// Factory
// ---------------------------------------------------------------------------

// Fills every seat with a gateway-backed agent. The gateway (and therefore
// its rate limiting) is shared across seats and games.
class LlmAgentFactory : public AgentFactory {
 public:
  LlmAgentFactory(std::shared_ptr<LlmGateway> gateway, LlmAgentConfig config = {},
                  std::string label = "llm")
      : gateway_(std::move(gateway)), config_(std::move(config)), label_(std::move(label)) {}

  std::string label() const override { return label_; }

  std::vector<std::unique_ptr<Agent>> make(const GameSpec&, const GameConfig& config) override {
    std::vector<std::unique_ptr<Agent>> agents;
    for (PlayerId seat = 0; seat < config.player_count; ++seat) {
      agents.push_back(std::make_unique<LlmAgent>(gateway_, config_));
    }
    return agents;
  }

 private:
  std::shared_ptr<LlmGateway> gateway_;
  LlmAgentConfig config_;
  std::string label_;
};

}  // namespace avalon
