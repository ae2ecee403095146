#pragma once

// Shared helpers for the test suites: scripted game runners, synthetic log
// builders, independent text-counting oracles, and a scriptable transport.

#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unistd.h>
#include <vector>

#include "avalon/analysis.hpp"
#include "avalon/llm_agent.hpp"
#include "avalon/replay.hpp"
#include "avalon/tournament.hpp"

namespace testsupport {

using namespace avalon;

inline std::filesystem::path test_data_dir() {
#ifdef AVALON_TEST_DATA_DIR
  return AVALON_TEST_DATA_DIR;
#else
  return "tests/data";
#endif
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("avalon_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Game runners
// ---------------------------------------------------------------------------

inline RunGameResult play_scripted_game(int player_count, std::uint64_t seed,
                                        const std::string& kind = "scripted",
                                        RunGameOptions options = {},
                                        BotSpeechConfig speech = {}) {
  const GameConfig config = build_config(player_count);
  ScriptedAgentFactory factory(kind, speech);
  GameSpec spec;
  spec.game_id = options.game_id;
  spec.player_count = player_count;
  spec.seed = seed;
  std::vector<std::unique_ptr<Agent>> agents = factory.make(spec, config);
  options.seed = seed;
  options.agents_label = kind;
  return run_game(config, agents, nullptr, options);
}

// 5p roles with evil at the given seats (assassin first, then a minion).
inline std::vector<RoleKind> roles_5p_evil_at(PlayerId assassin, PlayerId minion) {
  std::vector<RoleKind> roles(5, RoleKind::LoyalServant);
  roles[static_cast<std::size_t>(assassin)] = RoleKind::Assassin;
  roles[static_cast<std::size_t>(minion)] = RoleKind::Minion;
  for (PlayerId p = 0; p < 5; ++p) {
    if (p != assassin && p != minion) {
      roles[static_cast<std::size_t>(p)] = RoleKind::Merlin;
      break;
    }
  }
  return roles;
}

// ---------------------------------------------------------------------------
// Synthetic logs for the analysis suites
// ---------------------------------------------------------------------------

inline GameLog synthetic_log(int game_id, int player_count = 5,
                             const std::string& effort = "low",
                             const std::string& memory = "full") {
  GameLog log;
  log.header.tournament_id = "fixture";
  log.header.game_id = game_id;
  log.header.seed = static_cast<std::uint64_t>(game_id);
  log.header.preset = "fixture";
  log.header.memory_mode = memory;
  log.header.effort = effort;
  log.header.agents = "fixture";
  log.header.config = build_config(player_count);
  log.header.roles = log.header.config.roles;  // canonical order; override as needed
  return log;
}

inline void add_reflection(GameLog& log, PlayerId author,
                           const std::map<std::string, Observation>& observations,
                           const std::string& self_assessment = "") {
  ReflectionEvent event;
  event.author = author;
  event.author_role = log.header.roles[static_cast<std::size_t>(author)];
  event.self_assessment = self_assessment;
  event.observations = observations;
  log.events.push_back(event);
}

// Appends an approved proposal: votes are unanimous approvals.
inline void add_approved_team(GameLog& log, int mission, int attempt, PlayerId leader,
                              const std::vector<PlayerId>& team) {
  log.events.push_back(ProposalEvent{mission, attempt, leader, team, "", std::nullopt});
  for (PlayerId voter = 0; voter < log.header.config.player_count; ++voter) {
    log.events.push_back(VoteEvent{mission, attempt, voter, Vote::Approve, "", std::nullopt});
  }
}

inline void add_mission_actions(GameLog& log, int mission,
                                const std::map<PlayerId, MissionAction>& actions) {
  int fails = 0;
  std::vector<PlayerId> team;
  for (const auto& [player, action] : actions) {
    team.push_back(player);
    if (action == MissionAction::Fail) ++fails;
    log.events.push_back(MissionActionEvent{mission, player, action, std::nullopt});
  }
  const int threshold = fail_threshold(log.header.config, mission);
  log.events.push_back(MissionResultEvent{
      mission, team, fails, fails >= threshold ? MissionResult::Fail : MissionResult::Success});
}

inline void add_outcome(GameLog& log, Team winner, WinMethod via,
                        std::optional<PlayerId> guess = std::nullopt) {
  GameOutcome outcome;
  outcome.winner = winner;
  outcome.via = via;
  outcome.assassin_guess = guess;
  for (PlayerId p = 0; p < log.header.config.player_count; ++p) {
    if (log.header.roles[static_cast<std::size_t>(p)] == RoleKind::Merlin) outcome.merlin = p;
  }
  log.events.push_back(OutcomeEvent{outcome});
  log.outcome = outcome;
}

// ---------------------------------------------------------------------------
// Independent oracles (no shared code with the library implementations)
// ---------------------------------------------------------------------------

// Tokenize on every non-alphanumeric character and count exact token matches.
inline int oracle_word_count(const std::string& text, const std::string& word) {
  std::string lowered;
  lowered.reserve(text.size());
  for (char c : text) {
    lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  std::vector<std::string> tokens;
  std::string current;
  for (char c : lowered) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current += c;
    } else if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(current);
  int count = 0;
  for (const std::string& token : tokens) {
    if (token == word) ++count;
  }
  return count;
}

// Naive substring containment (used both as the cross-game-reference oracle
// and to document the whole-word/substring difference).
inline bool oracle_contains_phrase(const std::string& text, const std::string& phrase) {
  std::string lowered;
  for (char c : text) {
    lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return lowered.find(phrase) != std::string::npos;
}

// Sleeper scan re-derived from raw events, independently of detect_sleeper.
inline bool oracle_sleeper(const GameLog& log, const std::set<int>& early = {1, 2}) {
  struct Act {
    int mission;
    PlayerId player;
    MissionAction action;
  };
  std::vector<Act> acts;
  for (const GameEvent& event : log.events) {
    if (const auto* a = std::get_if<MissionActionEvent>(&event)) {
      acts.push_back({a->mission, a->player, a->action});
    }
  }
  auto evil = [&](PlayerId p) {
    return is_evil(log.header.roles[static_cast<std::size_t>(p)]);
  };
  for (const Act& pass : acts) {
    if (!early.count(pass.mission) || pass.action != MissionAction::Success ||
        !evil(pass.player)) {
      continue;
    }
    for (const Act& fail : acts) {
      if (fail.mission > pass.mission && fail.action == MissionAction::Fail &&
          evil(fail.player)) {
        return true;
      }
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Scriptable transport for gateway tests
// ---------------------------------------------------------------------------

class SequenceTransport : public Transport {
 public:
  explicit SequenceTransport(std::vector<TransportReply> replies, bool needs_credentials = false)
      : replies_(std::move(replies)), needs_credentials_(needs_credentials) {}

  bool requires_credentials() const override { return needs_credentials_; }

  TransportReply post_chat(const Json& body, double, const std::string& bearer) override {
    last_body = body;
    last_bearer = bearer;
    ++calls;
    if (replies_.empty()) {
      TransportReply reply;
      reply.status = 0;
      reply.error = "sequence exhausted";
      return reply;
    }
    TransportReply reply = replies_.front();
    if (replies_.size() > 1) replies_.erase(replies_.begin());
    return reply;
  }

  static TransportReply ok_reply(const std::string& content, double latency = 0.0) {
    Json body{{"choices", Json::array({Json{{"message", Json{{"role", "assistant"},
                                                             {"content", content}}}}})},
              {"usage", Json{{"prompt_tokens", 10}, {"completion_tokens", 5}}}};
    TransportReply reply;
    reply.status = 200;
    reply.body = body.dump();
    reply.synthetic_latency = latency;
    return reply;
  }

  static TransportReply error_reply(int status, const std::string& body = "") {
    TransportReply reply;
    reply.status = status;
    reply.body = body;
    reply.synthetic_latency = 0.0;
    return reply;
  }

  static TransportReply network_error(const std::string& detail = "connection refused") {
    TransportReply reply;
    reply.status = 0;
    reply.error = detail;
    return reply;
  }

  int calls = 0;
  Json last_body;
  std::string last_bearer;

 private:
  std::vector<TransportReply> replies_;
  bool needs_credentials_;
};

}  // namespace testsupport
