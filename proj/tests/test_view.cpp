#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace avalon;

namespace {

const std::vector<std::string> kRoleTokens = {
    "merlin", "percival", "servant", "assassin", "morgana", "mordred", "oberon", "minion"};

bool contains_word(const std::string& text, const std::string& word) {
  return testsupport::oracle_word_count(text, word) > 0;
}

// No role name anywhere, and no good/evil word at all, in the public text.
void check_public_text_hygiene(const std::string& text) {
  for (const std::string& token : kRoleTokens) {
    INFO("token: " << token << "\ntext:\n" << text);
    CHECK_FALSE(contains_word(text, token));
  }
  CHECK_FALSE(contains_word(text, "evil"));
  CHECK_FALSE(contains_word(text, "good"));
}

}  // namespace

TEST_CASE("public history renders proposals, discussion, votes and results") {
  testsupport::RunGameResult result = testsupport::play_scripted_game(5, 99, "honest");
  const std::string history =
      render_public_history(result.log.header.config, result.log.events);
  CHECK(history.find("Mission 1 (team of 2)") != std::string::npos);
  CHECK(history.find("leader Alice proposed: Alice, Bob") != std::string::npos);
  CHECK(history.find("Vote by Alice: approve") != std::string::npos);
  CHECK(history.find("result: SUCCEEDED") != std::string::npos);
  // Secret per-player actions never show up in the shared transcript.
  CHECK(history.find("played") == std::string::npos);
}

TEST_CASE("good non-Merlin views leak no role information") {
  int views_checked = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    for (int count = 5; count <= 10; ++count) {
      RunGameOptions options;
      options.inspector = [&](const AgentView& view, DecisionKind kind) {
        if (kind == DecisionKind::Reflect) return;  // roles legitimately revealed
        if (view.role == RoleKind::Merlin || is_evil(view.role)) return;
        ++views_checked;
        check_public_text_hygiene(render_view_text(view));
      };
      testsupport::play_scripted_game(count, seed * 31 + static_cast<std::uint64_t>(count),
                                      "scripted", options);
    }
  }
  CHECK(views_checked > 500);
}

TEST_CASE("the discussion transcript is identical across all players") {
  std::map<std::string, std::set<std::string>> histories_by_point;
  RunGameOptions options;
  options.inspector = [&](const AgentView& view, DecisionKind kind) {
    if (kind != DecisionKind::Vote) return;
    const std::string key = std::to_string(view.mission) + ":" + std::to_string(view.attempt);
    histories_by_point[key].insert(view.public_history);
  };
  testsupport::play_scripted_game(6, 1234, "scripted", options);
  CHECK_FALSE(histories_by_point.empty());
  for (const auto& [key, variants] : histories_by_point) {
    INFO("decision point " << key);
    CHECK(variants.size() == 1);
  }
}

TEST_CASE("the system side carries the role brief and stays on the system side") {
  RunGameOptions options;
  bool saw_servant = false;
  options.inspector = [&](const AgentView& view, DecisionKind) {
    if (view.role != RoleKind::LoyalServant) return;
    saw_servant = true;
    const std::string system_text = render_system_text(view);
    CHECK(system_text.find("You are on the good team.") != std::string::npos);
    CHECK(render_view_text(view).find("good team") == std::string::npos);
  };
  testsupport::play_scripted_game(5, 7, "scripted", options);
  CHECK(saw_servant);
}

TEST_CASE("reflection views reveal all roles") {
  RunGameOptions options;
  options.memory_mode = MemoryMode::Full;
  const GameConfig config = build_config(5);
  ScriptedAgentFactory factory("honest");
  GameSpec spec;
  spec.player_count = 5;
  spec.seed = 3;
  std::vector<std::unique_ptr<Agent>> agents = factory.make(spec, config);
  MemoryStore memory;
  options.seed = 3;
  bool saw_reveal = false;
  options.inspector = [&](const AgentView& view, DecisionKind kind) {
    if (kind != DecisionKind::Reflect) return;
    saw_reveal = true;
    REQUIRE(view.revealed_roles.has_value());
    const std::string text = render_view_text(view);
    CHECK(text.find("all roles are revealed") != std::string::npos);
    CHECK(text.find("Merlin") != std::string::npos);
  };
  run_game(config, agents, &memory, options);
  CHECK(saw_reveal);
}
