#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace avalon;

namespace {
const std::vector<std::string> kRoster = {"Alice", "Bob", "Charlie", "Diana", "Eve"};
}

TEST_CASE("exact-schema payloads parse directly") {
  CHECK(parse_vote_decision(R"({"vote":"approve","comment":"ok"})").vote == Vote::Approve);
  CHECK(parse_vote_decision(R"({"vote":"reject","comment":""})").vote == Vote::Reject);
  CHECK(parse_mission_decision(R"({"action":"fail","reasoning":"why"})").action ==
        MissionAction::Fail);
  const TeamProposal team = parse_team_proposal(R"({"team":["Alice","Bob"],"reasoning":"r"})",
                                                kRoster);
  CHECK(team.team == std::vector<PlayerId>{0, 1});
  CHECK(team.reasoning == "r");
  const AssassinGuess guess = parse_assassin_guess(R"({"guess":"Eve","reasoning":"hmm"})",
                                                   kRoster);
  CHECK(guess.guess == 4);
}

TEST_CASE("the whole wrapped-response corpus parses") {
  const Json corpus = Json::parse(
      testsupport::read_file(testsupport::test_data_dir() / "wrapped_responses.json"));
  REQUIRE(corpus.size() == 20);
  for (const auto& entry : corpus) {
    const std::string kind = entry.at("kind").get<std::string>();
    const std::string raw = entry.at("raw").get<std::string>();
    INFO("raw: " << raw);
    if (kind == "team") {
      const TeamProposal parsed = parse_team_proposal(raw, kRoster);
      std::vector<PlayerId> expected;
      for (const auto& name : entry.at("team")) {
        expected.push_back(resolve_player_name(kRoster, name.get<std::string>()));
      }
      std::sort(expected.begin(), expected.end());
      CHECK(parsed.team == expected);
    } else if (kind == "vote") {
      CHECK(vote_token(parse_vote_decision(raw).vote) == entry.at("vote").get<std::string>());
    } else if (kind == "action") {
      CHECK(action_token(parse_mission_decision(raw).action) ==
            entry.at("action").get<std::string>());
    } else if (kind == "guess") {
      CHECK(kRoster[static_cast<std::size_t>(parse_assassin_guess(raw, kRoster).guess)] ==
            entry.at("guess").get<std::string>());
    } else if (kind == "reflection") {
      const PlayerId self =
          resolve_player_name(kRoster, entry.at("self").get<std::string>());
      const ReflectionPayload parsed = parse_reflection(raw, kRoster, self);
      CHECK(parsed.observations.size() == kRoster.size() - 1);
      CHECK(parsed.observations.count(self) == 0);
    } else {
      FAIL("unknown fixture kind " << kind);
    }
  }
}

TEST_CASE("names outside the roster are invalid references") {
  CHECK_THROWS_AS(parse_team_proposal(R"({"team":["Alice","Zoe"]})", kRoster),
                  InvalidReferenceError);
  CHECK_THROWS_AS(parse_assassin_guess(R"({"guess":"Merlin"})", kRoster),
                  InvalidReferenceError);
  CHECK_THROWS_AS(parse_team_proposal(R"({"team":["Alice","alice"]})", kRoster),
                  InvalidReferenceError);  // duplicate player via case fold
}

TEST_CASE("unparseable responses fail with a parse error") {
  CHECK_THROWS_AS(parse_vote_decision("I approve of this team!"), ParseFailureError);
  CHECK_THROWS_AS(parse_vote_decision(R"({"vote":"maybe"})"), ParseFailureError);
  CHECK_THROWS_AS(parse_team_proposal("no json here", kRoster), ParseFailureError);
  CHECK_THROWS_AS(parse_team_proposal(R"({"team":[]})", kRoster), ParseFailureError);
  CHECK_THROWS_AS(parse_team_proposal(R"({"team":[1,2]})", kRoster), ParseFailureError);
  CHECK_THROWS_AS(parse_mission_decision(R"({"action":"pass"})"), ParseFailureError);
  CHECK_THROWS_AS(parse_reflection(R"({"self_assessment":"x"})", kRoster, 0),
                  ParseFailureError);
}

TEST_CASE("the first schema-matching object wins") {
  const std::string raw =
      R"(first {"vote":"reject","comment":"a"} then {"vote":"approve","comment":"b"})";
  const VoteDecision decision = parse_vote_decision(raw);
  CHECK(decision.vote == Vote::Reject);
  CHECK(decision.comment == "a");

  // A non-matching object ahead of the matching one is skipped.
  const std::string mixed =
      R"({"team":["Alice","Bob"]} and my vote: {"vote":"approve","comment":"c"})";
  CHECK(parse_vote_decision(mixed).vote == Vote::Approve);
}

TEST_CASE("reflections must cover every other player and drop self-entries") {
  const std::string missing =
      R"({"self_assessment":"s","player_observations":{"Bob":"x","Charlie":"y","Diana":"z"}})";
  CHECK_THROWS_AS(parse_reflection(missing, kRoster, 0), ParseFailureError);

  const std::string with_self =
      R"({"self_assessment":"s","player_observations":)"
      R"({"Alice":"me","Bob":"x","Charlie":"y","Diana":"z","Eve":"w"}})";
  const ReflectionPayload parsed = parse_reflection(with_self, kRoster, 0);
  CHECK(parsed.observations.size() == 4);
  CHECK(parsed.observations.count(0) == 0);
  CHECK(parsed.observations.at(1) == "x");
}

TEST_CASE("braces inside strings do not derail the object scanner") {
  const std::string raw =
      R"(note: "{" is tricky. {"vote":"approve","comment":"brace } inside"} done)";
  const VoteDecision decision = parse_vote_decision(raw);
  CHECK(decision.vote == Vote::Approve);
  CHECK(decision.comment == "brace } inside");
}
