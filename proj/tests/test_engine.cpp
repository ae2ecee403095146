#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace avalon;
using testsupport::roles_5p_evil_at;

namespace {

std::map<PlayerId, Vote> ballot_with_approvals(int player_count, int approvals) {
  std::map<PlayerId, Vote> votes;
  for (PlayerId p = 0; p < player_count; ++p) {
    votes[p] = p < approvals ? Vote::Approve : Vote::Reject;
  }
  return votes;
}

GameState fresh_state(int player_count, const std::vector<RoleKind>& roles) {
  GameState state = new_game(build_config(player_count), roles);
  end_night(state);
  return state;
}

std::vector<PlayerId> seats_from(PlayerId first, int size, int player_count) {
  std::vector<PlayerId> team;
  for (int i = 0; i < size; ++i) team.push_back((first + i) % player_count);
  std::sort(team.begin(), team.end());
  return team;
}

}  // namespace

TEST_CASE("role assignment is deterministic per seed and uniform across seats") {
  const GameConfig config = build_config(5);
  {
    Rng a(12345), b(12345);
    CHECK(assign_roles(config, a) == assign_roles(config, b));
  }
  {
    // 10,000 draws: each seat should be Merlin in 20% +- 1.5% of draws.
    std::array<int, 5> merlin_count{};
    Rng rng(777);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      const std::vector<RoleKind> roles = assign_roles(config, rng);
      for (PlayerId p = 0; p < 5; ++p) {
        if (roles[static_cast<std::size_t>(p)] == RoleKind::Merlin) merlin_count[
            static_cast<std::size_t>(p)]++;
      }
    }
    for (PlayerId p = 0; p < 5; ++p) {
      const double share = merlin_count[static_cast<std::size_t>(p)] / static_cast<double>(draws);
      INFO("seat " << p << " share " << share);
      CHECK(share == Catch::Approx(0.20).margin(0.015));
    }
  }
  {
    // Any 8-player draw has exactly 3 evil players.
    const GameConfig eight = build_config(8);
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
      const std::vector<RoleKind> roles = assign_roles(eight, rng);
      CHECK(std::count_if(roles.begin(), roles.end(), [](RoleKind r) { return is_evil(r); }) ==
            3);
    }
  }
}

TEST_CASE("night knowledge at 5 players") {
  // Merlin 0, Assassin 1, Minion 3.
  std::vector<RoleKind> roles = {RoleKind::Merlin, RoleKind::Assassin, RoleKind::LoyalServant,
                                 RoleKind::Minion, RoleKind::LoyalServant};
  const auto knowledge = night_knowledge(roles);
  CHECK(knowledge[0].known_evil == std::set<PlayerId>{1, 3});
  CHECK(knowledge[1].evil_teammates == std::set<PlayerId>{3});
  CHECK(knowledge[3].evil_teammates == std::set<PlayerId>{1});
  CHECK(knowledge[2].empty());
  CHECK(knowledge[4].empty());
}

TEST_CASE("night knowledge hides Mordred from Merlin and isolates Oberon") {
  // 7p: Merlin 0, Percival 1, servants 2-3, Morgana 4, Mordred 5, Oberon 6.
  std::vector<RoleKind> roles = {RoleKind::Merlin,  RoleKind::Percival, RoleKind::LoyalServant,
                                 RoleKind::LoyalServant, RoleKind::Morgana, RoleKind::Mordred,
                                 RoleKind::Oberon};
  const auto knowledge = night_knowledge(roles);
  CHECK(knowledge[0].known_evil == std::set<PlayerId>{4, 6});  // no Mordred
  CHECK(knowledge[1].merlin_candidates == std::set<PlayerId>{0, 4});
  CHECK(knowledge[4].evil_teammates == std::set<PlayerId>{5});  // no Oberon
  CHECK(knowledge[5].evil_teammates == std::set<PlayerId>{4});
  CHECK(knowledge[6].evil_teammates.empty());
  for (PlayerId p = 0; p < 7; ++p) {
    CHECK(knowledge[static_cast<std::size_t>(p)].evil_teammates.count(6) == 0);
  }
}

TEST_CASE("night knowledge matrix holds over random assignments at every count") {
  for (int count = 5; count <= 10; ++count) {
    const GameConfig config = build_config(count);
    Rng rng(1000 + static_cast<std::uint64_t>(count));
    for (int i = 0; i < 200; ++i) {
      const std::vector<RoleKind> roles = assign_roles(config, rng);
      const auto knowledge = night_knowledge(roles);
      for (PlayerId p = 0; p < count; ++p) {
        const RoleKind role = roles[static_cast<std::size_t>(p)];
        const NightKnowledge& k = knowledge[static_cast<std::size_t>(p)];
        if (role == RoleKind::Merlin) {
          for (PlayerId q = 0; q < count; ++q) {
            const RoleKind qr = roles[static_cast<std::size_t>(q)];
            CHECK(k.known_evil.count(q) ==
                  static_cast<std::size_t>(is_evil(qr) && qr != RoleKind::Mordred));
          }
        } else if (role == RoleKind::Percival) {
          std::set<PlayerId> expected;
          for (PlayerId q = 0; q < count; ++q) {
            const RoleKind qr = roles[static_cast<std::size_t>(q)];
            if (qr == RoleKind::Merlin || qr == RoleKind::Morgana) expected.insert(q);
          }
          CHECK(k.merlin_candidates == expected);
        } else if (role == RoleKind::Oberon) {
          CHECK(k.empty());
        } else if (is_evil(role)) {
          for (PlayerId q = 0; q < count; ++q) {
            const RoleKind qr = roles[static_cast<std::size_t>(q)];
            CHECK(k.evil_teammates.count(q) ==
                  static_cast<std::size_t>(q != p && is_evil(qr) && qr != RoleKind::Oberon));
          }
        } else {
          CHECK(k.empty());
        }
      }
    }
  }
}

TEST_CASE("strict majority approves, ties reject and rotate leadership") {
  {
    GameState state = fresh_state(5, roles_5p_evil_at(1, 3));
    record_proposal(state, {0, 1}, "");
    finish_discussion(state);
    resolve_vote(state, ballot_with_approvals(5, 3));
    CHECK(state.current_proposal().approved);
    CHECK_FALSE(state.current_proposal().auto_approved);
    CHECK(state.phase == Phase::Mission);
    CHECK(state.rejection_streak == 0);
  }
  {
    // 6p, 3-3 tie: not a majority.
    std::vector<RoleKind> roles = build_config(6).roles;
    GameState state = fresh_state(6, roles);
    record_proposal(state, {0, 1}, "");
    finish_discussion(state);
    resolve_vote(state, ballot_with_approvals(6, 3));
    CHECK_FALSE(state.proposals.back().approved);
    CHECK(state.leader == 1);
    CHECK(state.rejection_streak == 1);
    CHECK(state.phase == Phase::Proposal);
  }
}

TEST_CASE("the fifth proposal auto-approves even against unanimous rejection") {
  GameState state = fresh_state(5, roles_5p_evil_at(1, 3));
  for (int attempt = 1; attempt <= 4; ++attempt) {
    record_proposal(state, seats_from(state.leader, 2, 5), "");
    finish_discussion(state);
    resolve_vote(state, ballot_with_approvals(5, 0));
    CHECK_FALSE(state.proposals.back().approved);
  }
  CHECK(state.rejection_streak == 4);
  CHECK(state.current_attempt() == 5);
  record_proposal(state, seats_from(state.leader, 2, 5), "");
  finish_discussion(state);
  resolve_vote(state, ballot_with_approvals(5, 0));
  const ProposalRecord& fifth = state.proposals.back();
  CHECK(fifth.approved);
  CHECK(fifth.auto_approved);
  CHECK(fifth.attempt == 5);
  CHECK(fifth.votes.size() == 5);  // the ignored ballot is still recorded
  CHECK(state.phase == Phase::Mission);
  CHECK(state.rejection_streak == 0);
}

TEST_CASE("incomplete or out-of-range ballots are rejected") {
  GameState state = fresh_state(5, roles_5p_evil_at(1, 3));
  record_proposal(state, {0, 1}, "");
  finish_discussion(state);
  std::map<PlayerId, Vote> short_ballot = ballot_with_approvals(5, 3);
  short_ballot.erase(4);
  CHECK_THROWS_AS(resolve_vote(state, short_ballot), IncompleteBallotError);
  std::map<PlayerId, Vote> bad_ballot = ballot_with_approvals(5, 3);
  bad_ballot.erase(4);
  bad_ballot[7] = Vote::Approve;
  CHECK_THROWS_AS(resolve_vote(state, bad_ballot), IncompleteBallotError);
}

TEST_CASE("leadership is a pure rotation under rejections") {
  for (int count = 5; count <= 10; ++count) {
    GameState state = fresh_state(count, build_config(count).roles);
    const PlayerId initial = state.leader;
    for (int k = 1; k <= 4; ++k) {
      record_proposal(state, seats_from(state.leader, state.config.mission_size(1), count),
                      "");
      finish_discussion(state);
      resolve_vote(state, ballot_with_approvals(count, 0));
      CHECK(state.leader == (initial + k) % count);
      CHECK(state.rejection_streak == k);
    }
  }
}

TEST_CASE("mission resolution follows the fail threshold") {
  {
    GameState state = fresh_state(5, roles_5p_evil_at(1, 3));
    record_proposal(state, {0, 2}, "");
    finish_discussion(state);
    resolve_vote(state, ballot_with_approvals(5, 5));
    resolve_mission(state, {{0, MissionAction::Success}, {2, MissionAction::Success}});
    CHECK(state.missions.back().result == MissionResult::Success);
    CHECK(state.missions.back().fail_count == 0);
  }
  {
    GameState state = fresh_state(5, roles_5p_evil_at(1, 3));
    record_proposal(state, {0, 1}, "");
    finish_discussion(state);
    resolve_vote(state, ballot_with_approvals(5, 5));
    resolve_mission(state, {{0, MissionAction::Success}, {1, MissionAction::Fail}});
    CHECK(state.missions.back().result == MissionResult::Fail);
    CHECK(state.leader == 1);  // leader advanced after the mission
  }
}

TEST_CASE("one fail passes mission 4 in an 8-player game") {
  // Mission 4 with 7+ players needs two fails.
  GameConfig config = build_config(8);
  GameState state = new_game(config, config.roles);
  end_night(state);
  // Fast-forward: two successes, one fail, using legal teams.
  auto play_mission = [&](int fails_wanted) {
    const int size = config.mission_size(state.current_mission());
    std::vector<PlayerId> team;
    std::vector<PlayerId> evil = state.evil_seats();
    std::vector<PlayerId> good = state.good_seats();
    for (int i = 0; i < fails_wanted; ++i) team.push_back(evil[static_cast<std::size_t>(i)]);
    for (PlayerId p : good) {
      if (static_cast<int>(team.size()) < size) team.push_back(p);
    }
    std::sort(team.begin(), team.end());
    record_proposal(state, team, "");
    finish_discussion(state);
    resolve_vote(state, ballot_with_approvals(8, 8));
    std::map<PlayerId, MissionAction> actions;
    int fails_left = fails_wanted;
    for (PlayerId p : team) {
      if (is_evil(state.role_of(p)) && fails_left > 0) {
        actions[p] = MissionAction::Fail;
        --fails_left;
      } else {
        actions[p] = MissionAction::Success;
      }
    }
    resolve_mission(state, actions);
  };
  play_mission(0);
  play_mission(0);
  play_mission(1);  // mission 3: one fail fails it
  CHECK(state.fails() == 1);
  CHECK(state.current_mission() == 4);
  play_mission(1);  // mission 4: one fail is under the 2-fail threshold
  CHECK(state.missions.back().result == MissionResult::Success);
  CHECK(state.missions.back().fail_count == 1);
}

TEST_CASE("the engine rejects a Fail card from a good player") {
  GameState state = fresh_state(5, roles_5p_evil_at(1, 3));
  record_proposal(state, {0, 2}, "");
  finish_discussion(state);
  resolve_vote(state, ballot_with_approvals(5, 5));
  CHECK_THROWS_AS(
      resolve_mission(state, {{0, MissionAction::Fail}, {2, MissionAction::Success}}),
      IllegalActionError);
}

TEST_CASE("mission actions must cover exactly the approved team") {
  GameState state = fresh_state(5, roles_5p_evil_at(1, 3));
  record_proposal(state, {0, 1}, "");
  finish_discussion(state);
  resolve_vote(state, ballot_with_approvals(5, 5));
  CHECK_THROWS_AS(resolve_mission(state, {{0, MissionAction::Success}}), RuleViolationError);
  CHECK_THROWS_AS(resolve_mission(state, {{0, MissionAction::Success},
                                          {1, MissionAction::Success},
                                          {2, MissionAction::Success}}),
                  RuleViolationError);
}

TEST_CASE("pure mission rule matches brute force for all action vectors") {
  for (int size = 1; size <= 5; ++size) {
    for (int threshold = 1; threshold <= 2; ++threshold) {
      for (int bits = 0; bits < (1 << size); ++bits) {
        int fails = 0;
        for (int i = 0; i < size; ++i) {
          if (bits & (1 << i)) ++fails;
        }
        const MissionResult expected =
            fails >= threshold ? MissionResult::Fail : MissionResult::Success;
        CHECK(mission_result_for(fails, threshold) == expected);
      }
    }
  }
}

TEST_CASE("three fails end the game for evil") {
  GameState state = fresh_state(5, roles_5p_evil_at(0, 1));
  auto fail_mission = [&] {
    const int size = state.config.mission_size(state.current_mission());
    std::vector<PlayerId> team = seats_from(0, size, 5);  // includes evil seat 0
    record_proposal(state, team, "");
    finish_discussion(state);
    resolve_vote(state, ballot_with_approvals(5, 5));
    std::map<PlayerId, MissionAction> actions;
    for (PlayerId p : team) {
      actions[p] = is_evil(state.role_of(p)) ? MissionAction::Fail : MissionAction::Success;
    }
    resolve_mission(state, actions);
  };
  fail_mission();
  CHECK(check_victory(state) == VictoryCheck::Continue);
  fail_mission();
  CHECK(state.phase != Phase::Ended);
  fail_mission();
  CHECK(state.phase == Phase::Ended);
  REQUIRE(state.outcome.has_value());
  CHECK(state.outcome->winner == Team::Evil);
  CHECK(state.outcome->via == WinMethod::ThreeFails);
  CHECK_FALSE(state.outcome->assassin_guess.has_value());
}

TEST_CASE("three successes lead to the conclave and assassination") {
  GameState state = fresh_state(5, roles_5p_evil_at(1, 3));  // Merlin at 0
  auto pass_mission = [&] {
    const int size = state.config.mission_size(state.current_mission());
    std::vector<PlayerId> team = seats_from(0, size, 5);
    record_proposal(state, team, "");
    finish_discussion(state);
    resolve_vote(state, ballot_with_approvals(5, 5));
    std::map<PlayerId, MissionAction> actions;
    for (PlayerId p : team) actions[p] = MissionAction::Success;
    resolve_mission(state, actions);
  };
  pass_mission();
  pass_mission();
  CHECK(check_victory(state) == VictoryCheck::Continue);
  pass_mission();
  CHECK(check_victory(state) == VictoryCheck::PendingAssassination);
  CHECK(state.phase == Phase::EvilConclave);
  CHECK_FALSE(state.outcome.has_value());  // not decided yet

  begin_assassination(state);
  SECTION("guessing Merlin wins for evil") {
    const GameOutcome outcome = resolve_assassination(state, 0);
    CHECK(outcome.winner == Team::Evil);
    CHECK(outcome.via == WinMethod::Assassination);
    CHECK(outcome.assassin_guess == 0);
    CHECK(outcome.merlin == 0);
  }
  SECTION("guessing a servant keeps the win for good") {
    const GameOutcome outcome = resolve_assassination(state, 2);
    CHECK(outcome.winner == Team::Good);
    CHECK(outcome.via == WinMethod::ThreeSuccesses);
    CHECK(outcome.assassin_guess == 2);
  }
  SECTION("naming an evil seat is an illegal guess") {
    CHECK_THROWS_AS(resolve_assassination(state, 3), IllegalGuessError);
    CHECK_THROWS_AS(resolve_assassination(state, 9), IllegalGuessError);
  }
}

TEST_CASE("proposals validate size, duplicates and range") {
  GameState state = fresh_state(5, roles_5p_evil_at(1, 3));
  CHECK_THROWS_AS(record_proposal(state, {0}, ""), RuleViolationError);
  CHECK_THROWS_AS(record_proposal(state, {0, 0}, ""), RuleViolationError);
  CHECK_THROWS_AS(record_proposal(state, {0, 5}, ""), RuleViolationError);
  CHECK_THROWS_AS(record_proposal(state, {0, 1, 2}, ""), RuleViolationError);
  record_proposal(state, {4, 0}, "ok");
  CHECK(state.current_proposal().team == std::vector<PlayerId>{0, 4});
}

TEST_CASE("phase guards reject out-of-order operations") {
  GameState state = new_game(build_config(5), roles_5p_evil_at(1, 3));
  CHECK(state.phase == Phase::Night);
  CHECK_THROWS_AS(record_proposal(state, {0, 1}, ""), RuleViolationError);
  end_night(state);
  CHECK_THROWS_AS(resolve_vote(state, ballot_with_approvals(5, 5)), RuleViolationError);
  CHECK_THROWS_AS(begin_assassination(state), RuleViolationError);
}

TEST_CASE("role assignment mismatches are rejected at game start") {
  const GameConfig config = build_config(5);
  std::vector<RoleKind> wrong = config.roles;
  wrong[0] = RoleKind::Oberon;
  CHECK_THROWS_AS(new_game(config, wrong), RuleViolationError);
  CHECK_THROWS_AS(new_game(config, std::vector<RoleKind>(4, RoleKind::LoyalServant)),
                  RuleViolationError);
}
