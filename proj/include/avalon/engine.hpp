#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "avalon/config.hpp"
#include "avalon/core.hpp"

namespace avalon {

// ---------------------------------------------------------------------------
// Night knowledge
// ---------------------------------------------------------------------------

// Role-dependent private information handed out before play.
struct NightKnowledge {
  PlayerId owner = 0;
  std::set<PlayerId> known_evil;         // Merlin: all evil except Mordred
  std::set<PlayerId> evil_teammates;     // evil (except Oberon): other evil except Oberon
  std::set<PlayerId> merlin_candidates;  // Percival: {Merlin, Morgana}

  bool empty() const {
    return known_evil.empty() && evil_teammates.empty() && merlin_candidates.empty();
  }
  bool operator==(const NightKnowledge&) const = default;
};

// Uniformly random seat->role assignment drawn from the config's multiset.
inline std::vector<RoleKind> assign_roles(const GameConfig& config, Rng& rng) {
  std::vector<RoleKind> roles = config.roles;
  rng.shuffle(roles);
  return roles;
}

inline std::vector<NightKnowledge> night_knowledge(const std::vector<RoleKind>& roles) {
  const int n = static_cast<int>(roles.size());
  std::vector<NightKnowledge> out(static_cast<std::size_t>(n));
  for (PlayerId p = 0; p < n; ++p) {
    NightKnowledge& k = out[static_cast<std::size_t>(p)];
    k.owner = p;
    switch (roles[static_cast<std::size_t>(p)]) {
      case RoleKind::Merlin:
        for (PlayerId q = 0; q < n; ++q) {
          if (is_evil(roles[static_cast<std::size_t>(q)]) &&
              roles[static_cast<std::size_t>(q)] != RoleKind::Mordred) {
            k.known_evil.insert(q);
          }
        }
        break;
      case RoleKind::Percival:
        for (PlayerId q = 0; q < n; ++q) {
          if (roles[static_cast<std::size_t>(q)] == RoleKind::Merlin ||
              roles[static_cast<std::size_t>(q)] == RoleKind::Morgana) {
            k.merlin_candidates.insert(q);
          }
        }
        break;
      case RoleKind::Oberon:
        break;  // isolated: learns nothing, appears to no one
      default:
        if (is_evil(roles[static_cast<std::size_t>(p)])) {
          for (PlayerId q = 0; q < n; ++q) {
            if (q != p && is_evil(roles[static_cast<std::size_t>(q)]) &&
                roles[static_cast<std::size_t>(q)] != RoleKind::Oberon) {
              k.evil_teammates.insert(q);
            }
          }
        }
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Game state
// ---------------------------------------------------------------------------

enum class Vote { Approve, Reject };
enum class MissionAction { Success, Fail };
enum class MissionResult { Success, Fail };
enum class Phase { Night, Proposal, Discussion, Vote, Mission, EvilConclave, Assassination, Ended };
enum class Team { Good, Evil };
enum class WinMethod { ThreeSuccesses, ThreeFails, Assassination };

inline std::string vote_token(Vote v) { return v == Vote::Approve ? "approve" : "reject"; }
inline Vote parse_vote_token(const std::string& s) {
  if (s == "approve") return Vote::Approve;
  if (s == "reject") return Vote::Reject;
  throw SchemaMigrationError("unknown vote token: " + s);
}

inline std::string action_token(MissionAction a) {
  return a == MissionAction::Success ? "success" : "fail";
}
inline MissionAction parse_action_token(const std::string& s) {
  if (s == "success") return MissionAction::Success;
  if (s == "fail") return MissionAction::Fail;
  throw SchemaMigrationError("unknown action token: " + s);
}

inline std::string team_token(Team t) { return t == Team::Good ? "good" : "evil"; }
inline Team parse_team_token(const std::string& s) {
  if (s == "good") return Team::Good;
  if (s == "evil") return Team::Evil;
  throw SchemaMigrationError("unknown team token: " + s);
}

inline std::string win_method_token(WinMethod m) {
  switch (m) {
    case WinMethod::ThreeSuccesses: return "three_successes";
    case WinMethod::ThreeFails: return "three_fails";
    case WinMethod::Assassination: return "assassination";
  }
  return "?";
}
inline WinMethod parse_win_method_token(const std::string& s) {
  if (s == "three_successes") return WinMethod::ThreeSuccesses;
  if (s == "three_fails") return WinMethod::ThreeFails;
  if (s == "assassination") return WinMethod::Assassination;
  throw SchemaMigrationError("unknown win method token: " + s);
}

inline std::string phase_name(Phase p) {
  switch (p) {
    case Phase::Night: return "night";
    case Phase::Proposal: return "proposal";
    case Phase::Discussion: return "discussion";
    case Phase::Vote: return "vote";
    case Phase::Mission: return "mission";
    case Phase::EvilConclave: return "evil_conclave";
    case Phase::Assassination: return "assassination";
    case Phase::Ended: return "ended";
  }
  return "?";
}

struct ProposalRecord {
  int mission = 0;
  int attempt = 0;
  PlayerId leader = 0;
  std::vector<PlayerId> team;  // sorted, unique
  std::string reasoning;
  std::map<PlayerId, Vote> votes;
  bool approved = false;
  bool auto_approved = false;

  int approve_count() const {
    return static_cast<int>(std::count_if(votes.begin(), votes.end(), [](const auto& kv) {
      return kv.second == Vote::Approve;
    }));
  }
  bool operator==(const ProposalRecord&) const = default;
};

struct MissionRecord {
  int mission = 0;
  std::vector<PlayerId> team;
  std::map<PlayerId, MissionAction> actions;  // ground truth, secret during play
  int fail_count = 0;
  MissionResult result = MissionResult::Success;

  bool operator==(const MissionRecord&) const = default;
};

struct GameOutcome {
  Team winner = Team::Good;
  WinMethod via = WinMethod::ThreeSuccesses;
  std::optional<PlayerId> assassin_guess;
  PlayerId merlin = 0;

  bool operator==(const GameOutcome&) const = default;
};

// The full hidden truth of one game. A plain value: copy it to snapshot.
struct GameState {
  GameConfig config;
  std::vector<RoleKind> roles;  // seat order
  PlayerId leader = 0;
  int rejection_streak = 0;
  std::vector<ProposalRecord> proposals;
  std::vector<MissionRecord> missions;
  Phase phase = Phase::Night;
  std::optional<GameOutcome> outcome;

  int player_count() const { return config.player_count; }

  int current_mission() const { return static_cast<int>(missions.size()) + 1; }

  int current_attempt() const {
    const int mission = current_mission();
    int attempts = 0;
    for (const auto& p : proposals) {
      if (p.mission == mission) ++attempts;
    }
    return attempts + 1;
  }

  const ProposalRecord& current_proposal() const {
    if (proposals.empty()) throw RuleViolationError("no proposal on record");
    return proposals.back();
  }
  ProposalRecord& current_proposal() {
    if (proposals.empty()) throw RuleViolationError("no proposal on record");
    return proposals.back();
  }

  int successes() const {
    return static_cast<int>(std::count_if(missions.begin(), missions.end(), [](const auto& m) {
      return m.result == MissionResult::Success;
    }));
  }
  int fails() const { return static_cast<int>(missions.size()) - successes(); }

  PlayerId merlin_seat() const {
    for (PlayerId p = 0; p < player_count(); ++p) {
      if (roles[static_cast<std::size_t>(p)] == RoleKind::Merlin) return p;
    }
    throw RuleViolationError("no Merlin in role assignment");
  }

  PlayerId assassin_seat() const {
    for (PlayerId p = 0; p < player_count(); ++p) {
      if (roles[static_cast<std::size_t>(p)] == config.assassin_designate) return p;
    }
    throw RuleViolationError("assassin designate not present in assignment");
  }

  RoleKind role_of(PlayerId p) const {
    if (p < 0 || p >= player_count()) {
      throw RuleViolationError("player index out of range: " + std::to_string(p));
    }
    return roles[static_cast<std::size_t>(p)];
  }

  std::vector<PlayerId> evil_seats() const {
    std::vector<PlayerId> out;
    for (PlayerId p = 0; p < player_count(); ++p) {
      if (is_evil(role_of(p))) out.push_back(p);
    }
    return out;
  }
  std::vector<PlayerId> good_seats() const {
    std::vector<PlayerId> out;
    for (PlayerId p = 0; p < player_count(); ++p) {
      if (is_good(role_of(p))) out.push_back(p);
    }
    return out;
  }

  bool operator==(const GameState&) const = default;
};

// ---------------------------------------------------------------------------
// State machine operations
// ---------------------------------------------------------------------------

namespace detail {
inline void require_phase(const GameState& state, Phase expected, const char* op) {
  if (state.phase != expected) {
    throw RuleViolationError(std::string(op) + " called in phase " +
                             phase_name(state.phase) + ", expected " +
                             phase_name(expected));
  }
}
}  // namespace detail

inline GameState new_game(const GameConfig& config, std::vector<RoleKind> roles,
                          PlayerId initial_leader = 0) {
  if (static_cast<int>(roles.size()) != config.player_count) {
    throw RuleViolationError("role assignment size does not match player count");
  }
  std::vector<RoleKind> sorted_a = roles;
  std::vector<RoleKind> sorted_b = config.roles;
  std::sort(sorted_a.begin(), sorted_a.end());
  std::sort(sorted_b.begin(), sorted_b.end());
  if (sorted_a != sorted_b) {
    throw RuleViolationError("role assignment does not match config multiset");
  }
  GameState state;
  state.config = config;
  state.roles = std::move(roles);
  state.leader = initial_leader % config.player_count;
  state.phase = Phase::Night;
  return state;
}

// Night phase has no decisions; knowledge is handed out and play begins.
inline void end_night(GameState& state) {
  detail::require_phase(state, Phase::Night, "end_night");
  state.phase = Phase::Proposal;
}

inline void record_proposal(GameState& state, const std::vector<PlayerId>& team,
                            std::string reasoning) {
  detail::require_phase(state, Phase::Proposal, "record_proposal");
  const int mission = state.current_mission();
  const int required = state.config.mission_size(mission);
  std::vector<PlayerId> sorted = team;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw RuleViolationError("proposed team contains a duplicate player");
  }
  if (static_cast<int>(sorted.size()) != required) {
    throw RuleViolationError("proposed team has size " + std::to_string(sorted.size()) +
                             ", mission " + std::to_string(mission) + " needs " +
                             std::to_string(required));
  }
  for (PlayerId p : sorted) {
    if (p < 0 || p >= state.player_count()) {
      throw RuleViolationError("proposed team member out of range");
    }
  }
  ProposalRecord record;
  record.mission = mission;
  record.attempt = state.current_attempt();
  if (record.attempt > state.config.max_rejections + 1) {
    throw RuleViolationError("more than " + std::to_string(state.config.max_rejections + 1) +
                             " proposal attempts for one mission");
  }
  record.leader = state.leader;
  record.team = std::move(sorted);
  record.reasoning = std::move(reasoning);
  state.proposals.push_back(std::move(record));
  state.phase = Phase::Discussion;
}

// Discussion messages live in the game log, not in GameState.
inline void finish_discussion(GameState& state) {
  detail::require_phase(state, Phase::Discussion, "finish_discussion");
  state.phase = Phase::Vote;
}

// Majority approval, or unconditional approval on the 5th attempt.
inline void resolve_vote(GameState& state, const std::map<PlayerId, Vote>& votes) {
  detail::require_phase(state, Phase::Vote, "resolve_vote");
  const int n = state.player_count();
  if (static_cast<int>(votes.size()) != n) {
    throw IncompleteBallotError("ballot has " + std::to_string(votes.size()) +
                                " votes, expected " + std::to_string(n));
  }
  for (const auto& [voter, vote] : votes) {
    (void)vote;
    if (voter < 0 || voter >= n) {
      throw IncompleteBallotError("ballot names player out of range: " + std::to_string(voter));
    }
  }
  ProposalRecord& proposal = state.current_proposal();
  proposal.votes = votes;
  proposal.auto_approved = proposal.attempt == state.config.max_rejections + 1;
  proposal.approved = proposal.approve_count() * 2 > n || proposal.auto_approved;
  if (proposal.approved) {
    state.rejection_streak = 0;
    state.phase = Phase::Mission;
  } else {
    state.rejection_streak += 1;
    state.leader = (state.leader + 1) % n;
    state.phase = Phase::Proposal;
  }
}

// Pure resolution rule shared with tests: fail iff enough Fail cards.
inline MissionResult mission_result_for(int fail_count, int threshold) {
  return fail_count >= threshold ? MissionResult::Fail : MissionResult::Success;
}

enum class VictoryCheck { Continue, PendingAssassination, EvilByFails };

inline VictoryCheck check_victory(const GameState& state) {
  if (state.fails() >= 3) return VictoryCheck::EvilByFails;
  if (state.successes() >= 3) return VictoryCheck::PendingAssassination;
  return VictoryCheck::Continue;
}

inline void resolve_mission(GameState& state, const std::map<PlayerId, MissionAction>& actions) {
  detail::require_phase(state, Phase::Mission, "resolve_mission");
  const ProposalRecord& proposal = state.current_proposal();
  if (!proposal.approved) throw RuleViolationError("current proposal was not approved");

  std::vector<PlayerId> actors;
  actors.reserve(actions.size());
  for (const auto& [player, action] : actions) {
    if (action == MissionAction::Fail && is_good(state.role_of(player))) {
      throw IllegalActionError("good player " + state.config.name_of(player) +
                               " cannot play Fail");
    }
    actors.push_back(player);
  }
  if (actors != proposal.team) {
    throw RuleViolationError("mission actions do not cover exactly the approved team");
  }

  MissionRecord record;
  record.mission = proposal.mission;
  record.team = proposal.team;
  record.actions = actions;
  record.fail_count = static_cast<int>(
      std::count_if(actions.begin(), actions.end(),
                    [](const auto& kv) { return kv.second == MissionAction::Fail; }));
  record.result = mission_result_for(record.fail_count,
                                     fail_threshold(state.config, record.mission));
  state.missions.push_back(std::move(record));
  state.leader = (state.leader + 1) % state.player_count();

  switch (check_victory(state)) {
    case VictoryCheck::EvilByFails:
      state.outcome = GameOutcome{Team::Evil, WinMethod::ThreeFails, std::nullopt,
                                  state.merlin_seat()};
      state.phase = Phase::Ended;
      break;
    case VictoryCheck::PendingAssassination:
      state.phase = Phase::EvilConclave;
      break;
    case VictoryCheck::Continue:
      state.phase = Phase::Proposal;
      break;
  }
}

// Conclave messages live in the log; this marks the hand-off to the assassin.
inline void begin_assassination(GameState& state) {
  detail::require_phase(state, Phase::EvilConclave, "begin_assassination");
  state.phase = Phase::Assassination;
}

inline GameOutcome resolve_assassination(GameState& state, PlayerId guess) {
  detail::require_phase(state, Phase::Assassination, "resolve_assassination");
  if (guess < 0 || guess >= state.player_count()) {
    throw IllegalGuessError("assassination guess out of range: " + std::to_string(guess));
  }
  if (is_evil(state.role_of(guess))) {
    throw IllegalGuessError("assassination must name a good player, " +
                            state.config.name_of(guess) + " is not");
  }
  GameOutcome outcome;
  outcome.merlin = state.merlin_seat();
  outcome.assassin_guess = guess;
  if (guess == outcome.merlin) {
    outcome.winner = Team::Evil;
    outcome.via = WinMethod::Assassination;
  } else {
    outcome.winner = Team::Good;
    outcome.via = WinMethod::ThreeSuccesses;
  }
  state.outcome = outcome;
  state.phase = Phase::Ended;
  return outcome;
}

}  // namespace avalon
