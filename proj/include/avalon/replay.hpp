#pragma once

#include <map>
#include <string>
#include <vector>

#include "avalon/log.hpp"

namespace avalon {

struct ReplayResult {
  bool ok = true;
  std::string detail;  // first mismatch, when not ok
  GameState final_state;
};

// Feeds a log's recorded decisions back through the engine and checks that
// every derived value (approvals, mission results, the outcome) matches what
// the log recorded. Aborted logs replay as far as their events go.
inline ReplayResult replay_log(const GameLog& log) {
  ReplayResult result;
  auto mismatch = [&](const std::string& what) {
    if (result.ok) {
      result.ok = false;
      result.detail = what;
    }
  };

  GameState state = new_game(log.header.config, log.header.roles, log.header.initial_leader);
  end_night(state);

  std::map<PlayerId, Vote> ballot;
  std::map<PlayerId, MissionAction> actions;

  for (const GameEvent& event : log.events) {
    if (!result.ok) break;
    if (const auto* p = std::get_if<ProposalEvent>(&event)) {
      if (state.phase != Phase::Proposal) {
        mismatch("proposal event in phase " + phase_name(state.phase));
        break;
      }
      if (p->mission != state.current_mission() || p->attempt != state.current_attempt()) {
        mismatch("proposal numbering does not match engine state");
        break;
      }
      if (p->leader != state.leader) {
        mismatch("recorded leader " + log.name_of(p->leader) + " but engine expects " +
                 log.name_of(state.leader));
        break;
      }
      record_proposal(state, p->team, p->reasoning);
    } else if (std::get_if<DiscussionEvent>(&event) != nullptr) {
      // Free text; no state change.
    } else if (const auto* v = std::get_if<VoteEvent>(&event)) {
      if (state.phase == Phase::Discussion) finish_discussion(state);
      if (state.phase != Phase::Vote) {
        mismatch("vote event in phase " + phase_name(state.phase));
        break;
      }
      ballot[v->voter] = v->vote;
      if (static_cast<int>(ballot.size()) == state.player_count()) {
        resolve_vote(state, ballot);
        ballot.clear();
      }
    } else if (const auto* a = std::get_if<MissionActionEvent>(&event)) {
      if (state.phase != Phase::Mission) {
        mismatch("mission action event in phase " + phase_name(state.phase));
        break;
      }
      actions[a->player] = a->action;
    } else if (const auto* r = std::get_if<MissionResultEvent>(&event)) {
      if (state.phase != Phase::Mission) {
        mismatch("mission result event in phase " + phase_name(state.phase));
        break;
      }
      resolve_mission(state, actions);
      actions.clear();
      const MissionRecord& record = state.missions.back();
      if (record.fail_count != r->fail_count || record.result != r->result ||
          record.team != r->team) {
        mismatch("mission " + std::to_string(r->mission) +
                 " resolution does not match the recorded result");
      }
    } else if (std::get_if<ConclaveEvent>(&event) != nullptr) {
      if (state.phase != Phase::EvilConclave) {
        mismatch("conclave event in phase " + phase_name(state.phase));
      }
    } else if (const auto* g = std::get_if<AssassinationEvent>(&event)) {
      if (state.phase == Phase::EvilConclave) begin_assassination(state);
      if (state.phase != Phase::Assassination) {
        mismatch("assassination event in phase " + phase_name(state.phase));
        break;
      }
      const GameOutcome outcome = resolve_assassination(state, g->guess);
      if ((outcome.via == WinMethod::Assassination) != g->correct) {
        mismatch("assassination correctness flag does not match");
      }
    } else if (std::get_if<ReflectionEvent>(&event) != nullptr ||
               std::get_if<AnomalyEvent>(&event) != nullptr) {
      // No state change.
    } else if (const auto* oc = std::get_if<OutcomeEvent>(&event)) {
      if (!state.outcome || !(*state.outcome == oc->outcome)) {
        mismatch("recorded outcome does not match the replayed outcome");
      }
    }
  }

  if (result.ok && log.outcome) {
    if (!state.outcome || !(*state.outcome == *log.outcome)) {
      mismatch("log outcome missing from replayed state");
    }
  }
  result.final_state = std::move(state);
  return result;
}

// Final GameState reconstructed purely from the serialized events.
inline GameState reconstruct_state(const GameLog& log) { return replay_log(log).final_state; }

// ---------------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------------

// Phase-by-phase rendering of one game, with roles revealed. mission_filter
// 0 renders everything; 1..5 renders only that mission's rounds.
inline std::string render_replay(const GameLog& log, int mission_filter = 0) {
  if (mission_filter < 0 || mission_filter > 5) {
    throw ConfigError("mission filter out of range: " + std::to_string(mission_filter));
  }
  const GameConfig& config = log.header.config;
  std::string out;
  out += "=== Game " + std::to_string(log.header.game_id) + " (tournament " +
         log.header.tournament_id + ", seed " + std::to_string(log.header.seed) + ") ===\n";
  out += "Preset " + log.header.preset + ", memory " + log.header.memory_mode + ", effort " +
         log.header.effort + ", agents " + log.header.agents + "\n";
  out += "Players:\n";
  for (PlayerId p = 0; p < config.player_count; ++p) {
    const RoleKind role = log.header.roles[static_cast<std::size_t>(p)];
    out += "  " + config.name_of(p) + ": " + role_name(role) + " (" +
           alignment_name(alignment_of(role)) + ")\n";
  }

  int current_mission = 0;
  bool in_endgame = false;
  auto mission_visible = [&](int mission) {
    return mission_filter == 0 || mission == mission_filter;
  };
  std::map<PlayerId, Vote> ballot;

  for (const GameEvent& event : log.events) {
    if (const auto* p = std::get_if<ProposalEvent>(&event)) {
      if (p->mission != current_mission && mission_visible(p->mission)) {
        out += "\n--- Mission " + std::to_string(p->mission) + " (team of " +
               std::to_string(config.mission_size(p->mission)) + ") ---\n";
      }
      current_mission = p->mission;
      if (!mission_visible(p->mission)) continue;
      std::vector<std::string> team;
      for (PlayerId m : p->team) team.push_back(config.name_of(m));
      out += "Attempt " + std::to_string(p->attempt) + ": leader " + config.name_of(p->leader) +
             " proposes " + join_names(team) + "\n";
      if (!p->reasoning.empty()) out += "  Reasoning: " + p->reasoning + "\n";
    } else if (const auto* d = std::get_if<DiscussionEvent>(&event)) {
      if (!mission_visible(d->mission)) continue;
      out += "  " + config.name_of(d->speaker) + ": " + d->text + "\n";
    } else if (const auto* v = std::get_if<VoteEvent>(&event)) {
      ballot[v->voter] = v->vote;
      if (!mission_visible(v->mission)) {
        if (static_cast<int>(ballot.size()) == config.player_count) ballot.clear();
        continue;
      }
      out += "  Vote: " + config.name_of(v->voter) + " -> " + vote_token(v->vote);
      if (!v->comment.empty()) out += " (" + v->comment + ")";
      out += "\n";
      if (static_cast<int>(ballot.size()) == config.player_count) {
        int approvals = 0;
        for (const auto& [voter, vote] : ballot) {
          (void)voter;
          if (vote == Vote::Approve) ++approvals;
        }
        out += "  Ballot: " + std::to_string(approvals) + " approve / " +
               std::to_string(config.player_count - approvals) + " reject\n";
        ballot.clear();
      }
    } else if (const auto* a = std::get_if<MissionActionEvent>(&event)) {
      if (!mission_visible(a->mission)) continue;
      out += "  [secret] " + config.name_of(a->player) + " played " +
             action_token(a->action) + "\n";
    } else if (const auto* r = std::get_if<MissionResultEvent>(&event)) {
      if (!mission_visible(r->mission)) continue;
      out += "Mission " + std::to_string(r->mission) + " result: " +
             (r->result == MissionResult::Success ? "SUCCESS" : "FAIL") + " (" +
             std::to_string(r->fail_count) + " fail card" + (r->fail_count == 1 ? "" : "s") +
             ")\n";
    } else if (const auto* c = std::get_if<ConclaveEvent>(&event)) {
      if (mission_filter != 0) continue;
      if (!in_endgame) {
        out += "\n--- Evil conclave ---\n";
        in_endgame = true;
      }
      out += "  " + config.name_of(c->speaker) + ": " + c->text + "\n";
    } else if (const auto* g = std::get_if<AssassinationEvent>(&event)) {
      if (mission_filter != 0) continue;
      out += "Assassination: " + config.name_of(g->assassin) + " names " +
             config.name_of(g->guess) + " as Merlin -> " +
             (g->correct ? "CORRECT" : "WRONG") + "\n";
    } else if (const auto* rf = std::get_if<ReflectionEvent>(&event)) {
      if (mission_filter != 0) continue;
      out += "Reflection by " + config.name_of(rf->author) + " (" +
             role_name(rf->author_role) + "): " + rf->self_assessment + "\n";
      for (const auto& [target, obs] : rf->observations) {
        out += "  about " + target + ": " + obs.text + "\n";
      }
    } else if (const auto* an = std::get_if<AnomalyEvent>(&event)) {
      if (mission_filter != 0) continue;
      out += "[anomaly] " + an->kind + " at " + an->context + ": " + an->detail + "\n";
    } else if (const auto* oc = std::get_if<OutcomeEvent>(&event)) {
      if (mission_filter != 0) continue;
      out += "\nOutcome: " + std::string(oc->outcome.winner == Team::Good ? "GOOD" : "EVIL") +
             " wins via " + win_method_token(oc->outcome.via) + ". Merlin was " +
             config.name_of(oc->outcome.merlin) + ".\n";
    }
  }
  if (log.aborted && mission_filter == 0) {
    out += "\n(The game was aborted before an outcome was reached.)\n";
  }
  return out;
}

}  // namespace avalon
