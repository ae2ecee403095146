#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "avalon/log.hpp"
#include "avalon/memory.hpp"
#include "avalon/prompts.hpp"

namespace avalon {

// Everything one agent is allowed to see when making a decision: its own role
// knowledge, the public record, and its own cross-game memory. Never another
// player's hidden role.
struct AgentView {
  int game_id = 1;
  PlayerId self = 0;
  RoleKind role = RoleKind::LoyalServant;
  NightKnowledge knowledge;
  Effort reasoning_effort = Effort::Low;
  GameConfig config;
  Phase phase = Phase::Proposal;
  int mission = 1;
  int attempt = 1;
  PlayerId leader = 0;
  int team_size = 0;
  std::vector<PlayerId> current_team;  // proposed team, once one exists
  std::string public_history;         // rendered from public log events
  std::optional<MemoryContext> memory;
  std::vector<std::pair<PlayerId, std::string>> conclave_so_far;  // evil phases only
  std::vector<PlayerId> assassination_candidates;  // good seats; assassination phase only
  std::optional<std::vector<RoleKind>> revealed_roles;            // reflection only
  std::optional<GameOutcome> outcome;                             // reflection only
  std::string retry_notice;  // set when the orchestrator re-asks after an illegal decision

  const std::string& self_name() const { return config.name_of(self); }
};

// ---------------------------------------------------------------------------
// Public history rendering
// ---------------------------------------------------------------------------

// The shared transcript: proposals, discussion, votes, and mission results.
// Mission actions stay secret; only the fail-card count is public. This text
// is identical for every player and contains no role information.
inline std::string render_public_history(const GameConfig& config,
                                         const std::vector<GameEvent>& events) {
  std::string out;
  int open_mission = 0;
  for (const auto& event : events) {
    if (const auto* p = std::get_if<ProposalEvent>(&event)) {
      if (p->mission != open_mission) {
        open_mission = p->mission;
        out += "Mission " + std::to_string(p->mission) + " (team of " +
               std::to_string(config.mission_size(p->mission)) + ")\n";
      }
      std::vector<std::string> team;
      for (PlayerId m : p->team) team.push_back(config.name_of(m));
      out += "  Attempt " + std::to_string(p->attempt) + " - leader " +
             config.name_of(p->leader) + " proposed: " + join_names(team) + "\n";
      if (!p->reasoning.empty()) {
        out += "    Reasoning: " + p->reasoning + "\n";
      }
    } else if (const auto* d = std::get_if<DiscussionEvent>(&event)) {
      out += "    " + config.name_of(d->speaker) + ": " + d->text + "\n";
    } else if (const auto* v = std::get_if<VoteEvent>(&event)) {
      out += "    Vote by " + config.name_of(v->voter) + ": " + vote_token(v->vote);
      if (!v->comment.empty()) out += " (" + v->comment + ")";
      out += "\n";
    } else if (const auto* r = std::get_if<MissionResultEvent>(&event)) {
      out += "  Mission " + std::to_string(r->mission) + " result: " +
             (r->result == MissionResult::Success ? "SUCCEEDED" : "FAILED") + " (" +
             std::to_string(r->fail_count) + " fail card" +
             (r->fail_count == 1 ? "" : "s") + " among " +
             std::to_string(r->team.size()) + ")\n";
    }
    // mission_action, reflection, conclave, anomaly and outcome events are
    // not part of the shared transcript.
  }
  return out;
}

inline std::string render_situation(const AgentView& view) {
  std::string out;
  out += "You are " + view.self_name() + ". Game " + std::to_string(view.game_id) + ".\n";
  out += "Players: " + join_names(view.config.roster) + "\n";
  if (view.phase == Phase::EvilConclave || view.phase == Phase::Assassination) {
    out += "Three missions have succeeded.\n";
  } else if (view.phase != Phase::Ended) {
    out += "Now at mission " + std::to_string(view.mission) + ", proposal attempt " +
           std::to_string(view.attempt) + " of 5. Current leader: " +
           view.config.name_of(view.leader) + ".\n";
    if (!view.current_team.empty()) {
      std::vector<std::string> team;
      for (PlayerId m : view.current_team) team.push_back(view.config.name_of(m));
      out += "Proposed team: " + join_names(team) + "\n";
    }
  }
  return out;
}

// The user-side text of a decision request, minus the per-decision
// instruction. Role knowledge is confined to the system side.
inline std::string render_view_text(const AgentView& view) {
  std::string out = render_situation(view);
  if (!view.public_history.empty()) {
    out += "\nGame so far:\n" + view.public_history;
  }
  if (!view.conclave_so_far.empty()) {
    out += "\nYour teammates' analysis so far:\n";
    for (const auto& [speaker, text] : view.conclave_so_far) {
      out += "  " + view.config.name_of(speaker) + ": " + text + "\n";
    }
  }
  if (view.revealed_roles) {
    out += "\nThe game is over and all roles are revealed:\n";
    for (PlayerId p = 0; p < view.config.player_count; ++p) {
      out += "  " + view.config.name_of(p) + ": " +
             role_name((*view.revealed_roles)[static_cast<std::size_t>(p)]) + " (" +
             alignment_name(alignment_of((*view.revealed_roles)[static_cast<std::size_t>(p)])) +
             ")\n";
    }
    if (view.outcome) {
      out += std::string("Winner: ") +
             (view.outcome->winner == Team::Good ? "the good team" : "the evil team") + "\n";
    }
  }
  return out;
}

// The system-side text: identity, cross-game memory, then the role brief.
inline std::string render_system_text(const AgentView& view) {
  std::string out = "You are " + view.self_name() +
                    ", playing The Resistance: Avalon with " +
                    std::to_string(view.config.player_count) +
                    " players: " + join_names(view.config.roster) + ".\n\n";
  if (view.memory && !view.memory->empty()) {
    out += render_memory_prompt(*view.memory) + "\n";
  }
  out += render_role_brief(view.role, view.knowledge, view.config);
  return out;
}

}  // namespace avalon
