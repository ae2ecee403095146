#pragma once

#include <string>
#include <vector>

#include "avalon/engine.hpp"

namespace avalon {

inline std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  return out;
}

inline std::vector<std::string> names_of(const GameConfig& config,
                                         const std::set<PlayerId>& seats) {
  std::vector<std::string> out;
  for (PlayerId p : seats) out.push_back(config.name_of(p));  // seat order
  return out;
}

// ---------------------------------------------------------------------------
// Role-specific knowledge briefs
// ---------------------------------------------------------------------------

inline std::string render_role_brief(RoleKind role, const NightKnowledge& knowledge,
                                     const GameConfig& config) {
  switch (role) {
    case RoleKind::Merlin: {
      if (!knowledge.evil_teammates.empty() || !knowledge.merlin_candidates.empty()) {
        throw RuleViolationError("night knowledge does not match Merlin");
      }
      return "You are Merlin. You know these evil players: " +
             join_names(names_of(config, knowledge.known_evil)) +
             ".\nHelp good win WITHOUT revealing your identity, or the\n"
             "Assassin will kill you!";
    }
    case RoleKind::Percival: {
      if (!knowledge.known_evil.empty() || !knowledge.evil_teammates.empty()) {
        throw RuleViolationError("night knowledge does not match Percival");
      }
      return "You are Percival (good team). You see these players as\nMerlin: " +
             join_names(names_of(config, knowledge.merlin_candidates)) +
             ". One is the real Merlin,\none might be Morgana (evil). Protect Merlin!";
    }
    case RoleKind::Assassin:
      return "You are the Assassin (evil team). Your evil teammates\nare: " +
             join_names(names_of(config, knowledge.evil_teammates)) +
             ". Sabotage missions. If good wins\n3 missions, you guess who Merlin is!";
    case RoleKind::Morgana:
      return "You are Morgana (evil team). Your evil teammates are:\n" +
             join_names(names_of(config, knowledge.evil_teammates)) +
             ". You appear as Merlin to Percival.\nDeceive and sabotage!";
    case RoleKind::Mordred:
      return "You are Mordred (evil team). Your evil teammates are:\n" +
             join_names(names_of(config, knowledge.evil_teammates)) +
             ". You are invisible to Merlin.\nSabotage missions!";
    case RoleKind::Oberon:
      if (!knowledge.empty()) {
        throw RuleViolationError("night knowledge does not match Oberon");
      }
      return "You are Oberon (evil team). You don't know who your\n"
             "teammates are, and they don't know you. Sabotage\n"
             "missions and try to identify your team!";
    case RoleKind::Minion:
      return "You are on the evil team. Your evil teammates are:\n" +
             join_names(names_of(config, knowledge.evil_teammates)) +
             ". Sabotage missions and deceive the\ngood players!";
    case RoleKind::LoyalServant:
      if (!knowledge.empty()) {
        throw RuleViolationError("night knowledge does not match a loyal servant");
      }
      return "You are on the good team. Deduce who the evil players\n"
             "are and ensure missions succeed!";
  }
  throw RuleViolationError("unknown role");
}

// ---------------------------------------------------------------------------
// Decision prompts
// ---------------------------------------------------------------------------

// The evil/Merlin lines are appended for those roles only.
inline std::string discussion_prompt(RoleKind role) {
  std::string text =
      "It's your turn to speak. Provide a strategic comment\n"
      "about who to trust or who should be on the mission team.\n"
      "Be natural and conversational. Keep it to 1-2 sentences.";
  if (is_evil(role)) {
    text += "\nRemember to deceive and create confusion while appearing trustworthy.";
  } else if (role == RoleKind::Merlin) {
    text += "\nSubtly guide the team without revealing you know who the evil players are.";
  }
  return text;
}

inline std::string team_proposal_prompt(int team_size,
                                        const std::vector<std::string>& available) {
  return "You are the mission leader. Propose a team of " + std::to_string(team_size) +
         "\nplayers for this mission.\nAvailable players: " + join_names(available) +
         "\nRespond ONLY with a JSON object:\n"
         "{\"team\": [\"Name1\", \"Name2\", ...],\n"
         " \"reasoning\": \"why you chose this team\"}";
}

inline std::string vote_prompt() {
  return "Vote on this team proposal. Respond ONLY with JSON:\n"
         "{\"vote\": \"approve\" or \"reject\",\n"
         " \"comment\": \"brief reason\"}";
}

// Good players never see this; the engine plays Success for them.
inline std::string mission_action_prompt() {
  return "You're on the mission. As an evil player, choose\n"
         "'success' or 'fail' strategically. Respond with JSON:\n"
         "{\"action\": \"success\" or \"fail\",\n"
         " \"reasoning\": \"why\"}";
}

inline std::string conclave_prompt() {
  return "Discuss who you think Merlin is among the good players.\n"
         "Analyze their behavior and statements in first person\n"
         "(as yourself). Be specific and analytical. Keep it to\n"
         "2-3 sentences. Speak naturally as if talking to your\n"
         "evil teammates.";
}

inline std::string assassination_prompt() {
  return "Based on all the discussions and your teammates'\n"
         "analysis, choose who you think is Merlin from the\n"
         "good players. Respond ONLY with JSON:\n"
         "{\"guess\": \"PlayerName\",\n"
         " \"reasoning\": \"your analysis in 2-3 sentences\"}";
}

inline std::string reflection_prompt() {
  return "Reflect on your performance in this game. Respond\n"
         "with JSON:\n"
         "{\n"
         "  \"self_assessment\": \"What you did well and what you\n"
         "                      could improve (2-3 sentences)\",\n"
         "  \"player_observations\": {\n"
         "    \"PlayerName1\": \"Brief observation about their\n"
         "                    playstyle or patterns\",\n"
         "    \"PlayerName2\": \"Brief observation...\",\n"
         "    ...\n"
         "  }\n"
         "}\n"
         "Make observations about ALL other players (not yourself).";
}

}  // namespace avalon
