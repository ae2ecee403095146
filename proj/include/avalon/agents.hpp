#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "avalon/view.hpp"

namespace avalon {

// ---------------------------------------------------------------------------
// Decision payloads
// ---------------------------------------------------------------------------

enum class DecisionKind { Propose, Discuss, Vote, MissionAct, Conclave, Assassinate, Reflect };

inline std::string decision_kind_name(DecisionKind kind) {
  switch (kind) {
    case DecisionKind::Propose: return "propose";
    case DecisionKind::Discuss: return "discuss";
    case DecisionKind::Vote: return "vote";
    case DecisionKind::MissionAct: return "mission_act";
    case DecisionKind::Conclave: return "conclave";
    case DecisionKind::Assassinate: return "assassinate";
    case DecisionKind::Reflect: return "reflect";
  }
  return "?";
}

struct TeamProposal {
  std::vector<PlayerId> team;
  std::string reasoning;
  bool operator==(const TeamProposal&) const = default;
};

struct VoteDecision {
  Vote vote = Vote::Approve;
  std::string comment;
  bool operator==(const VoteDecision&) const = default;
};

struct MissionDecision {
  MissionAction action = MissionAction::Success;
  std::string reasoning;
  bool operator==(const MissionDecision&) const = default;
};

struct AssassinGuess {
  PlayerId guess = 0;
  std::string reasoning;
  bool operator==(const AssassinGuess&) const = default;
};

struct ReflectionPayload {
  std::string self_assessment;
  std::map<PlayerId, std::string> observations;  // every other player
  bool operator==(const ReflectionPayload&) const = default;
};

// ---------------------------------------------------------------------------
// Structured response parsing
// ---------------------------------------------------------------------------

namespace parsedetail {

inline std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Balanced {...} spans in raw model output, in order of appearance. Handles
// strings and escapes so braces inside text do not break the scan.
inline std::vector<std::string> object_candidates(const std::string& raw) {
  std::vector<std::string> out;
  for (std::size_t start = 0; start < raw.size(); ++start) {
    if (raw[start] != '{') continue;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
      const char c = raw[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        --depth;
        if (depth == 0) {
          out.push_back(raw.substr(start, i - start + 1));
          break;
        }
      }
    }
  }
  return out;
}

// First candidate that parses as JSON and satisfies `matches`.
inline std::optional<Json> first_matching_object(const std::string& raw,
                                                 const std::function<bool(const Json&)>& matches) {
  for (const std::string& candidate : object_candidates(raw)) {
    Json j = Json::parse(candidate, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    if (matches(j)) return j;
  }
  return std::nullopt;
}

}  // namespace parsedetail

// Case-insensitive exact match against the roster; no fuzzy matching.
inline PlayerId resolve_player_name(const std::vector<std::string>& roster,
                                    const std::string& name) {
  const std::string needle = parsedetail::to_lower(name);
  for (PlayerId p = 0; p < static_cast<int>(roster.size()); ++p) {
    if (parsedetail::to_lower(roster[static_cast<std::size_t>(p)]) == needle) return p;
  }
  throw InvalidReferenceError("name does not match any player: " + name);
}

inline TeamProposal parse_team_proposal(const std::string& raw,
                                        const std::vector<std::string>& roster) {
  auto j = parsedetail::first_matching_object(raw, [](const Json& o) {
    if (!o.contains("team") || !o.at("team").is_array()) return false;
    for (const auto& e : o.at("team")) {
      if (!e.is_string()) return false;
    }
    return !o.at("team").empty();
  });
  if (!j) throw ParseFailureError("no team proposal object found in response");
  TeamProposal out;
  for (const auto& e : j->at("team")) {
    const PlayerId p = resolve_player_name(roster, e.get<std::string>());
    if (std::find(out.team.begin(), out.team.end(), p) != out.team.end()) {
      throw InvalidReferenceError("team names the same player twice: " +
                                  e.get<std::string>());
    }
    out.team.push_back(p);
  }
  std::sort(out.team.begin(), out.team.end());
  out.reasoning = j->value("reasoning", "");
  return out;
}

inline VoteDecision parse_vote_decision(const std::string& raw) {
  auto j = parsedetail::first_matching_object(raw, [](const Json& o) {
    if (!o.contains("vote") || !o.at("vote").is_string()) return false;
    const std::string v = parsedetail::to_lower(o.at("vote").get<std::string>());
    return v == "approve" || v == "reject";
  });
  if (!j) throw ParseFailureError("no vote object found in response");
  VoteDecision out;
  out.vote = parsedetail::to_lower(j->at("vote").get<std::string>()) == "approve"
                 ? Vote::Approve
                 : Vote::Reject;
  out.comment = j->value("comment", "");
  return out;
}

inline MissionDecision parse_mission_decision(const std::string& raw) {
  auto j = parsedetail::first_matching_object(raw, [](const Json& o) {
    if (!o.contains("action") || !o.at("action").is_string()) return false;
    const std::string v = parsedetail::to_lower(o.at("action").get<std::string>());
    return v == "success" || v == "fail";
  });
  if (!j) throw ParseFailureError("no mission action object found in response");
  MissionDecision out;
  out.action = parsedetail::to_lower(j->at("action").get<std::string>()) == "success"
                   ? MissionAction::Success
                   : MissionAction::Fail;
  out.reasoning = j->value("reasoning", "");
  return out;
}

inline AssassinGuess parse_assassin_guess(const std::string& raw,
                                          const std::vector<std::string>& roster) {
  auto j = parsedetail::first_matching_object(raw, [](const Json& o) {
    return o.contains("guess") && o.at("guess").is_string();
  });
  if (!j) throw ParseFailureError("no assassination guess object found in response");
  AssassinGuess out;
  out.guess = resolve_player_name(roster, j->at("guess").get<std::string>());
  out.reasoning = j->value("reasoning", "");
  return out;
}

// Self-entries are dropped; every other player must be covered.
inline ReflectionPayload parse_reflection(const std::string& raw,
                                          const std::vector<std::string>& roster,
                                          PlayerId author) {
  auto j = parsedetail::first_matching_object(raw, [](const Json& o) {
    if (!o.contains("self_assessment") || !o.at("self_assessment").is_string()) return false;
    if (!o.contains("player_observations") || !o.at("player_observations").is_object()) {
      return false;
    }
    for (const auto& [k, v] : o.at("player_observations").items()) {
      (void)k;
      if (!v.is_string()) return false;
    }
    return true;
  });
  if (!j) throw ParseFailureError("no reflection object found in response");
  ReflectionPayload out;
  out.self_assessment = j->at("self_assessment").get<std::string>();
  for (const auto& [name, text] : j->at("player_observations").items()) {
    const PlayerId target = resolve_player_name(roster, name);
    if (target == author) continue;
    out.observations[target] = text.get<std::string>();
  }
  for (PlayerId p = 0; p < static_cast<int>(roster.size()); ++p) {
    if (p != author && !out.observations.count(p)) {
      throw ParseFailureError("reflection must include an observation about " +
                              roster[static_cast<std::size_t>(p)]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Agent interface
// ---------------------------------------------------------------------------

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string kind() const = 0;

  virtual TeamProposal propose(const AgentView& view) = 0;
  virtual std::string discuss(const AgentView& view) = 0;
  virtual VoteDecision vote(const AgentView& view) = 0;
  virtual MissionDecision mission_act(const AgentView& view) = 0;
  virtual std::string conclave(const AgentView& view) = 0;
  virtual AssassinGuess assassinate(const AgentView& view) = 0;
  virtual ReflectionPayload reflect(const AgentView& view) = 0;

  // Prompt/response trace of the most recent decision, when gateway-backed.
  virtual const DecisionTrace* last_trace() const { return nullptr; }
  // Parse-retry fallback on the most recent decision, for anomaly logging.
  virtual bool last_decision_fell_back() const { return false; }
};

using DecisionPayload = std::variant<TeamProposal, std::string, VoteDecision, MissionDecision,
                                     AssassinGuess, ReflectionPayload>;

// Single-entry dispatch with phase/role legality checks.
inline DecisionPayload agent_decide(Agent& agent, const AgentView& view, DecisionKind kind) {
  switch (kind) {
    case DecisionKind::Propose:
      return agent.propose(view);
    case DecisionKind::Discuss:
      return agent.discuss(view);
    case DecisionKind::Vote:
      return agent.vote(view);
    case DecisionKind::MissionAct:
      if (!is_evil(view.role)) {
        throw RuleViolationError("mission actions are requested from evil players only");
      }
      return agent.mission_act(view);
    case DecisionKind::Conclave:
      if (!is_evil(view.role)) {
        throw RuleViolationError("the conclave is evil-only");
      }
      return agent.conclave(view);
    case DecisionKind::Assassinate:
      if (view.role != view.config.assassin_designate) {
        throw RuleViolationError("only the assassin designate may guess");
      }
      return agent.assassinate(view);
    case DecisionKind::Reflect:
      return agent.reflect(view);
  }
  throw RuleViolationError("unknown decision kind");
}

// ---------------------------------------------------------------------------
// Deterministic fallbacks (used after parse retries are exhausted)
// ---------------------------------------------------------------------------

inline TeamProposal fallback_proposal(const AgentView& view) {
  TeamProposal out;
  for (int i = 0; i < view.team_size; ++i) {
    out.team.push_back((view.leader + i) % view.config.player_count);
  }
  std::sort(out.team.begin(), out.team.end());
  out.reasoning = "";
  return out;
}

inline VoteDecision fallback_vote() { return VoteDecision{Vote::Approve, ""}; }

inline MissionDecision fallback_mission() { return MissionDecision{MissionAction::Success, ""}; }

inline AssassinGuess fallback_guess(const AgentView& view) {
  if (view.assassination_candidates.empty()) {
    throw RuleViolationError("no assassination candidates in view");
  }
  return AssassinGuess{view.assassination_candidates.front(), ""};
}

inline ReflectionPayload fallback_reflection(const AgentView& view) {
  ReflectionPayload out;
  out.self_assessment = "(no reflection provided)";
  for (PlayerId p = 0; p < view.config.player_count; ++p) {
    if (p != view.self) out.observations[p] = "(no observation provided)";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scripted baselines
// ---------------------------------------------------------------------------

// Words woven into template speech so the analysis pipelines have material to
// count. Defaults are empty; plain template text avoids the analysis lexicons.
struct BotSpeechConfig {
  std::vector<std::string> descriptor_words;
  std::vector<std::string> reference_phrases;
};

class ScriptedAgent : public Agent {
 public:
  explicit ScriptedAgent(std::uint64_t seed, BotSpeechConfig speech = {})
      : seed_(seed), speech_(std::move(speech)) {}

  TeamProposal propose(const AgentView& view) override {
    return TeamProposal{choose_team(view), proposal_reasoning(view)};
  }

  std::string discuss(const AgentView& view) override {
    std::string text = discussion_line(view);
    if (!speech_.reference_phrases.empty() && (pattern_index(view) % 3) == 0) {
      const auto& phrase =
          speech_.reference_phrases[pattern_index(view) % speech_.reference_phrases.size()];
      text += " Thinking about " + phrase + ", I will keep an eye on the votes.";
    }
    return text;
  }

  VoteDecision vote(const AgentView& view) override {
    return VoteDecision{vote_policy(view), ""};
  }

  MissionDecision mission_act(const AgentView& view) override {
    return MissionDecision{action_policy(view), ""};
  }

  std::string conclave(const AgentView& view) override {
    return "I have been watching how " + view.config.name_of(first_candidate(view)) +
           " steered the talk; that is where I would look first.";
  }

  AssassinGuess assassinate(const AgentView& view) override {
    return AssassinGuess{first_candidate(view), "Process of elimination."};
  }

  ReflectionPayload reflect(const AgentView& view) override {
    ReflectionPayload out;
    out.self_assessment = "Game " + std::to_string(view.game_id) +
                          ": I held my line and paid attention to the vote patterns.";
    for (PlayerId p = 0; p < view.config.player_count; ++p) {
      if (p == view.self) continue;
      std::string text = "Game " + std::to_string(view.game_id) + ": " +
                         view.config.name_of(p) + " ";
      if (!speech_.descriptor_words.empty()) {
        const std::size_t idx = static_cast<std::size_t>(view.game_id + p + view.self) %
                                speech_.descriptor_words.size();
        text += "came across as " + speech_.descriptor_words[idx] + " to me.";
      } else {
        text += "played a steady line and gave little away.";
      }
      out.observations[p] = text;
    }
    return out;
  }

 protected:
  // Per-decision generator: a pure function of (seed, view, salt), so the
  // same seed and view always produce the same decision.
  Rng decision_rng(const AgentView& view, std::uint64_t salt) const {
    std::uint64_t key = mix_seed(seed_, static_cast<std::uint64_t>(view.game_id));
    key = mix_seed(key, static_cast<std::uint64_t>(view.mission * 64 + view.attempt));
    key = mix_seed(key, static_cast<std::uint64_t>(view.self * 16 +
                                                   static_cast<int>(view.phase)));
    return Rng(mix_seed(key, salt));
  }

  std::size_t pattern_index(const AgentView& view) const {
    return static_cast<std::size_t>(view.game_id * 31 + view.mission * 7 +
                                    view.attempt * 3 + view.self);
  }

  // Leader plus the following seats.
  std::vector<PlayerId> next_seat_team(const AgentView& view) const {
    std::vector<PlayerId> team;
    for (int i = 0; i < view.team_size; ++i) {
      team.push_back((view.leader + i) % view.config.player_count);
    }
    std::sort(team.begin(), team.end());
    return team;
  }

  bool on_team(const AgentView& view) const {
    return std::find(view.current_team.begin(), view.current_team.end(), view.self) !=
           view.current_team.end();
  }

  PlayerId first_candidate(const AgentView& view) const {
    if (!view.assassination_candidates.empty()) return view.assassination_candidates.front();
    // Outside the assassination phase fall back to the first non-teammate seat.
    for (PlayerId p = 0; p < view.config.player_count; ++p) {
      if (p != view.self && !view.knowledge.evil_teammates.count(p)) return p;
    }
    return 0;
  }

  virtual std::vector<PlayerId> choose_team(const AgentView& view) {
    return next_seat_team(view);
  }
  virtual std::string proposal_reasoning(const AgentView& view) {
    (void)view;
    return "Keeping the lineup simple and close to the leader.";
  }
  virtual std::string discussion_line(const AgentView& view) {
    (void)view;
    return "I can live with this team; let's watch the result closely.";
  }
  virtual Vote vote_policy(const AgentView& view) {
    (void)view;
    return Vote::Approve;
  }
  virtual MissionAction action_policy(const AgentView& view) {
    (void)view;
    return MissionAction::Success;
  }

  std::uint64_t seed_;
  BotSpeechConfig speech_;
};

// Uniformly random legal decisions; useful as a stress baseline.
class RandomAgent : public ScriptedAgent {
 public:
  using ScriptedAgent::ScriptedAgent;
  std::string kind() const override { return "random"; }

 protected:
  std::vector<PlayerId> choose_team(const AgentView& view) override {
    Rng rng = decision_rng(view, 1);
    std::vector<PlayerId> seats(static_cast<std::size_t>(view.config.player_count));
    for (int i = 0; i < view.config.player_count; ++i) seats[static_cast<std::size_t>(i)] = i;
    rng.shuffle(seats);
    seats.resize(static_cast<std::size_t>(view.team_size));
    std::sort(seats.begin(), seats.end());
    return seats;
  }
  Vote vote_policy(const AgentView& view) override {
    Rng rng = decision_rng(view, 2);
    return rng.coin() ? Vote::Approve : Vote::Reject;
  }
  MissionAction action_policy(const AgentView& view) override {
    Rng rng = decision_rng(view, 3);
    return rng.coin() ? MissionAction::Success : MissionAction::Fail;
  }

 public:
  AssassinGuess assassinate(const AgentView& view) override {
    Rng rng = decision_rng(view, 4);
    if (view.assassination_candidates.empty()) return ScriptedAgent::assassinate(view);
    return AssassinGuess{rng.pick(view.assassination_candidates), "Going with my gut."};
  }
};

// Approves everything, proposes seat-order teams, always plays Success.
class HonestGoodBot : public ScriptedAgent {
 public:
  using ScriptedAgent::ScriptedAgent;
  std::string kind() const override { return "honest"; }
};

// Fails every mission it reaches and votes for teams that include its side.
class NaiveEvilBot : public ScriptedAgent {
 public:
  using ScriptedAgent::ScriptedAgent;
  std::string kind() const override { return "naive_evil"; }

 protected:
  Vote vote_policy(const AgentView& view) override {
    if (!is_evil(view.role)) return Vote::Approve;
    for (PlayerId p : view.current_team) {
      if (p == view.self || view.knowledge.evil_teammates.count(p)) return Vote::Approve;
    }
    return Vote::Reject;
  }
  MissionAction action_policy(const AgentView& view) override {
    (void)view;
    return MissionAction::Fail;
  }
  std::string discussion_line(const AgentView& view) override {
    (void)view;
    return "This lineup works for me; I see no reason to drag it out.";
  }
};

// Passes missions before `pass_until` to build trust, then sabotages.
class SleeperEvilBot : public ScriptedAgent {
 public:
  SleeperEvilBot(std::uint64_t seed, int pass_until, BotSpeechConfig speech = {})
      : ScriptedAgent(seed, std::move(speech)), pass_until_(pass_until) {}
  std::string kind() const override { return "sleeper_evil"; }
  int pass_until() const { return pass_until_; }

 protected:
  MissionAction action_policy(const AgentView& view) override {
    return view.mission < pass_until_ ? MissionAction::Success : MissionAction::Fail;
  }
  std::string discussion_line(const AgentView& view) override {
    (void)view;
    return "I am fine with this team; early momentum matters more than arguing.";
  }

 private:
  int pass_until_;
};

}  // namespace avalon
