#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "avalon/engine.hpp"
#include "avalon/memory.hpp"

namespace avalon {

inline constexpr int kLogSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

// Captured for every gateway-backed decision so no prompt or response is lost.
struct DecisionTrace {
  std::string system_text;
  std::string user_text;
  std::string raw_response;
  std::string response_body;  // verbatim provider body (empty for canned replies)
  std::string model;
  std::string effort;
  double latency_seconds = 0.0;
  int attempts = 1;   // transport attempts for the final request
  int reprompts = 0;  // parse-retry rounds before this response
  bool fallback = false;

  bool operator==(const DecisionTrace&) const = default;
};

struct ProposalEvent {
  int mission = 0, attempt = 0;
  PlayerId leader = 0;
  std::vector<PlayerId> team;
  std::string reasoning;
  std::optional<DecisionTrace> trace;
  bool operator==(const ProposalEvent&) const = default;
};

struct DiscussionEvent {
  int mission = 0, attempt = 0;
  PlayerId speaker = 0;
  std::string text;
  std::optional<DecisionTrace> trace;
  bool operator==(const DiscussionEvent&) const = default;
};

struct VoteEvent {
  int mission = 0, attempt = 0;
  PlayerId voter = 0;
  Vote vote = Vote::Approve;
  std::string comment;
  std::optional<DecisionTrace> trace;
  bool operator==(const VoteEvent&) const = default;
};

struct MissionActionEvent {
  int mission = 0;
  PlayerId player = 0;
  MissionAction action = MissionAction::Success;
  std::optional<DecisionTrace> trace;
  bool operator==(const MissionActionEvent&) const = default;
};

struct MissionResultEvent {
  int mission = 0;
  std::vector<PlayerId> team;
  int fail_count = 0;
  MissionResult result = MissionResult::Success;
  bool operator==(const MissionResultEvent&) const = default;
};

struct ConclaveEvent {
  PlayerId speaker = 0;
  std::string text;
  std::optional<DecisionTrace> trace;
  bool operator==(const ConclaveEvent&) const = default;
};

struct AssassinationEvent {
  PlayerId assassin = 0;
  PlayerId guess = 0;
  bool correct = false;
  std::optional<DecisionTrace> trace;
  bool operator==(const AssassinationEvent&) const = default;
};

struct ReflectionEvent {
  PlayerId author = 0;
  RoleKind author_role = RoleKind::LoyalServant;
  std::string self_assessment;
  std::map<std::string, Observation> observations;  // target name -> note
  std::optional<DecisionTrace> trace;
  bool operator==(const ReflectionEvent&) const = default;
};

struct AnomalyEvent {
  std::string kind;     // e.g. parse_fallback, illegal_guess_retry, aborted
  std::string context;  // where it happened
  std::string detail;
  bool operator==(const AnomalyEvent&) const = default;
};

struct OutcomeEvent {
  GameOutcome outcome;
  bool operator==(const OutcomeEvent&) const = default;
};

using GameEvent = std::variant<ProposalEvent, DiscussionEvent, VoteEvent, MissionActionEvent,
                               MissionResultEvent, ConclaveEvent, AssassinationEvent,
                               ReflectionEvent, AnomalyEvent, OutcomeEvent>;

// ---------------------------------------------------------------------------
// Log container
// ---------------------------------------------------------------------------

struct LogHeader {
  int schema_version = kLogSchemaVersion;
  std::string tournament_id;
  int game_id = 1;
  std::uint64_t seed = 0;
  std::string preset = "custom";     // A..D or custom
  std::string memory_mode = "none";  // full | none
  std::string effort = "low";
  std::string agents = "scripted";   // roster policy label
  std::string model;                 // model id when gateway-backed
  std::string sampling = "provider-default";
  PlayerId initial_leader = 0;
  GameConfig config;
  std::vector<RoleKind> roles;  // ground truth, seat order

  bool operator==(const LogHeader&) const = default;
};

struct GameLog {
  LogHeader header;
  std::vector<GameEvent> events;
  std::optional<GameOutcome> outcome;
  bool aborted = false;

  const std::string& name_of(PlayerId p) const { return header.config.name_of(p); }

  bool operator==(const GameLog&) const = default;
};

// ---------------------------------------------------------------------------
// JSON mapping
// ---------------------------------------------------------------------------

namespace logdetail {

inline Json trace_to_json(const DecisionTrace& t) {
  return Json{{"system", t.system_text},
              {"user", t.user_text},
              {"response", t.raw_response},
              {"response_body", t.response_body},
              {"model", t.model},
              {"effort", t.effort},
              {"latency_seconds", t.latency_seconds},
              {"attempts", t.attempts},
              {"reprompts", t.reprompts},
              {"fallback", t.fallback}};
}

inline DecisionTrace trace_from_json(const Json& j) {
  DecisionTrace t;
  t.system_text = j.at("system").get<std::string>();
  t.user_text = j.at("user").get<std::string>();
  t.raw_response = j.at("response").get<std::string>();
  t.response_body = j.at("response_body").get<std::string>();
  t.model = j.at("model").get<std::string>();
  t.effort = j.at("effort").get<std::string>();
  t.latency_seconds = j.at("latency_seconds").get<double>();
  t.attempts = j.at("attempts").get<int>();
  t.reprompts = j.at("reprompts").get<int>();
  t.fallback = j.at("fallback").get<bool>();
  return t;
}

inline void put_trace(Json& j, const std::optional<DecisionTrace>& trace) {
  if (trace) j["trace"] = trace_to_json(*trace);
}

inline std::optional<DecisionTrace> get_trace(const Json& j) {
  if (!j.contains("trace")) return std::nullopt;
  return trace_from_json(j.at("trace"));
}

inline Json names_json(const GameConfig& config, const std::vector<PlayerId>& seats) {
  Json arr = Json::array();
  for (PlayerId p : seats) arr.push_back(config.name_of(p));
  return arr;
}

inline PlayerId seat_of(const GameConfig& config, const std::string& name) {
  for (PlayerId p = 0; p < config.player_count; ++p) {
    if (config.roster[static_cast<std::size_t>(p)] == name) return p;
  }
  throw SchemaMigrationError("log names unknown player: " + name);
}

inline std::vector<PlayerId> seats_of(const GameConfig& config, const Json& names) {
  std::vector<PlayerId> out;
  for (const auto& n : names) out.push_back(seat_of(config, n.get<std::string>()));
  return out;
}

inline Json outcome_to_json(const GameOutcome& o, const GameConfig& config) {
  Json j{{"winner", team_token(o.winner)},
         {"via", win_method_token(o.via)},
         {"merlin", config.name_of(o.merlin)}};
  if (o.assassin_guess) j["assassin_guess"] = config.name_of(*o.assassin_guess);
  return j;
}

inline GameOutcome outcome_from_json(const Json& j, const GameConfig& config) {
  GameOutcome o;
  o.winner = parse_team_token(j.at("winner").get<std::string>());
  o.via = parse_win_method_token(j.at("via").get<std::string>());
  o.merlin = seat_of(config, j.at("merlin").get<std::string>());
  if (j.contains("assassin_guess")) {
    o.assassin_guess = seat_of(config, j.at("assassin_guess").get<std::string>());
  }
  return o;
}

}  // namespace logdetail

inline Json header_to_json(const LogHeader& h) {
  Json sizes = Json::array();
  for (int s : h.config.mission_sizes) sizes.push_back(s);
  Json double_fail = Json::array();
  for (int m : h.config.double_fail_missions) double_fail.push_back(m);
  Json roles = Json::object();
  for (PlayerId p = 0; p < h.config.player_count; ++p) {
    roles[h.config.name_of(p)] = role_token(h.roles[static_cast<std::size_t>(p)]);
  }
  return Json{{"type", "header"},
              {"schema_version", h.schema_version},
              {"tournament_id", h.tournament_id},
              {"game_id", h.game_id},
              {"seed", h.seed},
              {"preset", h.preset},
              {"memory", h.memory_mode},
              {"effort", h.effort},
              {"agents", h.agents},
              {"model", h.model},
              {"sampling", h.sampling},
              {"initial_leader", h.initial_leader},
              {"config",
               Json{{"player_count", h.config.player_count},
                    {"roster", h.config.roster},
                    {"mission_sizes", sizes},
                    {"double_fail_missions", double_fail},
                    {"assassin_designate", role_token(h.config.assassin_designate)},
                    {"max_rejections", h.config.max_rejections}}},
              {"roles", roles}};
}

inline LogHeader header_from_json(const Json& j) {
  LogHeader h;
  h.schema_version = j.value("schema_version", 0);
  if (h.schema_version != kLogSchemaVersion) {
    throw SchemaMigrationError("game log has schema version " +
                               std::to_string(h.schema_version) + ", expected " +
                               std::to_string(kLogSchemaVersion) +
                               "; no migration path is defined");
  }
  h.tournament_id = j.at("tournament_id").get<std::string>();
  h.game_id = j.at("game_id").get<int>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.preset = j.at("preset").get<std::string>();
  h.memory_mode = j.at("memory").get<std::string>();
  h.effort = j.at("effort").get<std::string>();
  h.agents = j.at("agents").get<std::string>();
  h.model = j.at("model").get<std::string>();
  h.sampling = j.at("sampling").get<std::string>();
  h.initial_leader = j.at("initial_leader").get<PlayerId>();
  const Json& c = j.at("config");
  h.config.player_count = c.at("player_count").get<int>();
  h.config.roster = c.at("roster").get<std::vector<std::string>>();
  const auto sizes = c.at("mission_sizes").get<std::vector<int>>();
  if (sizes.size() != 5) throw SchemaMigrationError("mission_sizes must have 5 entries");
  std::copy(sizes.begin(), sizes.end(), h.config.mission_sizes.begin());
  for (const auto& m : c.at("double_fail_missions")) {
    h.config.double_fail_missions.insert(m.get<int>());
  }
  h.config.assassin_designate = parse_role_token(c.at("assassin_designate").get<std::string>());
  h.config.max_rejections = c.at("max_rejections").get<int>();
  const Json& roles_json = j.at("roles");
  if (static_cast<int>(roles_json.size()) != h.config.player_count) {
    throw SchemaMigrationError("header roles do not cover every player");
  }
  h.roles.resize(static_cast<std::size_t>(h.config.player_count));
  h.config.roles.clear();
  for (const auto& [name, token] : roles_json.items()) {
    const PlayerId p = logdetail::seat_of(h.config, name);
    h.roles[static_cast<std::size_t>(p)] = parse_role_token(token.get<std::string>());
  }
  h.config.roles = h.roles;
  std::sort(h.config.roles.begin(), h.config.roles.end());
  return h;
}

inline Json event_to_json(const GameEvent& event, const GameConfig& config) {
  using namespace logdetail;
  Json j;
  std::visit(
      [&](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, ProposalEvent>) {
          j = Json{{"type", "proposal"},
                   {"mission", e.mission},
                   {"attempt", e.attempt},
                   {"leader", config.name_of(e.leader)},
                   {"team", names_json(config, e.team)},
                   {"reasoning", e.reasoning}};
          put_trace(j, e.trace);
        } else if constexpr (std::is_same_v<E, DiscussionEvent>) {
          j = Json{{"type", "discussion"},
                   {"mission", e.mission},
                   {"attempt", e.attempt},
                   {"speaker", config.name_of(e.speaker)},
                   {"text", e.text}};
          put_trace(j, e.trace);
        } else if constexpr (std::is_same_v<E, VoteEvent>) {
          j = Json{{"type", "vote"},
                   {"mission", e.mission},
                   {"attempt", e.attempt},
                   {"voter", config.name_of(e.voter)},
                   {"vote", vote_token(e.vote)},
                   {"comment", e.comment}};
          put_trace(j, e.trace);
        } else if constexpr (std::is_same_v<E, MissionActionEvent>) {
          j = Json{{"type", "mission_action"},
                   {"mission", e.mission},
                   {"player", config.name_of(e.player)},
                   {"action", action_token(e.action)}};
          put_trace(j, e.trace);
        } else if constexpr (std::is_same_v<E, MissionResultEvent>) {
          j = Json{{"type", "mission_result"},
                   {"mission", e.mission},
                   {"team", names_json(config, e.team)},
                   {"fail_count", e.fail_count},
                   {"result", e.result == MissionResult::Success ? "success" : "fail"}};
        } else if constexpr (std::is_same_v<E, ConclaveEvent>) {
          j = Json{{"type", "conclave"},
                   {"speaker", config.name_of(e.speaker)},
                   {"text", e.text}};
          put_trace(j, e.trace);
        } else if constexpr (std::is_same_v<E, AssassinationEvent>) {
          j = Json{{"type", "assassination"},
                   {"assassin", config.name_of(e.assassin)},
                   {"guess", config.name_of(e.guess)},
                   {"correct", e.correct}};
          put_trace(j, e.trace);
        } else if constexpr (std::is_same_v<E, ReflectionEvent>) {
          Json obs = Json::object();
          for (const auto& [target, o] : e.observations) {
            obs[target] = Json{{"text", o.text}, {"target_role", role_token(o.target_role)}};
          }
          j = Json{{"type", "reflection"},
                   {"author", config.name_of(e.author)},
                   {"author_role", role_token(e.author_role)},
                   {"self_assessment", e.self_assessment},
                   {"observations", obs}};
          put_trace(j, e.trace);
        } else if constexpr (std::is_same_v<E, AnomalyEvent>) {
          j = Json{{"type", "anomaly"},
                   {"kind", e.kind},
                   {"context", e.context},
                   {"detail", e.detail}};
        } else if constexpr (std::is_same_v<E, OutcomeEvent>) {
          j = Json{{"type", "outcome"}};
          j.update(outcome_to_json(e.outcome, config));
        }
      },
      event);
  return j;
}

inline GameEvent event_from_json(const Json& j, const GameConfig& config) {
  using namespace logdetail;
  const std::string type = j.at("type").get<std::string>();
  if (type == "proposal") {
    ProposalEvent e;
    e.mission = j.at("mission").get<int>();
    e.attempt = j.at("attempt").get<int>();
    e.leader = seat_of(config, j.at("leader").get<std::string>());
    e.team = seats_of(config, j.at("team"));
    e.reasoning = j.at("reasoning").get<std::string>();
    e.trace = get_trace(j);
    return e;
  }
  if (type == "discussion") {
    DiscussionEvent e;
    e.mission = j.at("mission").get<int>();
    e.attempt = j.at("attempt").get<int>();
    e.speaker = seat_of(config, j.at("speaker").get<std::string>());
    e.text = j.at("text").get<std::string>();
    e.trace = get_trace(j);
    return e;
  }
  if (type == "vote") {
    VoteEvent e;
    e.mission = j.at("mission").get<int>();
    e.attempt = j.at("attempt").get<int>();
    e.voter = seat_of(config, j.at("voter").get<std::string>());
    e.vote = parse_vote_token(j.at("vote").get<std::string>());
    e.comment = j.at("comment").get<std::string>();
    e.trace = get_trace(j);
    return e;
  }
  if (type == "mission_action") {
    MissionActionEvent e;
    e.mission = j.at("mission").get<int>();
    e.player = seat_of(config, j.at("player").get<std::string>());
    e.action = parse_action_token(j.at("action").get<std::string>());
    e.trace = get_trace(j);
    return e;
  }
  if (type == "mission_result") {
    MissionResultEvent e;
    e.mission = j.at("mission").get<int>();
    e.team = seats_of(config, j.at("team"));
    e.fail_count = j.at("fail_count").get<int>();
    e.result = j.at("result").get<std::string>() == "success" ? MissionResult::Success
                                                              : MissionResult::Fail;
    return e;
  }
  if (type == "conclave") {
    ConclaveEvent e;
    e.speaker = seat_of(config, j.at("speaker").get<std::string>());
    e.text = j.at("text").get<std::string>();
    e.trace = get_trace(j);
    return e;
  }
  if (type == "assassination") {
    AssassinationEvent e;
    e.assassin = seat_of(config, j.at("assassin").get<std::string>());
    e.guess = seat_of(config, j.at("guess").get<std::string>());
    e.correct = j.at("correct").get<bool>();
    e.trace = get_trace(j);
    return e;
  }
  if (type == "reflection") {
    ReflectionEvent e;
    e.author = seat_of(config, j.at("author").get<std::string>());
    e.author_role = parse_role_token(j.at("author_role").get<std::string>());
    e.self_assessment = j.at("self_assessment").get<std::string>();
    for (const auto& [target, o] : j.at("observations").items()) {
      e.observations[target] =
          Observation{o.at("text").get<std::string>(),
                      parse_role_token(o.at("target_role").get<std::string>())};
    }
    e.trace = get_trace(j);
    return e;
  }
  if (type == "anomaly") {
    AnomalyEvent e;
    e.kind = j.at("kind").get<std::string>();
    e.context = j.at("context").get<std::string>();
    e.detail = j.at("detail").get<std::string>();
    return e;
  }
  if (type == "outcome") {
    return OutcomeEvent{outcome_from_json(j, config)};
  }
  throw SchemaMigrationError("unknown event type: " + type);
}

// ---------------------------------------------------------------------------
// Newline-delimited serialization
// ---------------------------------------------------------------------------

// Field ordering is fixed by the builders above, so save -> load -> save is
// byte-identical.
inline std::string log_to_jsonl(const GameLog& log) {
  std::string out = header_to_json(log.header).dump() + "\n";
  for (const auto& event : log.events) {
    out += event_to_json(event, log.header.config).dump() + "\n";
  }
  return out;
}

inline GameLog log_from_jsonl(const std::string& text) {
  GameLog log;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    const bool truncated = end == std::string::npos;
    if (truncated) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    if (!line.empty()) {
      Json j;
      try {
        j = Json::parse(line);
      } catch (const Json::parse_error& e) {
        throw LogParseError("game log line is not valid JSON: " + std::string(e.what()),
                            pos + (e.byte > 0 ? e.byte - 1 : 0));
      }
      if (truncated) {
        // A well-formed log ends every record with a newline.
        throw LogParseError("game log ends mid-record (missing final newline)", pos);
      }
      if (!have_header) {
        if (j.value("type", "") != "header") {
          throw LogParseError("game log does not start with a header record", pos);
        }
        log.header = header_from_json(j);
        have_header = true;
      } else {
        GameEvent event = event_from_json(j, log.header.config);
        if (const auto* oc = std::get_if<OutcomeEvent>(&event)) {
          log.outcome = oc->outcome;
        }
        log.events.push_back(std::move(event));
      }
    } else if (truncated) {
      break;
    }
    pos = end + 1;
  }
  if (!have_header) throw LogParseError("game log is empty", 0);
  // A log that never reached an outcome records an aborted game.
  log.aborted = !log.outcome.has_value();
  return log;
}

inline void save_log(const std::filesystem::path& path, const GameLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw AvalonError("cannot write game log: " + path.string());
  out << log_to_jsonl(log);
}

inline GameLog load_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AvalonError("cannot read game log: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return log_from_jsonl(text);
}

// Reflection records embedded in a log, keyed for the memory store.
inline std::vector<ReflectionRecord> reflections_in_log(const GameLog& log) {
  std::vector<ReflectionRecord> out;
  for (const auto& event : log.events) {
    if (const auto* r = std::get_if<ReflectionEvent>(&event)) {
      ReflectionRecord record;
      record.tournament_id = log.header.tournament_id;
      record.game_id = log.header.game_id;
      record.author = log.name_of(r->author);
      record.author_role = r->author_role;
      record.self_assessment = r->self_assessment;
      record.observations = r->observations;
      out.push_back(std::move(record));
    }
  }
  return out;
}

}  // namespace avalon
