#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avalon/core.hpp"

namespace avalon {

using Json = nlohmann::ordered_json;

inline constexpr int kMemorySchemaVersion = 1;

// One per-target note inside a reflection; the target's actual role is joined
// in at reveal time so later analysis can condition on it.
struct Observation {
  std::string text;
  RoleKind target_role = RoleKind::LoyalServant;

  bool operator==(const Observation&) const = default;
};

// One agent's post-game reflection: the unit of cross-game memory.
struct ReflectionRecord {
  std::string tournament_id;
  int game_id = 0;
  std::string author;  // player name; names are fixed across a tournament
  RoleKind author_role = RoleKind::LoyalServant;
  std::string self_assessment;
  std::map<std::string, Observation> observations;  // target name -> note

  bool operator==(const ReflectionRecord&) const = default;
};

struct ObservationRef {
  int game_id = 0;
  std::string text;
  RoleKind target_role = RoleKind::LoyalServant;

  bool operator==(const ObservationRef&) const = default;
};

// What one agent carries into a new game: its own recent self-assessments and
// everything it has noted about each other player, oldest first.
struct MemoryContext {
  std::vector<std::pair<int, std::string>> self_assessments;  // newest-last, <= window
  std::map<std::string, std::vector<ObservationRef>> observations_by_target;

  bool empty() const { return self_assessments.empty() && observations_by_target.empty(); }
  bool operator==(const MemoryContext&) const = default;
};

inline Json reflection_to_json(const ReflectionRecord& r) {
  Json obs = Json::object();
  for (const auto& [target, o] : r.observations) {
    obs[target] = Json{{"text", o.text}, {"target_role", role_token(o.target_role)}};
  }
  return Json{{"schema_version", kMemorySchemaVersion},
              {"tournament_id", r.tournament_id},
              {"game_id", r.game_id},
              {"author", r.author},
              {"author_role", role_token(r.author_role)},
              {"self_assessment", r.self_assessment},
              {"observations", obs}};
}

inline ReflectionRecord reflection_from_json(const Json& j) {
  const int version = j.value("schema_version", 0);
  if (version != kMemorySchemaVersion) {
    throw SchemaMigrationError("reflection record has schema version " +
                               std::to_string(version) + ", expected " +
                               std::to_string(kMemorySchemaVersion));
  }
  ReflectionRecord r;
  r.tournament_id = j.at("tournament_id").get<std::string>();
  r.game_id = j.at("game_id").get<int>();
  r.author = j.at("author").get<std::string>();
  r.author_role = parse_role_token(j.at("author_role").get<std::string>());
  r.self_assessment = j.at("self_assessment").get<std::string>();
  for (const auto& [target, o] : j.at("observations").items()) {
    r.observations[target] = Observation{o.at("text").get<std::string>(),
                                         parse_role_token(o.at("target_role").get<std::string>())};
  }
  return r;
}

// Append-only store of reflections for one tournament. Single writer; games
// that share it run sequentially.
class MemoryStore {
 public:
  // Throws IdempotencyConflictError when (tournament, game, author) was
  // already recorded.
  void record_reflection(const ReflectionRecord& record) {
    for (const auto& existing : records_) {
      if (existing.tournament_id == record.tournament_id &&
          existing.game_id == record.game_id && existing.author == record.author) {
        throw IdempotencyConflictError("reflection already recorded for " + record.author +
                                       " in game " + std::to_string(record.game_id));
      }
    }
    records_.push_back(record);
  }

  // The agent's own last `self_window` self-assessments before `upcoming_game_id`,
  // plus all of its own prior observations grouped per target. Never includes
  // another agent's reflections. observation_cap 0 means uncapped.
  MemoryContext context_for(const std::string& agent, int upcoming_game_id,
                            int self_window = 3, int observation_cap = 0) const {
    MemoryContext context;
    std::vector<const ReflectionRecord*> own;
    for (const auto& r : records_) {
      if (r.author == agent && r.game_id < upcoming_game_id) own.push_back(&r);
    }
    std::sort(own.begin(), own.end(), [](const ReflectionRecord* a, const ReflectionRecord* b) {
      return a->game_id < b->game_id;
    });
    const int start = std::max(0, static_cast<int>(own.size()) - self_window);
    for (std::size_t i = static_cast<std::size_t>(start); i < own.size(); ++i) {
      context.self_assessments.emplace_back(own[i]->game_id, own[i]->self_assessment);
    }
    for (const ReflectionRecord* r : own) {
      for (const auto& [target, o] : r->observations) {
        context.observations_by_target[target].push_back(
            ObservationRef{r->game_id, o.text, o.target_role});
      }
    }
    if (observation_cap > 0) {
      for (auto& [target, refs] : context.observations_by_target) {
        if (static_cast<int>(refs.size()) > observation_cap) {
          refs.erase(refs.begin(), refs.end() - observation_cap);
        }
      }
    }
    return context;
  }

  std::size_t size() const { return records_.size(); }
  const std::vector<ReflectionRecord>& records() const { return records_; }

  // One reflection per line, newline-delimited JSON.
  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw AvalonError("cannot write memory store: " + path.string());
    for (const auto& r : records_) {
      out << reflection_to_json(r).dump() << "\n";
    }
  }

  static MemoryStore load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AvalonError("cannot read memory store: " + path.string());
    MemoryStore store;
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
      if (!line.empty()) {
        Json j;
        try {
          j = Json::parse(line);
        } catch (const Json::parse_error& e) {
          throw LogParseError("memory store line is not valid JSON: " + std::string(e.what()),
                              offset + (e.byte > 0 ? e.byte - 1 : 0));
        }
        store.records_.push_back(reflection_from_json(j));
      }
      offset += line.size() + 1;
    }
    return store;
  }

 private:
  std::vector<ReflectionRecord> records_;
};

// Deterministic plain-text block injected ahead of the role brief. Empty
// context renders to an empty string.
inline std::string render_memory_prompt(const MemoryContext& context) {
  if (context.empty()) return "";
  std::string out = "MEMORY FROM PREVIOUS GAMES\n";
  if (!context.self_assessments.empty()) {
    out += "Your recent self-assessments:\n";
    for (const auto& [game_id, text] : context.self_assessments) {
      out += "- Game " + std::to_string(game_id) + ": " + text + "\n";
    }
  }
  if (!context.observations_by_target.empty()) {
    out += "Your accumulated observations about each player:\n";
    for (const auto& [target, refs] : context.observations_by_target) {
      out += "About " + target + ":\n";
      for (const auto& ref : refs) {
        out += "- Game " + std::to_string(ref.game_id) + " (" + target + " was " +
               alignment_name(alignment_of(ref.target_role)) + ", " +
               role_name(ref.target_role) + "): " + ref.text + "\n";
      }
    }
  }
  out += "END MEMORY\n";
  return out;
}

}  // namespace avalon
