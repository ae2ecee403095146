#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "avalon/agents.hpp"
#include "avalon/log.hpp"
#include "avalon/memory.hpp"
#include "avalon/view.hpp"

namespace avalon {

// ---------------------------------------------------------------------------
// Dataset presets
// ---------------------------------------------------------------------------

enum class MemoryMode { Full, None };

inline std::string memory_mode_token(MemoryMode m) {
  return m == MemoryMode::Full ? "full" : "none";
}

struct GameSpec {
  int game_id = 1;
  int player_count = 5;
  Effort effort = Effort::Low;
  MemoryMode memory = MemoryMode::Full;
  std::uint64_t seed = 1;
};

// The four tournament conditions: A reputation (50 games, 5p, memory),
// B player-count sweep with memory, C the matched sweep without memory,
// D the reasoning-effort sweep (6 games per level).
struct DatasetPreset {
  std::string id = "A";
  int games = 50;
  MemoryMode memory = MemoryMode::Full;

  static DatasetPreset by_id(const std::string& id) {
    if (id == "A") return DatasetPreset{"A", 50, MemoryMode::Full};
    if (id == "B") return DatasetPreset{"B", 60, MemoryMode::Full};
    if (id == "C") return DatasetPreset{"C", 60, MemoryMode::None};
    if (id == "D") return DatasetPreset{"D", 18, MemoryMode::Full};
    throw ConfigError("unknown dataset preset: " + id + " (expected A, B, C or D)");
  }
};

// Per-game seeds derive as base_seed + game_id, so any game can be re-run
// alone.
inline std::vector<GameSpec> preset_schedule(const DatasetPreset& preset,
                                             std::uint64_t base_seed) {
  std::vector<GameSpec> schedule;
  for (int id = 1; id <= preset.games; ++id) {
    GameSpec spec;
    spec.game_id = id;
    spec.memory = preset.memory;
    spec.seed = base_seed + static_cast<std::uint64_t>(id);
    if (preset.id == "B" || preset.id == "C") {
      spec.player_count = 5 + (id - 1) / 10;  // ten games per count, 5..10
    } else {
      spec.player_count = 5;
    }
    if (preset.id == "D") {
      spec.effort = id <= 6 ? Effort::Low : (id <= 12 ? Effort::Medium : Effort::High);
    }
    schedule.push_back(spec);
  }
  return schedule;
}

// ---------------------------------------------------------------------------
// Single game orchestration
// ---------------------------------------------------------------------------

struct RunGameOptions {
  std::string tournament_id = "adhoc";
  int game_id = 1;
  std::uint64_t seed = 1;
  std::string preset_label = "custom";
  MemoryMode memory_mode = MemoryMode::None;
  Effort effort = Effort::Low;
  std::string agents_label = "scripted";
  std::string model;  // recorded in the header when gateway-backed
  std::optional<std::vector<RoleKind>> forced_roles;  // fixtures and tests
  PlayerId initial_leader = 0;
  int max_decision_retries = 2;  // orchestrator retries for illegal decisions
  // Test hook: observes every view handed to an agent.
  std::function<void(const AgentView&, DecisionKind)> inspector;
};

struct RunGameResult {
  GameLog log;
  GameState final_state;
};

namespace rundetail {

inline AgentView base_view(const GameState& state, const GameLog& log,
                           const std::vector<NightKnowledge>& knowledge, PlayerId seat,
                           const RunGameOptions& options, const MemoryStore* memory) {
  AgentView view;
  view.game_id = options.game_id;
  view.self = seat;
  view.role = state.role_of(seat);
  view.knowledge = knowledge[static_cast<std::size_t>(seat)];
  view.reasoning_effort = options.effort;
  view.config = state.config;
  view.phase = state.phase;
  view.leader = state.leader;
  if (state.phase == Phase::Discussion || state.phase == Phase::Vote ||
      state.phase == Phase::Mission) {
    const ProposalRecord& proposal = state.current_proposal();
    view.mission = proposal.mission;
    view.attempt = proposal.attempt;
    view.leader = proposal.leader;
    view.current_team = proposal.team;
    view.team_size = state.config.mission_size(proposal.mission);
  } else if (state.phase == Phase::Proposal) {
    view.mission = state.current_mission();
    view.attempt = state.current_attempt();
    view.team_size = state.config.mission_size(view.mission);
  } else {
    view.mission = state.current_mission();
    view.attempt = 1;
    view.team_size = 0;
  }
  view.public_history = render_public_history(state.config, log.events);
  if (memory != nullptr) {
    view.memory = memory->context_for(state.config.name_of(seat), options.game_id);
  }
  return view;
}

inline void note_fallback(GameLog& log, const Agent& agent, DecisionKind kind,
                          const std::string& context) {
  if (agent.last_decision_fell_back()) {
    log.events.push_back(AnomalyEvent{"parse_fallback", context,
                                      "agent response unusable after retries; applied the "
                                      "deterministic default for " +
                                          decision_kind_name(kind)});
  }
}

inline std::optional<DecisionTrace> trace_of(const Agent& agent) {
  const DecisionTrace* trace = agent.last_trace();
  if (trace == nullptr) return std::nullopt;
  return *trace;
}

inline std::string context_label(const std::string& what, const GameState& state,
                                 PlayerId seat) {
  return what + " by " + state.config.name_of(seat) + " at mission " +
         std::to_string(state.current_mission()) + " attempt " +
         std::to_string(state.current_attempt());
}

}  // namespace rundetail

// Plays one full game: night, up to five proposal/discussion/vote rounds per
// mission, mission execution, the evil conclave and assassination when good
// completes three missions, and post-game reflections when memory is on.
inline RunGameResult run_game(const GameConfig& config,
                              std::vector<std::unique_ptr<Agent>>& agents,
                              MemoryStore* memory, const RunGameOptions& options) {
  if (static_cast<int>(agents.size()) != config.player_count) {
    throw RuleViolationError("agent roster size does not match player count");
  }
  if ((memory != nullptr) != (options.memory_mode == MemoryMode::Full)) {
    throw RuleViolationError("memory store must be present exactly when memory is on");
  }

  Rng rng(options.seed);
  const std::vector<RoleKind> roles =
      options.forced_roles ? *options.forced_roles : assign_roles(config, rng);

  RunGameResult result;
  GameLog& log = result.log;
  log.header.tournament_id = options.tournament_id;
  log.header.game_id = options.game_id;
  log.header.seed = options.seed;
  log.header.preset = options.preset_label;
  log.header.memory_mode = memory_mode_token(options.memory_mode);
  log.header.effort = effort_token(options.effort);
  log.header.agents = options.agents_label;
  log.header.model = options.model;
  log.header.initial_leader = options.initial_leader;
  log.header.config = config;
  log.header.roles = roles;

  GameState state = new_game(config, roles, options.initial_leader);
  const std::vector<NightKnowledge> knowledge = night_knowledge(roles);
  end_night(state);

  auto make_view = [&](PlayerId seat) {
    return rundetail::base_view(state, log, knowledge, seat, options, memory);
  };
  auto inspect = [&](const AgentView& view, DecisionKind kind) {
    if (options.inspector) options.inspector(view, kind);
  };

  try {
    std::vector<std::pair<PlayerId, std::string>> conclave_transcript;
    while (state.phase != Phase::Ended) {
      switch (state.phase) {
        case Phase::Proposal: {
          const PlayerId leader = state.leader;
          Agent& agent = *agents[static_cast<std::size_t>(leader)];
          AgentView view = make_view(leader);
          TeamProposal proposal;
          bool recorded = false;
          for (int round = 0; round <= options.max_decision_retries && !recorded; ++round) {
            inspect(view, DecisionKind::Propose);
            proposal = agent.propose(view);
            try {
              record_proposal(state, proposal.team, proposal.reasoning);
              recorded = true;
            } catch (const RuleViolationError& e) {
              log.events.push_back(AnomalyEvent{
                  "illegal_proposal", rundetail::context_label("proposal", state, leader),
                  e.what()});
              view.retry_notice = e.what();
            }
          }
          if (!recorded) {
            proposal = fallback_proposal(view);
            record_proposal(state, proposal.team, proposal.reasoning);
            log.events.push_back(AnomalyEvent{
                "proposal_fallback", rundetail::context_label("proposal", state, leader),
                "applied leader-plus-next-seats default team"});
          }
          rundetail::note_fallback(log, agent, DecisionKind::Propose,
                                   rundetail::context_label("proposal", state, leader));
          const ProposalRecord& record = state.current_proposal();
          log.events.push_back(ProposalEvent{record.mission, record.attempt, record.leader,
                                             record.team, record.reasoning,
                                             rundetail::trace_of(agent)});
          break;
        }
        case Phase::Discussion: {
          const ProposalRecord& proposal = state.current_proposal();
          const int n = config.player_count;
          for (int i = 0; i < n; ++i) {
            const PlayerId speaker = (proposal.leader + i) % n;
            Agent& agent = *agents[static_cast<std::size_t>(speaker)];
            AgentView view = make_view(speaker);
            inspect(view, DecisionKind::Discuss);
            const std::string text = agent.discuss(view);
            log.events.push_back(DiscussionEvent{proposal.mission, proposal.attempt, speaker,
                                                 text, rundetail::trace_of(agent)});
          }
          finish_discussion(state);
          break;
        }
        case Phase::Vote: {
          const ProposalRecord& proposal = state.current_proposal();
          std::map<PlayerId, Vote> ballot;
          for (PlayerId voter = 0; voter < config.player_count; ++voter) {
            Agent& agent = *agents[static_cast<std::size_t>(voter)];
            AgentView view = make_view(voter);
            inspect(view, DecisionKind::Vote);
            const VoteDecision decision = agent.vote(view);
            rundetail::note_fallback(log, agent, DecisionKind::Vote,
                                     rundetail::context_label("vote", state, voter));
            ballot[voter] = decision.vote;
            log.events.push_back(VoteEvent{proposal.mission, proposal.attempt, voter,
                                           decision.vote, decision.comment,
                                           rundetail::trace_of(agent)});
          }
          resolve_vote(state, ballot);
          break;
        }
        case Phase::Mission: {
          const ProposalRecord& proposal = state.current_proposal();
          std::map<PlayerId, MissionAction> actions;
          for (PlayerId member : proposal.team) {
            if (is_good(state.role_of(member))) {
              // The rules force Success for good players; no decision is made.
              actions[member] = MissionAction::Success;
              log.events.push_back(MissionActionEvent{proposal.mission, member,
                                                      MissionAction::Success, std::nullopt});
              continue;
            }
            Agent& agent = *agents[static_cast<std::size_t>(member)];
            AgentView view = make_view(member);
            inspect(view, DecisionKind::MissionAct);
            const MissionDecision decision = agent.mission_act(view);
            rundetail::note_fallback(log, agent, DecisionKind::MissionAct,
                                     rundetail::context_label("mission action", state, member));
            actions[member] = decision.action;
            log.events.push_back(MissionActionEvent{proposal.mission, member, decision.action,
                                                    rundetail::trace_of(agent)});
          }
          resolve_mission(state, actions);
          const MissionRecord& mission = state.missions.back();
          log.events.push_back(MissionResultEvent{mission.mission, mission.team,
                                                  mission.fail_count, mission.result});
          break;
        }
        case Phase::EvilConclave: {
          for (PlayerId seat : state.evil_seats()) {
            Agent& agent = *agents[static_cast<std::size_t>(seat)];
            AgentView view = make_view(seat);
            view.conclave_so_far = conclave_transcript;
            inspect(view, DecisionKind::Conclave);
            const std::string text = agent.conclave(view);
            conclave_transcript.emplace_back(seat, text);
            log.events.push_back(ConclaveEvent{seat, text, rundetail::trace_of(agent)});
          }
          begin_assassination(state);
          break;
        }
        case Phase::Assassination: {
          const PlayerId assassin = state.assassin_seat();
          Agent& agent = *agents[static_cast<std::size_t>(assassin)];
          AgentView view = make_view(assassin);
          view.conclave_so_far = conclave_transcript;
          view.assassination_candidates = state.good_seats();
          bool resolved = false;
          for (int round = 0; round <= options.max_decision_retries && !resolved; ++round) {
            inspect(view, DecisionKind::Assassinate);
            const AssassinGuess guess = agent.assassinate(view);
            rundetail::note_fallback(log, agent, DecisionKind::Assassinate,
                                     "assassination by " + config.name_of(assassin));
            try {
              const GameOutcome outcome = resolve_assassination(state, guess.guess);
              log.events.push_back(AssassinationEvent{assassin, guess.guess,
                                                      outcome.via == WinMethod::Assassination,
                                                      rundetail::trace_of(agent)});
              resolved = true;
            } catch (const IllegalGuessError& e) {
              log.events.push_back(AnomalyEvent{
                  "illegal_guess", "assassination by " + config.name_of(assassin), e.what()});
              view.retry_notice = e.what();
            }
          }
          if (!resolved) {
            const AssassinGuess guess = fallback_guess(view);
            const GameOutcome outcome = resolve_assassination(state, guess.guess);
            log.events.push_back(AnomalyEvent{
                "assassination_fallback", "assassination by " + config.name_of(assassin),
                "applied first-good-seat default guess"});
            log.events.push_back(AssassinationEvent{assassin, guess.guess,
                                                    outcome.via == WinMethod::Assassination,
                                                    std::nullopt});
          }
          break;
        }
        case Phase::Night:
        case Phase::Ended:
          throw RuleViolationError("unexpected phase in game loop");
      }
    }

    // Roles are revealed to everyone; with memory on, each agent reflects.
    if (options.memory_mode == MemoryMode::Full) {
      for (PlayerId seat = 0; seat < config.player_count; ++seat) {
        Agent& agent = *agents[static_cast<std::size_t>(seat)];
        AgentView view = make_view(seat);
        view.revealed_roles = roles;
        view.outcome = state.outcome;
        inspect(view, DecisionKind::Reflect);
        const ReflectionPayload payload = agent.reflect(view);
        rundetail::note_fallback(log, agent, DecisionKind::Reflect,
                                 "reflection by " + config.name_of(seat));
        ReflectionEvent event;
        event.author = seat;
        event.author_role = state.role_of(seat);
        event.self_assessment = payload.self_assessment;
        for (const auto& [target, text] : payload.observations) {
          event.observations[config.name_of(target)] =
              Observation{text, state.role_of(target)};
        }
        event.trace = rundetail::trace_of(agent);
        log.events.push_back(event);
        if (memory != nullptr) {
          ReflectionRecord record;
          record.tournament_id = options.tournament_id;
          record.game_id = options.game_id;
          record.author = config.name_of(seat);
          record.author_role = state.role_of(seat);
          record.self_assessment = event.self_assessment;
          record.observations = event.observations;
          memory->record_reflection(record);
        }
      }
    }

    log.events.push_back(OutcomeEvent{*state.outcome});
    log.outcome = state.outcome;
  } catch (const GatewayError& e) {
    log.events.push_back(AnomalyEvent{"aborted", "game " + std::to_string(options.game_id),
                                      e.what()});
    log.aborted = true;
  }

  result.final_state = std::move(state);
  return result;
}

// ---------------------------------------------------------------------------
// Agent factories (roster policy)
// ---------------------------------------------------------------------------

class AgentFactory {
 public:
  virtual ~AgentFactory() = default;
  virtual std::string label() const = 0;
  virtual std::vector<std::unique_ptr<Agent>> make(const GameSpec& spec,
                                                   const GameConfig& config) = 0;
};

// Scripted rosters. Kind "scripted" cycles honest/random/naive/sleeper so a
// game has a mix of temperaments; the other kinds fill every seat alike.
class ScriptedAgentFactory : public AgentFactory {
 public:
  explicit ScriptedAgentFactory(std::string kind = "scripted", BotSpeechConfig speech = {},
                                int sleeper_pass_until = 3)
      : kind_(std::move(kind)), speech_(std::move(speech)),
        sleeper_pass_until_(sleeper_pass_until) {}

  std::string label() const override { return kind_; }

  std::vector<std::unique_ptr<Agent>> make(const GameSpec& spec,
                                           const GameConfig& config) override {
    std::vector<std::unique_ptr<Agent>> agents;
    for (PlayerId seat = 0; seat < config.player_count; ++seat) {
      const std::uint64_t seed = mix_seed(spec.seed, 1000 + static_cast<std::uint64_t>(seat));
      agents.push_back(make_one(kind_ == "scripted" ? cycle_kind(seat) : kind_, seed));
    }
    return agents;
  }

 private:
  static std::string cycle_kind(PlayerId seat) {
    static const std::vector<std::string> kinds = {"honest", "random", "naive", "sleeper"};
    return kinds[static_cast<std::size_t>(seat) % kinds.size()];
  }

  std::unique_ptr<Agent> make_one(const std::string& kind, std::uint64_t seed) const {
    if (kind == "honest") return std::make_unique<HonestGoodBot>(seed, speech_);
    if (kind == "random") return std::make_unique<RandomAgent>(seed, speech_);
    if (kind == "naive") return std::make_unique<NaiveEvilBot>(seed, speech_);
    if (kind == "sleeper") {
      return std::make_unique<SleeperEvilBot>(seed, sleeper_pass_until_, speech_);
    }
    throw ConfigError("unknown scripted agent kind: " + kind);
  }

  std::string kind_;
  BotSpeechConfig speech_;
  int sleeper_pass_until_;
};

// ---------------------------------------------------------------------------
// Tournament runner
// ---------------------------------------------------------------------------

struct TournamentOptions {
  std::string tournament_id = "tournament";
  std::uint64_t base_seed = 1;
  std::filesystem::path out_dir;  // empty: keep logs in memory only
  int jobs = 1;                   // parallelism; memory-on runs stay sequential
  bool resume = false;            // continue from an existing manifest
  std::function<void(const AgentView&, DecisionKind)> inspector;
};

inline constexpr int kManifestSchemaVersion = 1;

struct ManifestGame {
  int game_id = 0;
  std::uint64_t seed = 0;
  int player_count = 0;
  std::string effort;
  std::string memory;
  std::string log_file;
  std::string status;  // pending | completed | aborted
  std::string winner;  // good | evil | empty
};

struct TournamentManifest {
  std::string tournament_id;
  std::string preset;
  std::uint64_t base_seed = 0;
  std::string agents;
  std::vector<ManifestGame> games;
};

inline std::string game_log_filename(int game_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "game_%04d.jsonl", game_id);
  return buf;
}

inline Json manifest_to_json(const TournamentManifest& m) {
  Json games = Json::array();
  for (const auto& g : m.games) {
    games.push_back(Json{{"game_id", g.game_id},
                         {"seed", g.seed},
                         {"player_count", g.player_count},
                         {"effort", g.effort},
                         {"memory", g.memory},
                         {"log_file", g.log_file},
                         {"status", g.status},
                         {"winner", g.winner}});
  }
  return Json{{"type", "manifest"},
              {"schema_version", kManifestSchemaVersion},
              {"tournament_id", m.tournament_id},
              {"preset", m.preset},
              {"base_seed", m.base_seed},
              {"agents", m.agents},
              {"games", games}};
}

inline TournamentManifest manifest_from_json(const Json& j) {
  const int version = j.value("schema_version", 0);
  if (version != kManifestSchemaVersion) {
    throw SchemaMigrationError("manifest has schema version " + std::to_string(version) +
                               ", expected " + std::to_string(kManifestSchemaVersion));
  }
  TournamentManifest m;
  m.tournament_id = j.at("tournament_id").get<std::string>();
  m.preset = j.at("preset").get<std::string>();
  m.base_seed = j.at("base_seed").get<std::uint64_t>();
  m.agents = j.at("agents").get<std::string>();
  for (const auto& g : j.at("games")) {
    ManifestGame game;
    game.game_id = g.at("game_id").get<int>();
    game.seed = g.at("seed").get<std::uint64_t>();
    game.player_count = g.at("player_count").get<int>();
    game.effort = g.at("effort").get<std::string>();
    game.memory = g.at("memory").get<std::string>();
    game.log_file = g.at("log_file").get<std::string>();
    game.status = g.at("status").get<std::string>();
    game.winner = g.at("winner").get<std::string>();
    m.games.push_back(std::move(game));
  }
  return m;
}

inline void save_manifest(const std::filesystem::path& path, const TournamentManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw AvalonError("cannot write manifest: " + path.string());
  out << manifest_to_json(m).dump(2) << "\n";
}

inline TournamentManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AvalonError("cannot read manifest: " + path.string());
  Json j = Json::parse(in, nullptr, true, true);
  return manifest_from_json(j);
}

namespace rundetail {

inline RunGameOptions options_for(const GameSpec& spec, const DatasetPreset& preset,
                                  const TournamentOptions& options, const std::string& agents,
                                  const std::string& model) {
  RunGameOptions game_options;
  game_options.tournament_id = options.tournament_id;
  game_options.game_id = spec.game_id;
  game_options.seed = spec.seed;
  game_options.preset_label = preset.id;
  game_options.memory_mode = spec.memory;
  game_options.effort = spec.effort;
  game_options.agents_label = agents;
  game_options.model = model;
  game_options.inspector = options.inspector;
  return game_options;
}

}  // namespace rundetail

// Runs a preset's full schedule. Memory-on tournaments run strictly
// sequentially (game k+1 reads game k's reflections); memory-off games may
// run in parallel. Aborted games are kept in the dataset with their anomaly
// record rather than re-run. With `resume`, completed games named by an
// existing manifest are loaded instead of replayed.
inline std::vector<GameLog> run_tournament(const DatasetPreset& preset, AgentFactory& factory,
                                           const TournamentOptions& options,
                                           const std::string& model = "") {
  const std::vector<GameSpec> schedule = preset_schedule(preset, options.base_seed);
  const bool persist = !options.out_dir.empty();
  const std::filesystem::path manifest_path = options.out_dir / "manifest.json";
  const std::filesystem::path memory_path = options.out_dir / "memory.jsonl";

  TournamentManifest manifest;
  manifest.tournament_id = options.tournament_id;
  manifest.preset = preset.id;
  manifest.base_seed = options.base_seed;
  manifest.agents = factory.label();
  for (const GameSpec& spec : schedule) {
    ManifestGame g;
    g.game_id = spec.game_id;
    g.seed = spec.seed;
    g.player_count = spec.player_count;
    g.effort = effort_token(spec.effort);
    g.memory = memory_mode_token(spec.memory);
    g.log_file = game_log_filename(spec.game_id);
    g.status = "pending";
    manifest.games.push_back(std::move(g));
  }

  std::vector<std::optional<GameLog>> logs(schedule.size());

  if (persist) {
    std::filesystem::create_directories(options.out_dir);
    if (options.resume && std::filesystem::exists(manifest_path)) {
      const TournamentManifest existing = load_manifest(manifest_path);
      if (existing.preset != preset.id || existing.base_seed != options.base_seed ||
          existing.agents != factory.label()) {
        throw ConfigError("existing manifest does not match this tournament configuration");
      }
      for (std::size_t i = 0; i < manifest.games.size(); ++i) {
        if (i < existing.games.size() && existing.games[i].status != "pending" &&
            std::filesystem::exists(options.out_dir / existing.games[i].log_file)) {
          manifest.games[i] = existing.games[i];
          logs[i] = load_log(options.out_dir / existing.games[i].log_file);
        }
      }
    }
  }

  MemoryStore memory;
  if (preset.memory == MemoryMode::Full) {
    // Rebuild the store from already-completed games so resume keeps context.
    for (const auto& log : logs) {
      if (log) {
        for (const ReflectionRecord& record : reflections_in_log(*log)) {
          memory.record_reflection(record);
        }
      }
    }
  }

  std::mutex manifest_mutex;
  auto finish_game = [&](std::size_t index, GameLog&& log) {
    std::lock_guard lock(manifest_mutex);
    ManifestGame& entry = manifest.games[index];
    entry.status = log.aborted ? "aborted" : "completed";
    entry.winner = log.outcome ? team_token(log.outcome->winner) : "";
    if (persist) {
      save_log(options.out_dir / entry.log_file, log);
      save_manifest(manifest_path, manifest);
    }
    logs[index] = std::move(log);
  };

  auto play_one = [&](std::size_t index) {
    const GameSpec& spec = schedule[index];
    const GameConfig config = build_config(spec.player_count);
    std::vector<std::unique_ptr<Agent>> agents = factory.make(spec, config);
    MemoryStore* store = spec.memory == MemoryMode::Full ? &memory : nullptr;
    RunGameResult result = run_game(
        config, agents, store,
        rundetail::options_for(spec, preset, options, factory.label(), model));
    finish_game(index, std::move(result.log));
    if (persist && spec.memory == MemoryMode::Full) {
      memory.save(memory_path);
    }
  };

  const bool parallel_ok = preset.memory == MemoryMode::None && options.jobs > 1;
  if (parallel_ok) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      if (!logs[i]) pending.push_back(i);
    }
    std::mutex next_mutex;
    std::size_t next = 0;
    auto worker = [&] {
      while (true) {
        std::size_t index;
        {
          std::lock_guard lock(next_mutex);
          if (next >= pending.size()) return;
          index = pending[next++];
        }
        play_one(index);
      }
    };
    std::vector<std::future<void>> workers;
    const int thread_count = std::min<int>(options.jobs, static_cast<int>(pending.size()));
    for (int t = 0; t < thread_count; ++t) {
      workers.push_back(std::async(std::launch::async, worker));
    }
    for (auto& w : workers) w.get();
  } else {
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      if (!logs[i]) play_one(i);
    }
  }

  std::vector<GameLog> out;
  out.reserve(logs.size());
  for (auto& log : logs) out.push_back(std::move(*log));
  return out;
}

}  // namespace avalon
