// Command-line entry point: play single games, run tournament presets,
// analyze log directories, and replay saved games as text.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "avalon/analysis.hpp"
#include "avalon/http_transport.hpp"
#include "avalon/llm_agent.hpp"
#include "avalon/replay.hpp"
#include "avalon/tournament.hpp"

namespace {

using namespace avalon;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Settings {
  std::string model_id = "gpt-5.1";
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string agents = "scripted";
  std::string effort = "low";
  std::uint64_t seed = 1;
  int max_reprompts = 2;
  double timeout_seconds = 0.0;
  int max_in_flight = 4;
  double min_request_interval_seconds = 0.0;
  int sleeper_pass_until = 3;
  std::vector<std::string> bot_descriptor_words;
  std::vector<std::string> bot_reference_phrases;
};

Settings load_settings(const std::string& config_path) {
  Settings s;
  if (config_path.empty()) return s;
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot read config file: " + config_path);
  Json j = Json::parse(in, nullptr, true, true);
  s.model_id = j.value("model_id", s.model_id);
  s.base_url = j.value("base_url", s.base_url);
  s.api_key_env = j.value("api_key_env", s.api_key_env);
  s.agents = j.value("agents", s.agents);
  s.effort = j.value("effort", s.effort);
  s.seed = j.value("seed", s.seed);
  s.max_reprompts = j.value("max_reprompts", s.max_reprompts);
  s.timeout_seconds = j.value("timeout_seconds", s.timeout_seconds);
  s.max_in_flight = j.value("max_in_flight", s.max_in_flight);
  s.min_request_interval_seconds =
      j.value("min_request_interval_seconds", s.min_request_interval_seconds);
  s.sleeper_pass_until = j.value("sleeper_pass_until", s.sleeper_pass_until);
  if (j.contains("bot_descriptor_words")) {
    s.bot_descriptor_words = j.at("bot_descriptor_words").get<std::vector<std::string>>();
  }
  if (j.contains("bot_reference_phrases")) {
    s.bot_reference_phrases = j.at("bot_reference_phrases").get<std::vector<std::string>>();
  }
  return s;
}

bool is_scripted_kind(const std::string& kind) {
  return kind == "scripted" || kind == "random" || kind == "honest" || kind == "naive" ||
         kind == "sleeper";
}

std::unique_ptr<AgentFactory> make_factory(const Settings& settings, bool offline) {
  if (is_scripted_kind(settings.agents)) {
    BotSpeechConfig speech{settings.bot_descriptor_words, settings.bot_reference_phrases};
    return std::make_unique<ScriptedAgentFactory>(settings.agents, speech,
                                                  settings.sleeper_pass_until);
  }
  if (settings.agents == "canned-llm") {
    GatewayConfig gateway_config;
    gateway_config.max_in_flight = settings.max_in_flight;
    gateway_config.backoff_base_seconds = 0.0;
    auto gateway = std::make_shared<LlmGateway>(
        gateway_config, std::make_shared<CannedLlmTransport>(settings.seed));
    LlmAgentConfig agent_config;
    agent_config.model_id = settings.model_id;
    agent_config.max_reprompts = settings.max_reprompts;
    return std::make_unique<LlmAgentFactory>(gateway, agent_config, "canned-llm");
  }
  if (settings.agents == "llm") {
    if (offline) {
      throw ConfigError("--offline forbids network agents; use --agents canned-llm for an "
                        "offline gateway");
    }
    GatewayConfig gateway_config;
    gateway_config.api_key_env = settings.api_key_env;
    gateway_config.max_in_flight = settings.max_in_flight;
    gateway_config.min_request_interval_seconds = settings.min_request_interval_seconds;
    auto gateway = std::make_shared<LlmGateway>(
        gateway_config, std::make_shared<HttpTransport>(settings.base_url));
    LlmAgentConfig agent_config;
    agent_config.model_id = settings.model_id;
    agent_config.max_reprompts = settings.max_reprompts;
    agent_config.timeout_seconds = settings.timeout_seconds;
    return std::make_unique<LlmAgentFactory>(gateway, agent_config, "llm");
  }
  throw ConfigError("unknown agent kind: " + settings.agents +
                    " (expected scripted, random, honest, naive, sleeper, canned-llm or llm)");
}

std::string model_label(const Settings& settings) {
  return (settings.agents == "llm" || settings.agents == "canned-llm") ? settings.model_id : "";
}

DescriptorLexicon load_lexicon(const std::string& path, ReferencePatternSet& patterns) {
  DescriptorLexicon lexicon = DescriptorLexicon::defaults();
  patterns = ReferencePatternSet::defaults();
  if (path.empty()) return lexicon;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read lexicon file: " + path);
  Json j = Json::parse(in, nullptr, true, true);
  if (j.contains("descriptors")) {
    lexicon.descriptors = j.at("descriptors").get<std::vector<std::string>>();
  }
  if (j.contains("positive")) {
    lexicon.positive_subset = j.at("positive").get<std::vector<std::string>>();
  }
  if (j.contains("reference_patterns")) {
    patterns.patterns = j.at("reference_patterns").get<std::vector<std::string>>();
  }
  lexicon.validate();
  patterns.validate();
  return lexicon;
}

int run_play(const Settings& settings, int players, bool offline, bool with_memory,
             const std::string& out_dir) {
  std::unique_ptr<AgentFactory> factory = make_factory(settings, offline);
  const GameConfig config = build_config(players);

  GameSpec spec;
  spec.game_id = 1;
  spec.player_count = players;
  spec.effort = parse_effort_token(settings.effort);
  spec.memory = with_memory ? MemoryMode::Full : MemoryMode::None;
  spec.seed = settings.seed;

  std::vector<std::unique_ptr<Agent>> agents = factory->make(spec, config);
  MemoryStore memory;

  RunGameOptions options;
  options.tournament_id = "play";
  options.game_id = spec.game_id;
  options.seed = spec.seed;
  options.preset_label = "single";
  options.memory_mode = spec.memory;
  options.effort = spec.effort;
  options.agents_label = factory->label();
  options.model = model_label(settings);

  RunGameResult result =
      run_game(config, agents, spec.memory == MemoryMode::Full ? &memory : nullptr, options);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    const fs::path path = fs::path(out_dir) / game_log_filename(1);
    save_log(path, result.log);
    std::cout << "log: " << path.string() << "\n";
  }
  if (result.log.outcome) {
    const GameOutcome& outcome = *result.log.outcome;
    std::cout << "outcome: " << (outcome.winner == Team::Good ? "good" : "evil")
              << " wins via " << win_method_token(outcome.via) << " (Merlin was "
              << config.name_of(outcome.merlin) << ")\n";
    return kExitOk;
  }
  std::cout << "outcome: game aborted (see anomaly events in the log)\n";
  return kExitRuntime;
}

int run_tournament_cmd(const Settings& settings, const std::string& preset_id, bool offline,
                       const std::string& out_dir, bool resume, int jobs) {
  std::unique_ptr<AgentFactory> factory = make_factory(settings, offline);
  const DatasetPreset preset = DatasetPreset::by_id(preset_id);

  TournamentOptions options;
  options.tournament_id = "preset-" + preset.id;
  options.base_seed = settings.seed;
  options.out_dir = out_dir;
  options.jobs = jobs;
  options.resume = resume;

  const std::vector<GameLog> logs =
      run_tournament(preset, *factory, options, model_label(settings));

  int completed = 0, aborted = 0;
  for (const GameLog& log : logs) {
    if (log.aborted) ++aborted;
    else ++completed;
  }
  std::cout << "preset " << preset.id << ": " << completed << " completed";
  if (aborted > 0) std::cout << ", " << aborted << " aborted";
  std::cout << "; logs in " << out_dir << "\n";
  return aborted == 0 ? kExitOk : kExitRuntime;
}

int run_analyze(const std::string& logs_dir, const std::string& report_path,
                const std::string& lexicon_path, const std::string& tables_dir,
                const AnalysisOptions& analysis_options) {
  if (!fs::exists(logs_dir) || !fs::is_directory(logs_dir)) {
    throw AvalonError("log directory does not exist: " + logs_dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(logs_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("game_", 0) == 0 && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<GameLog> logs;
  for (const fs::path& file : files) logs.push_back(load_log(file));
  if (logs.empty()) {
    std::cerr << "warning: no game logs found under " << logs_dir << "; writing an empty report\n";
  }

  ReferencePatternSet patterns;
  const DescriptorLexicon lexicon = load_lexicon(lexicon_path, patterns);
  const AnalysisReport report = render_report(logs, lexicon, patterns, analysis_options);

  if (report_path.empty() || report_path == "-") {
    std::cout << report.text;
  } else {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw AvalonError("cannot write report: " + report_path);
    out << report.text;
    std::cout << "report: " << report_path << "\n";
  }
  if (!tables_dir.empty()) {
    fs::create_directories(tables_dir);
    for (const auto& [name, csv] : report.tables) {
      std::ofstream out(fs::path(tables_dir) / (name + ".csv"), std::ios::binary);
      if (!out) throw AvalonError("cannot write table: " + name);
      out << csv;
    }
    std::cout << "tables: " << tables_dir << "\n";
  }
  return kExitOk;
}

int run_replay(const std::string& log_path, int mission) {
  const GameLog log = load_log(log_path);
  std::cout << render_replay(log, mission);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"The Resistance: Avalon - repeated-game simulator and analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");

  // play
  auto* play = app.add_subcommand("play", "Run one game and write its log");
  int play_players = 5;
  bool play_offline = false;
  bool play_memory = false;
  std::string play_agents, play_effort, play_out = "out";
  std::uint64_t play_seed = 0;
  bool play_seed_set = false, play_agents_set = false, play_effort_set = false;
  play->add_option("--players", play_players, "Player count (5-10)")
      ->check(CLI::Range(5, 10));
  play->add_option("--agents", play_agents, "scripted|random|honest|naive|sleeper|canned-llm|llm");
  play->add_option("--seed", play_seed, "Game seed");
  play->add_option("--effort", play_effort, "Reasoning effort: low|medium|high");
  play->add_option("--out", play_out, "Output directory");
  play->add_flag("--offline", play_offline, "Forbid network activity");
  play->add_flag("--memory", play_memory, "Collect post-game reflections");

  // tournament
  auto* tournament = app.add_subcommand("tournament", "Run a dataset preset");
  std::string t_preset;
  bool t_offline = false, t_resume = false;
  int t_jobs = 1;
  std::string t_agents, t_out = "out";
  std::uint64_t t_seed = 0;
  tournament->add_option("--preset", t_preset, "Dataset preset: A|B|C|D")->required();
  tournament->add_option("--agents", t_agents, "Agent kind for every seat");
  tournament->add_option("--seed", t_seed, "Base seed (per-game seed = base + game id)");
  tournament->add_option("--out", t_out, "Output directory for logs and manifest");
  tournament->add_option("--jobs", t_jobs, "Parallel games (memory-off presets only)")
      ->check(CLI::Range(1, 64));
  tournament->add_flag("--offline", t_offline, "Forbid network activity");
  tournament->add_flag("--resume", t_resume, "Continue from an existing manifest");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Compute metrics over a log directory");
  std::string a_logs, a_report = "-", a_lexicon, a_tables;
  AnalysisOptions analysis_options;
  analyze->add_option("--logs", a_logs, "Directory containing game_*.jsonl files")->required();
  analyze->add_option("--report", a_report, "Report path ('-' for stdout)");
  analyze->add_option("--lexicon", a_lexicon, "JSON lexicon/pattern override file");
  analyze->add_option("--tables", a_tables, "Directory for CSV tables");
  analyze->add_option("--cutoff", analysis_options.reputation_cutoff_game,
                      "Reputation cutoff game");
  analyze->add_option("--inclusion-first", analysis_options.inclusion_first_game,
                      "First game of the inclusion range");
  analyze->add_option("--inclusion-last", analysis_options.inclusion_last_game,
                      "Last game of the inclusion range");

  // replay
  auto* replay = app.add_subcommand("replay", "Render a saved game as text");
  std::string r_log;
  int r_mission = 0;
  replay->add_option("--log", r_log, "Game log file")->required();
  replay->add_option("--mission", r_mission, "Render only this mission (1-5)")
      ->check(CLI::Range(1, 5));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  play_seed_set = play->count("--seed") > 0;
  play_agents_set = play->count("--agents") > 0;
  play_effort_set = play->count("--effort") > 0;

  try {
    Settings settings = load_settings(config_path);
    if (app.got_subcommand(play)) {
      if (play_seed_set) settings.seed = play_seed;
      if (play_agents_set) settings.agents = play_agents;
      if (play_effort_set) settings.effort = play_effort;
      return run_play(settings, play_players, play_offline, play_memory, play_out);
    }
    if (app.got_subcommand(tournament)) {
      if (tournament->count("--seed") > 0) settings.seed = t_seed;
      if (tournament->count("--agents") > 0) settings.agents = t_agents;
      return run_tournament_cmd(settings, t_preset, t_offline, t_out, t_resume, t_jobs);
    }
    if (app.got_subcommand(analyze)) {
      return run_analyze(a_logs, a_report, a_lexicon, a_tables, analysis_options);
    }
    if (app.got_subcommand(replay)) {
      return run_replay(r_log, r_mission);
    }
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
