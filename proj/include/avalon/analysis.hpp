#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "avalon/gateway.hpp"
#include "avalon/log.hpp"

namespace avalon {

// ---------------------------------------------------------------------------
// Lexicons
// ---------------------------------------------------------------------------

// Behavioral vocabulary counted in reflection texts. The default is the
// 15-word seed list; the positive subset drives reputation scoring.
struct DescriptorLexicon {
  std::vector<std::string> descriptors;
  std::vector<std::string> positive_subset;

  static DescriptorLexicon defaults() {
    DescriptorLexicon lex;
    lex.descriptors = {"straightforward", "subtle",      "cautious",  "trustworthy",
                       "quiet",           "aggressive",  "reliable",  "suspicious",
                       "measured",        "conservative", "transparent", "cooperative",
                       "deceptive",       "defensive",   "strategic"};
    lex.positive_subset = {"trustworthy", "straightforward", "solid", "safe", "reliable"};
    return lex;
  }

  void validate() const {
    if (descriptors.empty()) throw ConfigError("descriptor lexicon is empty");
    std::set<std::string> seen;
    for (const std::string& word : descriptors) {
      if (word.empty()) throw ConfigError("descriptor lexicon contains an empty word");
      for (char c : word) {
        if (std::isupper(static_cast<unsigned char>(c))) {
          throw ConfigError("descriptor must be lowercase: " + word);
        }
      }
      if (!seen.insert(word).second) {
        throw ConfigError("duplicate descriptor: " + word);
      }
    }
  }
};

// Phrases that mark a discussion message as citing cross-game history.
struct ReferencePatternSet {
  std::vector<std::string> patterns;

  static ReferencePatternSet defaults() {
    return ReferencePatternSet{{"past games", "last game", "usually", "tends to",
                                "historically", "track record", "previous"}};
  }

  void validate() const {
    if (patterns.empty()) throw ConfigError("reference pattern set is empty");
    for (const std::string& p : patterns) {
      if (p.empty()) throw ConfigError("reference pattern set contains an empty phrase");
      for (char c : p) {
        if (std::isupper(static_cast<unsigned char>(c))) {
          throw ConfigError("reference pattern must be lowercase: " + p);
        }
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Word matching
// ---------------------------------------------------------------------------

namespace textdetail {

inline std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace textdetail

// Case-insensitive whole-word occurrences of `word` in `text`: a match must
// not touch an adjacent letter or digit, so "straightforwardly" does not
// count for "straightforward".
inline int count_word_occurrences(const std::string& text, const std::string& word,
                                  bool whole_word = true) {
  if (word.empty()) return 0;
  const std::string haystack = textdetail::to_lower(text);
  const std::string needle = textdetail::to_lower(word);
  int count = 0;
  std::size_t pos = haystack.find(needle);
  while (pos != std::string::npos) {
    const bool left_ok = pos == 0 || !textdetail::word_char(haystack[pos - 1]);
    const std::size_t end = pos + needle.size();
    const bool right_ok = end >= haystack.size() || !textdetail::word_char(haystack[end]);
    if (!whole_word || (left_ok && right_ok)) ++count;
    pos = haystack.find(needle, pos + 1);
  }
  return count;
}

// ---------------------------------------------------------------------------
// Descriptor counting (reflection texts)
// ---------------------------------------------------------------------------

// target name -> descriptor -> count
using DescriptorCounts = std::map<std::string, std::map<std::string, int>>;

// Counts descriptor occurrences inside per-target observation texts; every
// occurrence in one text counts, attributed to that observation's target.
inline DescriptorCounts count_descriptors(const std::vector<ReflectionRecord>& reflections,
                                          const DescriptorLexicon& lexicon,
                                          bool whole_word = true) {
  lexicon.validate();
  DescriptorCounts counts;
  for (const ReflectionRecord& reflection : reflections) {
    for (const auto& [target, observation] : reflection.observations) {
      for (const std::string& descriptor : lexicon.descriptors) {
        const int n = count_word_occurrences(observation.text, descriptor, whole_word);
        if (n > 0) counts[target][descriptor] += n;
      }
    }
  }
  return counts;
}

// target name -> alignment -> descriptor -> count, split by the target's
// actual alignment in the game the reflection describes.
using RoleConditionalCounts =
    std::map<std::string, std::map<Alignment, std::map<std::string, int>>>;

inline RoleConditionalCounts role_conditional_table(
    const std::vector<ReflectionRecord>& reflections, const DescriptorLexicon& lexicon,
    bool whole_word = true) {
  lexicon.validate();
  RoleConditionalCounts counts;
  for (const ReflectionRecord& reflection : reflections) {
    for (const auto& [target, observation] : reflection.observations) {
      const Alignment alignment = alignment_of(observation.target_role);
      for (const std::string& descriptor : lexicon.descriptors) {
        const int n = count_word_occurrences(observation.text, descriptor, whole_word);
        if (n > 0) counts[target][alignment][descriptor] += n;
      }
    }
  }
  return counts;
}

// ---------------------------------------------------------------------------
// Cross-game references (discussion messages only)
// ---------------------------------------------------------------------------

struct CrossGameReference {
  std::string tournament_id;
  int game_id = 0;
  int mission = 0;
  int attempt = 0;
  std::string speaker;
  std::string pattern;
  std::string message;

  bool operator==(const CrossGameReference&) const = default;
};

// Case-insensitive phrase containment over discussion messages; one hit per
// (message, pattern) pair. Reflections are not scanned.
inline std::vector<CrossGameReference> find_cross_game_references(
    const std::vector<GameLog>& logs, const ReferencePatternSet& patterns) {
  patterns.validate();
  std::vector<CrossGameReference> hits;
  for (const GameLog& log : logs) {
    for (const GameEvent& event : log.events) {
      const auto* d = std::get_if<DiscussionEvent>(&event);
      if (d == nullptr) continue;
      const std::string lowered = textdetail::to_lower(d->text);
      for (const std::string& pattern : patterns.patterns) {
        if (lowered.find(pattern) != std::string::npos) {
          hits.push_back(CrossGameReference{log.header.tournament_id, log.header.game_id,
                                            d->mission, d->attempt, log.name_of(d->speaker),
                                            pattern, d->text});
        }
      }
    }
  }
  return hits;
}

// ---------------------------------------------------------------------------
// Reputation
// ---------------------------------------------------------------------------

struct TierSpec {
  int top = 2;
  int bottom = 2;
};

// Cumulative positive-descriptor counts per player through a cutoff game,
// with top/bottom tiers. Middle players belong to neither tier.
struct ReputationLedger {
  int cutoff_game = 0;
  std::vector<std::pair<std::string, int>> counts;  // sorted by count desc, then roster order
  std::vector<std::string> high_tier;
  std::vector<std::string> low_tier;
  bool ambiguous_ties = false;
};

inline ReputationLedger reputation_ranking(const std::vector<ReflectionRecord>& reflections,
                                           int cutoff_game, const DescriptorLexicon& lexicon,
                                           const std::vector<std::string>& roster,
                                           std::optional<TierSpec> tiers = std::nullopt) {
  if (!tiers) {
    if (roster.size() != 5) {
      throw ConfigError("default top-2/bottom-2 tiers assume a 5-player roster; pass explicit "
                        "tier sizes for " +
                        std::to_string(roster.size()) + " players");
    }
    tiers = TierSpec{2, 2};
  }
  if (tiers->top + tiers->bottom > static_cast<int>(roster.size())) {
    throw ConfigError("tier sizes exceed the roster");
  }

  DescriptorLexicon positive;
  positive.descriptors = lexicon.positive_subset;
  positive.validate();

  std::vector<ReflectionRecord> in_range;
  for (const ReflectionRecord& r : reflections) {
    if (r.game_id <= cutoff_game) in_range.push_back(r);
  }
  const DescriptorCounts counts = count_descriptors(in_range, positive);

  ReputationLedger ledger;
  ledger.cutoff_game = cutoff_game;
  std::map<std::string, int> totals;
  for (const std::string& name : roster) totals[name] = 0;
  for (const auto& [target, per_descriptor] : counts) {
    for (const auto& [descriptor, n] : per_descriptor) {
      (void)descriptor;
      totals[target] += n;
    }
  }
  // Stable order: count descending, roster order breaking ties.
  for (const std::string& name : roster) {
    ledger.counts.emplace_back(name, totals[name]);
  }
  std::stable_sort(ledger.counts.begin(), ledger.counts.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (int i = 0; i < tiers->top && i < static_cast<int>(ledger.counts.size()); ++i) {
    ledger.high_tier.push_back(ledger.counts[static_cast<std::size_t>(i)].first);
  }
  for (int i = 0; i < tiers->bottom; ++i) {
    const int idx = static_cast<int>(ledger.counts.size()) - 1 - i;
    if (idx >= tiers->top) {
      ledger.low_tier.push_back(ledger.counts[static_cast<std::size_t>(idx)].first);
    }
  }
  std::sort(ledger.low_tier.begin(), ledger.low_tier.end());
  std::sort(ledger.high_tier.begin(), ledger.high_tier.end());
  // Flag ties across a tier boundary: the ranking is then roster-order dependent.
  for (std::size_t i = 1; i < ledger.counts.size(); ++i) {
    const bool boundary = static_cast<int>(i) == tiers->top ||
                          static_cast<int>(i) ==
                              static_cast<int>(ledger.counts.size()) - tiers->bottom;
    if (boundary && ledger.counts[i - 1].second == ledger.counts[i].second) {
      ledger.ambiguous_ties = true;
    }
  }
  return ledger;
}

// ---------------------------------------------------------------------------
// Team inclusion by reputation tier
// ---------------------------------------------------------------------------

// Inclusion totals on approved mission teams over a game range, by tier.
// Averages are reported under both divisor conventions (range size and range
// size + 1) because published per-game averages are ambiguous between them.
struct InclusionStats {
  int first_game = 0;
  int last_game = 0;
  int games_in_range = 0;
  long long high_total = 0;
  long long low_total = 0;
  double pct_difference = 0.0;  // (high - low) / low
  double high_avg = 0.0;        // total / games_in_range
  double low_avg = 0.0;
  double high_avg_wide = 0.0;   // total / (games_in_range + 1)
  double low_avg_wide = 0.0;
  long long high_total_excluding_self = 0;
  long long low_total_excluding_self = 0;
  double pct_difference_excluding_self = 0.0;
};

inline InclusionStats team_inclusion_stats(const std::vector<GameLog>& logs, int first_game,
                                           int last_game, const ReputationLedger& ledger) {
  if (first_game > last_game) throw ConfigError("empty inclusion game range");
  if (ledger.cutoff_game >= first_game) {
    throw ConfigError("reputation cutoff (game " + std::to_string(ledger.cutoff_game) +
                      ") must precede the inclusion range starting at game " +
                      std::to_string(first_game));
  }
  const std::set<std::string> high(ledger.high_tier.begin(), ledger.high_tier.end());
  const std::set<std::string> low(ledger.low_tier.begin(), ledger.low_tier.end());

  InclusionStats stats;
  stats.first_game = first_game;
  stats.last_game = last_game;
  stats.games_in_range = last_game - first_game + 1;

  for (const GameLog& log : logs) {
    if (log.header.game_id < first_game || log.header.game_id > last_game) continue;
    // Approved proposals are the teams that actually went on missions.
    std::map<std::pair<int, int>, const ProposalEvent*> proposals;
    std::map<std::pair<int, int>, int> approvals;
    for (const GameEvent& event : log.events) {
      if (const auto* p = std::get_if<ProposalEvent>(&event)) {
        proposals[{p->mission, p->attempt}] = p;
      } else if (const auto* v = std::get_if<VoteEvent>(&event)) {
        if (v->vote == Vote::Approve) approvals[{v->mission, v->attempt}] += 1;
      }
    }
    for (const auto& [key, proposal] : proposals) {
      const int approve_count = approvals.count(key) ? approvals.at(key) : 0;
      const bool approved = approve_count * 2 > log.header.config.player_count ||
                            key.second == log.header.config.max_rejections + 1;
      if (!approved) continue;
      for (PlayerId member : proposal->team) {
        const std::string& name = log.name_of(member);
        const bool self_inclusion = member == proposal->leader;
        if (high.count(name)) {
          stats.high_total += 1;
          if (!self_inclusion) stats.high_total_excluding_self += 1;
        } else if (low.count(name)) {
          stats.low_total += 1;
          if (!self_inclusion) stats.low_total_excluding_self += 1;
        }
      }
    }
  }

  stats.high_avg = static_cast<double>(stats.high_total) / stats.games_in_range;
  stats.low_avg = static_cast<double>(stats.low_total) / stats.games_in_range;
  stats.high_avg_wide = static_cast<double>(stats.high_total) / (stats.games_in_range + 1);
  stats.low_avg_wide = static_cast<double>(stats.low_total) / (stats.games_in_range + 1);
  stats.pct_difference =
      stats.low_total > 0
          ? static_cast<double>(stats.high_total - stats.low_total) / stats.low_total
          : 0.0;
  stats.pct_difference_excluding_self =
      stats.low_total_excluding_self > 0
          ? static_cast<double>(stats.high_total_excluding_self -
                                stats.low_total_excluding_self) /
                stats.low_total_excluding_self
          : 0.0;
  return stats;
}

// ---------------------------------------------------------------------------
// Sleeper detection
// ---------------------------------------------------------------------------

struct SleeperPass {
  std::string player;
  int mission = 0;
  bool operator==(const SleeperPass&) const = default;
};

struct SleeperEvidence {
  bool detected = false;
  std::vector<SleeperPass> early_passes;  // evil Success on an early mission
  std::vector<SleeperPass> later_fails;   // evil Fail on a later mission
};

// True iff some evil player played Success on an approved team in an early
// mission and any evil player played Fail in a later mission of the same
// game. "Early" defaults to missions 1-2.
inline SleeperEvidence detect_sleeper(const GameLog& log, const std::set<int>& early_missions = {1, 2}) {
  SleeperEvidence evidence;
  std::vector<std::tuple<int, PlayerId, MissionAction>> actions;
  for (const GameEvent& event : log.events) {
    if (const auto* a = std::get_if<MissionActionEvent>(&event)) {
      actions.emplace_back(a->mission, a->player, a->action);
    }
  }
  int earliest_pass = 0;
  for (const auto& [mission, player, action] : actions) {
    if (!early_missions.count(mission)) continue;
    if (action != MissionAction::Success) continue;
    if (!is_evil(log.header.roles[static_cast<std::size_t>(player)])) continue;
    evidence.early_passes.push_back(SleeperPass{log.name_of(player), mission});
    if (earliest_pass == 0 || mission < earliest_pass) earliest_pass = mission;
  }
  if (evidence.early_passes.empty()) return evidence;
  for (const auto& [mission, player, action] : actions) {
    if (mission <= earliest_pass) continue;
    if (action != MissionAction::Fail) continue;
    if (!is_evil(log.header.roles[static_cast<std::size_t>(player)])) continue;
    evidence.later_fails.push_back(SleeperPass{log.name_of(player), mission});
  }
  evidence.detected = !evidence.later_fails.empty();
  return evidence;
}

// ---------------------------------------------------------------------------
// Assassination accuracy and win rates
// ---------------------------------------------------------------------------

struct AccuracyStat {
  int attempts = 0;
  int correct = 0;
  // Absent when there were no attempts (reported as N/A).
  std::optional<double> fraction() const {
    if (attempts == 0) return std::nullopt;
    return static_cast<double>(correct) / attempts;
  }
};

inline AccuracyStat assassination_accuracy(const std::vector<GameLog>& logs) {
  AccuracyStat stat;
  for (const GameLog& log : logs) {
    for (const GameEvent& event : log.events) {
      if (const auto* a = std::get_if<AssassinationEvent>(&event)) {
        stat.attempts += 1;
        if (a->correct) stat.correct += 1;
      }
    }
  }
  return stat;
}

inline std::map<std::string, std::vector<GameLog>> group_by_effort(
    const std::vector<GameLog>& logs) {
  std::map<std::string, std::vector<GameLog>> groups;
  for (const GameLog& log : logs) groups[log.header.effort].push_back(log);
  return groups;
}

struct WinRateRow {
  int player_count = 0;
  int games = 0;
  double evil_pct = 0.0;
  double good_pct = 0.0;
  AccuracyStat assassination;
};

// Per-player-count outcome table; counts with zero games are omitted.
inline std::vector<WinRateRow> win_rate_table(const std::vector<GameLog>& logs) {
  std::map<int, std::vector<GameLog>> by_count;
  for (const GameLog& log : logs) {
    if (log.outcome) by_count[log.header.config.player_count].push_back(log);
  }
  std::vector<WinRateRow> rows;
  for (const auto& [count, group] : by_count) {
    WinRateRow row;
    row.player_count = count;
    row.games = static_cast<int>(group.size());
    int evil_wins = 0;
    for (const GameLog& log : group) {
      if (log.outcome->winner == Team::Evil) ++evil_wins;
    }
    row.evil_pct = 100.0 * evil_wins / row.games;
    row.good_pct = 100.0 - row.evil_pct;
    row.assassination = assassination_accuracy(group);
    rows.push_back(row);
  }
  return rows;
}

struct MemoryEffectRow {
  int player_count = 0;
  std::optional<double> memory_evil_pct;
  std::optional<double> no_memory_evil_pct;
  std::optional<double> diff_pp;  // memory minus no-memory, percentage points
};

// Evil win rate with memory vs without, per player count.
inline std::vector<MemoryEffectRow> memory_effect_table(const std::vector<GameLog>& logs) {
  std::map<int, std::pair<std::vector<GameLog>, std::vector<GameLog>>> split;
  for (const GameLog& log : logs) {
    if (!log.outcome) continue;
    auto& bucket = split[log.header.config.player_count];
    if (log.header.memory_mode == "full") {
      bucket.first.push_back(log);
    } else {
      bucket.second.push_back(log);
    }
  }
  auto evil_pct = [](const std::vector<GameLog>& group) -> std::optional<double> {
    if (group.empty()) return std::nullopt;
    int evil = 0;
    for (const GameLog& log : group) {
      if (log.outcome->winner == Team::Evil) ++evil;
    }
    return 100.0 * evil / static_cast<int>(group.size());
  };
  std::vector<MemoryEffectRow> rows;
  for (const auto& [count, buckets] : split) {
    MemoryEffectRow row;
    row.player_count = count;
    row.memory_evil_pct = evil_pct(buckets.first);
    row.no_memory_evil_pct = evil_pct(buckets.second);
    if (row.memory_evil_pct && row.no_memory_evil_pct) {
      row.diff_pp = *row.memory_evil_pct - *row.no_memory_evil_pct;
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

struct AnalysisOptions {
  int reputation_cutoff_game = 20;
  int inclusion_first_game = 21;
  int inclusion_last_game = 50;
  std::set<int> early_missions = {1, 2};
  bool whole_word = true;
  std::optional<TierSpec> tiers;  // required when the roster is not 5 players
};

struct AnalysisReport {
  std::string text;
  std::map<std::string, std::string> tables;  // csv name -> content
};

namespace textdetail {

inline std::string fmt(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

inline std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += "\"";
  return quoted;
}

}  // namespace textdetail

// Deterministic plain-text report over a set of logs, plus CSV tables with
// the full (untruncated) numbers.
inline AnalysisReport render_report(const std::vector<GameLog>& logs,
                                    const DescriptorLexicon& lexicon,
                                    const ReferencePatternSet& patterns,
                                    const AnalysisOptions& options = {}) {
  using textdetail::csv_field;
  using textdetail::fmt;
  AnalysisReport report;
  std::string& out = report.text;

  std::vector<ReflectionRecord> reflections;
  std::set<std::string> tournaments;
  int aborted = 0;
  for (const GameLog& log : logs) {
    tournaments.insert(log.header.tournament_id);
    if (log.aborted) ++aborted;
    for (ReflectionRecord& r : reflections_in_log(log)) {
      reflections.push_back(std::move(r));
    }
  }

  out += "AVALON TOURNAMENT ANALYSIS\n";
  out += "==========================\n";
  out += "Games: " + std::to_string(logs.size());
  if (aborted > 0) out += " (" + std::to_string(aborted) + " aborted)";
  out += "\n";
  if (logs.empty()) {
    out += "(no games: every section below is empty)\n";
  }

  // [1] Descriptor frequency per player (top 3), Table-3 layout.
  out += "\n[1] Descriptor frequency by player\n";
  const DescriptorCounts descriptor_counts =
      count_descriptors(reflections, lexicon, options.whole_word);
  {
    std::string csv = "target,descriptor,count\n";
    if (descriptor_counts.empty()) {
      out += "  (empty)\n";
    }
    for (const auto& [target, per_descriptor] : descriptor_counts) {
      std::vector<std::pair<std::string, int>> ranked(per_descriptor.begin(),
                                                      per_descriptor.end());
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& a, const auto& b) { return a.second > b.second; });
      out += "  " + target + ":";
      for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
        out += std::string(i ? "," : "") + " " + ranked[i].first + " (" +
               std::to_string(ranked[i].second) + ")";
      }
      out += "\n";
      for (const auto& [descriptor, count] : per_descriptor) {
        csv += csv_field(target) + "," + csv_field(descriptor) + "," +
               std::to_string(count) + "\n";
      }
    }
    report.tables["descriptor_counts"] = csv;
  }

  // [2] Descriptor usage split by the target's actual alignment (Table 4).
  out += "\n[2] Descriptor usage by target alignment\n";
  {
    const RoleConditionalCounts conditional =
        role_conditional_table(reflections, lexicon, options.whole_word);
    std::string csv = "target,alignment,descriptor,count\n";
    if (conditional.empty()) out += "  (empty)\n";
    for (const auto& [target, by_alignment] : conditional) {
      for (const std::string& descriptor : lexicon.descriptors) {
        int evil_n = 0, good_n = 0;
        if (auto it = by_alignment.find(Alignment::Evil); it != by_alignment.end()) {
          if (auto dit = it->second.find(descriptor); dit != it->second.end()) {
            evil_n = dit->second;
          }
        }
        if (auto it = by_alignment.find(Alignment::Good); it != by_alignment.end()) {
          if (auto dit = it->second.find(descriptor); dit != it->second.end()) {
            good_n = dit->second;
          }
        }
        if (evil_n == 0 && good_n == 0) continue;
        out += "  " + target + " \"" + descriptor + "\": evil " + std::to_string(evil_n) +
               ", good " + std::to_string(good_n) + "\n";
      }
      for (const auto& [alignment, per_descriptor] : by_alignment) {
        for (const auto& [descriptor, count] : per_descriptor) {
          csv += csv_field(target) + "," + alignment_token(alignment) + "," +
                 csv_field(descriptor) + "," + std::to_string(count) + "\n";
        }
      }
    }
    report.tables["role_conditional"] = csv;
  }

  // [3] Cross-game references in discussion messages.
  out += "\n[3] Cross-game references\n";
  {
    const std::vector<CrossGameReference> refs = find_cross_game_references(logs, patterns);
    out += "  Total: " + std::to_string(refs.size()) + "\n";
    std::map<std::string, int> per_pattern;
    for (const auto& r : refs) per_pattern[r.pattern] += 1;
    for (const std::string& pattern : patterns.patterns) {
      if (per_pattern.count(pattern)) {
        out += "  \"" + pattern + "\": " + std::to_string(per_pattern[pattern]) + "\n";
      }
    }
    std::string csv = "tournament,game,mission,attempt,speaker,pattern,message\n";
    for (const auto& r : refs) {
      csv += csv_field(r.tournament_id) + "," + std::to_string(r.game_id) + "," +
             std::to_string(r.mission) + "," + std::to_string(r.attempt) + "," +
             csv_field(r.speaker) + "," + csv_field(r.pattern) + "," + csv_field(r.message) +
             "\n";
    }
    report.tables["cross_game_references"] = csv;
  }

  // [4] Reputation ranking, [5] inclusion by tier.
  out += "\n[4] Reputation ranking (positive descriptors through game " +
         std::to_string(options.reputation_cutoff_game) + ")\n";
  std::optional<ReputationLedger> ledger;
  {
    std::vector<std::string> roster;
    for (const GameLog& log : logs) {
      if (static_cast<int>(log.header.config.roster.size()) >
          static_cast<int>(roster.size())) {
        roster = log.header.config.roster;
      }
    }
    std::string csv = "player,positive_count,tier\n";
    if (reflections.empty() || roster.empty()) {
      out += "  (empty)\n";
    } else {
      try {
        ledger = reputation_ranking(reflections, options.reputation_cutoff_game, lexicon,
                                    roster, options.tiers);
        for (const auto& [name, count] : ledger->counts) {
          std::string tier = "mid";
          if (std::count(ledger->high_tier.begin(), ledger->high_tier.end(), name)) {
            tier = "high";
          } else if (std::count(ledger->low_tier.begin(), ledger->low_tier.end(), name)) {
            tier = "low";
          }
          out += "  " + name + ": " + std::to_string(count) + " (" + tier + ")\n";
          csv += csv_field(name) + "," + std::to_string(count) + "," + tier + "\n";
        }
        if (ledger->ambiguous_ties) {
          out += "  note: tie at a tier boundary; order fell back to roster order\n";
        }
      } catch (const ConfigError& e) {
        out += std::string("  skipped: ") + e.what() + "\n";
      }
    }
    report.tables["reputation"] = csv;
  }

  out += "\n[5] Team inclusion by reputation tier (games " +
         std::to_string(options.inclusion_first_game) + "-" +
         std::to_string(options.inclusion_last_game) + ")\n";
  {
    std::string csv =
        "tier,total,avg_per_game,avg_per_game_wide,total_excluding_self\n";
    if (!ledger) {
      out += "  (skipped: no reputation ledger)\n";
    } else {
      try {
        const InclusionStats stats = team_inclusion_stats(
            logs, options.inclusion_first_game, options.inclusion_last_game, *ledger);
        out += "  High (top " + std::to_string(ledger->high_tier.size()) + "): total " +
               std::to_string(stats.high_total) + ", avg/game " + fmt(stats.high_avg, 2) +
               " (" + fmt(stats.high_avg_wide, 2) + " over range+1)\n";
        out += "  Low (bottom " + std::to_string(ledger->low_tier.size()) + "): total " +
               std::to_string(stats.low_total) + ", avg/game " + fmt(stats.low_avg, 2) + " (" +
               fmt(stats.low_avg_wide, 2) + " over range+1)\n";
        out += "  Difference: " + fmt(100.0 * stats.pct_difference, 1) + "%";
        out += " (excluding self-inclusions: " +
               fmt(100.0 * stats.pct_difference_excluding_self, 1) + "%)\n";
        csv += "high," + std::to_string(stats.high_total) + "," + fmt(stats.high_avg, 4) +
               "," + fmt(stats.high_avg_wide, 4) + "," +
               std::to_string(stats.high_total_excluding_self) + "\n";
        csv += "low," + std::to_string(stats.low_total) + "," + fmt(stats.low_avg, 4) + "," +
               fmt(stats.low_avg_wide, 4) + "," +
               std::to_string(stats.low_total_excluding_self) + "\n";
      } catch (const ConfigError& e) {
        out += std::string("  skipped: ") + e.what() + "\n";
      }
    }
    report.tables["inclusion"] = csv;
  }

  // [6] Sleeper strategy per effort label, [7] assassination accuracy.
  out += "\n[6] Evil early-pass (sleeper) rate by reasoning level\n";
  {
    std::string csv = "effort,games,detected,pct\n";
    const auto groups = group_by_effort(logs);
    if (groups.empty()) out += "  (empty)\n";
    for (const std::string effort : {"low", "medium", "high"}) {
      if (!groups.count(effort)) continue;
      const auto& group = groups.at(effort);
      int detected = 0;
      for (const GameLog& log : group) {
        if (detect_sleeper(log, options.early_missions).detected) ++detected;
      }
      out += "  " + effort + ": " + std::to_string(detected) + "/" +
             std::to_string(group.size()) + " (" +
             fmt(100.0 * detected / static_cast<double>(group.size()), 1) + "%)\n";
      csv += effort + "," + std::to_string(group.size()) + "," + std::to_string(detected) +
             "," + fmt(100.0 * detected / static_cast<double>(group.size()), 2) + "\n";
    }
    report.tables["sleeper"] = csv;
  }

  out += "\n[7] Assassination accuracy by reasoning level\n";
  {
    std::string csv = "effort,attempts,correct,pct\n";
    const auto groups = group_by_effort(logs);
    if (groups.empty()) out += "  (empty)\n";
    for (const std::string effort : {"low", "medium", "high"}) {
      if (!groups.count(effort)) continue;
      const AccuracyStat stat = assassination_accuracy(groups.at(effort));
      out += "  " + effort + ": ";
      if (stat.fraction()) {
        out += std::to_string(stat.correct) + "/" + std::to_string(stat.attempts) + " (" +
               fmt(100.0 * *stat.fraction(), 1) + "%)\n";
        csv += effort + "," + std::to_string(stat.attempts) + "," +
               std::to_string(stat.correct) + "," + fmt(100.0 * *stat.fraction(), 2) + "\n";
      } else {
        out += "N/A (no attempts)\n";
        csv += effort + ",0,0,N/A\n";
      }
    }
    report.tables["assassination"] = csv;
  }

  // [8] Results by player count, [9] memory effect.
  out += "\n[8] Results by player count\n";
  {
    std::string csv = "players,games,evil_pct,good_pct,assn_attempts,assn_correct,assn_pct\n";
    const std::vector<WinRateRow> rows = win_rate_table(logs);
    if (rows.empty()) out += "  (empty)\n";
    for (const WinRateRow& row : rows) {
      out += "  " + std::to_string(row.player_count) + "p: " + std::to_string(row.games) +
             " games, evil " + fmt(row.evil_pct, 0) + "%, good " + fmt(row.good_pct, 0) +
             "%, assassination ";
      if (row.assassination.fraction()) {
        out += fmt(100.0 * *row.assassination.fraction(), 0) + "%";
      } else {
        out += "N/A";
      }
      out += "\n";
      csv += std::to_string(row.player_count) + "," + std::to_string(row.games) + "," +
             fmt(row.evil_pct, 2) + "," + fmt(row.good_pct, 2) + "," +
             std::to_string(row.assassination.attempts) + "," +
             std::to_string(row.assassination.correct) + ",";
      csv += row.assassination.fraction() ? fmt(100.0 * *row.assassination.fraction(), 2)
                                          : std::string("N/A");
      csv += "\n";
    }
    report.tables["win_rates"] = csv;
  }

  out += "\n[9] Memory effect by player count (evil win %)\n";
  {
    std::string csv = "players,memory_evil_pct,no_memory_evil_pct,diff_pp\n";
    const std::vector<MemoryEffectRow> rows = memory_effect_table(logs);
    bool any = false;
    for (const MemoryEffectRow& row : rows) {
      if (!row.memory_evil_pct || !row.no_memory_evil_pct) continue;
      any = true;
      out += "  " + std::to_string(row.player_count) + "p: memory " +
             fmt(*row.memory_evil_pct, 0) + "%, no memory " + fmt(*row.no_memory_evil_pct, 0) +
             "%, diff " + fmt(*row.diff_pp, 0) + "pp\n";
      csv += std::to_string(row.player_count) + "," + fmt(*row.memory_evil_pct, 2) + "," +
             fmt(*row.no_memory_evil_pct, 2) + "," + fmt(*row.diff_pp, 2) + "\n";
    }
    if (!any) out += "  (needs games in both memory conditions)\n";
    report.tables["memory_effect"] = csv;
  }

  // [10] Mean thinking time per decision, for gateway-backed games.
  out += "\n[10] Mean decision latency by reasoning effort\n";
  {
    std::string csv = "effort,decisions,mean_seconds\n";
    const auto stats = record_latency_stats(logs);
    if (stats.empty()) out += "  (no gateway-backed decisions)\n";
    for (const std::string effort : {"low", "medium", "high"}) {
      if (!stats.count(effort)) continue;
      const LatencyStat& s = stats.at(effort);
      out += "  " + effort + ": " + fmt(s.mean_seconds(), 1) + " s over " +
             std::to_string(s.decisions) + " decisions\n";
      csv += effort + "," + std::to_string(s.decisions) + "," + fmt(s.mean_seconds(), 3) + "\n";
    }
    report.tables["latency"] = csv;
  }

  return report;
}

}  // namespace avalon
