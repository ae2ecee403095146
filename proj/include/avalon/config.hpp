#pragma once

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <vector>

#include "avalon/core.hpp"

namespace avalon {

// Per-player-count rule tables: role multiset, mission team sizes, double-fail
// missions, and which evil role performs the assassination.
struct GameConfig {
  int player_count = 0;
  std::vector<RoleKind> roles;          // multiset, |roles| == player_count
  std::array<int, 5> mission_sizes{};   // mission m -> mission_sizes[m-1]
  std::set<int> double_fail_missions;   // mission numbers requiring 2 fails
  RoleKind assassin_designate = RoleKind::Assassin;
  int max_rejections = 4;
  std::vector<std::string> roster;      // fixed display names, seat order

  int mission_size(int mission) const {
    if (mission < 1 || mission > 5) {
      throw RuleViolationError("mission index out of range: " + std::to_string(mission));
    }
    return mission_sizes[static_cast<std::size_t>(mission - 1)];
  }

  const std::string& name_of(PlayerId id) const {
    if (id < 0 || id >= static_cast<int>(roster.size())) {
      throw RuleViolationError("player index out of range: " + std::to_string(id));
    }
    return roster[static_cast<std::size_t>(id)];
  }

  int evil_count() const {
    return static_cast<int>(std::count_if(roles.begin(), roles.end(),
                                          [](RoleKind r) { return is_evil(r); }));
  }

  bool operator==(const GameConfig&) const = default;
};

// Fail threshold for one mission: 2 on double-fail missions, otherwise 1.
inline int fail_threshold(const GameConfig& config, int mission) {
  if (mission < 1 || mission > 5) {
    throw RuleViolationError("mission index out of range: " + std::to_string(mission));
  }
  return config.double_fail_missions.count(mission) ? 2 : 1;
}

// Standard Avalon setup for 5-10 players.
inline GameConfig build_config(int player_count) {
  if (player_count < 5 || player_count > 10) {
    throw UnsupportedPlayerCountError("unsupported player count: " +
                                      std::to_string(player_count) +
                                      " (supported: 5-10)");
  }

  GameConfig config;
  config.player_count = player_count;
  config.roster = make_roster(player_count);

  const RoleKind M = RoleKind::Merlin;
  const RoleKind P = RoleKind::Percival;
  const RoleKind S = RoleKind::LoyalServant;
  const RoleKind A = RoleKind::Assassin;
  const RoleKind Mo = RoleKind::Morgana;
  const RoleKind Md = RoleKind::Mordred;
  const RoleKind O = RoleKind::Oberon;
  const RoleKind Mi = RoleKind::Minion;

  switch (player_count) {
    case 5:
      config.roles = {M, S, S, A, Mi};
      config.mission_sizes = {2, 3, 2, 3, 3};
      config.assassin_designate = A;
      break;
    case 6:
      config.roles = {M, P, S, S, Mo, Md};
      config.mission_sizes = {2, 3, 4, 3, 4};
      config.assassin_designate = Md;
      break;
    case 7:
      config.roles = {M, P, S, S, Mo, Md, O};
      config.mission_sizes = {2, 3, 3, 4, 4};
      config.assassin_designate = Mo;
      break;
    case 8:
      config.roles = {M, P, S, S, S, Mo, Md, A};
      config.mission_sizes = {3, 4, 4, 5, 5};
      config.assassin_designate = A;
      break;
    case 9:
      config.roles = {M, P, S, S, S, S, Mo, Md, A};
      config.mission_sizes = {3, 4, 4, 5, 5};
      config.assassin_designate = A;
      break;
    case 10:
      config.roles = {M, P, S, S, S, S, Mo, Md, O, A};
      config.mission_sizes = {3, 4, 4, 5, 5};
      config.assassin_designate = A;
      break;
  }
  if (player_count >= 7) {
    config.double_fail_missions = {4};
  }
  return config;
}

}  // namespace avalon
