#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace avalon {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class AvalonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Engine / rules violations.
class UnsupportedPlayerCountError : public AvalonError {
 public:
  using AvalonError::AvalonError;
};
class RuleViolationError : public AvalonError {
 public:
  using AvalonError::AvalonError;
};
class IncompleteBallotError : public AvalonError {
 public:
  using AvalonError::AvalonError;
};
class IllegalActionError : public AvalonError {
 public:
  using AvalonError::AvalonError;
};
class IllegalGuessError : public AvalonError {
 public:
  using AvalonError::AvalonError;
};

// Agent response handling.
class ParseFailureError : public AvalonError {
 public:
  using AvalonError::AvalonError;
};
class InvalidReferenceError : public AvalonError {
 public:
  using AvalonError::AvalonError;
};

// Memory store.
class IdempotencyConflictError : public AvalonError {
 public:
  using AvalonError::AvalonError;
};

// Log persistence. byte_offset points at the first unusable byte.
class LogParseError : public AvalonError {
 public:
  LogParseError(const std::string& what, std::size_t byte_offset)
      : AvalonError(what + " (byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_ = 0;
};
class SchemaMigrationError : public AvalonError {
 public:
  using AvalonError::AvalonError;
};

// Gateway.
class GatewayError : public AvalonError {
 public:
  using AvalonError::AvalonError;
};
class CredentialError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};
class GatewayUnavailableError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

// CLI / config files.
class ConfigError : public AvalonError {
 public:
  using AvalonError::AvalonError;
};

// ---------------------------------------------------------------------------
// Players
// ---------------------------------------------------------------------------

// Seat index, 0..player_count-1. Display names come from the roster.
using PlayerId = int;

// Fixed name pool; the first player_count entries form a game's roster.
inline const std::vector<std::string>& name_pool() {
  static const std::vector<std::string> pool = {
      "Alice", "Bob",   "Charlie", "Diana", "Eve",
      "Frank", "Grace", "Henry",   "Ivy",   "Jack"};
  return pool;
}

inline std::vector<std::string> make_roster(int player_count) {
  const auto& pool = name_pool();
  if (player_count < 1 || player_count > static_cast<int>(pool.size())) {
    throw UnsupportedPlayerCountError("no fixed roster for " +
                                      std::to_string(player_count) + " players");
  }
  return {pool.begin(), pool.begin() + player_count};
}

// ---------------------------------------------------------------------------
// Roles
// ---------------------------------------------------------------------------

enum class RoleKind {
  Merlin,
  Percival,
  LoyalServant,
  Assassin,
  Morgana,
  Mordred,
  Oberon,
  Minion,
};

enum class Alignment { Good, Evil };

constexpr Alignment alignment_of(RoleKind kind) {
  switch (kind) {
    case RoleKind::Merlin:
    case RoleKind::Percival:
    case RoleKind::LoyalServant:
      return Alignment::Good;
    default:
      return Alignment::Evil;
  }
}

constexpr bool is_good(RoleKind kind) { return alignment_of(kind) == Alignment::Good; }
constexpr bool is_evil(RoleKind kind) { return alignment_of(kind) == Alignment::Evil; }

inline std::string role_name(RoleKind kind) {
  switch (kind) {
    case RoleKind::Merlin: return "Merlin";
    case RoleKind::Percival: return "Percival";
    case RoleKind::LoyalServant: return "Loyal Servant";
    case RoleKind::Assassin: return "Assassin";
    case RoleKind::Morgana: return "Morgana";
    case RoleKind::Mordred: return "Mordred";
    case RoleKind::Oberon: return "Oberon";
    case RoleKind::Minion: return "Minion";
  }
  return "?";
}

// Stable identifiers used in files.
inline std::string role_token(RoleKind kind) {
  switch (kind) {
    case RoleKind::Merlin: return "merlin";
    case RoleKind::Percival: return "percival";
    case RoleKind::LoyalServant: return "loyal_servant";
    case RoleKind::Assassin: return "assassin";
    case RoleKind::Morgana: return "morgana";
    case RoleKind::Mordred: return "mordred";
    case RoleKind::Oberon: return "oberon";
    case RoleKind::Minion: return "minion";
  }
  return "?";
}

inline RoleKind parse_role_token(const std::string& token) {
  for (RoleKind kind : {RoleKind::Merlin, RoleKind::Percival, RoleKind::LoyalServant,
                        RoleKind::Assassin, RoleKind::Morgana, RoleKind::Mordred,
                        RoleKind::Oberon, RoleKind::Minion}) {
    if (role_token(kind) == token) return kind;
  }
  throw SchemaMigrationError("unknown role token: " + token);
}

inline std::string alignment_name(Alignment a) {
  return a == Alignment::Good ? "Good" : "Evil";
}

inline std::string alignment_token(Alignment a) {
  return a == Alignment::Good ? "good" : "evil";
}

inline Alignment parse_alignment_token(const std::string& token) {
  if (token == "good") return Alignment::Good;
  if (token == "evil") return Alignment::Evil;
  throw SchemaMigrationError("unknown alignment token: " + token);
}

// ---------------------------------------------------------------------------
// Reasoning effort
// ---------------------------------------------------------------------------

enum class Effort { Low, Medium, High };

inline std::string effort_token(Effort e) {
  switch (e) {
    case Effort::Low: return "low";
    case Effort::Medium: return "medium";
    case Effort::High: return "high";
  }
  return "?";
}

inline Effort parse_effort_token(const std::string& token) {
  if (token == "low") return Effort::Low;
  if (token == "medium") return Effort::Medium;
  if (token == "high") return Effort::High;
  throw ConfigError("unknown reasoning effort: " + token);
}

// ---------------------------------------------------------------------------
// Deterministic randomness
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

// Seeded generator with fully specified draw/shuffle algorithms, so the same
// seed produces the same game on any platform. All engine and scripted-agent
// randomness flows through this class.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [lo, hi], inclusive. Rejection sampling, no modulo bias.
  int uniform_int(int lo, int hi) {
    if (lo > hi) throw AvalonError("uniform_int: empty range");
    const std::uint64_t n = static_cast<std::uint64_t>(hi) - lo + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return lo + static_cast<int>(x % n);
  }

  bool coin() { return (next_u64() & 1) != 0; }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (int i = static_cast<int>(values.size()) - 1; i > 0; --i) {
      const int j = uniform_int(0, i);
      using std::swap;
      swap(values[i], values[j]);
    }
  }

  template <typename T>
  const T& pick(const std::vector<T>& values) {
    if (values.empty()) throw AvalonError("pick: empty vector");
    return values[uniform_int(0, static_cast<int>(values.size()) - 1)];
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace avalon
