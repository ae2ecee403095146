#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace avalon;

namespace {

ReflectionRecord make_record(int game_id, const std::string& author,
                             const std::vector<std::string>& roster) {
  ReflectionRecord record;
  record.tournament_id = "t";
  record.game_id = game_id;
  record.author = author;
  record.author_role = RoleKind::LoyalServant;
  record.self_assessment = author + " self g" + std::to_string(game_id);
  for (const std::string& target : roster) {
    if (target == author) continue;
    record.observations[target] = Observation{
        author + " about " + target + " g" + std::to_string(game_id), RoleKind::Minion};
  }
  return record;
}

const std::vector<std::string> kRoster = {"Alice", "Bob", "Charlie", "Diana", "Eve"};

}  // namespace

TEST_CASE("reflections persist append-only with idempotency conflicts") {
  MemoryStore store;
  store.record_reflection(make_record(1, "Alice", kRoster));
  CHECK(store.size() == 1);
  CHECK_THROWS_AS(store.record_reflection(make_record(1, "Alice", kRoster)),
                  IdempotencyConflictError);
  store.record_reflection(make_record(2, "Alice", kRoster));
  store.record_reflection(make_record(1, "Bob", kRoster));
  CHECK(store.size() == 3);
}

TEST_CASE("context windows follow the last-3 rule") {
  MemoryStore store;
  for (int game = 1; game <= 4; ++game) {
    for (const std::string& who : kRoster) {
      store.record_reflection(make_record(game, who, kRoster));
    }
  }
  SECTION("before game 1 the context is empty") {
    const MemoryContext context = store.context_for("Alice", 1);
    CHECK(context.empty());
    CHECK(render_memory_prompt(context).empty());
  }
  SECTION("before game 5 only games 2-4 feed the self-assessments") {
    const MemoryContext context = store.context_for("Alice", 5);
    REQUIRE(context.self_assessments.size() == 3);
    CHECK(context.self_assessments[0].first == 2);
    CHECK(context.self_assessments[1].first == 3);
    CHECK(context.self_assessments[2].first == 4);
    CHECK(context.self_assessments[2].second == "Alice self g4");
  }
  SECTION("observations accumulate over all prior games, in order") {
    const MemoryContext context = store.context_for("Alice", 5);
    REQUIRE(context.observations_by_target.count("Bob"));
    const auto& about_bob = context.observations_by_target.at("Bob");
    REQUIRE(about_bob.size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(about_bob[static_cast<std::size_t>(i)].game_id == i + 1);
      CHECK(about_bob[static_cast<std::size_t>(i)].text ==
            "Alice about Bob g" + std::to_string(i + 1));
    }
  }
  SECTION("later games are excluded") {
    const MemoryContext context = store.context_for("Alice", 3);
    CHECK(context.self_assessments.size() == 2);
    CHECK(context.observations_by_target.at("Bob").size() == 2);
  }
  SECTION("an optional cap keeps only the most recent observations") {
    const MemoryContext context = store.context_for("Alice", 5, 3, 2);
    CHECK(context.observations_by_target.at("Bob").size() == 2);
    CHECK(context.observations_by_target.at("Bob").front().game_id == 3);
  }
}

TEST_CASE("memory isolation: contexts never carry another agent's text") {
  MemoryStore store;
  for (int game = 1; game <= 6; ++game) {
    for (const std::string& who : kRoster) {
      store.record_reflection(make_record(game, who, kRoster));
    }
  }
  for (const std::string& agent : kRoster) {
    const MemoryContext context = store.context_for(agent, 7);
    for (const auto& [game_id, text] : context.self_assessments) {
      (void)game_id;
      CHECK(text.rfind(agent + " self", 0) == 0);
    }
    for (const auto& [target, refs] : context.observations_by_target) {
      CHECK(target != agent);
      for (const auto& ref : refs) {
        CHECK(ref.text.rfind(agent + " about", 0) == 0);
      }
    }
  }
}

TEST_CASE("the store round-trips through its jsonl file") {
  testsupport::TempDir dir("memory");
  MemoryStore store;
  for (int game = 1; game <= 3; ++game) {
    for (const std::string& who : kRoster) {
      store.record_reflection(make_record(game, who, kRoster));
    }
  }
  const auto path = dir.path() / "memory.jsonl";
  store.save(path);
  const MemoryStore loaded = MemoryStore::load(path);
  CHECK(loaded.size() == store.size());
  for (const std::string& agent : kRoster) {
    CHECK(loaded.context_for(agent, 4) == store.context_for(agent, 4));
  }
  // Saving the loaded store reproduces the file byte for byte.
  const auto path2 = dir.path() / "memory2.jsonl";
  loaded.save(path2);
  CHECK(testsupport::read_file(path) == testsupport::read_file(path2));
}

TEST_CASE("memory records with a foreign schema version fail loudly") {
  testsupport::TempDir dir("memory_schema");
  const auto path = dir.path() / "memory.jsonl";
  Json j = reflection_to_json(make_record(1, "Alice", kRoster));
  j["schema_version"] = 99;
  testsupport::write_file(path, j.dump() + "\n");
  CHECK_THROWS_AS(MemoryStore::load(path), SchemaMigrationError);
}

TEST_CASE("the rendered memory prompt is deterministic and matches its golden") {
  MemoryContext context;
  context.self_assessments = {{3, "I pushed too hard for my own teams."}};
  context.observations_by_target["Bob"] = {
      {3, "Backed every team he was on.", RoleKind::Minion}};
  const std::string rendered = render_memory_prompt(context);
  CHECK(rendered == render_memory_prompt(context));
  const std::string golden = testsupport::read_file(testsupport::test_data_dir() /
                                                    "golden" / "memory_prompt.txt");
  CHECK(rendered == golden);
}

TEST_CASE("reflection records round-trip through json") {
  const ReflectionRecord record = make_record(7, "Diana", kRoster);
  CHECK(reflection_from_json(reflection_to_json(record)) == record);
}
