#include <doctest.h>

#include <string>

#include "helion/error.hpp"
#include "helion/ingest.hpp"
#include "support/fixtures.hpp"

using namespace helion;

namespace {

std::string routine_json(const std::string& id, const std::string& time_range) {
  return R"({"id": ")" + id +
         R"(", "triggers": ["motion_sensor|motion|DETECTED"], "actions": ["light_bulb|switch|ON"],)"
         R"( "indicators": {"time_range": ")" +
         time_range + R"(", "day_range": "ANYTIME", "frequency": "FEW_PER_DAY"}})";
}

std::string routines_file(const std::vector<std::string>& records) {
  std::string out = R"({"routines": [)";
  for (std::size_t i = 0; i < records.size(); ++i) out += (i ? "," : "") + records[i];
  return out + "]}";
}

bool has_message(const IngestResult& r, const std::string& text) {
  for (const auto& d : r.diagnostics) {
    if (d.message == text) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("indicator tallies report truncated percentages") {
  std::vector<std::string> records;
  for (int i = 0; i < 273; ++i) {
    records.push_back(routine_json("r" + std::to_string(i), i < 11 ? "NOT_SURE" : "MORNING"));
  }
  const auto result = ingest_text(routines_file(records), {});
  CHECK(result.routine_count() == 273);
  CHECK_FALSE(result.has_errors());
  CHECK(has_message(result, "time_range not_sure: 11 (4.02%)"));
  CHECK(has_message(result, "day_range not_sure: 0 (0.00%)"));
}

TEST_CASE("truncated_percent") {
  CHECK(truncated_percent(11, 273) == "4.02");
  CHECK(truncated_percent(1, 3) == "33.33");
  CHECK(truncated_percent(2, 3) == "66.66");
  CHECK(truncated_percent(273, 273) == "100.00");
  CHECK(truncated_percent(0, 0) == "0.00");
}

TEST_CASE("duplicate routine ids are ingest errors") {
  const auto result = ingest_text(routines_file({routine_json("a", "NIGHT"), routine_json("a", "NOON")}), {});
  CHECK(result.has_errors());
  CHECK(result.routine_count() == 1);
  bool found = false;
  for (const auto& d : result.diagnostics) {
    if (d.severity == Diagnostic::Severity::kError && d.record == 2) {
      found = d.message.find("duplicate routine id 'a'") != std::string::npos;
    }
  }
  CHECK(found);
}

TEST_CASE("a valid file yields no error diagnostics") {
  TokenizerContext ctx;
  ctx.catalog = load_device_catalog(fixtures::source_path("data/devices.json"));
  ctx.synonyms = load_synonym_table(fixtures::source_path("data/synonyms.json"));
  ctx.abstraction = load_abstraction_map(fixtures::source_path("data/abstraction.json"));
  const auto result = ingest_file(fixtures::source_path("data/routines_example.json"), ctx);
  CHECK_FALSE(result.has_errors());
  REQUIRE(result.users.size() == 1);
  CHECK(result.users[0].user == "alice");
  const auto& routines = result.users[0].routines;
  REQUIRE(routines.size() == 6);
  CHECK(routines[0].triggers[0].text() == "motion_sensor|motion|DETECTED");
  CHECK(routines[1].specific_time == 8);
  CHECK(routines[2].actions.size() == 1);
  CHECK(routines[2].actions[0].text() == "camera|switch|ON&door_lock|lock|LOCKED");
  CHECK(routines[3].triggers[0].text() == "thermostat|temperature|LOW");
  CHECK(routines[4].actions[0].text() == "camera|switch|OFF&light_bulb|switch|ON");
  CHECK(routines[5].actions.size() == 2);
}

TEST_CASE("omitted indicators become NOT_SURE with a warning") {
  const auto text = routines_file(
      {R"({"id": "x", "triggers": ["a|b|C"], "actions": ["d|e|F"], "indicators": {"time_range": "NIGHT"}})"});
  const auto result = ingest_text(text, {});
  REQUIRE(result.routine_count() == 1);
  const auto& r = result.users[0].routines[0];
  CHECK(r.indicators.day_range == DayRange::kNotSure);
  CHECK(r.indicators.frequency == Frequency::kNotSure);
  int warnings = 0;
  for (const auto& d : result.diagnostics) warnings += d.severity == Diagnostic::Severity::kWarning;
  CHECK(warnings == 2);
}

TEST_CASE("unknown attributes are reported per record") {
  TokenizerContext ctx;
  ctx.catalog.devices["camera"]["switch"] = {"ON", "OFF"};
  const auto text = routines_file(
      {R"({"id": "x", "triggers": [{"device": "camera", "attribute": "zoom", "value": "in"}], "actions": [{"device": "camera", "attribute": "switch", "value": "on"}]})"});
  const auto result = ingest_text(text, ctx);
  CHECK(result.has_errors());
  CHECK(result.routine_count() == 0);
}

TEST_CASE("schema violations throw and list record numbers") {
  const auto text = routines_file({routine_json("ok", "NIGHT"), R"({"id": "bad", "actions": ["a|b|C"]})",
                                   R"({"id": "worse", "triggers": [], "actions": ["a|b|C"]})"});
  try {
    ingest_text(text, {});
    FAIL("expected an InputError");
  } catch (const InputError& e) {
    const std::string what = e.what();
    CHECK(what.find("record 2") != std::string::npos);
    CHECK(what.find("record 3") != std::string::npos);
    CHECK(what.find("record 1") == std::string::npos);
  }
  CHECK_THROWS_AS(ingest_text("{not json", {}), ParseError);
  CHECK_THROWS_AS(ingest_text(R"({"nothing": 1})", {}), InputError);
  CHECK_THROWS_AS(ingest_text(routines_file({R"({"id": "t", "triggers": ["a|b|C"], "actions": ["d|e|F"], "indicators": {"time_range": "BRUNCH"}})"}), {}),
                  InputError);
}

TEST_CASE("normalized output ingests back unchanged") {
  const auto first = ingest_file(fixtures::source_path("data/routines_example.json"), {});
  const auto text = write_routines_json(first.users);
  const auto second = ingest_text(text, {});
  REQUIRE(second.users.size() == first.users.size());
  CHECK(second.users[0].routines == first.users[0].routines);
  CHECK(write_routines_json(second.users) == text);
}

TEST_CASE("abstraction maps default to three labels") {
  const auto map = load_abstraction_map(fixtures::source_path("data/abstraction.json"));
  const auto* humidity = map.find("humidity");
  REQUIRE(humidity);
  CHECK(humidity->labels == std::vector<std::string>{"LOW", "MEDIUM", "HIGH"});
  CHECK(humidity->label_for(10) == "LOW");
  CHECK(humidity->label_for(45) == "MEDIUM");
}
