#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "helion/error.hpp"
#include "helion/snapshot.hpp"
#include "support/fixtures.hpp"

using namespace helion;

namespace {

const std::vector<Policy>& pack() {
  static const std::vector<Policy> p = load_policy_file(fixtures::source_path("policies/default.pol"));
  return p;
}

std::vector<Violation> check_text(std::string_view events) {
  return check(fixtures::scenario(events), pack());
}

int fired(const std::vector<Violation>& vs, std::string_view id) {
  int n = 0;
  for (const auto& v : vs) n += v.policy_id == id;
  return n;
}

std::vector<Policy> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_policies(in);
}

}  // namespace

TEST_CASE("apply_event") {
  HomeState s;
  s = apply_event(s, parse_token("door_lock|lock|LOCKED"));
  CHECK(s.device_state.at({"door_lock", "lock"}) == "LOCKED");
  s = apply_event(s, parse_token("|locationMode|AWAY"));
  CHECK(s.home_state.at("locationMode") == "AWAY");
  CHECK(apply_event(s, parse_token("|locationMode|AWAY")) == s);
  s = apply_event(s, parse_token("camera|switch|OFF&light_bulb|switch|ON"));
  CHECK(s.device_state.at({"camera", "switch"}) == "OFF");
  CHECK(s.device_state.at({"light_bulb", "switch"}) == "ON");
  CHECK(s.device_state.size() == 3);
}

TEST_CASE("state holds the most recent assignment or stays unknown") {
  const auto events = fixtures::tokens(
      "door_lock|lock|LOCKED light_bulb|switch|ON door_lock|lock|UNLOCKED |locationMode|HOME light_bulb|switch|OFF");
  HomeState s;
  for (std::size_t i = 0; i < events.size(); ++i) {
    s = apply_event(s, events[i]);
    for (const auto& [key, value] : s.device_state) {
      std::string last;
      for (std::size_t j = 0; j <= i; ++j) {
        if (events[j].device() == key.first && events[j].attribute() == key.second) last = events[j].action();
      }
      CHECK(value == last);
    }
  }
  CHECK_FALSE(s.value({"camera", "switch"}).has_value());
}

TEST_CASE("unknown values fail every comparator") {
  const HomeState empty;
  for (auto cmp : {Comparator::kEq, Comparator::kNe, Comparator::kIn, Comparator::kNotIn}) {
    Predicate p{{std::nullopt, "locationMode"}, cmp, {"HOME"}};
    CHECK_FALSE(p.holds(empty));
  }
  HomeState s = apply_event({}, parse_token("|locationMode|AWAY"));
  CHECK(Predicate{{std::nullopt, "locationMode"}, Comparator::kNe, {"HOME"}}.holds(s));
  CHECK(Predicate{{std::nullopt, "locationMode"}, Comparator::kNotIn, {"HOME", "GUEST"}}.holds(s));
  CHECK_FALSE(Predicate{{std::nullopt, "locationMode"}, Comparator::kIn, {"HOME", "GUEST"}}.holds(s));
}

TEST_CASE("event patterns") {
  const auto any_mode = EventPattern::parse("|locationMode|*");
  CHECK(any_mode.matches(parse_token("|locationMode|AWAY")));
  CHECK_FALSE(any_mode.matches(parse_token("x|locationMode|AWAY")));
  const auto any_device = EventPattern::parse("*|switch|ON");
  CHECK(any_device.matches(parse_token("tv|switch|ON")));
  CHECK(any_device.matches(parse_token("|switch|ON")));
  CHECK(any_device.matches(parse_token("camera|switch|OFF&tv|switch|ON")));
  CHECK_FALSE(any_device.matches(parse_token("tv|switch|OFF")));
  CHECK_THROWS_AS(EventPattern::parse("tv|switch"), ParseError);
}

TEST_CASE("the default pack holds 17 well-formed policies") {
  REQUIRE(pack().size() == 17);
  for (std::size_t i = 0; i < pack().size(); ++i) {
    CHECK(pack()[i].id == "Pol_" + std::to_string(i + 1));
    CHECK_FALSE(pack()[i].description.empty());
    CHECK_NOTHROW(validate_policy(pack()[i]));
  }
}

TEST_CASE("worked scenarios") {
  SUBCASE("gas stove on, then away") {
    const auto vs = check_text("gas_stove|switch|ON |locationMode|AWAY");
    REQUIRE(fired(vs, "Pol_1") == 1);
    CHECK(vs[0].event_index == 1);
  }
  SUBCASE("smoke, then gas stove on") {
    const auto vs = check_text("smoke_detector|smoke|DETECTED gas_stove|switch|ON");
    REQUIRE(fired(vs, "Pol_2") == 1);
    CHECK(vs[0].event_index == 1);
  }
  SUBCASE("door opens while away with no notification") {
    const auto vs = check_text("|locationMode|AWAY door_sensor|contact|OPEN");
    CHECK(fired(vs, "Pol_4") == 1);
    CHECK(vs.size() == 1);
  }
}

TEST_CASE("each shipped policy has a positive and a negative fixture") {
  for (const auto& f : fixtures::kPolicyFixtures) {
    CAPTURE(f.policy);
    CHECK(fired(check_text(f.positive), f.policy) >= 1);
    CHECK(fired(check_text(f.negative), f.policy) == 0);
  }
}

TEST_CASE("obligations") {
  SUBCASE("met inside the window") {
    CHECK(check_text("|locationMode|AWAY door_sensor|contact|OPEN light_bulb|switch|ON |notification|SENT").empty());
  }
  SUBCASE("missed window reports at its last event") {
    const auto vs = check_text(
        "|locationMode|AWAY door_sensor|contact|OPEN a|x|A b|x|B c|x|C |notification|SENT d|x|D");
    REQUIRE(fired(vs, "Pol_4") == 1);
    CHECK(vs[0].event_index == 4);
    CHECK(vs[0].snapshot.device_state.count({"c", "x"}) == 1);
  }
  SUBCASE("a notification before the trigger does not count") {
    CHECK(fired(check_text("|notification|SENT |locationMode|AWAY door_sensor|contact|OPEN"), "Pol_4") == 1);
  }
  SUBCASE("each trigger opens its own window") {
    CHECK(fired(check_text("glass_break_sensor|glassBreak|DETECTED glass_break_sensor|glassBreak|DETECTED a|x|A b|x|B c|x|C"),
                "Pol_15") == 2);
  }
}

TEST_CASE("no locationMode event means no locationMode policy fires") {
  const auto vs = check_text(
      "gas_stove|switch|ON camera|switch|ON door_sensor|contact|OPEN window_shade|windowShade|OPEN "
      "door_lock|lock|UNLOCKED garage_door|door|OPEN security_alarm|alarm|OFF window_sensor|contact|OPEN");
  for (const auto* id : {"Pol_1", "Pol_3", "Pol_4", "Pol_5", "Pol_8", "Pol_9", "Pol_10", "Pol_14", "Pol_16"}) {
    CHECK(fired(vs, id) == 0);
  }
}

TEST_CASE("extending a scenario keeps earlier state violations") {
  const std::string base = "gas_stove|switch|ON |locationMode|AWAY";
  const auto before = check_text(base);
  const auto after = check_text(base + " gas_stove|switch|OFF |locationMode|HOME camera|switch|ON");
  REQUIRE(before.size() == 1);
  bool kept = false;
  for (const auto& v : after) kept = kept || (v.policy_id == before[0].policy_id && v.event_index == before[0].event_index);
  CHECK(kept);
}

TEST_CASE("trigger any fires on every matching state") {
  const auto ps = parse(
      "policy P\nkind state_forbidden\ntrigger any\nwhen tv.switch == ON\ndescription TV on.\nend\n");
  CHECK(check(fixtures::scenario("tv|switch|ON a|x|A b|x|B"), ps).size() == 3);
}

TEST_CASE("malformed policies are rejected before replay") {
  // in a policy file, invalid policies are reported with their line
  CHECK_THROWS_WITH_AS(parse("policy P\nkind state_forbidden\ntrigger a|b|C\nend\n"),
                       doctest::Contains("line 4"), ParseError);
  CHECK_THROWS_AS(parse("policy P\nkind obligation\ntrigger a|b|C\nend\n"), ParseError);
  CHECK_THROWS_AS(parse("policy P\nkind state_forbidden\ntrigger a|b|C\nwhen a.b == C\nwindow 3\nend\n"),
                  ParseError);
  CHECK_THROWS_AS(parse("policy P\nkind sometimes\nend\n"), ParseError);
  CHECK_THROWS_AS(parse("policy P\nkind obligation\n"), ParseError);
  CHECK_THROWS_AS(parse("kind obligation\n"), ParseError);
  CHECK_THROWS_AS(parse("policy P\nwhen a.b >= C\nend\n"), ParseError);
  CHECK_THROWS_AS(parse("policy P\nwhen ab == C\nend\n"), ParseError);

  Policy bad;
  bad.id = "X";
  bad.kind = PolicyKind::kObligation;
  bad.triggers.push_back(EventPattern::parse("a|b|C"));
  const std::vector<Policy> ps{bad};
  CHECK_THROWS_AS(check(fixtures::scenario("a|b|C"), ps), InputError);

  const auto ok = parse("policy P\nkind obligation\ntrigger a|b|C\nobligation |notification|SENT\nend\n");
  CHECK(ok[0].obligation_window == kDefaultObligationWindow);
}

TEST_CASE("render_report") {
  SUBCASE("no violations") {
    const auto doc = render_report({}, fixtures::scenario("a|x|A"));
    CHECK(doc.exit_status == 0);
    CHECK(doc.text.find("no violations") != std::string::npos);
    CHECK(doc.records.empty());
  }
  SUBCASE("one violation names its policy once") {
    const auto s = fixtures::scenario("gas_stove|switch|ON |locationMode|AWAY");
    const auto vs = check(s, pack());
    const auto doc = render_report(vs, s);
    CHECK(doc.exit_status == 1);
    std::size_t count = 0;
    for (auto pos = doc.text.find("Pol_1"); pos != std::string::npos; pos = doc.text.find("Pol_1", pos + 1)) ++count;
    CHECK(count == 1);
    CHECK(doc.text.find("gas_stove.switch=ON") != std::string::npos);
    CHECK(doc.text.find("@locationMode=AWAY") != std::string::npos);
    CHECK(doc.records.find(R"("policy":"Pol_1")") != std::string::npos);
  }
  SUBCASE("sorted by event index") {
    const auto s = fixtures::scenario("gas_stove|switch|ON |locationMode|AWAY camera|switch|ON");
    auto vs = check(s, pack());
    std::reverse(vs.begin(), vs.end());
    const auto doc = render_report(vs, s);
    CHECK(doc.text.find("[1]") < doc.text.find("[2]"));
  }
}

TEST_CASE("parallel and serial checking agree") {
  std::vector<Scenario> scenarios;
  for (const auto& f : fixtures::kPolicyFixtures) {
    scenarios.push_back(fixtures::scenario(f.positive));
    scenarios.push_back(fixtures::scenario(f.negative));
  }
  const auto serial = check_all(scenarios, pack(), {}, Execution::kSerial);
  const auto parallel = check_all(scenarios, pack(), {}, Execution::kParallel);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(render_report(serial[i], scenarios[i], i).records == render_report(parallel[i], scenarios[i], i).records);
  }
}
