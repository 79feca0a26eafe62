#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "helion/event_model.hpp"
#include "helion/generator.hpp"
#include "helion/ngram.hpp"

namespace fixtures {

inline std::vector<helion::EventToken> tokens(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<helion::EventToken> out;
  std::string t;
  while (in >> t) out.push_back(helion::parse_token(t));
  return out;
}

inline helion::Sequence sequence(std::string_view text) { return helion::Sequence(tokens(text)); }

inline std::vector<helion::Sequence> corpus(std::initializer_list<std::string_view> lines) {
  std::vector<helion::Sequence> out;
  for (auto l : lines) out.push_back(sequence(l));
  return out;
}

inline helion::Scenario scenario(std::string_view text) {
  helion::Scenario s;
  s.generated = tokens(text);
  s.marks.assign(s.generated.size(), helion::Pick::kUp);
  return s;
}

// Oracle corpora; the same five are hard-coded in tests/oracle/kn_oracle.py.
inline const std::vector<std::vector<helion::Sequence>>& oracle_corpora() {
  static const std::vector<std::vector<helion::Sequence>> all = [] {
    const std::string A = "door_lock|lock|LOCKED";
    const std::string B = "light_bulb|switch|ON";
    const std::string C = "motion_sensor|motion|DETECTED";
    const std::string D = "|locationMode|AWAY";
    const std::string E = "camera|switch|OFF&light_bulb|switch|ON";
    const auto line = [](std::initializer_list<std::string> ts) {
      std::string s;
      for (const auto& t : ts) s += (s.empty() ? "" : " ") + t;
      return sequence(s);
    };
    return std::vector<std::vector<helion::Sequence>>{
        {line({A, B, A, B})},
        {line({C, B, C, B, D, A, C, B})},
        {line({A, B, C}), line({C, B, A, D})},
        {line({D, A, D, A, E, C, B, D, A, E}), line({B, B, B})},
        {line({C, B, E, D, A, C, B, E, D, A, C, B}), line({A}), line({E, D})},
    };
  }();
  return all;
}

struct OracleRow {
  int corpus;
  int order;
  const char* context;  // space-separated names, may hold <s> and <unk>
  const char* next;
  double p;
};

inline constexpr OracleRow kOracleRows[] = {
#include "oracle/kn_expected.inc"
};

inline helion::TokenId oracle_id(const helion::NgramModel& m, std::string_view name) {
  if (name == helion::kBos) return m.bos_id();
  if (name == helion::kEos) return m.eos_id();
  const auto id = m.vocabulary().find(name);
  if (!id) throw std::runtime_error("oracle token not in model: " + std::string(name));
  return *id;
}

struct OracleSummary {
  std::size_t rows = 0;
  std::size_t failures = 0;
  double worst_relative_error = 0.0;
};

// Compares every frozen oracle row against the trained model.
inline OracleSummary compare_with_oracle(double tolerance) {
  OracleSummary s;
  std::vector<std::vector<helion::NgramModel>> models;
  for (const auto& c : oracle_corpora()) {
    models.push_back({helion::NgramModel::train(c, 2), helion::NgramModel::train(c, 3)});
  }
  for (const auto& row : kOracleRows) {
    const auto& m = models.at(static_cast<std::size_t>(row.corpus)).at(static_cast<std::size_t>(row.order - 2));
    std::vector<helion::TokenId> ctx;
    std::istringstream in(row.context);
    std::string name;
    while (in >> name) ctx.push_back(oracle_id(m, name));
    const double got = m.conditional(ctx, oracle_id(m, row.next));
    const double rel = std::abs(got - row.p) / row.p;
    s.worst_relative_error = std::max(s.worst_relative_error, rel);
    if (!(rel <= tolerance)) ++s.failures;
    ++s.rows;
  }
  return s;
}

struct PolicyFixture {
  const char* policy;
  const char* positive;  // fires the policy
  const char* negative;  // condition narrowly unmet
};

inline constexpr PolicyFixture kPolicyFixtures[] = {
    {"Pol_1", "gas_stove|switch|ON |locationMode|AWAY", "gas_stove|switch|ON |locationMode|HOME"},
    {"Pol_2", "smoke_detector|smoke|DETECTED gas_stove|switch|ON", "smoke_detector|smoke|CLEAR gas_stove|switch|ON"},
    {"Pol_3", "|locationMode|HOME camera|switch|ON", "|locationMode|AWAY camera|switch|ON"},
    {"Pol_4", "|locationMode|AWAY door_sensor|contact|OPEN", "|locationMode|HOME door_sensor|contact|OPEN"},
    {"Pol_5", "|locationMode|VACATION window_sensor|contact|OPEN light_bulb|switch|OFF",
     "|locationMode|HOME window_sensor|contact|OPEN light_bulb|switch|OFF"},
    {"Pol_6", "fire_sprinkler|switch|ON water_valve|valve|CLOSED", "fire_sprinkler|switch|OFF water_valve|valve|CLOSED"},
    {"Pol_7", "co_detector|carbonMonoxide|DETECTED air_purifier|switch|OFF",
     "co_detector|carbonMonoxide|CLEAR air_purifier|switch|OFF"},
    {"Pol_8", "|locationMode|VACATION window_shade|windowShade|OPEN", "|locationMode|HOME window_shade|windowShade|OPEN"},
    {"Pol_9", "|locationMode|AWAY door_lock|lock|UNLOCKED", "|locationMode|HOME door_lock|lock|UNLOCKED"},
    {"Pol_10", "door_lock|lock|UNLOCKED |locationMode|AWAY light_bulb|switch|OFF",
     "door_lock|lock|LOCKED |locationMode|AWAY light_bulb|switch|OFF"},
    {"Pol_11", "door_lock|lock|UNLOCKED sleep_monitor|sleeping|DETECTED",
     "door_lock|lock|UNLOCKED sleep_monitor|sleeping|NOT_DETECTED"},
    {"Pol_12", "sleep_monitor|sleeping|DETECTED garage_door|door|OPEN",
     "sleep_monitor|sleeping|NOT_DETECTED garage_door|door|OPEN"},
    {"Pol_13", "sleep_monitor|sleeping|DETECTED induction_cooktop|switch|ON",
     "sleep_monitor|sleeping|NOT_DETECTED induction_cooktop|switch|ON"},
    {"Pol_14", "garage_door|door|OPEN |locationMode|AWAY", "garage_door|door|CLOSED |locationMode|AWAY"},
    {"Pol_15", "glass_break_sensor|glassBreak|DETECTED light_bulb|switch|ON",
     "glass_break_sensor|glassBreak|DETECTED |notification|SENT"},
    {"Pol_16", "|locationMode|AWAY security_alarm|alarm|OFF", "|locationMode|AWAY security_alarm|alarm|ARMED"},
    {"Pol_17", "smoke_detector|smoke|CLEAR fire_sprinkler|switch|ON", "smoke_detector|smoke|DETECTED fire_sprinkler|switch|ON"},
};

inline std::string source_path(std::string_view relative) {
  return std::string(HELION_SOURCE_DIR) + "/" + std::string(relative);
}

}  // namespace fixtures
