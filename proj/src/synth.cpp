#include "helion/synth.hpp"

#include <algorithm>
#include <sstream>

#include "helion/error.hpp"
#include "helion/rng.hpp"

namespace helion {
namespace {

struct Template {
  const char* id;
  const char* triggers;  // space-separated tokens
  const char* actions;
  TimeRange time;
  DayRange day;
  Frequency freq;
  int at = -1;  // specific hour, -1 for none
};

using T = TimeRange;
using D = DayRange;
using F = Frequency;

// MANY_PER_DAY routines stay unconstrained in time and FEW_PER_DAY ones keep
// windows of at least four hours, so every 25-routine draw fits 30 days.
const Template kPool[] = {
    {"morning_blinds", "|time|MORNING", "window_shade|windowShade|OPEN", T::kMorning, D::kAnytime, F::kFewPerDay, 8},
    {"night_blinds", "|time|NIGHT", "window_shade|windowShade|CLOSED", T::kNight, D::kAnytime, F::kFewPerDay, 22},
    {"motion_light", "motion_sensor|motion|DETECTED", "light_bulb|switch|ON", T::kAnytime, D::kAnytime, F::kManyPerDay},
    {"no_motion_light_off", "motion_sensor|motion|INACTIVE", "light_bulb|switch|OFF", T::kAnytime, D::kAnytime, F::kManyPerDay},
    {"leave_lock", "|locationMode|AWAY", "door_lock|lock|LOCKED", T::kMorning, D::kWeekdays, F::kFewPerDay},
    {"arrive_unlock", "|locationMode|HOME", "door_lock|lock|UNLOCKED", T::kEvening, D::kWeekdays, F::kFewPerDay},
    {"leave_camera", "|locationMode|AWAY", "camera|switch|ON", T::kMorning, D::kWeekdays, F::kFewPerWeek},
    {"arrive_camera", "|locationMode|HOME", "camera|switch|OFF", T::kEvening, D::kWeekdays, F::kFewPerWeek},
    {"coffee", "|time|EARLY_MORNING", "coffee_maker|switch|ON", T::kEarlyMorning, D::kWeekdays, F::kFewPerWeek, 6},
    {"smoke_alarm", "smoke_detector|smoke|DETECTED", "security_alarm|alarm|SIREN |notification|SENT", T::kNotSure, D::kNotSure, F::kFewPerMonth},
    {"smoke_clear", "smoke_detector|smoke|CLEAR", "security_alarm|alarm|OFF", T::kNotSure, D::kNotSure, F::kFewPerMonth},
    {"smoke_sprinkler", "smoke_detector|smoke|DETECTED", "fire_sprinkler|switch|ON", T::kNotSure, D::kNotSure, F::kFewPerMonth},
    {"stove_fan", "gas_stove|switch|ON", "exhaust_fan|switch|ON", T::kEvening, D::kAnytime, F::kFewPerDay},
    {"stove_off_fan", "gas_stove|switch|OFF", "exhaust_fan|switch|OFF", T::kEvening, D::kAnytime, F::kFewPerDay},
    {"door_open_notify", "door_sensor|contact|OPEN", "|notification|SENT", T::kAnytime, D::kAnytime, F::kFewPerDay},
    {"door_open_light", "door_sensor|contact|OPEN", "hallway_light|switch|ON", T::kEvening, D::kAnytime, F::kFewPerDay},
    {"window_open_thermo", "window_sensor|contact|OPEN", "thermostat|thermostatMode|OFF", T::kAfternoon, D::kWeekends, F::kFewPerWeek},
    {"window_closed_thermo", "window_sensor|contact|CLOSED", "thermostat|thermostatMode|AUTO", T::kEvening, D::kWeekends, F::kFewPerWeek},
    {"hot_ac", "thermostat|temperature|HIGH", "air_conditioner|switch|ON", T::kAfternoon, D::kAnytime, F::kFewPerWeek},
    {"cool_ac_off", "thermostat|temperature|LOW", "air_conditioner|switch|OFF", T::kNight, D::kAnytime, F::kFewPerWeek},
    {"cold_heater", "thermostat|temperature|LOW", "space_heater|switch|ON", T::kLateNight, D::kAnytime, F::kFewPerWeek},
    {"humid_dehumidifier", "humidity_sensor|humidity|HIGH", "dehumidifier|switch|ON", T::kAfternoon, D::kAnytime, F::kFewPerWeek},
    {"dry_dehumidifier", "humidity_sensor|humidity|LOW", "dehumidifier|switch|OFF", T::kEvening, D::kAnytime, F::kFewPerWeek},
    {"leak_valve", "water_sensor|water|WET", "water_valve|valve|CLOSED |notification|SENT", T::kNotSure, D::kNotSure, F::kFewPerMonth},
    {"dry_valve", "water_sensor|water|DRY", "water_valve|valve|OPEN", T::kNotSure, D::kNotSure, F::kFewPerMonth},
    {"co_purifier", "co_detector|carbonMonoxide|DETECTED", "air_purifier|switch|ON window_shade|windowShade|OPEN", T::kNotSure, D::kNotSure, F::kFewPerMonth},
    {"co_clear", "co_detector|carbonMonoxide|CLEAR", "air_purifier|switch|OFF", T::kNotSure, D::kNotSure, F::kFewPerMonth},
    {"sleep_lock", "sleep_monitor|sleeping|DETECTED", "door_lock|lock|LOCKED", T::kNight, D::kAnytime, F::kFewPerDay, 23},
    {"sleep_lights", "sleep_monitor|sleeping|DETECTED", "light_bulb|switch|OFF tv|switch|OFF", T::kNight, D::kAnytime, F::kFewPerDay, 23},
    {"wake_lights", "sleep_monitor|sleeping|NOT_DETECTED", "light_bulb|switch|ON", T::kEarlyMorning, D::kWeekdays, F::kFewPerDay, 6},
    {"sleep_garage", "sleep_monitor|sleeping|DETECTED", "garage_door|door|CLOSED", T::kNight, D::kWeekends, F::kFewPerWeek},
    {"garage_arrive", "car_presence|presence|PRESENT", "garage_door|door|OPEN", T::kEvening, D::kWeekdays, F::kFewPerDay},
    {"garage_leave", "car_presence|presence|NOT_PRESENT", "garage_door|door|CLOSED", T::kMorning, D::kWeekdays, F::kFewPerDay},
    {"glass_break", "glass_break_sensor|glassBreak|DETECTED", "security_alarm|alarm|SIREN", T::kNotSure, D::kNotSure, F::kFewPerMonth},
    {"alarm_arm", "|locationMode|AWAY", "security_alarm|alarm|ARMED", T::kMorning, D::kAnytime, F::kFewPerWeek},
    {"alarm_disarm", "|locationMode|HOME", "security_alarm|alarm|OFF", T::kEvening, D::kAnytime, F::kFewPerWeek},
    {"vacation_mode", "|locationMode|VACATION", "thermostat|thermostatMode|ECO door_lock|lock|LOCKED", T::kNotSure, D::kNotSure, F::kFewPerMonth},
    {"tv_dim", "tv|switch|ON", "light_bulb|level|LOW", T::kEvening, D::kAnytime, F::kFewPerDay},
    {"tv_off_lights", "tv|switch|OFF", "light_bulb|level|HIGH", T::kEvening, D::kAnytime, F::kFewPerDay},
    {"doorbell_camera", "doorbell|button|PUSHED", "camera|switch|ON |notification|SENT", T::kAfternoon, D::kAnytime, F::kFewPerWeek},
    {"doorbell_light", "doorbell|button|PUSHED", "porch_light|switch|ON", T::kNight, D::kAnytime, F::kFewPerWeek},
    {"sunset_porch", "|time|SUNSET", "porch_light|switch|ON", T::kEvening, D::kAnytime, F::kFewPerDay, 18},
    {"sunrise_porch", "|time|SUNRISE", "porch_light|switch|OFF", T::kEarlyMorning, D::kAnytime, F::kFewPerDay, 6},
    {"robot_vacuum", "|locationMode|AWAY", "robot_vacuum|switch|ON", T::kNoon, D::kWeekdays, F::kFewPerWeek},
    {"robot_dock", "robot_vacuum|switch|OFF", "robot_vacuum|dock|DOCKED", T::kAfternoon, D::kWeekdays, F::kFewPerWeek},
    {"washer_done", "washer|status|DONE", "|notification|SENT speaker|speech|PLAYING", T::kAnytime, D::kWeekends, F::kFewPerWeek},
    {"dryer_done", "dryer|status|DONE", "|notification|SENT", T::kAnytime, D::kWeekends, F::kFewPerWeek},
    {"plant_water", "soil_sensor|moisture|LOW", "sprinkler|switch|ON", T::kEarlyMorning, D::kAnytime, F::kFewPerWeek},
    {"plant_stop", "soil_sensor|moisture|HIGH", "sprinkler|switch|OFF", T::kMorning, D::kAnytime, F::kFewPerWeek},
    {"bath_fan", "bathroom_humidity|humidity|HIGH", "bathroom_fan|switch|ON", T::kAnytime, D::kAnytime, F::kFewPerDay},
    {"bath_fan_off", "bathroom_humidity|humidity|LOW", "bathroom_fan|switch|OFF", T::kAnytime, D::kAnytime, F::kFewPerDay},
    {"music_home", "|locationMode|HOME", "speaker|switch|ON", T::kEvening, D::kWeekends, F::kFewPerWeek},
    {"cooktop_timer", "induction_cooktop|switch|ON", "kitchen_light|switch|ON", T::kEvening, D::kAnytime, F::kFewPerDay},
    {"cooktop_off", "induction_cooktop|switch|OFF", "kitchen_light|switch|OFF", T::kEvening, D::kAnytime, F::kFewPerDay},
    {"kettle_morning", "kitchen_motion|motion|DETECTED", "kettle|switch|ON", T::kEarlyMorning, D::kWeekdays, F::kFewPerWeek},
    {"pet_feeder", "|time|NOON", "pet_feeder|feeder|DISPENSED", T::kNoon, D::kAnytime, F::kFewPerDay, 12},
    {"front_door_scene", "front_door|contact|OPEN&light_bulb|switch|ON", "|locationMode|HOME", T::kEvening, D::kAnytime, F::kFewPerWeek},
    {"leaving_scene", "door_lock|lock|LOCKED", "light_bulb|switch|OFF&tv|switch|OFF", T::kMorning, D::kWeekdays, F::kFewPerWeek},
    {"blinds_heat", "thermostat|temperature|HIGH", "window_shade|windowShade|CLOSED", T::kNoon, D::kAnytime, F::kFewPerWeek},
    {"guest_mode", "|locationMode|GUEST", "door_lock|lock|UNLOCKED camera|switch|OFF", T::kNotSure, D::kNotSure, F::kNotSure},
    {"light_motion_hall", "hallway_motion|motion|DETECTED", "hallway_light|switch|ON", T::kNotSure, D::kAnytime, F::kManyPerDay},
    {"late_snack", "kitchen_motion|motion|DETECTED", "kitchen_light|level|LOW", T::kLateNight, D::kAnytime, F::kFewPerWeek},
};

std::vector<EventToken> parse_list(const char* text) {
  std::istringstream in(text);
  std::vector<EventToken> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_token(tok));
  return out;
}

}  // namespace

const std::vector<Routine>& synthetic_routine_pool() {
  static const std::vector<Routine> pool = [] {
    std::vector<Routine> out;
    for (const Template& t : kPool) {
      Routine r;
      r.id = t.id;
      r.triggers = parse_list(t.triggers);
      r.actions = parse_list(t.actions);
      r.indicators = {t.time, t.day, t.freq};
      if (t.at >= 0) r.specific_time = t.at;
      validate_routine(r);
      out.push_back(std::move(r));
    }
    return out;
  }();
  return pool;
}

std::vector<UserRoutines> synthetic_users(const SyntheticConfig& cfg) {
  const auto& pool = synthetic_routine_pool();
  if (cfg.users < 1) throw InputError("need at least one synthetic user");
  if (cfg.routines_per_user < 1 || static_cast<std::size_t>(cfg.routines_per_user) > pool.size()) {
    throw InputError("routines per user must lie in [1, " + std::to_string(pool.size()) + "]");
  }
  std::vector<UserRoutines> users;
  for (int u = 0; u < cfg.users; ++u) {
    Rng rng(derive_seed(cfg.seed, "users", static_cast<std::uint64_t>(u)));
    UserRoutines ur;
    ur.user = "user" + std::to_string(u + 1);
    auto picks = rng.sample(pool.size(), static_cast<std::size_t>(cfg.routines_per_user));
    std::sort(picks.begin(), picks.end());
    for (std::size_t i : picks) ur.routines.push_back(pool[i]);
    users.push_back(std::move(ur));
  }
  return users;
}

std::vector<ScheduledUser> schedule_users(const std::vector<UserRoutines>& users, int days,
                                          std::uint64_t seed) {
  std::vector<ScheduledUser> out;
  for (std::size_t u = 0; u < users.size(); ++u) {
    auto timeline = schedule(users[u].routines, days, derive_seed(seed, "user", u));
    auto seq = extract_sequence(timeline, users[u].routines, users[u].user);
    out.push_back({std::move(timeline), std::move(seq)});
  }
  return out;
}

std::vector<Sequence> synthetic_corpus(const SyntheticConfig& cfg) {
  std::vector<Sequence> corpus;
  for (auto& u : schedule_users(synthetic_users(cfg), cfg.days, cfg.seed)) {
    corpus.push_back(std::move(u.sequence));
  }
  return corpus;
}

}  // namespace helion
