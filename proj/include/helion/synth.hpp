#pragma once

#include <cstdint>
#include <vector>

#include "helion/event_model.hpp"
#include "helion/ingest.hpp"
#include "helion/scheduler.hpp"

namespace helion {

// A fixed pool of plausible household routines with execution indicators,
// sized so any 25 of them fit a 30-day timeline.
const std::vector<Routine>& synthetic_routine_pool();

struct SyntheticConfig {
  int users = 10;
  int routines_per_user = 25;
  int days = kDefaultHorizonDays;
  std::uint64_t seed = 0;
};

// Each user draws `routines_per_user` distinct routines from the pool.
std::vector<UserRoutines> synthetic_users(const SyntheticConfig& cfg);

struct ScheduledUser {
  ScheduleTimeline timeline;
  Sequence sequence;
};

// Schedules each user on its own stream, derive_seed(seed, "user", index).
std::vector<ScheduledUser> schedule_users(const std::vector<UserRoutines>& users, int days,
                                          std::uint64_t seed);

// Schedules every synthetic user and returns one month-long sequence each.
std::vector<Sequence> synthetic_corpus(const SyntheticConfig& cfg);

}  // namespace helion
