#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "helion/event_model.hpp"
#include "helion/rng.hpp"

namespace helion {

inline constexpr int kDefaultHorizonDays = 30;

enum class DayFilter { kAny, kWeekdays, kWeekends };

// Hours of day a routine may occupy, plus the day filter its day range implies.
struct SlotWindow {
  std::vector<int> hours;  // ascending, non-empty
  DayFilter day_filter = DayFilter::kAny;
  bool unconstrained = false;  // time range was NOT_SURE
};

// Day 0 is a Monday.
constexpr bool is_weekend(int day) noexcept { return day % 7 >= 5; }

SlotWindow slot_window_for(const ExecutionIndicators& indicators);

// Inclusive per-horizon instance bounds implied by a frequency band.
struct FrequencyBand {
  int min_count;
  int max_count;
};

FrequencyBand frequency_band(Frequency frequency, int days);

// Draws a rate uniformly from the band and scales it to the horizon.
int instance_count_for(Frequency frequency, int days, Rng& rng);

class ScheduleTimeline {
 public:
  ScheduleTimeline(int days, std::uint64_t seed);

  int days() const noexcept { return days_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t slot_count() const noexcept { return slots_.size(); }

  // Routine indices (into the scheduled routine list) in placement order.
  const std::vector<std::uint32_t>& slot(int day, int hour) const;
  const std::vector<std::vector<std::uint32_t>>& slots() const noexcept { return slots_; }

  void place(int day, int hour, std::uint32_t routine);
  bool holds(int day, int hour, std::uint32_t routine) const;
  std::size_t instance_count() const noexcept;

  friend bool operator==(const ScheduleTimeline&, const ScheduleTimeline&) = default;

 private:
  int days_;
  std::uint64_t seed_;
  std::vector<std::vector<std::uint32_t>> slots_;
};

// Places routine instances into an hourly timeline:
//   1. routines with a specific_time, at that hour;
//   2. routines with a concrete time range, inside their window;
//   3. NOT_SURE time ranges, into slots left empty by 1-2.
// Throws ScheduleError naming every routine whose demand does not fit.
ScheduleTimeline schedule(std::span<const Routine> routines, int days, std::uint64_t seed);

// Walks slots chronologically, emitting triggers then actions per instance.
Sequence extract_sequence(const ScheduleTimeline& timeline, std::span<const Routine> routines,
                          std::string origin = {});

// `day,hour,routine_id` rows, one per occupied slot; several routines in one
// slot are joined with ';' in placement order.
void write_timeline_csv(std::ostream& out, const ScheduleTimeline& timeline,
                        std::span<const Routine> routines);

}  // namespace helion
