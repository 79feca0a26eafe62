#include "helion/scheduler.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "helion/error.hpp"

namespace helion {
namespace {

std::vector<int> hour_range(int first, int last) {
  std::vector<int> out;
  for (int h = first; h <= last; ++h) out.push_back(h);
  return out;
}

// round(rate * days / period), at least one instance.
int scale(int rate, int days, int period) {
  if (period == 1) return rate * days;
  return std::max(1, (2 * rate * days + period) / (2 * period));
}

struct Band {
  int lo;
  int hi;
  int period;  // days per band unit
};

Band band_of(Frequency f) {
  switch (f) {
    case Frequency::kManyPerDay: return {4, 8, 1};
    case Frequency::kFewPerDay: return {1, 3, 1};
    case Frequency::kFewPerWeek: return {1, 4, 7};
    case Frequency::kFewPerMonth:
    case Frequency::kNotSure: return {1, 4, 30};
  }
  return {1, 4, 30};
}

void require_days(int days) {
  if (days < 1) throw InputError("horizon must cover at least one day");
}

class Placer {
 public:
  Placer(ScheduleTimeline& timeline, Rng& rng) : timeline_(timeline), rng_(rng) {}

  // Places `count` instances of `routine` into distinct candidate slots,
  // honoring the 80/20 favored-day split. Returns false if they do not fit.
  bool place(std::uint32_t routine, int count, const std::vector<std::size_t>& candidates,
             DayRange day_range) {
    std::vector<std::size_t> favored, other;
    const bool skewed = day_range == DayRange::kWeekdays || day_range == DayRange::kWeekends;
    if (!skewed) {
      if (static_cast<std::size_t>(count) > candidates.size()) return false;
      commit(routine, candidates, static_cast<std::size_t>(count));
      return true;
    }
    const bool want_weekend = day_range == DayRange::kWeekends;
    for (std::size_t s : candidates) {
      const bool weekend = is_weekend(static_cast<int>(s / 24));
      (weekend == want_weekend ? favored : other).push_back(s);
    }
    // ceil(0.8 * count)
    std::size_t n_fav = static_cast<std::size_t>((4 * count + 4) / 5);
    // horizons too short to contain a non-favored day take every instance
    bool horizon_has_other = false;
    for (int d = 0; d < timeline_.days() && !horizon_has_other; ++d) {
      horizon_has_other = is_weekend(d) != want_weekend;
    }
    if (!horizon_has_other) n_fav = static_cast<std::size_t>(count);
    const std::size_t n_other = static_cast<std::size_t>(count) - n_fav;
    if (n_fav > favored.size() || n_other > other.size()) return false;
    commit(routine, favored, n_fav);
    commit(routine, other, n_other);
    return true;
  }

 private:
  void commit(std::uint32_t routine, const std::vector<std::size_t>& pool, std::size_t k) {
    for (std::size_t i : rng_.sample(pool.size(), k)) {
      const std::size_t s = pool[i];
      timeline_.place(static_cast<int>(s / 24), static_cast<int>(s % 24), routine);
    }
  }

  ScheduleTimeline& timeline_;
  Rng& rng_;
};

}  // namespace

SlotWindow slot_window_for(const ExecutionIndicators& indicators) {
  SlotWindow w;
  switch (indicators.time_range) {
    case TimeRange::kEarlyMorning: w.hours = hour_range(5, 7); break;
    case TimeRange::kMorning: w.hours = hour_range(8, 11); break;
    case TimeRange::kNoon: w.hours = hour_range(12, 13); break;
    case TimeRange::kAfternoon: w.hours = hour_range(14, 16); break;
    case TimeRange::kEvening: w.hours = hour_range(17, 20); break;
    case TimeRange::kNight: w.hours = hour_range(21, 23); break;
    case TimeRange::kLateNight: w.hours = hour_range(0, 4); break;
    case TimeRange::kAnytime: w.hours = hour_range(0, 23); break;
    case TimeRange::kNotSure:
      w.hours = hour_range(0, 23);
      w.unconstrained = true;
      break;
  }
  switch (indicators.day_range) {
    case DayRange::kWeekdays: w.day_filter = DayFilter::kWeekdays; break;
    case DayRange::kWeekends: w.day_filter = DayFilter::kWeekends; break;
    default: w.day_filter = DayFilter::kAny; break;
  }
  return w;
}

FrequencyBand frequency_band(Frequency frequency, int days) {
  require_days(days);
  const Band b = band_of(frequency);
  return {scale(b.lo, days, b.period), scale(b.hi, days, b.period)};
}

int instance_count_for(Frequency frequency, int days, Rng& rng) {
  require_days(days);
  const Band b = band_of(frequency);
  const int rate = static_cast<int>(rng.between(b.lo, b.hi));
  return scale(rate, days, b.period);
}

ScheduleTimeline::ScheduleTimeline(int days, std::uint64_t seed) : days_(days), seed_(seed) {
  require_days(days);
  slots_.resize(static_cast<std::size_t>(days) * 24);
}

const std::vector<std::uint32_t>& ScheduleTimeline::slot(int day, int hour) const {
  return slots_.at(static_cast<std::size_t>(day) * 24 + static_cast<std::size_t>(hour));
}

void ScheduleTimeline::place(int day, int hour, std::uint32_t routine) {
  if (day < 0 || day >= days_ || hour < 0 || hour > 23) throw InputError("slot outside the timeline");
  slots_[static_cast<std::size_t>(day) * 24 + static_cast<std::size_t>(hour)].push_back(routine);
}

bool ScheduleTimeline::holds(int day, int hour, std::uint32_t routine) const {
  const auto& s = slot(day, hour);
  return std::find(s.begin(), s.end(), routine) != s.end();
}

std::size_t ScheduleTimeline::instance_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : slots_) n += s.size();
  return n;
}

ScheduleTimeline schedule(std::span<const Routine> routines, int days, std::uint64_t seed) {
  if (routines.empty()) throw InputError("nothing to schedule: routine list is empty");
  require_days(days);
  std::set<std::string> ids;
  for (const auto& r : routines) {
    validate_routine(r);
    if (!ids.insert(r.id).second) throw InputError("duplicate routine id '" + r.id + "'");
  }

  ScheduleTimeline timeline(days, seed);
  Rng rng(derive_seed(seed, "schedule"));
  Placer placer(timeline, rng);
  std::vector<std::string> over;

  // Pass 1: fixed clock times, on every admissible day.
  for (std::uint32_t i = 0; i < routines.size(); ++i) {
    const Routine& r = routines[i];
    if (!r.specific_time) continue;
    const SlotWindow w = slot_window_for(r.indicators);
    std::vector<int> admissible;
    for (int d = 0; d < days; ++d) {
      if (w.day_filter == DayFilter::kWeekdays && is_weekend(d)) continue;
      if (w.day_filter == DayFilter::kWeekends && !is_weekend(d)) continue;
      admissible.push_back(d);
    }
    const Frequency f = r.indicators.frequency;
    std::vector<int> chosen;
    if (f == Frequency::kFewPerWeek || f == Frequency::kFewPerMonth) {
      const auto count = static_cast<std::size_t>(instance_count_for(f, days, rng));
      if (count > admissible.size()) {
        over.push_back(r.id);
        continue;
      }
      for (std::size_t k : rng.sample(admissible.size(), count)) chosen.push_back(admissible[k]);
    } else {
      chosen = admissible;
    }
    if (chosen.empty()) {
      over.push_back(r.id);
      continue;
    }
    for (int d : chosen) timeline.place(d, *r.specific_time, i);
  }

  // Pass 2: time-range windows.
  for (std::uint32_t i = 0; i < routines.size(); ++i) {
    const Routine& r = routines[i];
    if (r.specific_time) continue;
    const SlotWindow w = slot_window_for(r.indicators);
    if (w.unconstrained) continue;
    const int count = instance_count_for(r.indicators.frequency, days, rng);
    std::vector<std::size_t> candidates;
    for (int d = 0; d < days; ++d) {
      for (int h : w.hours) candidates.push_back(static_cast<std::size_t>(d) * 24 + static_cast<std::size_t>(h));
    }
    if (!placer.place(i, count, candidates, r.indicators.day_range)) over.push_back(r.id);
  }

  // Pass 3: no time clue; prefer slots nothing else occupies.
  for (std::uint32_t i = 0; i < routines.size(); ++i) {
    const Routine& r = routines[i];
    if (r.specific_time || !slot_window_for(r.indicators).unconstrained) continue;
    const int count = instance_count_for(r.indicators.frequency, days, rng);
    std::vector<std::size_t> empty, all;
    for (std::size_t s = 0; s < timeline.slot_count(); ++s) {
      all.push_back(s);
      if (timeline.slots()[s].empty()) empty.push_back(s);
    }
    if (!placer.place(i, count, empty, r.indicators.day_range) &&
        !placer.place(i, count, all, r.indicators.day_range)) {
      over.push_back(r.id);
    }
  }

  if (!over.empty()) {
    std::string msg = "over-constrained routines (demand exceeds available slots):";
    for (const auto& id : over) msg += " " + id;
    throw ScheduleError(msg, std::move(over));
  }
  return timeline;
}

Sequence extract_sequence(const ScheduleTimeline& timeline, std::span<const Routine> routines,
                          std::string origin) {
  std::vector<EventToken> tokens;
  for (const auto& slot : timeline.slots()) {
    for (std::uint32_t idx : slot) {
      const Routine& r = routines[idx];
      tokens.insert(tokens.end(), r.triggers.begin(), r.triggers.end());
      tokens.insert(tokens.end(), r.actions.begin(), r.actions.end());
    }
  }
  return Sequence(std::move(tokens), std::move(origin));
}

void write_timeline_csv(std::ostream& out, const ScheduleTimeline& timeline,
                        std::span<const Routine> routines) {
  out << "day,hour,routine_id\n";
  for (int d = 0; d < timeline.days(); ++d) {
    for (int h = 0; h < 24; ++h) {
      const auto& s = timeline.slot(d, h);
      if (s.empty()) continue;
      out << d << ',' << h << ',';
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (k) out << ';';
        out << routines[s[k]].id;
      }
      out << '\n';
    }
  }
}

}  // namespace helion
