#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace helion {

// A device or home state change, <device, attribute, action>.
//
// Wire form: `device|attribute|ACTION`, with an empty device segment for
// home-level events (`|locationMode|AWAY`). Simultaneous events form a
// conjunction whose parts are joined with `&`, sorted by device with
// device-less parts last.
class EventToken {
 public:
  static EventToken atomic(std::optional<std::string> device, std::string attribute,
                           std::string action);
  static EventToken conjunction(std::vector<EventToken> parts);

  bool is_conjunction() const noexcept { return !parts_.empty(); }
  bool is_home_level() const noexcept { return !device_.has_value(); }

  // Empty/unset for conjunctions.
  const std::optional<std::string>& device() const noexcept { return device_; }
  const std::string& attribute() const noexcept { return attribute_; }
  const std::string& action() const noexcept { return action_; }
  const std::vector<EventToken>& parts() const noexcept { return parts_; }

  // Canonical serialized form.
  const std::string& text() const noexcept { return text_; }

  friend bool operator==(const EventToken& a, const EventToken& b) noexcept {
    return a.text_ == b.text_;
  }
  friend auto operator<=>(const EventToken& a, const EventToken& b) noexcept {
    return a.text_ <=> b.text_;
  }

 private:
  EventToken() = default;

  std::optional<std::string> device_;
  std::string attribute_;
  std::string action_;
  std::vector<EventToken> parts_;
  std::string text_;
};

EventToken parse_token(std::string_view text);
const std::string& serialize_token(const EventToken& token) noexcept;

// Identifier grammar enforced by the wire format.
bool is_device_id(std::string_view s) noexcept;
bool is_attribute_id(std::string_view s) noexcept;
bool is_action_id(std::string_view s) noexcept;

enum class TimeRange { kEarlyMorning, kMorning, kNoon, kAfternoon, kEvening, kNight, kLateNight, kAnytime, kNotSure };
enum class DayRange { kWeekdays, kWeekends, kAnytime, kNotSure };
enum class Frequency { kManyPerDay, kFewPerDay, kFewPerWeek, kFewPerMonth, kNotSure };

std::string_view to_string(TimeRange v) noexcept;
std::string_view to_string(DayRange v) noexcept;
std::string_view to_string(Frequency v) noexcept;

// Accept the enumerant names case-insensitively (`EARLY_MORNING`, `early morning`).
std::optional<TimeRange> parse_time_range(std::string_view s);
std::optional<DayRange> parse_day_range(std::string_view s);
std::optional<Frequency> parse_frequency(std::string_view s);

struct ExecutionIndicators {
  TimeRange time_range = TimeRange::kNotSure;
  DayRange day_range = DayRange::kNotSure;
  Frequency frequency = Frequency::kNotSure;

  friend bool operator==(const ExecutionIndicators&, const ExecutionIndicators&) = default;
};

struct Routine {
  std::string id;
  std::vector<EventToken> triggers;
  std::vector<EventToken> actions;
  ExecutionIndicators indicators;
  std::optional<int> specific_time;

  friend bool operator==(const Routine&, const Routine&) = default;
};

// Checks the Routine invariants; throws InputError.
void validate_routine(const Routine& routine);

class Sequence {
 public:
  // Throws InputError on an empty token list.
  explicit Sequence(std::vector<EventToken> tokens, std::string origin = {});

  const std::vector<EventToken>& tokens() const noexcept { return tokens_; }
  const std::string& origin() const noexcept { return origin_; }
  std::size_t size() const noexcept { return tokens_.size(); }

 private:
  std::vector<EventToken> tokens_;
  std::string origin_;
};

using TokenId = std::uint32_t;

// Sorted set of serialized tokens plus the reserved `<unk>` entry. Indices
// follow lexicographic order of the serialized form.
class Vocabulary {
 public:
  static constexpr std::string_view kUnk = "<unk>";

  static Vocabulary build(std::span<const Sequence> corpus);
  // Entries must be sorted, unique and include kUnk.
  static Vocabulary from_sorted(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::optional<TokenId> find(std::string_view token) const noexcept;
  // Unknown tokens map to unk_id().
  TokenId id(std::string_view token) const noexcept;
  TokenId unk_id() const noexcept { return unk_; }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) noexcept {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  TokenId unk_ = 0;
};

// Corpus wire format: one sequence per line, tokens separated by single
// spaces, `#` lines are comments, blank lines are skipped.
std::vector<Sequence> read_corpus(std::istream& in, std::string_view origin = {});
std::vector<Sequence> read_corpus_file(const std::string& path);
void write_sequence(std::ostream& out, const Sequence& seq);

// Splits each sequence into consecutive chunks of `length` tokens; a shorter
// trailing chunk is kept.
std::vector<Sequence> segment(std::span<const Sequence> corpus, std::size_t length);

}  // namespace helion
