#include "helion/event_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "helion/error.hpp"

namespace helion {
namespace {

bool is_lower_or_digit(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_upper_or_digit(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::string atomic_text(const std::optional<std::string>& device, const std::string& attribute,
                        const std::string& action) {
  std::string out = device.value_or("");
  out += '|';
  out += attribute;
  out += '|';
  out += action;
  return out;
}

// Device-less parts sort last.
bool part_less(const EventToken& a, const EventToken& b) {
  if (a.device().has_value() != b.device().has_value()) return a.device().has_value();
  if (a.device() != b.device()) return *a.device() < *b.device();
  return a.text() < b.text();
}

std::string fold_enum(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '-') {
      out += '_';
    } else {
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

template <class Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view s, const std::array<std::string_view, N>& names) {
  const std::string folded = fold_enum(s);
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == folded) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

constexpr std::array<std::string_view, 9> kTimeRanges = {
    "EARLY_MORNING", "MORNING", "NOON", "AFTERNOON", "EVENING",
    "NIGHT",         "LATE_NIGHT", "ANYTIME", "NOT_SURE"};
constexpr std::array<std::string_view, 4> kDayRanges = {"WEEKDAYS", "WEEKENDS", "ANYTIME",
                                                        "NOT_SURE"};
constexpr std::array<std::string_view, 5> kFrequencies = {
    "MANY_PER_DAY", "FEW_PER_DAY", "FEW_PER_WEEK", "FEW_PER_MONTH", "NOT_SURE"};

EventToken parse_atomic(std::string_view text) {
  std::array<std::string_view, 3> seg;
  std::size_t count = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '|') {
      if (count == 3) {
        throw ParseError("token '" + std::string(text) + "': unexpected extra segment '" +
                         std::string(text.substr(start)) + "'");
      }
      seg[count++] = text.substr(start, i - start);
      start = i + 1;
    }
  }
  if (count == 1) {
    throw ParseError("token '" + std::string(text) + "': missing attribute segment");
  }
  if (count == 2) {
    throw ParseError("token '" + std::string(text) + "': missing action segment");
  }
  if (!seg[0].empty() && !is_device_id(seg[0])) {
    throw ParseError("token '" + std::string(text) + "': bad device segment '" +
                     std::string(seg[0]) + "'");
  }
  if (!is_attribute_id(seg[1])) {
    throw ParseError("token '" + std::string(text) + "': bad attribute segment '" +
                     std::string(seg[1]) + "'");
  }
  if (!is_action_id(seg[2])) {
    throw ParseError("token '" + std::string(text) + "': bad action segment '" +
                     std::string(seg[2]) + "'");
  }
  std::optional<std::string> device;
  if (!seg[0].empty()) device = std::string(seg[0]);
  return EventToken::atomic(std::move(device), std::string(seg[1]), std::string(seg[2]));
}

}  // namespace

bool is_device_id(std::string_view s) noexcept {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_lower_or_digit);
}

bool is_attribute_id(std::string_view s) noexcept {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool is_action_id(std::string_view s) noexcept {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_upper_or_digit);
}

EventToken EventToken::atomic(std::optional<std::string> device, std::string attribute,
                              std::string action) {
  if (device && device->empty()) device.reset();
  if (device && !is_device_id(*device)) throw InputError("invalid device identifier '" + *device + "'");
  if (!is_attribute_id(attribute)) throw InputError("invalid attribute identifier '" + attribute + "'");
  if (!is_action_id(action)) throw InputError("invalid action identifier '" + action + "'");
  EventToken t;
  t.text_ = atomic_text(device, attribute, action);
  t.device_ = std::move(device);
  t.attribute_ = std::move(attribute);
  t.action_ = std::move(action);
  return t;
}

EventToken EventToken::conjunction(std::vector<EventToken> parts) {
  if (parts.size() < 2) throw InputError("conjunction needs at least two events");
  for (const auto& p : parts) {
    if (p.is_conjunction()) throw InputError("conjunction parts must be atomic: " + p.text());
  }
  std::sort(parts.begin(), parts.end(), part_less);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i] == parts[i - 1]) throw InputError("duplicate conjunction part " + parts[i].text());
  }
  EventToken t;
  for (const auto& p : parts) {
    if (!t.text_.empty()) t.text_ += '&';
    t.text_ += p.text();
  }
  t.parts_ = std::move(parts);
  return t;
}

EventToken parse_token(std::string_view text) {
  if (text.empty()) throw ParseError("empty token");
  if (text.find('&') == std::string_view::npos) return parse_atomic(text);
  std::vector<EventToken> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t amp = text.find('&', start);
    const std::string_view piece = text.substr(start, amp - start);
    if (piece.empty()) {
      throw ParseError("token '" + std::string(text) + "': empty conjunction part");
    }
    parts.push_back(parse_atomic(piece));
    if (amp == std::string_view::npos) break;
    start = amp + 1;
  }
  try {
    return EventToken::conjunction(std::move(parts));
  } catch (const InputError& e) {
    throw ParseError("token '" + std::string(text) + "': " + e.what());
  }
}

const std::string& serialize_token(const EventToken& token) noexcept { return token.text(); }

std::string_view to_string(TimeRange v) noexcept { return kTimeRanges[static_cast<std::size_t>(v)]; }
std::string_view to_string(DayRange v) noexcept { return kDayRanges[static_cast<std::size_t>(v)]; }
std::string_view to_string(Frequency v) noexcept { return kFrequencies[static_cast<std::size_t>(v)]; }

std::optional<TimeRange> parse_time_range(std::string_view s) { return lookup<TimeRange>(s, kTimeRanges); }
std::optional<DayRange> parse_day_range(std::string_view s) { return lookup<DayRange>(s, kDayRanges); }
std::optional<Frequency> parse_frequency(std::string_view s) { return lookup<Frequency>(s, kFrequencies); }

void validate_routine(const Routine& routine) {
  if (routine.id.empty()) throw InputError("routine id is empty");
  if (routine.triggers.empty()) throw InputError("routine " + routine.id + ": no triggers");
  if (routine.actions.empty()) throw InputError("routine " + routine.id + ": no actions");
  if (routine.specific_time && (*routine.specific_time < 0 || *routine.specific_time > 23)) {
    throw InputError("routine " + routine.id + ": specific_time outside 0-23");
  }
  for (const auto& t : routine.triggers) {
    for (const auto& a : routine.actions) {
      if (t == a) {
        throw InputError("routine " + routine.id + ": " + t.text() + " is both trigger and action");
      }
    }
  }
}

Sequence::Sequence(std::vector<EventToken> tokens, std::string origin)
    : tokens_(std::move(tokens)), origin_(std::move(origin)) {
  if (tokens_.empty()) throw InputError("empty sequence" + (origin_.empty() ? "" : " (" + origin_ + ")"));
}

Vocabulary Vocabulary::build(std::span<const Sequence> corpus) {
  if (corpus.empty()) throw InputError("cannot build a vocabulary from an empty corpus");
  std::set<std::string, std::less<>> distinct;
  for (const auto& seq : corpus) {
    for (const auto& t : seq.tokens()) distinct.insert(t.text());
  }
  distinct.emplace(kUnk);
  return from_sorted({distinct.begin(), distinct.end()});
}

Vocabulary Vocabulary::from_sorted(std::vector<std::string> tokens) {
  if (!std::is_sorted(tokens.begin(), tokens.end()) ||
      std::adjacent_find(tokens.begin(), tokens.end()) != tokens.end()) {
    throw InputError("vocabulary entries must be sorted and unique");
  }
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  const auto unk = v.find(kUnk);
  if (!unk) throw InputError("vocabulary lacks the <unk> entry");
  v.unk_ = *unk;
  return v;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const noexcept {
  const auto it = std::lower_bound(tokens_.begin(), tokens_.end(), token,
                                   [](const std::string& a, std::string_view b) { return a < b; });
  if (it == tokens_.end() || *it != token) return std::nullopt;
  return static_cast<TokenId>(it - tokens_.begin());
}

TokenId Vocabulary::id(std::string_view token) const noexcept { return find(token).value_or(unk_); }

std::vector<Sequence> read_corpus(std::istream& in, std::string_view origin) {
  std::vector<Sequence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<EventToken> tokens;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t sp = line.find(' ', start);
      if (sp == std::string::npos) sp = line.size();
      const std::string_view piece(line.data() + start, sp - start);
      if (piece.empty()) {
        throw ParseError("corpus line " + std::to_string(lineno) + ": tokens must be separated by single spaces");
      }
      try {
        tokens.push_back(parse_token(piece));
      } catch (const ParseError& e) {
        throw ParseError("corpus line " + std::to_string(lineno) + ": " + e.what());
      }
      start = sp + 1;
    }
    std::string where = std::string(origin) + ":" + std::to_string(lineno);
    out.emplace_back(std::move(tokens), std::move(where));
  }
  return out;
}

std::vector<Sequence> read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open corpus file " + path);
  return read_corpus(in, path);
}

void write_sequence(std::ostream& out, const Sequence& seq) {
  bool first = true;
  for (const auto& t : seq.tokens()) {
    if (!first) out << ' ';
    out << t.text();
    first = false;
  }
  out << '\n';
}

std::vector<Sequence> segment(std::span<const Sequence> corpus, std::size_t length) {
  if (length == 0) throw InputError("sentence length must be positive");
  std::vector<Sequence> out;
  for (const auto& seq : corpus) {
    const auto& tokens = seq.tokens();
    for (std::size_t i = 0, part = 0; i < tokens.size(); i += length, ++part) {
      const std::size_t end = std::min(tokens.size(), i + length);
      out.emplace_back(std::vector<EventToken>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                               tokens.begin() + static_cast<std::ptrdiff_t>(end)),
                       seq.origin() + "#" + std::to_string(part));
    }
  }
  return out;
}

}  // namespace helion
