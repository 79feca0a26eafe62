#include "helion/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "helion/error.hpp"

namespace helion {
namespace {

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Case- and separator-insensitive key used to match attribute spellings.
std::string loose_key(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '_' || c == ' ' || c == '-') continue;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string apply_synonym(const std::map<std::string, std::string>& table, std::string phrase) {
  const auto it = table.find(phrase);
  return it == table.end() ? phrase : normalize_phrase(it->second);
}

std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string describe(const RawEvent& raw) {
  return raw.device.value_or("") + "." + raw.attribute + "=" + raw.value;
}

// Resolves the attribute against the declared spellings, if any.
std::string resolve_attribute(const std::string& attribute,
                              const std::map<std::string, std::set<std::string>>* declared,
                              const RawEvent& raw) {
  if (declared == nullptr) {
    if (is_attribute_id(attribute)) return attribute;
    const std::string norm = normalize_phrase(attribute);
    if (!is_attribute_id(norm)) throw InputError("invalid attribute in " + describe(raw));
    return norm;
  }
  const std::string key = loose_key(attribute);
  for (const auto& [name, values] : *declared) {
    if (loose_key(name) == key) return name;
  }
  throw InputError("unknown attribute '" + attribute + "' in " + describe(raw));
}

}  // namespace

std::string normalize_phrase(std::string_view s) {
  std::string out;
  bool pending_sep = false;
  for (char c : s) {
    if (c == ' ' || c == '-' || c == '_' || c == '\t') {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) out += '_';
    pending_sep = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string RangeAbstraction::label_for(double value) const {
  if ((min && value < *min) || (max && value > *max)) {
    throw InputError("value " + std::to_string(value) + " lies outside every declared range");
  }
  const auto idx = static_cast<std::size_t>(
      std::upper_bound(thresholds.begin(), thresholds.end(), value) - thresholds.begin());
  return labels.at(idx);
}

const RangeAbstraction* AbstractionMap::find(const std::string& attribute) const {
  const auto it = attributes.find(attribute);
  if (it != attributes.end()) return &it->second;
  const std::string key = loose_key(attribute);
  for (const auto& [name, range] : attributes) {
    if (loose_key(name) == key) return &range;
  }
  return nullptr;
}

EventToken tokenize_event(const RawEvent& raw, const TokenizerContext& ctx) {
  std::optional<std::string> device;
  if (raw.device) {
    std::string d = apply_synonym(ctx.synonyms.devices, normalize_phrase(*raw.device));
    if (!d.empty()) device = std::move(d);
  }

  std::string attribute = raw.attribute;
  if (const auto it = ctx.synonyms.attributes.find(normalize_phrase(attribute));
      it != ctx.synonyms.attributes.end()) {
    attribute = it->second;
  }

  const std::map<std::string, std::set<std::string>>* declared = nullptr;
  if (!ctx.catalog.empty()) {
    if (device) {
      const auto dev = ctx.catalog.devices.find(*device);
      if (dev == ctx.catalog.devices.end()) {
        throw InputError("unknown device '" + *device + "' in " + describe(raw));
      }
      declared = &dev->second;
    } else {
      declared = &ctx.catalog.home;
    }
  }
  attribute = resolve_attribute(attribute, declared, raw);

  std::string action;
  if (const RangeAbstraction* range = ctx.abstraction.find(attribute)) {
    if (const auto number = parse_number(raw.value)) {
      try {
        action = range->label_for(*number);
      } catch (const InputError& e) {
        throw InputError(std::string(e.what()) + " for " + describe(raw));
      }
    } else {
      action = upper(normalize_phrase(raw.value));
      if (std::find(range->labels.begin(), range->labels.end(), action) == range->labels.end()) {
        throw InputError("continuous attribute needs a number or range label in " + describe(raw));
      }
    }
  } else {
    action = upper(apply_synonym(ctx.synonyms.values, normalize_phrase(raw.value)));
    if (declared != nullptr) {
      const auto& values = declared->at(attribute);
      if (!values.empty() && values.count(action) == 0) {
        throw InputError("value '" + raw.value + "' not declared for " + describe(raw));
      }
    }
  }
  if (!is_action_id(action)) throw InputError("invalid value in " + describe(raw));
  return EventToken::atomic(std::move(device), std::move(attribute), std::move(action));
}

EventToken tokenize_step(const std::vector<RawEvent>& step, const TokenizerContext& ctx) {
  if (step.empty()) throw InputError("empty trigger/action step");
  if (step.size() == 1) return tokenize_event(step.front(), ctx);
  std::vector<EventToken> parts;
  parts.reserve(step.size());
  for (const auto& raw : step) parts.push_back(tokenize_event(raw, ctx));
  return EventToken::conjunction(std::move(parts));
}

Routine tokenize_routine(const RawRoutine& raw, const TokenizerContext& ctx) {
  Routine r;
  r.id = raw.id;
  r.indicators = raw.indicators;
  r.specific_time = raw.specific_time;
  for (const auto& step : raw.trigger_steps) r.triggers.push_back(tokenize_step(step, ctx));
  for (const auto& step : raw.action_steps) r.actions.push_back(tokenize_step(step, ctx));
  validate_routine(r);
  return r;
}

}  // namespace helion
