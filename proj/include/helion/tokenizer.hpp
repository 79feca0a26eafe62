#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "helion/event_model.hpp"

namespace helion {

// An event as written in a routine file, before normalization.
struct RawEvent {
  std::optional<std::string> device;  // absent or empty: home-level
  std::string attribute;
  std::string value;
};

// Declared devices and home-level attributes with their admissible values.
// An empty value set admits any value. An empty catalog disables validation.
struct DeviceCatalog {
  std::map<std::string, std::map<std::string, std::set<std::string>>> devices;
  std::map<std::string, std::set<std::string>> home;

  bool empty() const noexcept { return devices.empty() && home.empty(); }
};

// Normalized phrase -> canonical phrase, per field.
struct SynonymTable {
  std::map<std::string, std::string> devices;
  std::map<std::string, std::string> attributes;
  std::map<std::string, std::string> values;
};

// Continuous attribute -> ordered thresholds -> range labels. A value v gets
// labels[i] where i counts the thresholds <= v.
struct RangeAbstraction {
  std::vector<double> thresholds;
  std::vector<std::string> labels;
  std::optional<double> min;
  std::optional<double> max;

  std::string label_for(double value) const;  // throws InputError out of [min, max]
};

struct AbstractionMap {
  std::map<std::string, RangeAbstraction> attributes;

  const RangeAbstraction* find(const std::string& attribute) const;
};

struct TokenizerContext {
  DeviceCatalog catalog;
  SynonymTable synonyms;
  AbstractionMap abstraction;
};

// A routine as read from file. Each step becomes one token; a step with
// several events becomes a conjunction.
struct RawRoutine {
  std::string id;
  std::vector<std::vector<RawEvent>> trigger_steps;
  std::vector<std::vector<RawEvent>> action_steps;
  ExecutionIndicators indicators;
  std::optional<int> specific_time;
};

// Lowercase, trimmed, runs of spaces/hyphens collapsed to '_'.
std::string normalize_phrase(std::string_view s);

EventToken tokenize_event(const RawEvent& raw, const TokenizerContext& ctx);
EventToken tokenize_step(const std::vector<RawEvent>& step, const TokenizerContext& ctx);
Routine tokenize_routine(const RawRoutine& raw, const TokenizerContext& ctx);

}  // namespace helion
