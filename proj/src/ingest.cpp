#include "helion/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "helion/error.hpp"

namespace helion {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

RawEvent raw_event(const json& j) {
  if (!j.is_object()) throw InputError("event must be an object");
  RawEvent e;
  if (j.contains("device") && !j.at("device").is_null()) {
    if (!j.at("device").is_string()) throw InputError("event 'device' must be a string");
    e.device = j.at("device").get<std::string>();
  }
  if (!j.contains("attribute") || !j.at("attribute").is_string()) {
    throw InputError("event needs a string 'attribute'");
  }
  e.attribute = j.at("attribute").get<std::string>();
  if (!j.contains("value")) throw InputError("event needs a 'value'");
  const json& v = j.at("value");
  if (v.is_string()) {
    e.value = v.get<std::string>();
  } else if (v.is_number()) {
    e.value = v.dump();
  } else if (v.is_boolean()) {
    e.value = v.get<bool>() ? "true" : "false";
  } else {
    throw InputError("event 'value' must be a string or number");
  }
  return e;
}

// A step is either a pre-serialized token or a group of raw events.
struct Step {
  std::optional<std::string> token;
  std::vector<RawEvent> events;
};

// Flat list of event objects: one simultaneous step. Otherwise every element
// (token string, event object or array of event objects) is its own step.
std::vector<Step> steps(const json& list, const char* field) {
  if (!list.is_array() || list.empty()) {
    throw InputError(std::string("'") + field + "' must be a non-empty array");
  }
  bool all_objects = true;
  for (const auto& el : list) all_objects = all_objects && el.is_object();
  std::vector<Step> out;
  if (all_objects) {
    Step s;
    for (const auto& el : list) s.events.push_back(raw_event(el));
    out.push_back(std::move(s));
    return out;
  }
  for (const auto& el : list) {
    Step s;
    if (el.is_string()) {
      s.token = el.get<std::string>();
    } else if (el.is_object()) {
      s.events.push_back(raw_event(el));
    } else if (el.is_array() && !el.empty()) {
      for (const auto& ev : el) s.events.push_back(raw_event(ev));
    } else {
      throw InputError(std::string("bad element in '") + field + "'");
    }
    out.push_back(std::move(s));
  }
  return out;
}

template <class Enum, class Parser>
Enum indicator(const json& ind, const char* key, Parser parse, bool& omitted) {
  if (!ind.contains(key) || ind.at(key).is_null()) {
    omitted = true;
    return Enum{};
  }
  if (!ind.at(key).is_string()) throw InputError(std::string("indicator '") + key + "' must be a string");
  const auto v = parse(ind.at(key).get<std::string>());
  if (!v) throw InputError(std::string("unknown ") + key + " '" + ind.at(key).get<std::string>() + "'");
  return *v;
}

struct ParsedRecord {
  std::string id;
  std::vector<Step> triggers;
  std::vector<Step> actions;
  ExecutionIndicators indicators;
  std::optional<int> specific_time;
  std::vector<std::string> omitted;
};

ParsedRecord parse_record(const json& j) {
  if (!j.is_object()) throw InputError("routine record must be an object");
  ParsedRecord r;
  if (!j.contains("id") || !(j.at("id").is_string() || j.at("id").is_number_integer())) {
    throw InputError("routine needs an 'id'");
  }
  r.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
  if (!j.contains("triggers")) throw InputError("routine needs 'triggers'");
  if (!j.contains("actions")) throw InputError("routine needs 'actions'");
  r.triggers = steps(j.at("triggers"), "triggers");
  r.actions = steps(j.at("actions"), "actions");

  static const json kEmpty = json::object();
  const json& ind = j.contains("indicators") ? j.at("indicators") : kEmpty;
  if (!ind.is_object()) throw InputError("'indicators' must be an object");
  bool omitted = false;
  r.indicators.time_range = TimeRange::kNotSure;
  r.indicators.day_range = DayRange::kNotSure;
  r.indicators.frequency = Frequency::kNotSure;
  if (auto v = indicator<TimeRange>(ind, "time_range", parse_time_range, omitted); !omitted) {
    r.indicators.time_range = v;
  } else {
    r.omitted.emplace_back("time_range");
  }
  omitted = false;
  if (auto v = indicator<DayRange>(ind, "day_range", parse_day_range, omitted); !omitted) {
    r.indicators.day_range = v;
  } else {
    r.omitted.emplace_back("day_range");
  }
  omitted = false;
  if (auto v = indicator<Frequency>(ind, "frequency", parse_frequency, omitted); !omitted) {
    r.indicators.frequency = v;
  } else {
    r.omitted.emplace_back("frequency");
  }

  if (j.contains("specific_time") && !j.at("specific_time").is_null()) {
    if (!j.at("specific_time").is_number_integer()) throw InputError("'specific_time' must be an integer");
    const int h = j.at("specific_time").get<int>();
    if (h < 0 || h > 23) throw InputError("'specific_time' must lie in 0-23");
    r.specific_time = h;
  }
  return r;
}

EventToken step_token(const Step& s, const TokenizerContext& ctx) {
  if (s.token) return parse_token(*s.token);
  return tokenize_step(s.events, ctx);
}

std::set<std::string> value_set(const json& j) {
  std::set<std::string> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw InputError("device catalog values must be arrays");
  for (const auto& v : j) {
    std::string s = normalize_phrase(v.get<std::string>());
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    out.insert(s);
  }
  return out;
}

}  // namespace

std::string_view to_string(Diagnostic::Severity s) noexcept {
  switch (s) {
    case Diagnostic::Severity::kInfo: return "info";
    case Diagnostic::Severity::kWarning: return "warning";
    case Diagnostic::Severity::kError: return "error";
  }
  return "info";
}

bool IngestResult::has_errors() const noexcept {
  for (const auto& d : diagnostics) {
    if (d.severity == Diagnostic::Severity::kError) return true;
  }
  return false;
}

std::size_t IngestResult::routine_count() const noexcept {
  std::size_t n = 0;
  for (const auto& u : users) n += u.routines.size();
  return n;
}

std::string truncated_percent(std::size_t count, std::size_t total) {
  if (total == 0) return "0.00";
  const std::size_t basis = count * 10000 / total;
  std::string frac = std::to_string(basis % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return std::to_string(basis / 100) + "." + frac;
}

IngestResult ingest_text(std::string_view json_text, const TokenizerContext& ctx) {
  const json doc = parse_json(json_text, "routine file");
  if (!doc.is_object()) throw InputError("routine file must hold a JSON object");

  // (user id, routine array) pairs
  std::vector<std::pair<std::string, const json*>> groups;
  if (doc.contains("users")) {
    if (!doc.at("users").is_array()) throw InputError("'users' must be an array");
    std::size_t i = 0;
    for (const auto& u : doc.at("users")) {
      ++i;
      if (!u.is_object() || !u.contains("routines")) {
        throw InputError("user entry " + std::to_string(i) + " needs 'routines'");
      }
      std::string id = u.contains("id") && u.at("id").is_string() ? u.at("id").get<std::string>()
                                                                   : "user" + std::to_string(i);
      groups.emplace_back(std::move(id), &u.at("routines"));
    }
  } else if (doc.contains("routines")) {
    groups.emplace_back("user1", &doc.at("routines"));
  } else {
    throw InputError("routine file needs 'users' or 'routines'");
  }

  IngestResult result;
  std::vector<std::string> schema_errors;
  std::size_t record = 0;
  std::size_t not_sure_time = 0, not_sure_day = 0, not_sure_freq = 0;

  for (const auto& [user, list] : groups) {
    if (!list->is_array()) throw InputError("'routines' of user " + user + " must be an array");
    UserRoutines ur{user, {}};
    std::set<std::string> seen;
    for (const auto& item : *list) {
      ++record;
      ParsedRecord parsed;
      try {
        parsed = parse_record(item);
      } catch (const Error& e) {
        schema_errors.push_back("record " + std::to_string(record) + ": " + e.what());
        continue;
      }
      if (parsed.indicators.time_range == TimeRange::kNotSure) ++not_sure_time;
      if (parsed.indicators.day_range == DayRange::kNotSure) ++not_sure_day;
      if (parsed.indicators.frequency == Frequency::kNotSure) ++not_sure_freq;
      for (const auto& field : parsed.omitted) {
        result.diagnostics.push_back({Diagnostic::Severity::kWarning, record,
                                      "routine " + parsed.id + ": " + field + " omitted, using NOT_SURE"});
      }
      if (!seen.insert(parsed.id).second) {
        result.diagnostics.push_back({Diagnostic::Severity::kError, record,
                                      "duplicate routine id '" + parsed.id + "' for user " + user});
        continue;
      }
      try {
        Routine r;
        r.id = parsed.id;
        r.indicators = parsed.indicators;
        r.specific_time = parsed.specific_time;
        for (const auto& s : parsed.triggers) r.triggers.push_back(step_token(s, ctx));
        for (const auto& s : parsed.actions) r.actions.push_back(step_token(s, ctx));
        validate_routine(r);
        ur.routines.push_back(std::move(r));
      } catch (const Error& e) {
        result.diagnostics.push_back({Diagnostic::Severity::kError, record,
                                      "routine " + parsed.id + ": " + e.what()});
      }
    }
    result.users.push_back(std::move(ur));
  }

  if (!schema_errors.empty()) {
    std::string msg = "routine file violates the schema:";
    for (const auto& e : schema_errors) msg += "\n  " + e;
    throw InputError(msg);
  }

  const auto tally = [&](const char* name, std::size_t n) {
    result.diagnostics.push_back({Diagnostic::Severity::kInfo, 0,
                                  std::string(name) + " not_sure: " + std::to_string(n) + " (" +
                                      truncated_percent(n, record) + "%)"});
  };
  tally("time_range", not_sure_time);
  tally("day_range", not_sure_day);
  tally("frequency", not_sure_freq);
  return result;
}

IngestResult ingest_file(const std::string& path, const TokenizerContext& ctx) {
  return ingest_text(read_file(path), ctx);
}

std::string write_routines_json(const std::vector<UserRoutines>& users) {
  json doc;
  doc["users"] = json::array();
  for (const auto& u : users) {
    json ju;
    ju["id"] = u.user;
    ju["routines"] = json::array();
    for (const auto& r : u.routines) {
      json jr;
      jr["id"] = r.id;
      jr["triggers"] = json::array();
      for (const auto& t : r.triggers) jr["triggers"].push_back(t.text());
      jr["actions"] = json::array();
      for (const auto& t : r.actions) jr["actions"].push_back(t.text());
      jr["indicators"] = {{"time_range", to_string(r.indicators.time_range)},
                          {"day_range", to_string(r.indicators.day_range)},
                          {"frequency", to_string(r.indicators.frequency)}};
      if (r.specific_time) jr["specific_time"] = *r.specific_time;
      ju["routines"].push_back(std::move(jr));
    }
    doc["users"].push_back(std::move(ju));
  }
  return doc.dump(2) + "\n";
}

DeviceCatalog load_device_catalog(const std::string& path) {
  const json doc = parse_json(read_file(path), path);
  DeviceCatalog cat;
  if (doc.contains("devices")) {
    for (const auto& [device, attrs] : doc.at("devices").items()) {
      auto& slot = cat.devices[normalize_phrase(device)];
      for (const auto& [attr, values] : attrs.items()) slot[attr] = value_set(values);
    }
  }
  if (doc.contains("home")) {
    for (const auto& [attr, values] : doc.at("home").items()) cat.home[attr] = value_set(values);
  }
  return cat;
}

SynonymTable load_synonym_table(const std::string& path) {
  const json doc = parse_json(read_file(path), path);
  SynonymTable table;
  const auto fill = [&](const char* key, std::map<std::string, std::string>& out) {
    if (!doc.contains(key)) return;
    for (const auto& [from, to] : doc.at(key).items()) {
      out[normalize_phrase(from)] = to.get<std::string>();
    }
  };
  fill("devices", table.devices);
  fill("attributes", table.attributes);
  fill("values", table.values);
  return table;
}

AbstractionMap load_abstraction_map(const std::string& path) {
  const json doc = parse_json(read_file(path), path);
  AbstractionMap map;
  for (const auto& [attr, spec] : doc.items()) {
    RangeAbstraction r;
    r.thresholds = spec.at("thresholds").get<std::vector<double>>();
    if (!std::is_sorted(r.thresholds.begin(), r.thresholds.end())) {
      throw InputError("thresholds for " + attr + " must ascend");
    }
    if (spec.contains("labels")) {
      r.labels = spec.at("labels").get<std::vector<std::string>>();
    } else if (r.thresholds.size() == 2) {
      r.labels = {"LOW", "MEDIUM", "HIGH"};
    }
    if (r.labels.size() != r.thresholds.size() + 1) {
      throw InputError("abstraction for " + attr + " needs one more label than thresholds");
    }
    if (spec.contains("min")) r.min = spec.at("min").get<double>();
    if (spec.contains("max")) r.max = spec.at("max").get<double>();
    map.attributes[attr] = std::move(r);
  }
  return map;
}

}  // namespace helion
