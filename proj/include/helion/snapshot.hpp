#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "helion/entropy.hpp"
#include "helion/event_model.hpp"
#include "helion/generator.hpp"

namespace helion {

// A device attribute, or a home-level attribute when `device` is absent.
struct StateRef {
  std::optional<std::string> device;
  std::string attribute;

  std::string text() const;  // `device.attribute` or `@attribute`
  friend bool operator==(const StateRef&, const StateRef&) = default;
};

// Holistic home state. Entries never assigned are UNKNOWN (absent).
struct HomeState {
  std::map<std::pair<std::string, std::string>, std::string> device_state;
  std::map<std::string, std::string> home_state;

  std::optional<std::string> value(const StateRef& ref) const;
  friend bool operator==(const HomeState&, const HomeState&) = default;
};

// Overwrites the attribute the event names; conjunctions apply every part.
HomeState apply_event(HomeState state, const EventToken& e);

enum class Comparator { kEq, kNe, kIn, kNotIn };

// UNKNOWN values fail every comparator, `!=` included.
struct Predicate {
  StateRef target;
  Comparator cmp = Comparator::kEq;
  std::vector<std::string> values;

  bool holds(const HomeState& state) const;
};

// `device|attribute|ACTION` where any segment may be `*`. An empty device
// segment matches home-level events only. A conjunction matches when any of
// its parts does.
struct EventPattern {
  std::string device;
  std::string attribute;
  std::string action;

  static EventPattern parse(std::string_view text);
  bool matches(const EventToken& e) const;
  std::string text() const;
};

enum class PolicyKind { kStateForbidden, kObligation };

inline constexpr int kDefaultObligationWindow = 3;

struct Policy {
  std::string id;
  PolicyKind kind = PolicyKind::kStateForbidden;
  bool any_event = false;             // trigger pattern `any`
  std::vector<EventPattern> triggers;  // alternatives
  std::vector<Predicate> condition;    // conjunction, evaluated post-event
  std::optional<EventPattern> obligation_event;
  std::optional<int> obligation_window;
  std::string description;

  bool triggered_by(const EventToken& e) const;
};

// Throws InputError describing the first problem found.
void validate_policy(const Policy& policy);

// Block records:
//   policy <id>
//   kind state_forbidden|obligation
//   trigger any | <pattern>          (repeatable)
//   when <target> <op> <values>      (repeatable; target `dev.attr` or `@attr`,
//                                     op ==, !=, in, not_in; values comma-separated)
//   obligation <pattern>             (obligation only)
//   window <events>                  (obligation only, default 3)
//   description <text>
//   end
std::vector<Policy> parse_policies(std::istream& in);
std::vector<Policy> load_policy_file(const std::string& path);

struct Violation {
  std::string policy_id;
  std::size_t event_index = 0;
  HomeState snapshot;
  std::string explanation;
  std::string event;                                           // serialized event at event_index
  std::vector<std::pair<std::string, std::string>> evidence;  // state entries the policy reads
};

// Replays the scenario (history then generated events) from `initial`.
// State-forbidden policies fire on a matching event whose post-event state
// satisfies the condition. Obligation policies open a window of
// `obligation_window` events on a match; if no event matches the obligation
// pattern inside it, the violation lands on the window's last event, or on
// the final event when the scenario ends first.
std::vector<Violation> check(const Scenario& scenario, std::span<const Policy> policies,
                             const HomeState& initial = {});

// Every scenario against one read-only policy pack.
std::vector<std::vector<Violation>> check_all(std::span<const Scenario> scenarios,
                                              std::span<const Policy> policies,
                                              const HomeState& initial = {},
                                              Execution exec = Execution::kParallel);

struct ReportDocument {
  std::string text;     // human-readable
  std::string records;  // one JSON object per line
  int exit_status = 0;  // 0 clean, 1 violations
};

ReportDocument render_report(std::span<const Violation> violations, const Scenario& scenario,
                             std::size_t scenario_index = 0);

}  // namespace helion
