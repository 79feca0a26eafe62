#include "helion/snapshot.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "helion/error.hpp"

namespace helion {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool segment_matches(const std::string& pattern, std::string_view value) {
  return pattern == "*" || pattern == value;
}

bool atomic_matches(const EventPattern& p, const EventToken& e) {
  if (p.device != "*") {
    if (p.device.empty() != e.is_home_level()) return false;
    if (!p.device.empty() && p.device != *e.device()) return false;
  }
  return segment_matches(p.attribute, e.attribute()) && segment_matches(p.action, e.action());
}

StateRef parse_target(std::string_view text) {
  StateRef ref;
  if (!text.empty() && text.front() == '@') {
    ref.attribute = std::string(text.substr(1));
  } else {
    const auto dot = text.find('.');
    if (dot == std::string_view::npos || dot == 0) {
      throw ParseError("state reference '" + std::string(text) + "' must be device.attribute or @attribute");
    }
    ref.device = std::string(text.substr(0, dot));
    ref.attribute = std::string(text.substr(dot + 1));
  }
  if (ref.attribute.empty()) throw ParseError("state reference '" + std::string(text) + "' lacks an attribute");
  return ref;
}

Predicate parse_predicate(const std::string& rest) {
  std::istringstream in(rest);
  std::string target, op, values;
  in >> target >> op;
  std::getline(in, values);
  values = trim(values);
  if (target.empty() || op.empty() || values.empty()) {
    throw ParseError("condition '" + rest + "' must read <target> <op> <values>");
  }
  Predicate p;
  p.target = parse_target(target);
  if (op == "==") p.cmp = Comparator::kEq;
  else if (op == "!=") p.cmp = Comparator::kNe;
  else if (op == "in") p.cmp = Comparator::kIn;
  else if (op == "not_in") p.cmp = Comparator::kNotIn;
  else throw ParseError("unknown comparator '" + op + "'");
  std::size_t start = 0;
  while (start <= values.size()) {
    const auto comma = std::min(values.find(',', start), values.size());
    const std::string v = trim(std::string_view(values).substr(start, comma - start));
    if (v.empty()) throw ParseError("empty value in condition '" + rest + "'");
    p.values.push_back(v);
    start = comma + 1;
  }
  if ((p.cmp == Comparator::kEq || p.cmp == Comparator::kNe) && p.values.size() != 1) {
    throw ParseError("comparator " + op + " takes exactly one value");
  }
  return p;
}

void record_evidence(const Policy& policy, const HomeState& state, Violation& v) {
  for (const auto& pred : policy.condition) {
    v.evidence.emplace_back(pred.target.text(), state.value(pred.target).value_or("UNKNOWN"));
  }
}

struct Pending {
  const Policy* policy;
  std::size_t start;
  std::size_t deadline;
};

Violation obligation_violation(const Pending& p, std::size_t at, const std::vector<EventToken>& events,
                               const HomeState& state) {
  Violation v;
  v.policy_id = p.policy->id;
  v.event_index = at;
  v.snapshot = state;
  v.event = events[at].text();
  record_evidence(*p.policy, state, v);
  v.explanation = p.policy->id + ": " + p.policy->description + " (" + events[p.start].text() +
                  " at event " + std::to_string(p.start) + " was not followed by " +
                  p.policy->obligation_event->text() + " within " +
                  std::to_string(*p.policy->obligation_window) + " events)";
  return v;
}

}  // namespace

std::string StateRef::text() const { return device ? *device + "." + attribute : "@" + attribute; }

std::optional<std::string> HomeState::value(const StateRef& ref) const {
  if (ref.device) {
    const auto it = device_state.find({*ref.device, ref.attribute});
    if (it == device_state.end()) return std::nullopt;
    return it->second;
  }
  const auto it = home_state.find(ref.attribute);
  if (it == home_state.end()) return std::nullopt;
  return it->second;
}

HomeState apply_event(HomeState state, const EventToken& e) {
  if (e.is_conjunction()) {
    for (const auto& part : e.parts()) state = apply_event(std::move(state), part);
    return state;
  }
  if (e.is_home_level()) {
    state.home_state[e.attribute()] = e.action();
  } else {
    state.device_state[{*e.device(), e.attribute()}] = e.action();
  }
  return state;
}

bool Predicate::holds(const HomeState& state) const {
  const auto v = state.value(target);
  if (!v) return false;
  const bool member = std::find(values.begin(), values.end(), *v) != values.end();
  switch (cmp) {
    case Comparator::kEq:
    case Comparator::kIn: return member;
    case Comparator::kNe:
    case Comparator::kNotIn: return !member;
  }
  return false;
}

EventPattern EventPattern::parse(std::string_view text) {
  std::vector<std::string> seg;
  std::size_t start = 0;
  while (true) {
    const auto bar = text.find('|', start);
    seg.emplace_back(text.substr(start, bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  if (seg.size() != 3 || seg[1].empty() || seg[2].empty()) {
    throw ParseError("event pattern '" + std::string(text) + "' must read device|attribute|ACTION");
  }
  return {seg[0], seg[1], seg[2]};
}

bool EventPattern::matches(const EventToken& e) const {
  if (!e.is_conjunction()) return atomic_matches(*this, e);
  return std::any_of(e.parts().begin(), e.parts().end(),
                     [&](const EventToken& part) { return atomic_matches(*this, part); });
}

std::string EventPattern::text() const { return device + "|" + attribute + "|" + action; }

bool Policy::triggered_by(const EventToken& e) const {
  if (any_event) return true;
  return std::any_of(triggers.begin(), triggers.end(), [&](const EventPattern& p) { return p.matches(e); });
}

void validate_policy(const Policy& policy) {
  const std::string who = "policy " + (policy.id.empty() ? std::string("<unnamed>") : policy.id);
  if (policy.id.empty()) throw InputError("policy without an id");
  if (!policy.any_event && policy.triggers.empty()) throw InputError(who + ": no trigger pattern");
  if (policy.kind == PolicyKind::kStateForbidden) {
    if (policy.obligation_event || policy.obligation_window) {
      throw InputError(who + ": state_forbidden policies take no obligation fields");
    }
    if (policy.condition.empty()) throw InputError(who + ": state_forbidden policy needs a condition");
  } else {
    if (!policy.obligation_event || !policy.obligation_window) {
      throw InputError(who + ": obligation policies need an obligation event and window");
    }
    if (*policy.obligation_window < 1) throw InputError(who + ": obligation window must be positive");
  }
  for (const auto& p : policy.condition) {
    if (p.values.empty()) throw InputError(who + ": condition on " + p.target.text() + " lists no values");
  }
}

std::vector<Policy> parse_policies(std::istream& in) {
  std::vector<Policy> out;
  std::optional<Policy> current;
  std::string raw;
  std::size_t lineno = 0;
  const auto fail = [&](const std::string& msg) {
    throw ParseError("policy file line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto sp = line.find_first_of(" \t");
    const std::string key = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? std::string{} : trim(line.substr(sp));
    if (key == "policy") {
      if (current) fail("previous policy is missing 'end'");
      if (rest.empty()) fail("policy needs an id");
      current = Policy{};
      current->id = rest;
      continue;
    }
    if (!current) fail("'" + key + "' outside a policy block");
    try {
      if (key == "kind") {
        if (rest == "state_forbidden") current->kind = PolicyKind::kStateForbidden;
        else if (rest == "obligation") current->kind = PolicyKind::kObligation;
        else fail("unknown kind '" + rest + "'");
      } else if (key == "trigger") {
        if (rest == "any") current->any_event = true;
        else current->triggers.push_back(EventPattern::parse(rest));
      } else if (key == "when") {
        current->condition.push_back(parse_predicate(rest));
      } else if (key == "obligation") {
        current->obligation_event = EventPattern::parse(rest);
      } else if (key == "window") {
        std::size_t used = 0;
        const int w = std::stoi(rest, &used);
        if (used != rest.size()) fail("window must be an integer");
        current->obligation_window = w;
      } else if (key == "description") {
        current->description = rest;
      } else if (key == "end") {
        if (current->kind == PolicyKind::kObligation && !current->obligation_window) {
          current->obligation_window = kDefaultObligationWindow;
        }
        validate_policy(*current);
        out.push_back(std::move(*current));
        current.reset();
      } else {
        fail("unknown field '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  if (current) throw ParseError("policy file: policy " + current->id + " is missing 'end'");
  return out;
}

std::vector<Policy> load_policy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open policy file " + path);
  try {
    return parse_policies(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<Violation> check(const Scenario& scenario, std::span<const Policy> policies,
                             const HomeState& initial) {
  for (const auto& p : policies) validate_policy(p);
  const std::vector<EventToken> events = scenario.events();
  std::vector<Violation> out;
  std::vector<Pending> pending;
  HomeState state = initial;

  for (std::size_t i = 0; i < events.size(); ++i) {
    const EventToken& e = events[i];
    state = apply_event(std::move(state), e);

    // Obligations opened earlier are discharged by a matching event.
    std::erase_if(pending, [&](const Pending& p) {
      return i > p.start && i <= p.deadline && p.policy->obligation_event->matches(e);
    });

    for (const auto& policy : policies) {
      if (!policy.triggered_by(e)) continue;
      const bool condition = std::all_of(policy.condition.begin(), policy.condition.end(),
                                         [&](const Predicate& p) { return p.holds(state); });
      if (!condition) continue;
      if (policy.kind == PolicyKind::kStateForbidden) {
        Violation v;
        v.policy_id = policy.id;
        v.event_index = i;
        v.snapshot = state;
        v.event = e.text();
        record_evidence(policy, state, v);
        v.explanation = policy.id + ": " + policy.description;
        out.push_back(std::move(v));
      } else {
        pending.push_back({&policy, i, i + static_cast<std::size_t>(*policy.obligation_window)});
      }
    }

    std::erase_if(pending, [&](const Pending& p) {
      if (p.deadline != i) return false;
      out.push_back(obligation_violation(p, i, events, state));
      return true;
    });
  }
  if (!events.empty()) {
    for (const auto& p : pending) out.push_back(obligation_violation(p, events.size() - 1, events, state));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Violation& a, const Violation& b) { return a.event_index < b.event_index; });
  return out;
}

std::vector<std::vector<Violation>> check_all(std::span<const Scenario> scenarios,
                                              std::span<const Policy> policies,
                                              const HomeState& initial, Execution exec) {
  for (const auto& p : policies) validate_policy(p);
  std::vector<std::vector<Violation>> out(scenarios.size());
  const auto n = static_cast<std::ptrdiff_t>(scenarios.size());
  if (exec == Execution::kSerial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] = check(scenarios[static_cast<std::size_t>(i)], policies, initial);
    }
    return out;
  }
  // Policies are validated above, so check() cannot throw inside the region
  // except on allocation failure.
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = check(scenarios[static_cast<std::size_t>(i)], policies, initial);
  }
  return out;
}

ReportDocument render_report(std::span<const Violation> violations, const Scenario& scenario,
                             std::size_t scenario_index) {
  std::vector<const Violation*> sorted;
  for (const auto& v : violations) sorted.push_back(&v);
  std::stable_sort(sorted.begin(), sorted.end(), [](const Violation* a, const Violation* b) {
    return a->event_index < b->event_index;
  });

  ReportDocument doc;
  std::ostringstream text, records;
  const std::size_t events = scenario.history.size() + scenario.generated.size();
  if (sorted.empty()) {
    text << "scenario " << scenario_index << " (" << events << " events): no violations\n";
  } else {
    doc.exit_status = 1;
    text << "scenario " << scenario_index << " (" << events << " events): " << sorted.size()
         << (sorted.size() == 1 ? " violation\n" : " violations\n");
  }
  for (const Violation* v : sorted) {
    text << "  [" << v->event_index << "] " << v->explanation << "\n";
    text << "      event: " << v->event << "\n";
    text << "      state:";
    for (const auto& [ref, value] : v->evidence) text << ' ' << ref << '=' << value;
    text << "\n";

    nlohmann::json rec;
    rec["scenario"] = scenario_index;
    rec["policy"] = v->policy_id;
    rec["event_index"] = v->event_index;
    rec["event"] = v->event;
    rec["explanation"] = v->explanation;
    nlohmann::json devices = nlohmann::json::object(), home = nlohmann::json::object();
    for (const auto& [key, value] : v->snapshot.device_state) devices[key.first + "." + key.second] = value;
    for (const auto& [key, value] : v->snapshot.home_state) home[key] = value;
    rec["snapshot"] = {{"devices", devices}, {"home", home}};
    records << rec.dump() << "\n";
  }
  doc.text = text.str();
  doc.records = records.str();
  return doc;
}

}  // namespace helion
