#include "helion/generator.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "helion/error.hpp"

namespace helion {
namespace {

bool better(double w, std::string_view name, double best_w, std::string_view best_name, Pick pick) {
  if (w == best_w) return name < best_name;
  return pick == Pick::kUp ? w > best_w : w < best_w;
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw ParseError("scenario annotation: bad number '" + std::string(s) + "'");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace

std::string_view to_string(Flavor f) noexcept {
  switch (f) {
    case Flavor::kUp: return "up";
    case Flavor::kDown: return "down";
    case Flavor::kUpDown: return "up-down";
    case Flavor::kDownUp: return "down-up";
  }
  return "up";
}

std::optional<Flavor> parse_flavor(std::string_view s) {
  for (Flavor f : {Flavor::kUp, Flavor::kDown, Flavor::kUpDown, Flavor::kDownUp}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

std::vector<EventToken> Scenario::events() const {
  std::vector<EventToken> all = history;
  all.insert(all.end(), generated.begin(), generated.end());
  return all;
}

std::size_t pick_index(std::span<const double> weights, std::span<const std::string> names,
                       Pick pick, GenerationMode mode, Rng& rng) {
  if (weights.empty() || weights.size() != names.size()) {
    throw InputError("pick_index needs one name per weight and at least one candidate");
  }
  if (pick == Pick::kUp && mode == GenerationMode::kSample) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double target = rng.canonical() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      acc += weights[i];
      last_positive = i;
      if (target < acc) return i;
    }
    return last_positive;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < weights.size(); ++i) {
    if (better(weights[i], names[i], weights[best], names[best], pick)) best = i;
  }
  return best;
}

EventToken next_event(const NgramModel& model, std::span<const EventToken> history, Pick pick,
                      GenerationMode mode, Rng& rng) {
  const auto context = model.encode(history);
  const auto& vocab = model.vocabulary();
  std::vector<double> weights;
  std::vector<std::string> names;
  weights.reserve(vocab.size());
  names.reserve(vocab.size());
  for (TokenId id = 0; id < vocab.size(); ++id) {
    if (id == vocab.unk_id()) continue;
    weights.push_back(model.conditional(context, id));
    names.push_back(vocab.token(id));
  }
  if (names.empty()) throw InputError("model vocabulary holds no real tokens to generate");
  return parse_token(names[pick_index(weights, names, pick, mode, rng)]);
}

std::vector<Pick> flavor_marks(Flavor flavor, int length, Rng& rng) {
  if (length < 1) throw InputError("scenario length must be at least 1");
  const auto n = static_cast<std::size_t>(length);
  switch (flavor) {
    case Flavor::kUp: return std::vector<Pick>(n, Pick::kUp);
    case Flavor::kDown: return std::vector<Pick>(n, Pick::kDown);
    default: break;
  }
  const Pick majority = flavor == Flavor::kUpDown ? Pick::kUp : Pick::kDown;
  const Pick minority = flavor == Flavor::kUpDown ? Pick::kDown : Pick::kUp;
  std::vector<Pick> marks(n, majority);
  for (std::size_t start = 0; start < n; start += 10) {
    const std::size_t w = std::min<std::size_t>(10, n - start);
    std::size_t k;
    if (w == 10) {
      k = static_cast<std::size_t>(rng.between(1, 3));
    } else {
      k = std::min(w, std::max<std::size_t>(1, (2 * w + 5) / 10));
    }
    for (std::size_t pos : rng.sample(w, k)) marks[start + pos] = minority;
  }
  return marks;
}

Scenario generate(const NgramModel& model, std::span<const EventToken> history,
                  const GenerationConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, "generate"));
  Scenario s;
  s.history.assign(history.begin(), history.end());
  s.flavor = cfg.flavor;
  s.seed = cfg.seed;
  s.marks = flavor_marks(cfg.flavor, cfg.length, rng);
  std::vector<EventToken> running = s.history;
  for (Pick pick : s.marks) {
    EventToken e = next_event(model, running, pick, cfg.mode, rng);
    running.push_back(e);
    s.generated.push_back(std::move(e));
  }
  return s;
}

void write_scenario(std::ostream& out, const Scenario& scenario) {
  const auto events = scenario.events();
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i) out << ' ';
    out << events[i].text();
  }
  out << "\n# flavor=" << to_string(scenario.flavor) << " seed=" << scenario.seed
      << " history=" << scenario.history.size() << " marks=";
  for (Pick p : scenario.marks) out << (p == Pick::kUp ? 'U' : 'D');
  out << '\n';
}

std::vector<Scenario> read_scenarios(std::istream& in) {
  std::vector<Scenario> out;
  std::string line;
  bool annotatable = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view view(line);
      if (!annotatable || view.rfind("# flavor=", 0) != 0) continue;
      Scenario& s = out.back();
      std::istringstream fields(line.substr(2));
      std::string field;
      std::size_t history = 0;
      std::string marks;
      while (fields >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw ParseError("scenario annotation: bad field '" + field + "'");
        const std::string key = field.substr(0, eq), value = field.substr(eq + 1);
        if (key == "flavor") {
          const auto f = parse_flavor(value);
          if (!f) throw ParseError("scenario annotation: unknown flavor '" + value + "'");
          s.flavor = *f;
        } else if (key == "seed") {
          s.seed = parse_u64(value);
        } else if (key == "history") {
          history = parse_u64(value);
        } else if (key == "marks") {
          marks = value;
        }
      }
      auto all = s.events();
      if (history > all.size() || marks.size() != all.size() - history) {
        throw ParseError("scenario annotation does not match its event line");
      }
      s.history.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(history));
      s.generated.assign(all.begin() + static_cast<std::ptrdiff_t>(history), all.end());
      s.marks.clear();
      for (char c : marks) {
        if (c != 'U' && c != 'D') throw ParseError("scenario annotation: marks must be U or D");
        s.marks.push_back(c == 'U' ? Pick::kUp : Pick::kDown);
      }
      annotatable = false;
      continue;
    }
    std::istringstream tokens(line);
    Scenario s;
    std::string tok;
    while (tokens >> tok) s.generated.push_back(parse_token(tok));
    s.marks.assign(s.generated.size(), Pick::kUp);
    out.push_back(std::move(s));
    annotatable = true;
  }
  return out;
}

ExtractionResult extract_routines(const NgramModel& template_model, std::span<const Sequence> corpus,
                                  const ExtractConfig& cfg) {
  if (corpus.size() < 2) throw InputError("corpus too small to split 90/10: need at least 2 sequences");
  if (cfg.rounds < 1) throw InputError("extraction needs at least one round");
  if (cfg.max_history < 1) throw InputError("max history must be at least 1");
  for (const auto& seq : corpus) {
    for (const auto& t : seq.tokens()) {
      if (!template_model.vocabulary().find(t.text())) {
        throw InputError("corpus token " + t.text() + " is not in the model vocabulary");
      }
    }
  }

  Rng rng(derive_seed(cfg.seed, "extract"));
  const std::size_t n = corpus.size();
  const std::size_t test_n = std::max<std::size_t>(1, (n + 5) / 10);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  ExtractionResult result;
  std::set<std::string> seen;
  for (int round = 0; round < cfg.rounds; ++round) {
    rng.shuffle(order);
    std::vector<Sequence> train;
    for (std::size_t i = test_n; i < n; ++i) train.push_back(corpus[order[i]]);
    const NgramModel model = NgramModel::train(train, template_model.order());

    const Sequence& held = corpus[order[rng.below(test_n)]];
    const auto len = static_cast<int>(held.size());
    const int longest = std::min(cfg.max_history, len);
    const int odd_choices = (longest + 1) / 2;  // 1, 3, ..., longest odd
    const int h = 2 * static_cast<int>(rng.below(static_cast<std::uint64_t>(odd_choices))) + 1;
    const auto start = static_cast<std::ptrdiff_t>(rng.below(static_cast<std::uint64_t>(len - h + 1)));
    const std::vector<EventToken> history(held.tokens().begin() + start,
                                          held.tokens().begin() + start + h);
    result.history_lengths.push_back(h);

    GenerationConfig gen;
    gen.length = 3;
    gen.flavor = cfg.pick == Pick::kUp ? Flavor::kUp : Flavor::kDown;
    gen.mode = cfg.mode;
    gen.seed = derive_seed(cfg.seed, "extract-generate", static_cast<std::uint64_t>(round));
    const Scenario s = generate(model, history, gen);
    const EventToken& trigger = s.generated[1];
    const EventToken& action = s.generated[2];
    if (trigger == action) continue;
    if (seen.insert(trigger.text() + '\t' + action.text()).second) {
      result.routines.push_back({trigger, action, round, h});
    }
  }
  return result;
}

}  // namespace helion
