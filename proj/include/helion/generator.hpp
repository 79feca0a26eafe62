#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "helion/event_model.hpp"
#include "helion/ngram.hpp"
#include "helion/rng.hpp"

namespace helion {

enum class Flavor { kUp, kDown, kUpDown, kDownUp };
enum class Pick { kUp, kDown };
enum class GenerationMode { kSample, kGreedy };

std::string_view to_string(Flavor f) noexcept;
std::optional<Flavor> parse_flavor(std::string_view s);  // up, down, up-down, down-up

struct GenerationConfig {
  int length = 10;
  Flavor flavor = Flavor::kUp;
  GenerationMode mode = GenerationMode::kSample;
  std::uint64_t seed = 0;
};

struct Scenario {
  std::vector<EventToken> history;
  std::vector<EventToken> generated;
  Flavor flavor = Flavor::kUp;
  std::vector<Pick> marks;  // one per generated event
  std::uint64_t seed = 0;

  // history followed by generated
  std::vector<EventToken> events() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Picks one candidate from a distribution. Up/sample draws proportionally to
// the weights, up/greedy takes the largest, down takes the smallest; ties go
// to the lexicographically smallest name. `weights` and `names` run parallel.
std::size_t pick_index(std::span<const double> weights, std::span<const std::string> names,
                       Pick pick, GenerationMode mode, Rng& rng);

// Next event after `history`, chosen among real vocabulary tokens (<unk> and
// the sentence markers are never produced). Throws InputError if the model
// has no real tokens.
EventToken next_event(const NgramModel& model, std::span<const EventToken> history, Pick pick,
                      GenerationMode mode, Rng& rng);

// Up/down marks for a scenario of `length` events. Hybrid flavors work on
// disjoint 10-event windows, each carrying 1-3 minority picks; a trailing
// window of w events carries min(w, max(1, round(w/5))).
std::vector<Pick> flavor_marks(Flavor flavor, int length, Rng& rng);

Scenario generate(const NgramModel& model, std::span<const EventToken> history,
                  const GenerationConfig& cfg);

// Scenario file lines: the events in corpus wire format, then
// `# flavor=<f> seed=<s> history=<h> marks=<U|D per generated event>`.
void write_scenario(std::ostream& out, const Scenario& scenario);
// Reads scenario files; plain corpus lines without annotation are accepted
// and treated as fully generated up scenarios.
std::vector<Scenario> read_scenarios(std::istream& in);

struct ExtractConfig {
  int rounds = 200;
  std::uint64_t seed = 0;
  Pick pick = Pick::kUp;
  GenerationMode mode = GenerationMode::kSample;
  int max_history = 9;  // longest odd history sampled
};

struct ExtractedRoutine {
  EventToken trigger;
  EventToken action;
  int round = 0;
  int history_length = 0;
};

struct ExtractionResult {
  std::vector<ExtractedRoutine> routines;
  std::vector<int> history_lengths;  // one per round
};

// Routine extraction: each round splits the corpus 90/10 at random, trains a
// model of `template_model.order()` on the 90%, samples an odd-length history
// from a held-out sequence, generates three events and keeps events two and
// three as a (trigger, action) pair. Pairs are deduplicated on their
// serialized form. The corpus must use only tokens known to the template
// model.
ExtractionResult extract_routines(const NgramModel& template_model, std::span<const Sequence> corpus,
                                  const ExtractConfig& cfg);

}  // namespace helion
