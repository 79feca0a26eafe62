#include "helion/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "helion/entropy.hpp"
#include "helion/error.hpp"
#include "helion/generator.hpp"
#include "helion/ingest.hpp"
#include "helion/ngram.hpp"
#include "helion/snapshot.hpp"
#include "helion/synth.hpp"

namespace helion {
namespace {

// Writes to a file when a path is given, else to the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw InputError("cannot write " + path);
    stream_ = file_.get();
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

struct IngestOptions {
  std::string routines, devices, synonyms, abstraction;
};

TokenizerContext load_context(const IngestOptions& o) {
  TokenizerContext ctx;
  if (!o.devices.empty()) ctx.catalog = load_device_catalog(o.devices);
  if (!o.synonyms.empty()) ctx.synonyms = load_synonym_table(o.synonyms);
  if (!o.abstraction.empty()) ctx.abstraction = load_abstraction_map(o.abstraction);
  return ctx;
}

void add_context_flags(CLI::App* cmd, IngestOptions& o) {
  cmd->add_option("--devices", o.devices, "Device catalog (JSON); enables attribute validation")
      ->check(CLI::ExistingFile);
  cmd->add_option("--synonyms", o.synonyms, "Synonym table (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--abstraction", o.abstraction, "Continuous-value range map (JSON)")
      ->check(CLI::ExistingFile);
}

void write_diagnostics(std::ostream& out, const std::vector<Diagnostic>& diags) {
  out << "severity,record,message\n";
  for (const auto& d : diags) {
    std::string msg = d.message;
    if (msg.find_first_of(",\"") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : msg) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      msg = quoted + "\"";
    }
    out << to_string(d.severity) << ',' << d.record << ',' << msg << '\n';
  }
}

std::vector<Sequence> load_segmented(const std::string& path, int sentence_length) {
  auto corpus = read_corpus_file(path);
  if (corpus.empty()) throw InputError("corpus " + path + " holds no sequences");
  if (sentence_length > 0) corpus = segment(corpus, static_cast<std::size_t>(sentence_length));
  return corpus;
}

std::vector<std::vector<EventToken>> load_histories(const std::string& spec) {
  std::vector<std::vector<EventToken>> out;
  const auto parse_line = [](const std::string& line) {
    std::istringstream in(line);
    std::vector<EventToken> h;
    std::string tok;
    while (in >> tok) h.push_back(parse_token(tok));
    return h;
  };
  if (spec.empty()) {
    out.emplace_back();
    return out;
  }
  std::error_code ec;
  if (std::filesystem::is_regular_file(spec, ec)) {
    std::ifstream in(spec);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      out.push_back(parse_line(line));
    }
    if (out.empty()) throw InputError("history file " + spec + " holds no histories");
    return out;
  }
  out.push_back(parse_line(spec));
  return out;
}

NgramModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model " + path);
  try {
    return NgramModel::load(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace

std::vector<int> parse_order_list(const std::string& text) {
  const auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || v < 1 || v > kMaxOrder) {
      throw InputError("bad order '" + s + "' in '" + text + "' (orders run 1.." +
                       std::to_string(kMaxOrder) + ")");
    }
    return v;
  };
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = to_int(text.substr(0, dots)), hi = to_int(text.substr(dots + 2));
    if (lo > hi) throw InputError("empty order range '" + text + "'");
    for (int n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    out.push_back(to_int(text.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Home-automation event sequences: scheduling, n-gram modeling, scenario generation "
               "and policy checking.",
               "helion"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // synth
  SyntheticConfig synth_cfg;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic multi-user routine file");
  synth->add_option("--users", synth_cfg.users, "Number of users")->capture_default_str();
  synth->add_option("--routines-per-user", synth_cfg.routines_per_user, "Routines drawn per user")
      ->capture_default_str();
  synth->add_option("--seed", synth_cfg.seed, "Seed")->capture_default_str();
  synth->add_option("--out", synth_out, "Output routine file (default stdout)");

  // ingest
  IngestOptions ingest_opts;
  std::string ingest_out, ingest_diag;
  auto* ingest = app.add_subcommand("ingest", "Validate and normalize a routine file");
  ingest->add_option("--routines", ingest_opts.routines, "Routine file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  add_context_flags(ingest, ingest_opts);
  ingest->add_option("--out", ingest_out, "Normalized routine file (default stdout)");
  ingest->add_option("--diagnostics", ingest_diag,
                     "Diagnostics CSV severity,record,message (default stderr)");

  // schedule
  IngestOptions sched_opts;
  int sched_days = kDefaultHorizonDays;
  std::uint64_t sched_seed = 0;
  std::string sched_out, sched_timeline;
  auto* sched = app.add_subcommand("schedule", "Place routines into an hourly timeline per user");
  sched->add_option("--routines", sched_opts.routines, "Routine file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  add_context_flags(sched, sched_opts);
  sched->add_option("--days", sched_days, "Horizon in days")->capture_default_str();
  sched->add_option("--seed", sched_seed, "Seed")->capture_default_str();
  sched->add_option("--out", sched_out, "Corpus file, one line per user (default stdout)");
  sched->add_option("--timeline", sched_timeline, "Timeline CSV day,hour,routine_id per user");

  // train
  std::string train_corpus, train_out;
  int train_order = 3, train_sentence = 20;
  auto* train = app.add_subcommand("train", "Train an interpolated Kneser-Ney n-gram model");
  train->add_option("--corpus", train_corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  train->add_option("--order", train_order, "n-gram order")
      ->capture_default_str()
      ->check(CLI::Range(1, kMaxOrder));
  train->add_option("--sentence-length", train_sentence, "Split sequences into sentences (0 keeps lines)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train->add_option("--out", train_out, "Model file (default stdout)");

  // entropy
  std::string ent_corpus, ent_orders = "1..10", ent_out;
  int ent_k = 10, ent_sentence = 20;
  std::uint64_t ent_seed = 0;
  bool ent_serial = false;
  auto* entropy = app.add_subcommand("entropy", "k-fold cross-entropy table n,fold,H,tokens");
  entropy->add_option("--corpus", ent_corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  entropy->add_option("--order", ent_orders, "Orders: 1..10, 1,2,3 or 3")->capture_default_str();
  entropy->add_option("--k", ent_k, "Folds")->capture_default_str();
  entropy->add_option("--seed", ent_seed, "Seed")->capture_default_str();
  entropy->add_option("--sentence-length", ent_sentence, "Split sequences into sentences (0 keeps lines)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  entropy->add_flag("--serial", ent_serial, "Evaluate folds one at a time");
  entropy->add_option("--out", ent_out, "Table file (default stdout)");

  // generate
  std::string gen_model, gen_history, gen_flavor = "up", gen_out;
  GenerationConfig gen_cfg;
  int gen_count = 1;
  bool gen_greedy = false;
  auto* gen = app.add_subcommand("generate", "Generate scenarios in up, down, up-down or down-up flavor");
  gen->add_option("--model", gen_model, "Model file")->required()->check(CLI::ExistingFile);
  gen->add_option("--history", gen_history, "History file (one history per line) or inline tokens");
  gen->add_option("--flavor", gen_flavor, "up, down, up-down or down-up")
      ->capture_default_str()
      ->check(CLI::IsMember({"up", "down", "up-down", "down-up"}));
  gen->add_option("--length", gen_cfg.length, "Events to generate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_cfg.seed, "Seed; scenario i uses seed+i")->capture_default_str();
  gen->add_flag("--greedy", gen_greedy, "Up picks take the most probable event");
  gen->add_option("--count", gen_count, "Scenarios per history")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "Scenario file (default stdout)");

  // extract-routines
  std::string ex_model, ex_corpus, ex_out;
  ExtractConfig ex_cfg;
  int ex_sentence = 20;
  bool ex_greedy = false;
  auto* extract = app.add_subcommand("extract-routines", "Mine trigger/action pairs by held-out generation");
  extract->add_option("--model", ex_model, "Template model (order and vocabulary)")
      ->required()
      ->check(CLI::ExistingFile);
  extract->add_option("--corpus", ex_corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  extract->add_option("--rounds", ex_cfg.rounds, "Rounds")->capture_default_str()->check(CLI::PositiveNumber);
  extract->add_option("--seed", ex_cfg.seed, "Seed")->capture_default_str();
  extract->add_option("--max-history", ex_cfg.max_history, "Longest odd history")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  extract->add_option("--sentence-length", ex_sentence, "Split sequences into sentences (0 keeps lines)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  extract->add_flag("--greedy", ex_greedy, "Take the most probable event instead of sampling");
  extract->add_option("--out", ex_out, "Output trigger<TAB>action lines (default stdout)");

  // check
  std::string chk_scenario, chk_policies, chk_format = "text", chk_out;
  bool chk_serial = false;
  auto* chk = app.add_subcommand("check", "Replay scenarios and report policy violations");
  chk->add_option("--scenario", chk_scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  chk->add_option("--policies", chk_policies, "Policy file")->required()->check(CLI::ExistingFile);
  chk->add_option("--format", chk_format, "text or records (JSON lines)")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "records"}));
  chk->add_flag("--serial", chk_serial, "Check scenarios one at a time");
  chk->add_option("--out", chk_out, "Report file (default stdout)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) {
      Sink sink(synth_out, out);
      *sink << write_routines_json(synthetic_users(synth_cfg));
      return 0;
    }

    if (*ingest) {
      const auto result = ingest_file(ingest_opts.routines, load_context(ingest_opts));
      {
        Sink diag(ingest_diag, err);
        write_diagnostics(*diag, result.diagnostics);
      }
      if (result.has_errors()) return 2;
      Sink sink(ingest_out, out);
      *sink << write_routines_json(result.users);
      return 0;
    }

    if (*sched) {
      const auto result = ingest_file(sched_opts.routines, load_context(sched_opts));
      if (result.has_errors()) {
        write_diagnostics(err, result.diagnostics);
        return 2;
      }
      const auto scheduled = schedule_users(result.users, sched_days, sched_seed);
      Sink sink(sched_out, out);
      for (std::size_t u = 0; u < scheduled.size(); ++u) {
        *sink << "# " << result.users[u].user << '\n';
        write_sequence(*sink, scheduled[u].sequence);
      }
      if (!sched_timeline.empty()) {
        Sink tl(sched_timeline, out);
        for (std::size_t u = 0; u < scheduled.size(); ++u) {
          *tl << "# " << result.users[u].user << '\n';
          write_timeline_csv(*tl, scheduled[u].timeline, result.users[u].routines);
        }
      }
      return 0;
    }

    if (*train) {
      const auto corpus = load_segmented(train_corpus, train_sentence);
      const auto model = NgramModel::train(corpus, train_order);
      Sink sink(train_out, out);
      model.save(*sink);
      return 0;
    }

    if (*entropy) {
      const auto orders = parse_order_list(ent_orders);
      const auto corpus = load_segmented(ent_corpus, ent_sentence);
      const auto reports = kfold_entropy_curve(corpus, orders, ent_k, ent_seed,
                                               ent_serial ? Execution::kSerial : Execution::kParallel);
      Sink sink(ent_out, out);
      write_entropy_table(*sink, reports);
      return 0;
    }

    if (*gen) {
      const auto model = load_model(gen_model);
      gen_cfg.flavor = *parse_flavor(gen_flavor);
      gen_cfg.mode = gen_greedy ? GenerationMode::kGreedy : GenerationMode::kSample;
      const std::uint64_t base = gen_cfg.seed;
      std::uint64_t offset = 0;
      Sink sink(gen_out, out);
      for (const auto& history : load_histories(gen_history)) {
        for (int i = 0; i < gen_count; ++i) {
          GenerationConfig cfg = gen_cfg;
          cfg.seed = base + offset++;
          write_scenario(*sink, generate(model, history, cfg));
        }
      }
      return 0;
    }

    if (*extract) {
      const auto model = load_model(ex_model);
      const auto corpus = load_segmented(ex_corpus, ex_sentence);
      ex_cfg.mode = ex_greedy ? GenerationMode::kGreedy : GenerationMode::kSample;
      const auto result = extract_routines(model, corpus, ex_cfg);
      Sink sink(ex_out, out);
      for (const auto& r : result.routines) *sink << r.trigger.text() << '\t' << r.action.text() << '\n';
      return 0;
    }

    if (*chk) {
      const auto policies = load_policy_file(chk_policies);
      std::ifstream in(chk_scenario);
      const auto scenarios = read_scenarios(in);
      if (scenarios.empty()) throw InputError("scenario file " + chk_scenario + " holds no scenarios");
      const auto verdicts = check_all(scenarios, policies, {},
                                      chk_serial ? Execution::kSerial : Execution::kParallel);
      int status = 0;
      Sink sink(chk_out, out);
      for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const auto doc = render_report(verdicts[i], scenarios[i], i);
        *sink << (chk_format == "records" ? doc.records : doc.text);
        status = std::max(status, doc.exit_status);
      }
      return status;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace helion
