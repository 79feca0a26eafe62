#include <benchmark/benchmark.h>

#include <sstream>
#include <vector>

#include "helion/entropy.hpp"
#include "helion/generator.hpp"
#include "helion/snapshot.hpp"
#include "helion/synth.hpp"

using namespace helion;

namespace {

const std::vector<Sequence>& corpus() {
  static const std::vector<Sequence> c = [] {
    SyntheticConfig cfg;
    cfg.seed = 7;
    return segment(synthetic_corpus(cfg), 20);
  }();
  return c;
}

const std::vector<Policy>& policies() {
  static const std::vector<Policy> p = load_policy_file(HELION_SOURCE_DIR "/policies/default.pol");
  return p;
}

const std::vector<Scenario>& scenarios() {
  static const std::vector<Scenario> s = [] {
    const auto model = NgramModel::train(corpus(), 3);
    std::vector<Scenario> out;
    GenerationConfig cfg;
    cfg.length = 50;
    for (std::size_t i = 0; i < 2000; ++i) {
      const auto& seq = corpus()[i % corpus().size()].tokens();
      cfg.seed = i;
      cfg.flavor = static_cast<Flavor>(i % 4);
      out.push_back(generate(model, std::vector<EventToken>(seq.begin(), seq.begin() + 1), cfg));
    }
    return out;
  }();
  return s;
}

void BM_EntropyCurve(benchmark::State& state) {
  const auto exec = state.range(0) ? Execution::kParallel : Execution::kSerial;
  const std::vector<int> orders{1, 2, 3, 4, 5};
  corpus();
  for (auto _ : state) {
    benchmark::DoNotOptimize(kfold_entropy_curve(corpus(), orders, 10, 7, exec));
  }
}
BENCHMARK(BM_EntropyCurve)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CheckAll(benchmark::State& state) {
  const auto exec = state.range(0) ? Execution::kParallel : Execution::kSerial;
  scenarios();
  policies();
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_all(scenarios(), policies(), {}, exec));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scenarios().size()));
}
BENCHMARK(BM_CheckAll)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
