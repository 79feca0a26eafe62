#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "helion/event_model.hpp"

namespace helion {

enum class Execution { kSerial, kParallel };

struct FoldEntropy {
  int fold = 0;
  double bits_per_token = 0.0;
  std::size_t tokens = 0;
};

struct EntropyReport {
  int order = 0;
  std::vector<FoldEntropy> per_fold;
  double mean = 0.0;        // token-weighted over folds
  double perplexity = 0.0;  // 2^mean
};

// Seeded shuffle of [0, n) cut into k contiguous, near-equal folds.
std::vector<std::vector<std::size_t>> fold_assignment(std::size_t n, int k, std::uint64_t seed);

// k-fold cross-entropy: train on k-1 folds, score the held-out one. Folds are
// independent and run concurrently under Execution::kParallel; results are
// identical to the serial path bit for bit.
EntropyReport kfold_entropy(std::span<const Sequence> corpus, int order, int k, std::uint64_t seed,
                            Execution exec = Execution::kParallel);

// One report per order over a shared fold assignment; parallel across every
// (order, fold) pair.
std::vector<EntropyReport> kfold_entropy_curve(std::span<const Sequence> corpus,
                                               std::span<const int> orders, int k,
                                               std::uint64_t seed,
                                               Execution exec = Execution::kParallel);

// CSV table `n,fold,H,tokens`, then a `n,mean,H,tokens` row per order.
void write_entropy_table(std::ostream& out, std::span<const EntropyReport> reports);

}  // namespace helion
