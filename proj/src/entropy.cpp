#include "helion/entropy.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "helion/error.hpp"
#include "helion/ngram.hpp"
#include "helion/rng.hpp"

namespace helion {
namespace {

FoldEntropy evaluate_fold(std::span<const Sequence> corpus,
                          const std::vector<std::vector<std::size_t>>& folds, int order,
                          std::size_t held_out) {
  std::vector<Sequence> train, test;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    auto& dst = f == held_out ? test : train;
    for (std::size_t idx : folds[f]) dst.push_back(corpus[idx]);
  }
  const NgramModel model = NgramModel::train(train, order);
  FoldEntropy out;
  out.fold = static_cast<int>(held_out);
  out.bits_per_token = cross_entropy(model, test);
  for (const auto& s : test) out.tokens += s.size();
  return out;
}

void finish(EntropyReport& r) {
  double weighted = 0.0;
  std::size_t tokens = 0;
  for (const auto& f : r.per_fold) {
    weighted += f.bits_per_token * static_cast<double>(f.tokens);
    tokens += f.tokens;
  }
  r.mean = weighted / static_cast<double>(tokens);
  r.perplexity = std::exp2(r.mean);
}

void check_folds(std::size_t sequences, int k) {
  if (k < 2) throw InputError("k-fold evaluation needs k >= 2");
  if (sequences < static_cast<std::size_t>(k)) {
    throw InputError("corpus has " + std::to_string(sequences) + " sequences, fewer than " +
                     std::to_string(k) + " folds");
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> fold_assignment(std::size_t n, int k, std::uint64_t seed) {
  check_folds(n, k);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "folds"));
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  const auto kk = static_cast<std::size_t>(k);
  for (std::size_t f = 0; f < kk; ++f) {
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(f * n / kk),
                    order.begin() + static_cast<std::ptrdiff_t>((f + 1) * n / kk));
  }
  return folds;
}

EntropyReport kfold_entropy(std::span<const Sequence> corpus, int order, int k, std::uint64_t seed,
                            Execution exec) {
  const int orders[] = {order};
  return kfold_entropy_curve(corpus, orders, k, seed, exec).front();
}

std::vector<EntropyReport> kfold_entropy_curve(std::span<const Sequence> corpus,
                                               std::span<const int> orders, int k,
                                               std::uint64_t seed, Execution exec) {
  const auto folds = fold_assignment(corpus.size(), k, seed);
  const auto kk = static_cast<std::size_t>(k);
  std::vector<EntropyReport> reports(orders.size());
  for (std::size_t o = 0; o < orders.size(); ++o) {
    if (orders[o] < 1) throw InputError("n-gram order must be at least 1");
    reports[o].order = orders[o];
    reports[o].per_fold.resize(kk);
  }

  const auto jobs = static_cast<std::ptrdiff_t>(orders.size() * kk);
  if (exec == Execution::kSerial) {
    for (std::ptrdiff_t j = 0; j < jobs; ++j) {
      const auto o = static_cast<std::size_t>(j) / kk, f = static_cast<std::size_t>(j) % kk;
      reports[o].per_fold[f] = evaluate_fold(corpus, folds, orders[o], f);
    }
  } else {
    // Exceptions must not cross the parallel region.
    std::vector<std::string> errors(static_cast<std::size_t>(jobs));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < jobs; ++j) {
      const auto o = static_cast<std::size_t>(j) / kk, f = static_cast<std::size_t>(j) % kk;
      try {
        reports[o].per_fold[f] = evaluate_fold(corpus, folds, orders[o], f);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(j)] = e.what();
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw InputError(e);
    }
  }
  for (auto& r : reports) finish(r);
  return reports;
}

void write_entropy_table(std::ostream& out, std::span<const EntropyReport> reports) {
  char buf[128];
  out << "n,fold,H,tokens\n";
  for (const auto& r : reports) {
    std::size_t tokens = 0;
    for (const auto& f : r.per_fold) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.6f,%zu\n", r.order, f.fold, f.bits_per_token, f.tokens);
      out << buf;
      tokens += f.tokens;
    }
    std::snprintf(buf, sizeof buf, "%d,mean,%.6f,%zu\n", r.order, r.mean, tokens);
    out << buf;
  }
}

}  // namespace helion
