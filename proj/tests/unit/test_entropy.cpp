#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "helion/entropy.hpp"
#include "helion/error.hpp"
#include "helion/synth.hpp"
#include "support/fixtures.hpp"

using namespace helion;

TEST_CASE("fold assignment partitions the corpus") {
  const auto folds = fold_assignment(40, 10, 3);
  REQUIRE(folds.size() == 10);
  std::set<std::size_t> all;
  for (const auto& f : folds) {
    CHECK(f.size() == 4);
    all.insert(f.begin(), f.end());
  }
  CHECK(all.size() == 40);
  CHECK(*all.rbegin() == 39);
  CHECK(fold_assignment(40, 10, 3) == folds);
  CHECK_FALSE(fold_assignment(40, 10, 4) == folds);

  const auto uneven = fold_assignment(43, 10, 0);
  std::size_t total = 0;
  for (const auto& f : uneven) {
    CHECK(f.size() >= 4);
    CHECK(f.size() <= 5);
    total += f.size();
  }
  CHECK(total == 43);
  CHECK_THROWS_AS(fold_assignment(5, 10, 0), InputError);
  CHECK_THROWS_AS(fold_assignment(5, 1, 0), InputError);
}

TEST_CASE("k-fold report is token-weighted and consistent") {
  SyntheticConfig cfg;
  cfg.users = 3;
  const auto corpus = segment(synthetic_corpus(cfg), 20);
  const auto r = kfold_entropy(corpus, 2, 5, 11);
  REQUIRE(r.per_fold.size() == 5);
  double weighted = 0;
  std::size_t tokens = 0;
  for (const auto& f : r.per_fold) {
    weighted += f.bits_per_token * static_cast<double>(f.tokens);
    tokens += f.tokens;
  }
  std::size_t corpus_tokens = 0;
  for (const auto& s : corpus) corpus_tokens += s.size();
  CHECK(tokens == corpus_tokens);
  CHECK(r.mean == doctest::Approx(weighted / static_cast<double>(tokens)).epsilon(1e-12));
  CHECK(r.perplexity == doctest::Approx(std::exp2(r.mean)).epsilon(1e-12));
}

TEST_CASE("parallel and serial folds agree bit for bit") {
  SyntheticConfig cfg;
  cfg.users = 4;
  const auto corpus = segment(synthetic_corpus(cfg), 20);
  const int orders[] = {1, 2, 3, 5};
  const auto serial = kfold_entropy_curve(corpus, orders, 10, 5, Execution::kSerial);
  const auto parallel = kfold_entropy_curve(corpus, orders, 10, 5, Execution::kParallel);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].mean == parallel[i].mean);
    for (std::size_t f = 0; f < serial[i].per_fold.size(); ++f) {
      CHECK(serial[i].per_fold[f].bits_per_token == parallel[i].per_fold[f].bits_per_token);
    }
  }
  std::ostringstream a, b;
  write_entropy_table(a, serial);
  write_entropy_table(b, parallel);
  CHECK(a.str() == b.str());
}

TEST_CASE("entropy table layout") {
  const auto corpus = fixtures::corpus({"a|x|A b|x|B", "a|x|A", "b|x|B a|x|A", "a|x|A b|x|B a|x|A"});
  const int orders[] = {1, 2};
  const auto reports = kfold_entropy_curve(corpus, orders, 2, 0);
  std::ostringstream out;
  write_entropy_table(out, reports);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,fold,H,tokens");
  int rows = 0, means = 0;
  while (std::getline(in, line)) {
    ++rows;
    means += line.find(",mean,") != std::string::npos;
  }
  CHECK(rows == 6);
  CHECK(means == 2);
  const int bad[] = {0};
  CHECK_THROWS_AS(kfold_entropy_curve(corpus, bad, 2, 0), InputError);
}
