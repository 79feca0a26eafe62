#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace helion {

// Expands one user seed into independent, labeled streams ("schedule",
// "folds", "generate", ...). Stable across platforms and runs.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                          std::uint64_t index = 0) noexcept;

// mt19937_64 plus distribution helpers with fixed algorithms; the standard
// distributions are implementation-defined, which would break byte-identical
// output across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  // Uniform in [lo, hi], inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi);

  // Uniform in [0, 1) with 53 random bits.
  double canonical();

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace helion
