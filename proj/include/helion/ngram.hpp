#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "helion/event_model.hpp"

namespace helion {

inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr int kMaxOrder = 16;

// Fixed-capacity token tuple; unused trailing ids stay zero.
struct NgramKey {
  std::array<TokenId, kMaxOrder> ids{};
  std::uint8_t len = 0;

  static NgramKey of(std::span<const TokenId> tokens);
  std::span<const TokenId> view() const noexcept { return {ids.data(), len}; }
  NgramKey prefix() const noexcept;  // drops the last id
  NgramKey suffix() const noexcept;  // drops the first id

  friend bool operator==(const NgramKey&, const NgramKey&) = default;
  friend auto operator<=>(const NgramKey& a, const NgramKey& b) noexcept {
    return std::lexicographical_compare_three_way(a.ids.begin(), a.ids.begin() + a.len,
                                                  b.ids.begin(), b.ids.begin() + b.len);
  }
};

struct NgramKeyHash {
  std::size_t operator()(const NgramKey& k) const noexcept;
};

// Interpolated Kneser-Ney n-gram estimator.
//
// The outcome set is the vocabulary (including <unk>) plus </s>; contexts
// may also contain <s>. The highest order uses raw counts, lower orders use
// continuation counts (number of distinct left extensions). Each order k
// applies one absolute discount D_k and hands the freed mass
// D_k * types(h) / total(h) to order k-1; below order 1 sits the uniform
// distribution over all outcomes, so every outcome keeps positive mass.
// Discounts follow D = n1 / (n1 + 2 n2) over the order's adjusted counts,
// clamped to [0.05, 0.95], or 0.5 when n1 or n2 is zero.
class NgramModel {
 public:
  // Each sequence is padded with order-1 <s> markers and one </s>.
  static NgramModel train(std::span<const Sequence> corpus, int order);

  int order() const noexcept { return order_; }
  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  std::size_t outcome_count() const noexcept { return vocab_.size() + 1; }
  TokenId unk_id() const noexcept { return vocab_.unk_id(); }
  TokenId eos_id() const noexcept { return static_cast<TokenId>(vocab_.size()); }
  TokenId bos_id() const noexcept { return static_cast<TokenId>(vocab_.size() + 1); }
  // Index k-1 holds the discount of order k.
  const std::vector<double>& discounts() const noexcept { return discounts_; }

  // Raw occurrences of `gram` ending at a predicted position (0 if unseen).
  std::uint64_t count(std::span<const TokenId> gram) const;
  // Raw count at the top order, continuation count below it.
  std::uint64_t adjusted_count(std::span<const TokenId> gram) const;

  // p(next | context). Only the last order-1 ids of `context` matter; shorter
  // contexts are left-padded with <s>. Ids outside the model map to <unk>.
  double conditional(std::span<const TokenId> context, TokenId next) const;
  // p(. | context) for every outcome id in [0, outcome_count()).
  std::vector<double> distribution(std::span<const TokenId> context) const;

  // Token -> id, with out-of-vocabulary tokens mapped to <unk>.
  std::vector<TokenId> encode(std::span<const EventToken> tokens) const;
  // Vocabulary entry, "</s>" or "<s>".
  std::string_view name(TokenId id) const;

  // Versioned text format; identical models serialize to identical bytes.
  void save(std::ostream& out) const;
  static NgramModel load(std::istream& in);

  friend bool operator==(const NgramModel& a, const NgramModel& b);

 private:
  struct GramCounts {
    std::uint64_t raw = 0;
    std::uint64_t adjusted = 0;
  };
  struct ContextStats {
    std::uint64_t total = 0;  // sum of adjusted counts over outcomes
    std::uint64_t types = 0;  // outcomes with a positive adjusted count
  };
  using GramTable = std::unordered_map<NgramKey, GramCounts, NgramKeyHash>;
  using ContextTable = std::unordered_map<NgramKey, ContextStats, NgramKeyHash>;

  NgramModel(Vocabulary vocab, int order);
  TokenId clamp_id(TokenId id) const noexcept;
  void derive_lower_orders();
  void estimate_discounts();

  Vocabulary vocab_;
  int order_ = 1;
  std::vector<GramTable> grams_;        // index k-1: k-grams
  std::vector<ContextTable> contexts_;  // index k-1: contexts of k-grams
  std::vector<double> discounts_;
};

// p(next | history) on tokens.
double prob(const NgramModel& model, std::span<const EventToken> history, const EventToken& next);

// Sum of log2 p(s[i] | s[..i]) over the tokens of s, begin-padded. The end
// marker is not scored, so appending a token always lowers the total.
double sequence_logprob(const NgramModel& model, const Sequence& s);

// -(total log2 probability) / (total tokens) over the test sequences.
double cross_entropy(const NgramModel& model, std::span<const Sequence> test);
double cross_entropy(std::span<const Sequence> test,
                     const std::function<double(const Sequence&)>& logprob);

}  // namespace helion
