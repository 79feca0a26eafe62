#include "helion/ngram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "helion/error.hpp"

namespace helion {
namespace {

constexpr std::string_view kFormat = "ngram-kn/1";

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s) {
  double v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw ParseError("model file: bad number '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw ParseError("model file: bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = s.find(sep, start);
    out.push_back(s.substr(start, at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

void check_order(int order) {
  if (order < 1) throw InputError("n-gram order must be at least 1");
  if (order > kMaxOrder) {
    throw InputError("n-gram order above " + std::to_string(kMaxOrder) + " is not supported");
  }
}

}  // namespace

NgramKey NgramKey::of(std::span<const TokenId> tokens) {
  NgramKey k;
  k.len = static_cast<std::uint8_t>(tokens.size());
  std::copy(tokens.begin(), tokens.end(), k.ids.begin());
  return k;
}

NgramKey NgramKey::prefix() const noexcept {
  NgramKey k = *this;
  if (k.len > 0) k.ids[--k.len] = 0;
  return k;
}

NgramKey NgramKey::suffix() const noexcept {
  NgramKey k;
  if (len == 0) return k;
  k.len = static_cast<std::uint8_t>(len - 1);
  std::copy(ids.begin() + 1, ids.begin() + len, k.ids.begin());
  return k;
}

std::size_t NgramKeyHash::operator()(const NgramKey& k) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ k.len;
  for (std::uint8_t i = 0; i < k.len; ++i) {
    h ^= k.ids[i];
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

NgramModel::NgramModel(Vocabulary vocab, int order)
    : vocab_(std::move(vocab)),
      order_(order),
      grams_(static_cast<std::size_t>(order)),
      contexts_(static_cast<std::size_t>(order)),
      discounts_(static_cast<std::size_t>(order), 0.5) {}

NgramModel NgramModel::train(std::span<const Sequence> corpus, int order) {
  check_order(order);
  NgramModel m(Vocabulary::build(corpus), order);
  const auto n = static_cast<std::size_t>(order);
  std::vector<TokenId> padded;
  for (const auto& seq : corpus) {
    padded.assign(n - 1, m.bos_id());
    for (const auto& t : seq.tokens()) padded.push_back(m.vocab_.id(t.text()));
    padded.push_back(m.eos_id());
    for (std::size_t i = n - 1; i < padded.size(); ++i) {
      for (std::size_t k = 1; k <= n; ++k) {
        const auto gram = std::span<const TokenId>(padded).subspan(i + 1 - k, k);
        ++m.grams_[k - 1][NgramKey::of(gram)].raw;
      }
    }
  }
  m.derive_lower_orders();
  m.estimate_discounts();
  return m;
}

void NgramModel::derive_lower_orders() {
  const auto n = static_cast<std::size_t>(order_);
  for (auto& [key, c] : grams_[n - 1]) c.adjusted = c.raw;
  for (std::size_t k = 1; k < n; ++k) {
    for (auto& [key, c] : grams_[k - 1]) c.adjusted = 0;
    for (const auto& [key, c] : grams_[k]) {
      if (c.raw > 0) ++grams_[k - 1][key.suffix()].adjusted;
    }
  }
  for (std::size_t k = 1; k <= n; ++k) {
    auto& ctx = contexts_[k - 1];
    ctx.clear();
    for (const auto& [key, c] : grams_[k - 1]) {
      if (c.adjusted == 0) continue;
      auto& stats = ctx[key.prefix()];
      stats.total += c.adjusted;
      ++stats.types;
    }
  }
}

void NgramModel::estimate_discounts() {
  for (std::size_t k = 0; k < grams_.size(); ++k) {
    std::uint64_t n1 = 0, n2 = 0;
    for (const auto& [key, c] : grams_[k]) {
      if (c.adjusted == 1) ++n1;
      if (c.adjusted == 2) ++n2;
    }
    if (n1 == 0 || n2 == 0) {
      discounts_[k] = 0.5;
      continue;
    }
    const double d = static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2);
    discounts_[k] = std::clamp(d, 0.05, 0.95);
  }
}

TokenId NgramModel::clamp_id(TokenId id) const noexcept {
  return id > bos_id() ? unk_id() : id;
}

std::uint64_t NgramModel::count(std::span<const TokenId> gram) const {
  if (gram.empty() || gram.size() > grams_.size()) return 0;
  const auto& table = grams_[gram.size() - 1];
  const auto it = table.find(NgramKey::of(gram));
  return it == table.end() ? 0 : it->second.raw;
}

std::uint64_t NgramModel::adjusted_count(std::span<const TokenId> gram) const {
  if (gram.empty() || gram.size() > grams_.size()) return 0;
  const auto& table = grams_[gram.size() - 1];
  const auto it = table.find(NgramKey::of(gram));
  return it == table.end() ? 0 : it->second.adjusted;
}

double NgramModel::conditional(std::span<const TokenId> context, TokenId next) const {
  const auto n = static_cast<std::size_t>(order_);
  // Effective context of exactly n-1 ids, <s>-padded on the left.
  std::array<TokenId, kMaxOrder> ctx{};
  const std::size_t keep = std::min(context.size(), n - 1);
  const std::size_t pad = n - 1 - keep;
  for (std::size_t i = 0; i < pad; ++i) ctx[i] = bos_id();
  for (std::size_t i = 0; i < keep; ++i) ctx[pad + i] = clamp_id(context[context.size() - keep + i]);
  next = clamp_id(next);

  double p = 1.0 / static_cast<double>(outcome_count());
  if (next >= outcome_count()) return 0.0;  // <s> is never predicted

  NgramKey gram;
  for (std::size_t k = 1; k <= n; ++k) {
    // gram = last k-1 context ids followed by `next`
    gram.len = static_cast<std::uint8_t>(k);
    for (std::size_t i = 0; i + 1 < k; ++i) gram.ids[i] = ctx[n - k + i];
    gram.ids[k - 1] = next;
    const auto cit = contexts_[k - 1].find(gram.prefix());
    if (cit == contexts_[k - 1].end() || cit->second.total == 0) continue;
    const double total = static_cast<double>(cit->second.total);
    const double d = discounts_[k - 1];
    const auto git = grams_[k - 1].find(gram);
    const double a = git == grams_[k - 1].end() ? 0.0 : static_cast<double>(git->second.adjusted);
    p = std::max(a - d, 0.0) / total + d * static_cast<double>(cit->second.types) / total * p;
  }
  return p;
}

std::vector<double> NgramModel::distribution(std::span<const TokenId> context) const {
  std::vector<double> out(outcome_count());
  for (TokenId w = 0; w < out.size(); ++w) out[w] = conditional(context, w);
  return out;
}

std::vector<TokenId> NgramModel::encode(std::span<const EventToken> tokens) const {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(vocab_.id(t.text()));
  return out;
}

std::string_view NgramModel::name(TokenId id) const {
  if (id == eos_id()) return kEos;
  if (id == bos_id()) return kBos;
  return vocab_.token(id);
}

void NgramModel::save(std::ostream& out) const {
  out << "format\t" << kFormat << '\n';
  out << "order\t" << order_ << '\n';
  out << "vocab_size\t" << vocab_.size() << '\n';
  out << "eos\t" << eos_id() << '\n';
  out << "bos\t" << bos_id() << '\n';
  out << "discounts";
  for (double d : discounts_) out << '\t' << format_double(d);
  out << '\n';
  out << "\\vocab\n";
  for (TokenId i = 0; i < vocab_.size(); ++i) out << i << '\t' << vocab_.token(i) << '\n';
  out << "\\counts\n";
  for (std::size_t k = 0; k < grams_.size(); ++k) {
    std::vector<std::pair<NgramKey, std::uint64_t>> rows;
    rows.reserve(grams_[k].size());
    for (const auto& [key, c] : grams_[k]) {
      if (c.raw > 0) rows.emplace_back(key, c.raw);
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [key, raw] : rows) {
      out << k + 1 << '\t';
      if (key.len == 1) out << '-';
      for (std::uint8_t i = 0; i + 1 < key.len; ++i) out << (i ? "," : "") << key.ids[i];
      out << '\t' << key.ids[key.len - 1] << '\t' << raw << '\n';
    }
  }
  out << "\\end\n";
}

NgramModel NgramModel::load(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  const auto next_line = [&](std::string_view what) -> std::string& {
    if (!std::getline(in, line)) throw ParseError("model file: missing " + std::string(what));
    ++lineno;
    return line;
  };
  const auto header = [&](std::string_view key) {
    next_line(key);
    const auto fields = split(line, '\t');
    if (fields.size() < 2 || fields[0] != key) {
      throw ParseError("model file line " + std::to_string(lineno) + ": expected '" +
                       std::string(key) + "'");
    }
    return std::vector<std::string>(fields.begin() + 1, fields.end());
  };

  if (header("format").at(0) != kFormat) throw ParseError("model file: unsupported format");
  const auto order = static_cast<int>(parse_uint(header("order").at(0)));
  check_order(order);
  const auto vocab_size = parse_uint(header("vocab_size").at(0));
  const auto eos = parse_uint(header("eos").at(0));
  const auto bos = parse_uint(header("bos").at(0));
  if (eos != vocab_size || bos != vocab_size + 1) throw ParseError("model file: bad marker ids");
  const auto discount_fields = header("discounts");
  if (discount_fields.size() != static_cast<std::size_t>(order)) {
    throw ParseError("model file: expected one discount per order");
  }

  if (next_line("vocab block") != "\\vocab") throw ParseError("model file: expected \\vocab");
  std::vector<std::string> tokens;
  for (std::uint64_t i = 0; i < vocab_size; ++i) {
    const auto fields = split(next_line("vocab entry"), '\t');
    if (fields.size() != 2 || parse_uint(fields[0]) != i) {
      throw ParseError("model file line " + std::to_string(lineno) + ": bad vocab entry");
    }
    tokens.emplace_back(fields[1]);
  }
  NgramModel m(Vocabulary::from_sorted(std::move(tokens)), order);
  for (std::size_t k = 0; k < discount_fields.size(); ++k) {
    m.discounts_[k] = parse_double(discount_fields[k]);
    if (!(m.discounts_[k] >= 0.0 && m.discounts_[k] < 1.0)) {
      throw ParseError("model file: discounts must lie in [0, 1)");
    }
  }

  if (next_line("counts block") != "\\counts") throw ParseError("model file: expected \\counts");
  while (next_line("\\end") != "\\end") {
    const auto fields = split(line, '\t');
    if (fields.size() != 4) {
      throw ParseError("model file line " + std::to_string(lineno) + ": expected 4 fields");
    }
    const auto k = parse_uint(fields[0]);
    if (k < 1 || k > static_cast<std::uint64_t>(order)) {
      throw ParseError("model file line " + std::to_string(lineno) + ": bad order");
    }
    std::vector<TokenId> ids;
    if (fields[1] != "-") {
      for (auto piece : split(fields[1], ',')) ids.push_back(static_cast<TokenId>(parse_uint(piece)));
    }
    ids.push_back(static_cast<TokenId>(parse_uint(fields[2])));
    if (ids.size() != k) {
      throw ParseError("model file line " + std::to_string(lineno) + ": context length mismatch");
    }
    for (TokenId id : ids) {
      if (id > m.bos_id()) throw ParseError("model file line " + std::to_string(lineno) + ": bad token id");
    }
    m.grams_[k - 1][NgramKey::of(ids)].raw = parse_uint(fields[3]);
  }
  m.derive_lower_orders();
  return m;
}

bool operator==(const NgramModel& a, const NgramModel& b) {
  if (a.order_ != b.order_ || !(a.vocab_ == b.vocab_) || a.discounts_ != b.discounts_) return false;
  for (std::size_t k = 0; k < a.grams_.size(); ++k) {
    if (a.grams_[k].size() != b.grams_[k].size()) return false;
    for (const auto& [key, c] : a.grams_[k]) {
      const auto it = b.grams_[k].find(key);
      if (it == b.grams_[k].end() || it->second.raw != c.raw) return false;
    }
  }
  return true;
}

double prob(const NgramModel& model, std::span<const EventToken> history, const EventToken& next) {
  const auto ids = model.encode(history);
  return model.conditional(ids, model.vocabulary().id(next.text()));
}

double sequence_logprob(const NgramModel& model, const Sequence& s) {
  const auto n = static_cast<std::size_t>(model.order());
  std::vector<TokenId> padded(n - 1, model.bos_id());
  const auto ids = model.encode(s.tokens());
  padded.insert(padded.end(), ids.begin(), ids.end());
  double total = 0.0;
  for (std::size_t i = n - 1; i < padded.size(); ++i) {
    const auto context = std::span<const TokenId>(padded).subspan(i + 1 - n, n - 1);
    total += std::log2(model.conditional(context, padded[i]));
  }
  return total;
}

double cross_entropy(std::span<const Sequence> test,
                     const std::function<double(const Sequence&)>& logprob) {
  if (test.empty()) throw InputError("cross-entropy needs at least one test sequence");
  double total = 0.0;
  std::size_t tokens = 0;
  for (const auto& s : test) {
    total += logprob(s);
    tokens += s.size();
  }
  return -total / static_cast<double>(tokens);
}

double cross_entropy(const NgramModel& model, std::span<const Sequence> test) {
  return cross_entropy(test, [&](const Sequence& s) { return sequence_logprob(model, s); });
}

}  // namespace helion
