#include "matrep/corpus.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace matrep {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (char ch : line) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      flush();
      out.emplace_back(1, ch);
    } else {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
  }
  flush();
  return out;
}

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>> docs,
                             std::int64_t min_count) {
  if (min_count < 1) throw std::invalid_argument("min_count must be positive");
  std::unordered_map<std::string, std::size_t> first_seen;
  std::vector<std::string> order;
  std::vector<std::int64_t> raw_counts;
  for (const auto& doc : docs) {
    for (const auto& tok : doc) {
      auto [it, inserted] = first_seen.try_emplace(tok, order.size());
      if (inserted) {
        order.push_back(tok);
        raw_counts.push_back(0);
      }
      ++raw_counts[it->second];
    }
  }

  Vocabulary v;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (raw_counts[i] < min_count) continue;
    v.ids_.emplace(order[i], static_cast<WordId>(v.tokens_.size()));
    v.tokens_.push_back(order[i]);
    v.counts_.push_back(raw_counts[i]);
    v.total_tokens_ += raw_counts[i];
  }
  if (v.tokens_.empty()) {
    throw std::invalid_argument("vocabulary is empty after min_count filtering");
  }
  return v;
}

std::optional<WordId> Vocabulary::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

Corpus build_corpus(std::span<const std::string> lines, std::int64_t min_count) {
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(lines.size());
  for (const auto& line : lines) tokenized.push_back(tokenize(line));

  Corpus corpus{Vocabulary::build(tokenized, min_count), {}};
  corpus.docs.reserve(tokenized.size());
  for (std::size_t d = 0; d < tokenized.size(); ++d) {
    Document doc{d, {}};
    for (const auto& tok : tokenized[d]) {
      if (auto id = corpus.vocab.find(tok)) doc.token_ids.push_back(*id);
    }
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, std::int64_t min_count) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (lines.empty()) throw std::invalid_argument("corpus " + path.string() + " is empty");
  return build_corpus(lines, min_count);
}

double keep_probability(std::int64_t count, std::int64_t total, double threshold) {
  double ratio = threshold / (static_cast<double>(count) / static_cast<double>(total));
  return std::min(1.0, std::sqrt(ratio) + ratio);
}

bool subsample_keep(std::int64_t count, std::int64_t total, double threshold, Rng& rng) {
  double p = keep_probability(count, total, threshold);
  if (p >= 1.0) return true;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

std::vector<WordId> subsample_document(std::span<const WordId> tokens, const Vocabulary& vocab,
                                       double threshold, Rng& rng) {
  std::vector<WordId> kept;
  kept.reserve(tokens.size());
  for (WordId w : tokens) {
    if (threshold <= 0.0 || subsample_keep(vocab.count(w), vocab.total_tokens(), threshold, rng)) {
      kept.push_back(w);
    }
  }
  return kept;
}

std::vector<std::pair<WordId, WordId>> iter_windows(const Document& doc, int max_window,
                                                    Rng& rng) {
  std::vector<std::pair<WordId, WordId>> pairs;
  for_each_window_pair(doc.token_ids, max_window, rng,
                       [&](WordId c, WordId o) { pairs.emplace_back(c, o); });
  return pairs;
}

NegativeTable::NegativeTable(std::span<const std::int64_t> counts, double power) {
  const std::size_t n = counts.size();
  if (n == 0) throw std::invalid_argument("negative table needs a non-empty vocabulary");
  probability_.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    probability_[i] = std::pow(static_cast<double>(counts[i]), power);
    total += probability_[i];
  }
  for (double& p : probability_) p /= total;

  accept_.assign(n, 1.0);
  alias_.resize(n);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    alias_[i] = static_cast<WordId>(i);
    scaled[i] = probability_[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    std::size_t s = small.back();
    small.pop_back();
    std::size_t l = large.back();
    accept_[s] = scaled[s];
    alias_[s] = static_cast<WordId>(l);
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers on either list are 1 up to rounding.
  for (std::size_t i : small) accept_[i] = 1.0;
  for (std::size_t i : large) accept_[i] = 1.0;
}

std::vector<double> NegativeTable::realized_distribution() const {
  const double n = static_cast<double>(accept_.size());
  std::vector<double> p(accept_.size(), 0.0);
  for (std::size_t i = 0; i < accept_.size(); ++i) {
    p[i] += accept_[i] / n;
    p[static_cast<std::size_t>(alias_[i])] += (1.0 - accept_[i]) / n;
  }
  return p;
}

WordId NegativeTable::sample(Rng& rng) const {
  std::uniform_int_distribution<std::size_t> column(0, accept_.size() - 1);
  std::size_t i = column(rng);
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return u < accept_[i] ? static_cast<WordId>(i) : alias_[i];
}

WordId sample_negative_excluding(const NegativeTable& table, WordId center, Rng& rng,
                                 int max_retries) {
  WordId w = table.sample(rng);
  for (int i = 0; i < max_retries && w == center; ++i) w = table.sample(rng);
  return w;
}

}  // namespace matrep
