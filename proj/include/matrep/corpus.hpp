#pragma once

// Corpus ingestion: tokenization, vocabulary, frequent-word subsampling,
// dynamic context windows and the unigram^0.75 negative sampler.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace matrep {

using Rng = std::mt19937_64;
using WordId = std::int32_t;

/// Lowercases ASCII, isolates ASCII punctuation as single-character tokens and
/// splits on whitespace. Bytes >= 0x80 are kept inside tokens untouched.
std::vector<std::string> tokenize(std::string_view line);

class Vocabulary {
 public:
  /// Tokens occurring at least min_count times, ids in order of first appearance.
  /// Throws std::invalid_argument when nothing survives the filter.
  static Vocabulary build(std::span<const std::vector<std::string>> docs, std::int64_t min_count);

  std::size_t size() const { return tokens_.size(); }
  std::optional<WordId> find(std::string_view token) const;
  const std::string& token(WordId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::int64_t count(WordId id) const { return counts_.at(static_cast<std::size_t>(id)); }
  std::span<const std::int64_t> counts() const { return counts_; }
  std::span<const std::string> tokens() const { return tokens_; }
  /// Corpus length counting only in-vocabulary tokens.
  std::int64_t total_tokens() const { return total_tokens_; }

 private:
  std::unordered_map<std::string, WordId> ids_;
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> counts_;
  std::int64_t total_tokens_ = 0;
};

struct Document {
  std::size_t doc_id = 0;
  std::vector<WordId> token_ids;
};

/// One document per input line; doc_id is the zero-based line number.
struct Corpus {
  Vocabulary vocab;
  std::vector<Document> docs;
};

Corpus build_corpus(std::span<const std::string> lines, std::int64_t min_count);
Corpus load_corpus(const std::filesystem::path& path, std::int64_t min_count);

/// min(1, sqrt(t/f) + t/f) with f = count / total.
double keep_probability(std::int64_t count, std::int64_t total, double threshold);
bool subsample_keep(std::int64_t count, std::int64_t total, double threshold, Rng& rng);

/// Calls emit(center, context) for every position within `reach` of `center`
/// (excluding itself), clipped at the sequence ends.
template <typename Emit>
void for_each_context(std::span<const WordId> tokens, std::size_t center, std::size_t reach,
                      Emit&& emit) {
  const std::size_t lo = center >= reach ? center - reach : 0;
  const std::size_t hi = std::min(tokens.size() - 1, center + reach);
  for (std::size_t o = lo; o <= hi; ++o) {
    if (o != center) emit(tokens[center], tokens[o]);
  }
}

/// Draws the effective window b ~ U{1..max_window} once per center position
/// and emits every (center, context) pair within b.
template <typename Emit>
void for_each_window_pair(std::span<const WordId> tokens, int max_window, Rng& rng, Emit&& emit) {
  if (tokens.size() < 2) return;
  std::uniform_int_distribution<int> window(1, max_window);
  for (std::size_t c = 0; c < tokens.size(); ++c) {
    for_each_context(tokens, c, static_cast<std::size_t>(window(rng)), emit);
  }
}

/// Tokens surviving frequent-word subsampling, in their original order.
std::vector<WordId> subsample_document(std::span<const WordId> tokens, const Vocabulary& vocab,
                                       double threshold, Rng& rng);

std::vector<std::pair<WordId, WordId>> iter_windows(const Document& doc, int max_window, Rng& rng);

/// Samples word ids with probability proportional to count^power, via Vose's
/// alias method. Immutable after construction and safe to share across threads.
class NegativeTable {
 public:
  explicit NegativeTable(std::span<const std::int64_t> counts, double power = 0.75);
  explicit NegativeTable(const Vocabulary& vocab, double power = 0.75)
      : NegativeTable(vocab.counts(), power) {}

  WordId sample(Rng& rng) const;
  double probability(WordId id) const { return probability_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return probability_.size(); }
  /// Exact draw distribution implied by the alias tables.
  std::vector<double> realized_distribution() const;

 private:
  std::vector<double> probability_;
  std::vector<double> accept_;
  std::vector<WordId> alias_;
};

inline WordId sample_negative(const NegativeTable& table, Rng& rng) { return table.sample(rng); }

/// Negative for a given center word: resampled while equal to it, at most
/// max_retries times, after which the last draw is accepted.
WordId sample_negative_excluding(const NegativeTable& table, WordId center, Rng& rng,
                                 int max_retries = 100);

}  // namespace matrep
