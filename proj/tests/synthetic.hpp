#pragma once

// Small topic-structured corpora for training and pipeline tests.

#include <random>
#include <string>
#include <vector>

namespace synthetic {

struct TopicCorpus {
  std::vector<std::string> lines;
  std::vector<int> topics;
};

/// Each topic owns `words_per_topic` words; documents draw 75% of their tokens
/// from their topic and the rest from a shared pool of `shared_words`.
inline TopicCorpus topic_corpus(int n_docs, int n_topics, int words_per_topic, int shared_words,
                                int doc_len, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> topic_word(0, words_per_topic - 1);
  std::uniform_int_distribution<int> shared_word(0, shared_words - 1);
  std::bernoulli_distribution on_topic(0.75);
  TopicCorpus c;
  for (int d = 0; d < n_docs; ++d) {
    const int topic = d % n_topics;
    std::string line;
    for (int i = 0; i < doc_len; ++i) {
      if (i) line += ' ';
      if (on_topic(rng)) {
        line += "t" + std::to_string(topic) + "w" + std::to_string(topic_word(rng));
      } else {
        line += "s" + std::to_string(shared_word(rng));
      }
    }
    c.lines.push_back(std::move(line));
    c.topics.push_back(topic);
  }
  return c;
}

}  // namespace synthetic
