#pragma once

// Test-only fixtures and brute-force oracles. Nothing here calls into the
// featurizer or SVD code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sentirec/corpus_io.hpp"

namespace sentirec::testing {

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("sentirec-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Letters-only word list: prefix + two-letter suffix (aa, ab, ...).
inline std::vector<std::string> letter_words(const std::string& prefix, std::size_t count) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < count; ++i) {
    words.push_back(prefix + static_cast<char>('a' + i / 26) + static_cast<char>('a' + i % 26));
  }
  return words;
}

/// Reviews drawn from two disjoint class vocabularies. Documents alternate
/// positive, negative so any prefix is nearly balanced.
inline LabeledCorpus disjoint_vocab_corpus(std::size_t docs, const std::vector<std::string>& pos_vocab,
                                           const std::vector<std::string>& neg_vocab, std::uint64_t seed,
                                           std::size_t min_len = 6, std::size_t max_len = 14) {
  std::mt19937_64 rng(seed);
  LabeledCorpus corpus;
  for (std::size_t d = 0; d < docs; ++d) {
    const bool positive = d % 2 == 0;
    const auto& vocab = positive ? pos_vocab : neg_vocab;
    const std::size_t len = min_len + rng() % (max_len - min_len + 1);
    std::string text;
    for (std::size_t w = 0; w < len; ++w) {
      if (w > 0) text += ' ';
      text += vocab[rng() % vocab.size()];
    }
    char id[48];
    std::snprintf(id, sizeof id, "%s/doc%04zu.txt", positive ? "positive" : "negative", d);
    corpus.reviews.push_back(Review{id, text, positive ? Polarity::positive : Polarity::negative});
  }
  return corpus;
}

/// The 200-document, 50-words-per-class separable corpus.
inline LabeledCorpus separable_corpus(std::uint64_t seed = 0) {
  return disjoint_vocab_corpus(200, letter_words("good", 50), letter_words("bad", 50), seed);
}

/// Arabic reviews built from the synthetic review templates plus filler words,
/// so a model trained on it classifies generated ratings files.
inline LabeledCorpus template_corpus(std::size_t docs = 60, std::uint64_t seed = 0) {
  auto split_words = [](const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string w; in >> w;) out.push_back(w);
    return out;
  };
  auto pos = split_words(kPositiveTemplate), neg = split_words(kNegativeTemplate);
  for (const char* w : {"ممتاز", "رائعه", "مبدع", "مذهل"}) pos.push_back(w);
  for (const char* w : {"مخيب", "رديء", "ممله", "مزعج"}) neg.push_back(w);
  return disjoint_vocab_corpus(docs, pos, neg, seed, 4, 9);
}

inline void write_corpus(const LabeledCorpus& corpus, const std::filesystem::path& root) {
  std::filesystem::create_directories(root / "positive");
  std::filesystem::create_directories(root / "negative");
  for (const auto& r : corpus.reviews) write_text(root / r.doc_id, r.text);
}

// ---------------------------------------------------------------------------
// Brute-force TF-IDF oracle: nested loops over documents and terms.

struct OracleDoc {
  std::vector<std::string> tokens;
  int label = 1;
};

/// Class-summed frequency F(t, +1) and F(t, -1) by scanning every token of every document.
inline std::pair<std::size_t, std::size_t> oracle_class_freq(const std::vector<OracleDoc>& docs, const std::string& term) {
  std::size_t pos = 0, neg = 0;
  for (const auto& d : docs)
    for (const auto& t : d.tokens)
      if (t == term) (d.label > 0 ? pos : neg) += 1;
  return {pos, neg};
}

inline std::size_t oracle_df(const std::vector<OracleDoc>& docs, const std::string& term) {
  std::size_t df = 0;
  for (const auto& d : docs) {
    bool found = false;
    for (const auto& t : d.tokens) found = found || t == term;
    df += found ? 1 : 0;
  }
  return df;
}

/// Dense docs x terms TF-IDF: tf * ln(N / df), with tf and df counted from `train`.
inline std::vector<std::vector<double>> oracle_tfidf(const std::vector<OracleDoc>& train,
                                                     const std::vector<OracleDoc>& docs,
                                                     const std::vector<std::string>& terms) {
  std::vector<std::vector<double>> out(docs.size(), std::vector<double>(terms.size(), 0.0));
  const double n = static_cast<double>(train.size());
  for (std::size_t j = 0; j < docs.size(); ++j)
    for (std::size_t t = 0; t < terms.size(); ++t) {
      std::size_t tf = 0;
      for (const auto& tok : docs[j].tokens) tf += tok == terms[t] ? 1 : 0;
      const std::size_t df = oracle_df(train, terms[t]);
      if (tf > 0 && df > 0) out[j][t] = static_cast<double>(tf) * std::log(n / static_cast<double>(df));
    }
  return out;
}

/// Top-n terms of one class by brute-force ranking (frequency desc, then term asc).
inline std::vector<std::string> oracle_top_terms(const std::vector<OracleDoc>& docs, int label, std::size_t n) {
  std::vector<std::string> vocab;
  for (const auto& d : docs)
    for (const auto& t : d.tokens)
      if (std::find(vocab.begin(), vocab.end(), t) == vocab.end()) vocab.push_back(t);
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& term : vocab) {
    const auto [pos, neg] = oracle_class_freq(docs, term);
    const std::size_t f = label > 0 ? pos : neg;
    if (f > 0) scored.emplace_back(f, term);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, scored.size()); ++i) out.push_back(scored[i].second);
  return out;
}

}  // namespace sentirec::testing
