#pragma once

// Class-conditional term counting, per-class top-N feature selection and
// TF-IDF weighting: weight(t, d) = tf(t, d) * ln(N / df(t)), where tf is the
// raw in-document count and N, df come from the training documents.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sentirec/corpus_io.hpp"
#include "sentirec/error.hpp"
#include "sentirec/textprep.hpp"

namespace sentirec {

struct SparseEntry {
  std::size_t index = 0;
  double value = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sparse vector with strictly increasing indices.
using SparseVector = std::vector<SparseEntry>;

struct TermCounts {
  std::size_t freq_pos = 0;  // occurrences in +1 documents
  std::size_t freq_neg = 0;  // occurrences in -1 documents
  std::size_t df = 0;        // documents containing the term

  /// Class-summed term frequency.
  std::size_t total() const noexcept { return freq_pos + freq_neg; }

  friend bool operator==(const TermCounts&, const TermCounts&) = default;
};

struct TermStats {
  std::map<std::string, TermCounts> per_term;
  std::size_t num_docs = 0;
};

struct LabeledTokens {
  TokenSequence tokens;
  Polarity label = Polarity::positive;
};

struct DocumentTokens {
  std::string doc_id;
  TokenSequence tokens;
  std::optional<Polarity> label;
};

class FeatureSet {
 public:
  FeatureSet() = default;

  /// `terms` must be unique; idf is aligned with terms.
  FeatureSet(std::vector<std::string> terms, std::vector<double> idf, std::size_t num_train_docs)
      : terms_(std::move(terms)), idf_(std::move(idf)), num_train_docs_(num_train_docs) {
    if (terms_.size() != idf_.size()) throw Error(ErrorKind::dimension_mismatch, "terms and idf differ in length");
    index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (!index_.emplace(terms_[i], i).second) throw Error(ErrorKind::validation, "duplicate feature term " + terms_[i]);
    }
  }

  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  std::size_t num_train_docs() const noexcept { return num_train_docs_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  std::optional<std::size_t> index_of(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::size_t num_train_docs_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

struct DocTermMatrix {
  std::vector<std::string> doc_ids;
  std::vector<SparseVector> rows;
  std::vector<std::optional<Polarity>> labels;
  std::size_t num_features = 0;

  std::size_t num_rows() const noexcept { return rows.size(); }
};

inline TermStats count_terms(const std::vector<LabeledTokens>& docs) {
  if (docs.empty()) throw Error(ErrorKind::empty_input, "cannot count terms of an empty corpus");
  TermStats stats;
  stats.num_docs = docs.size();
  for (const auto& doc : docs) {
    std::map<std::string, std::size_t> local;
    for (const auto& t : doc.tokens) ++local[t];
    for (const auto& [term, count] : local) {
      auto& c = stats.per_term[term];
      (doc.label == Polarity::positive ? c.freq_pos : c.freq_neg) += count;
      ++c.df;
    }
  }
  return stats;
}

struct FeatureSelection {
  FeatureSet features;
  std::size_t selected_positive = 0;  // terms ranked in the positive top list
  std::size_t selected_negative = 0;
};

/// Union of the `per_class_n` most frequent terms of each class, ranked by raw
/// class frequency with lexicographic tie-breaking. Terms with zero frequency in
/// a class never rank for it. Features are indexed in lexicographic order.
inline FeatureSelection select_features_detailed(const TermStats& stats, std::size_t per_class_n) {
  if (per_class_n < 1) throw Error(ErrorKind::parameter, "features per class must be >= 1");

  auto top = [&](auto freq) {
    std::vector<const std::pair<const std::string, TermCounts>*> ranked;
    for (const auto& entry : stats.per_term)
      if (freq(entry.second) > 0) ranked.push_back(&entry);
    const std::size_t take = std::min(per_class_n, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end(),
                      [&](const auto* a, const auto* b) {
                        if (freq(a->second) != freq(b->second)) return freq(a->second) > freq(b->second);
                        return a->first < b->first;
                      });
    ranked.resize(take);
    return ranked;
  };

  const auto pos = top([](const TermCounts& c) { return c.freq_pos; });
  const auto neg = top([](const TermCounts& c) { return c.freq_neg; });

  std::map<std::string, double> chosen;
  const auto n_docs = static_cast<double>(stats.num_docs);
  for (const auto* list : {&pos, &neg})
    for (const auto* entry : *list) chosen.emplace(entry->first, std::log(n_docs / static_cast<double>(entry->second.df)));

  std::vector<std::string> terms;
  std::vector<double> idf;
  terms.reserve(chosen.size());
  idf.reserve(chosen.size());
  for (auto& [term, value] : chosen) {
    terms.push_back(term);
    idf.push_back(value);
  }
  return {FeatureSet(std::move(terms), std::move(idf), stats.num_docs), pos.size(), neg.size()};
}

inline FeatureSet select_features(const TermStats& stats, std::size_t per_class_n) {
  return select_features_detailed(stats, per_class_n).features;
}

/// TF-IDF vector of one document against training statistics. Out-of-vocabulary
/// terms are ignored and zero weights (df == N) are not stored.
inline SparseVector transform(const TokenSequence& tokens, const FeatureSet& features) {
  std::map<std::size_t, std::size_t> tf;
  for (const auto& t : tokens)
    if (auto idx = features.index_of(t)) ++tf[*idx];
  SparseVector out;
  out.reserve(tf.size());
  for (const auto& [idx, count] : tf) {
    const double w = static_cast<double>(count) * features.idf()[idx];
    if (w > 0.0) out.push_back({idx, w});
  }
  return out;
}

inline DocTermMatrix build_matrix(const std::vector<DocumentTokens>& docs, const FeatureSet& features) {
  if (features.empty()) throw Error(ErrorKind::parameter, "feature set is empty");
  DocTermMatrix matrix;
  matrix.num_features = features.size();
  matrix.doc_ids.reserve(docs.size());
  matrix.rows.reserve(docs.size());
  matrix.labels.reserve(docs.size());
  for (const auto& doc : docs) {
    matrix.doc_ids.push_back(doc.doc_id);
    matrix.rows.push_back(transform(doc.tokens, features));
    matrix.labels.push_back(doc.label);
  }
  return matrix;
}

/// Preprocesses every review of a labeled corpus.
inline std::vector<DocumentTokens> tokenize_corpus(const LabeledCorpus& corpus, const Stoplist& stoplist) {
  std::vector<DocumentTokens> docs;
  docs.reserve(corpus.size());
  for (const auto& r : corpus.reviews) docs.push_back({r.doc_id, preprocess(r.text, stoplist), r.label});
  return docs;
}

inline std::vector<LabeledTokens> labeled_tokens(const std::vector<DocumentTokens>& docs) {
  std::vector<LabeledTokens> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    if (!d.label) throw Error(ErrorKind::validation, "document " + d.doc_id + " has no label");
    out.push_back({d.tokens, *d.label});
  }
  return out;
}

}  // namespace sentirec
