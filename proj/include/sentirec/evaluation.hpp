#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sentirec/corpus_io.hpp"
#include "sentirec/detail/numeric.hpp"
#include "sentirec/detail/random.hpp"
#include "sentirec/error.hpp"
#include "sentirec/ratings_matrix.hpp"
#include "sentirec/svd_cf.hpp"

namespace sentirec {

// ---------------------------------------------------------------------------
// Classification metrics. +1 is the positive class.

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts confusion(std::span<const Polarity> predicted, std::span<const Polarity> truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorKind::parameter, "prediction and truth lengths differ");
  if (predicted.empty()) throw Error(ErrorKind::parameter, "no predictions to score");
  ConfusionCounts c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == Polarity::positive;
    const bool t = truth[i] == Polarity::positive;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

namespace eval_detail {

inline double ratio(std::size_t num, std::size_t den, const char* metric) {
  if (den == 0) throw Error(ErrorKind::undefined_metric, std::string(metric) + " has a zero denominator");
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace eval_detail

inline double accuracy(const ConfusionCounts& c) { return eval_detail::ratio(c.tp + c.tn, c.total(), "accuracy"); }
inline double precision(const ConfusionCounts& c) { return eval_detail::ratio(c.tp, c.tp + c.fp, "precision"); }
inline double recall(const ConfusionCounts& c) { return eval_detail::ratio(c.tp, c.tp + c.fn, "recall"); }

inline double f1(const ConfusionCounts& c) {
  const double p = precision(c), r = recall(c);
  if (p + r == 0.0) throw Error(ErrorKind::undefined_metric, "f1 has a zero denominator");
  return 2.0 * p * r / (p + r);
}

struct MetricsReport {
  ConfusionCounts counts;
  // Undefined metrics are left empty.
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

inline MetricsReport metrics_report(const ConfusionCounts& c) {
  auto guarded = [&](double (*metric)(const ConfusionCounts&)) -> std::optional<double> {
    try {
      return metric(c);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::undefined_metric) throw;
      return std::nullopt;
    }
  };
  return MetricsReport{c, guarded(&accuracy), guarded(&precision), guarded(&recall), guarded(&f1)};
}

/// Mean absolute error over paired sequences.
inline double mae(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) throw Error(ErrorKind::parameter, "MAE inputs differ in length");
  if (actual.empty()) throw Error(ErrorKind::parameter, "MAE of zero pairs");
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) sum += std::abs(actual[i] - predicted[i]);
  return sum / static_cast<double>(actual.size());
}

/// Baseline that draws +1 with the training prior of +1, independently per call.
class StratifiedDummy {
 public:
  StratifiedDummy(std::span<const Polarity> train_labels, std::uint64_t seed = 0)
      : rng_(detail::make_engine(seed, detail::kStreamDummy)) {
    if (train_labels.empty()) throw Error(ErrorKind::empty_input, "dummy classifier needs training labels");
    const auto pos = std::count(train_labels.begin(), train_labels.end(), Polarity::positive);
    p_positive_ = static_cast<double>(pos) / static_cast<double>(train_labels.size());
  }

  double positive_prior() const noexcept { return p_positive_; }

  Polarity next() { return detail::uniform01(rng_) < p_positive_ ? Polarity::positive : Polarity::negative; }

  std::vector<Polarity> predict(std::size_t count) {
    std::vector<Polarity> out(count);
    for (auto& p : out) p = next();
    return out;
  }

 private:
  detail::Engine rng_;
  double p_positive_ = 0.0;
};

inline StratifiedDummy dummy_stratified(std::span<const Polarity> train_labels, std::uint64_t seed = 0) {
  return StratifiedDummy(train_labels, seed);
}

// ---------------------------------------------------------------------------
// Rating prediction evaluation.

struct HeldOutCell {
  std::size_t user = 0;
  std::size_t movie = 0;
  double value = 0.0;
};

struct HoldoutSplit {
  RatingsMatrix train;
  std::vector<HeldOutCell> hidden;  // row-major order
};

/// Hides round((1 - train_ratio) * observed) uniformly sampled cells.
///
/// A user left with no training cell gets one of their hidden cells back, and a
/// random training cell of a user with at least two is hidden instead, so the
/// hidden count stays exact and every row keeps a mean.
inline HoldoutSplit holdout_split_ratings(const RatingsMatrix& matrix, double train_ratio, std::uint64_t seed) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw Error(ErrorKind::parameter, "train ratio must lie in (0,1)");
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t u = 0; u < matrix.rows(); ++u)
    for (std::size_t i = 0; i < matrix.cols(); ++i)
      if (matrix.observed(u, i)) cells.emplace_back(u, i);
  if (cells.size() < 2) throw Error(ErrorKind::parameter, "holdout needs at least two observed cells");

  const auto n_hidden =
      static_cast<std::size_t>(detail::round_half_up((1.0 - train_ratio) * static_cast<double>(cells.size())));
  std::size_t active_users = 0;
  std::vector<std::size_t> per_user(matrix.rows(), 0);
  for (const auto& [u, i] : cells) active_users += per_user[u]++ == 0;
  if (cells.size() - n_hidden < active_users) {
    throw Error(ErrorKind::protocol, "cannot keep a training cell for each of " + std::to_string(active_users) +
                                         " users with only " + std::to_string(cells.size() - n_hidden) + " kept cells");
  }

  auto rng = detail::make_engine(seed, detail::kStreamHoldout);
  std::vector<std::size_t> idx(cells.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  detail::shuffle(idx, rng);
  std::vector<bool> hidden(cells.size(), false);
  for (std::size_t k = 0; k < n_hidden; ++k) hidden[idx[k]] = true;

  std::vector<std::size_t> kept(matrix.rows(), 0);
  for (std::size_t k = 0; k < cells.size(); ++k) kept[cells[k].first] += !hidden[k];

  for (std::size_t user = 0; user < matrix.rows(); ++user) {
    if (per_user[user] == 0 || kept[user] > 0) continue;
    std::vector<std::size_t> mine, donors;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (cells[k].first == user) mine.push_back(k);
      else if (!hidden[k] && kept[cells[k].first] >= 2) donors.push_back(k);
    }
    if (donors.empty()) throw Error(ErrorKind::protocol, "no training cell can be swapped into the holdout");
    const std::size_t restore = mine[detail::uniform_below(rng, mine.size())];
    const std::size_t donor = donors[detail::uniform_below(rng, donors.size())];
    hidden[restore] = false;
    hidden[donor] = true;
    ++kept[user];
    --kept[cells[donor].first];
  }

  HoldoutSplit split{matrix, {}};
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!hidden[k]) continue;
    const auto [u, i] = cells[k];
    split.hidden.push_back({u, i, *matrix.at(u, i)});
    split.train.clear(u, i);
  }
  return split;
}

/// Predicts the observed mean of a movie's column; empty columns use the global mean.
class ItemMeanBaseline {
 public:
  explicit ItemMeanBaseline(const RatingsMatrix& train) : means_(column_means(train)) {}

  double predict(std::size_t /*user*/, std::size_t movie) const {
    if (movie >= means_.size()) throw Error(ErrorKind::parameter, "movie index outside the training matrix");
    return means_[movie];
  }

 private:
  std::vector<double> means_;
};

inline ItemMeanBaseline item_mean_baseline(const RatingsMatrix& train) { return ItemMeanBaseline(train); }

struct MaeSweepRow {
  double ratio = 0.0;
  double model_mae = 0.0;
  double baseline_mae = 0.0;
};

struct MaeSweepReport {
  std::vector<MaeSweepRow> rows;
  std::uint64_t seed = 0;
  std::size_t rank = 0;
};

inline std::vector<double> default_sweep_ratios() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }

/// For each train ratio: hold out cells, fit SVD-CF and the item-mean baseline on
/// the remainder, and score both by MAE on the raw values of the hidden cells.
/// Each ratio's split is seeded from (seed, ratio index).
inline MaeSweepReport cf_mae_sweep(const RatingsMatrix& matrix, std::span<const double> ratios, std::size_t k,
                                   std::uint64_t seed) {
  for (std::size_t r = 0; r < ratios.size(); ++r) {
    if (!(ratios[r] > 0.0 && ratios[r] < 1.0)) throw Error(ErrorKind::parameter, "sweep ratios must lie in (0,1)");
    if (r > 0 && !(ratios[r] > ratios[r - 1])) throw Error(ErrorKind::parameter, "sweep ratios must be increasing");
  }
  MaeSweepReport report{{}, seed, k};
  for (std::size_t r = 0; r < ratios.size(); ++r) {
    const auto split = holdout_split_ratings(matrix, ratios[r], detail::splitmix64(seed) ^ detail::splitmix64(r + 1));
    const auto model = fit(split.train, k);
    const auto baseline = item_mean_baseline(split.train);
    std::vector<double> truth, predicted, base;
    for (const auto& cell : split.hidden) {
      truth.push_back(cell.value);
      predicted.push_back(predict_rating(model, cell.user, cell.movie));
      base.push_back(baseline.predict(cell.user, cell.movie));
    }
    report.rows.push_back({ratios[r], mae(truth, predicted), mae(truth, base)});
  }
  return report;
}

inline void write_sweep_csv(std::ostream& out, const MaeSweepReport& report) {
  out << "ratio,model_mae,baseline_mae\n";
  for (const auto& row : report.rows) {
    out << detail::fixed(row.ratio, 6) << ',' << detail::fixed(row.model_mae, 6) << ','
        << detail::fixed(row.baseline_mae, 6) << '\n';
  }
}

}  // namespace sentirec
