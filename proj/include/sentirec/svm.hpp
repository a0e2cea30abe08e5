#pragma once

// Linear soft-margin SVM over sparse TF-IDF rows.
//
// Training minimizes the primal objective
//
//     J(w, b) = (lambda / 2) ||w||^2 + (1/n) sum_i max(0, 1 - y_i (w . x_i + b))
//
// through its dual, a box- and equality-constrained QP with C = 1 / (lambda n),
// solved by sequential minimal optimization with second-order working-set
// selection. The weight vector is kept explicitly, so the kernel is linear only.
// The bias is not regularized.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sentirec/corpus_io.hpp"
#include "sentirec/detail/numeric.hpp"
#include "sentirec/detail/random.hpp"
#include "sentirec/error.hpp"
#include "sentirec/featurizer.hpp"

namespace sentirec {

struct SvmConfig {
  double regularization = 1e-4;  // lambda
  int max_epochs = 200;
  double tolerance = 1e-6;  // on the primal-dual gap of J
  std::uint64_t seed = 0;

  void validate() const {
    if (!(regularization > 0.0) || !std::isfinite(regularization)) {
      throw Error(ErrorKind::parameter, "regularization must be positive");
    }
    if (max_epochs < 1) throw Error(ErrorKind::parameter, "max_epochs must be >= 1");
    if (!(tolerance > 0.0)) throw Error(ErrorKind::parameter, "tolerance must be positive");
  }
};

/// Hyperplane found by the solver, independent of any vocabulary.
struct LinearSolution {
  std::vector<double> weights;
  double bias = 0.0;
  double objective = 0.0;
  /// Best objective seen after each epoch; non-increasing.
  std::vector<double> objective_trace;
  int epochs = 0;
  bool converged = false;
};

struct SvmModel {
  std::vector<double> weights;
  double bias = 0.0;
  FeatureSet features;
  SvmConfig config;
  /// Absent for models read back from a model file, which does not store it.
  std::optional<double> training_objective;
  std::vector<double> objective_trace;
};

inline double dot(const std::vector<double>& dense, const SparseVector& x) {
  double s = 0.0;
  for (const auto& e : x) s += dense[e.index] * e.value;
  return s;
}

inline double sparse_dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->index < ib->index) {
      ++ia;
    } else if (ib->index < ia->index) {
      ++ib;
    } else {
      s += ia->value * ib->value;
      ++ia, ++ib;
    }
  }
  return s;
}

inline double hinge_objective(std::span<const SparseVector> rows, std::span<const Polarity> labels,
                              const std::vector<double>& w, double b, double lambda) {
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double margin = as_int(labels[i]) * (dot(w, rows[i]) + b);
    loss += std::max(0.0, 1.0 - margin);
  }
  double norm2 = 0.0;
  for (double v : w) norm2 += v * v;
  return 0.5 * lambda * norm2 + loss / static_cast<double>(rows.size());
}

struct Subgradient {
  std::vector<double> weights;
  double bias = 0.0;
};

/// Subgradient of hinge_objective; examples exactly on the margin contribute nothing.
inline Subgradient hinge_subgradient(std::span<const SparseVector> rows, std::span<const Polarity> labels,
                                     const std::vector<double>& w, double b, double lambda) {
  Subgradient g{std::vector<double>(w.size()), 0.0};
  for (std::size_t j = 0; j < w.size(); ++j) g.weights[j] = lambda * w[j];
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double y = as_int(labels[i]);
    if (y * (dot(w, rows[i]) + b) < 1.0) {
      for (const auto& e : rows[i]) g.weights[e.index] -= inv_n * y * e.value;
      g.bias -= inv_n * y;
    }
  }
  return g;
}

namespace svm_detail {

class GramSource {
 public:
  GramSource(std::span<const SparseVector> rows, std::size_t cache_limit) : rows_(rows) {
    const std::size_t n = rows.size();
    if (n <= cache_limit) {
      cache_.resize(n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) cache_[i * n + j] = cache_[j * n + i] = sparse_dot(rows[i], rows[j]);
    }
  }

  /// Column i of the Gram matrix; valid until the next call.
  std::span<const double> column(std::size_t i, std::vector<double>& scratch) {
    const std::size_t n = rows_.size();
    if (!cache_.empty()) return {cache_.data() + i * n, n};
    scratch.resize(n);
    for (std::size_t t = 0; t < n; ++t) scratch[t] = sparse_dot(rows_[i], rows_[t]);
    return scratch;
  }

 private:
  std::span<const SparseVector> rows_;
  std::vector<double> cache_;
};

}  // namespace svm_detail

/// Trains a linear SVM on sparse rows of dimension `dim`.
inline LinearSolution train_linear_svm(std::span<const SparseVector> rows, std::span<const Polarity> labels,
                                       std::size_t dim, const SvmConfig& config) {
  config.validate();
  const std::size_t n = rows.size();
  if (labels.size() != n) throw Error(ErrorKind::dimension_mismatch, "row and label counts differ");
  const bool has_pos = std::find(labels.begin(), labels.end(), Polarity::positive) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), Polarity::negative) != labels.end();
  if (!has_pos || !has_neg) throw Error(ErrorKind::validation, "training data must contain both polarity classes");
  for (const auto& row : rows)
    for (const auto& e : row)
      if (e.index >= dim) throw Error(ErrorKind::dimension_mismatch, "feature index out of range");

  const double lambda = config.regularization;
  const double C = 1.0 / (lambda * static_cast<double>(n));
  constexpr double kTau = 1e-12;
  constexpr double kViolationFloor = 1e-12;

  // Visiting order decides working-set ties; it is the only use of the seed.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto rng = detail::make_engine(config.seed, detail::kStreamSvm);
  detail::shuffle(order, rng);

  std::vector<double> y(n), alpha(n, 0.0), grad(n, -1.0), qd(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = as_int(labels[i]);
    qd[i] = sparse_dot(rows[i], rows[i]);
  }
  std::vector<double> w(dim, 0.0);
  svm_detail::GramSource gram(rows, 3000);
  std::vector<double> scratch_i, scratch_j;

  auto is_upper = [&](std::size_t t) { return alpha[t] >= C; };
  auto is_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  auto bias_from_kkt = [&]() {
    double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
    std::size_t free = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double yg = y[t] * grad[t];
      if (is_upper(t)) {
        if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (is_lower(t)) {
        if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++free;
        sum_free += yg;
      }
    }
    const double rho = free > 0 ? sum_free / static_cast<double>(free) : 0.5 * (ub + lb);
    return -rho;
  };

  // Dual value in J's scaling: lambda * (sum alpha - ||w||^2 / 2).
  auto scaled_dual = [&]() {
    double sa = 0.0, norm2 = 0.0;
    for (double a : alpha) sa += a;
    for (double v : w) norm2 += v * v;
    return lambda * (sa - 0.5 * norm2);
  };

  LinearSolution best;
  best.objective = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    bool optimal = false;
    for (std::size_t step = 0; step < std::max<std::size_t>(n, 1); ++step) {
      // First index: maximal violation among the "up" set.
      double gmax = -std::numeric_limits<double>::infinity();
      std::size_t i = n;
      for (std::size_t t : order) {
        if ((y[t] > 0 && !is_upper(t)) || (y[t] < 0 && !is_lower(t))) {
          if (-y[t] * grad[t] > gmax) gmax = -y[t] * grad[t], i = t;
        }
      }
      if (i == n) {
        optimal = true;
        break;
      }
      const auto ki = gram.column(i, scratch_i);
      double gmin = std::numeric_limits<double>::infinity();
      double best_gain = std::numeric_limits<double>::infinity();
      std::size_t j = n;
      for (std::size_t t : order) {
        if ((y[t] > 0 && !is_lower(t)) || (y[t] < 0 && !is_upper(t))) {
          const double v = -y[t] * grad[t];
          gmin = std::min(gmin, v);
          const double diff = gmax - v;
          if (diff > 0.0) {
            double quad = qd[i] + qd[t] - 2.0 * ki[t];
            if (quad <= 0.0) quad = kTau;
            const double gain = -(diff * diff) / quad;
            if (gain < best_gain) best_gain = gain, j = t;
          }
        }
      }
      if (j == n || gmax - gmin < kViolationFloor) {
        optimal = true;
        break;
      }
      const auto kj = gram.column(j, scratch_j);

      // Two-variable subproblem, clipped to the box [0, C].
      const double old_i = alpha[i], old_j = alpha[j];
      const double qij = y[i] * y[j] * ki[j];
      if (y[i] != y[j]) {
        double quad = qd[i] + qd[j] + 2.0 * qij;
        if (quad <= 0.0) quad = kTau;
        const double delta = (-grad[i] - grad[j]) / quad;
        const double diff = alpha[i] - alpha[j];
        alpha[i] += delta;
        alpha[j] += delta;
        if (diff > 0) {
          if (alpha[j] < 0) alpha[j] = 0, alpha[i] = diff;
        } else {
          if (alpha[i] < 0) alpha[i] = 0, alpha[j] = -diff;
        }
        if (diff > 0) {
          if (alpha[i] > C) alpha[i] = C, alpha[j] = C - diff;
        } else {
          if (alpha[j] > C) alpha[j] = C, alpha[i] = C + diff;
        }
      } else {
        double quad = qd[i] + qd[j] - 2.0 * qij;
        if (quad <= 0.0) quad = kTau;
        const double delta = (grad[i] - grad[j]) / quad;
        const double sum = alpha[i] + alpha[j];
        alpha[i] -= delta;
        alpha[j] += delta;
        if (sum > C) {
          if (alpha[i] > C) alpha[i] = C, alpha[j] = sum - C;
        } else {
          if (alpha[j] < 0) alpha[j] = 0, alpha[i] = sum;
        }
        if (sum > C) {
          if (alpha[j] > C) alpha[j] = C, alpha[i] = sum - C;
        } else {
          if (alpha[i] < 0) alpha[i] = 0, alpha[j] = sum;
        }
      }

      const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
      for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
      for (const auto& e : rows[i]) w[e.index] += di * y[i] * e.value;
      for (const auto& e : rows[j]) w[e.index] += dj * y[j] * e.value;
    }

    for (double v : w) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::numerical_failure, "non-finite weight in epoch " + std::to_string(epoch));
      }
    }
    const double b = bias_from_kkt();
    const double primal = hinge_objective(rows, labels, w, b, lambda);
    if (!std::isfinite(primal)) {
      throw Error(ErrorKind::numerical_failure, "non-finite objective in epoch " + std::to_string(epoch));
    }
    if (primal < best.objective) {
      best.objective = primal;
      best.weights = w;
      best.bias = b;
    }
    best.objective_trace.push_back(best.objective);
    best.epochs = epoch;
    if (optimal || primal - scaled_dual() <= config.tolerance) {
      best.converged = true;
      break;
    }
  }
  return best;
}

inline SvmModel train_svm(const DocTermMatrix& matrix, const FeatureSet& features, const SvmConfig& config) {
  if (matrix.num_features != features.size()) {
    throw Error(ErrorKind::dimension_mismatch, "matrix width does not match the feature set");
  }
  std::vector<Polarity> labels;
  labels.reserve(matrix.num_rows());
  for (std::size_t r = 0; r < matrix.num_rows(); ++r) {
    if (!matrix.labels[r]) throw Error(ErrorKind::validation, "unlabeled training row " + matrix.doc_ids[r]);
    labels.push_back(*matrix.labels[r]);
  }
  auto solution = train_linear_svm(matrix.rows, labels, features.size(), config);
  return SvmModel{std::move(solution.weights), solution.bias, features, config, solution.objective,
                  std::move(solution.objective_trace)};
}

inline double decision_value(const SvmModel& model, const SparseVector& x) {
  double s = model.bias;
  for (const auto& e : x) {
    if (e.index >= model.weights.size()) {
      throw Error(ErrorKind::dimension_mismatch, "feature index " + std::to_string(e.index) + " exceeds model width " +
                                                     std::to_string(model.weights.size()));
    }
    s += model.weights[e.index] * e.value;
  }
  return s;
}

/// Sign of the decision value; exactly zero counts as positive.
inline Polarity predict(const SvmModel& model, const SparseVector& x) {
  return decision_value(model, x) >= 0.0 ? Polarity::positive : Polarity::negative;
}

inline constexpr const char* kModelMagic = "sentirec-svm v1";

inline void write_model(std::ostream& out, const SvmModel& model) {
  out << kModelMagic << '\n';
  out << "bias " << detail::exact_decimal(model.bias) << '\n';
  out << "lambda " << detail::exact_decimal(model.config.regularization) << '\n';
  out << "ndocs " << model.features.num_train_docs() << '\n';
  const auto& terms = model.features.terms();
  const auto& idf = model.features.idf();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    out << terms[i] << '\t' << detail::exact_decimal(model.weights[i]) << '\t' << detail::exact_decimal(idf[i]) << '\n';
  }
}

inline void save_model(const SvmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::configuration, "cannot write model file " + path.string());
  write_model(out, model);
  if (!out) throw Error(ErrorKind::configuration, "failed writing model file " + path.string());
}

inline SvmModel read_model(std::istream& in) {
  std::string content{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  auto fail = [](std::size_t line_no, const std::string& what) {
    return Error(ErrorKind::format, "model line " + std::to_string(line_no) + ": " + what);
  };

  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    const auto nl = content.find('\n', start);
    if (nl == std::string::npos) throw fail(lines.size() + 1, "truncated line (no terminating newline)");
    lines.push_back(content.substr(start, nl - start));
    start = nl + 1;
  }
  if (lines.empty()) throw fail(1, "empty model file");
  if (lines[0] != kModelMagic) throw fail(1, "expected '" + std::string(kModelMagic) + "'");
  if (lines.size() < 5) throw fail(lines.size() + 1, "truncated model (header or features missing)");

  auto keyed = [&](std::size_t idx, std::string_view key) {
    const std::string& line = lines[idx];
    if (!line.starts_with(key) || line.size() <= key.size() || line[key.size()] != ' ') {
      throw fail(idx + 1, "expected '" + std::string(key) + " <value>'");
    }
    return std::string_view(line).substr(key.size() + 1);
  };
  const auto bias = detail::parse_double(keyed(1, "bias"));
  if (!bias) throw fail(2, "bad bias value");
  const auto lambda = detail::parse_double(keyed(2, "lambda"));
  if (!lambda || !(*lambda > 0.0)) throw fail(3, "bad lambda value");
  const auto ndocs = detail::parse_int<std::size_t>(keyed(3, "ndocs"));
  if (!ndocs) throw fail(4, "bad ndocs value");

  std::vector<std::string> terms;
  std::vector<double> weights, idf;
  for (std::size_t idx = 4; idx < lines.size(); ++idx) {
    const std::string& line = lines[idx];
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t1 == 0 || t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw fail(idx + 1, "expected '<term>\\t<weight>\\t<idf>'");
    }
    const auto wv = detail::parse_double(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
    const auto iv = detail::parse_double(std::string_view(line).substr(t2 + 1));
    if (!wv || !iv || !std::isfinite(*wv) || !std::isfinite(*iv)) throw fail(idx + 1, "bad numeric field");
    terms.push_back(line.substr(0, t1));
    weights.push_back(*wv);
    idf.push_back(*iv);
  }

  SvmModel model;
  try {
    model.features = FeatureSet(std::move(terms), std::move(idf), *ndocs);
  } catch (const Error& e) {
    throw Error(ErrorKind::format, e.what());
  }
  model.weights = std::move(weights);
  model.bias = *bias;
  model.config.regularization = *lambda;
  return model;
}

inline SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::configuration, "cannot open model file " + path.string());
  return read_model(in);
}

/// Preprocess, vectorize and classify one review.
inline Polarity classify_text(const SvmModel& model, std::string_view text, const Stoplist& stoplist) {
  return predict(model, transform(preprocess(text, stoplist), model.features));
}

}  // namespace sentirec
