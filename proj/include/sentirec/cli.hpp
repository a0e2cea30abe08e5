#pragma once

// Command-line front end. `run_cli` takes explicit streams so commands can be
// driven in-process by tests; tools/sentirec.cpp forwards the real ones.
//
// Exit codes: 0 success, 1 runtime or numerical failure, 2 usage or input error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sentirec/corpus_io.hpp"
#include "sentirec/error.hpp"
#include "sentirec/evaluation.hpp"
#include "sentirec/featurizer.hpp"
#include "sentirec/fusion.hpp"
#include "sentirec/ratings_matrix.hpp"
#include "sentirec/svd_cf.hpp"
#include "sentirec/svm.hpp"
#include "sentirec/textprep.hpp"

namespace sentirec::cli {

struct RunConfig {
  std::string corpus_dir;
  std::string ratings_path;
  std::string stoplist_path;
  std::string model_path;
  std::string matrix_path;
  std::string catalog_path;
  std::string out_path;
  std::size_t per_class_features = 5000;
  double train_fraction = 0.7;
  std::size_t svd_rank = 10;
  std::uint64_t seed = 0;
  std::vector<double> ratios = default_sweep_ratios();
  // synth-ratings only
  int users = 200;
  int movies = 39;
  int true_rank = 3;
  double density = 0.3;
};

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

namespace cli_detail {

inline void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(ErrorKind::configuration, std::string("missing required flag ") + flag);
}

inline Stoplist stoplist_for(const RunConfig& cfg) {
  return cfg.stoplist_path.empty() ? Stoplist::default_arabic() : Stoplist::load(cfg.stoplist_path);
}

struct TrainedClassifier {
  SvmModel model;
  std::size_t positive_ranked = 0;
  std::size_t negative_ranked = 0;
};

inline TrainedClassifier train_on(const LabeledCorpus& corpus, const Stoplist& stoplist, const RunConfig& cfg) {
  const auto docs = tokenize_corpus(corpus, stoplist);
  const auto stats = count_terms(labeled_tokens(docs));
  auto selection = select_features_detailed(stats, cfg.per_class_features);
  const auto matrix = build_matrix(docs, selection.features);
  SvmConfig svm_cfg;
  svm_cfg.seed = cfg.seed;
  return {train_svm(matrix, selection.features, svm_cfg), selection.selected_positive, selection.selected_negative};
}

inline std::string metric_text(const std::optional<double>& v) { return v ? detail::fixed(*v, 3) : "undefined"; }

inline std::size_t effective_rank(const RatingsMatrix& matrix, std::size_t requested, std::ostream& err) {
  const std::size_t cap = std::min(matrix.rows(), matrix.cols());
  if (requested > cap) {
    err << "note: svd rank " << requested << " exceeds min(m,n); using " << cap << '\n';
    return cap;
  }
  return requested;
}

inline std::vector<double> parse_ratios(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(' ');
    const auto last = item.find_last_not_of(' ');
    const auto value = first == std::string::npos ? std::nullopt
                                                   : detail::parse_double(std::string_view(item).substr(first, last - first + 1));
    if (!value) throw Error(ErrorKind::parameter, "bad ratio '" + item + "' in --ratios");
    out.push_back(*value);
  }
  if (out.empty()) throw Error(ErrorKind::parameter, "--ratios is empty");
  return out;
}

}  // namespace cli_detail

inline int cmd_train(const RunConfig& cfg, Streams io) {
  cli_detail::require(cfg.corpus_dir, "--corpus-dir");
  cli_detail::require(cfg.model_path, "--model");
  const auto corpus = load_polarity_corpus(cfg.corpus_dir);
  const auto trained = cli_detail::train_on(corpus, cli_detail::stoplist_for(cfg), cfg);
  save_model(trained.model, cfg.model_path);
  io.out << "documents " << corpus.size() << '\n';
  io.out << "features " << trained.model.features.size() << '\n';
  io.out << "objective " << detail::fixed(trained.model.training_objective.value_or(0.0), 6) << '\n';
  return kExitOk;
}

inline int cmd_eval_sa(const RunConfig& cfg, Streams io) {
  cli_detail::require(cfg.corpus_dir, "--corpus-dir");
  const auto corpus = load_polarity_corpus(cfg.corpus_dir);
  const auto stoplist = cli_detail::stoplist_for(cfg);
  const auto [train, test] = split_corpus(corpus, cfg.train_fraction, cfg.seed);
  if (test.empty()) throw Error(ErrorKind::validation, "test partition is empty");
  const auto trained = cli_detail::train_on(train, stoplist, cfg);

  std::vector<Polarity> truth, svm_pred, train_labels;
  for (const auto& r : train.reviews) train_labels.push_back(*r.label);
  for (const auto& r : test.reviews) {
    truth.push_back(*r.label);
    svm_pred.push_back(classify_text(trained.model, r.text, stoplist));
  }
  auto dummy = dummy_stratified(train_labels, cfg.seed);
  const auto dummy_pred = dummy.predict(test.size());

  const auto svm_report = metrics_report(confusion(svm_pred, truth));
  const auto dummy_report = metrics_report(confusion(dummy_pred, truth));
  for (const auto& [name, report] : {std::pair{"svm", &svm_report}, std::pair{"dummy", &dummy_report}}) {
    io.out << name << " accuracy " << cli_detail::metric_text(report->accuracy) << '\n';
    io.out << name << " precision " << cli_detail::metric_text(report->precision) << '\n';
    io.out << name << " recall " << cli_detail::metric_text(report->recall) << '\n';
    io.out << name << " f1 " << cli_detail::metric_text(report->f1) << '\n';
  }
  return kExitOk;
}

inline int cmd_build_matrix(const RunConfig& cfg, Streams io) {
  cli_detail::require(cfg.ratings_path, "--ratings");
  cli_detail::require(cfg.model_path, "--model");
  cli_detail::require(cfg.out_path, "--out");
  const auto data = load_ratings(cfg.ratings_path);
  const auto model = load_model(cfg.model_path);
  FusionLog log;
  const auto matrix = build_fused_matrix(data, model, cli_detail::stoplist_for(cfg), &log);
  save_matrix(matrix, cfg.out_path);
  io.out << "matrix " << matrix.rows() << 'x' << matrix.cols() << " cells " << matrix.observed_count() << '\n';
  io.out << "r_avg " << detail::fixed(log.r_avg, 3) << '\n';
  if (log.fallbacks > 0) io.err << "note: " << log.fallbacks << " record(s) without review text used star polarity\n";
  return kExitOk;
}

inline int cmd_cf_eval(const RunConfig& cfg, Streams io) {
  cli_detail::require(cfg.matrix_path, "--matrix");
  const auto matrix = load_matrix(cfg.matrix_path);
  const auto k = cli_detail::effective_rank(matrix, cfg.svd_rank, io.err);
  const auto report = cf_mae_sweep(matrix, cfg.ratios, k, cfg.seed);
  if (cfg.out_path.empty()) {
    write_sweep_csv(io.out, report);
    return kExitOk;
  }
  std::ofstream csv(cfg.out_path, std::ios::binary | std::ios::trunc);
  if (!csv) throw Error(ErrorKind::configuration, "cannot write " + cfg.out_path);
  write_sweep_csv(csv, report);
  for (const auto& row : report.rows) {
    io.out << "R=" << detail::fixed(row.ratio, 1) << " model " << detail::fixed(row.model_mae, 3) << " baseline "
           << detail::fixed(row.baseline_mae, 3) << " improvement " << detail::fixed(row.baseline_mae - row.model_mae, 3)
           << '\n';
  }
  return kExitOk;
}

inline int cmd_synth_ratings(const RunConfig& cfg, Streams io) {
  cli_detail::require(cfg.out_path, "--out");
  const auto data = generate_synthetic_ratings(cfg.users, cfg.movies, cfg.true_rank, cfg.density, cfg.seed);
  std::ofstream out(cfg.out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::configuration, "cannot write " + cfg.out_path);
  write_ratings(out, data);
  io.out << "records " << data.records.size() << '\n';
  return kExitOk;
}

/// Interactive session: pick a user, list watched and unwatched movies, pick an
/// unwatched movie, show its predicted value and bucketed star rating.
inline int cmd_repl(const RunConfig& cfg, Streams io) {
  cli_detail::require(cfg.matrix_path, "--matrix");
  const auto matrix = load_matrix(cfg.matrix_path);
  if (!cfg.model_path.empty()) (void)load_model(cfg.model_path);
  std::map<int, std::string> titles;
  if (!cfg.catalog_path.empty()) titles = load_movie_catalog(cfg.catalog_path);
  const auto model = fit(matrix, cli_detail::effective_rank(matrix, cfg.svd_rank, io.err));

  auto title = [&](std::size_t movie) {
    const auto it = titles.find(static_cast<int>(movie + 1));
    return it != titles.end() ? it->second : "Movie " + std::to_string(movie + 1);
  };
  auto read = [&](const char* prompt, std::string& line) {
    io.out << prompt << std::flush;
    if (!std::getline(io.in, line)) {
      io.out << '\n';
      return false;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto a = line.find_first_not_of(" \t"), b = line.find_last_not_of(" \t");
    line = a == std::string::npos ? "" : line.substr(a, b - a + 1);
    return true;
  };

  const std::size_t m = matrix.rows(), n = matrix.cols();
  io.out << "Users 1-" << m << ", movies 1-" << n << ". Enter q to quit.\n";
  std::string line;
  while (true) {
    if (!read("user id> ", line) || line == "q") return kExitOk;
    const auto uid = detail::parse_int<long long>(line);
    if (!uid || *uid < 1 || static_cast<unsigned long long>(*uid) > m) {
      io.out << "User id must be an integer from 1 to " << m << ".\n";
      continue;
    }
    const auto u = static_cast<std::size_t>(*uid - 1);
    std::vector<std::size_t> unwatched;
    io.out << "Watched movies:\n";
    for (std::size_t i = 0; i < n; ++i) {
      if (const auto& v = matrix.at(u, i)) {
        io.out << "  [" << i + 1 << "] " << title(i) << ": " << detail::fixed(*v, 3) << '\n';
      } else {
        unwatched.push_back(i);
      }
    }
    io.out << "Unwatched movies:\n";
    for (std::size_t i : unwatched) io.out << "  [" << i + 1 << "] " << title(i) << '\n';
    if (unwatched.empty()) {
      io.out << "  (none)\n";
      continue;
    }
    while (true) {
      if (!read("movie id> ", line) || line == "q") return kExitOk;
      const auto mid = detail::parse_int<long long>(line);
      const bool listed = mid && *mid >= 1 &&
                          std::find(unwatched.begin(), unwatched.end(), static_cast<std::size_t>(*mid - 1)) != unwatched.end();
      if (!listed) {
        io.out << "Movie id must be one of the unwatched movies listed above.\n";
        continue;
      }
      const double ur = predict_rating(model, u, static_cast<std::size_t>(*mid - 1));
      const auto er = bucket_expected_rating(ur);
      io.out << title(static_cast<std::size_t>(*mid - 1)) << ": UR " << detail::fixed(ur, 3) << " -> ER "
             << (er ? std::to_string(*er) : std::string("Invalid")) << '\n';
      break;
    }
  }
}

inline int run_cli(const std::vector<std::string>& args, Streams io) {
  CLI::App app{"Rating prediction from star ratings fused with review sentiment", "sentirec"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string ratios_text;

  auto add_common = [&](CLI::App* sub) { sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str(); };
  auto add_stoplist = [&](CLI::App* sub) { sub->add_option("--stoplist", cfg.stoplist_path, "stopword file"); };
  auto add_corpus = [&](CLI::App* sub) {
    sub->add_option("--corpus-dir", cfg.corpus_dir, "directory with positive/ and negative/");
    sub->add_option("--features-per-class", cfg.per_class_features, "top terms kept per class")->capture_default_str();
  };

  auto* train = app.add_subcommand("train", "train the sentiment classifier and write a model file");
  add_corpus(train);
  add_stoplist(train);
  add_common(train);
  train->add_option("--model", cfg.model_path, "model file to write");

  auto* eval_sa = app.add_subcommand("eval-sa", "held-out metrics for the classifier and the stratified dummy");
  add_corpus(eval_sa);
  add_stoplist(eval_sa);
  add_common(eval_sa);
  eval_sa->add_option("--train-fraction", cfg.train_fraction, "training share of each class")->capture_default_str();

  auto* build = app.add_subcommand("build-matrix", "fuse ratings with review polarity into a matrix file");
  build->add_option("--ratings", cfg.ratings_path, "ratings JSON-lines file");
  build->add_option("--model", cfg.model_path, "model file");
  build->add_option("--out", cfg.out_path, "matrix file to write");
  add_stoplist(build);

  auto* cf_eval = app.add_subcommand("cf-eval", "MAE sweep of SVD-CF against the item-mean baseline");
  cf_eval->add_option("--matrix", cfg.matrix_path, "matrix file");
  cf_eval->add_option("--svd-rank", cfg.svd_rank, "truncation rank")->capture_default_str();
  cf_eval->add_option("--ratios", ratios_text, "comma-separated train ratios");
  cf_eval->add_option("--out", cfg.out_path, "CSV file to write (stdout if omitted)");
  add_common(cf_eval);

  auto* repl = app.add_subcommand("repl", "interactive rating lookup");
  repl->add_option("--matrix", cfg.matrix_path, "matrix file");
  repl->add_option("--model", cfg.model_path, "model file (validated only)");
  repl->add_option("--catalog", cfg.catalog_path, "movie_id,title CSV");
  repl->add_option("--svd-rank", cfg.svd_rank, "truncation rank")->capture_default_str();

  auto* synth = app.add_subcommand("synth-ratings", "write a seeded synthetic ratings file");
  synth->add_option("--users", cfg.users)->capture_default_str();
  synth->add_option("--movies", cfg.movies)->capture_default_str();
  synth->add_option("--true-rank", cfg.true_rank)->capture_default_str();
  synth->add_option("--density", cfg.density)->capture_default_str();
  synth->add_option("--out", cfg.out_path, "ratings file to write");
  add_common(synth);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    io.err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (!ratios_text.empty()) cfg.ratios = cli_detail::parse_ratios(ratios_text);
    if (train->parsed()) return cmd_train(cfg, io);
    if (eval_sa->parsed()) return cmd_eval_sa(cfg, io);
    if (build->parsed()) return cmd_build_matrix(cfg, io);
    if (cf_eval->parsed()) return cmd_cf_eval(cfg, io);
    if (repl->parsed()) return cmd_repl(cfg, io);
    if (synth->parsed()) return cmd_synth_ratings(cfg, io);
  } catch (const Error& e) {
    io.err << "sentirec: " << e.what() << '\n';
    return e.is_input_error() ? kExitUsage : kExitRuntime;
  } catch (const std::filesystem::filesystem_error& e) {
    io.err << "sentirec: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    io.err << "sentirec: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace sentirec::cli
