#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentirec/detail/numeric.hpp"
#include "sentirec/detail/random.hpp"
#include "sentirec/detail/utf8.hpp"
#include "sentirec/error.hpp"

namespace sentirec {

/// Review polarity. Stored as the integer value used in the fusion formula.
enum class Polarity : int { negative = -1, positive = +1 };

constexpr int as_int(Polarity p) noexcept { return static_cast<int>(p); }

inline Polarity polarity_from_int(int value) {
  if (value == 1) return Polarity::positive;
  if (value == -1) return Polarity::negative;
  throw Error(ErrorKind::parameter, "polarity must be +1 or -1, got " + std::to_string(value));
}

struct Review {
  std::string doc_id;
  std::string text;
  std::optional<Polarity> label;
};

struct LabeledCorpus {
  std::vector<Review> reviews;

  std::size_t size() const noexcept { return reviews.size(); }
  bool empty() const noexcept { return reviews.empty(); }

  std::size_t count(Polarity p) const {
    return static_cast<std::size_t>(
        std::count_if(reviews.begin(), reviews.end(), [p](const Review& r) { return r.label == p; }));
  }
};

struct RatingRecord {
  int user_id = 0;
  int movie_id = 0;
  int stars = 0;
  std::string review_text;
};

struct RatingsDataset {
  std::vector<RatingRecord> records;
  int num_users = 0;
  int num_movies = 0;
};

namespace corpus_detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ingestion, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  });
}

inline void load_class_dir(const std::filesystem::path& dir, std::string_view subdir, Polarity label,
                           std::vector<Review>& out) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::string text = read_file(file);
    if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
    if (!detail::is_valid(text)) throw Error(ErrorKind::ingestion, "file is not valid UTF-8: " + file.string());
    if (blank(text)) throw Error(ErrorKind::ingestion, "review file is empty: " + file.string());
    out.push_back(Review{std::string(subdir) + "/" + file.filename().string(), std::move(text), label});
  }
}

inline void validate_record(const RatingRecord& r, std::size_t line_no) {
  const std::string where = " (line " + std::to_string(line_no) + ")";
  if (r.user_id < 1) throw Error(ErrorKind::validation, "user_id must be >= 1" + where);
  if (r.movie_id < 1) throw Error(ErrorKind::validation, "movie_id must be >= 1" + where);
  if (r.stars < 1 || r.stars > 5) {
    throw Error(ErrorKind::validation, "stars must be in [1,5], got " + std::to_string(r.stars) + where);
  }
}

}  // namespace corpus_detail

/// Loads a polarity corpus laid out as `root/positive/*.txt` and `root/negative/*.txt`.
/// Files are read in filename order; doc ids are `<subdir>/<filename>`.
inline LabeledCorpus load_polarity_corpus(const std::filesystem::path& root_dir) {
  namespace fs = std::filesystem;
  LabeledCorpus corpus;
  for (auto [name, label] : {std::pair{"positive", Polarity::positive}, std::pair{"negative", Polarity::negative}}) {
    const fs::path dir = root_dir / name;
    if (!fs::is_directory(dir)) throw Error(ErrorKind::configuration, "missing corpus directory " + dir.string());
    corpus_detail::load_class_dir(dir, name, label, corpus.reviews);
  }
  if (corpus.empty()) throw Error(ErrorKind::empty_input, "no review files under " + root_dir.string());
  return corpus;
}

/// Parses JSON-lines ratings. Blank lines are skipped; m and n are the largest ids seen.
inline RatingsDataset parse_ratings(std::istream& in) {
  RatingsDataset data;
  std::set<std::pair<int, int>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (corpus_detail::blank(line)) continue;
    RatingRecord rec;
    try {
      const auto obj = nlohmann::json::parse(line);
      if (!obj.is_object()) throw std::runtime_error("not a JSON object");
      for (const char* key : {"user_id", "movie_id", "stars"}) {
        if (!obj.contains(key) || !obj[key].is_number_integer()) {
          throw std::runtime_error(std::string("missing integer field '") + key + "'");
        }
      }
      if (!obj.contains("review") || !obj["review"].is_string()) {
        throw std::runtime_error("missing string field 'review'");
      }
      rec.user_id = obj["user_id"].get<int>();
      rec.movie_id = obj["movie_id"].get<int>();
      rec.stars = obj["stars"].get<int>();
      rec.review_text = obj["review"].get<std::string>();
    } catch (const std::exception& e) {
      throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    corpus_detail::validate_record(rec, line_no);
    if (!seen.emplace(rec.user_id, rec.movie_id).second) {
      throw Error(ErrorKind::validation, "duplicate (user_id, movie_id) = (" + std::to_string(rec.user_id) + ", " +
                                             std::to_string(rec.movie_id) + ") at line " + std::to_string(line_no));
    }
    data.num_users = std::max(data.num_users, rec.user_id);
    data.num_movies = std::max(data.num_movies, rec.movie_id);
    data.records.push_back(std::move(rec));
  }
  if (data.records.empty()) throw Error(ErrorKind::empty_input, "ratings input has no records");
  return data;
}

inline RatingsDataset load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::configuration, "cannot open ratings file " + path.string());
  return parse_ratings(in);
}

inline void write_ratings(std::ostream& out, const RatingsDataset& data) {
  for (const auto& r : data.records) {
    nlohmann::ordered_json obj;
    obj["user_id"] = r.user_id;
    obj["movie_id"] = r.movie_id;
    obj["stars"] = r.stars;
    obj["review"] = r.review_text;
    out << obj.dump() << '\n';
  }
}

/// Stratified split: each label class contributes round(train_fraction * class size)
/// reviews to the training partition. Both partitions keep corpus order.
inline std::pair<LabeledCorpus, LabeledCorpus> split_corpus(const LabeledCorpus& corpus, double train_fraction,
                                                            std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::parameter, "train fraction must lie in (0,1)");
  }
  if (corpus.empty()) throw Error(ErrorKind::empty_input, "cannot split an empty corpus");

  std::vector<bool> in_train(corpus.size(), false);
  for (Polarity cls : {Polarity::positive, Polarity::negative}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (!corpus.reviews[i].label) throw Error(ErrorKind::validation, "unlabeled review " + corpus.reviews[i].doc_id);
      if (*corpus.reviews[i].label == cls) members.push_back(i);
    }
    if (members.empty()) {
      throw Error(ErrorKind::validation,
                  std::string("no ") + (cls == Polarity::positive ? "positive" : "negative") + " reviews to split");
    }
    auto rng = detail::make_engine(seed, cls == Polarity::positive ? detail::kStreamSplitPositive : detail::kStreamSplitNegative);
    detail::shuffle(members, rng);
    const auto take = static_cast<std::size_t>(detail::round_half_up(train_fraction * static_cast<double>(members.size())));
    for (std::size_t k = 0; k < take; ++k) in_train[members[k]] = true;
  }

  LabeledCorpus train;
  LabeledCorpus test;
  for (std::size_t i = 0; i < corpus.size(); ++i) (in_train[i] ? train : test).reviews.push_back(corpus.reviews[i]);
  return {std::move(train), std::move(test)};
}

inline constexpr const char* kPositiveTemplate = "فيلم رائع جميل ممتع أنصح بمشاهدته";
inline constexpr const char* kNegativeTemplate = "فيلم سيئ ممل ضعيف لا أنصح به";

/// Dense rank-`true_rank` matrix affinely rescaled onto [1,5], before rounding.
/// Row-major m x n. This is the noise-free signal behind generate_synthetic_ratings.
inline std::vector<double> synthetic_latent_matrix(int m, int n, int true_rank, std::uint64_t seed) {
  if (m < 1 || n < 1) throw Error(ErrorKind::parameter, "matrix dimensions must be positive");
  if (true_rank < 1 || true_rank > std::min(m, n)) {
    throw Error(ErrorKind::parameter, "true rank must lie in [1, min(m,n)]");
  }
  auto rng = detail::make_engine(seed, detail::kStreamLatent);
  const auto um = static_cast<std::size_t>(m), un = static_cast<std::size_t>(n), uk = static_cast<std::size_t>(true_rank);
  std::vector<double> user(um * uk), item(un * uk);
  for (double& v : user) v = 2.0 * detail::uniform01(rng) - 1.0;
  for (double& v : item) v = 2.0 * detail::uniform01(rng) - 1.0;

  std::vector<double> dense(um * un, 0.0);
  for (std::size_t u = 0; u < um; ++u)
    for (std::size_t i = 0; i < un; ++i) {
      double s = 0.0;
      for (std::size_t f = 0; f < uk; ++f) s += user[u * uk + f] * item[i * uk + f];
      dense[u * un + i] = s;
    }
  const auto [lo_it, hi_it] = std::minmax_element(dense.begin(), dense.end());
  const double lo = *lo_it, hi = *hi_it;
  for (double& v : dense) v = hi > lo ? 1.0 + 4.0 * (v - lo) / (hi - lo) : 3.0;
  return dense;
}

/// Seeded synthetic ratings: rounds the latent matrix to stars and keeps each
/// cell with probability `density`. Reviews follow the star value so the
/// sentiment pipeline has something to classify.
inline RatingsDataset generate_synthetic_ratings(int m, int n, int true_rank, double density, std::uint64_t seed) {
  if (!(density > 0.0 && density <= 1.0)) throw Error(ErrorKind::parameter, "density must lie in (0,1]");
  const auto latent = synthetic_latent_matrix(m, n, true_rank, seed);
  auto keep_rng = detail::make_engine(seed, detail::kStreamKeep);
  RatingsDataset data;
  data.num_users = m;
  data.num_movies = n;
  for (int u = 0; u < m; ++u)
    for (int i = 0; i < n; ++i) {
      const double v = latent[static_cast<std::size_t>(u) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
      const bool keep = detail::uniform01(keep_rng) < density;
      if (!keep) continue;
      const int stars = std::clamp(static_cast<int>(detail::round_half_up(v)), 1, 5);
      std::string text = stars >= 4 ? kPositiveTemplate : stars <= 2 ? kNegativeTemplate : "";
      data.records.push_back(RatingRecord{u + 1, i + 1, stars, std::move(text)});
    }
  return data;
}

/// `movie_id,title` CSV. A first line whose id does not parse is taken as a header.
/// Titles may contain commas; surrounding double quotes are stripped.
inline std::map<int, std::string> load_movie_catalog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::configuration, "cannot open movie catalog " + path.string());
  std::map<int, std::string> titles;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (corpus_detail::blank(line)) continue;
    const auto comma = line.find(',');
    const auto id = comma == std::string::npos ? std::nullopt : detail::parse_int<int>(line.substr(0, comma));
    if (!id) {
      if (line_no == 1) continue;
      throw Error(ErrorKind::parse, "catalog line " + std::to_string(line_no) + ": expected movie_id,title");
    }
    std::string title = line.substr(comma + 1);
    if (title.size() >= 2 && title.front() == '"' && title.back() == '"') {
      title = title.substr(1, title.size() - 2);
      for (auto pos = title.find("\"\""); pos != std::string::npos; pos = title.find("\"\"", pos + 1)) title.erase(pos, 1);
    }
    titles[*id] = std::move(title);
  }
  return titles;
}

}  // namespace sentirec
