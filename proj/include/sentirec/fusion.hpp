#pragma once

// Fusion of direct star ratings with review polarity:
//
//     fused = r_avg + polarity * stars
//
// r_avg is the global mean of all observed stars, polarity is +1 or -1, and the
// fused value lies in [r_avg - 5, r_avg + 5]. Values stay unclamped in the
// matrix; conversion to stars happens only for display.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "sentirec/corpus_io.hpp"
#include "sentirec/detail/numeric.hpp"
#include "sentirec/error.hpp"
#include "sentirec/ratings_matrix.hpp"
#include "sentirec/svm.hpp"
#include "sentirec/textprep.hpp"

namespace sentirec {

struct FusedRating {
  double value = 0.0;
  Polarity polarity = Polarity::positive;
  int stars = 0;
  double r_avg = 0.0;
};

/// Displayed star rating for a predicted fused value, or nullopt for Invalid.
using ExpectedRating = std::optional<int>;

inline double global_average(const RatingsDataset& data) {
  if (data.records.empty()) throw Error(ErrorKind::empty_input, "cannot average an empty dataset");
  double sum = 0.0;
  for (const auto& r : data.records) sum += r.stars;
  return sum / static_cast<double>(data.records.size());
}

inline double fuse_rating(double r_avg, Polarity polarity, int stars) {
  if (polarity != Polarity::positive && polarity != Polarity::negative) {
    throw Error(ErrorKind::parameter, "polarity must be +1 or -1");
  }
  if (stars < 1 || stars > 5) throw Error(ErrorKind::parameter, "stars must lie in [1,5]");
  return r_avg + as_int(polarity) * stars;
}

inline double fuse_rating(double r_avg, int polarity, int stars) {
  return fuse_rating(r_avg, polarity_from_int(polarity), stars);
}

inline FusedRating make_fused(double r_avg, Polarity polarity, int stars) {
  return FusedRating{fuse_rating(r_avg, polarity, stars), polarity, stars, r_avg};
}

/// Buckets an unwatched-cell prediction into 1..5 stars.
///
///   round(ur) < 0  -> Invalid
///   0, 1, 2        -> 1
///   3, 4           -> 2
///   5, 6           -> 3
///   7, 8           -> 4
///   > 8            -> 5
inline ExpectedRating bucket_expected_rating(double ur) {
  if (!std::isfinite(ur)) throw Error(ErrorKind::parameter, "expected-rating input must be finite");
  const double r = detail::round_half_up(ur);
  if (r < 0) return std::nullopt;
  if (r <= 2) return 1;
  if (r <= 4) return 2;
  if (r <= 6) return 3;
  if (r <= 8) return 4;
  return 5;
}

/// Polarity used for records without review text.
inline Polarity fallback_polarity(int stars) { return stars >= 3 ? Polarity::positive : Polarity::negative; }

struct FusionLog {
  double r_avg = 0.0;
  std::size_t classified = 0;
  std::size_t fallbacks = 0;
};

/// Fused user x movie matrix: each record's polarity comes from the classifier
/// (or the star fallback for empty reviews); cells without a record stay missing.
inline RatingsMatrix build_fused_matrix(const RatingsDataset& data, const SvmModel& model, const Stoplist& stoplist,
                                        FusionLog* log = nullptr) {
  const double r_avg = global_average(data);
  RatingsMatrix matrix(static_cast<std::size_t>(data.num_users), static_cast<std::size_t>(data.num_movies));
  FusionLog local{r_avg, 0, 0};
  for (const auto& r : data.records) {
    Polarity polarity;
    if (r.review_text.find_first_not_of(" \t\r\n") == std::string::npos) {
      polarity = fallback_polarity(r.stars);
      ++local.fallbacks;
    } else {
      polarity = classify_text(model, r.review_text, stoplist);
      ++local.classified;
    }
    matrix.set(static_cast<std::size_t>(r.user_id - 1), static_cast<std::size_t>(r.movie_id - 1),
               fuse_rating(r_avg, polarity, r.stars));
  }
  if (log != nullptr) *log = local;
  return matrix;
}

}  // namespace sentirec
