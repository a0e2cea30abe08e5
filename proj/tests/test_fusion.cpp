#include <gtest/gtest.h>

#include <random>

#include "sentirec/fusion.hpp"

namespace {

using sentirec::ExpectedRating;
using sentirec::Polarity;

sentirec::RatingsDataset dataset(std::vector<sentirec::RatingRecord> records) {
  sentirec::RatingsDataset d;
  for (const auto& r : records) {
    d.num_users = std::max(d.num_users, r.user_id);
    d.num_movies = std::max(d.num_movies, r.movie_id);
  }
  d.records = std::move(records);
  return d;
}

TEST(GlobalAverage, Means) {
  EXPECT_EQ(sentirec::global_average(dataset({{1, 1, 1, ""}, {1, 2, 5, ""}})), 3.0);
  EXPECT_EQ(sentirec::global_average(dataset({{1, 1, 4, ""}, {2, 1, 4, ""}, {3, 1, 4, ""}})), 4.0);
  EXPECT_EQ(sentirec::global_average(dataset({{1, 1, 1, ""}, {1, 2, 2, ""}, {1, 3, 3, ""}, {1, 4, 4, ""}, {1, 5, 5, ""}})),
            3.0);
  EXPECT_THROW(sentirec::global_average(sentirec::RatingsDataset{}), sentirec::Error);
}

TEST(FuseRating, DirectArithmetic) {
  EXPECT_EQ(sentirec::fuse_rating(3.0, Polarity::positive, 4), 7.0);
  EXPECT_EQ(sentirec::fuse_rating(3.0, Polarity::negative, 4), -1.0);
  EXPECT_EQ(sentirec::fuse_rating(3.0, +1, 1), 4.0);
  EXPECT_EQ(sentirec::fuse_rating(3.0, -1, 1), 2.0);
  EXPECT_THROW(sentirec::fuse_rating(3.0, 0, 1), sentirec::Error);
  EXPECT_THROW(sentirec::fuse_rating(3.0, 2, 1), sentirec::Error);
}

TEST(FuseRating, RangeAndFlipIdentity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> avg(1.0, 5.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double r = avg(rng);
    for (int stars = 1; stars <= 5; ++stars) {
      const double up = sentirec::fuse_rating(r, Polarity::positive, stars);
      const double down = sentirec::fuse_rating(r, Polarity::negative, stars);
      EXPECT_NEAR(up - down, 2.0 * stars, 1e-12);
      for (double v : {up, down}) {
        EXPECT_GE(v, -4.0);
        EXPECT_LE(v, 10.0);
      }
      const auto fr = sentirec::make_fused(r, Polarity::negative, stars);
      EXPECT_EQ(fr.value, fr.r_avg + sentirec::as_int(fr.polarity) * fr.stars);
    }
  }
}

TEST(BucketExpectedRating, TableValues) {
  EXPECT_EQ(sentirec::bucket_expected_rating(7), ExpectedRating{4});
  EXPECT_EQ(sentirec::bucket_expected_rating(-1), std::nullopt);
  EXPECT_EQ(sentirec::bucket_expected_rating(9), ExpectedRating{5});
  EXPECT_EQ(sentirec::bucket_expected_rating(3.4), ExpectedRating{2});
  EXPECT_EQ(sentirec::bucket_expected_rating(0), ExpectedRating{1});
  EXPECT_EQ(sentirec::bucket_expected_rating(-0.5), ExpectedRating{1});  // rounds half up to 0
  EXPECT_EQ(sentirec::bucket_expected_rating(-0.51), std::nullopt);
  EXPECT_EQ(sentirec::bucket_expected_rating(8.49), ExpectedRating{4});
  EXPECT_EQ(sentirec::bucket_expected_rating(8.5), ExpectedRating{5});
  EXPECT_THROW(sentirec::bucket_expected_rating(std::nan("")), sentirec::Error);
}

TEST(BucketExpectedRating, MonotoneOverFiniteReals) {
  auto rank = [](const ExpectedRating& e) { return e ? *e : 0; };
  int previous = 0;
  for (double ur = -20.0; ur <= 20.0; ur += 0.01) {
    const int r = rank(sentirec::bucket_expected_rating(ur));
    EXPECT_GE(r, previous) << ur;
    previous = r;
  }
}

// Two-term model: "جميل" pushes positive, "ممل" negative.
sentirec::SvmModel two_term_model() {
  sentirec::SvmModel m;
  m.features = sentirec::FeatureSet({"جميل", "ممل"}, {1.0, 1.0}, 2);
  m.weights = {1.0, -1.0};
  m.bias = 0.0;
  return m;
}

TEST(BuildFusedMatrix, HandRunPipeline) {
  // stars {4, 2, 3} -> r_avg = 3.
  // (1,1) "فيلم جميل" -> +1 -> 3 + 4 = 7
  // (2,2) "فيلم ممل"  -> -1 -> 3 - 2 = 1
  // (2,1) empty review, stars 3 -> fallback +1 -> 3 + 3 = 6
  const auto data = dataset({{1, 1, 4, "فيلم جميل"}, {2, 2, 2, "فيلم ممل"}, {2, 1, 3, ""}});
  sentirec::FusionLog log;
  const auto m = sentirec::build_fused_matrix(data, two_term_model(), {}, &log);
  ASSERT_EQ(m.rows(), 2u);
  ASSERT_EQ(m.cols(), 2u);
  EXPECT_EQ(m.at(0, 0), 7.0);
  EXPECT_EQ(m.at(1, 1), 1.0);
  EXPECT_EQ(m.at(1, 0), 6.0);
  EXPECT_FALSE(m.at(0, 1).has_value());
  EXPECT_EQ(log.r_avg, 3.0);
  EXPECT_EQ(log.fallbacks, 1u);
  EXPECT_EQ(log.classified, 2u);
}

TEST(BuildFusedMatrix, EmptyReviewLowStarsFallsBackNegative) {
  const auto data = dataset({{1, 1, 2, "   "}, {1, 2, 4, ""}});
  const auto m = sentirec::build_fused_matrix(data, two_term_model(), {});
  EXPECT_EQ(m.at(0, 0), 3.0 - 2.0);
  EXPECT_EQ(m.at(0, 1), 3.0 + 4.0);
}

}  // namespace
