#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "sentirec/corpus_io.hpp"
#include "sentirec/svd_cf.hpp"

namespace {

using sentirec::DenseMatrix;
using sentirec::RatingsMatrix;

DenseMatrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  DenseMatrix a(m, n);
  for (double& v : a.data()) v = dist(rng);
  return a;
}

Eigen::VectorXd eigen_singular_values(const DenseMatrix& a) {
  Eigen::MatrixXd e(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a(r, c);
  return Eigen::JacobiSVD<Eigen::MatrixXd>(e).singularValues();
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
  return d;
}

double orthonormality_error(const DenseMatrix& q) {
  double worst = 0.0;
  for (std::size_t i = 0; i < q.cols(); ++i)
    for (std::size_t j = 0; j < q.cols(); ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < q.rows(); ++r) s += q(r, i) * q(r, j);
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

void expect_factor_invariants(const sentirec::SvdFactors& f) {
  for (std::size_t i = 1; i < f.rank(); ++i) EXPECT_GE(f.singular[i - 1], f.singular[i]);
  for (double s : f.singular) EXPECT_GE(s, 0.0);
  EXPECT_LE(orthonormality_error(f.u), 1e-8);
  EXPECT_LE(orthonormality_error(f.v), 1e-8);
}

TEST(TruncatedSvd, DiagonalMatrix) {
  DenseMatrix a(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 3.0;
  const auto f = sentirec::truncated_svd(a, 2);
  EXPECT_NEAR(f.singular[0], 3.0, 1e-14);
  EXPECT_NEAR(f.singular[1], 1.0, 1e-14);
  expect_factor_invariants(f);
}

TEST(TruncatedSvd, OuterProduct) {
  const std::vector<double> x = {1.0, -2.0, 0.5, 3.0}, y = {2.0, 1.0, -1.0};
  DenseMatrix a(4, 3);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 3; ++c) a(r, c) = x[r] * y[c];
  const auto f1 = sentirec::truncated_svd(a, 1);
  EXPECT_NEAR(f1.singular[0], std::sqrt(14.25) * std::sqrt(6.0), 1e-12);
  EXPECT_LE(max_abs_diff(f1.reconstruct(), a), 1e-12);
  const auto f3 = sentirec::truncated_svd(a, 3);
  EXPECT_LE(f3.singular[1], 1e-10);
  EXPECT_LE(f3.singular[2], 1e-10);
  expect_factor_invariants(f3);
}

TEST(TruncatedSvd, FullRankIdentityAndEigenAgreement) {
  for (auto [m, n] : {std::pair{8, 5}, std::pair{5, 8}, std::pair{50, 40}, std::pair{13, 13}, std::pair{1, 6}}) {
    const auto a = random_matrix(static_cast<std::size_t>(m), static_cast<std::size_t>(n), static_cast<std::uint64_t>(m * 100 + n));
    const std::size_t k = static_cast<std::size_t>(std::min(m, n));
    const auto f = sentirec::truncated_svd(a, k);
    EXPECT_LE(max_abs_diff(f.reconstruct(), a), 1e-9) << m << "x" << n;
    expect_factor_invariants(f);
    const auto ref = eigen_singular_values(a);
    for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(f.singular[i], ref(static_cast<Eigen::Index>(i)), 1e-10);
  }
}

TEST(TruncatedSvd, RankDeficientStillOrthonormal) {
  // Row-centered matrices always have a null direction.
  auto a = random_matrix(12, 6, 8);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double mean = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) mean += a(r, c) / 6.0;
    for (std::size_t c = 0; c < a.cols(); ++c) a(r, c) -= mean;
  }
  const auto f = sentirec::truncated_svd(a, 6);
  EXPECT_LE(f.singular[5], 1e-10);
  expect_factor_invariants(f);
  EXPECT_LE(max_abs_diff(f.reconstruct(), a), 1e-9);
}

TEST(TruncatedSvd, RankOutOfRange) {
  const auto a = random_matrix(3, 2, 1);
  EXPECT_THROW(sentirec::truncated_svd(a, 0), sentirec::Error);
  EXPECT_THROW(sentirec::truncated_svd(a, 3), sentirec::Error);
}

TEST(TruncatedSvd, EckartYoungMonotone) {
  const auto a = random_matrix(20, 15, 2015);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= 15; ++k) {
    const auto r = sentirec::truncated_svd(a, k).reconstruct();
    double err = 0.0;
    for (std::size_t i = 0; i < r.data().size(); ++i) err += std::pow(r.data()[i] - a.data()[i], 2);
    EXPECT_LE(std::sqrt(err), previous + 1e-12);
    previous = std::sqrt(err);
  }
  EXPECT_LE(previous, 1e-9);
}

RatingsMatrix from_rows(const std::vector<std::vector<std::optional<double>>>& rows) {
  RatingsMatrix m(rows.size(), rows[0].size());
  for (std::size_t u = 0; u < rows.size(); ++u)
    for (std::size_t i = 0; i < rows[u].size(); ++i)
      if (rows[u][i]) m.set(u, i, *rows[u][i]);
  return m;
}

TEST(ImputeAndCenter, CompleteMatrix) {
  const auto c = sentirec::impute_and_center(from_rows({{1.0, 2.0}, {3.0, 4.0}}));
  EXPECT_EQ(c.row_means, (std::vector<double>{1.5, 3.5}));
  EXPECT_EQ(c.col_means, (std::vector<double>{2.0, 3.0}));
  EXPECT_EQ(c.centered(0, 0), -0.5);
  EXPECT_EQ(c.centered(0, 1), 0.5);
  EXPECT_EQ(c.centered(1, 0), -0.5);
  EXPECT_EQ(c.centered(1, 1), 0.5);
}

TEST(ImputeAndCenter, MissingCellGetsColumnMean) {
  // Column 1 mean = 3 fills (1,1); row 1 = [3, 2] -> mean 2.5; row 2 = [3, 4] -> mean 3.5.
  const auto c = sentirec::impute_and_center(from_rows({{std::nullopt, 2.0}, {3.0, 4.0}}));
  EXPECT_EQ(c.col_means[0], 3.0);
  EXPECT_EQ(c.row_means, (std::vector<double>{2.5, 3.5}));
  EXPECT_EQ(c.centered(0, 0), 0.5);
  EXPECT_EQ(c.centered(0, 1), -0.5);
}

TEST(ImputeAndCenter, SingleObservedCell) {
  const auto c = sentirec::impute_and_center(from_rows({{std::nullopt, std::nullopt}, {std::nullopt, 4.5}}));
  EXPECT_EQ(c.col_means, (std::vector<double>{4.5, 4.5}));
  EXPECT_THROW(sentirec::impute_and_center(RatingsMatrix(2, 2)), sentirec::Error);
}

TEST(Fit, FullRankReproducesCompleteMatrix) {
  const auto a = random_matrix(9, 6, 4);
  RatingsMatrix m(9, 6);
  for (std::size_t u = 0; u < 9; ++u)
    for (std::size_t i = 0; i < 6; ++i) m.set(u, i, a(u, i));
  const auto model = sentirec::fit(m, 6);
  EXPECT_LE(max_abs_diff(model.x_hat, a), 1e-9);
  EXPECT_EQ(model.rank, 6u);
  EXPECT_NEAR(sentirec::predict_rating(model, 2, 3), a(2, 3), 1e-9);
}

TEST(Fit, ObservedCellsPreservedAtFullRank) {
  std::mt19937_64 rng(11);
  const auto a = random_matrix(30, 12, 12);
  RatingsMatrix m(30, 12);
  for (std::size_t u = 0; u < 30; ++u)
    for (std::size_t i = 0; i < 12; ++i)
      if (rng() % 10 >= 3) m.set(u, i, a(u, i));
  const auto model = sentirec::fit(m, 12);
  for (std::size_t u = 0; u < 30; ++u)
    for (std::size_t i = 0; i < 12; ++i)
      if (const auto& v = m.at(u, i)) {
        EXPECT_NEAR(model.x_hat(u, i), *v, 1e-9);
      }
}

TEST(Fit, RecoversLowRankSyntheticSignal) {
  const auto latent = sentirec::synthetic_latent_matrix(200, 39, 3, 0);
  const auto model = sentirec::fit(sentirec::stars_matrix(sentirec::generate_synthetic_ratings(200, 39, 3, 1.0, 0)), 3);
  double worst = 0.0;
  for (std::size_t u = 0; u < 200; ++u)
    for (std::size_t i = 0; i < 39; ++i) worst = std::max(worst, std::abs(model.x_hat(u, i) - latent[u * 39 + i]));
  EXPECT_LE(worst, 0.5);
}

TEST(Fit, RankOneAfterRemovingRowMeans) {
  const auto a = random_matrix(10, 7, 21);
  RatingsMatrix m(10, 7);
  for (std::size_t u = 0; u < 10; ++u)
    for (std::size_t i = 0; i < 7; ++i) m.set(u, i, a(u, i));
  const auto model = sentirec::fit(m, 1);
  DenseMatrix residual = model.x_hat;
  for (std::size_t u = 0; u < 10; ++u)
    for (std::size_t i = 0; i < 7; ++i) residual(u, i) -= model.row_means[u];
  const auto sv = eigen_singular_values(residual);
  EXPECT_GT(sv(0), 1e-3);
  for (Eigen::Index i = 1; i < sv.size(); ++i) EXPECT_LE(sv(i), 1e-10 * sv(0));
}

TEST(Fit, Deterministic) {
  const auto m = sentirec::stars_matrix(sentirec::generate_synthetic_ratings(40, 15, 3, 0.4, 9));
  EXPECT_EQ(sentirec::fit(m, 4).x_hat, sentirec::fit(m, 4).x_hat);
}

TEST(PredictRating, OutOfRange) {
  const auto model = sentirec::fit(from_rows({{1.0, 2.0}, {3.0, 4.0}}), 1);
  EXPECT_THROW(sentirec::predict_rating(model, 2, 0), sentirec::Error);
  EXPECT_THROW(sentirec::predict_rating(model, 0, 2), sentirec::Error);
}

TEST(ClampToScale, RoundsThenClamps) {
  EXPECT_EQ(sentirec::clamp_to_scale(4.4), 4);
  EXPECT_EQ(sentirec::clamp_to_scale(4.5), 5);
  EXPECT_EQ(sentirec::clamp_to_scale(-2.0), 1);
  EXPECT_EQ(sentirec::clamp_to_scale(11.2), 5);
  EXPECT_THROW(sentirec::clamp_to_scale(INFINITY), sentirec::Error);
}

TEST(MatrixFile, RoundTrip) {
  auto m = from_rows({{1.25, std::nullopt, -3.5}, {std::nullopt, 0.1, 7.0}});
  std::stringstream buf;
  sentirec::write_matrix(buf, m);
  EXPECT_EQ(buf.str().substr(0, buf.str().find('\n')), R"({"m":2,"n":3})");
  EXPECT_EQ(sentirec::read_matrix(buf), m);
  std::istringstream bad(R"({"m":1,"n":1})"
                         "\n"
                         R"({"user_id":2,"movie_id":1,"value":1.0})");
  EXPECT_THROW(sentirec::read_matrix(bad), sentirec::Error);
}

}  // namespace
