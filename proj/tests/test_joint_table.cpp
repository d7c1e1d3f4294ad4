#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sdris/joint_table.hpp"
#include "test_support.hpp"

namespace sdris {
namespace {

using testing::oracle_entropy;
using testing::oracle_mutual_information;
using testing::random_table;

TEST(FromCounts, UniformCounts) {
  Matrix c = Matrix::Ones(2, 2);
  JointTable p = JointTable::from_counts(c);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(p.probs().data()[i], 0.25);
  EXPECT_EQ(p.x_labels(), (std::vector<std::string>{"x0", "x1"}));
  EXPECT_EQ(p.y_labels(), (std::vector<std::string>{"y0", "y1"}));
}

TEST(FromCounts, Diagonal) {
  Matrix c{{2, 0}, {0, 2}};
  JointTable p = JointTable::from_counts(c, {"a", "b"}, {"u", "v"});
  EXPECT_DOUBLE_EQ(p(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(p(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(p(1, 1), 0.5);
  EXPECT_EQ(p.x_labels()[1], "b");
}

TEST(FromCounts, RandomIsProportional) {
  Rng rng(7);
  Matrix c = testing::random_positive_counts(rng, 5, 4);
  JointTable p = JointTable::from_counts(c);
  EXPECT_NEAR(p.probs().sum(), 1.0, 1e-14);
  double total = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) total += c.data()[i];
  for (Eigen::Index i = 0; i < c.size(); ++i)
    EXPECT_NEAR(p.probs().data()[i], c.data()[i] / total, 1e-15);
}

TEST(FromCounts, Rejections) {
  EXPECT_THROW(JointTable::from_counts(Matrix::Zero(2, 2)), InvalidArgument);
  EXPECT_THROW(JointTable::from_counts(Matrix{{1, 0}, {1, 0}}), InvalidArgument);
  EXPECT_THROW(JointTable::from_counts(Matrix{{1, 1}, {0, 0}}), InvalidArgument);
  EXPECT_THROW(JointTable::from_counts(Matrix{{1, -1}, {1, 1}}), InvalidArgument);
  EXPECT_THROW(JointTable::from_counts(Matrix::Ones(1, 3)), InvalidArgument);
  EXPECT_THROW(JointTable::from_counts(Matrix::Ones(2, 2), {"a"}, {}),
               InvalidArgument);
  EXPECT_THROW(JointTable::from_counts(Matrix::Ones(2, 2), {"a", "a"}, {}),
               InvalidArgument);
  EXPECT_THROW(JointTable::from_probabilities(Matrix::Ones(2, 2)),
               InvalidArgument);
}

TEST(Marginals, Basic) {
  JointTable u = JointTable::from_counts(Matrix::Ones(2, 2));
  EXPECT_TRUE(u.marginal_x().isApprox(Vector::Constant(2, 0.5)));
  EXPECT_TRUE(u.marginal_y().isApprox(Vector::Constant(2, 0.5)));
  JointTable d = JointTable::from_counts(Matrix{{1, 0}, {0, 1}});
  EXPECT_TRUE(d.marginal_x().isApprox(Vector::Constant(2, 0.5)));
}

TEST(Marginals, MatchDirectSummation) {
  JointTable p = random_table(11, 6, 5);
  for (Eigen::Index x = 0; x < p.nx(); ++x) {
    double s = 0.0;
    for (Eigen::Index y = 0; y < p.ny(); ++y) s += p(x, y);
    EXPECT_NEAR(p.marginal_x()(x), s, 1e-14);
  }
  for (Eigen::Index y = 0; y < p.ny(); ++y) {
    double s = 0.0;
    for (Eigen::Index x = 0; x < p.nx(); ++x) s += p(x, y);
    EXPECT_NEAR(p.marginal_y()(y), s, 1e-14);
  }
}

TEST(Conditionals, IndependentTableGivesMarginal) {
  Vector px(3), py(2);
  px << 0.2, 0.3, 0.5;
  py << 0.6, 0.4;
  JointTable p = JointTable::from_counts(px * py.transpose());
  for (Eigen::Index y = 0; y < 2; ++y)
    EXPECT_TRUE(p.conditional_x_given_y(y).isApprox(px, 1e-14));
}

TEST(Conditionals, DiagonalAndDivision) {
  JointTable d = JointTable::from_counts(Matrix{{1, 0}, {0, 1}});
  Vector c = d.conditional_x_given_y(0);
  EXPECT_DOUBLE_EQ(c(0), 1.0);
  EXPECT_DOUBLE_EQ(c(1), 0.0);

  JointTable p = random_table(3, 4, 3);
  for (Eigen::Index y = 0; y < 3; ++y) {
    Vector c2 = p.conditional_x_given_y(y);
    for (Eigen::Index x = 0; x < 4; ++x)
      EXPECT_NEAR(c2(x), p(x, y) / p.marginal_y()(y), 1e-15);
  }
  for (Eigen::Index x = 0; x < 4; ++x) {
    Vector c3 = p.conditional_y_given_x(x);
    for (Eigen::Index y = 0; y < 3; ++y)
      EXPECT_NEAR(c3(y), p(x, y) / p.marginal_x()(x), 1e-15);
  }
  EXPECT_THROW(p.conditional_x_given_y(3), InvalidArgument);
}

TEST(MutualInformation, ProductIsZero) {
  Vector px(3), py(2);
  px << 0.1, 0.3, 0.6;
  py << 0.25, 0.75;
  JointTable p = JointTable::from_counts(px * py.transpose());
  EXPECT_NEAR(mutual_information(p), 0.0, 1e-15);
}

TEST(MutualInformation, DeterministicBinary) {
  JointTable d = JointTable::from_counts(Matrix{{1, 0}, {0, 1}});
  EXPECT_NEAR(mutual_information(d), std::numbers::ln2, 1e-15);
}

TEST(MutualInformation, MatchesDoubleSumOracle) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    JointTable p = random_table(100 + s, 3, 3);
    EXPECT_NEAR(mutual_information(p), oracle_mutual_information(p.probs()),
                1e-12);
  }
}

TEST(KlDivergence, Basics) {
  JointTable p = random_table(5, 3, 4);
  EXPECT_NEAR(kl_divergence(p, p), 0.0, 1e-15);
  const double a[] = {1.0, 0.0};
  const double b[] = {0.5, 0.5};
  EXPECT_NEAR(kl_divergence(std::span<const double>(a), std::span<const double>(b)),
              std::numbers::ln2, 1e-15);
  // Absolute-continuity violation.
  EXPECT_THROW(kl_divergence(std::span<const double>(b), std::span<const double>(a)),
               InvalidArgument);
  JointTable diag = JointTable::from_counts(Matrix{{1, 0}, {0, 1}});
  JointTable unif = JointTable::from_counts(Matrix::Ones(2, 2));
  EXPECT_THROW(kl_divergence(unif, diag), InvalidArgument);
}

TEST(KlDivergence, MatchesDirectSum) {
  JointTable p = random_table(21, 4, 3);
  JointTable q = random_table(22, 4, 3);
  double d = 0.0;
  for (Eigen::Index i = 0; i < p.probs().size(); ++i)
    d += p.probs().data()[i] * std::log(p.probs().data()[i] / q.probs().data()[i]);
  EXPECT_NEAR(kl_divergence(p, q), d, 1e-12);
  EXPECT_GT(kl_divergence(p, q), 0.0);
}

TEST(Entropy, Basics) {
  Vector point = Vector::Zero(4);
  point(2) = 1.0;
  EXPECT_DOUBLE_EQ(entropy(point), 0.0);
  EXPECT_NEAR(entropy(Vector::Constant(6, 1.0 / 6.0)), std::log(6.0), 1e-15);
  JointTable u = JointTable::from_counts(Matrix::Ones(3, 4));
  EXPECT_NEAR(entropy(u), std::log(12.0), 1e-14);
  JointTable p = random_table(31, 5, 4);
  EXPECT_NEAR(entropy(p), oracle_entropy(p.probs()), 1e-12);
}

// Properties over many random tables, including ones with exact zeros.
TEST(Properties, InformationIdentities) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(1000 + s);
    const Eigen::Index nx = 2 + static_cast<Eigen::Index>(rng.index(6));
    const Eigen::Index ny = 2 + static_cast<Eigen::Index>(rng.index(6));
    Matrix c = testing::random_positive_counts(rng, nx, ny, 0.0);
    // Knock out a few cells without emptying a row or column.
    for (Eigen::Index x = 0; x < nx; ++x)
      if (rng.uniform() < 0.3) c(x, static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(ny)))) = 0.0;
    for (Eigen::Index x = 0; x < nx; ++x)
      if (c.row(x).sum() == 0.0) c(x, 0) = 1.0;
    for (Eigen::Index y = 0; y < ny; ++y)
      if (c.col(y).sum() == 0.0) c(0, y) = 1.0;
    JointTable p = JointTable::from_counts(c);
    const double mi = mutual_information(p);
    EXPECT_TRUE(std::isfinite(mi));
    EXPECT_GE(mi, 0.0);
    EXPECT_NEAR(mi, entropy(p.marginal_x()) + entropy(p.marginal_y()) - entropy(p),
                1e-10);
    EXPECT_NEAR(kl_divergence(p, p.product_of_marginals()), mi, 1e-10);
  }
}

TEST(SelectColumns, Renormalizes) {
  JointTable p = random_table(41, 4, 5);
  const Eigen::Index cols[] = {1, 3};
  JointTable s = p.select_columns(cols);
  EXPECT_EQ(s.ny(), 2);
  EXPECT_NEAR(s.probs().sum(), 1.0, 1e-14);
  EXPECT_EQ(s.y_labels()[1], p.y_labels()[3]);
  EXPECT_TRUE(s.conditional_x_given_y(0).isApprox(p.conditional_x_given_y(1), 1e-14));
}

}  // namespace
}  // namespace sdris
