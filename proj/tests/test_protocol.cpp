#include <gtest/gtest.h>

#include "sdris/datasets.hpp"
#include "sdris/protocol.hpp"

namespace sdris {
namespace {

LabeledSamples small_data(std::uint64_t seed = 4) {
  NuisanceSpec s;
  s.n_classes = 3;
  s.per_class = 6;
  s.n_features = 12;
  s.n_irrelevance = 12;
  s.seed = seed;
  NuisanceClasses d = synth_nuisance_classes(s);
  return {d.plus, d.labels, d.minus};
}

ProtocolOptions quick() {
  ProtocolOptions o;
  o.dims = {1, 2};
  o.lambdas = {0.0, 1.0};
  o.splits = 3;
  o.fit.max_outer_iters = 100;
  return o;
}

void expect_same(const std::optional<SplitOutcome>& a, const std::optional<SplitOutcome>& b) {
  ASSERT_EQ(a.has_value(), b.has_value());
  if (!a) return;
  EXPECT_EQ(a->chosen.d, b->chosen.d);
  EXPECT_EQ(a->chosen.lambda, b->chosen.lambda);
  EXPECT_EQ(a->train_index, b->train_index);
  EXPECT_EQ(a->test_index, b->test_index);
}

TEST(RunProtocol, DeterministicAcrossJobs) {
  const LabeledSamples data = small_data();
  ProtocolOptions a = quick(), b = quick();
  b.jobs = 3;
  const ProtocolResult ra = run_protocol(data, a), rb = run_protocol(data, b);
  ASSERT_EQ(ra.methods.size(), 4u);
  for (std::size_t m = 0; m < ra.methods.size(); ++m) {
    EXPECT_EQ(ra.methods[m].method, known_methods()[m]);
    EXPECT_EQ(ra.methods[m].test.mean, rb.methods[m].test.mean);
    for (std::size_t s = 0; s < 3; ++s) expect_same(ra.methods[m].splits[s], rb.methods[m].splits[s]);
  }
  EXPECT_EQ(ra.fits, 3 * 4);  // splits x (dims x lambdas)
  EXPECT_EQ(ra.failures, rb.failures);
  EXPECT_EQ(ra.unconverged, rb.unconverged);
}

TEST(RunProtocol, SingleMethodAndSingleDimension) {
  ProtocolOptions o = quick();
  o.methods = {"opca"};
  o.dims = {2};
  const ProtocolResult r = run_protocol(small_data(), o);
  ASSERT_EQ(r.methods.size(), 1u);
  const MethodReport& m = r.methods[0];
  EXPECT_EQ(m.method, "opca");
  ASSERT_EQ(m.per_dim.size(), 1u);
  for (std::size_t s = 0; s < 3; ++s) {
    ASSERT_TRUE(m.splits[s]);
    EXPECT_EQ(m.splits[s]->chosen.d, 2);
    expect_same(m.splits[s], m.per_dim[0][s]);
    EXPECT_LE(m.splits[s]->test_index, 1.0);
  }
  EXPECT_EQ(m.per_dim_test[0].mean, m.test.mean);
  EXPECT_EQ(r.fits, 0);
}

TEST(RunProtocol, PerDimensionPicksLambdaPerDimension) {
  const ProtocolResult r = run_protocol(small_data(), [] {
    ProtocolOptions o = quick();
    o.methods = {"sdris"};
    return o;
  }());
  const MethodReport& m = r.methods[0];
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t s = 0; s < 3; ++s) {
      ASSERT_TRUE(m.per_dim[k][s]);
      EXPECT_EQ(m.per_dim[k][s]->chosen.d, static_cast<Eigen::Index>(k + 1));
    }
  // The overall choice is the better of the per-dimension choices on train.
  for (std::size_t s = 0; s < 3; ++s)
    EXPECT_EQ(m.splits[s]->train_index,
              std::max(m.per_dim[0][s]->train_index, m.per_dim[1][s]->train_index));
}

TEST(RunProtocol, FailuresAreRecordedNotThrown) {
  ProtocolOptions o = quick();
  o.methods = {"pca"};
  o.dims = {1, 40};  // 40 exceeds the rank of the training rows
  const ProtocolResult r = run_protocol(small_data(), o);
  EXPECT_EQ(r.failures.size(), 3u);
  for (std::size_t s = 0; s < 3; ++s) {
    ASSERT_TRUE(r.methods[0].splits[s]);
    EXPECT_EQ(r.methods[0].splits[s]->chosen.d, 1);
    EXPECT_FALSE(r.methods[0].per_dim[1][s]);
  }
}

TEST(RunProtocol, Rejections) {
  const LabeledSamples data = small_data();
  ProtocolOptions o = quick();
  o.methods = {"lda"};
  EXPECT_THROW(run_protocol(data, o), InvalidArgument);
  o = quick();
  o.dims = {0};
  EXPECT_THROW(run_protocol(data, o), InvalidArgument);
  o = quick();
  o.lambdas = {-1.0};
  EXPECT_THROW(run_protocol(data, o), InvalidArgument);
  LabeledSamples bad = data;
  bad.labels.pop_back();
  EXPECT_THROW(run_protocol(bad, quick()), InvalidArgument);
}

}  // namespace
}  // namespace sdris
