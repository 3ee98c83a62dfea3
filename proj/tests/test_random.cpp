#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "wsncov/random.hpp"

using wsncov::RandomStream;

TEST(RandomStream, SameKeySameSequence) {
  auto a = RandomStream::for_replication(42, 7);
  auto b = RandomStream::for_replication(42, 7);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(RandomStream, DistinctIndicesDiverge) {
  auto a = RandomStream::for_replication(42, 0);
  auto b = RandomStream::for_replication(42, 1);
  auto c = RandomStream::for_replication(43, 0);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform(), y = b.uniform(), z = c.uniform();
    same_ab += x == y;
    same_ac += x == z;
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(RandomStream, UniformInUnitInterval) {
  auto s = RandomStream::for_replication(1, 1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Var(U) = 1/12; 5 sigma.
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

namespace {

struct Moments {
  double mean, variance;
};

Moments poisson_moments(double lambda, int n, std::uint64_t seed) {
  auto s = RandomStream::for_replication(seed, 0);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(s.poisson(lambda));
    sum += k;
    sum2 += k * k;
  }
  const double mean = sum / n;
  return {mean, sum2 / n - mean * mean};
}

}  // namespace

class PoissonSampler : public ::testing::TestWithParam<double> {};

TEST_P(PoissonSampler, MeanAndVarianceMatch) {
  const double lambda = GetParam();
  const int n = 100000;
  const Moments m = poisson_moments(lambda, n, 99);
  // SE of the sample mean is sqrt(lambda/n); of the sample variance ~ lambda sqrt(2/n) for large lambda.
  EXPECT_NEAR(m.mean, lambda, 5.0 * std::sqrt(lambda / n));
  EXPECT_NEAR(m.variance, lambda, 5.0 * std::sqrt((2.0 * lambda * lambda + lambda) / n));
}

INSTANTIATE_TEST_SUITE_P(InversionAndRejection, PoissonSampler,
                         ::testing::Values(0.05, 1.0, 4.5, 29.9, 30.0, 75.0, 1e3, 1e5));

TEST(PoissonSamplerPmf, SmallMeanFrequenciesMatchPmf) {
  auto s = RandomStream::for_replication(5, 5);
  const double lambda = 2.0;
  const int n = 200000;
  std::vector<int> counts(20, 0);
  for (int i = 0; i < n; ++i) {
    const auto k = s.poisson(lambda);
    if (k < counts.size()) ++counts[k];
  }
  double p = std::exp(-lambda);
  for (int k = 0; k < 8; ++k) {
    if (k > 0) p *= lambda / k;
    EXPECT_NEAR(counts[k] / double(n), p, 5.0 * std::sqrt(p * (1 - p) / n)) << "k=" << k;
  }
}

TEST(PoissonSamplerPmf, LargeMeanFrequenciesNearMode) {
  // PTRS branch: check the probability of the modal band.
  auto s = RandomStream::for_replication(8, 8);
  const double lambda = 100.0;
  const int n = 200000;
  int band = 0;
  for (int i = 0; i < n; ++i) {
    const auto k = s.poisson(lambda);
    band += (k >= 95 && k <= 105);
  }
  double p = 0.0;
  for (int k = 95; k <= 105; ++k) p += std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
  EXPECT_NEAR(band / double(n), p, 5.0 * std::sqrt(p * (1 - p) / n));
}

TEST(PoissonSamplerPmf, ZeroMeanIsZero) {
  auto s = RandomStream::for_replication(0, 0);
  EXPECT_EQ(s.poisson(0.0), 0u);
  EXPECT_THROW(s.poisson(-1.0), std::invalid_argument);
}
