#include <gtest/gtest.h>

#include <atomic>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "npsa/parallel.hpp"

namespace npsa {
namespace {

class ThreadCount : public ::testing::TestWithParam<unsigned> {
 protected:
  void SetUp() override { parallel::set_threads(GetParam()); }
  void TearDown() override { parallel::set_threads(0); }
};

TEST_P(ThreadCount, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel::for_each_index(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST_P(ThreadCount, PropagatesExceptions) {
  EXPECT_THROW(parallel::for_each_index(100,
                                        [](std::size_t i) {
                                          if (i == 57) throw std::runtime_error("boom");
                                        }),
               std::runtime_error);
}

TEST_P(ThreadCount, EmptyRangeIsNoop) {
  bool called = false;
  parallel::for_each_index(0, [&](std::size_t) { called = true; });
  EXPECT_FALSE(called);
}

INSTANTIATE_TEST_SUITE_P(Workers, ThreadCount, ::testing::Values(1u, 2u, 3u, 8u));

TEST(PairwiseSum, SmallInputs) {
  EXPECT_EQ(parallel::pairwise_sum(std::vector<double>{}), 0.0);
  EXPECT_EQ(parallel::pairwise_sum(std::vector<double>{2.5}), 2.5);
  EXPECT_EQ(parallel::pairwise_sum(std::vector<double>{1, 2, 3, 4}), 10.0);
}

TEST(PairwiseSum, MatchesLongDoubleAccumulation) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(100000);
  for (double& x : v) x = u(rng);
  long double ref = 0.0L;
  for (double x : v) ref += x;
  EXPECT_NEAR(parallel::pairwise_sum(v), static_cast<double>(ref), 1e-11);
}

TEST(Threads, ZeroSelectsHardware) {
  parallel::set_threads(0);
  EXPECT_GE(parallel::threads(), 1u);
  parallel::set_threads(5);
  EXPECT_EQ(parallel::threads(), 5u);
  parallel::set_threads(0);
}

}  // namespace
}  // namespace npsa
