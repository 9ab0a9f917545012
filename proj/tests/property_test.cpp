#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "npsa/demod.hpp"
#include "npsa/parallel.hpp"
#include "npsa/pca_core.hpp"
#include "npsa/spectral.hpp"
#include "support.hpp"

namespace npsa {
namespace {

struct CorrectedPipeline {
  AnalyticField field;
  DemodCoefficients coeffs;
  double rho;
};

CorrectedPipeline run(const FringeStack& st, const PhaseSteps& steps) {
  const PcaBasis b = pca_basis(st);
  const double rho = correction_ratio(demodulate(st, plain_coefficients(b)));
  const auto c = orient(corrected_coefficients(b, rho), steps);
  return {demodulate(st, c), c, rho};
}

TEST(Property, CorrectedRecoversPhaseForRandomSteps) {
  std::mt19937_64 rng(314);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + trial % 7;
    const PhaseSteps steps(test::random_steps(rng, n));
    for (const auto& name : canonical_scene_names()) {
      const Scene s = make_scene(canonical_scene(name, 128));
      const auto r = run(sample_fringes(s, steps), steps);
      const ErrorStats e = phase_error(phase(r.field), s.phase);
      EXPECT_LT(e.rms, 0.01) << name << " trial " << trial;
      EXPECT_LE(snr_gain(r.coeffs, steps), static_cast<double>(n) + 1e-9);
    }
  }
}

TEST(Property, RatioIsAtMostOneAfterCorrection) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const PhaseSteps steps(test::random_steps(rng, 4));
    const FringeStack st = sample_fringes(make_scene(canonical_scene("tilt-8", 64)), steps);
    const auto r = run(st, steps);
    EXPECT_GT(r.rho, 0.0);
    EXPECT_LE(r.rho, 1.0);
    EXPECT_NEAR(correction_ratio(r.field), 1.0, 1e-6);
  }
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

class ThreadInvariance : public ::testing::Test {
 protected:
  void TearDown() override { parallel::set_threads(0); }
};

TEST_F(ThreadInvariance, PipelineIsBitIdentical) {
  const auto steps = PhaseSteps::preset("paper9");
  const Scene s = make_scene(canonical_scene("peaks", 96));
  std::vector<std::vector<double>> noise, cov, field;
  for (unsigned t : {1u, 2u, 7u}) {
    parallel::set_threads(t);
    const FringeStack st = sample_fringes(s, steps, {}, NoiseSpec{0.05, 77});
    noise.emplace_back(st.frame(4).values().begin(), st.frame(4).values().end());
    const Matrix c = covariance(st, estimate_background(st));
    cov.emplace_back(c.values().begin(), c.values().end());
    const auto r = run(st, steps);
    std::vector<double> flat;
    for (std::size_t i = 0; i < r.field.size(); ++i) {
      flat.push_back(r.field[i].real());
      flat.push_back(r.field[i].imag());
    }
    field.push_back(flat);
  }
  for (std::size_t k = 1; k < 3; ++k) {
    EXPECT_TRUE(same_bits(noise[0], noise[k]));
    EXPECT_TRUE(same_bits(cov[0], cov[k]));
    EXPECT_TRUE(same_bits(field[0], field[k]));
  }
}

TEST(Property, PairwiseSumIsOrderStable) {
  std::vector<double> v(1001);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (double& x : v) x = g(rng) * 1e6;
  const double a = parallel::pairwise_sum(v);
  parallel::set_threads(3);
  EXPECT_EQ(a, parallel::pairwise_sum(v));
  parallel::set_threads(0);
}

}  // namespace
}  // namespace npsa
