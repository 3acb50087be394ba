#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "sgvi/emd.hpp"
#include "sgvi/error.hpp"
#include "sgvi/random_instance.hpp"

namespace sgvi {
namespace {

TEST(EmdStep, ZeroOrConstantGradientLeavesPiUnchanged) {
  const VariationalParams pi = VariationalParams::from({0.1, 0.6, 0.3});
  const VariationalParams a = emd_step(pi, Vector{0, 0, 0}, 0.7);
  const VariationalParams b = emd_step(pi, Vector{2.5, 2.5, 2.5}, 0.7);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(a.pi[k], pi.pi[k], 1e-15);
    EXPECT_NEAR(b.pi[k], pi.pi[k], 1e-15);
  }
}

TEST(EmdStep, TwoCategoryExample) {
  const VariationalParams out = emd_step(VariationalParams::from({0.5, 0.5}), Vector{1.0, 0.0}, 1.0);
  EXPECT_NEAR(out.pi[0], 0.7310585786300049, 1e-12);
  EXPECT_NEAR(out.pi[1], 0.2689414213699951, 1e-12);
}

TEST(EmdStep, Errors) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(emd_step(VariationalParams::uniform(2), Vector{inf, 0.0}, 1.0), ArgumentError);
  EXPECT_THROW(emd_step(VariationalParams::uniform(2), Vector{std::nan(""), 0.0}, 1.0), ArgumentError);
  EXPECT_THROW(emd_step(VariationalParams{{0.0, 1.0}}, Vector{0.0, 0.0}, 1.0), ArgumentError);
  EXPECT_THROW(emd_step(VariationalParams::uniform(2), Vector{0.0}, 1.0), ShapeError);
}

TEST(EmdStep, StaysOnSimplex) {
  Rng rng(6);
  VariationalParams pi = VariationalParams::uniform(5);
  for (int i = 1; i <= 500; ++i) {
    pi = emd_step(pi, random_logits(5, 3.0, rng), emd_learning_rate(1.0, i));
    EXPECT_NEAR(sum(pi.pi), 1.0, 1e-12);
    for (double p : pi.pi) EXPECT_GT(p, 0.0);
  }
}

TEST(EmdStep, ExtremeGradientKeepsEntriesPositive) {
  VariationalParams pi = VariationalParams::uniform(3);
  for (int i = 0; i < 5; ++i) {
    pi = emd_step(pi, Vector{0.0, -900.0, 400.0}, 1.0);
    EXPECT_NEAR(sum(pi.pi), 1.0, 1e-12);
    for (double p : pi.pi) EXPECT_GT(p, 0.0);
  }
  EXPECT_NO_THROW(optimize_local(Vector{0.0, -900.0, 400.0}, EmdConfig{}, 0.5, 1));
}

TEST(EmdSchedule, IsGammaOverSqrtI) {
  for (int i = 1; i <= 100; ++i) EXPECT_EQ(emd_learning_rate(0.8, i), 0.8 / std::sqrt(static_cast<double>(i)));
}

TEST(EmdConfig, Validation) {
  EmdConfig c;
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = EmdConfig{};
  c.gamma0 = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = EmdConfig{};
  c.samples = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(OptimizeLocal, UninformativeNodeStaysNearUniform) {
  EmdConfig cfg;
  const EmdResult r = optimize_local(Vector{0.4, 0.4, 0.4, 0.4}, cfg, 0.5, 3);
  EXPECT_LE(total_variation(r.pi.pi, VariationalParams::uniform(4).pi), 0.05);
}

TEST(OptimizeLocal, PeakedNodeFindsItsMode) {
  EmdConfig cfg;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const EmdResult r = optimize_local(Vector{5.0, 0.0, 0.0}, cfg, 0.2, seed);
    hits += argmax(r.pi.pi) == 0;
  }
  EXPECT_GE(hits, 99);
}

TEST(OptimizeLocal, InfiniteEpsilonMeansOneUpdate) {
  EmdConfig cfg;
  cfg.epsilon = std::numeric_limits<double>::infinity();
  const EmdResult r = optimize_local(Vector{1.0, 0.0, -1.0}, cfg, 0.5, 1);
  EXPECT_EQ(r.updates, 1);
  EXPECT_TRUE(r.converged);
}

TEST(OptimizeLocal, DeterministicAndFixedNoiseMode) {
  EmdConfig cfg;
  const Vector logits{1.0, 0.2, -0.5, 0.3};
  const EmdResult a = optimize_local(logits, cfg, 0.5, 10);
  const EmdResult b = optimize_local(logits, cfg, 0.5, 10);
  EXPECT_EQ(a.pi.pi, b.pi.pi);
  EXPECT_EQ(a.history, b.history);
  cfg.fixed_noise = true;
  const EmdResult c = optimize_local(logits, cfg, 0.5, 10);
  EXPECT_NE(a.history, c.history);
}

TEST(OptimizeLocal, RandomInitIsOnSimplex) {
  EmdConfig cfg;
  cfg.random_init = true;
  const VariationalParams pi = initial_pi(6, cfg, 3);
  EXPECT_NEAR(sum(pi.pi), 1.0, 1e-12);
  EXPECT_NE(pi.pi, VariationalParams::uniform(6).pi);
}

// Exact expected single-sample objective over hard samples:
//   F(pi) = sum_k pi_k L_k - sum_k pi_k log pi_k,  grad_k = L_k - log pi_k - 1,
// maximized by softmax(L).
ObjectiveValue exact_elbo(const Vector& logits, const VariationalParams& pi, bool want) {
  ObjectiveValue out;
  for (std::size_t k = 0; k < pi.size(); ++k) out.value += pi.pi[k] * (logits[k] - std::log(pi.pi[k]));
  if (want) {
    for (std::size_t k = 0; k < pi.size(); ++k) out.gradient.push_back(logits[k] - std::log(pi.pi[k]) - 1.0);
  }
  return out;
}

TEST(EmdMaximize, ConvergesOnDeterministicSurrogate) {
  for (double gamma0 : {1.0, 0.3}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      const std::size_t v = 2 + seed % 4;
      const Vector logits = random_logits(v, 2.0, rng);
      EmdConfig cfg;
      cfg.max_iters = 200;
      cfg.gamma0 = gamma0;
      cfg.epsilon = 1e-15;
      const EmdResult r = emd_maximize(VariationalParams::uniform(v), cfg,
                                       [&](const VariationalParams& pi, int, bool want) {
                                         return exact_elbo(logits, pi, want);
                                       });
      EXPECT_LT(kl_divergence(r.pi.pi, softmax(logits)), 1e-3) << "seed " << seed;
      for (std::size_t i = 1; i < r.history.size(); ++i) {
        EXPECT_GE(r.history[i], r.history[i - 1] - 1e-12);
      }
    }
  }
}

}  // namespace
}  // namespace sgvi
