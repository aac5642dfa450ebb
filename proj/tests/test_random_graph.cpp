#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kurasync/random_graph.hpp"
#include "oracles.hpp"

using namespace kurasync;

TEST(HFunc, Examples) {
  EXPECT_EQ(h_func(0.0), 0.0);
  EXPECT_NEAR(h_func(std::numbers::e - 1), 1.0, 1e-15);
  EXPECT_NEAR(h_func(-1 + 1e-12), 1.0, 1e-9);
  EXPECT_THROW(h_func(-1.0), DomainError);
  double prev = h_func(-0.999);
  for (int i = 1; i < 1000; ++i) {
    const double c = -0.999 + 0.999 * i / 999.0;
    EXPECT_LT(h_func(c), prev);
    prev = h_func(c);
  }
}

TEST(GammaRoots, Examples) {
  const auto near1 = gamma_roots(1 + 1e-6);
  EXPECT_NEAR(near1.c_minus, -1.0, 1e-3);
  EXPECT_NEAR(near1.c_plus, std::numbers::e - 1, 1e-3);
  const auto r = gamma_roots(2.0);
  const auto f = [](double c) { return h_func(c) - 0.5; };
  EXPECT_NEAR(r.c_minus, oracle::sign_scan_root(f, -1 + 1e-9, 0.0, 2'000'001), 1e-6);
  EXPECT_NEAR(r.c_plus, oracle::sign_scan_root(f, 1e-9, 3.0, 3'000'001), 1e-6);
  const auto big = gamma_roots(1e6);
  EXPECT_LT(std::abs(big.c_minus), 1e-2);
  EXPECT_LT(std::abs(big.c_plus), 1e-2);
  EXPECT_THROW(gamma_roots(1.0), DomainError);
}

TEST(GammaRoots, GridProperties) {
  RootPair prev{-1.0, std::numbers::e - 1};
  for (int i = 0; i <= 200; ++i) {
    const double g = 1.001 * std::pow(1e6 / 1.001, i / 200.0);
    const auto r = gamma_roots(g);
    EXPECT_LT(std::abs(h_func(r.c_minus) - 1 / g), 1e-9);
    EXPECT_LT(std::abs(h_func(r.c_plus) - 1 / g), 1e-9);
    EXPECT_GT(r.c_minus, -1.0);
    EXPECT_LT(r.c_minus, 0.0);
    EXPECT_GT(r.c_plus, 0.0);
    EXPECT_GT(r.c_plus, -r.c_minus);
    EXPECT_GT(r.c_minus, prev.c_minus);
    EXPECT_LT(r.c_plus, prev.c_plus);
    prev = r;
  }
}

TEST(GammaRootsEps, Examples) {
  const auto lim = gamma_roots(2.0);
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const auto r = gamma_roots_eps(2.0, eps);
    EXPECT_NEAR(r.c_minus, lim.c_minus, 10 * eps);
    EXPECT_NEAR(r.c_plus, lim.c_plus, 10 * eps);
  }
  const double g = 1.5, e = 0.1;
  const auto r = gamma_roots_eps(g, e);
  const auto lhs = [&](double u) { return g * ((1 + u) * std::log1p(u) - u); };
  EXPECT_NEAR(lhs(r.c_minus - e), 1 + e, 1e-10);
  EXPECT_NEAR(lhs(r.c_plus + e), 1 + e, 1e-10);
  EXPECT_THROW(gamma_roots_eps(1.05, 0.1), DomainError);
  EXPECT_THROW(gamma_roots_eps(200.0, 0.1), DomainError);
  EXPECT_THROW(gamma_roots_eps(2.0, 0.0), DomainError);
}

TEST(GammaRootsEps, Sandwich) {
  for (double e : {0.05, 0.2, 0.5}) {
    for (double g = 1 + e + 0.01; g < 1 + 1 / (e * e); g *= 1.3) {
      const auto lim = gamma_roots(g);
      const auto r = gamma_roots_eps(g, e);
      EXPECT_LE(lim.c_minus, r.c_minus);
      EXPECT_LT(r.c_minus, 0.0);
      EXPECT_GT(r.c_plus, 0.0);
      EXPECT_LE(r.c_plus, lim.c_plus);
    }
  }
}

TEST(ErPrediction, VacuousAtDeskScale) {
  const auto e = er_prediction(1e4, 1.5, 0.3);
  EXPECT_NEAR(e.alpha_pred, 6 / std::sqrt(1.5 * std::log(1e4)), 1e-12);
  EXPECT_NEAR(e.alpha_pred, 1.614, 1e-3);
  EXPECT_EQ(e.verdict, kVacuousVerdict);
  EXPECT_NEAR(e.p, 1.5 * std::log(1e4) / 1e4, 1e-15);
  EXPECT_LT(e.headline.c_minus, 0.0);
  EXPECT_GT(e.headline.c_plus, 0.0);
}

TEST(ErPrediction, AlphaAtLargeDegree) {
  const auto e = er_prediction_log_n(1800.0, 2.0, 0.3);
  EXPECT_NEAR(e.alpha_pred, 0.1, 1e-12);
  EXPECT_NE(e.verdict, kVacuousVerdict);
}

TEST(ErPrediction, ProbabilityAboveOneRejected) {
  EXPECT_THROW(er_prediction(3, 3.0, 0.5), DomainError);
  EXPECT_THROW(er_prediction(2, 1.5, 0.3), DomainError);
}

TEST(FailureProbability, DecreasesInN) {
  const double a = er_failure_expression(1e3, 2.0, 0.5);
  const double b = er_failure_expression(1e6, 2.0, 0.5);
  const double c = er_failure_expression(1e9, 2.0, 0.5);
  EXPECT_GT(a, b);
  EXPECT_GT(b, c);
  EXPECT_EQ(er_failure_probability(1e3, 2.0, 0.5), 1.0);
}

TEST(FailureProbability, ExtendedPrecisionOracle) {
  const long double n = 1e6L, g = 2.0L, e = 0.5L;
  const auto c = gamma_roots_eps(2.0, 0.5);
  const long double L = std::log(n);
  const long double p = g * L / n;
  const long double kplus = std::ceil((1 + c.c_plus - e) * g * L);
  const long double cm = c.c_minus, cp = c.c_plus;
  const long double v = (1 / ((cm + e) * (cm + e)) + (1 + cp - e) / (cp - e)) * std::pow(L, 4.0L) *
                            std::pow(n, -e) * std::exp(2 * p * kplus) +
                        2 * std::pow(n, -g);
  EXPECT_NEAR(er_failure_expression(1e6, 2.0, 0.5) / static_cast<double>(v), 1.0, 1e-12);
}

TEST(Chernoff, Examples) {
  EXPECT_EQ(chernoff_degree_bound(1e5, 3 / 0.25, 0.5), 1.0);
  EXPECT_NEAR(chernoff_degree_bound(1e6, 24, 0.5), 2e-6, 1e-18);
}

TEST(Chernoff, MonteCarloBelowBound) {
  const double n = 5000, gamma = 30, eps = 0.3;
  const double p = gamma * std::log(n) / n, pn = p * n;
  int bad = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto g = gen_erdos_renyi(5000, p, s);
    const auto ext = degree_extrema(g);
    if (std::abs(ext.min - pn) >= eps * pn || std::abs(ext.max - pn) >= eps * pn) ++bad;
  }
  EXPECT_LE(bad / 200.0, chernoff_degree_bound(n, gamma, eps));
}

TEST(BinomTail, Examples) {
  const auto a = binom_tail_ratio_check(100, 0.05, 2, 0.5, TailSide::below);
  EXPECT_EQ(a.bound, 4.0);
  EXPECT_LE(a.exact_ratio, a.bound);
  EXPECT_NEAR(a.exact_ratio, static_cast<double>(oracle::direct_tail_ratio(99, 0.05L, 2, true)), 1e-12);
  const auto b = binom_tail_ratio_check(200, 0.1, 40, 1.0, TailSide::above);
  EXPECT_EQ(b.bound, 2.0);
  EXPECT_LE(b.exact_ratio, b.bound);
  EXPECT_NEAR(b.exact_ratio, static_cast<double>(oracle::direct_tail_ratio(199, 0.1L, 40, false)), 1e-12);
  EXPECT_EQ(binom_tail_ratio_check(100, 0.05, 0, 0.5, TailSide::below).exact_ratio, 1.0);
}

TEST(BinomTail, HypothesisViolations) {
  EXPECT_THROW(binom_tail_ratio_check(100, 0.05, 3, 0.5, TailSide::below), DomainError);
  EXPECT_THROW(binom_tail_ratio_check(100, 0.05, 2, 1.5, TailSide::below), DomainError);
  EXPECT_THROW(binom_tail_ratio_check(200, 0.1, 30, 1.0, TailSide::above), DomainError);
  EXPECT_THROW(binom_tail_ratio_check(200, 0.1, 200, 1.0, TailSide::above), DomainError);
}

TEST(BinomTail, RandomizedSweepAgainstDirectSums) {
  Rng rng(2024);
  int cases = 0;
  while (cases < 500) {
    const auto n = 50 + rng.below(3000);
    const bool below = rng.uniform() < 0.5;
    const double c = below ? rng.uniform(0.05, 0.95) : rng.uniform(0.05, 3.0);
    double p = rng.uniform(0.005, 0.5);
    if (below) p = std::min(p, c / (1 - c * c));
    const double pn = p * n;
    std::uint64_t k;
    if (below) {
      const double top = std::floor((1 - c) * pn);
      if (top < 0) continue;
      k = rng.below(static_cast<std::uint64_t>(top) + 1);
    } else {
      const double bottom = std::ceil((1 + c) * pn);
      if (bottom > n - 1) continue;
      k = static_cast<std::uint64_t>(bottom) + rng.below(n - static_cast<std::uint64_t>(bottom));
    }
    const auto r = binom_tail_ratio_check(n, p, k, c, below ? TailSide::below : TailSide::above);
    EXPECT_LE(r.exact_ratio, r.bound);
    const double direct = static_cast<double>(oracle::direct_tail_ratio(n - 1, p, k, below));
    EXPECT_NEAR(r.exact_ratio / direct, 1.0, 1e-9);
    ++cases;
  }
}

TEST(Symmetrization, PublishedConstants) {
  EXPECT_LE(symmetrization_factor(2, 4), 7.91);
  EXPECT_LE(symmetrization_factor(25, 450000), 2.996);
  for (const auto& row : kSymmetrizationTable) {
    EXPECT_LE(symmetrization_factor(row.alpha_param, row.n0), row.constant) << row.alpha_param;
  }
  double prev = symmetrization_factor(3, 10);
  for (double n = 20; n < 1e7; n *= 2) {
    EXPECT_LT(symmetrization_factor(3, n), prev);
    prev = symmetrization_factor(3, n);
  }
}

TEST(Symmetrization, MonteCarloMeanNormBelowBound) {
  const double n = 500, p = 0.3;
  double total = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    total += oracle::dense_alpha(gen_erdos_renyi(500, p, s), p * n) * p * n;
  }
  EXPECT_LE(total / 50, symmetrization_norm_bound(n, p, 3));
}

TEST(Concentration, Examples) {
  const double n = 1e5, g = 2.0;
  const auto c = concentration_tail_gamma(n, g);
  EXPECT_LE(c.threshold, 6 * std::sqrt(g * std::log(n)) + 1e-12);
  EXPECT_NEAR(c.tail, 2 * std::pow(n, -g), 1e-20);
  EXPECT_LT(concentration_tail(2000, 0.2, 40).tail, 1e-150);
  EXPECT_THROW(concentration_tail(999, 0.2, 1), DomainError);
  EXPECT_THROW(concentration_tail(2000, 0.2, 0), DomainError);
}

TEST(Concentration, MonteCarloExceedance) {
  const double n = 2000, p = 0.2, t = 4;
  const auto c = concentration_tail(n, p, t);
  int over = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto g = gen_erdos_renyi(2000, p, s);
    if (centered_adjacency_alpha(g, p * n, 1e-8) * p * n >= c.threshold) ++over;
  }
  EXPECT_LE(over / 100.0, c.tail);
}

TEST(Calibration, DegreeExtremaInsidePredictedWindow) {
  const double n = 3000, gamma = 3;
  const double p = gamma * std::log(n) / n, pn = p * n;
  const auto r = gamma_roots(gamma);
  int inside = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto ext = degree_extrema(gen_erdos_renyi(3000, p, s));
    if (ext.min >= (1 + r.c_minus - 0.15) * pn && ext.max <= (1 + r.c_plus + 0.15) * pn) ++inside;
  }
  EXPECT_GE(inside, 28);
}
