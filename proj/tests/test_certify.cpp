#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kurasync/certify.hpp"
#include "kurasync/dynamics.hpp"
#include "oracles.hpp"

using namespace kurasync;

namespace {

constexpr double kPi = std::numbers::pi;

AmplificationTrace run_preset(double alpha, AmpMode mode = AmpMode::numeric) {
  return amplification_run(ExpanderProfile::regular(alpha), preset_schedule(), mode, true);
}

}  // namespace

TEST(CubicRoot, Examples) {
  const double a = cubic_root_a(0.2);
  EXPECT_GE(a, 0.431);
  EXPECT_LE(a, 0.434);
  EXPECT_NEAR(cubic_root_a(1e-6), 1.0, 1e-5);
  const auto cubic = [](double x) {
    const double al = 0.1;
    return x * x * x + (2 * al - 1) * x * x + 2 * al * al * x - 2 * std::pow(al, 4);
  };
  EXPECT_NEAR(cubic_root_a(0.1), oracle::sign_scan_root(cubic, 0.0, 1.0, 10'000'000), 1e-6);
}

TEST(CubicRoot, DomainAndMonotonicity) {
  EXPECT_THROW(cubic_root_a(0.0), DomainError);
  EXPECT_THROW(cubic_root_a(0.21), DomainError);
  EXPECT_NEAR(general_mode_alpha_limit(), 0.2055, 1e-4);
  double prev = 1.0;
  for (int i = 1; i <= 200; ++i) {
    const double a = cubic_root_a(0.2055 * i / 201.0);
    EXPECT_LT(a, prev);
    prev = a;
  }
}

TEST(OrderParamBounds, Examples) {
  const auto b = order_param_bounds(0.2, false);
  EXPECT_GE(b.a, 0.431);
  EXPECT_LE(b.a, 0.434);
  EXPECT_NEAR(b.a, cubic_root_a(0.2), 1e-9);
  EXPECT_GE(order_param_bounds(0.05, false).a, 0.85);
  const double al = 0.19;
  EXPECT_GE(std::sqrt(order_param_bounds(al, false).b), 1 - 5 * al * al);
}

TEST(OrderParamBounds, Invariants) {
  for (int i = 1; i < 100; ++i) {
    const double al = 0.2 * i / 100.0;
    for (bool reg : {false, true}) {
      const auto b = order_param_bounds(al, reg);
      EXPECT_GT(b.a, 0.0);
      EXPECT_LE(b.a, 1.0);
      EXPECT_GE(b.b, 0.0);
      EXPECT_LE(b.b, 1.0);
      EXPECT_EQ(b.s_budget, al * al / b.a);
      EXPECT_GE(b.a, 1 - 3 * al);
    }
    EXPECT_NEAR(order_param_bounds(al, false).a, cubic_root_a(al), 1e-9);
    EXPECT_GE(order_param_bounds(al, true).a, order_param_bounds(al, false).a);
  }
}

TEST(OrderParamBounds, ModeBarriers) {
  EXPECT_NEAR(regular_mode_alpha_limit(), 0.24585, 1e-5);
  EXPECT_THROW(order_param_bounds(0.21, false), DomainError);
  EXPECT_NO_THROW(order_param_bounds(0.24, true));
  EXPECT_THROW(order_param_bounds(0.25, true), DomainError);
  EXPECT_THROW(order_param_bounds(-0.1, true), DomainError);
}

TEST(TheoremCondition, Examples) {
  EXPECT_EQ(theorem_condition(ExpanderProfile::regular(0.003)).verdict, Verdict::pass);
  const auto f = theorem_condition(ExpanderProfile::regular(0.0032));
  EXPECT_EQ(f.verdict, Verdict::fail);
  EXPECT_LT(f.condition1, 1.0);
  EXPECT_GE(f.condition2, 1.0);
  const auto g = theorem_condition(ExpanderProfile::regular(0.3));
  EXPECT_EQ(g.verdict, Verdict::fail);
  EXPECT_FALSE(g.reasons.empty());
  EXPECT_EQ(theorem_condition(ExpanderProfile::asserted(0, 1, 0.001, -1.0, 0.0)).verdict, Verdict::fail);
}

TEST(TheoremCondition, ClosedFormValues) {
  const double al = 0.002, cm = -0.01, cp = 0.02;
  const auto r = theorem_condition(ExpanderProfile::asserted(0, 1, al, cm, cp));
  EXPECT_NEAR(r.condition1, 64 * al * (1 + 2 * cp - cm) / ((1 + cm) * (1 + cm)), 1e-15);
  EXPECT_NEAR(r.condition2,
              64 * al * (1 + cp) * std::log((1 + cp + al) / (2 * al)) / ((1 + cm) * (1 + 5 * cp - 4 * cm)),
              1e-14);
}

TEST(TheoremCondition, VerdictMonotoneInAlpha) {
  for (double cm : {-0.05, 0.0}) {
    for (double cp : {0.0, 0.05}) {
      bool passed = false;
      for (int i = 200; i >= 1; --i) {
        const auto v = theorem_condition(ExpanderProfile::asserted(0, 1, 0.01 * i / 200.0, cm, cp)).verdict;
        if (passed) {
          EXPECT_EQ(v, Verdict::pass) << "fail below a passing alpha";
        }
        passed = passed || v == Verdict::pass;
      }
    }
  }
}

TEST(TheoremCondition, RegularCrossover) {
  const auto c = regular_condition_crossover(0.001, 0.01);
  EXPECT_GT(c.pass_at, 0.0030);
  EXPECT_LT(c.fail_at, 0.0035);
  EXPECT_LE(c.fail_at - c.pass_at, 1e-9);
  EXPECT_THROW(regular_condition_crossover(0.01, 0.02), BracketError);
}

TEST(Amplification, PresetPassesWithAngleFloor) {
  const auto t = run_preset(0.0816);
  EXPECT_EQ(t.verdict, Verdict::pass);
  EXPECT_GE(t.min_beta(), 0.117);
  EXPECT_GT(t.final_check_lhs, t.final_check_rhs);
  EXPECT_EQ(t.rows.size(), 9u);
}

TEST(Amplification, TraceInvariants) {
  for (double al : {0.02, 0.05, 0.0816}) {
    for (auto mode : {AmpMode::numeric, AmpMode::paper_proof}) {
      const auto t = run_preset(al, mode);
      for (std::size_t i = 1; i < t.rows.size(); ++i) {
        EXPECT_LT(t.rows[i].beta, t.rows[i - 1].beta);
        if (t.rows[i].mass_unit == "ratio") {
          EXPECT_GE(t.rows[i].mass, t.rows[i - 1].mass);
        }
        EXPECT_LE(t.rows[i].cap_frac, 0.5);
      }
      // A failing run records the step that exhausted the angle; all
      // earlier rows stay nonnegative.
      const std::size_t last = t.failed_step ? *t.failed_step : t.rows.size();
      for (std::size_t i = 0; i < last; ++i) {
        EXPECT_GE(t.rows[i].beta, 0.0);
      }
      if (t.verdict == Verdict::pass) {
        EXPECT_GT(t.min_beta(), 0.0);
      }
      EXPECT_EQ(t.verdict == Verdict::pass, t.final_check_lhs > t.final_check_rhs);
    }
  }
}

TEST(Amplification, PaperProofNeverBeatsNumeric) {
  for (int i = 1; i <= 60; ++i) {
    const double al = 0.002 * i;
    const auto p = ExpanderProfile::regular(al);
    for (const auto& sched : {preset_schedule(), proof_schedule(p)}) {
      Verdict num = Verdict::fail, proof = Verdict::fail;
      try {
        num = amplification_run(p, sched, AmpMode::numeric, true).verdict;
        proof = amplification_run(p, sched, AmpMode::paper_proof, true).verdict;
      } catch (const ScheduleError&) {
        continue;
      }
      if (num == Verdict::fail) {
        EXPECT_EQ(proof, Verdict::fail) << "alpha " << al;
      }
    }
  }
}

TEST(Amplification, BeyondBarrierIsFail) {
  const auto t = run_preset(0.25);
  EXPECT_EQ(t.verdict, Verdict::fail);
  EXPECT_FALSE(t.reason.empty());
}

TEST(Amplification, ProofScheduleAtSmallAlpha) {
  const auto p = ExpanderProfile::regular(0.003);
  const auto sched = proof_schedule(p);
  const auto t = amplification_run(p, sched, AmpMode::paper_proof, true);
  EXPECT_EQ(t.verdict, Verdict::pass);
  EXPECT_GT(t.rows[sched.size() - 1].beta, kPi / 4);
  EXPECT_GT(t.rows.back().beta, 3 * kPi / 16);
}

TEST(Amplification, TheoremConditionImpliesProofRun) {
  for (double al : {0.0005, 0.001, 0.002, 0.003}) {
    for (double cm : {-0.5 * al, -al}) {
      for (double cp : {0.5 * al, al, 2 * al}) {
        const auto p = ExpanderProfile::asserted(0, 1, al, cm, cp);
        if (theorem_condition(p).verdict != Verdict::pass) continue;
        EXPECT_EQ(amplification_run(p, proof_schedule(p), AmpMode::paper_proof, false).verdict, Verdict::pass)
            << al << ' ' << cm << ' ' << cp;
      }
    }
  }
}

TEST(Amplification, ScheduleErrors) {
  const auto p = ExpanderProfile::regular(0.05);
  EXPECT_THROW(amplification_run(p, {StepL44{0.1}, StepTail{0.1}}, AmpMode::numeric, true), ScheduleError);
  EXPECT_THROW(amplification_run(p, {StepTail{0.1}, StepL43{0.1, 0.3}}, AmpMode::numeric, true), ScheduleError);
  EXPECT_THROW(amplification_run(p, {StepL43{0.1, 0.0}}, AmpMode::numeric, true), ScheduleError);
  EXPECT_THROW(amplification_run(p, {StepL43{1.5, 0.3}}, AmpMode::numeric, true), ScheduleError);
  const auto open = amplification_run(p, {StepL43{0.2, 0.3}}, AmpMode::numeric, true);
  EXPECT_EQ(open.verdict, Verdict::fail);
}

TEST(Amplification, AngleExhaustionMarksStep) {
  // Huge rho drives the first decrement argument past 1.
  const auto t = amplification_run(ExpanderProfile::regular(0.1), {StepL43{0.5, 20.0}, StepTail{0.2}},
                                   AmpMode::numeric, true);
  EXPECT_EQ(t.verdict, Verdict::fail);
  ASSERT_TRUE(t.failed_step.has_value());
  EXPECT_EQ(*t.failed_step, 1u);
}

TEST(MaxAlpha, PresetThreshold) {
  const double a = max_alpha_regular(preset_schedule(), {0.05, 0.12, 1e-5});
  EXPECT_GE(a, 0.0816);
  EXPECT_LE(a, 0.12);
}

TEST(MaxAlpha, ProofScheduleBracket) {
  // The exact replay of the proof schedule certifies far beyond the closed
  // form, so the narrow bracket has no crossover.
  EXPECT_THROW(max_alpha_regular(proof_schedule, {0.001, 0.01, 1e-5}, AmpMode::paper_proof), BracketError);
  const double a = max_alpha_regular(proof_schedule, {0.001, 0.2, 1e-5}, AmpMode::paper_proof);
  EXPECT_GE(a, 0.0031);
}

TEST(MaxAlpha, BeyondBarrierBracketError) {
  EXPECT_THROW(max_alpha_regular(preset_schedule(), {0.25, 0.3, 1e-5}), BracketError);
  EXPECT_THROW(max_alpha_regular(preset_schedule(), {0.1, 0.05, 1e-5}), InputError);
}

TEST(Ramanujan, Degrees) {
  EXPECT_EQ(min_ramanujan_degree(0.0816), 600u);
  EXPECT_EQ(min_ramanujan_degree(0.0031), 416233u);
  EXPECT_EQ(min_ramanujan_degree(1.0), 3u);
  const auto d = min_ramanujan_degree(0.0816);
  EXPECT_GT(2 * std::sqrt(d - 2.0) / (d - 1.0), 0.0816);
  EXPECT_THROW(min_ramanujan_degree(0.0), InputError);
  EXPECT_THROW(min_ramanujan_degree(1.5), InputError);
}

TEST(Soundness, CertifiedRegularGraphsSynchronize) {
  const double threshold = max_alpha_regular(preset_schedule(), {});
  int certified = 0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto g = gen_random_regular(200, 160, s);
    const double alpha = oracle::dense_alpha(g, 160.0);
    if (alpha >= threshold) continue;
    ++certified;
    for (std::uint64_t run = 0; run < 50; ++run) {
      const auto r = flow(g, random_phase_state(200, derive_seed(s, run)));
      EXPECT_GT(std::abs(daido(r.final, 1)), 1 - 1e-6);
    }
  }
  EXPECT_GT(certified, 0);
}
