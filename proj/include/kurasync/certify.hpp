#pragma once

// Executable synchronization certificates for expander graphs.
//
// Three layers:
//   * lower bounds a <= rho_1^2 and b <= |rho_2|^2 valid at every stable state
//     of an (n, d, alpha)-expander, and the resulting budget
//       (1/n) sum_x s(theta_x) <= alpha^2 / a;
//   * the closed-form sufficient condition on (alpha, c-, c+);
//   * the amplification engine, which replays the arc-growing argument as
//     scale-free arithmetic on angles beta_k and mass ratios c_k / c_0 and
//     declares a pass when the certified mass on the arcs forces
//     sum_x s(theta_x) above the budget (so no non-synchronized stable state
//     exists).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "kurasync/errors.hpp"
#include "kurasync/spectral.hpp"

namespace kurasync {

// ---------------------------------------------------------------------------
// Order-parameter bounds

namespace detail {

/// Fixed-point cubic a^3 + (k alpha/2 - 1) a^2 + 2 alpha^2 a - 2 alpha^4 of
/// the recursion a = (1 + b - k alpha)/2, b = (1 - 2 alpha^2/a)^2.
inline double order_cubic(double a, double alpha, double k) {
  return ((a + (k * alpha / 2.0 - 1.0)) * a + 2.0 * alpha * alpha) * a -
         2.0 * alpha * alpha * alpha * alpha;
}

inline double order_cubic_discriminant(double alpha, double k) {
  const double B = k * alpha / 2.0 - 1.0;
  const double C = 2.0 * alpha * alpha;
  const double D = -2.0 * alpha * alpha * alpha * alpha;
  return 18.0 * B * C * D - 4.0 * B * B * B * D + B * B * C * C - 4.0 * C * C * C -
         27.0 * D * D;
}

/// Smallest alpha > 0 at which the cubic acquires a second real root. Below
/// it the recursion has a single fixed point; at it the limit jumps to a
/// lower branch.
inline double first_discriminant_root(double k) {
  double lo = 1e-3;
  double hi = lo;
  while (order_cubic_discriminant(hi, k) < 0.0) {
    lo = hi;
    hi += 1e-3;
    if (hi > 1.0) throw ConsistencyError("order cubic never loses uniqueness on (0, 1]");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (order_cubic_discriminant(mid, k) < 0.0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace detail

/// Upper end of the domain of cubic_root_a (about 0.2055).
inline double general_mode_alpha_limit() {
  static const double v = detail::first_discriminant_root(4.0);
  return v;
}

/// Upper end of the validity of the regular-graph recursion (about 0.24585).
inline double regular_mode_alpha_limit() {
  static const double v = detail::first_discriminant_root(3.0);
  return v;
}

/// Unique real root of a^3 + (2 alpha - 1) a^2 + 2 alpha^2 a - 2 alpha^4 on
/// [2 alpha^4, 1], by bisection to 1e-12.
inline double cubic_root_a(double alpha) {
  if (!(alpha > 0.0 && alpha < general_mode_alpha_limit())) {
    throw DomainError("cubic_root_a: alpha outside (0, " + std::to_string(general_mode_alpha_limit()) +
                      ")");
  }
  double lo = 2.0 * std::pow(alpha, 4);
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (detail::order_cubic(mid, alpha, 4.0) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct OrderParamBounds {
  double alpha = 0.0;
  double a = 0.0;         // rho_1^2 >= a
  double b = 0.0;         // |rho_2|^2 >= b
  double s_budget = 0.0;  // (1/n) sum_x s(theta_x) <= alpha^2 / a
  bool regular_mode = false;
  std::size_t iterations = 0;
};

/// Limits of a_{k+1} = (1 + b_k - m alpha)/2, b_{k+1} = (1 - 2 alpha^2/a_{k+1})^2
/// from a_0 = b_0 = 0, with m = 4 in general and m = 3 for regular graphs.
/// Both sequences must increase monotonically; the domain is alpha <= 1/5
/// (general) or alpha < regular_mode_alpha_limit() (regular).
inline OrderParamBounds order_param_bounds(double alpha, bool regular_mode) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and >= 0");
  const double limit = regular_mode ? regular_mode_alpha_limit() : 0.2;
  const bool inside = regular_mode ? alpha < limit : alpha <= limit;
  if (!inside) {
    throw DomainError(std::string("order_param_bounds: alpha = ") + std::to_string(alpha) +
                      " beyond the " + (regular_mode ? "regular" : "general") + " mode limit " +
                      std::to_string(limit));
  }
  const double m = regular_mode ? 3.0 : 4.0;
  OrderParamBounds out;
  out.alpha = alpha;
  out.regular_mode = regular_mode;
  double a = 0.0, b = 0.0;
  for (std::size_t k = 1; k <= 1'000'000; ++k) {
    const double a_next = (1.0 + b - m * alpha) / 2.0;
    if (!(a_next > 2.0 * alpha * alpha)) {
      throw DomainError("order_param_bounds: iterate fell below 2 alpha^2");
    }
    const double q = 1.0 - 2.0 * alpha * alpha / a_next;
    const double b_next = q * q;
    if (a_next < a || b_next < b) throw DomainError("order_param_bounds: lost monotonicity");
    const bool done = std::abs(a_next - a) < 1e-14;
    a = a_next;
    b = b_next;
    if (done) {
      out.a = a;
      out.b = b;
      out.s_budget = alpha * alpha / a;
      out.iterations = k;
      return out;
    }
  }
  throw DomainError("order_param_bounds: no convergence in 1e6 iterations");
}

// ---------------------------------------------------------------------------
// Closed-form condition

enum class Verdict { pass, fail };

inline std::string to_string(Verdict v) { return v == Verdict::pass ? "pass" : "fail"; }

struct CertResult {
  Verdict verdict = Verdict::fail;
  double condition1 = 0.0;
  double condition2 = 0.0;
  std::vector<std::string> reasons;  // why the verdict is fail; empty on pass
};

///   condition1 = 64 a (1 + 2c+ - c-) / (1 + c-)^2
///   condition2 = 64 a (1 + c+) log((1 + c+ + a)/(2a)) / ((1 + c-)(1 + 5c+ - 4c-))
/// pass iff both < 1, alpha <= 1/5 and c- > -1. alpha = 0 gives 0 for both.
inline CertResult theorem_condition(const ExpanderProfile& p) {
  if (!std::isfinite(p.alpha) || !std::isfinite(p.c_minus) || !std::isfinite(p.c_plus)) {
    throw InputError("profile fields must be finite");
  }
  const double al = p.alpha, cm = p.c_minus, cp = p.c_plus;
  CertResult r;
  if (al == 0.0) {
    r.condition1 = 0.0;
    r.condition2 = 0.0;
  } else {
    r.condition1 = 64.0 * al * (1.0 + 2.0 * cp - cm) / ((1.0 + cm) * (1.0 + cm));
    r.condition2 = 64.0 * al * (1.0 + cp) * std::log((1.0 + cp + al) / (2.0 * al)) /
                   ((1.0 + cm) * (1.0 + 5.0 * cp - 4.0 * cm));
  }
  if (!(cm > -1.0)) r.reasons.emplace_back("c_minus <= -1 (graph not connected)");
  if (al > 0.2) r.reasons.emplace_back("alpha > 1/5");
  if (!(r.condition1 < 1.0)) r.reasons.emplace_back("condition1 >= 1");
  if (!(r.condition2 < 1.0)) r.reasons.emplace_back("condition2 >= 1");
  r.verdict = r.reasons.empty() ? Verdict::pass : Verdict::fail;
  return r;
}

struct Crossover {
  double pass_at = 0.0;  // largest alpha seen to pass
  double fail_at = 0.0;  // smallest alpha seen to fail
};

/// Bisection of theorem_condition over regular profiles (alpha, -alpha, alpha).
inline Crossover regular_condition_crossover(double lo, double hi, double tol = 1e-9) {
  auto passes = [](double al) {
    return theorem_condition(ExpanderProfile::regular(al)).verdict == Verdict::pass;
  };
  if (!(lo < hi)) throw InputError("crossover search needs lo < hi");
  if (!passes(lo) || passes(hi)) throw BracketError("theorem_condition does not change verdict on [lo, hi]");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? lo : hi) = mid;
  }
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// Amplification engine

/// Growth step from the cut bound with a density cap: the arc angle drops by
/// asin(2(1+rho) alpha / (1 + c- - eps)) and the mass ratio grows by
/// 1 + eps/(c+ - c-), up to rho alpha n.
struct StepL43 {
  double eps = 0.0;
  double rho = 0.0;
};

/// Growth step once the mass ratio r clears (1 + c+ + alpha)/(2 alpha): the
/// angle drops by asin(2(1 + c+ + alpha)/((1 + c- - eps) r)), cap n/2.
struct StepL44 {
  double eps = 0.0;
};

/// Infinitely many StepL44{eps} summed as a geometric series; drives the
/// mass to n/2. Must be the last step.
struct StepTail {
  double eps = 0.0;
};

using Step = std::variant<StepL43, StepL44, StepTail>;
using Schedule = std::vector<Step>;

inline std::string step_kind(const Step& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, StepL43>) return "L43";
        else if constexpr (std::is_same_v<T, StepL44>) return "L44";
        else return "tail";
      },
      s);
}

/// 3 x L43{0.23, 0.38}, 4 x L44{0.184}, tail{0.184}.
inline Schedule preset_schedule() {
  Schedule s;
  for (int i = 0; i < 3; ++i) s.push_back(StepL43{0.23, 0.38});
  for (int i = 0; i < 4; ++i) s.push_back(StepL44{0.184});
  s.push_back(StepTail{0.184});
  return s;
}

/// The schedule implicit in the general argument: eps = (1 + c-)/2, k* steps
/// of L43{eps, 1} with k* = max(1, ceil(L / log(1 + delta))),
/// L = log((1 + c+ + alpha)/(2 alpha)), delta = eps/(c+ - c-), then the tail.
inline Schedule proof_schedule(const ExpanderProfile& p) {
  if (!(p.c_minus > -1.0)) throw ScheduleError("proof schedule needs c_minus > -1");
  if (!(p.alpha > 0.0)) throw ScheduleError("proof schedule needs alpha > 0");
  const double eps = (1.0 + p.c_minus) / 2.0;
  const double spread = p.c_plus - p.c_minus;
  const double L = std::log((1.0 + p.c_plus + p.alpha) / (2.0 * p.alpha));
  std::size_t kstar = 1;
  if (spread > 0.0) {
    const double per = std::log1p(eps / spread);
    kstar = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(L / per)));
  }
  Schedule s(kstar, StepL43{eps, 1.0});
  s.push_back(StepTail{eps});
  return s;
}

enum class AmpMode { paper_proof, numeric };

inline std::string to_string(AmpMode m) { return m == AmpMode::numeric ? "numeric" : "paper_proof"; }

enum class CapKind { none, alpha_n, half_n };

inline std::string to_string(CapKind c) {
  switch (c) {
    case CapKind::none: return "none";
    case CapKind::alpha_n: return "alpha_n";
    case CapKind::half_n: return "half_n";
  }
  return "?";
}

/// One row of the staircase. Rows 1.. are steps of the schedule; row 0 is
/// the start (beta = pi/2, ratio 1). `mass` is c_k / c_0 when `mass_unit` is
/// "ratio", and |C_beta| / n when it is "fraction" (tail row). `branch_lhs` is
/// the certified (1/n) sum_x s(theta_x) in the scenario where `cap` first
/// binds at this row.
struct TraceRow {
  std::size_t k = 0;
  double beta = 0.0;
  double mass = 1.0;
  std::string mass_unit = "ratio";
  std::string step_kind = "start";
  CapKind cap = CapKind::none;
  double cap_frac = 0.0;
  double branch_lhs = std::numeric_limits<double>::quiet_NaN();
};

struct AmplificationTrace {
  std::vector<TraceRow> rows;
  Verdict verdict = Verdict::fail;
  double final_check_lhs = 0.0;  // min over branches of the certified mass sum
  double final_check_rhs = 0.0;  // alpha^2 / a
  OrderParamBounds bounds;
  AmpMode mode = AmpMode::numeric;
  std::optional<std::size_t> failed_step;  // k of the offending step (1-based)
  std::string reason;                      // why the verdict is fail

  double min_beta() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) m = std::min(m, r.beta);
    return m;
  }
};

namespace detail {

inline constexpr double kGateRelTol = 1e-12;

inline void check_eps(double eps, double c_minus) {
  if (!(eps > 0.0 && eps < 1.0 + c_minus)) {
    throw ScheduleError("step eps = " + std::to_string(eps) + " outside (0, 1 + c_minus)");
  }
}

}  // namespace detail

/// Replays the arc-growing argument on profile `p`.
///
/// Every capped step k opens a branch in which the mass first reaches its cap
/// at row k. Because only ratios c_i / c_0 are known, earlier masses in that
/// branch are cap * r_i / r_k, and the certified sum is the telescoping
///   sum_i (c_i - c_{i-1}) sin^2(beta_i)
/// (numeric mode) or the single term cap * sin^2(beta_k) (paper_proof mode).
/// The uncapped branch is closed by the tail, which brings the mass to 1/2
/// at beta_inf and certifies (1/2) sin^2(beta_inf). The run passes iff the
/// smallest branch sum exceeds alpha^2 / a. In paper_proof mode every angle
/// decrement asin(x) is replaced by its upper bound pi x / 2.
inline AmplificationTrace amplification_run(const ExpanderProfile& p, const Schedule& schedule,
                                            AmpMode mode, bool regular_mode) {
  if (!std::isfinite(p.alpha) || !std::isfinite(p.c_minus) || !std::isfinite(p.c_plus)) {
    throw InputError("profile fields must be finite");
  }
  if (p.c_plus < p.c_minus) throw InputError("profile requires c_plus >= c_minus");
  if (!(p.c_minus > -1.0)) throw ScheduleError("amplification needs c_minus > -1");
  if (!(p.alpha > 0.0)) throw ScheduleError("amplification needs alpha > 0");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (std::holds_alternative<StepTail>(schedule[i]) && i + 1 != schedule.size()) {
      throw ScheduleError("geometric tail must be the last step");
    }
    if (const auto* s = std::get_if<StepL43>(&schedule[i]); s && !(s->rho > 0.0)) {
      throw ScheduleError("L43 step needs rho > 0");
    }
  }

  AmplificationTrace tr;
  tr.mode = mode;
  tr.rows.push_back(TraceRow{0, std::numbers::pi / 2, 1.0});
  try {
    tr.bounds = order_param_bounds(p.alpha, regular_mode);
  } catch (const DomainError& e) {
    tr.verdict = Verdict::fail;
    tr.reason = e.what();
    tr.final_check_lhs = 0.0;
    tr.final_check_rhs = std::numeric_limits<double>::infinity();
    return tr;
  }
  tr.final_check_rhs = tr.bounds.s_budget;

  const double al = p.alpha, cm = p.c_minus, cp = p.c_plus;
  const double spread = cp - cm;
  const double gate = (1.0 + cp + al) / (2.0 * al);
  auto decrement = [&](double x) {
    return mode == AmpMode::numeric ? std::asin(x) : std::numbers::pi / 2 * x;
  };
  auto growth = [&](double eps) {
    return spread > 0.0 ? 1.0 + eps / spread : std::numeric_limits<double>::infinity();
  };
  auto sin2 = [](double b) {
    const double s = std::sin(b);
    return s * s;
  };

  auto branch_sum = [&](std::size_t k, double cap) {
    if (mode == AmpMode::paper_proof) return cap * sin2(tr.rows[k].beta);
    const double rk = tr.rows[k].mass;
    double total = 0.0, prev = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
      double c = cap;
      if (i < k) c = std::isinf(rk) ? 0.0 : cap * tr.rows[i].mass / rk;
      total += (c - prev) * sin2(tr.rows[i].beta);
      prev = c;
    }
    return total;
  };

  auto fail_at = [&](std::size_t row, std::string why) {
    tr.verdict = Verdict::fail;
    tr.failed_step = row;
    tr.reason = std::move(why);
  };

  double lhs = std::numeric_limits<double>::infinity();
  double beta = std::numbers::pi / 2;
  double r = 1.0;
  bool closed = false;

  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const std::size_t row = i + 1;
    const Step& step = schedule[i];
    TraceRow tr_row;
    tr_row.k = row;
    tr_row.step_kind = step_kind(step);

    if (const auto* s = std::get_if<StepL43>(&step)) {
      detail::check_eps(s->eps, cm);
      const double x = 2.0 * (1.0 + s->rho) * al / (1.0 + cm - s->eps);
      if (x > 1.0) {
        fail_at(row, "L43 angle decrement argument exceeds 1");
        break;
      }
      beta -= decrement(x);
      r *= growth(s->eps);
      const double cap = std::min(s->rho * al, 0.5);
      tr_row.cap = s->rho * al < 0.5 ? CapKind::alpha_n : CapKind::half_n;
      tr_row.cap_frac = cap;
      tr_row.beta = beta;
      tr_row.mass = r;
    } else if (const auto* s = std::get_if<StepL44>(&step)) {
      detail::check_eps(s->eps, cm);
      if (r < gate * (1.0 - detail::kGateRelTol)) {
        throw ScheduleError("L44 step before the mass ratio reaches (1 + c+ + alpha)/(2 alpha)");
      }
      const double x = 2.0 * (1.0 + cp + al) / ((1.0 + cm - s->eps) * r);
      if (x > 1.0) {
        fail_at(row, "L44 angle decrement argument exceeds 1");
        break;
      }
      beta -= decrement(x);
      r *= growth(s->eps);
      tr_row.cap = CapKind::half_n;
      tr_row.cap_frac = 0.5;
      tr_row.beta = beta;
      tr_row.mass = r;
    } else {
      const auto& tail = std::get<StepTail>(step);
      detail::check_eps(tail.eps, cm);
      if (r < gate * (1.0 - detail::kGateRelTol)) {
        throw ScheduleError("tail before the mass ratio reaches (1 + c+ + alpha)/(2 alpha)");
      }
      const double g = growth(tail.eps);
      const double x0 = 2.0 * (1.0 + cp + al) / ((1.0 + cm - tail.eps) * r);
      if (x0 > 1.0) {
        fail_at(row, "tail angle decrement argument exceeds 1");
        break;
      }
      double total = 0.0;
      if (std::isinf(g)) {
        total = decrement(x0);
      } else if (mode == AmpMode::paper_proof) {
        total = std::numbers::pi / 2 * x0 * g / (g - 1.0);
      } else {
        // Exact terms until they are negligible, then the bound
        // sum_{j >= i} asin(x_j) <= (pi/2) x_i g / (g - 1).
        double x = x0;
        while (x >= 1e-17) {
          total += std::asin(x);
          x /= g;
        }
        total += std::numbers::pi / 2 * x * g / (g - 1.0);
      }
      beta -= total;
      tr_row.beta = beta;
      tr_row.mass = 0.5;
      tr_row.mass_unit = "fraction";
      tr_row.cap = CapKind::half_n;
      tr_row.cap_frac = 0.5;
      if (beta <= 0.0) {
        tr.rows.push_back(tr_row);
        fail_at(row, "angle reached 0");
        break;
      }
      tr_row.branch_lhs = 0.5 * sin2(beta);
      lhs = std::min(lhs, tr_row.branch_lhs);
      tr.rows.push_back(tr_row);
      closed = true;
      break;
    }

    tr.rows.push_back(tr_row);
    if (beta <= 0.0) {
      fail_at(row, "angle reached 0");
      break;
    }
    tr.rows.back().branch_lhs = branch_sum(row, tr_row.cap_frac);
    lhs = std::min(lhs, tr.rows.back().branch_lhs);
  }

  if (tr.failed_step) {
    tr.final_check_lhs = std::isfinite(lhs) ? lhs : 0.0;
    return tr;
  }
  if (!closed) {
    tr.verdict = Verdict::fail;
    tr.reason = "schedule does not end with a geometric tail";
    tr.final_check_lhs = std::isfinite(lhs) ? lhs : 0.0;
    return tr;
  }
  tr.final_check_lhs = lhs;
  tr.verdict = lhs > tr.final_check_rhs ? Verdict::pass : Verdict::fail;
  if (tr.verdict == Verdict::fail) tr.reason = "certified mass sum does not exceed alpha^2 / a";
  return tr;
}

using ScheduleFactory = std::function<Schedule(const ExpanderProfile&)>;

struct AlphaSearch {
  double lo = 0.05;
  double hi = 0.12;
  double tol = 1e-5;
};

/// Largest alpha in [lo, hi] (to tol) at which amplification_run passes on
/// the regular profile (alpha, -alpha, alpha) with regular-mode bounds. A
/// schedule that is illegal at some alpha counts as a fail there. Throws
/// BracketError unless lo passes and hi fails, and ConsistencyError if spot
/// checks find the pass region is not an interval starting at lo.
inline double max_alpha_regular(const ScheduleFactory& make, const AlphaSearch& search,
                                AmpMode mode = AmpMode::numeric) {
  if (!(search.lo < search.hi) || !(search.tol > 0.0)) {
    throw InputError("alpha search needs lo < hi and tol > 0");
  }
  auto passes = [&](double al) {
    const auto prof = ExpanderProfile::regular(al);
    try {
      return amplification_run(prof, make(prof), mode, true).verdict == Verdict::pass;
    } catch (const ScheduleError&) {
      return false;
    }
  };
  if (passes(search.hi)) throw BracketError("amplification passes at the upper end of the bracket");
  if (!passes(search.lo)) throw BracketError("amplification fails at the lower end of the bracket");
  double lo = search.lo, hi = search.hi;
  while (hi - lo > search.tol) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? lo : hi) = mid;
  }
  for (int j = 1; j < 8; ++j) {
    const double below = search.lo + (lo - search.lo) * j / 8.0;
    const double above = hi + (search.hi - hi) * j / 8.0;
    if (!passes(below) || passes(above)) {
      throw ConsistencyError("pass region of the alpha search is not an interval");
    }
  }
  return lo;
}

inline double max_alpha_regular(const Schedule& schedule, const AlphaSearch& search,
                                AmpMode mode = AmpMode::numeric) {
  return max_alpha_regular([&](const ExpanderProfile&) { return schedule; }, search, mode);
}

/// Smallest d >= 3 with 2 sqrt(d - 1)/d <= threshold, the expansion of a
/// d-regular Ramanujan graph.
inline std::size_t min_ramanujan_degree(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw InputError("threshold must lie in (0, 1]");
  std::size_t d = 3;
  while (2.0 * std::sqrt(static_cast<double>(d - 1)) / static_cast<double>(d) > threshold) ++d;
  return d;
}

}  // namespace kurasync
