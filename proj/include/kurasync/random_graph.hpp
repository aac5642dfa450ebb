#pragma once

// Closed-form spectral predictions for G(n, p) with p = gamma log n / n.
//
// With h(c) = (1 + c) log(1 + c) - c, the degree extremes of G(n, p) sit near
// (1 + c-(gamma)) pn and (1 + c+(gamma)) pn where c-(gamma) < 0 < c+(gamma)
// solve h(c) = 1/gamma. The finite-eps versions solve
//   h(c - eps) = (1 + eps)/gamma  (c < 0),   h(c + eps) = (1 + eps)/gamma  (c > 0)
// and, together with alpha = 6 (gamma log n)^(-1/2), give a profile that
// holds with an explicit failure probability.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include "kurasync/certify.hpp"
#include "kurasync/errors.hpp"
#include "kurasync/spectral.hpp"

namespace kurasync {

/// h(c) = (1 + c) log(1 + c) - c on c > -1; h(-1+) = 1.
inline double h_func(double c) {
  if (!(c > -1.0)) throw DomainError("h_func: c must exceed -1");
  if (std::isinf(c)) return c;
  return (1.0 + c) * std::log1p(c) - c;
}

namespace detail {

inline constexpr double kRootTol = 1e-12;

/// Root of h(c) = target with c in (lo, hi), h - target changing sign.
inline double h_bisect(double target, double lo, double hi) {
  const bool lo_below = h_func(lo) < target;
  for (int i = 0; i < 400 && hi - lo > kRootTol * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    ((h_func(mid) < target) == lo_below ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// The two solutions of h(c) = t for 0 < t < 1: one in (-1, 0), one in (0, inf).
inline std::pair<double, double> h_inverse(double t) {
  const double neg = h_bisect(t, -1.0 + 1e-15, 0.0);
  double hi = 1.0;
  while (h_func(hi) < t) hi *= 2.0;
  const double pos = h_bisect(t, 0.0, hi);
  return {neg, pos};
}

}  // namespace detail

struct RootPair {
  double c_minus = 0.0;
  double c_plus = 0.0;
};

/// Solutions c- in (-1, 0) and c+ > 0 of gamma h(c) = 1.
inline RootPair gamma_roots(double gamma) {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) throw DomainError("gamma_roots: gamma must exceed 1");
  const auto [neg, pos] = detail::h_inverse(1.0 / gamma);
  return {neg, pos};
}

inline void check_gamma_eps_window(double gamma, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  if (!(gamma > 1.0 + eps && gamma < 1.0 + 1.0 / (eps * eps))) {
    throw DomainError("gamma must lie in (1 + eps, 1 + 1/eps^2)");
  }
}

/// Roots of the eps-perturbed equations: c- = eps + u-, c+ = u+ - eps where
/// u- < 0 < u+ solve h(u) = (1 + eps)/gamma. Asserts
///   c-(gamma) <= c-(gamma, eps) < 0 < c+(gamma, eps) <= c+(gamma).
inline RootPair gamma_roots_eps(double gamma, double eps) {
  check_gamma_eps_window(gamma, eps);
  const auto [neg, pos] = detail::h_inverse((1.0 + eps) / gamma);
  const RootPair out{eps + neg, pos - eps};
  const RootPair lim = gamma_roots(gamma);
  if (!(lim.c_minus <= out.c_minus && out.c_minus < 0.0 && 0.0 < out.c_plus &&
        out.c_plus <= lim.c_plus)) {
    throw ConsistencyError("perturbed roots are not sandwiched by the limiting roots");
  }
  return out;
}

/// The explicit failure-probability expression
///   (1/(c- + eps)^2 + (1 + c+ - eps)/(c+ - eps)) (log n)^4 n^-eps e^(2 p k+) + 2 n^-gamma
/// with k+ = ceil((1 + c+ - eps) gamma log n) and (c-, c+) = gamma_roots_eps,
/// evaluated in log space and not clamped. Infinite when the expression has
/// no meaning (c+ <= eps).
inline double er_failure_expression_log_n(double log_n, double gamma, double eps) {
  if (!(log_n >= std::log(3.0)) || !std::isfinite(log_n)) throw DomainError("n must be >= 3");
  const RootPair c = gamma_roots_eps(gamma, eps);
  if (!(c.c_plus - eps > 0.0) || c.c_minus + eps == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  const double L = log_n;
  const double p = std::exp(std::log(gamma * L) - L);
  const double kplus = std::ceil((1.0 + c.c_plus - eps) * gamma * L);
  const double front = 1.0 / ((c.c_minus + eps) * (c.c_minus + eps)) +
                       (1.0 + c.c_plus - eps) / (c.c_plus - eps);
  const double log_main = std::log(front) + 4.0 * std::log(L) - eps * L + 2.0 * p * kplus;
  return std::exp(log_main) + 2.0 * std::exp(-gamma * L);
}

inline double er_failure_expression(double n, double gamma, double eps) {
  if (!(n >= 3.0)) throw DomainError("n must be >= 3");
  return er_failure_expression_log_n(std::log(n), gamma, eps);
}

/// er_failure_expression clamped to [0, 1].
inline double er_failure_probability(double n, double gamma, double eps) {
  return std::clamp(er_failure_expression(n, gamma, eps), 0.0, 1.0);
}

inline double er_failure_probability_log_n(double log_n, double gamma, double eps) {
  return std::clamp(er_failure_expression_log_n(log_n, gamma, eps), 0.0, 1.0);
}

inline const std::string kVacuousVerdict = "prediction only — certificate vacuous at this n";
inline const std::string kConditionFailsVerdict = "prediction only — closed-form condition fails";
inline const std::string kCertifiedVerdict = "certified with probability >= 1 - failure_prob_bound";

struct ErPrediction {
  double n = 0.0;           // infinite when only log n is representable
  double log_n = 0.0;
  double gamma = 0.0;
  double eps = 0.0;
  double p = 0.0;
  double d_ref = 0.0;       // gamma log n
  double alpha_pred = 0.0;  // 6 (gamma log n)^(-1/2)
  RootPair headline;        // gamma_roots
  RootPair certified;       // gamma_roots_eps
  double failure_prob_bound = 1.0;
  CertResult condition;  // theorem_condition on (alpha_pred, certified roots)
  std::string verdict;
};

/// The prediction depends on n only through log n, so astronomically large
/// n can be given by its logarithm.
inline ErPrediction er_prediction_log_n(double log_n, double gamma, double eps) {
  if (!(log_n >= std::log(3.0)) || !std::isfinite(log_n)) throw DomainError("n must be >= 3");
  check_gamma_eps_window(gamma, eps);
  ErPrediction out;
  const double L = log_n;
  out.n = std::exp(L);
  out.log_n = L;
  out.gamma = gamma;
  out.eps = eps;
  out.p = std::exp(std::log(gamma * L) - L);
  if (out.p > 1.0) throw DomainError("gamma log n / n exceeds 1");
  out.d_ref = gamma * L;
  out.alpha_pred = 6.0 / std::sqrt(out.d_ref);
  out.headline = gamma_roots(gamma);
  out.certified = gamma_roots_eps(gamma, eps);
  out.failure_prob_bound = er_failure_probability_log_n(L, gamma, eps);
  const double n_size = std::min(out.n, static_cast<double>(std::numeric_limits<std::size_t>::max() / 2));
  out.condition = theorem_condition(ExpanderProfile::asserted(
      static_cast<std::size_t>(n_size), out.d_ref, out.alpha_pred, out.certified.c_minus,
      out.certified.c_plus));
  if (out.alpha_pred > 0.2) {
    out.verdict = kVacuousVerdict;
  } else if (out.condition.verdict == Verdict::fail) {
    out.verdict = kConditionFailsVerdict;
  } else {
    out.verdict = kCertifiedVerdict;
  }
  return out;
}

inline ErPrediction er_prediction(double n, double gamma, double eps) {
  if (!(n >= 3.0) || !std::isfinite(n)) throw DomainError("n must be >= 3");
  auto out = er_prediction_log_n(std::log(n), gamma, eps);
  out.n = n;
  out.p = gamma * out.log_n / n;
  return out;
}

/// min(1, 2 n^(1 - eps^2 gamma / 3)): probability that some degree leaves
/// (1 +- eps) pn.
inline double chernoff_degree_bound(double n, double gamma, double eps) {
  if (!(eps > 0.0) || !(gamma > 0.0) || !(n >= 1.0)) {
    throw DomainError("chernoff bound needs n >= 1, gamma > 0, eps > 0");
  }
  return std::min(1.0, 2.0 * std::pow(n, 1.0 - eps * eps * gamma / 3.0));
}

enum class TailSide { below, above };

struct TailRatio {
  double bound = 0.0;
  double exact_ratio = 0.0;
};

/// For X ~ Bin(n - 1, p), the ratio P(X <= k)/P(X = k) (below) or
/// P(X >= k)/P(X = k) (above), and the bound it must respect: c^-2 below,
/// 1 + 1/c above. Point-probability ratios come from the recurrence
///   f_{i-1}/f_i = i (1 - p)/((n - i) p),  f_{i+1}/f_i = (n - 1 - i) p/((i + 1)(1 - p)),
/// so no tiny probability is ever formed.
///
/// Hypotheses: below needs 0 < c < 1, p <= c/(1 - c^2), k <= (1 - c) pn;
/// above needs c > 0, k >= (1 + c) pn.
inline TailRatio binom_tail_ratio_check(std::uint64_t n, double p, std::uint64_t k, double c,
                                        TailSide side) {
  if (n < 1 || k > n - 1) throw DomainError("k must lie in [0, n - 1]");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  TailRatio out;
  double sum = 1.0, comp = 0.0, term = 1.0;
  auto add = [&](double x) {  // Neumaier summation
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  };
  if (side == TailSide::below) {
    if (!(c > 0.0 && c < 1.0)) throw DomainError("below: c must lie in (0, 1)");
    if (!(p <= c / (1.0 - c * c))) throw DomainError("below: p exceeds c/(1 - c^2)");
    if (!(kd <= (1.0 - c) * p * nd)) throw DomainError("below: k exceeds (1 - c) pn");
    out.bound = 1.0 / (c * c);
    for (std::uint64_t i = k; i > 0; --i) {
      const double id = static_cast<double>(i);
      term *= id * (1.0 - p) / ((nd - id) * p);
      add(term);
      if (term < 1e-20 * sum) break;
    }
  } else {
    if (!(c > 0.0)) throw DomainError("above: c must be positive");
    if (!(kd >= (1.0 + c) * p * nd)) throw DomainError("above: k is below (1 + c) pn");
    out.bound = 1.0 + 1.0 / c;
    for (std::uint64_t i = k; i + 1 <= n - 1; ++i) {
      const double id = static_cast<double>(i);
      term *= (nd - 1.0 - id) * p / ((id + 1.0) * (1.0 - p));
      add(term);
      if (term < 1e-20 * sum) break;
    }
  }
  out.exact_ratio = sum + comp;
  return out;
}

/// f(a, n) = 2 sqrt(2) e^(1/(2a)) (1 + sqrt(2 a log n / n)).
inline double symmetrization_factor(double alpha_param, double n) {
  if (!(alpha_param > 0.0)) throw DomainError("alpha_param must be positive");
  if (!(n >= 2.0)) throw DomainError("n must be >= 2");
  return 2.0 * std::sqrt(2.0) * std::exp(1.0 / (2.0 * alpha_param)) *
         (1.0 + std::sqrt(2.0 * alpha_param * std::log(n) / n));
}

/// f(a, n) sqrt(n p (1 - p)): bound on E ||A - E A|| for G(n, p).
inline double symmetrization_norm_bound(double n, double p, double alpha_param = 25.0) {
  if (!(n >= 3.0)) throw DomainError("n must be >= 3");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  return symmetrization_factor(alpha_param, n) * std::sqrt(n * p * (1.0 - p));
}

struct SymmetrizationRow {
  double constant;
  double n0;
  double alpha_param;
};

/// (C, n0, a) with f(a, n) <= C for all n >= n0.
inline constexpr std::array<SymmetrizationRow, 4> kSymmetrizationTable{{
    {8.0, 4.0, 2.0},
    {5.0, 120.0, 3.0},
    {4.0, 880.0, 5.0},
    {3.0, 450000.0, 25.0},
}};

struct ConcentrationTail {
  double threshold = 0.0;  // 4 sqrt(p (1 - p) n) + t
  double tail = 0.0;       // 2 e^(-t^2/4) >= P(||DA|| >= threshold)
};

/// Valid for n >= 1000.
inline ConcentrationTail concentration_tail(double n, double p, double t) {
  if (!(n >= 1000.0)) throw DomainError("concentration tail requires n >= 1000");
  if (!(t > 0.0)) throw DomainError("t must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  return {4.0 * std::sqrt(p * (1.0 - p) * n) + t, 2.0 * std::exp(-t * t / 4.0)};
}

/// The case p = gamma log n / n, t = 2 sqrt(gamma log n): threshold at most
/// 6 sqrt(gamma log n), tail 2 n^-gamma.
inline ConcentrationTail concentration_tail_gamma(double n, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  const double L = std::log(n);
  const double p = gamma * L / n;
  if (p > 1.0) throw DomainError("gamma log n / n exceeds 1");
  return concentration_tail(n, p, 2.0 * std::sqrt(gamma * L));
}

}  // namespace kurasync
