#pragma once

// The homogeneous Kuramoto model as gradient flow of
//
//   E(theta) = (1/2) sum_{x,y} A_xy (1 - cos(theta_x - theta_y))
//
// together with equilibrium classification, order parameters and the
// per-vertex stability conditions satisfied by every local minimum.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kurasync/errors.hpp"
#include "kurasync/graph.hpp"
#include "kurasync/rng.hpp"

namespace kurasync {

/// One phase per vertex, in radians, normalized to (-pi, pi].
using PhaseState = std::vector<double>;

/// Maps any angle to (-pi, pi]; -pi itself maps to pi.
inline double normalize_phase(double a) {
  double r = std::remainder(a, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  if (r > std::numbers::pi) r = std::numbers::pi;
  return r;
}

inline void normalize_phases(PhaseState& s) {
  for (auto& t : s) t = normalize_phase(t);
}

/// i.i.d. uniform phases on (-pi, pi].
inline PhaseState random_phase_state(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  PhaseState s(n);
  for (auto& t : s) t = std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform();
  return s;
}

/// theta_x = 2 pi w x / n, the winding-w twisted state of the cycle.
inline PhaseState twisted_state(std::size_t n, int winding) {
  PhaseState s(n);
  for (std::size_t x = 0; x < n; ++x) {
    s[x] = normalize_phase(2.0 * std::numbers::pi * winding * static_cast<double>(x) /
                           static_cast<double>(n));
  }
  return s;
}

namespace detail {

inline void check_state(const Graph& g, const PhaseState& s) {
  if (s.size() != g.num_vertices()) throw InputError("phase state length does not match graph");
}

}  // namespace detail

/// Each edge contributes 1 - cos(t) = 2 sin^2(t/2), evaluated in the latter
/// form so that nearly synchronized states keep full relative accuracy.
inline double energy(const Graph& g, const PhaseState& s) {
  detail::check_state(g, s);
  double e = 0.0;
  for (Vertex x = 0; x < g.num_vertices(); ++x) {
    for (Vertex y : g.neighbors(x)) {
      if (y <= x) continue;
      const double h = std::sin(0.5 * (s[x] - s[y]));
      e += 2.0 * h * h;
    }
  }
  return e;
}

/// dE/dtheta_x = sum_z A_xz sin(theta_x - theta_z)
inline std::vector<double> gradient(const Graph& g, const PhaseState& s) {
  detail::check_state(g, s);
  std::vector<double> grad(g.num_vertices(), 0.0);
  for (Vertex x = 0; x < g.num_vertices(); ++x) {
    double acc = 0.0;
    for (Vertex z : g.neighbors(x)) acc += std::sin(s[x] - s[z]);
    grad[x] = acc;
  }
  return grad;
}

/// H_xy = -A_xy cos(theta_x - theta_y) off the diagonal, H_xx = minus the
/// off-diagonal row sum, so H 1 = 0.
inline Eigen::MatrixXd hessian(const Graph& g, const PhaseState& s) {
  detail::check_state(g, s);
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Vertex x = 0; x < g.num_vertices(); ++x) {
    double diag = 0.0;
    for (Vertex y : g.neighbors(x)) {
      const double c = std::cos(s[x] - s[y]);
      h(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = -c;
      diag += c;
    }
    h(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = diag;
  }
  return h;
}

/// Daido order parameter rho_k = (1/n) sum_x exp(i k theta_x).
inline std::complex<double> daido(const PhaseState& s, int k) {
  if (k < 1) throw InputError("daido order must be >= 1");
  if (s.empty()) throw InputError("daido of an empty state");
  double re = 0.0, im = 0.0;
  for (double t : s) {
    re += std::cos(k * t);
    im += std::sin(k * t);
  }
  const double n = static_cast<double>(s.size());
  return {re / n, im / n};
}

inline constexpr double kRho1ZeroTol = 1e-14;

/// Global rotation making rho_1 real and nonnegative. States with
/// |rho_1| <= kRho1ZeroTol have no preferred direction and are returned as is.
inline PhaseState rotate_to_real_rho1(const PhaseState& s) {
  const auto r = daido(s, 1);
  if (std::abs(r) <= kRho1ZeroTol) return s;
  const double shift = std::arg(r);
  PhaseState out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = normalize_phase(s[i] - shift);
  return out;
}

/// sin^2(a) for |a| <= pi/2, else 1.
inline double s_func(double a) {
  const double m = std::abs(a);
  if (m >= std::numbers::pi / 2) return 1.0;
  const double v = std::sin(m);
  return v * v;
}

/// K(a, b) = sin(|a| - min(|b|, pi/2)); equals -cos(a) once |b| >= pi/2.
inline double kernel_K(double a, double b) {
  return std::sin(std::abs(a) - std::min(std::abs(b), std::numbers::pi / 2));
}

struct KernelViolation {
  Vertex vertex = 0;
  double deficit = 0.0;  // -sum_x A_xy K(theta_x, theta_y) > 0
};

/// Vertices y with sum_x A_xy K(theta_x, theta_y) < -1e-9 deg(y). Empty for
/// every stable state once rho_1 has been rotated to the real axis.
inline std::vector<KernelViolation> kernel_stability_violations(const Graph& g,
                                                                const PhaseState& s) {
  detail::check_state(g, s);
  std::vector<KernelViolation> out;
  for (Vertex y = 0; y < g.num_vertices(); ++y) {
    double sum = 0.0;
    for (Vertex x : g.neighbors(y)) sum += kernel_K(s[x], s[y]);
    if (sum < -1e-9 * static_cast<double>(g.degree(y))) out.push_back({y, -sum});
  }
  return out;
}

/// C_psi = {x : |theta_x| >= psi}, i.e. cos(theta_x) <= cos(psi).
inline VertexSet arc_set(const PhaseState& s, double psi) {
  if (!(psi >= 0.0 && psi <= std::numbers::pi)) throw InputError("arc angle must lie in [0, pi]");
  std::vector<Vertex> members;
  for (Vertex x = 0; x < s.size(); ++x) {
    if (std::abs(s[x]) >= psi) members.push_back(x);
  }
  return VertexSet(s.size(), std::move(members));
}

inline constexpr double kHalfCircleSyncTol = 1e-6;

/// True iff no phase reaches the closed half-circle boundary |theta| >= pi/2.
/// A stable state on a connected graph inside the open half-circle is fully
/// synchronized; if that conclusion fails (max |theta| >= 1e-6) the state
/// was misclassified and ConsistencyError is thrown.
inline bool half_circle_check(const Graph& g, const PhaseState& s) {
  detail::check_state(g, s);
  if (!arc_set(s, std::numbers::pi / 2).empty()) return false;
  double worst = 0.0;
  for (double t : s) worst = std::max(worst, std::abs(t));
  if (worst >= kHalfCircleSyncTol) {
    throw ConsistencyError("stable state inside the half-circle is not synchronized (max |theta| = " +
                           std::to_string(worst) + ")");
  }
  return true;
}

// ---------------------------------------------------------------------------
// Gradient flow

enum class FlowTermination { converged, step_cap, stalled };

inline std::string to_string(FlowTermination t) {
  switch (t) {
    case FlowTermination::converged: return "converged";
    case FlowTermination::step_cap: return "step_cap";
    case FlowTermination::stalled: return "stalled";
  }
  return "?";
}

struct FlowOptions {
  double grad_tol = 1e-10;
  std::size_t step_cap = 1'000'000;
  double dt_init = 0.1;       // clipped to the stability cap 1/(2 d_max)
  std::size_t trace_every = 1;  // record every k-th accepted step (final state always)
};

struct FlowSample {
  double time = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;  // infinity norm
  double rho1 = 0.0;       // |rho_1|
};

struct FlowResult {
  PhaseState final;
  std::size_t steps = 0;  // accepted steps
  std::size_t rejected = 0;
  std::vector<FlowSample> energy_trace;
  FlowTermination terminated = FlowTermination::step_cap;
};

namespace detail {

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

/// Explicit Euler on d theta/dt = -grad E with energy-monotone step control.
/// A step is accepted only if the energy does not increase beyond rounding
/// (16 eps |E|); dt halves on rejection and grows by 1.2 on acceptance, never
/// exceeding 1/(2 d_max). Converged once ||grad E||_inf < grad_tol; stalled if
/// dt collapses below 1e-12 of its cap.
inline FlowResult flow(const Graph& g, const PhaseState& s0, const FlowOptions& opts = {}) {
  detail::check_state(g, s0);
  if (!(opts.grad_tol > 0.0)) throw InputError("grad_tol must be positive");
  if (!(opts.dt_init > 0.0)) throw InputError("dt_init must be positive");
  const std::size_t every = std::max<std::size_t>(1, opts.trace_every);

  FlowResult out;
  PhaseState s = s0;
  normalize_phases(s);

  const auto dmax = g.num_vertices() > 0 ? degree_extrema(g).max : 0;
  const double dt_cap = dmax > 0 ? 0.5 / static_cast<double>(dmax) : opts.dt_init;
  double dt = std::min(opts.dt_init, dt_cap);
  double t = 0.0;
  double e = energy(g, s);
  auto grad = gradient(g, s);
  double gnorm = detail::inf_norm(grad);

  auto record = [&]() {
    out.energy_trace.push_back({t, e, gnorm, std::abs(daido(s, 1))});
  };
  record();

  PhaseState trial(s.size());
  out.terminated = FlowTermination::step_cap;
  while (true) {
    if (gnorm < opts.grad_tol) {
      out.terminated = FlowTermination::converged;
      break;
    }
    if (out.steps >= opts.step_cap) break;
    if (dt < 1e-12 * dt_cap) {
      out.terminated = FlowTermination::stalled;
      break;
    }
    for (std::size_t i = 0; i < s.size(); ++i) trial[i] = normalize_phase(s[i] - dt * grad[i]);
    const double e_trial = energy(g, trial);
    if (e_trial <= e + 16.0 * std::numeric_limits<double>::epsilon() * e) {
      s.swap(trial);
      e = e_trial;
      t += dt;
      ++out.steps;
      grad = gradient(g, s);
      gnorm = detail::inf_norm(grad);
      dt = std::min(dt * 1.2, dt_cap);
      if (out.steps % every == 0) record();
    } else {
      ++out.rejected;
      dt *= 0.5;
    }
  }
  if (out.steps % every != 0) record();
  out.final = std::move(s);
  return out;
}

// ---------------------------------------------------------------------------
// Equilibrium classification

enum class EquilibriumClass { not_equilibrium, stable, strict_saddle, degenerate };

inline std::string to_string(EquilibriumClass c) {
  switch (c) {
    case EquilibriumClass::not_equilibrium: return "not_equilibrium";
    case EquilibriumClass::stable: return "stable";
    case EquilibriumClass::strict_saddle: return "strict_saddle";
    case EquilibriumClass::degenerate: return "degenerate";
  }
  return "?";
}

struct ClassifyOptions {
  double grad_tol = 1e-10;
  double eig_tol = -1.0;  // <= 0 selects 1e-8 d_max
};

struct EquilibriumReport {
  double gradient_norm = 0.0;        // infinity norm
  double hessian_min_eig_orth = 0.0; // min eigenvalue of H restricted to 1-perp
  EquilibriumClass classification = EquilibriumClass::not_equilibrium;
  double rho1 = 0.0;
  std::complex<double> rho2;
  double eig_tol = 0.0;
};

/// Minimum eigenvalue of H on the complement of the rotation mode. Computed
/// as the minimum eigenvalue of H + sigma J/n with sigma above the spectral
/// radius of H, which lifts the all-ones direction out of the way.
inline double hessian_min_eig_orth(const Graph& g, const PhaseState& s) {
  const std::size_t n = g.num_vertices();
  if (n < 2) return std::numeric_limits<double>::infinity();
  Eigen::MatrixXd h = hessian(g, s);
  const double sigma = 4.0 * static_cast<double>(degree_extrema(g).max) + 1.0;
  h.array() += sigma / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline EquilibriumReport classify_equilibrium(const Graph& g, const PhaseState& s,
                                              const ClassifyOptions& opts = {}) {
  detail::check_state(g, s);
  if (!(opts.grad_tol > 0.0)) throw InputError("grad_tol must be positive");
  EquilibriumReport r;
  r.eig_tol = opts.eig_tol > 0.0 ? opts.eig_tol
                                 : 1e-8 * std::max(1.0, static_cast<double>(degree_extrema(g).max));
  r.gradient_norm = detail::inf_norm(gradient(g, s));
  r.hessian_min_eig_orth = hessian_min_eig_orth(g, s);
  r.rho1 = std::abs(daido(s, 1));
  r.rho2 = daido(s, 2);
  if (r.gradient_norm >= opts.grad_tol) {
    r.classification = EquilibriumClass::not_equilibrium;
  } else if (r.hessian_min_eig_orth > r.eig_tol) {
    r.classification = EquilibriumClass::stable;
  } else if (r.hessian_min_eig_orth < -r.eig_tol) {
    r.classification = EquilibriumClass::strict_saddle;
  } else {
    r.classification = EquilibriumClass::degenerate;
  }
  return r;
}

}  // namespace kurasync
