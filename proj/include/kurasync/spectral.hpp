#pragma once

// Expander profiles (n, d, alpha, c-, c+) measured from concrete graphs, and
// executable checks of the expander mixing bounds against exact edge counts.
//
//   centered adjacency  DA = A - (d/n) J,          ||DA||        <= alpha d
//   centered Laplacian  DL = L - d I + (d/n) J,    c- d I <= DL  <= c+ d I
//
// Both operators are applied implicitly: the rank-one J term is evaluated as
// (sum of x) * 1 and never materialized.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "kurasync/errors.hpp"
#include "kurasync/graph.hpp"
#include "kurasync/lanczos.hpp"
#include "kurasync/rng.hpp"

namespace kurasync {

inline constexpr double kDefaultSpectralTol = 1e-8;

enum class ProfileSource { measured, asserted };

inline std::string to_string(ProfileSource s) {
  return s == ProfileSource::measured ? "measured" : "asserted";
}

/// (n, d, alpha, c-, c+). For measured profiles `tol` is the relative
/// accuracy of the eigenvalue measurements: every stored quantity is within
/// tol of the exact one. `d_ref_choice` records how d was picked
/// ("average_degree", "model_parameter" or "user").
struct ExpanderProfile {
  std::size_t n = 0;
  double d_ref = 0.0;
  double alpha = 0.0;
  double c_minus = 0.0;
  double c_plus = 0.0;
  double tol = 0.0;
  ProfileSource source = ProfileSource::asserted;
  std::string d_ref_choice = "user";

  /// c- > -1 is equivalent to connectivity and is required for certification.
  bool usable() const { return c_minus > -1.0; }

  static ExpanderProfile asserted(std::size_t n, double d_ref, double alpha, double c_minus,
                                  double c_plus) {
    ExpanderProfile p;
    p.n = n;
    p.d_ref = d_ref;
    p.alpha = alpha;
    p.c_minus = c_minus;
    p.c_plus = c_plus;
    p.source = ProfileSource::asserted;
    return p;
  }

  /// The (alpha, -alpha, alpha) profile of a d-regular (n, d, alpha)-expander.
  static ExpanderProfile regular(double alpha, std::size_t n = 0, double d_ref = 1.0) {
    return asserted(n, d_ref, alpha, -alpha, alpha);
  }
};

inline void validate_profile(const ExpanderProfile& p) {
  if (!std::isfinite(p.alpha) || !std::isfinite(p.c_minus) || !std::isfinite(p.c_plus) ||
      !std::isfinite(p.d_ref)) {
    throw InputError("profile fields must be finite");
  }
  if (p.alpha < 0.0) throw InputError("profile alpha must be nonnegative");
  if (p.c_plus < p.c_minus) throw InputError("profile requires c_plus >= c_minus");
  if (!(p.d_ref > 0.0)) throw InputError("profile d_ref must be positive");
}

namespace detail {

inline void check_spectral_args(const Graph& g, double d_ref, double tol) {
  if (!(d_ref > 0.0)) throw InputError("d_ref must be positive");
  if (!(tol > 0.0)) throw InputError("tol must be positive");
  if (g.num_vertices() == 0) throw InputError("empty graph");
}

}  // namespace detail

/// x -> A x - (d/n)(sum x) 1
inline MatVec centered_adjacency_operator(const Graph& g, double d_ref) {
  const double scale = d_ref / static_cast<double>(g.num_vertices());
  return [&g, scale](std::span<const double> x, std::span<double> y) {
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      double acc = 0.0;
      for (Vertex u : g.neighbors(v)) acc += x[u];
      y[v] = acc - scale * total;
    }
  };
}

/// x -> L x - d x + (d/n)(sum x) 1
inline MatVec centered_laplacian_operator(const Graph& g, double d_ref) {
  const double scale = d_ref / static_cast<double>(g.num_vertices());
  return [&g, d_ref, scale](std::span<const double> x, std::span<double> y) {
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      double acc = static_cast<double>(g.degree(v)) * x[v];
      for (Vertex u : g.neighbors(v)) acc -= x[u];
      y[v] = acc - d_ref * x[v] + scale * total;
    }
  };
}

struct AlphaMeasurement {
  double alpha = 0.0;
  double residual = 0.0;  // absolute residual of the certifying Ritz pair
  ExtremalEigen spectrum;
};

/// ||DA|| / d, certified by a Ritz residual <= tol * d.
inline AlphaMeasurement measure_centered_adjacency(const Graph& g, double d_ref, double tol) {
  detail::check_spectral_args(g, d_ref, tol);
  auto eig = extremal_eigenpairs(centered_adjacency_operator(g, d_ref), g.num_vertices(),
                                 tol * d_ref);
  const bool use_max = std::abs(eig.max.value) >= std::abs(eig.min.value);
  AlphaMeasurement out;
  out.alpha = (use_max ? std::abs(eig.max.value) : std::abs(eig.min.value)) / d_ref;
  out.residual = use_max ? eig.max.residual : eig.min.residual;
  out.spectrum = std::move(eig);
  return out;
}

inline double centered_adjacency_alpha(const Graph& g, double d_ref,
                                       double tol = kDefaultSpectralTol) {
  return measure_centered_adjacency(g, d_ref, tol).alpha;
}

struct LaplacianExtremes {
  double c_minus = 0.0;
  double c_plus = 0.0;
};

inline LaplacianExtremes centered_laplacian_extremes(const Graph& g, double d_ref,
                                                     double tol = kDefaultSpectralTol) {
  detail::check_spectral_args(g, d_ref, tol);
  auto eig = extremal_eigenpairs(centered_laplacian_operator(g, d_ref), g.num_vertices(),
                                 tol * d_ref);
  return {eig.min.value / d_ref, eig.max.value / d_ref};
}

inline ExpanderProfile expander_profile(const Graph& g, double d_ref,
                                        double tol = kDefaultSpectralTol,
                                        std::string d_ref_choice = "user") {
  ExpanderProfile p;
  p.n = g.num_vertices();
  p.d_ref = d_ref;
  p.alpha = centered_adjacency_alpha(g, d_ref, tol);
  const auto lap = centered_laplacian_extremes(g, d_ref, tol);
  p.c_minus = lap.c_minus;
  p.c_plus = lap.c_plus;
  p.tol = tol;
  p.source = ProfileSource::measured;
  p.d_ref_choice = std::move(d_ref_choice);
  return p;
}

/// Profile with d_ref = 2|E|/n.
inline ExpanderProfile average_degree_profile(const Graph& g, double tol = kDefaultSpectralTol) {
  return expander_profile(g, g.average_degree(), tol, "average_degree");
}

/// The smallest (c-, c+) box certified by the degree sandwich
///   (1 + c- + alpha) d <= d_min <= d_max <= (1 + c+ - alpha) d.
inline LaplacianExtremes degree_implies_profile(double d_min, double d_max, double alpha,
                                                double d_ref) {
  if (!(d_ref > 0.0)) throw InputError("d_ref must be positive");
  if (d_min > d_max) throw InputError("d_min must not exceed d_max");
  return {d_min / d_ref - 1.0 - alpha, d_max / d_ref - 1.0 + alpha};
}

struct DegreeBounds {
  double lower = 0.0;  // on d_min
  double upper = 0.0;  // on d_max
};

/// Degree range forced by a profile:
///   (1 + c-) d - d/n <= d_min <= d_max <= (1 + c+) d + 1 - d/n.
inline DegreeBounds degree_bounds_from_profile(const ExpanderProfile& p) {
  const double dn = p.d_ref / static_cast<double>(p.n);
  return {(1.0 + p.c_minus) * p.d_ref - dn, (1.0 + p.c_plus) * p.d_ref + 1.0 - dn};
}

// ---------------------------------------------------------------------------
// Mixing bounds

enum class MixingLemma { self_edges, cut, volume, nested_cut, nested_ratio };

inline std::string to_string(MixingLemma l) {
  switch (l) {
    case MixingLemma::self_edges: return "self_edges";
    case MixingLemma::cut: return "cut";
    case MixingLemma::volume: return "volume";
    case MixingLemma::nested_cut: return "nested_cut";
    case MixingLemma::nested_ratio: return "nested_ratio";
  }
  return "?";
}

inline constexpr MixingLemma kAllMixingLemmas[] = {MixingLemma::self_edges, MixingLemma::cut,
                                                   MixingLemma::volume, MixingLemma::nested_cut,
                                                   MixingLemma::nested_ratio};

/// One evaluated inequality lower <= value <= upper. One-sided bounds store
/// -inf / +inf on the missing side.
struct MixingEntry {
  MixingLemma lemma = MixingLemma::self_edges;
  std::size_t x_size = 0;
  std::size_t y_size = 0;
  double lower = -std::numeric_limits<double>::infinity();
  double value = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  double slack = 0.0;  // min(value - lower, upper - value)
  bool structured = false;
};

struct MixingReport {
  std::vector<MixingEntry> entries;
  std::vector<MixingLemma> skipped;
  double tolerance = 0.0;  // violations are slacks below -tolerance
  bool pass = true;

  std::size_t violations() const {
    return static_cast<std::size_t>(std::count_if(
        entries.begin(), entries.end(), [&](const MixingEntry& e) { return e.slack < -tolerance; }));
  }
  std::size_t violations(MixingLemma l) const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [&](const MixingEntry& e) {
      return e.lemma == l && e.slack < -tolerance;
    }));
  }
  double min_slack(MixingLemma l) const {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& e : entries) {
      if (e.lemma == l) s = std::min(s, e.slack);
    }
    return s;
  }
};

struct MixingOptions {
  /// Besides random sets, also test sets built to stress the bounds:
  /// singletons, closed neighbourhoods and level sets of the extremal
  /// eigenvectors of DA and DL.
  bool structured_sets = true;
};

namespace detail {

inline MixingEntry make_entry(MixingLemma l, std::size_t xs, std::size_t ys, double lo, double val,
                              double hi, bool structured) {
  MixingEntry e;
  e.lemma = l;
  e.x_size = xs;
  e.y_size = ys;
  e.lower = lo;
  e.value = val;
  e.upper = hi;
  e.slack = std::min(val - lo, hi - val);
  e.structured = structured;
  return e;
}

inline VertexSet random_subset(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<Vertex> pool(n);
  std::iota(pool.begin(), pool.end(), Vertex{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return VertexSet(n, std::move(pool));
}

/// Single-set bounds: self-edge count, cut and volume.
inline void single_set_entries(const Graph& g, const ExpanderProfile& p, const VertexSet& x,
                               bool structured, std::vector<MixingEntry>& out) {
  const double n = static_cast<double>(g.num_vertices());
  const double d = p.d_ref;
  const double xs = static_cast<double>(x.size());
  const double xc = n - xs;
  const auto complement = x.complement();
  const double exx = static_cast<double>(edges_between(g, x, x));
  const double exc = static_cast<double>(edges_between(g, x, complement));

  const double centre = d / n * xs * xs;
  out.push_back(make_entry(MixingLemma::self_edges, x.size(), x.size(),
                           centre - p.alpha * d * xs, exx, centre + p.alpha * d * xs,
                           structured));

  const double cut_mean = d / n * xs * xc;
  out.push_back(make_entry(MixingLemma::cut, x.size(), complement.size(),
                           (1.0 + p.c_minus) * cut_mean, exc, (1.0 + p.c_plus) * cut_mean,
                           structured));

  const double rho = xs / n;
  out.push_back(make_entry(MixingLemma::volume, x.size(), g.num_vertices(),
                           (1.0 + p.c_minus * (1.0 - rho) - p.alpha) * d * xs, exx + exc,
                           (1.0 + p.c_plus * (1.0 - rho) + p.alpha) * d * xs, structured));
}

inline std::vector<VertexSet> level_sets(std::span<const double> u, std::size_t max_size) {
  const std::size_t n = u.size();
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{0});
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return u[a] > u[b]; });
  std::vector<VertexSet> out;
  for (int side = 0; side < 2; ++side) {
    std::vector<Vertex> members;
    for (std::size_t k = 0; k < max_size; ++k) {
      members.push_back(side == 0 ? order[k] : order[n - 1 - k]);
      out.emplace_back(n, members);
    }
  }
  return out;
}

}  // namespace detail

/// Samples `trials` random sets X (|X| uniform in {1, ..., n/2}) and nested
/// pairs X subset Y satisfying the hypotheses of the nested bounds, evaluates
/// every applicable inequality with exact edge counts, and records its slack.
///
/// Inequalities (e(.,.) in the double-sum convention, rho = |X|/n):
///   self_edges    -a d|X|            <= e(X,X) - (d/n)|X|^2 <= a d|X|
///   cut           (1+c-)(d/n)|X||X^c| <= e(X,X^c)          <= (1+c+)(d/n)|X||X^c|
///   volume        (1+c-(1-rho)-a)d|X| <= e(X,V)            <= (1+c+(1-rho)+a)d|X|
///   nested_cut    (1+c- -eps)(d/n)|X||Y^c| <= e(X,Y^c) <= (1+c+ +eps)(d/n)|X||Y^c|
///                 for X in Y, |Y| <= n/2, |Y| <= (1+delta)|X|, delta = eps/(c+ - c-)
///   nested_ratio  e(X,Y^c) >= (1+c- -eps)/(2(1+r)a) e(X,X), additionally |X| <= r a n
///
/// The report passes iff every slack is >= -10 tol d n, where tol is the
/// profile's measurement tolerance. Bounds whose hypotheses cannot be met
/// (n < 2, or alpha = 0 for nested_ratio) are listed as skipped.
///
/// Only the non-strict forms are checked; measurement tolerance makes the
/// strict variants untestable.
inline MixingReport check_mixing_bounds(const Graph& g, const ExpanderProfile& p,
                                        std::size_t trials, std::uint64_t seed,
                                        const MixingOptions& opts = {}) {
  if (trials == 0) throw InputError("mixing check needs at least one trial");
  if (p.n != g.num_vertices()) throw InputError("profile was not measured on this graph");
  validate_profile(p);

  const std::size_t n = g.num_vertices();
  const std::size_t half = n / 2;
  MixingReport report;
  report.tolerance = 10.0 * p.tol * p.d_ref * static_cast<double>(n);

  if (half == 0) {
    report.skipped.assign(std::begin(kAllMixingLemmas), std::end(kAllMixingLemmas));
    return report;
  }
  const bool ratio_ok = p.alpha > 0.0;
  if (!ratio_ok) report.skipped.push_back(MixingLemma::nested_ratio);

  Rng rng(seed);
  const double nd = static_cast<double>(n);
  const double spread = p.c_plus - p.c_minus;

  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t k = 1 + static_cast<std::size_t>(rng.below(half));
    const VertexSet x = detail::random_subset(rng, n, k);
    detail::single_set_entries(g, p, x, false, report.entries);

    // Nested pair: Y = X plus floor(delta |X|) random outside vertices, capped
    // so that |Y| <= n/2.
    auto nested_y = [&](double eps) {
      const double delta = spread > 0.0 ? eps / spread : std::numeric_limits<double>::infinity();
      const double grow = std::floor(delta * static_cast<double>(k));
      const std::size_t room = half - k;
      const std::size_t extra =
          grow >= static_cast<double>(room) ? room : static_cast<std::size_t>(grow);
      std::vector<Vertex> members(x.members().begin(), x.members().end());
      const auto outside = x.complement();
      std::vector<Vertex> pool(outside.members().begin(), outside.members().end());
      for (std::size_t i = 0; i < extra; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        members.push_back(pool[i]);
      }
      return VertexSet(n, std::move(members));
    };

    {
      const double eps = rng.uniform(0.0, 1.0) + 1e-12;
      const VertexSet y = nested_y(eps);
      const double xs = static_cast<double>(k);
      const double yc = nd - static_cast<double>(y.size());
      const double val = static_cast<double>(edges_between(g, x, y.complement()));
      const double mean = p.d_ref / nd * xs * yc;
      report.entries.push_back(detail::make_entry(MixingLemma::nested_cut, k, y.size(),
                                                  (1.0 + p.c_minus - eps) * mean, val,
                                                  (1.0 + p.c_plus + eps) * mean, false));
    }
    if (ratio_ok) {
      const double eps = rng.uniform(0.0, 1.0) * (1.0 + p.c_minus) + 1e-12;
      const double rho = static_cast<double>(k) / (p.alpha * nd) * (1.0 + rng.uniform());
      const VertexSet y = nested_y(eps);
      const double exx = static_cast<double>(edges_between(g, x, x));
      const double val = static_cast<double>(edges_between(g, x, y.complement()));
      const double lo = (1.0 + p.c_minus - eps) / (2.0 * (1.0 + rho) * p.alpha) * exx;
      report.entries.push_back(detail::make_entry(MixingLemma::nested_ratio, k, y.size(), lo, val,
                                                  std::numeric_limits<double>::infinity(), false));
    }
  }

  if (opts.structured_sets) {
    std::vector<VertexSet> probes;
    for (Vertex v = 0; v < n; ++v) {
      probes.emplace_back(n, std::vector<Vertex>{v});
      std::vector<Vertex> ball(g.neighbors(v).begin(), g.neighbors(v).end());
      ball.push_back(v);
      if (ball.size() <= half) probes.emplace_back(n, std::move(ball));
    }
    const double abs_tol = std::max(p.tol, 1e-10) * p.d_ref;
    for (const auto& op : {centered_adjacency_operator(g, p.d_ref),
                           centered_laplacian_operator(g, p.d_ref)}) {
      const auto eig = extremal_eigenpairs(op, n, abs_tol);
      for (const auto* pair : {&eig.min, &eig.max}) {
        for (auto& s : detail::level_sets(pair->vector, half)) probes.push_back(std::move(s));
      }
    }
    for (const auto& x : probes) detail::single_set_entries(g, p, x, true, report.entries);
  }

  report.pass = report.violations() == 0;
  return report;
}

}  // namespace kurasync
