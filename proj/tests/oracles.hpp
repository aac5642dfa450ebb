#pragma once

// Independent reference computations used only by the tests: dense
// eigendecompositions, brute-force edge counts, finite differences and
// sign-scan root finders. None of them share code paths with the library
// routines they check.

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "kurasync/graph.hpp"

namespace oracle {

inline Eigen::MatrixXd dense_adjacency(const kurasync::Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : g.edges()) {
    a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = 1.0;
    a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = 1.0;
  }
  return a;
}

inline Eigen::VectorXd spectrum(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// ||A - (d/n) J|| / d from a full dense eigendecomposition.
inline double dense_alpha(const kurasync::Graph& g, double d) {
  const double n = static_cast<double>(g.num_vertices());
  Eigen::MatrixXd m = dense_adjacency(g);
  m.array() -= d / n;
  const auto ev = spectrum(m);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1))) / d;
}

struct Extremes {
  double lo, hi;
};

/// Extreme eigenvalues of (L - d I + (d/n) J) / d.
inline Extremes dense_laplacian_extremes(const kurasync::Graph& g, double d) {
  const double n = static_cast<double>(g.num_vertices());
  const Eigen::MatrixXd a = dense_adjacency(g);
  Eigen::MatrixXd m = -a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) m(i, i) = a.row(i).sum() - d;
  m.array() += d / n;
  const auto ev = spectrum(m);
  return {ev(0) / d, ev(ev.size() - 1) / d};
}

/// Extreme eigenvalues of A - (d/n) J, divided by d.
inline Extremes dense_adjacency_extremes(const kurasync::Graph& g, double d) {
  const double n = static_cast<double>(g.num_vertices());
  Eigen::MatrixXd m = dense_adjacency(g);
  m.array() -= d / n;
  const auto ev = spectrum(m);
  return {ev(0) / d, ev(ev.size() - 1) / d};
}

/// Double sum of A over X x Y from the dense matrix.
inline std::uint64_t brute_edges(const kurasync::Graph& g, const std::vector<bool>& x,
                                 const std::vector<bool>& y) {
  const Eigen::MatrixXd a = dense_adjacency(g);
  std::uint64_t c = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (x[static_cast<std::size_t>(i)] && y[static_cast<std::size_t>(j)] && a(i, j) != 0.0) ++c;
    }
  }
  return c;
}

/// (1/2) sum_{x,y} A_xy (1 - cos(theta_x - theta_y)) from the dense matrix.
inline double dense_energy(const Eigen::MatrixXd& a, const std::vector<double>& th) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      e += 0.5 * a(i, j) * (1.0 - std::cos(th[static_cast<std::size_t>(i)] - th[static_cast<std::size_t>(j)]));
    }
  }
  return e;
}

/// Central differences of a scalar function, step h.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double fp = f(x);
    x[i] = keep - h;
    const double fm = f(x);
    x[i] = keep;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Central differences of a vector function; column i is d f / d x_i.
inline Eigen::MatrixXd fd_jacobian(
    const std::function<std::vector<double>(const std::vector<double>&)>& f, std::vector<double> x,
    double h) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd j(n, n);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const auto fp = f(x);
    x[i] = keep - h;
    const auto fm = f(x);
    x[i] = keep;
    for (std::size_t r = 0; r < x.size(); ++r) {
      j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = (fp[r] - fm[r]) / (2.0 * h);
    }
  }
  return j;
}

/// Midpoint of the first sign change of f on a uniform grid of `points`
/// points over [lo, hi]; NaN if there is none.
inline double sign_scan_root(const std::function<double(double)>& f, double lo, double hi,
                             std::size_t points) {
  const double step = (hi - lo) / static_cast<double>(points - 1);
  double prev_x = lo;
  double prev = f(lo);
  for (std::size_t i = 1; i < points; ++i) {
    const double x = lo + step * static_cast<double>(i);
    const double v = f(x);
    if ((prev <= 0.0) != (v <= 0.0)) return 0.5 * (prev_x + x);
    prev = v;
    prev_x = x;
  }
  return std::nan("");
}

/// P(Bin(N, p) <= k) / P(Bin(N, p) = k) (or >=) by direct summation of
/// log-gamma probabilities in long double.
inline long double direct_tail_ratio(std::uint64_t N, long double p, std::uint64_t k, bool below) {
  auto logpmf = [&](std::uint64_t i) {
    const long double in = static_cast<long double>(i);
    const long double nn = static_cast<long double>(N);
    return std::lgamma(nn + 1) - std::lgamma(in + 1) - std::lgamma(nn - in + 1) + in * std::log(p) +
           (nn - in) * std::log1p(-p);
  };
  const long double base = logpmf(k);
  long double s = 0;
  if (below) {
    for (std::uint64_t i = 0; i <= k; ++i) s += std::exp(logpmf(i) - base);
  } else {
    for (std::uint64_t i = k; i <= N; ++i) s += std::exp(logpmf(i) - base);
  }
  return s;
}

}  // namespace oracle
