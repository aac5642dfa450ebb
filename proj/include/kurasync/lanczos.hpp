#pragma once

// Extremal eigenpairs of a symmetric operator given only as a matvec.
//
// Thick-restart Lanczos with full reorthogonalization: the projected matrix
// H = V^T A V is built column by column, and on restart the basis is
// compressed to the Ritz vectors nearest both ends of the spectrum, after
// which the Krylov recurrence continues from the next orthogonal direction.
// Convergence is judged by the true residual ||A u - theta u||, recomputed
// with a fresh matvec before a result is returned, so each returned value is
// within `residual` of an eigenvalue of A.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kurasync/errors.hpp"
#include "kurasync/rng.hpp"

namespace kurasync {

using MatVec = std::function<void(std::span<const double>, std::span<double>)>;

struct LanczosOptions {
  std::size_t max_basis = 64;
  std::size_t keep_per_end = 6;
  std::size_t max_restarts = 400;
  std::uint64_t seed = 0x6c616e637a6f73ULL;
};

struct EigenPair {
  double value = 0.0;
  double residual = 0.0;
  std::vector<double> vector;
};

struct ExtremalEigen {
  EigenPair min;
  EigenPair max;
  std::size_t matvecs = 0;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

/// Smallest and largest eigenpairs of the symmetric n x n operator `apply`,
/// each certified to residual <= abs_tol. Throws NumericalError with the best
/// residual seen if the restart budget runs out.
inline ExtremalEigen extremal_eigenpairs(const MatVec& apply, std::size_t n, double abs_tol,
                                         const LanczosOptions& opts = {}) {
  if (n == 0) throw InputError("eigenproblem of dimension 0");
  if (!(abs_tol > 0.0)) throw InputError("eigen tolerance must be positive");

  const std::size_t max_basis = std::max<std::size_t>(2, std::min(n, opts.max_basis));
  Rng rng(opts.seed);
  std::size_t matvecs = 0;

  std::vector<std::vector<double>> basis;    // orthonormal columns V
  std::vector<std::vector<double>> images;   // A V
  Eigen::MatrixXd proj;                      // V^T A V

  auto orthogonalize = [&](std::vector<double>& w) {
    // Two passes of classical Gram-Schmidt keep the basis orthonormal to
    // working precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& v : basis) {
        const double c = detail::dot(v, w);
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * v[i];
      }
    }
    return detail::norm(w);
  };

  auto random_direction = [&]() {
    // Returns a unit vector orthogonal to the basis, or empty if the basis
    // already spans the space.
    for (int attempt = 0; attempt < 8; ++attempt) {
      std::vector<double> w(n);
      for (auto& x : w) x = rng.normal();
      const double before = detail::norm(w);
      const double after = orthogonalize(w);
      if (after > 1e-8 * before) {
        for (auto& x : w) x /= after;
        return w;
      }
    }
    return std::vector<double>{};
  };

  auto push = [&](std::vector<double> v) {
    std::vector<double> av(n);
    apply(v, av);
    ++matvecs;
    const std::size_t k = basis.size();
    Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k + 1),
                                                  static_cast<Eigen::Index>(k + 1));
    if (k > 0) grown.topLeftCorner(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = proj;
    for (std::size_t i = 0; i < k; ++i) {
      const double h = detail::dot(basis[i], av);
      grown(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = h;
      grown(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = h;
    }
    grown(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = detail::dot(v, av);
    proj = std::move(grown);
    basis.push_back(std::move(v));
    images.push_back(std::move(av));
  };

  auto next_direction = [&]() {
    // Krylov continuation from the newest image; falls back to a random
    // direction on (near) breakdown.
    std::vector<double> w = images.back();
    const double before = detail::norm(w);
    const double after = orthogonalize(w);
    if (after > 1e-10 * std::max(before, 1e-300) && after > 0.0) {
      for (auto& x : w) x /= after;
      return w;
    }
    return random_direction();
  };

  push(random_direction());

  double best_residual = std::numeric_limits<double>::infinity();
  for (std::size_t restart = 0; restart <= opts.max_restarts; ++restart) {
    while (basis.size() < max_basis) {
      auto w = next_direction();
      if (w.empty()) break;  // basis spans R^n
      push(std::move(w));
    }

    const auto m = static_cast<Eigen::Index>(basis.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj);
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::MatrixXd& s = es.eigenvectors();

    auto ritz = [&](Eigen::Index j, std::vector<double>& u, std::vector<double>& au) {
      u.assign(n, 0.0);
      au.assign(n, 0.0);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double c = s(i, j);
        const auto& v = basis[static_cast<std::size_t>(i)];
        const auto& av = images[static_cast<std::size_t>(i)];
        for (std::size_t r = 0; r < n; ++r) {
          u[r] += c * v[r];
          au[r] += c * av[r];
        }
      }
    };
    auto residual_of = [&](double value, const std::vector<double>& u,
                           const std::vector<double>& au) {
      double acc = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double d = au[r] - value * u[r];
        acc += d * d;
      }
      return std::sqrt(acc);
    };

    std::vector<double> umin, aumin, umax, aumax;
    ritz(0, umin, aumin);
    ritz(m - 1, umax, aumax);
    const double rmin = residual_of(theta(0), umin, aumin);
    const double rmax = residual_of(theta(m - 1), umax, aumax);
    best_residual = std::min(best_residual, std::max(rmin, rmax));

    const bool spans = basis.size() == n;
    if ((rmin <= abs_tol && rmax <= abs_tol) || spans) {
      // Certify with fresh matvecs rather than the accumulated images.
      ExtremalEigen out;
      auto finish = [&](std::vector<double> u) {
        const double un = detail::norm(u);
        for (auto& x : u) x /= un;
        std::vector<double> au(n);
        apply(u, au);
        ++matvecs;
        const double rq = detail::dot(u, au);
        const double res = residual_of(rq, u, au);
        return EigenPair{rq, res, std::move(u)};
      };
      out.min = finish(std::move(umin));
      out.max = finish(std::move(umax));
      out.matvecs = matvecs;
      if (out.min.residual <= abs_tol && out.max.residual <= abs_tol) return out;
      best_residual = std::min(best_residual, std::max(out.min.residual, out.max.residual));
      if (spans) {
        throw NumericalError("eigensolver: full-space projection did not reach tolerance",
                             best_residual);
      }
    }

    // Thick restart: keep Ritz vectors from both ends.
    const std::size_t keep_end = std::min<std::size_t>(opts.keep_per_end, basis.size() / 3 + 1);
    std::vector<Eigen::Index> keep;
    for (std::size_t j = 0; j < keep_end; ++j) keep.push_back(static_cast<Eigen::Index>(j));
    for (std::size_t j = 0; j < keep_end; ++j) {
      const auto idx = m - 1 - static_cast<Eigen::Index>(j);
      if (std::find(keep.begin(), keep.end(), idx) == keep.end()) keep.push_back(idx);
    }
    auto continuation = next_direction();
    std::vector<std::vector<double>> new_basis, new_images;
    Eigen::VectorXd kept_theta(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t t = 0; t < keep.size(); ++t) {
      std::vector<double> u, au;
      ritz(keep[t], u, au);
      new_basis.push_back(std::move(u));
      new_images.push_back(std::move(au));
      kept_theta(static_cast<Eigen::Index>(t)) = theta(keep[t]);
    }
    basis = std::move(new_basis);
    images = std::move(new_images);
    proj = kept_theta.asDiagonal();
    if (!continuation.empty()) {
      // The continuation direction was orthogonal to the old basis, hence to
      // its Ritz vectors; re-orthogonalize against rounding drift.
      const double nrm = orthogonalize(continuation);
      if (nrm > 1e-8) {
        for (auto& x : continuation) x /= nrm;
        push(std::move(continuation));
      }
    }
    if (basis.size() == keep.size()) {
      auto w = random_direction();
      if (!w.empty()) push(std::move(w));
    }
  }
  throw NumericalError("eigensolver: restart budget exhausted", best_residual);
}

}  // namespace kurasync
