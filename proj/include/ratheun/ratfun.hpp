#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "ratheun/linalg.hpp"
#include "ratheun/numerics.hpp"
#include "ratheun/sampling.hpp"

namespace ratheun {

/// An indexed set of candidate poles: grid indices (poles at x = grid_x(n))
/// plus optional extra poles given directly by their x-values (the y_n series
/// and similar off-grid points).
template <class C>
struct PoleSet {
  GridParams<C> grid;
  std::vector<long> indices;  // sorted, distinct
  std::vector<C> extra_x;

  static PoleSet from_indices(const GridParams<C>& grid, long lo, long hi) {
    PoleSet ps{grid, {}, {}};
    for (long n = lo; n <= hi; ++n) ps.indices.push_back(n);
    return ps;
  }

  std::size_t size() const { return indices.size() + extra_x.size(); }

  /// Pole x-values, grid indices first then extras.
  std::vector<C> xs() const {
    std::vector<C> out;
    out.reserve(size());
    for (long n : indices) out.push_back(grid_x(grid, n, true));
    for (const C& x : extra_x) out.push_back(x);
    return out;
  }

  /// z-locations of the poles (the |z| <= 1 preimage for extra poles).
  std::vector<C> zs() const {
    using std::sqrt;
    std::vector<C> out;
    out.reserve(size());
    for (long n : indices) out.push_back(grid.z_at(n));
    for (const C& x : extra_x) {
      C h = x / C(2);
      C root = sqrt(h * h - C(1));
      C z1 = h + root, z2 = h - root;
      C z = (abs_d(z1) <= abs_d(z2)) ? z1 : z2;
      if (std::abs(abs_d(z) - 1.0) < 1e-8)
        throw degenerate_grid_error("PoleSet: extra pole at the x = +-2 branch point");
      out.push_back(z);
    }
    return out;
  }

  void validate(double min_sep = 1e-3) const {
    for (std::size_t i = 1; i < indices.size(); ++i)
      if (indices[i] <= indices[i - 1])
        throw invariant_error("PoleSet: indices must be sorted and distinct");
    auto x = xs();
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = i + 1; j < x.size(); ++j)
        if (abs_d(C(x[i] - x[j])) < min_sep)
          throw degenerate_grid_error("PoleSet: poles closer than separation bound");
  }
};

/// c + sum_k xi_k / (x - x_k) over a PoleSet; the working representation of
/// every rational object in this library.
template <class C>
struct RationalPF {
  PoleSet<C> poles;
  C constant = C(0);
  std::vector<C> coeffs;  // aligned with poles.xs()

  C operator()(const C& z) const {
    C x = x_of(z);
    auto xv = poles.xs();
    C r = constant;
    for (std::size_t k = 0; k < xv.size(); ++k) {
      C d = x - xv[k];
      if (abs_d(d) < 1e-6 * (1.0 + abs_d(xv[k])))
        throw pole_proximity_error("RationalPF: evaluation too close to a pole");
      r += coeffs[k] / d;
    }
    return r;
  }
};

/// chi_n(x) = 1/(x - x_n).
template <class C>
RationalPF<C> chi(long n, const GridParams<C>& grid) {
  PoleSet<C> ps{grid, {n}, {}};
  grid_x(grid, n, true);
  return RationalPF<C>{ps, C(0), {C(1)}};
}

template <class C>
struct FitReport {
  RationalPF<C> fit;
  double residual = 0.0;      // max relative error over the validation points
  double conditioning = 0.0;  // LU estimate for the Cauchy solve
  bool accepted(const PrecisionContext& ctx) const {
    return residual <= ctx.fit_tolerance;
  }
  /// Coefficient at a grid index (0 when the index is not a candidate).
  C coeff_at_index(long n) const {
    for (std::size_t k = 0; k < fit.poles.indices.size(); ++k)
      if (fit.poles.indices[k] == n) return fit.coeffs[k];
    return C(0);
  }
  double max_coeff() const {
    double m = 0.0;
    for (const auto& c : fit.coeffs) m = std::max(m, abs_d(c));
    return m;
  }
};

/// Residue of g (a function of z, rational in x) at the pole x(z_pole),
/// measured in the x-plane: (1/2 pi i) oint g(z) x'(z) dz on a small circle.
/// Exponentially accurate in the point count for analytic integrands.
template <class C, class G>
C contour_residue(G&& g, const C& z_pole, double rho, int points = 32) {
  C s(0);
  for (int j = 0; j < points; ++j) {
    double th = 2.0 * M_PI * double(j) / double(points);
    C dz = complex_traits<C>::make(rho * std::cos(th), rho * std::sin(th));
    C z = z_pole + dz;
    C xprime = C(1) - C(1) / (z * z);
    s += g(z) * xprime * dz;
  }
  return s / complex_traits<C>::make(double(points));
}

namespace detail {

/// Contour radius for each candidate pole. Under the span hypothesis the only
/// z-singularities of g are the pole preimages z_j and 1/z_j, so the radius is
/// pushed to a fixed fraction of the distance to the nearest one (large
/// contours keep the shifted-argument cancellations inside g far below the
/// quadrature signal).
template <class C>
std::vector<double> contour_radii(const std::vector<C>& zs) {
  std::vector<double> rho(zs.size());
  for (std::size_t k = 0; k < zs.size(); ++k) {
    double d = abs_d(zs[k]);
    d = std::min(d, abs_d(C(zs[k] - C(1) / zs[k])));
    for (std::size_t j = 0; j < zs.size(); ++j) {
      if (j == k) continue;
      d = std::min(d, abs_d(C(zs[k] - zs[j])));
      d = std::min(d, abs_d(C(zs[k] - C(1) / zs[j])));
    }
    if (d <= 0.0)
      throw singular_system_error("contour_radii: clustered poles");
    rho[k] = 0.2 * d;
  }
  return rho;
}

}  // namespace detail

/// Hypothesis test "g lies in span{1/(x-x_k)} (+ constant)" for a prescribed
/// candidate pole set.
///
/// Sampling: m = |candidate| + constant + 8 points z_j = r e^{i theta_j},
/// r = 0.83, equally spaced with a seeded rotation; rotated again whenever an
/// x-value lands near a candidate pole or g is not evaluable there. The square
/// Cauchy system on the first points gives the conditioning estimate and a
/// first coefficient vector; coefficients are then refined by contour residues
/// at the candidate poles (the solve alone loses too many digits once the
/// grid spreads over several orders of magnitude). The residual is measured
/// on the remaining 8 points. residual > fit_tolerance means the hypothesis
/// is rejected; it is not an error.
template <class C, class G>
FitReport<C> fit_partial_fractions(G&& g, const PoleSet<C>& candidate,
                                   bool allow_constant,
                                   const PrecisionContext& ctx, Rng& rng) {
  if (candidate.size() > 32)
    throw invariant_error("fit_partial_fractions: candidate set too large");
  candidate.validate();
  const auto poles_x = candidate.xs();
  const auto poles_z = candidate.zs();
  const std::size_t nc = poles_x.size() + (allow_constant ? 1 : 0);
  const std::size_t m = nc + 8;
  const double radius = 0.83;

  // sample points: equally spaced on the circle, rotated until clean
  std::vector<C> zsamp;
  std::vector<C> gsamp;
  double theta0 = rng.angle();
  bool placed = false;
  for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
    zsamp.clear();
    gsamp.clear();
    placed = true;
    for (std::size_t j = 0; j < m; ++j) {
      double th = theta0 + 2.0 * M_PI * double(j) / double(m);
      C z = complex_traits<C>::make(radius * std::cos(th), radius * std::sin(th));
      C x = x_of(z);
      for (const auto& px : poles_x)
        if (abs_d(C(x - px)) < 1e-2 * (1.0 + abs_d(px))) { placed = false; break; }
      if (!placed) break;
      try {
        gsamp.push_back(g(z));
      } catch (const error&) {
        placed = false;
        break;
      }
      zsamp.push_back(z);
    }
    if (!placed) theta0 += 0.61803398875;  // golden-ratio turn
  }
  if (!placed)
    throw singular_system_error("fit_partial_fractions: no admissible sample set");

  // square Cauchy solve on the first nc points
  FitReport<C> report;
  report.fit.poles = candidate;
  report.fit.coeffs.assign(poles_x.size(), C(0));
  {
    Matrix<C> A(nc, std::vector<C>(nc));
    std::vector<C> b(nc);
    for (std::size_t i = 0; i < nc; ++i) {
      C x = x_of(zsamp[i]);
      std::size_t col = 0;
      if (allow_constant) A[i][col++] = C(1);
      for (const auto& px : poles_x) A[i][col++] = C(1) / (x - px);
      b[i] = gsamp[i];
    }
    std::optional<LinearSolve<C>> solved;
    try {
      solved = lu_solve(A, b);
    } catch (const singular_system_error&) {
      // resample once with a fresh rotation, then give up
      theta0 = rng.angle();
      for (std::size_t i = 0; i < nc; ++i) {
        double th = theta0 + 2.0 * M_PI * double(i) / double(nc);
        C z = complex_traits<C>::make(radius * std::cos(th), radius * std::sin(th));
        C x = x_of(z);
        std::size_t col = 0;
        if (allow_constant) A[i][col++] = C(1);
        for (const auto& px : poles_x) A[i][col++] = C(1) / (x - px);
        b[i] = g(z);
        zsamp[i] = z;
      }
      solved = lu_solve(A, b);  // throws singular_system_error on failure
    }
    report.conditioning = solved->conditioning;
    std::size_t col = 0;
    if (allow_constant) report.fit.constant = solved->x[col++];
    for (std::size_t k = 0; k < poles_x.size(); ++k)
      report.fit.coeffs[k] = solved->x[col++];
  }

  // residue refinement at each candidate pole, then one defect pass: the
  // defect g - sum xi/(x - x_k) cancels the dominant pole term analytically,
  // so its residues recover the coefficient rounding error itself
  auto rho = detail::contour_radii(poles_z);
  const int qpts = ctx.quadrature_points();
  for (std::size_t k = 0; k < poles_z.size(); ++k)
    report.fit.coeffs[k] = contour_residue(g, poles_z[k], rho[k], qpts);
  {
    auto coeffs = report.fit.coeffs;
    auto defect = [&](const C& z) {
      C x = x_of(z);
      C r = g(z);
      for (std::size_t k = 0; k < poles_x.size(); ++k)
        r -= coeffs[k] / (x - poles_x[k]);
      return r;
    };
    for (std::size_t k = 0; k < poles_z.size(); ++k)
      report.fit.coeffs[k] += contour_residue(defect, poles_z[k], rho[k], qpts);
  }
  if (allow_constant) {
    C acc(0);
    for (std::size_t i = nc; i < m; ++i) {
      C x = x_of(zsamp[i]);
      C r = gsamp[i];
      for (std::size_t k = 0; k < poles_x.size(); ++k)
        r -= report.fit.coeffs[k] / (x - poles_x[k]);
      acc += r;
    }
    report.fit.constant = acc / complex_traits<C>::make(8.0);
  }

  // residual over the 8 validation points, normalized by the largest quantity
  // entering the comparison (|g| or the largest partial-fraction term): the
  // grid spreads over orders of magnitude and the exact combination cancels
  // accordingly, so this is the relative residual binary64 can express
  double scale = 0.0, dev = 0.0;
  for (std::size_t i = nc; i < m; ++i) {
    C x = x_of(zsamp[i]);
    C fh = report.fit.constant;
    double tmax = abs_d(report.fit.constant);
    for (std::size_t k = 0; k < poles_x.size(); ++k) {
      C term = report.fit.coeffs[k] / (x - poles_x[k]);
      tmax = std::max(tmax, abs_d(term));
      fh += term;
    }
    scale = std::max({scale, abs_d(gsamp[i]), tmax});
    dev = std::max(dev, abs_d(C(gsamp[i] - fh)));
  }
  report.residual = dev / std::max(scale, 1e-300);
  return report;
}

/// Coefficient measurement alone (no validation residual): contour residues
/// at the poles of the set. Used where only the coefficients are wanted.
template <class C, class G>
std::vector<C> measure_coefficients(G&& g, const PoleSet<C>& poles,
                                    int points = 32) {
  auto zs = poles.zs();
  auto rho = detail::contour_radii(zs);
  std::vector<C> out(zs.size());
  for (std::size_t k = 0; k < zs.size(); ++k)
    out[k] = contour_residue(g, zs[k], rho[k], points);
  return out;
}

}  // namespace ratheun
