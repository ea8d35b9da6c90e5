#pragma once

#include "ratheun/classical.hpp"

namespace ratheun {

/// Basis data for omega-breve_n(z; a, b) = (az;p^2)_n (a/z;p^2)_n / ((bz;p^2)_n (b/z;p^2)_n).
template <class C>
struct OmegaBasisSpec {
  C a, b, p;
};

template <class C>
C omega(int n, const C& z, const OmegaBasisSpec<C>& spec) {
  C q2 = spec.p * spec.p;
  C den = qpochhammer(C(spec.b * z), q2, n) * qpochhammer(C(spec.b / z), q2, n);
  if (abs_d(den) < 1e-250)
    throw pole_proximity_error("omega: evaluation at a basis pole");
  return qpochhammer(C(spec.a * z), q2, n) * qpochhammer(C(spec.a / z), q2, n) / den;
}

namespace detail {

template <class C>
C eps_product(const std::array<C, 6>& e) {
  C r(1);
  for (const C& v : e) r *= v;
  return r;
}

}  // namespace detail

/// The splitting of the classical operator: W-hat f = 0 is equivalent to
/// W1 f = lambda W2 f with lambda = eps5/eps6 + eps6/eps5, and W1, W2 free of
/// the ratio eps5/eps6.
template <class C>
struct SplitOperators {
  QDiffOperator<C> w1, w2;
  C lambda;
  OmegaBasisSpec<C> basis;          // omega_n
  OmegaBasisSpec<C> basis_shifted;  // omega+_n (eps123456 -> eps123456 p^2)
  std::array<C, 6> eps6{};
  C p;
  C alpha;
};

template <class C>
SplitOperators<C> split_operators(const std::array<C, 6>& eps6, const C& p,
                                  const PrecisionContext& ctx) {
  ctx.validate();
  SplitOperators<C> out;
  out.eps6 = eps6;
  out.p = p;
  const C q = p * p;
  const C a = detail::eps_product(eps6);
  out.alpha = a;
  const C e5 = eps6[4], e6 = eps6[5];
  const C e1234 = eps6[0] * eps6[1] * eps6[2] * eps6[3];
  out.lambda = e5 / e6 + e6 / e5;

  auto e = eps6;
  auto bhat = [p, a, q, e](const C& z) {
    C num = p * e[4] * e[5] * (z - a) * (z - a * q);
    for (int j = 0; j < 4; ++j) num *= (C(1) - e[j] * e[j] * p * z);
    return num / (z * (C(1) - z * z) * (C(1) - q * z * z));
  };
  C diag2 = e1234 * p;
  for (int j = 0; j < 4; ++j) diag2 *= (C(1) - a * p / (eps6[j] * eps6[j]));
  C diag1 = x_of(C(e1234 * p)) * diag2;
  C s56 = e5 * e6;

  std::function<C(const C&)> W1A1 = [bhat, s56, p](const C& z) {
    return x_of(C(s56 * p * z)) * bhat(z);
  };
  std::function<C(const C&)> W1A2 = [bhat, s56, p](const C& z) {
    return x_of(C(s56 * p / z)) * bhat(C(1) / z);
  };
  std::function<C(const C&)> W1A0 = [W1A1, W1A2, diag1](const C& z) {
    return -W1A1(z) - W1A2(z) + diag1;
  };
  out.w1 = QDiffOperator<C>{W1A1, W1A2, W1A0, q, "split-W1"};

  std::function<C(const C&)> W2A1 = bhat;
  std::function<C(const C&)> W2A2 = [bhat](const C& z) { return bhat(C(1) / z); };
  std::function<C(const C&)> W2A0 = [bhat, diag2](const C& z) {
    return -bhat(z) - bhat(C(1) / z) + diag2;
  };
  out.w2 = QDiffOperator<C>{W2A1, W2A2, W2A0, q, "split-W2"};

  out.basis = OmegaBasisSpec<C>{eps6[0] * eps6[0] * p, a * q, p};
  out.basis_shifted = OmegaBasisSpec<C>{eps6[0] * eps6[0] * p, a * q * q, p};
  return out;
}

template <class C>
struct SplitConsistency {
  double split_identity_err = 0.0;    // W1 - lambda W2 vs the classical W-hat
  double ratio_independence_err = 0.0;  // coefficients unchanged under eps5<->eps6 rebalancing
  bool pass(const PrecisionContext& ctx) const {
    return split_identity_err <= ctx.equality_tolerance &&
           ratio_independence_err <= ctx.equality_tolerance;
  }
};

template <class C>
SplitConsistency<C> verify_split(const std::array<C, 6>& eps6, const C& p,
                                 const PrecisionContext& ctx, Rng& rng) {
  SplitConsistency<C> rep;
  auto split = split_operators(eps6, p, ctx);
  auto cls = make_classical(eps6, p, C(1), ctx);
  auto g = [](const C& z) { return C(1.3) + C(0.2) * z + C(0.4) / z + C(0.05) * z * z; };
  // rebalanced parameter set: eps5 -> c eps5, eps6 -> eps6 / c
  std::array<C, 6> re = eps6;
  C cshift = complex_traits<C>::make(1.31, 0.27);
  re[4] = eps6[4] * cshift;
  re[5] = eps6[5] / cshift;
  auto split2 = split_operators(re, p, ctx);
  for (int i = 0; i < 8; ++i) {
    double th = rng.angle();
    C z = complex_traits<C>::make(0.79 * std::cos(th), 0.79 * std::sin(th));
    C lhs = split.w1.apply(g, z) - split.lambda * split.w2.apply(g, z);
    C rhs = cls.hatted.apply(g, z);
    rep.split_identity_err = std::max(rep.split_identity_err, rel_diff(lhs, rhs));
    rep.ratio_independence_err = std::max(
        {rep.ratio_independence_err, rel_diff(split.w1.A1(z), split2.w1.A1(z)),
         rel_diff(split.w2.A1(z), split2.w2.A1(z)),
         rel_diff(split.w1.A0(z), split2.w1.A0(z)),
         rel_diff(split.w2.A0(z), split2.w2.A0(z))});
  }
  return rep;
}

/// The four printed two-diagonal coefficients at index n.
template <class C>
struct TwoDiagCoeffs {
  C mu1, nu1, mu2, nu2;
};

template <class C>
TwoDiagCoeffs<C> two_diag_coeffs(int n, const std::array<C, 6>& eps6, const C& p) {
  const C a = detail::eps_product(eps6);
  const C e1 = eps6[0], e5 = eps6[4], e6 = eps6[5];
  const C e1234 = eps6[0] * eps6[1] * eps6[2] * eps6[3];
  const C e1sq = e1 * e1;
  C den = e1sq * a * pow_int(p, 4 * n + 1) - C(1);
  if (abs_d(den) < 1e-8)
    throw degenerate_parameter_error("two_diag_coeffs: vanishing denominator");

  TwoDiagCoeffs<C> out;
  C mu2num = p * (e1sq * a * pow_int(p, 2 * n + 1) - C(1)) * (a * p - e1sq);
  for (int j = 1; j < 4; ++j)
    mu2num *= (a * pow_int(p, 2 * n + 1) - eps6[j] * eps6[j]);
  out.mu2 = mu2num / (e1234 * den);

  C nu2num = (C(1) - pow_int(p, 2 * n)) * (a * p - e1sq) * e5 * e6;
  for (int j = 1; j < 4; ++j)
    nu2num *= (e1sq * eps6[j] * eps6[j] * pow_int(p, 2 * n) - C(1));
  out.nu2 = nu2num / den;

  out.mu1 = x_of(C(e1234 * pow_int(p, 2 * n + 1))) * out.mu2;
  out.nu1 = x_of(C(e1sq * e5 * e6 * pow_int(p, 2 * n))) * out.nu2;
  return out;
}

/// GEVP solution data: R_n = sum_s A_{ns} omega_s with A_{n0} = 1 and the
/// forward recurrence, lambda_n = mu_{1,n}/mu_{2,n}.
template <class C>
struct TwoDiagExpansion {
  int n = 0;
  C lambda_n;
  std::vector<C> A;
  std::vector<TwoDiagCoeffs<C>> coeffs;  // index 0..n
  OmegaBasisSpec<C> basis;

  C operator()(const C& z) const {
    C s(0);
    for (int k = 0; k <= n; ++k) s += A[std::size_t(k)] * omega(k, z, basis);
    return s;
  }
};

template <class C>
TwoDiagExpansion<C> solve_recurrence(int n, const std::array<C, 6>& eps6,
                                     const C& p, const PrecisionContext& ctx) {
  ctx.validate();
  TwoDiagExpansion<C> out;
  out.n = n;
  const C a = detail::eps_product(eps6);
  out.basis = OmegaBasisSpec<C>{eps6[0] * eps6[0] * p, a * p * p, p};
  for (int s = 0; s <= n; ++s) out.coeffs.push_back(two_diag_coeffs(s, eps6, p));
  const auto& cn = out.coeffs[std::size_t(n)];
  out.lambda_n = cn.mu1 / cn.mu2;
  out.A.assign(std::size_t(n) + 1, C(0));
  out.A[0] = C(1);
  for (int s = 0; s + 1 <= n; ++s) {
    const auto& cs = out.coeffs[std::size_t(s)];
    const auto& cs1 = out.coeffs[std::size_t(s) + 1];
    C den = cs1.nu1 - out.lambda_n * cs1.nu2;
    if (abs_d(den) < 1e-10 * (abs_d(cs1.nu1) + abs_d(C(out.lambda_n * cs1.nu2)) + 1e-30))
      throw resonance_error("solve_recurrence: vanishing denominator at s = " +
                            std::to_string(s + 1));
    out.A[std::size_t(s) + 1] = out.A[std::size_t(s)] * (out.lambda_n * cs.mu2 - cs.mu1) / den;
  }
  return out;
}

/// GEVP for a pair of generic classical operators sharing eps_1 and the
/// product eps_2...eps_6: both are two-diagonal on the same omega-family
/// (target shifted by p^2), with the printed mu_n, nu_n prefactors.
template <class C>
struct GenericPairReport {
  double mu_formula_err = 0.0;
  double nu_formula_err = 0.0;
  double two_diag_err_w = 0.0;
  double two_diag_err_y = 0.0;
  double gevp_residual = 0.0;
  bool pass(const PrecisionContext& ctx) const {
    double t = ctx.equality_tolerance;
    return mu_formula_err <= t && nu_formula_err <= t && two_diag_err_w <= t &&
           two_diag_err_y <= t && gevp_residual <= t;
  }
};

namespace detail {

/// Same-family two-diagonal coefficients of a generic classical W-hat:
/// mu_n and nu_n of the shifted-basis expansion W-hat omega_n = mu_n omega+_n + nu_n omega+_{n-1}.
template <class C>
std::pair<C, C> classical_two_diag(int n, const std::array<C, 6>& e, const C& p) {
  auto td = two_diag_coeffs(n, e, p);
  const C e1 = e[0], e5 = e[4], e6 = e[5];
  const C e1234 = e[0] * e[1] * e[2] * e[3];
  const C a = eps_product(e);
  C mu = (e1234 * e6 * pow_int(p, 2 * n + 1) - e5) *
         (e1234 * e5 * pow_int(p, 2 * n + 1) - e6) / (a * pow_int(p, 2 * n + 1)) *
         td.mu2;
  C nu = (pow_int(C(e1 * e5), 2) * pow_int(p, 2 * n) - C(1)) *
         (pow_int(C(e1 * e6), 2) * pow_int(p, 2 * n) - C(1)) /
         (e1 * e1 * e5 * e6 * pow_int(p, 2 * n)) * td.nu2;
  return {mu, nu};
}

/// Fit W omega_n over {omega+_n, omega+_{n-1}}: 2x2 solve at two sample z,
/// residual at validation z.
template <class C>
std::tuple<C, C, double> fit_two_diag(const QDiffOperator<C>& W, int n,
                                      const OmegaBasisSpec<C>& basis,
                                      const OmegaBasisSpec<C>& target, Rng& rng) {
  auto g = [&](const C& z) {
    return W.apply([&](const C& w) { return omega(n, w, basis); }, z);
  };
  double th = rng.angle();
  auto at = [&](double phi) {
    return complex_traits<C>::make(0.81 * std::cos(phi), 0.81 * std::sin(phi));
  };
  C z1 = at(th), z2 = at(th + 2.1), zv = at(th + 4.4);
  if (n == 0) {
    C mu = g(z1) / omega(0, z1, target);
    double resid = rel_diff(C(mu * omega(0, zv, target)), g(zv));
    return {mu, C(0), resid};
  }
  Matrix<C> M = {{omega(n, z1, target), omega(n - 1, z1, target)},
                 {omega(n, z2, target), omega(n - 1, z2, target)}};
  auto sol = lu_solve(std::move(M), {g(z1), g(z2)});
  C pred = sol.x[0] * omega(n, zv, target) + sol.x[1] * omega(n - 1, zv, target);
  double resid = rel_diff(pred, g(zv));
  return {sol.x[0], sol.x[1], resid};
}

}  // namespace detail

template <class C>
GenericPairReport<C> generic_pair(const std::array<C, 6>& epsW,
                                  const std::array<C, 6>& epsY, const C& p,
                                  int n_max, const PrecisionContext& ctx, Rng& rng) {
  if (rel_diff(epsW[0], epsY[0]) > ctx.equality_tolerance)
    throw invariant_error("generic_pair: delta_1 != eps_1");
  C prodW(1), prodY(1);
  for (int j = 1; j < 6; ++j) { prodW *= epsW[j]; prodY *= epsY[j]; }
  if (rel_diff(prodW, prodY) > ctx.equality_tolerance)
    throw invariant_error("generic_pair: delta_2..6 product != eps_2..6 product");

  GenericPairReport<C> rep;
  auto W = make_classical(epsW, p, C(1), ctx);
  auto Y = make_classical(epsY, p, C(1), ctx);
  const C a = detail::eps_product(epsW);
  OmegaBasisSpec<C> basis{epsW[0] * epsW[0] * p, a * p * p, p};
  OmegaBasisSpec<C> target{epsW[0] * epsW[0] * p, a * pow_int(p, 4), p};

  std::vector<C> muW(n_max + 1), nuW(n_max + 1), muY(n_max + 1), nuY(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    auto [mw, nw] = detail::classical_two_diag(n, epsW, p);
    auto [my, ny] = detail::classical_two_diag(n, epsY, p);
    muW[std::size_t(n)] = mw; nuW[std::size_t(n)] = nw;
    muY[std::size_t(n)] = my; nuY[std::size_t(n)] = ny;
    auto [fm, fn, fr] = detail::fit_two_diag(W.hatted, n, basis, target, rng);
    rep.two_diag_err_w = std::max(rep.two_diag_err_w, fr);
    rep.mu_formula_err = std::max(rep.mu_formula_err, rel_diff(fm, mw));
    if (n > 0) rep.nu_formula_err = std::max(rep.nu_formula_err, rel_diff(fn, nw));
    auto [gm, gn, gr] = detail::fit_two_diag(Y.hatted, n, basis, target, rng);
    rep.two_diag_err_y = std::max(rep.two_diag_err_y, gr);
    rep.mu_formula_err = std::max(rep.mu_formula_err, rel_diff(gm, my));
    if (n > 0) rep.nu_formula_err = std::max(rep.nu_formula_err, rel_diff(gn, ny));
  }

  // GEVP solution by the same recurrence pattern with lambda_n = mu_n^W / mu_n^Y
  for (int n = 1; n <= n_max; ++n) {
    C lam = muW[std::size_t(n)] / muY[std::size_t(n)];
    std::vector<C> A(std::size_t(n) + 1, C(0));
    A[0] = C(1);
    bool resonant = false;
    for (int s = 0; s + 1 <= n; ++s) {
      C den = nuW[std::size_t(s) + 1] - lam * nuY[std::size_t(s) + 1];
      if (abs_d(den) < 1e-12) { resonant = true; break; }
      A[std::size_t(s) + 1] = A[std::size_t(s)] *
                              (lam * muY[std::size_t(s)] - muW[std::size_t(s)]) / den;
    }
    if (resonant) continue;
    auto Rn = [&](const C& z) {
      C s(0);
      for (int k = 0; k <= n; ++k) s += A[std::size_t(k)] * omega(k, z, basis);
      return s;
    };
    for (int i = 0; i < 8; ++i) {
      double th = rng.angle();
      C z = complex_traits<C>::make(0.79 * std::cos(th), 0.79 * std::sin(th));
      C lw = W.hatted.apply(Rn, z);
      C ly = Y.hatted.apply(Rn, z);
      double scale = abs_d(lw) + abs_d(C(lam * ly)) + 1e-300;
      rep.gevp_residual = std::max(rep.gevp_residual, abs_d(C(lw - lam * ly)) / scale);
    }
  }
  return rep;
}

/// Finite-dimensional reduction: with eps_1^2 = alpha p^{2N+1} the span of
/// chi_0..chi_N is invariant and W becomes an (N+1)x(N+1) matrix.
template <class C>
struct FiniteDimProblem {
  int N = 0;
  EpsilonParams<C> eps;
  Matrix<C> M;                      // row i = expansion of W chi_i over chi_j
  std::vector<C> eigenvalues;
  std::vector<std::vector<C>> eigenvectors;  // v_n with psi_n = sum_j v_nj chi_j
  double truncation_defect = 0.0;   // |gamma_{N,3}| relative to the gamma scale
  std::vector<double> residuals;    // pointwise |W psi - lambda psi| / ||psi|| per pair
  bool components_all_nonzero = true;  // flag, not a failure
};

/// eps2to8 supplies eps_2..eps_8; eps_1 = p^{2N+2} eps_2...eps_8 closes both
/// conditions (eps_1^2 = alpha p^{2N+1} and alpha = p eps_1...eps_8) at once.
template <class C>
FiniteDimProblem<C> finite_dim(int N, const std::array<C, 7>& eps2to8, const C& p,
                               const C& eta0, const C& eta_tilde0,
                               const PrecisionContext& ctx, Rng& rng) {
  if (N < 0 || N > 12) throw invariant_error("finite_dim: need 0 <= N <= 12");
  FiniteDimProblem<C> out;
  out.N = N;
  EpsilonParams<C>& eps = out.eps;
  eps.p = p;
  C rest(1);
  for (int j = 0; j < 7; ++j) { eps.eps[std::size_t(j) + 1] = eps2to8[std::size_t(j)]; rest *= eps2to8[std::size_t(j)]; }
  eps.eps[0] = pow_int(p, 2 * N + 2) * rest;
  eps.eta0 = eta0;
  eps.eta_tilde0 = eta_tilde0;
  eps.validate(ctx);

  const int dim = N + 1;
  out.M.assign(dim, std::vector<C>(dim, C(0)));
  double gscale = 0.0;
  std::array<C, 4> gN{};
  for (int i = 0; i <= N; ++i) {
    auto g = gamma_closed(long(i), eps);
    if (i == N) gN = g;
    for (const C& v : g) gscale = std::max(gscale, abs_d(v));
    out.M[std::size_t(i)][0] += g[0];
    if (i >= 1) out.M[std::size_t(i)][std::size_t(i) - 1] += g[1];
    out.M[std::size_t(i)][std::size_t(i)] += g[2];
    if (i + 1 <= N) out.M[std::size_t(i)][std::size_t(i) + 1] += g[3];
  }
  out.truncation_defect = abs_d(gN[3]) / std::max(gscale, 1e-300);
  if (out.truncation_defect > ctx.equality_tolerance)
    throw invariant_error("finite_dim: truncation condition gamma_{N,N+1} = 0 violated");

  // psi_n = sum v_j chi_j solves W psi = lambda psi iff M^T v = lambda v
  auto eig = eig_dense(transpose(out.M));
  out.eigenvalues = eig.values;
  out.eigenvectors = eig.vectors;

  auto W = from_epsilon(eps, ctx);
  auto grid = eps.grid();
  for (int k = 0; k < dim; ++k) {
    const auto& v = out.eigenvectors[std::size_t(k)];
    PoleSet<C> ps = PoleSet<C>::from_indices(grid, 0, N);
    RationalPF<C> psi{ps, C(0), v};
    double vmax = 0.0;
    for (const auto& c : v) vmax = std::max(vmax, abs_d(c));
    for (const auto& c : v)
      if (abs_d(c) < 1e-10 * vmax) out.components_all_nonzero = false;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 8; ++i) {
      double th = rng.angle();
      C z = complex_traits<C>::make(0.81 * std::cos(th), 0.81 * std::sin(th));
      C wv = W.apply(psi, z);
      C pv = psi(z);
      den = std::max(den, abs_d(pv));
      num = std::max(num, abs_d(C(wv - out.eigenvalues[std::size_t(k)] * pv)));
    }
    out.residuals.push_back(num / std::max(den, 1e-300));
  }
  return out;
}

/// Negative control for the ordinary EVP: for a classical hatted operator and
/// a random [n/n] trial with poles x_1..x_n, the least-squares lambda leaves a
/// residual bounded away from zero (the image carries the pole at x_{n+1}).
template <class C>
double ordinary_evp_best_residual(const QDiffOperator<C>& hatted,
                                  const GridParams<C>& grid, int n,
                                  const PrecisionContext& ctx, Rng& rng) {
  PoleSet<C> ps = PoleSet<C>::from_indices(grid, 1, n);
  std::vector<C> coeffs;
  for (int k = 0; k < n; ++k) coeffs.push_back(rng.complex_in_annulus<C>(0.5, 1.5));
  RationalPF<C> psi{ps, rng.complex_in_annulus<C>(0.5, 1.5), coeffs};

  std::vector<C> wv, pv;
  for (int i = 0; i < 12; ++i) {
    double th = rng.angle();
    C z = complex_traits<C>::make(0.79 * std::cos(th), 0.79 * std::sin(th));
    wv.push_back(hatted.apply(psi, z));
    pv.push_back(psi(z));
  }
  using std::conj;
  C num(0), den(0);
  for (std::size_t i = 0; i < wv.size(); ++i) {
    num += conj(pv[i]) * wv[i];
    den += conj(pv[i]) * pv[i];
  }
  C lam = num / den;
  double worst = 0.0;
  for (std::size_t i = 0; i < wv.size(); ++i) {
    double scale = abs_d(wv[i]) + abs_d(C(lam * pv[i])) + 1e-300;
    worst = std::max(worst, abs_d(C(wv[i] - lam * pv[i])) / scale);
  }
  return worst;
}

}  // namespace ratheun
