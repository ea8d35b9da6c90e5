#pragma once

#include "ratheun/heunop.hpp"

namespace ratheun {

/// A classical rational Heun operator: both the pole-skipping raising form
/// (acting on chi_n with the chi_1 column suppressed) and the gauge-removed
/// hatted form B1 (T+ - I) + B1(1/z) (T- - I) + hat-gamma_00 I.
template <class C>
struct ClassicalOperator {
  QDiffOperator<C> skip_pole;
  QDiffOperator<C> hatted;
  std::array<C, 6> eps6{};
  C p;
  C eta0;
  C alpha;  // = eps_1...eps_6
  C gamma00;
  C gamma00_hat;
  EpsilonParams<C> eps_full;  // eps_7, eps_8, tilde-eta_0 resolved
  GridParams<C> grid;
};

/// Classical instance from eps_1..eps_6: eps_7^2 = alpha p, eps_8^2 = 1/(alpha p^3),
/// tilde-eta_0 solved so the diagonal coefficient at n = 1 vanishes.
template <class C>
ClassicalOperator<C> make_classical(const std::array<C, 6>& eps6, const C& p,
                                    const C& eta0, const PrecisionContext& ctx) {
  using std::sqrt;
  ClassicalOperator<C> op;
  op.eps6 = eps6;
  op.p = p;
  op.eta0 = eta0;
  const C q = p * p;
  C a(1);
  for (const C& e : eps6) a *= e;
  op.alpha = a;
  op.grid = GridParams<C>::from_alpha_p(a, p);

  EpsilonParams<C> eps;
  eps.p = p;
  for (int j = 0; j < 6; ++j) eps.eps[j] = eps6[j];
  eps.eps[6] = sqrt(a * p);
  eps.eps[7] = sqrt(C(1) / (a * pow_int(p, 3)));
  // branch choice: p eps_7 eps_8 must be 1 so that alpha = eps_1...eps_6
  if (rel_diff(C(p * eps.eps[6] * eps.eps[7]), C(1)) > 1e-12)
    eps.eps[7] = -eps.eps[7];
  eps.eta0 = eta0;
  eps.eta_tilde0 = C(0);
  // tilde-eta_0 from gamma_{1,2} = 0 (counting the zero eta_tilde0 just set)
  eps.eta_tilde0 = -gamma_closed(1, eps)[2];
  eps.validate(ctx);
  op.eps_full = eps;

  const C kap = kappa_operator(a, q);
  C g00 = -kap * eta0 / pow_int(a, 3);
  for (const C& e : eps6) g00 *= (a * p - e * e);
  op.gamma00 = g00;

  // skip-pole raising form (W_red with r_1 = gamma00 chi_0)
  auto e = eps6;
  auto a1 = [kap, eta0, a, q, p, e](const C& z) {
    C num = -kap * eta0 * (a - q * z) * (a * q - z) * (C(1) - a * q * z);
    for (const C& v : e) num *= (C(1) - v * v * p * z);
    return num / (a * q * z * z * (C(1) - a * z) * (C(1) - z * z) * (C(1) - q * z * z));
  };
  const C x0 = grid_x(op.grid, 0L, true);
  std::function<C(const C&)> A1 = a1;
  std::function<C(const C&)> A2 = [a1](const C& z) { return a1(C(1) / z); };
  std::function<C(const C&)> A0 = [a1, q, x0, g00](const C& z) {
    C xz = x_of(z);
    C xp = x_of(C(q * z)), xm = x_of(C(z / q));
    return -a1(z) * (xz - x0) / (xp - x0) - a1(C(1) / z) * (xz - x0) / (xm - x0) + g00;
  };
  op.skip_pole = QDiffOperator<C>{A1, A2, A0, q, "classical-skip-pole"};

  // hatted form
  C g00h(1);
  for (const C& v : eps6) g00h *= (C(1) - a * p / (v * v));
  op.gamma00_hat = g00h;
  auto b1 = [a, q, p, e](const C& z) {
    C num = (z - a) * (z - a * q);
    for (const C& v : e) num *= (C(1) - v * v * p * z);
    return num / (z * z * (C(1) - z * z) * (C(1) - q * z * z));
  };
  std::function<C(const C&)> B1 = b1;
  std::function<C(const C&)> B2 = [b1](const C& z) { return b1(C(1) / z); };
  std::function<C(const C&)> B0 = [b1, g00h](const C& z) {
    return g00h - b1(z) - b1(C(1) / z);
  };
  op.hatted = QDiffOperator<C>{B1, B2, B0, q, "classical-hatted"};
  return op;
}

template <class C>
struct ClassicalCheckReport {
  std::vector<double> chi1_rel;    // |chi_1 coefficient| / max coefficient, per n
  std::vector<double> residuals;   // fit residuals, per n
  bool is_classical = false;
};

/// Pole-x_1 suppression check. For the raising form, W chi_n is fitted over
/// {x_0..x_{n+1}} for n = 0..n_max; for the hatted form, W chi_n over
/// {x_1..x_{n+1}} plus a constant for n = 1..n_max. In both cases the fitted
/// chi_1 coefficient must stay below fit_tolerance relative to the largest
/// coefficient.
template <class C>
ClassicalCheckReport<C> check_classical(const QDiffOperator<C>& W,
                                        const GridParams<C>& grid, int n_max,
                                        bool hatted_form,
                                        const PrecisionContext& ctx, Rng& rng) {
  ClassicalCheckReport<C> rep;
  rep.is_classical = true;
  int n_lo = hatted_form ? 1 : 0;
  for (int n = n_lo; n <= n_max; ++n) {
    auto f = chi(n, grid);
    auto g = W.applied(f);
    PoleSet<C> cand{grid, {}, {}};
    for (long k = hatted_form ? 1 : 0; k <= n + 1; ++k) cand.indices.push_back(k);
    auto fit = fit_partial_fractions(g, cand, hatted_form, ctx, rng);
    double mx = std::max(fit.max_coeff(), abs_d(fit.fit.constant));
    double c1 = abs_d(fit.coeff_at_index(1)) / std::max(mx, 1e-300);
    rep.chi1_rel.push_back(c1);
    rep.residuals.push_back(fit.residual);
    if (c1 > ctx.fit_tolerance || fit.residual > ctx.fit_tolerance)
      rep.is_classical = false;
  }
  return rep;
}

namespace detail {

/// Numerator polynomial of a hatted-form B1: coefficients of
/// B1(z) z^2 (1-z^2)(1-q z^2) / ((z-alpha)(z-alpha q)), interpolated at
/// degree 8 so excess degrees land in indices 7..8 (checked ~ 0 downstream).
template <class C, class F>
std::vector<C> extract_numerator(F&& B1, const C& alpha, const C& q,
                                 const PrecisionContext& ctx, Rng& rng) {
  auto g = [&](const C& z) {
    return B1(z) * z * z * (C(1) - z * z) * (C(1) - q * z * z) /
           ((z - alpha) * (z - alpha * q));
  };
  return interpolate_polynomial<C>(g, 8, 0.9, rng.angle(), ctx);
}

}  // namespace detail

/// tau_1 W1 + tau_2 W2 with the leading and constant numerator coefficients
/// eliminated (they are proportional across the classical family on a shared
/// grid, so one linear condition fixes tau up to scale).
template <class C>
struct MinimalOperator {
  QDiffOperator<C> hatted;
  C tau1, tau2;
  std::vector<C> numerator;  // combined numerator coefficients (degree <= 8 slots)
  double leakage = 0.0;      // max(|coeff_0|, |coeff_6|) / max interior coefficient
  C alpha, q;
};

template <class C>
MinimalOperator<C> minimal_combination(const ClassicalOperator<C>& W1,
                                       const ClassicalOperator<C>& W2,
                                       const PrecisionContext& ctx, Rng& rng) {
  if (rel_diff(W1.alpha, W2.alpha) > ctx.equality_tolerance ||
      rel_diff(W1.p, W2.p) > ctx.equality_tolerance)
    throw invariant_error("minimal_combination: operators must share the grid");
  const C q = W1.hatted.q;
  auto q1 = detail::extract_numerator<C>(W1.hatted.A1, W1.alpha, q, ctx, rng);
  auto q2 = detail::extract_numerator<C>(W2.hatted.A1, W2.alpha, q, ctx, rng);

  MinimalOperator<C> out;
  out.alpha = W1.alpha;
  out.q = q;
  double s1 = abs_d(q1[0]), s2 = abs_d(q2[0]);
  double szero = std::max({abs_d(q1[6]), abs_d(q2[6]), s1, s2});
  if (s1 <= ctx.fit_tolerance * szero) {
    out.tau1 = C(1);
    out.tau2 = C(0);  // W1 already minimal
  } else if (s2 <= ctx.fit_tolerance * szero) {
    out.tau1 = C(0);
    out.tau2 = C(1);
  } else {
    out.tau1 = q2[0];
    out.tau2 = -q1[0];
  }

  out.numerator.resize(9);
  double interior = 0.0;
  for (int j = 0; j <= 8; ++j) {
    out.numerator[j] = out.tau1 * q1[j] + out.tau2 * q2[j];
    if (j >= 1 && j <= 5) interior = std::max(interior, abs_d(out.numerator[j]));
  }
  if (interior == 0.0)
    throw invariant_error("minimal_combination: proportional inputs, combination vanishes");
  out.leakage = std::max(abs_d(out.numerator[0]), abs_d(out.numerator[6])) / interior;

  C t1 = out.tau1, t2 = out.tau2;
  auto b1a = W1.hatted.A1, b1b = W2.hatted.A1;
  auto b2a = W1.hatted.A2, b2b = W2.hatted.A2;
  auto b0a = W1.hatted.A0, b0b = W2.hatted.A0;
  out.hatted = QDiffOperator<C>{
      [t1, t2, b1a, b1b](const C& z) { return t1 * b1a(z) + t2 * b1b(z); },
      [t1, t2, b2a, b2b](const C& z) { return t1 * b2a(z) + t2 * b2b(z); },
      [t1, t2, b0a, b0b](const C& z) { return t1 * b0a(z) + t2 * b0b(z); },
      q, "classical-minimal"};
  return out;
}

}  // namespace ratheun
