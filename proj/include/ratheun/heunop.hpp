#pragma once

#include <array>
#include <functional>
#include <string>

#include "ratheun/ratfun.hpp"

namespace ratheun {

/// Second-order q-shift operator W = A1(z) T+ + A2(z) T- + A0(z) I with
/// T+- f(z) = f(z q^{+-1}). Coefficients are black-box functions of z;
/// structured data (eta, epsilon) lives with the constructors that know it.
template <class C>
struct QDiffOperator {
  std::function<C(const C&)> A1, A2, A0;
  C q;
  std::string label;

  /// (W f)(z). Points where a shift denominator degenerates (z^2 or q z^2
  /// within 1e-8 of 1) are rejected.
  template <class F>
  C apply(F&& f, const C& z) const {
    C z2 = z * z;
    if (abs_d(C(z2 - C(1))) < 1e-8 || abs_d(C(q * z2 - C(1))) < 1e-8)
      throw pole_proximity_error("QDiffOperator: z at a shift fixed point");
    return A1(z) * f(q * z) + A2(z) * f(z / q) + A0(z) * f(z);
  }

  /// W applied to a rational object, as a reusable function of z.
  std::function<C(const C&)> applied(RationalPF<C> f) const {
    auto self = *this;
    return [self, f = std::move(f)](const C& z) { return self.apply(f, z); };
  }
};

/// kappa of the closed form A1 = kappa (qz - alpha) Q8(z) / (z^2 (1-alpha z)(1-z^2)(1-q z^2)).
/// (Stored as kappa_operator to keep it apart from the kappa in the series
/// argument b = kappa z of the hypergeometric module.)
template <class C>
C kappa_operator(const C& alpha, const C& q) {
  C a2 = alpha * alpha;
  return alpha * pow_int(q, 3) /
         (pow_int(C(C(1) - q), 2) * pow_int(C(C(1) - q * q), 2) * (C(1) - a2 * q) *
          (C(1) - a2 * q * q) * (C(1) - a2 * q * q * q));
}

/// The nine xi_{ik} defining r_1, r_2, r_3 (the prescribed images of
/// chi_0, chi_1, chi_2), in the order
/// xi00 xi01 xi10 xi11 xi12 xi20 xi21 xi22 xi23.
template <class C>
struct RSpec {
  std::array<C, 9> xi{};

  /// r_{j+1}(x) for j = 0,1,2.
  C r(int j, const C& x, const GridParams<C>& grid) const {
    auto term = [&](std::size_t idx, long k) { return xi[idx] / (x - grid_x(grid, k)); };
    if (j == 0) return term(0, 0) + term(1, 1);
    if (j == 1) return term(2, 0) + term(3, 1) + term(4, 2);
    return term(5, 0) + term(6, 1) + term(7, 2) + term(8, 3);
  }
};

/// W from prescribed r_1, r_2, r_3: A1 and A2 are the three-node interpolation
/// sums (with the cyclic convention x_3 = x_0, x_4 = x_1), and A0 is solved
/// pointwise from the defining relation W chi_0 = r_1.
template <class C>
QDiffOperator<C> build_from_rspec(const RSpec<C>& r, const GridParams<C>& grid,
                                  const PrecisionContext& ctx) {
  ctx.validate();
  const C q = grid.q;
  const C x0 = grid_x(grid, 0L, true), x1 = grid_x(grid, 1L, true),
          x2 = grid_x(grid, 2L, true);
  grid_x(grid, 3L, true);
  grid_x(grid, 4L, true);

  auto nodes = std::array<C, 5>{x0, x1, x2, x0, x1};
  auto interp_sum = [r, grid, nodes](const C& z, const C& x_here, const C& x_other) {
    C s(0);
    for (int j = 0; j < 3; ++j) {
      C num = (x_here - nodes[j]) * (x_other - nodes[j]) * r.r(j, x_here, grid);
      C den = (nodes[j] - nodes[j + 1]) * (nodes[j] - nodes[j + 2]);
      s += num / den;
    }
    return s;
  };

  auto guard = [q](const C& z) {
    C xp = x_of(C(q * z)), xm = x_of(C(z / q)), xz = x_of(z);
    if (abs_d(C(xp - xz)) < 1e-10 || abs_d(C(xm - xz)) < 1e-10 ||
        abs_d(C(xp - xm)) < 1e-10)
      throw pole_proximity_error("build_from_rspec: z at an interpolation node collision");
    return std::array<C, 3>{xp, xm, xz};
  };

  std::function<C(const C&)> A1 = [=](const C& z) {
    auto [xp, xm, xz] = guard(z);
    return (xp - x0) * (xp - x1) * (xp - x2) / ((xp - xz) * (xp - xm)) *
           interp_sum(z, xz, xm);
  };
  std::function<C(const C&)> A2 = [=](const C& z) {
    auto [xp, xm, xz] = guard(z);
    return (xm - x0) * (xm - x1) * (xm - x2) / ((xm - xz) * (xm - xp)) *
           interp_sum(z, xz, xp);
  };
  std::function<C(const C&)> A0 = [=](const C& z) {
    auto [xp, xm, xz] = guard(z);
    return (xz - x0) * (r.r(0, xz, grid) - A1(z) / (xp - x0) - A2(z) / (xm - x0));
  };
  return QDiffOperator<C>{A1, A2, A0, q, "rspec"};
}

/// Q8 coefficients eta_0..eta_8, the A0 structure constants, and the c_i of
/// the diagonal template.
template <class C>
struct EtaCoeffs {
  std::array<C, 9> eta{};
  std::array<C, 5> eta_tilde{};  // tilde-eta_0..tilde-eta_4
  std::array<C, 4> c{};          // c_1..c_4

  void validate(const C& alpha, const C& q, const PrecisionContext& ctx) const {
    if (rel_diff(eta[8], C(alpha * alpha * pow_int(q, 3) * eta[0])) >
        ctx.equality_tolerance)
      throw invariant_error("EtaCoeffs: eta_8 != alpha^2 q^3 eta_0");
    if (rel_diff(c[0], C(q * (q + C(1)) * alpha * eta[0])) > ctx.equality_tolerance)
      throw invariant_error("EtaCoeffs: c_1 != q(q+1) alpha eta_0");
  }
};

/// c_1..c_4 from eta (the diagonal template constants).
template <class C>
std::array<C, 4> c_from_eta(const std::array<C, 9>& eta, const C& alpha, const C& q) {
  std::array<C, 4> c;
  c[0] = alpha * q * eta[0] + eta[8] / (alpha * q);
  c[1] = alpha * q * eta[1] + eta[7] / (alpha * q);
  c[2] = (eta[7] + eta[5] * q + eta[3] * q * q + eta[1] * q * q * q) /
         (q * (C(1) - q));
  c[3] = (eta[8] + eta[6] * q + eta[4] * q * q + eta[2] * q * q * q +
          eta[0] * q * q * q * q) /
         (q * (C(1) - q));
  return c;
}

/// z -> kappa (qz - alpha) Q8(z) / (z^2 (1 - alpha z)(1 - z^2)(1 - q z^2)).
template <class C>
std::function<C(const C&)> a1_closed_form(const EtaCoeffs<C>& eta,
                                          const GridParams<C>& grid) {
  std::array<C, 9> e = eta.eta;
  C alpha = grid.alpha, q = grid.q;
  C kap = kappa_operator(alpha, q);
  return [e, alpha, q, kap](const C& z) {
    C q8(0), pw(1);
    for (int j = 0; j <= 8; ++j) { q8 += e[j] * pw; pw *= z; }
    return kap * (q * z - alpha) * q8 /
           (z * z * (C(1) - alpha * z) * (C(1) - z * z) * (C(1) - q * z * z));
  };
}

namespace detail {

/// Degree-d polynomial coefficients through d+1 circle nodes, with two extra
/// validation nodes checked against the interpolant.
template <class C, class G>
std::vector<C> interpolate_polynomial(G&& g, int degree, double radius,
                                      double rotation, const PrecisionContext& ctx,
                                      double* validation_err = nullptr) {
  int n = degree + 1;
  Matrix<C> V(n, std::vector<C>(n));
  std::vector<C> b(n);
  std::vector<C> nodes(n);
  for (int i = 0; i < n; ++i) {
    double th = rotation + 2.0 * M_PI * double(i) / double(n);
    C z = complex_traits<C>::make(radius * std::cos(th), radius * std::sin(th));
    nodes[i] = z;
    C pw(1);
    for (int j = 0; j < n; ++j) { V[i][j] = pw; pw *= z; }
    b[i] = g(z);
  }
  auto sol = lu_solve(std::move(V), std::move(b));
  double worst = 0.0;
  for (int extra = 0; extra < 2; ++extra) {
    double th = rotation + (0.5 + extra) * M_PI / double(n);
    C z = complex_traits<C>::make(radius * std::cos(th), radius * std::sin(th));
    C pv(0), pw(1);
    for (int j = 0; j < n; ++j) { pv += sol.x[j] * pw; pw *= z; }
    worst = std::max(worst, rel_diff(pv, g(z)));
  }
  if (validation_err) *validation_err = worst;
  if (worst > ctx.equality_tolerance)
    throw singular_system_error("interpolate_polynomial: validation failed (degree hypothesis?)");
  return sol.x;
}

}  // namespace detail

/// Recover eta_0..eta_8 from the interpolation construction: evaluate the
/// three-node sum of the A1 formula, multiply by the stated Pochhammer
/// denominator so only the degree-8 polynomial Q8 remains, and interpolate.
/// The tilde-eta are then fitted from the A0 template
///   A0 = t0 + t1 (z^2 + z^-2) + t2 (z + z^-1)
///        + (t3 + t4 z)/(1 - q z^2) + (t3 q + t4 z)/(z^2 - q).
template <class C>
EtaCoeffs<C> eta_from_rspec(const RSpec<C>& r, const GridParams<C>& grid,
                            const PrecisionContext& ctx, Rng& rng) {
  const C q = grid.q, alpha = grid.alpha;
  const C x0 = grid_x(grid, 0L), x1 = grid_x(grid, 1L), x2 = grid_x(grid, 2L);
  auto nodes = std::array<C, 5>{x0, x1, x2, x0, x1};

  auto lhs = [&](const C& z) {
    C xz = x_of(z), xm = x_of(C(z / q));
    C s(0);
    for (int j = 0; j < 3; ++j) {
      C num = (xz - nodes[j]) * (xm - nodes[j]) * r.r(j, xz, grid);
      C den = (nodes[j] - nodes[j + 1]) * (nodes[j] - nodes[j + 2]);
      s += num / den;
    }
    return s;
  };
  auto q8val = [&](const C& z) {
    // P2_B1 solved for Q8
    C pref = qpochhammer(q, q, 2) * qpochhammer(C(alpha * alpha * q), q, 3) * z *
             qpochhammer(C(z / (alpha * q)), q, 2) * qpochhammer(C(alpha * z), q, 4);
    return -lhs(z) * pref / (pow_int(q, 4) * alpha * alpha);
  };

  EtaCoeffs<C> out;
  double rot = rng.angle();
  auto coeffs = detail::interpolate_polynomial<C>(q8val, 8, 0.9, rot, ctx);
  for (int j = 0; j <= 8; ++j) out.eta[j] = coeffs[j];

  // A0 template fit on 5 nodes + validation
  auto W = build_from_rspec(r, grid, ctx);
  {
    Matrix<C> M(5, std::vector<C>(5));
    std::vector<C> b(5);
    double rot2 = rng.angle();
    for (int i = 0; i < 5; ++i) {
      double th = rot2 + 2.0 * M_PI * double(i) / 5.0;
      C z = complex_traits<C>::make(0.77 * std::cos(th), 0.77 * std::sin(th));
      C z2 = z * z;
      M[i][0] = C(1);
      M[i][1] = z2 + C(1) / z2;
      M[i][2] = z + C(1) / z;
      M[i][3] = C(1) / (C(1) - q * z2) + q / (z2 - q);
      M[i][4] = z / (C(1) - q * z2) + z / (z2 - q);
      b[i] = W.A0(z);
    }
    auto sol = lu_solve(std::move(M), std::move(b));
    for (int j = 0; j < 5; ++j) out.eta_tilde[j] = sol.x[j];
    double th = rot2 + 0.37;
    C z = complex_traits<C>::make(0.77 * std::cos(th), 0.77 * std::sin(th));
    C z2 = z * z;
    C fh = sol.x[0] + sol.x[1] * (z2 + C(1) / z2) + sol.x[2] * (z + C(1) / z) +
           sol.x[3] * (C(1) / (C(1) - q * z2) + q / (z2 - q)) +
           sol.x[4] * (z / (C(1) - q * z2) + z / (z2 - q));
    if (rel_diff(fh, W.A0(z)) > ctx.equality_tolerance)
      throw singular_system_error("eta_from_rspec: A0 template validation failed");
  }
  out.c = c_from_eta(out.eta, alpha, q);
  return out;
}

/// W = kappa W_0 + tilde-eta_0 I from the epsilon closed forms.
template <class C>
QDiffOperator<C> from_epsilon(const EpsilonParams<C>& eps,
                              const PrecisionContext& ctx) {
  eps.validate(ctx);
  const C p = eps.p, q = eps.q();
  const C pe = eps.eps_product();
  const C kap = kappa_operator(eps.alpha(), q);
  const C eta0 = eps.eta0, etat0 = eps.eta_tilde0;
  const C p1m = eps.prod_one_minus_sq(), p1p = eps.prod_one_plus_sq();
  const C s2 = eps.sum_sq_plus_inv();
  auto e = eps.eps;

  auto a1_at = [p, pe, kap, eta0, e](const C& z) {
    C num = kap * eta0 * p * (p * z - pe);
    for (const C& v : e) num *= (C(1) - v * v * p * z);
    return num /
           (z * z * (C(1) - p * z * pe) * (C(1) - z * z) * (C(1) - p * p * z * z));
  };
  std::function<C(const C&)> A1 = a1_at;
  std::function<C(const C&)> A2 = [a1_at](const C& z) { return a1_at(C(1) / z); };
  std::function<C(const C&)> A0 = [p, pe, kap, eta0, etat0, p1m, p1p, s2](const C& z) {
    C t1 = p1m / (C(2) * (C(1) - z / p) * (C(1) - C(1) / (p * z)));
    C t2 = p1p / (C(2) * (C(1) + z / p) * (C(1) + C(1) / (p * z)));
    C t3 = p * pe *
           (s2 * (z + C(1) / z) - (p + C(1) / p) * (z * z + C(1) / (z * z)));
    return etat0 + kap * eta0 * pow_int(p, 3) * (t1 - t2 - t3);
  };
  return QDiffOperator<C>{A1, A2, A0, q, "epsilon"};
}

/// The four expansion coefficients of W chi_n on chi_0, chi_{n-1}, chi_n,
/// chi_{n+1} (closed forms). Throws when a denominator factor degenerates.
template <class C>
std::array<C, 4> gamma_closed(long n, const EpsilonParams<C>& eps) {
  const C p = eps.p, a = eps.alpha(), eta0 = eps.eta0;
  const C kap = kappa_operator(a, eps.q());
  auto P = [&p](long k) { return pow_int(p, k); };
  const C a2 = a * a;

  auto check = [](const C& f, const char* what) {
    if (abs_d(f) < 1e-8)
      throw degenerate_parameter_error(std::string("gamma_closed: vanishing factor ") + what);
    return f;
  };

  C g0num = kap * P(2 * n) * eta0;
  for (const C& v : eps.eps) g0num *= (a - p * v * v);
  C g0 = g0num / (pow_int(a, 3) * check(C(C(1) - a2 * P(2 * n - 2)), "1-a^2 p^{2n-2}") *
                  check(C(C(1) - P(2 * n + 2)), "1-p^{2n+2}"));

  C g1num = -kap * (C(1) - P(2 * n)) * eta0;
  for (const C& v : eps.eps) g1num *= (C(1) - a * P(2 * n - 1) * v * v);
  C g1 = g1num / (a * P(4 * n - 6) * (C(1) - a2 * P(2 * n - 2)) *
                  check(C(C(1) - a2 * P(4 * n - 2)), "1-a^2 p^{4n-2}") *
                  check(C(C(1) - a2 * P(4 * n)), "1-a^2 p^{4n}"));

  C p1m = eps.prod_one_minus_sq(), p1p = eps.prod_one_plus_sq();
  C g2 = eps.eta_tilde0 +
         kap * a * pow_int(p, 3) *
             ((a2 * P(4 * n) + C(1) / (a2 * P(4 * n))) * (p + C(1) / p) -
              (a * P(2 * n) + C(1) / (a * P(2 * n))) * eps.sum_sq_plus_inv() -
              C(0.5) * P(2 * n + 1) *
                  (p1m / (check(C(C(1) - a * P(2 * n - 1)), "1-a p^{2n-1}") *
                          check(C(C(1) - a * P(2 * n + 1)), "1-a p^{2n+1}")) +
                   p1p / (check(C(C(1) + a * P(2 * n - 1)), "1+a p^{2n-1}") *
                          check(C(C(1) + a * P(2 * n + 1)), "1+a p^{2n+1}")))) *
             eta0;

  C g3num = -kap * (C(1) - a2 * P(2 * n)) * eta0;
  for (const C& v : eps.eps) g3num *= (a * P(2 * n + 1) - v * v);
  C g3 = g3num / (pow_int(a, 3) * P(4 * n - 2) * (C(1) - P(2 * n + 2)) *
                  (C(1) - a2 * P(4 * n)) *
                  check(C(C(1) - a2 * P(4 * n + 2)), "1-a^2 p^{4n+2}"));

  return {g0, g1, g2, g3};
}

/// Takemura's A^(1): tilde-U(z) T+ + tilde-U(1/z) T- + tilde-V(z) I.
template <class C>
QDiffOperator<C> a1_takemura(const EpsilonParams<C>& eps) {
  const C p = eps.p;
  const C pe = eps.eps_product();
  const C p1m = eps.prod_one_minus_sq(), p1p = eps.prod_one_plus_sq();
  const C s2 = eps.sum_sq_plus_inv();
  auto e = eps.eps;

  auto ut = [p, e](const C& z) {
    C num(1);
    for (const C& v : e) num *= (C(1) - v * v * p * z);
    return num / ((C(1) - z * z) * (C(1) - p * p * z * z));
  };
  std::function<C(const C&)> A1 = ut;
  std::function<C(const C&)> A2 = [ut](const C& z) { return ut(C(1) / z); };
  std::function<C(const C&)> A0 = [p, pe, p1m, p1p, s2](const C& z) {
    C t1 = p1m / (C(2) * (C(1) - z / p) * (C(1) - C(1) / (p * z)));
    C t2 = p1p / (C(2) * (C(1) + z / p) * (C(1) + C(1) / (p * z)));
    C t3 = p * pe *
           (s2 * (z + C(1) / z) - (p + C(1) / p) * (z * z + C(1) / (z * z)));
    return t1 + t2 + t3;
  };
  return QDiffOperator<C>{A1, A2, A0, eps.q(), "takemura-A1"};
}

/// The modified operator W-hat = W_0 - diagonal, whose action exhibits the
/// two-series (x_n and y_n) raising patterns. Its diagonal equals
/// -eta_0 p^3 tilde-V(z).
template <class C>
QDiffOperator<C> w_hat_modified(const EpsilonParams<C>& eps) {
  const C p = eps.p, q = eps.q(), a = eps.alpha(), eta0 = eps.eta0;
  auto e = eps.eps;
  auto u = [p, q, a, eta0, e](const C& z) {
    C num = eta0 * (q * z - a);
    for (const C& v : e) num *= (C(1) - v * v * p * z);
    return num / (z * z * (C(1) - a * z) * (C(1) - z * z) * (C(1) - q * z * z));
  };
  auto takemura = a1_takemura(eps);
  std::function<C(const C&)> A1 = u;
  std::function<C(const C&)> A2 = [u](const C& z) { return u(C(1) / z); };
  std::function<C(const C&)> A0 = [eta0, p, vt = takemura.A0](const C& z) {
    return -eta0 * pow_int(p, 3) * vt(z);
  };
  return QDiffOperator<C>{A1, A2, A0, q, "w-hat"};
}

/// Gauge function Psi with Psi(p^2 z) = -(1 - alpha z^{-1} p^{-2}) / (p z (1 - alpha z)) Psi(z).
/// Product form (alpha z; p^2)inf (alpha/z; p^2)inf (p z; p^2)inf (p/z; p^2)inf;
/// truncation per qpochhammer_inf with the given tail target.
template <class C>
C psi_gauge(const C& z, const C& alpha, const C& p, double tail = 1e-20,
            int* factors_used = nullptr) {
  C q2 = p * p;
  int k1 = 0, k2 = 0, k3 = 0, k4 = 0;
  C v = qpochhammer_inf(C(alpha * z), q2, tail, &k1) *
        qpochhammer_inf(C(alpha / z), q2, tail, &k2) *
        qpochhammer_inf(C(p * z), q2, tail, &k3) *
        qpochhammer_inf(C(p / z), q2, tail, &k4);
  if (factors_used) *factors_used = std::max({k1, k2, k3, k4});
  return v;
}

template <class C>
struct GaugeReport {
  double functional_eq_err = 0.0;   // Psi recurrence vs direct products
  double coeff_identity_err = 0.0;  // tilde-U vs -Psi U / (Psi(p^2 z) eta0 p^3)
  double action_err = 0.0;          // full conjugation on a smooth test g
  double scaling_invariance_err = 0.0;  // Psi -> c Psi leaves the identity alone
  int factors_used = 0;
  bool pass(const PrecisionContext& ctx) const {
    double t = ctx.equality_tolerance;
    return functional_eq_err <= t && coeff_identity_err <= t && action_err <= t &&
           scaling_invariance_err <= t;
  }
};

/// Numerical verification of the A^(1) correspondence at random z on |z|=0.9.
template <class C>
GaugeReport<C> gauge_consistency_check(const EpsilonParams<C>& eps,
                                       const PrecisionContext& ctx, Rng& rng) {
  const C p = eps.p, q = eps.q(), a = eps.alpha(), eta0 = eps.eta0;
  auto what = w_hat_modified(eps);
  auto a1 = a1_takemura(eps);
  GaugeReport<C> rep;

  const double tail = ctx.product_tail();
  auto psi = [&](const C& z) { return psi_gauge(z, a, p, tail, &rep.factors_used); };
  auto g_test = [](const C& z) {
    return C(1) + C(0.3) * z + C(0.07) * z * z + C(0.11) / z;
  };

  for (int i = 0; i < 8; ++i) {
    double th = rng.angle();
    C z = complex_traits<C>::make(0.9 * std::cos(th), 0.9 * std::sin(th));

    C lhs_f = psi(C(q * z));
    C rhs_f = -(C(1) - a / (z * q)) / (p * z * (C(1) - a * z)) * psi(z);
    rep.functional_eq_err = std::max(rep.functional_eq_err, rel_diff(lhs_f, rhs_f));

    C lhs_c = a1.A1(z);
    C rhs_c = -psi(z) * what.A1(z) / (psi(C(q * z)) * eta0 * pow_int(p, 3));
    rep.coeff_identity_err = std::max(rep.coeff_identity_err, rel_diff(lhs_c, rhs_c));

    auto psiinv_g = [&](const C& w) { return g_test(w) / psi(w); };
    C lhs_a = a1.apply(g_test, z);
    C rhs_a = -psi(z) * what.apply(psiinv_g, z) / (eta0 * pow_int(p, 3));
    rep.action_err = std::max(rep.action_err, rel_diff(lhs_a, rhs_a));

    C scale = complex_traits<C>::make(2.7, -0.4);
    auto psi_s = [&](const C& w) { return scale * psi(w); };
    auto psiinv_g_s = [&](const C& w) { return g_test(w) / psi_s(w); };
    C rhs_s = -psi_s(z) * what.apply(psiinv_g_s, z) / (eta0 * pow_int(p, 3));
    rep.scaling_invariance_err = std::max(rep.scaling_invariance_err, rel_diff(rhs_a, rhs_s));
  }
  return rep;
}

/// Finite-t scaled operator of the Askey-Wilson degeneration and the limiting
/// template (U-hat and the printed V-hat linear coefficient; the additive
/// constant of V-hat is left at zero — it is not pinned by the limit check).
template <class C>
struct AwLimitPair {
  QDiffOperator<C> scaled;
  std::function<C(const C&)> u_hat;
  std::function<C(const C&)> v_hat;
  C v_hat_linear;
  double t;
};

template <class C>
AwLimitPair<C> aw_limit(const std::array<C, 6>& eps6, const C& p, const C& delta7,
                        const C& delta8, double t, const PrecisionContext& ctx) {
  if (t < 10.0) throw invariant_error("aw_limit: t must be >= 10");
  EpsilonParams<C> eps;
  eps.p = p;
  for (int j = 0; j < 6; ++j) eps.eps[j] = eps6[j];
  eps.eps[6] = delta7 * complex_traits<C>::make(t);
  eps.eps[7] = delta8 / complex_traits<C>::make(t);
  eps.eta0 = C(1);
  eps.eta_tilde0 = C(0);
  eps.validate(ctx);

  auto a1op = a1_takemura(eps);
  C pref = -C(1) / (delta7 * delta7 * complex_traits<C>::make(t * t));
  std::function<C(const C&)> A1 = [pref, p, u = a1op.A1](const C& z) {
    return pref * u(z) / (p * p * z * z);
  };
  std::function<C(const C&)> A2 = [pref, p, u = a1op.A2](const C& z) {
    return pref * u(z) * z * z / (p * p);
  };
  std::function<C(const C&)> A0 = [pref, v = a1op.A0](const C& z) {
    return pref * v(z);
  };

  auto e = eps6;
  std::function<C(const C&)> u_hat = [e, p](const C& z) {
    C num(1);
    for (const C& v : e) num *= (C(1) - v * v * p * z);
    return num / (p * z * (C(1) - z * z) * (C(1) - p * p * z * z));
  };
  C e16(1);
  for (const C& v : eps6) e16 *= v;
  C d78 = delta7 * delta8;
  C lin = (p * p * e16 * d78 - C(1)) * (p * p * e16 - d78) / (p * d78);
  std::function<C(const C&)> v_hat = [lin](const C& z) { return lin * (z + C(1) / z); };

  return AwLimitPair<C>{QDiffOperator<C>{A1, A2, A0, p * p, "aw-limit-scaled"},
                        u_hat, v_hat, lin, t};
}

}  // namespace ratheun
