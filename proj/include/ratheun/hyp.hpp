#pragma once

#include "ratheun/gevp.hpp"

namespace ratheun {

/// Parameter tuple of a terminating very-well-poised 10-Phi-9 in the 10W9
/// layout: upper row a^2, qa, -qa, b..h; lower row a, -a, a^2 q / (b..h);
/// argument q. Truncation g = q^{-n}; balancing h = mu q^n with
/// mu b c d e f = a^6 q^2.
template <class C>
struct HypSeriesSpec {
  C a, b, c, d, e, f, g, h;
  C q;
  int n = 0;
  C mu;

  static HypSeriesSpec make(const C& a, const C& b, const C& c, const C& d,
                            const C& e, const C& f, const C& g, const C& h,
                            const C& q, const PrecisionContext& ctx) {
    HypSeriesSpec s{a, b, c, d, e, f, g, h, q, 0, C(0)};
    // locate the truncation order from g = q^{-n}
    C gq(g);
    int n = -1;
    for (int k = 0; k <= 256; ++k) {
      if (rel_diff(gq, C(1)) <= 1e-8) { n = k; break; }
      gq *= q;
    }
    if (n < 0)
      throw invariant_error("HypSeriesSpec: g is not q^{-n} (series not terminating)");
    s.n = n;
    s.mu = h / pow_int(q, long(n));
    s.validate(ctx);
    return s;
  }

  void validate(const PrecisionContext& ctx) const {
    C a6q2 = pow_int(a, 6) * q * q;
    if (rel_diff(C(b * c * d * e * f * g * h), a6q2) > ctx.equality_tolerance)
      throw invariant_error("HypSeriesSpec: not very-well-poised (bcdefgh != a^6 q^2)");
    if (rel_diff(C(mu * b * c * d * e * f), a6q2) > ctx.equality_tolerance)
      throw invariant_error("HypSeriesSpec: mu b c d e f != a^6 q^2");
  }

  std::array<C, 10> upper() const {
    return {a * a, q * a, -q * a, b, c, d, e, f, g, h};
  }
  std::array<C, 9> lower() const {
    C a2q = a * a * q;
    return {a, -a, a2q / b, a2q / c, a2q / d, a2q / e, a2q / f, a2q / g, a2q / h};
  }
};

/// Terminating sum with incremental term ratios: each term comes from the
/// previous one through the linear factors (1 - u q^k) / ((1 - q^{k+1})(1 - l q^k)) q.
template <class C>
C eval_10phi9(const HypSeriesSpec<C>& spec) {
  auto up = spec.upper();
  auto lo = spec.lower();
  const C q = spec.q;
  C sum(1), term(1), qk(1);
  for (int k = 0; k < spec.n; ++k) {
    C num(1), den(C(1) - qk * q);
    for (const C& u : up) num *= (C(1) - u * qk);
    for (const C& l : lo) den *= (C(1) - l * qk);
    if (abs_d(den) < 1e-250)
      throw degenerate_parameter_error("eval_10phi9: vanishing denominator Pochhammer");
    term *= num / den * q;
    sum += term;
    qk *= q;
  }
  return sum;
}

/// Direct summation (each term as a full Pochhammer quotient); the slow route
/// used to cross-check the incremental one.
template <class C>
C eval_10phi9_direct(const HypSeriesSpec<C>& spec) {
  auto up = spec.upper();
  auto lo = spec.lower();
  const C q = spec.q;
  C sum(0);
  for (int k = 0; k <= spec.n; ++k) {
    C t = pow_int(q, k);
    for (const C& u : up) t *= qpochhammer(u, q, k);
    C den = qpochhammer(q, q, k);
    for (const C& l : lo) den *= qpochhammer(l, q, k);
    if (abs_d(den) < 1e-250)
      throw degenerate_parameter_error("eval_10phi9_direct: vanishing denominator");
    sum += t / den;
  }
  return sum;
}

/// 10B9(a; b,c,d,e,f,g; q) = 10W9(a; b,...,g, a^6 q^2/(bcdefg); q).
template <class C>
C eval_10B9(const C& a, const C& b, const C& c, const C& d, const C& e,
            const C& f, const C& g, const C& q, const PrecisionContext& ctx) {
  C h = pow_int(a, 6) * q * q / (b * c * d * e * f * g);
  return eval_10phi9(HypSeriesSpec<C>::make(a, b, c, d, e, f, g, h, q, ctx));
}

/// A Wilson biorthogonal rational function: the 10B9 with b = kappa z,
/// c = kappa / z, rational of type [n/n] in x = z + 1/z with poles at
/// x_s = a^2 q^s / kappa + kappa / (a^2 q^s), s = 1..n.
template <class C>
struct WilsonRnSpec {
  C a;
  C kappa;  // the series argument kappa of b = kappa z (distinct from kappa_operator)
  C d, e, f;
  int n = 0;
  C q;

  C pole_x(int s) const {
    C w = a * a * pow_int(q, s) / kappa;
    return w + C(1) / w;
  }

  /// The printed parameter assignment for the GEVP solutions of the classical
  /// family: a = eps_1 sqrt(eps123456 p), kappa = eps_1^2 p,
  /// d,e,f = eps123456 p / eps_{2,3,4}^2, base p^2.
  static WilsonRnSpec from_eps6(const std::array<C, 6>& eps6, const C& p, int n) {
    using std::sqrt;
    C a6(1);
    for (const C& v : eps6) a6 *= v;
    WilsonRnSpec s;
    s.a = eps6[0] * sqrt(a6 * p);
    s.kappa = eps6[0] * eps6[0] * p;
    s.d = a6 * p / (eps6[1] * eps6[1]);
    s.e = a6 * p / (eps6[2] * eps6[2]);
    s.f = a6 * p / (eps6[3] * eps6[3]);
    s.n = n;
    s.q = p * p;
    return s;
  }
};

template <class C>
C wilson_rn(const WilsonRnSpec<C>& spec, const C& z,
            const PrecisionContext& ctx) {
  return eval_10B9(spec.a, C(spec.kappa * z), C(spec.kappa / z), spec.d, spec.e,
                   spec.f, pow_int(spec.q, -long(spec.n)), spec.q, ctx);
}

/// Kernel condition and shifted-parameter action of the split operator pair.
template <class C>
struct KernelShiftReport {
  double kernel_branch1 = 0.0;  // |W-hat R_n| / scale at eps5/eps6 = eps1234 p^{2n+1}
  double kernel_branch2 = 0.0;  // same at the reciprocal branch
  double shift_ratio_spread = 0.0;  // constancy of (W1 R_n) / R_n^+
  C shift_constant;
  bool pass(const PrecisionContext& ctx) const {
    double t = ctx.equality_tolerance;
    return kernel_branch1 <= t && kernel_branch2 <= t && shift_ratio_spread <= t;
  }
};

template <class C>
KernelShiftReport<C> check_kernel_and_shift(const std::array<C, 6>& eps6,
                                            const C& p, int n,
                                            const PrecisionContext& ctx, Rng& rng) {
  using std::sqrt;
  KernelShiftReport<C> rep;
  auto split = split_operators(eps6, p, ctx);
  auto Rn = solve_recurrence(n, eps6, p, ctx);
  const C e1234 = eps6[0] * eps6[1] * eps6[2] * eps6[3];
  const C s56 = eps6[4] * eps6[5];

  auto kernel_branch = [&](const C& ratio) {
    std::array<C, 6> ek = eps6;
    ek[4] = sqrt(s56 * ratio);
    ek[5] = sqrt(s56 / ratio);
    // keep the product eps_5 eps_6 exactly s56 (branch signs can split it)
    if (rel_diff(C(ek[4] * ek[5]), s56) > 1e-12) ek[5] = -ek[5];
    auto cls = make_classical(ek, p, C(1), ctx);
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
      double th = rng.angle();
      C z = complex_traits<C>::make(0.79 * std::cos(th), 0.79 * std::sin(th));
      C lv = cls.hatted.apply(Rn, z);
      double scale = abs_d(split.w1.apply(Rn, z)) +
                     abs_d(C(split.lambda * split.w2.apply(Rn, z))) + 1e-300;
      worst = std::max(worst, abs_d(lv) / scale);
    }
    return worst;
  };
  rep.kernel_branch1 = kernel_branch(C(e1234 * pow_int(p, 2 * n + 1)));
  rep.kernel_branch2 = kernel_branch(C(C(1) / (e1234 * pow_int(p, 2 * n + 1))));

  // W1 R_n = const R_n^+ with eps123456 -> eps123456 p^2 via (eps5, eps6) -> (eps5 p, eps6 p)
  std::array<C, 6> shifted = eps6;
  shifted[4] = eps6[4] * p;
  shifted[5] = eps6[5] * p;
  auto Rnp = solve_recurrence(n, shifted, p, ctx);
  C ratio0(0);
  for (int i = 0; i < 8; ++i) {
    double th = rng.angle();
    C z = complex_traits<C>::make(0.79 * std::cos(th), 0.79 * std::sin(th));
    C ratio = split.w1.apply(Rn, z) / Rnp(z);
    if (i == 0) {
      ratio0 = ratio;
      rep.shift_constant = ratio;
    } else {
      rep.shift_ratio_spread = std::max(rep.shift_ratio_spread, rel_diff(ratio, ratio0));
    }
  }
  return rep;
}

}  // namespace ratheun
