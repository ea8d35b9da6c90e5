#pragma once

#include <array>
#include <span>
#include <vector>

#include "ratheun/types.hpp"

namespace ratheun {

/// (a;q)_n = (1-a)(1-aq)...(1-a q^{n-1}); empty product for n = 0.
template <class C>
C qpochhammer(const C& a, const C& q, long n) {
  C r(1);
  C f = a;
  for (long k = 0; k < n; ++k) {
    r *= (C(1) - f);
    f *= q;
  }
  return r;
}

/// (a;q)_inf truncated so the dropped tail is below tail_target (needs |q| < 1).
/// The factor count starts at ceil(log tail / log |q|) and grows if the bound
/// |a q^K|/(1-|q|) is still above target.
template <class C>
C qpochhammer_inf(const C& a, const C& q, double tail_target = 1e-20,
                  int* factors_used = nullptr) {
  double qm = abs_d(q);
  if (qm >= 1.0) throw invariant_error("qpochhammer_inf: |q| must be < 1");
  int K = static_cast<int>(std::ceil(std::log(tail_target) / std::log(qm)));
  if (K < 8) K = 8;
  const int K_cap = 1 << 16;
  double am = std::max(abs_d(a), 1.0);
  while (am * std::pow(qm, K) / (1.0 - qm) > tail_target) {
    K *= 2;
    if (K > K_cap)
      throw truncation_error("qpochhammer_inf: tail does not reach target");
  }
  C r(1);
  C f = a;
  for (int k = 0; k < K; ++k) {
    r *= (C(1) - f);
    f *= q;
  }
  if (factors_used) *factors_used = K;
  return r;
}

/// Elementary symmetric polynomial sigma_k of the given values, via the
/// Newton-triangle update; sigma_0 = 1.
template <class C>
C elementary_symmetric(std::span<const C> values, std::size_t k) {
  if (k > values.size())
    throw invariant_error("elementary_symmetric: k exceeds value count");
  std::vector<C> e(k + 1, C(0));
  e[0] = C(1);
  for (const C& v : values) {
    std::size_t top = k < e.size() ? k : e.size() - 1;
    for (std::size_t j = top; j >= 1; --j) e[j] += v * e[j - 1];
  }
  return e[k];
}

template <class C>
C elementary_symmetric(const std::vector<C>& values, std::size_t k) {
  return elementary_symmetric(std::span<const C>(values.data(), values.size()), k);
}

/// The Askey-Wilson grid data: x_n = alpha q^n + (alpha q^n)^{-1}, with p a
/// fixed square root of q.
template <class C>
struct GridParams {
  C alpha;
  C q;
  C p;

  static GridParams from_alpha_q(const C& alpha, const C& q) {
    using std::sqrt;
    return validated(GridParams{alpha, q, sqrt(q)});
  }
  static GridParams from_alpha_p(const C& alpha, const C& p) {
    return validated(GridParams{alpha, p * p, p});
  }

  C z_at(long n) const { return alpha * pow_int(q, n); }

  static GridParams validated(GridParams g) {
    if (abs_d(g.alpha) == 0.0) throw invariant_error("GridParams: alpha = 0");
    if (abs_d(g.q) >= 1.0 || abs_d(g.q) == 0.0)
      throw invariant_error("GridParams: need 0 < |q| < 1");
    if (rel_diff(g.p * g.p, g.q) > 1e-14)
      throw invariant_error("GridParams: p^2 != q");
    return g;
  }
};

/// x_n = alpha q^n + (alpha q^n)^{-1}. With require_distinct the point is
/// rejected when |alpha q^n| = 1 within 1e-8 (x would sit at the symmetry
/// point +-2 where z and 1/z collide).
template <class C>
C grid_x(const GridParams<C>& grid, long n, bool require_distinct = false) {
  C zn = grid.z_at(n);
  if (require_distinct && std::abs(abs_d(zn) - 1.0) < 1e-8)
    throw degenerate_grid_error("grid_x: |alpha q^n| = 1, degenerate pole");
  return zn + C(1) / zn;
}

/// y_n = p^{2n+1} + p^{-2n-1} (the second pole series of the modified operator).
template <class C>
C grid_y(const C& p, long n) {
  C w = pow_int(p, 2 * n + 1);
  return w + C(1) / w;
}

/// The epsilon_1..epsilon_8 parameterization: eta_k = (-p)^k sigma_k eta_0
/// with sigma_k elementary symmetric in epsilon_j^2, alpha = p epsilon_1...epsilon_8.
template <class C>
struct EpsilonParams {
  std::array<C, 8> eps{};
  C p;
  C eta0 = C(1);
  C eta_tilde0 = C(0);

  C q() const { return p * p; }

  C eps_product() const {
    C r(1);
    for (const C& e : eps) r *= e;
    return r;
  }

  C alpha() const { return p * eps_product(); }

  GridParams<C> grid() const { return GridParams<C>::from_alpha_p(alpha(), p); }

  C sigma(std::size_t k) const {
    std::array<C, 8> sq;
    for (std::size_t j = 0; j < 8; ++j) sq[j] = eps[j] * eps[j];
    return elementary_symmetric(std::span<const C>(sq.data(), 8), k);
  }

  C eta(std::size_t k) const { return pow_int(C(-p), long(k)) * sigma(k) * eta0; }

  C prod_one_minus_sq() const {
    C r(1);
    for (const C& e : eps) r *= (C(1) - e * e);
    return r;
  }
  C prod_one_plus_sq() const {
    C r(1);
    for (const C& e : eps) r *= (C(1) + e * e);
    return r;
  }
  C sum_sq_plus_inv() const {
    C r(0);
    for (const C& e : eps) r += e * e + C(1) / (e * e);
    return r;
  }

  void validate(const PrecisionContext& ctx) const {
    for (const C& e : eps)
      if (abs_d(e) == 0.0) throw invariant_error("EpsilonParams: epsilon_j = 0");
    C a = alpha();
    C lhs = eta(8);
    C rhs = a * a * pow_int(q(), 3) * eta0;
    if (rel_diff(lhs, rhs) > ctx.equality_tolerance)
      throw invariant_error("EpsilonParams: eta_8 != alpha^2 q^3 eta_0");
  }
};

}  // namespace ratheun
