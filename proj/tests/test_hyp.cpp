#include <catch2/catch_amalgamated.hpp>

#include <boost/multiprecision/cpp_complex.hpp>
#include <complex>

#include "ratheun/hyp.hpp"

using namespace ratheun;
using cd = std::complex<double>;
using c50 = boost::multiprecision::cpp_complex_50;

namespace {

PrecisionContext ctx;

HypSeriesSpec<cd> random_spec(Rng& rng, int n) {
  // build a very-well-poised terminating spec: draw a,b,c,d,e,f; g = q^{-n};
  // h resolves the balance
  cd q = rng.complex_in_annulus<cd>(0.3, 0.7);
  cd a = rng.complex_in_annulus<cd>(0.6, 1.3);
  cd b = rng.complex_in_annulus<cd>(0.6, 1.3);
  cd c = rng.complex_in_annulus<cd>(0.6, 1.3);
  cd d = rng.complex_in_annulus<cd>(0.6, 1.3);
  cd e = rng.complex_in_annulus<cd>(0.6, 1.3);
  cd f = rng.complex_in_annulus<cd>(0.6, 1.3);
  cd g = pow_int(q, -long(n));
  cd h = pow_int(a, 6) * q * q / (b * c * d * e * f * g);
  return HypSeriesSpec<cd>::make(a, b, c, d, e, f, g, h, q, ctx);
}

std::pair<std::array<cd, 6>, cd> random_family(Rng& rng) {
  cd p = std::sqrt(rng.complex_in_annulus<cd>(0.35, 0.7));
  return {draw_eps6(rng, p), p};
}

}  // namespace

TEST_CASE("10phi9 termination and small orders") {
  Rng rng(61);
  auto s0 = random_spec(rng, 0);
  CHECK(eval_10phi9(s0) == cd(1.0));

  // n=1: one explicit term ratio
  auto s1 = random_spec(rng, 1);
  cd want(1.0);
  {
    cd num(1.0), den(cd(1.0) - s1.q);
    for (auto& u : s1.upper()) num *= (cd(1.0) - u);
    for (auto& l : s1.lower()) den *= (cd(1.0) - l);
    want += num / den * s1.q;
  }
  CHECK(rel_diff(eval_10phi9(s1), want) < 1e-13);

  // cross-check the one-term ratio against doubled precision
  {
    c50 num(1.0), den(c50(1.0) - c50(s1.q.real(), s1.q.imag()));
    auto lift = [](cd z) { return c50(z.real(), z.imag()); };
    for (auto& u : s1.upper()) num *= (c50(1.0) - lift(u));
    for (auto& l : s1.lower()) den *= (c50(1.0) - lift(l));
    c50 w50 = c50(1.0) + num / den * lift(s1.q);
    cd w(static_cast<double>(w50.real()), static_cast<double>(w50.imag()));
    CHECK(rel_diff(eval_10phi9(s1), w) < 1e-14);
  }
}

TEST_CASE("incremental and direct summation agree") {
  Rng rng(62);
  PrecisionContext ctx50 = PrecisionContext::with_digits(50);
  for (int n = 2; n <= 10; n += 2) {
    auto s = random_spec(rng, n);
    // direct summation, also lifted to doubled precision as the oracle
    // (h re-resolved there so the balance holds to 50 digits)
    auto lift = [](cd z) { return c50(z.real(), z.imag()); };
    c50 g50 = pow_int(lift(s.q), -long(n));
    c50 h50 = pow_int(lift(s.a), 6) * lift(s.q) * lift(s.q) /
              (lift(s.b) * lift(s.c) * lift(s.d) * lift(s.e) * lift(s.f) * g50);
    auto s50 = HypSeriesSpec<c50>::make(lift(s.a), lift(s.b), lift(s.c), lift(s.d),
                                        lift(s.e), lift(s.f), g50, h50,
                                        lift(s.q), ctx50);
    c50 hi = eval_10phi9_direct(s50);
    cd oracle(static_cast<double>(hi.real()), static_cast<double>(hi.imag()));
    CHECK(rel_diff(eval_10phi9(s), oracle) < 1e-12);
    CHECK(rel_diff(eval_10phi9_direct(s), oracle) < 5e-12);
  }
}

TEST_CASE("spec invariants") {
  Rng rng(63);
  auto s = random_spec(rng, 3);
  CHECK(s.n == 3);
  // vwp: bcdefgh = a^6 q^2
  cd prod = s.b * s.c * s.d * s.e * s.f * s.g * s.h;
  CHECK(rel_diff(prod, cd(pow_int(s.a, 6) * s.q * s.q)) < 1e-12);
  // mu b c d e f = a^6 q^2
  CHECK(rel_diff(cd(s.mu * s.b * s.c * s.d * s.e * s.f),
                 cd(pow_int(s.a, 6) * s.q * s.q)) < 1e-12);

  // non-terminating g rejected
  CHECK_THROWS_AS(HypSeriesSpec<cd>::make(s.a, s.b, s.c, s.d, s.e, s.f,
                                          cd(0.37, 0.2), s.h, s.q, ctx),
                  invariant_error);
}

TEST_CASE("10B9 basics") {
  Rng rng(64);
  cd q = rng.complex_in_annulus<cd>(0.3, 0.7);
  cd a = rng.complex_in_annulus<cd>(0.6, 1.3);
  // g = 1 means n = 0
  CHECK(eval_10B9(a, cd(0.9, 0.1), cd(1.1, -0.2), cd(0.8, 0.0), cd(1.2, 0.1),
                  cd(0.7, -0.1), cd(1.0, 0.0), q, ctx) == cd(1.0));
}

TEST_CASE("wilson_rn: poles and symmetry") {
  Rng rng(65);
  auto [e6, p] = random_family(rng);
  int n = 3;
  auto spec = WilsonRnSpec<cd>::from_eps6(e6, p, n);

  // z <-> 1/z symmetry
  for (int i = 0; i < 8; ++i) {
    cd z = rng.complex_in_annulus<cd>(0.6, 0.9);
    CHECK(rel_diff(wilson_rn(spec, z, ctx), wilson_rn(spec, cd(1.0) / z, ctx)) < 1e-11);
  }

  // n=0 is the constant 1
  auto spec0 = WilsonRnSpec<cd>::from_eps6(e6, p, 0);
  CHECK(wilson_rn(spec0, cd(0.71, 0.3), ctx) == cd(1.0));

  // type [n/n] with poles exactly x_s, s=1..n (three decoys stay empty);
  // the poles land on the eps123456-grid
  cd a6 = detail::eps_product(e6);
  auto grid = GridParams<cd>::from_alpha_p(a6, p);
  for (int s = 1; s <= n; ++s)
    CHECK(rel_diff(spec.pole_x(s), grid_x(grid, s)) < 1e-12);
  auto g = [&](const cd& z) { return wilson_rn(spec, z, ctx); };
  PoleSet<cd> cand = PoleSet<cd>::from_indices(grid, 1, n + 3);
  auto rep = fit_partial_fractions(g, cand, true, ctx, rng);
  REQUIRE(rep.residual <= ctx.fit_tolerance);
  double scale = std::max(rep.max_coeff(), abs_d(rep.fit.constant));
  for (int s = n + 1; s <= n + 3; ++s)
    CHECK(abs_d(rep.coeff_at_index(s)) <= ctx.fit_tolerance * scale);
  CHECK(abs_d(rep.fit.constant) > 1e-8 * scale);  // xi_{n0} != 0 generically
}

TEST_CASE("series equals the recurrence solution") {
  Rng rng(66);
  for (int draw = 0; draw < 4; ++draw) {
    auto [e6, p] = random_family(rng);
    for (int n = 0; n <= 6; n += 2) {
      auto rn = solve_recurrence(n, e6, p, ctx);
      auto spec = WilsonRnSpec<cd>::from_eps6(e6, p, n);
      cd ratio0(0.0);
      double spread = 0.0;
      for (int i = 0; i < 8; ++i) {
        cd z = rng.complex_in_annulus<cd>(0.7, 0.9);
        cd ratio = wilson_rn(spec, z, ctx) / rn(z);
        if (i == 0) ratio0 = ratio;
        else spread = std::max(spread, rel_diff(ratio, ratio0));
      }
      CHECK(spread <= 1e-8);
      // with A_{n0} = 1 the normalizations coincide exactly
      CHECK(rel_diff(ratio0, cd(1.0)) < 1e-9);
    }
  }
}

TEST_CASE("sqrt branch of the 10B9 first argument is immaterial") {
  Rng rng(67);
  auto [e6, p] = random_family(rng);
  int n = 4;
  auto spec = WilsonRnSpec<cd>::from_eps6(e6, p, n);
  auto flipped = spec;
  flipped.a = -spec.a;
  for (int i = 0; i < 4; ++i) {
    cd z = rng.complex_in_annulus<cd>(0.6, 0.9);
    CHECK(rel_diff(wilson_rn(spec, z, ctx), wilson_rn(flipped, z, ctx)) < 1e-11);
  }
}

TEST_CASE("kernel condition and shifted action") {
  Rng rng(68);
  auto [e6, p] = random_family(rng);
  for (int n = 1; n <= 4; ++n) {
    auto rep = check_kernel_and_shift(e6, p, n, ctx, rng);
    CHECK(rep.kernel_branch1 <= ctx.equality_tolerance);
    CHECK(rep.kernel_branch2 <= ctx.equality_tolerance);
    CHECK(rep.shift_ratio_spread <= ctx.equality_tolerance);
    CHECK(rep.pass(ctx));
  }

  // n=0: R_0 = 1 and the kernel condition kills hat-gamma_00 itself
  cd e1234 = e6[0] * e6[1] * e6[2] * e6[3];
  cd s56 = e6[4] * e6[5];
  cd ratio = e1234 * p;
  auto ek = e6;
  ek[4] = std::sqrt(s56 * ratio);
  ek[5] = std::sqrt(s56 / ratio);
  if (rel_diff(cd(ek[4] * ek[5]), s56) > 1e-12) ek[5] = -ek[5];
  auto cls = make_classical(ek, p, cd(1.0), ctx);
  CHECK(abs_d(cls.gamma00_hat) < 1e-12);
}

TEST_CASE("shifted action composes to the p^4 family") {
  Rng rng(69);
  auto [e6, p] = random_family(rng);
  int n = 3;
  auto spl = split_operators(e6, p, ctx);
  auto rn = solve_recurrence(n, e6, p, ctx);

  std::array<cd, 6> once = e6;
  once[4] *= p;
  once[5] *= p;
  auto spl_once = split_operators(once, p, ctx);
  auto rn_once = solve_recurrence(n, once, p, ctx);

  std::array<cd, 6> twice = once;
  twice[4] *= p;
  twice[5] *= p;
  auto rn_twice = solve_recurrence(n, twice, p, ctx);

  // W1(shifted params) W1 R_n is proportional to the doubly-shifted series
  auto w1w1 = [&](const cd& z) {
    auto inner = [&](const cd& w) { return spl.w1.apply(rn, w); };
    return spl_once.w1.apply(inner, z);
  };
  cd ratio0(0.0);
  double spread = 0.0;
  for (int i = 0; i < 8; ++i) {
    cd z = rng.complex_in_annulus<cd>(0.7, 0.9);
    cd ratio = w1w1(z) / rn_twice(z);
    if (i == 0) ratio0 = ratio;
    else spread = std::max(spread, rel_diff(ratio, ratio0));
  }
  CHECK(spread <= ctx.equality_tolerance);
  (void)rn_once;
}
