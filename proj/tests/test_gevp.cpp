#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "ratheun/gevp.hpp"

using namespace ratheun;
using cd = std::complex<double>;

namespace {

PrecisionContext ctx;

std::pair<std::array<cd, 6>, cd> random_family(Rng& rng) {
  cd p = std::sqrt(rng.complex_in_annulus<cd>(0.35, 0.7));
  return {draw_eps6(rng, p), p};
}

}  // namespace

TEST_CASE("omega basics") {
  Rng rng(51);
  auto [e6, p] = random_family(rng);
  cd a6 = detail::eps_product(e6);
  OmegaBasisSpec<cd> spec{e6[0] * e6[0] * p, a6 * p * p, p};

  cd z = rng.complex_in_annulus<cd>(0.5, 0.9);
  CHECK(omega(0, z, spec) == cd(1.0));
  CHECK(rel_diff(omega(4, z, spec), omega(4, cd(1.0) / z, spec)) < 1e-12);

  // type [n/n] with poles at the x-images of the b-grid: x_1..x_n on the
  // alpha = eps123456 grid, confirmed by fit with a decoy
  int n = 3;
  auto grid = GridParams<cd>::from_alpha_p(a6, p);
  auto g = [&](const cd& zz) { return omega(n, zz, spec); };
  PoleSet<cd> cand = PoleSet<cd>::from_indices(grid, 1, n + 1);  // x_{n+1} decoy
  auto rep = fit_partial_fractions(g, cand, true, ctx, rng);
  REQUIRE(rep.residual <= ctx.fit_tolerance);
  double scale = std::max(rep.max_coeff(), abs_d(rep.fit.constant));
  CHECK(abs_d(rep.coeff_at_index(n + 1)) <= ctx.fit_tolerance * scale);
  for (int k = 1; k <= n; ++k)
    CHECK(abs_d(rep.coeff_at_index(k)) > 1e-8 * scale);
}

TEST_CASE("split_operators structure") {
  Rng rng(52);
  auto [e6, p] = random_family(rng);

  // eps5 = eps6 gives lambda = 2
  auto e6eq = e6;
  e6eq[5] = e6eq[4];
  auto spl = split_operators(e6eq, p, ctx);
  CHECK(rel_diff(spl.lambda, cd(2.0)) < 1e-14);

  // identity W1 - lambda W2 = W-hat and ratio independence
  auto rep = verify_split(e6, p, ctx, rng);
  CHECK(rep.split_identity_err <= ctx.equality_tolerance);
  CHECK(rep.ratio_independence_err <= ctx.equality_tolerance);

  // both split operators are classical in the hatted sense; W2 is minimal
  auto spl2 = split_operators(e6, p, ctx);
  auto grid = GridParams<cd>::from_alpha_p(spl2.alpha, p);
  CHECK(check_classical(spl2.w1, grid, 5, true, ctx, rng).is_classical);
  CHECK(check_classical(spl2.w2, grid, 5, true, ctx, rng).is_classical);
  auto numer = detail::extract_numerator<cd>(spl2.w2.A1, spl2.alpha, p * p, ctx, rng);
  double interior = 0.0;
  for (int j = 1; j <= 5; ++j) interior = std::max(interior, abs_d(numer[std::size_t(j)]));
  CHECK(abs_d(numer[0]) <= 1e-10 * interior);
  CHECK(abs_d(numer[6]) <= 1e-10 * interior);
}

TEST_CASE("two_diag_coeffs against direct expansion") {
  Rng rng(53);
  auto [e6, p] = random_family(rng);
  auto spl = split_operators(e6, p, ctx);

  // nu_{2,0} = 0
  auto c0 = two_diag_coeffs(0, e6, p);
  CHECK(abs_d(c0.nu2) < 1e-14 * abs_d(c0.mu2));

  // mu_1/mu_2 = x(eps1234 p^{2n+1})
  cd e1234 = e6[0] * e6[1] * e6[2] * e6[3];
  for (int n = 1; n <= 4; ++n) {
    auto c = two_diag_coeffs(n, e6, p);
    CHECK(rel_diff(c.mu1 / c.mu2, x_of(e1234 * pow_int(p, 2 * n + 1))) < 1e-12);
  }

  // fitted two-diagonal action matches the printed coefficients
  for (int n = 1; n <= 4; ++n) {
    auto c = two_diag_coeffs(n, e6, p);
    auto [m1, n1, r1] =
        detail::fit_two_diag(spl.w1, n, spl.basis, spl.basis_shifted, rng);
    CHECK(r1 <= ctx.equality_tolerance);
    CHECK(rel_diff(m1, c.mu1) < 1e-10);
    CHECK(rel_diff(n1, c.nu1) < 1e-10);
    auto [m2, n2, r2] =
        detail::fit_two_diag(spl.w2, n, spl.basis, spl.basis_shifted, rng);
    CHECK(r2 <= ctx.equality_tolerance);
    CHECK(rel_diff(m2, c.mu2) < 1e-10);
    CHECK(rel_diff(n2, c.nu2) < 1e-10);
  }
}

TEST_CASE("solve_recurrence and the GEVP residual") {
  Rng rng(54);
  auto [e6, p] = random_family(rng);
  auto spl = split_operators(e6, p, ctx);

  // R_0 = 1
  auto r0 = solve_recurrence(0, e6, p, ctx);
  cd z0 = rng.complex_in_annulus<cd>(0.5, 0.9);
  CHECK(r0(z0) == cd(1.0));

  for (int n = 1; n <= 6; ++n) {
    auto rn = solve_recurrence(n, e6, p, ctx);
    for (int i = 0; i < 8; ++i) {
      cd z = rng.complex_in_annulus<cd>(0.7, 0.9);
      cd lhs = spl.w1.apply(rn, z);
      cd rhs = rn.lambda_n * spl.w2.apply(rn, z);
      double scale = abs_d(lhs) + abs_d(rhs) + 1e-300;
      CHECK(abs_d(cd(lhs - rhs)) / scale <= ctx.equality_tolerance);
    }
  }
}

TEST_CASE("Moebius covariance of the GEVP") {
  Rng rng(55);
  auto [e6, p] = random_family(rng);
  auto spl = split_operators(e6, p, ctx);
  int n = 4;
  auto rn = solve_recurrence(n, e6, p, ctx);

  cd t1 = rng.complex_in_annulus<cd>(0.5, 1.5), t2 = rng.complex_in_annulus<cd>(0.5, 1.5);
  cd r1 = rng.complex_in_annulus<cd>(0.5, 1.5), r2 = rng.complex_in_annulus<cd>(0.5, 1.5);
  REQUIRE(abs_d(cd(t1 * r2 - t2 * r1)) > 1e-6);
  cd lam_t = (t1 * rn.lambda_n + t2) / (r1 * rn.lambda_n + r2);
  for (int i = 0; i < 8; ++i) {
    cd z = rng.complex_in_annulus<cd>(0.7, 0.9);
    cd w1v = spl.w1.apply(rn, z), w2v = spl.w2.apply(rn, z);
    cd lhs = t1 * w1v + t2 * w2v;
    cd rhs = lam_t * (r1 * w1v + r2 * w2v);
    double scale = abs_d(lhs) + abs_d(rhs) + 1e-300;
    CHECK(abs_d(cd(lhs - rhs)) / scale <= ctx.equality_tolerance);
  }
}

TEST_CASE("kernel condition from the eigenvalue match") {
  Rng rng(56);
  auto [e6, p] = random_family(rng);
  int n = 3;
  // eps5/eps6 = eps1234 p^{2n+1} with the product eps5 eps6 kept fixed
  cd e1234 = e6[0] * e6[1] * e6[2] * e6[3];
  cd s56 = e6[4] * e6[5];
  cd ratio = e1234 * pow_int(p, 2 * n + 1);
  auto ek = e6;
  ek[4] = std::sqrt(s56 * ratio);
  ek[5] = std::sqrt(s56 / ratio);
  if (rel_diff(cd(ek[4] * ek[5]), s56) > 1e-12) ek[5] = -ek[5];
  auto cls = make_classical(ek, p, cd(1.0), ctx);
  auto spl = split_operators(e6, p, ctx);
  auto rn = solve_recurrence(n, e6, p, ctx);
  for (int i = 0; i < 8; ++i) {
    cd z = rng.complex_in_annulus<cd>(0.7, 0.9);
    double scale = abs_d(spl.w1.apply(rn, z)) +
                   abs_d(cd(spl.lambda * spl.w2.apply(rn, z))) + 1e-300;
    CHECK(abs_d(cls.hatted.apply(rn, z)) / scale <= ctx.equality_tolerance);
  }
}

TEST_CASE("generic pair of classical operators") {
  Rng rng(57);
  auto [e6, p] = random_family(rng);
  // delta: same eps_1, same product of eps_2..eps_6
  auto d6 = e6;
  cd c1 = rng.complex_in_annulus<cd>(0.85, 1.15);
  cd c2 = rng.complex_in_annulus<cd>(0.85, 1.15);
  d6[1] *= c1;
  d6[2] /= c1;
  d6[4] *= c2;
  d6[5] /= c2;

  auto rep = generic_pair(e6, d6, p, 4, ctx, rng);
  CHECK(rep.mu_formula_err <= ctx.equality_tolerance);
  CHECK(rep.nu_formula_err <= ctx.equality_tolerance);
  CHECK(rep.two_diag_err_w <= ctx.equality_tolerance);
  CHECK(rep.two_diag_err_y <= ctx.equality_tolerance);
  CHECK(rep.gevp_residual <= ctx.equality_tolerance);

  // nu_0 = 0 through the nu_{2,0} factor
  auto [mu0, nu0] = detail::classical_two_diag(0, e6, p);
  CHECK(abs_d(nu0) < 1e-12 * abs_d(mu0));

  // constraint violations are rejected
  auto bad = e6;
  bad[0] *= cd(1.1);
  CHECK_THROWS_AS(generic_pair(e6, bad, p, 3, ctx, rng), invariant_error);
}

TEST_CASE("eig_dense on a known matrix") {
  // companion-type check: eigenvalues of [[0,1],[-2,3]] are 1 and 2
  Matrix<cd> M = {{cd(0.0), cd(1.0)}, {cd(-2.0), cd(3.0)}};
  auto eig = eig_dense(M);
  std::vector<double> got = {eig.values[0].real(), eig.values[1].real()};
  std::sort(got.begin(), got.end());
  CHECK(got[0] == Catch::Approx(1.0).margin(1e-10));
  CHECK(got[1] == Catch::Approx(2.0).margin(1e-10));
  for (int k = 0; k < 2; ++k) {
    auto mv = mat_vec(M, eig.vectors[std::size_t(k)]);
    for (int i = 0; i < 2; ++i)
      CHECK(abs_d(cd(mv[std::size_t(i)] -
                     eig.values[std::size_t(k)] * eig.vectors[std::size_t(k)][std::size_t(i)])) < 1e-9);
  }
}

TEST_CASE("finite_dim reduction") {
  Rng rng(58);
  cd p = std::sqrt(rng.complex_in_annulus<cd>(0.42, 0.72));

  // N=0: M is 1x1 with gamma_{0,0}+gamma_{0,2}, psi_0 = chi_0
  {
    std::array<cd, 7> free;
    cd at = rng.complex_in_annulus<cd>(0.7, 1.3);
    cd e1 = std::sqrt(at * p);
    cd G = at / (p * e1);
    cd g7 = std::pow(G, cd(1.0 / 7.0));
    cd uprod(1.0);
    for (int j = 0; j < 6; ++j) {
      cd u = rng.complex_in_annulus<cd>(0.75, 1.3);
      free[std::size_t(j)] = g7 * u;
      uprod *= u;
    }
    free[6] = g7 / uprod;
    auto prob = finite_dim(0, free, p, cd(1.0), cd(0.3, 0.1), ctx, rng);
    REQUIRE(prob.M.size() == 1);
    auto gm = gamma_closed(0L, prob.eps);
    CHECK(rel_diff(prob.M[0][0], cd(gm[0] + gm[2])) < 1e-12);
    CHECK(rel_diff(prob.eigenvalues[0], prob.M[0][0]) < 1e-12);
    CHECK(prob.residuals[0] <= 1e-6);
  }

  // N=3: all eigenpairs verify pointwise
  {
    std::array<cd, 7> free;
    cd at = rng.complex_in_annulus<cd>(0.7, 1.3);
    cd e1 = std::sqrt(at * pow_int(p, 7));
    cd G = at / (p * e1);
    cd g7 = std::pow(G, cd(1.0 / 7.0));
    cd uprod(1.0);
    for (int j = 0; j < 6; ++j) {
      cd u = rng.complex_in_annulus<cd>(0.75, 1.3);
      free[std::size_t(j)] = g7 * u;
      uprod *= u;
    }
    free[6] = g7 / uprod;
    auto prob = finite_dim(3, free, p, cd(1.0), cd(0.0), ctx, rng);
    CHECK(prob.truncation_defect <= ctx.equality_tolerance);
    for (double r : prob.residuals) CHECK(r <= 1e-6);
    CHECK(prob.components_all_nonzero);
  }
}

TEST_CASE("ordinary EVP has no solutions (negative control)") {
  Rng rng(59);
  cd p = std::sqrt(rng.complex_in_annulus<cd>(0.35, 0.7));
  auto e6 = draw_eps6(rng, p);
  auto cls = make_classical(e6, p, cd(1.0), ctx);
  for (int n = 2; n <= 5; ++n) {
    double resid = ordinary_evp_best_residual(cls.hatted, cls.grid, n, ctx, rng);
    CHECK(resid > 1e3 * ctx.fit_tolerance);
  }
}
