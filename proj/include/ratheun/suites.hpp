#pragma once

#include <sstream>

#include "ratheun/hyp.hpp"
#include "ratheun/report.hpp"

namespace ratheun::suites {

using report::SuiteResult;

namespace detail {

template <class C>
std::string echo_grid(const GridParams<C>& g) {
  std::ostringstream os;
  os << "q=" << report::fmt_complex(g.q) << ";alpha=" << report::fmt_complex(g.alpha);
  return os.str();
}

template <class C>
std::string echo_eps(const EpsilonParams<C>& eps) {
  std::ostringstream os;
  os << "p=" << report::fmt_complex(eps.p) << ";eps=";
  for (int j = 0; j < 8; ++j) {
    if (j) os << '|';
    os << report::fmt_complex(eps.eps[std::size_t(j)]);
  }
  os << ";eta0=" << report::fmt_complex(eps.eta0)
     << ";eta_tilde0=" << report::fmt_complex(eps.eta_tilde0);
  return os.str();
}

template <class C>
std::string echo_eps6(const std::array<C, 6>& e6, const C& p) {
  std::ostringstream os;
  os << "p=" << report::fmt_complex(p) << ";eps6=";
  for (int j = 0; j < 6; ++j) {
    if (j) os << '|';
    os << report::fmt_complex(e6[std::size_t(j)]);
  }
  return os.str();
}

template <class C>
RSpec<C> draw_rspec(Rng& rng) {
  RSpec<C> r;
  for (auto& v : r.xi) v = rng.template complex_in_annulus<C>(0.5, 1.5);
  return r;
}

template <class C>
std::pair<std::array<C, 6>, C> draw_classical_family(Rng& rng) {
  using std::sqrt;
  C p = sqrt(rng.template complex_in_annulus<C>(0.35, 0.7));
  return {draw_eps6(rng, p), p};
}

/// Second classical family on the same grid, by rebalancing pairs.
template <class C>
std::array<C, 6> rebalance_eps6(const std::array<C, 6>& e6, Rng& rng) {
  auto out = e6;
  C c1 = rng.template complex_in_annulus<C>(0.85, 1.2);
  C c2 = rng.template complex_in_annulus<C>(0.85, 1.2);
  out[1] *= c1;
  out[2] /= c1;
  out[3] *= c2;
  out[4] /= c2;
  return out;
}

}  // namespace detail

/// Raising property of the generic interpolation-built operator:
/// W chi_n lies in span{chi_0..chi_{n+1}} with the four-term structure.
template <class C>
SuiteResult run_raising(const RunConfig& cfg) {
  SuiteResult out{"raising"};
  auto ctx = cfg.context();
  int draws = cfg.draws_or(20), n_max = cfg.n_max_or(8);
  for (int d = 0; d < draws; ++d) {
    Rng rng = Rng::keyed(cfg.seed, fnv1a("raising") + std::uint64_t(d));
    auto grid = draw_grid<C>(rng);
    auto r = detail::draw_rspec<C>(rng);
    auto W = build_from_rspec(r, grid, ctx);
    std::ostringstream ps;
    ps << detail::echo_grid(grid) << ";xi=";
    for (int j = 0; j < 9; ++j) {
      if (j) ps << '|';
      ps << report::fmt_complex(r.xi[std::size_t(j)]);
    }
    for (int n = 0; n <= n_max; ++n) {
      auto g = W.applied(chi(n, grid));
      auto cand = PoleSet<C>::from_indices(grid, 0, n + 1);
      auto rep = fit_partial_fractions(g, cand, false, ctx, rng);
      out.add_le("residual", d, n, rep.residual, ctx.fit_tolerance, ps.str());
      double spur = 0.0;
      double scale = std::max(rep.max_coeff(), 1e-300);
      for (long k = 1; k <= n - 2; ++k)
        spur = std::max(spur, abs_d(rep.coeff_at_index(k)) / scale);
      out.add_le("spurious", d, n, spur, ctx.fit_tolerance, ps.str());
    }
  }
  return out;
}

/// Closed-form expansion coefficients against measured ones.
template <class C>
SuiteResult run_gamma_closed(const RunConfig& cfg) {
  SuiteResult out{"gamma-closed"};
  auto ctx = cfg.context();
  int draws = cfg.draws_or(20), n_max = cfg.n_max_or(8);
  for (int d = 0; d < draws; ++d) {
    Rng rng = Rng::keyed(cfg.seed, fnv1a("gamma-closed") + std::uint64_t(d));
    auto eps = draw_epsilon<C>(rng);
    auto W = from_epsilon(eps, ctx);
    auto grid = eps.grid();
    auto ps = detail::echo_eps(eps);
    for (int n = 0; n <= n_max; ++n) {
      auto g = W.applied(chi(n, grid));
      auto gm = gamma_closed(long(n), eps);
      auto cand = PoleSet<C>::from_indices(grid, 0, n + 1);
      auto rep = fit_partial_fractions(g, cand, false, ctx, rng);
      out.add_le("residual", d, n, rep.residual, ctx.fit_tolerance, ps);
      // expected coefficients with the n<=1 slots folded
      std::vector<C> want(std::size_t(n) + 2, C(0));
      want[0] += gm[0];
      if (n >= 1) want[std::size_t(n) - 1] += gm[1];
      want[std::size_t(n)] += gm[2];
      want[std::size_t(n) + 1] += gm[3];
      double scale = 0.0;
      for (const auto& w : want) scale = std::max(scale, abs_d(w));
      double err = 0.0;
      for (long k = 0; k <= n + 1; ++k) {
        double wk = abs_d(want[std::size_t(k)]);
        double dev = abs_d(C(rep.coeff_at_index(k) - want[std::size_t(k)]));
        // per-coefficient relative error; empty slots count against the scale
        err = std::max(err, wk > 1e-12 * scale ? dev / wk : dev / scale);
      }
      out.add_le("coeff-match", d, n, err, ctx.equality_tolerance, ps);
    }
  }
  return out;
}

/// Gauge correspondence with Takemura's A^(1) plus the two-series raising
/// patterns of the modified operator W-hat.
template <class C>
SuiteResult run_a1_correspondence(const RunConfig& cfg) {
  SuiteResult out{"a1-correspondence"};
  auto ctx = cfg.context();
  int draws = cfg.draws_or(10), k_max = std::min(cfg.n_max_or(5), 8);
  for (int d = 0; d < draws; ++d) {
    Rng rng = Rng::keyed(cfg.seed, fnv1a("a1-correspondence") + std::uint64_t(d));
    auto eps = draw_epsilon<C>(rng, 0.3, 0.64);  // |p| <= 0.8 for the products
    auto ps = detail::echo_eps(eps);
    auto gauge = gauge_consistency_check(eps, ctx, rng);
    out.add_le("psi-functional-eq", d, 0, gauge.functional_eq_err,
               ctx.equality_tolerance, ps);
    out.add_le("coeff-identity", d, 0, gauge.coeff_identity_err,
               ctx.equality_tolerance, ps);
    out.add_le("gauge-action", d, 0, gauge.action_err, ctx.equality_tolerance, ps);
    out.add_le("gauge-scaling", d, 0, gauge.scaling_invariance_err,
               ctx.equality_tolerance, ps);

    auto What = w_hat_modified(eps);
    auto grid = eps.grid();
    const C p = eps.p;

    auto run_pattern = [&](const char* check, int k, const RationalPF<C>& f,
                           std::vector<long> xs, std::vector<long> ys,
                           std::vector<long> decoy_xs, std::vector<long> decoy_ys) {
      PoleSet<C> cand{grid, xs, {}};
      for (long j : ys) cand.extra_x.push_back(grid_y(p, j));
      std::size_t pattern = cand.size();
      for (long j : decoy_xs) cand.indices.push_back(j);
      std::sort(cand.indices.begin(), cand.indices.end());
      for (long j : decoy_ys) cand.extra_x.push_back(grid_y(p, j));
      // decoy grid indices got sorted into the index block; recompute the
      // pattern membership by name instead
      auto rep = fit_partial_fractions(What.applied(f), cand, false, ctx, rng);
      double scale = std::max(rep.max_coeff(), 1e-300);
      double spur = 0.0;
      for (long j : decoy_xs)
        spur = std::max(spur, abs_d(rep.coeff_at_index(j)) / scale);
      // decoy y's occupy the tail of extra_x
      std::size_t extra_base = cand.indices.size() + ys.size();
      for (std::size_t t = 0; t < decoy_ys.size(); ++t)
        spur = std::max(spur, abs_d(rep.fit.coeffs[extra_base + t]) / scale);
      out.add_le(std::string(check) + "-residual", d, k, rep.residual,
                 ctx.equality_tolerance, ps);
      out.add_le(std::string(check) + "-absence", d, k, spur,
                 ctx.equality_tolerance, ps);
      (void)pattern;
    };

    for (int k = 0; k <= k_max; ++k) {
      // x-series pattern: {y0, x0, x_{k-1}, x_k, x_{k+1}}
      std::vector<long> xs;
      if (k == 0) xs = {0, 1};
      else if (k == 1) xs = {0, 1, 2};
      else xs = {0, k - 1, k, k + 1};
      std::vector<long> dx;
      if (k >= 3) dx = {1};
      else dx = {long(k) + 2};
      run_pattern("pattern-x", k, chi(k, grid), xs, {0}, dx, {1});

      // y-series pattern: {x0, y0, y_{k-1}, y_k, y_{k+1}}
      PoleSet<C> yps{grid, {}, {grid_y(p, k)}};
      RationalPF<C> ychi{yps, C(0), {C(1)}};
      std::vector<long> ys;
      if (k == 0) ys = {0, 1};
      else if (k == 1) ys = {0, 1, 2};
      else ys = {0, k - 1, k, k + 1};
      std::vector<long> dy;
      if (k >= 3) dy = {1};
      else dy = {long(k) + 2};
      run_pattern("pattern-y", k, ychi, {0}, ys, {1}, dy);
    }
  }
  return out;
}

/// Askey-Wilson degeneration: O(t^-2) convergence of the scaled operator.
template <class C>
SuiteResult run_aw_limit(const RunConfig& cfg) {
  SuiteResult out{"aw-limit"};
  auto ctx = cfg.context();
  int draws = cfg.draws_or(6);
  for (int d = 0; d < draws; ++d) {
    Rng rng = Rng::keyed(cfg.seed, fnv1a("aw-limit") + std::uint64_t(d));
    using std::sqrt;
    C p = sqrt(rng.template complex_in_annulus<C>(0.35, 0.7));
    std::array<C, 6> e6;
    for (auto& v : e6) v = rng.template complex_in_annulus<C>(0.6, 1.4);
    C d7 = rng.template complex_in_annulus<C>(0.6, 1.4);
    C d8 = rng.template complex_in_annulus<C>(0.6, 1.4);
    std::ostringstream ps;
    ps << detail::echo_eps6(e6, p) << ";delta7=" << report::fmt_complex(d7)
       << ";delta8=" << report::fmt_complex(d8);

    auto lim1 = aw_limit(e6, p, d7, d8, 100.0, ctx);
    auto lim2 = aw_limit(e6, p, d7, d8, 200.0, ctx);
    for (int i = 0; i < 6; ++i) {
      C z = rng.template complex_in_annulus<C>(0.6, 0.9);
      double dev1 = abs_d(C(lim1.scaled.A1(z) - lim1.u_hat(z)));
      double dev2 = abs_d(C(lim2.scaled.A1(z) - lim2.u_hat(z)));
      double ratio = dev1 / std::max(dev2, 1e-300);
      out.add("richardson-ratio", d, i, ratio, 4.8, std::abs(ratio - 4.0) <= 0.8,
              ps.str());
    }
    // U-hat closed form
    C z = rng.template complex_in_annulus<C>(0.5, 0.9);
    C lhs = lim1.u_hat(z) * p * z * (C(1) - z * z) * (C(1) - p * p * z * z);
    C rhs(1);
    for (const auto& v : e6) rhs *= (C(1) - v * v * p * z);
    out.add_le("u-hat-closed-form", d, 0, rel_diff(lhs, rhs), ctx.equality_tolerance,
               ps.str());
  }
  return out;
}

/// Classical family: skip-pole suppression, printed constants, and the
/// minimal combination.
template <class C>
SuiteResult run_classical(const RunConfig& cfg) {
  SuiteResult out{"classical"};
  auto ctx = cfg.context();
  int draws = cfg.draws_or(10), n_max = cfg.n_max_or(8);
  for (int d = 0; d < draws; ++d) {
    Rng rng = Rng::keyed(cfg.seed, fnv1a("classical") + std::uint64_t(d));
    auto [e6, p] = detail::draw_classical_family<C>(rng);
    auto op = make_classical(e6, p, rng.template complex_in_annulus<C>(0.5, 1.5), ctx);
    auto ps = detail::echo_eps6(e6, p);

    auto rep = check_classical(op.skip_pole, op.grid, n_max, false, ctx, rng);
    double chi1 = 0.0, resid = 0.0;
    for (double v : rep.chi1_rel) chi1 = std::max(chi1, v);
    for (double v : rep.residuals) resid = std::max(resid, v);
    out.add_le("skip-pole-chi1", d, n_max, chi1, ctx.fit_tolerance, ps);
    out.add_le("skip-pole-residual", d, n_max, resid, ctx.fit_tolerance, ps);

    // printed hat-gamma_00
    C want(1);
    for (const auto& e : e6) want *= (C(1) - op.alpha * p / (e * e));
    out.add_le("gamma00-hat", d, 0, rel_diff(op.gamma00_hat, want),
               ctx.equality_tolerance, ps);

    // minimal combination with a grid-sharing partner
    auto e6b = detail::rebalance_eps6(e6, rng);
    auto op2 = make_classical(e6b, p, C(1), ctx);
    auto mins = minimal_combination(op, op2, ctx, rng);
    out.add_le("minimal-leakage", d, 0, mins.leakage, ctx.equality_tolerance, ps);
    auto repm = check_classical(mins.hatted, op.grid, std::min(n_max, 5), true, ctx, rng);
    double chim = 0.0;
    for (double v : repm.chi1_rel) chim = std::max(chim, v);
    out.add_le("minimal-still-classical", d, 0, chim, ctx.fit_tolerance, ps);
  }
  return out;
}

/// Splitting GEVP: recurrence solutions, Moebius covariance, and the ordinary
/// EVP negative control.
template <class C>
SuiteResult run_gevp_split(const RunConfig& cfg) {
  SuiteResult out{"gevp-split"};
  auto ctx = cfg.context();
  int draws = cfg.draws_or(10), n_max = cfg.n_max_or(6);
  for (int d = 0; d < draws; ++d) {
    Rng rng = Rng::keyed(cfg.seed, fnv1a("gevp-split") + std::uint64_t(d));
    auto [e6, p] = detail::draw_classical_family<C>(rng);
    auto ps = detail::echo_eps6(e6, p);
    auto spl = split_operators(e6, p, ctx);
    auto cons = verify_split(e6, p, ctx, rng);
    out.add_le("split-identity", d, 0, cons.split_identity_err,
               ctx.equality_tolerance, ps);
    out.add_le("ratio-independence", d, 0, cons.ratio_independence_err,
               ctx.equality_tolerance, ps);

    for (int n = 1; n <= n_max; ++n) {
      auto rn = solve_recurrence(n, e6, p, ctx);
      double worst = 0.0, worst_m = 0.0;
      C t1 = rng.template complex_in_annulus<C>(0.5, 1.5);
      C t2 = rng.template complex_in_annulus<C>(0.5, 1.5);
      C r1 = rng.template complex_in_annulus<C>(0.5, 1.5);
      C r2 = rng.template complex_in_annulus<C>(0.5, 1.5);
      C lam_t = (t1 * rn.lambda_n + t2) / (r1 * rn.lambda_n + r2);
      for (int i = 0; i < 8; ++i) {
        double th = rng.angle();
        C z = complex_traits<C>::make(0.79 * std::cos(th), 0.79 * std::sin(th));
        C w1v = spl.w1.apply(rn, z), w2v = spl.w2.apply(rn, z);
        double scale = abs_d(w1v) + abs_d(C(rn.lambda_n * w2v)) + 1e-300;
        worst = std::max(worst, abs_d(C(w1v - rn.lambda_n * w2v)) / scale);
        C lhs = t1 * w1v + t2 * w2v, rhs = lam_t * (r1 * w1v + r2 * w2v);
        double scale_m = abs_d(lhs) + abs_d(rhs) + 1e-300;
        worst_m = std::max(worst_m, abs_d(C(lhs - rhs)) / scale_m);
      }
      out.add_le("gevp-residual", d, n, worst, ctx.equality_tolerance, ps);
      out.add_le("moebius-residual", d, n, worst_m, ctx.equality_tolerance, ps);
    }

    // negative control: the ordinary EVP keeps a residual
    auto cls = make_classical(e6, p, C(1), ctx);
    int nn = std::max(2, n_max / 2);
    double resid = ordinary_evp_best_residual(cls.hatted, cls.grid, nn, ctx, rng);
    out.add("evp-negative-control", d, nn, resid, 1e3 * ctx.fit_tolerance,
            resid > 1e3 * ctx.fit_tolerance, ps);
  }
  return out;
}

/// Generic pair of classical operators: two-diagonality on the shared
/// omega-family, printed prefactors, GEVP residual.
template <class C>
SuiteResult run_gevp_generic(const RunConfig& cfg) {
  SuiteResult out{"gevp-generic"};
  auto ctx = cfg.context();
  int draws = cfg.draws_or(8), n_max = cfg.n_max_or(5);
  for (int d = 0; d < draws; ++d) {
    Rng rng = Rng::keyed(cfg.seed, fnv1a("gevp-generic") + std::uint64_t(d));
    auto [e6, p] = detail::draw_classical_family<C>(rng);
    auto d6 = e6;
    C c1 = rng.template complex_in_annulus<C>(0.85, 1.15);
    C c2 = rng.template complex_in_annulus<C>(0.85, 1.15);
    d6[1] *= c1;
    d6[2] /= c1;
    d6[4] *= c2;
    d6[5] /= c2;
    std::ostringstream ps;
    ps << detail::echo_eps6(e6, p) << ";delta6=";
    for (int j = 0; j < 6; ++j) {
      if (j) ps << '|';
      ps << report::fmt_complex(d6[std::size_t(j)]);
    }
    auto rep = generic_pair(e6, d6, p, n_max, ctx, rng);
    out.add_le("mu-formula", d, n_max, rep.mu_formula_err, ctx.equality_tolerance,
               ps.str());
    out.add_le("nu-formula", d, n_max, rep.nu_formula_err, ctx.equality_tolerance,
               ps.str());
    out.add_le("two-diag-w", d, n_max, rep.two_diag_err_w, ctx.equality_tolerance,
               ps.str());
    out.add_le("two-diag-y", d, n_max, rep.two_diag_err_y, ctx.equality_tolerance,
               ps.str());
    out.add_le("gevp-residual", d, n_max, rep.gevp_residual, ctx.equality_tolerance,
               ps.str());
  }
  return out;
}

/// Identification of the recurrence solutions with the 10B9 series, the
/// kernel condition, and the shifted-parameter action.
template <class C>
SuiteResult run_series_match(const RunConfig& cfg) {
  SuiteResult out{"series-match"};
  auto ctx = cfg.context();
  int draws = cfg.draws_or(10), n_max = cfg.n_max_or(6);
  for (int d = 0; d < draws; ++d) {
    Rng rng = Rng::keyed(cfg.seed, fnv1a("series-match") + std::uint64_t(d));
    auto [e6, p] = detail::draw_classical_family<C>(rng);
    auto ps = detail::echo_eps6(e6, p);
    for (int n = 0; n <= n_max; ++n) {
      auto rn = solve_recurrence(n, e6, p, ctx);
      auto spec = WilsonRnSpec<C>::from_eps6(e6, p, n);
      C ratio0(0);
      double spread = 0.0;
      for (int i = 0; i < 8; ++i) {
        double th = rng.angle();
        C z = complex_traits<C>::make(0.79 * std::cos(th), 0.79 * std::sin(th));
        C ratio = wilson_rn(spec, z, ctx) / rn(z);
        if (i == 0) ratio0 = ratio;
        else spread = std::max(spread, rel_diff(ratio, ratio0));
      }
      out.add_le("series-ratio-spread", d, n, spread, ctx.equality_tolerance, ps);
    }
    for (int n = 1; n <= std::min(n_max, 4); ++n) {
      auto ks = check_kernel_and_shift(e6, p, n, ctx, rng);
      out.add_le("kernel-branch-1", d, n, ks.kernel_branch1, ctx.equality_tolerance, ps);
      out.add_le("kernel-branch-2", d, n, ks.kernel_branch2, ctx.equality_tolerance, ps);
      out.add_le("shift-ratio-spread", d, n, ks.shift_ratio_spread,
                 ctx.equality_tolerance, ps);
    }
  }
  return out;
}

/// Finite-dimensional reduction for N = 0..n_max: eigenpair residuals.
template <class C>
SuiteResult run_finite_dim(const RunConfig& cfg) {
  SuiteResult out{"finite-dim"};
  auto ctx = cfg.context();
  int draws = cfg.draws_or(5), N_max = cfg.n_max_or(6);
  for (int d = 0; d < draws; ++d) {
    Rng rng = Rng::keyed(cfg.seed, fnv1a("finite-dim") + std::uint64_t(d));
    using std::pow;
    using std::sqrt;
    C p = sqrt(rng.template complex_in_annulus<C>(0.42, 0.72));
    for (int N = 0; N <= N_max; ++N) {
      // balanced completion: alpha target ~ 1, the residual product spread
      // evenly over eps_2..eps_8
      C at = rng.template complex_in_annulus<C>(0.7, 1.3);
      C e1 = sqrt(at * pow_int(p, 2 * N + 1));
      C G = at / (p * e1);
      C g7 = pow(G, C(1.0 / 7.0));
      std::array<C, 7> free;
      C uprod(1);
      for (int j = 0; j < 6; ++j) {
        C u = rng.template complex_in_annulus<C>(0.75, 1.3);
        free[std::size_t(j)] = g7 * u;
        uprod *= u;
      }
      free[6] = g7 / uprod;
      C eta0 = rng.template complex_in_annulus<C>(0.5, 1.5);
      C etat0 = rng.template complex_in_annulus<C>(0.5, 1.5);
      auto prob = finite_dim(N, free, p, eta0, etat0, ctx, rng);
      auto ps = detail::echo_eps(prob.eps);
      out.add_le("truncation-defect", d, N, prob.truncation_defect,
                 ctx.equality_tolerance, ps);
      double worst = 0.0;
      for (double r : prob.residuals) worst = std::max(worst, r);
      out.add_le("eigen-residual", d, N, worst, 1e-6, ps);
      // informational: component magnitudes (flagged, never failed)
      out.add("components-nonzero", d, N, prob.components_all_nonzero ? 1.0 : 0.0,
              0.0, true, ps);
    }
  }
  return out;
}

inline std::vector<std::string> suite_names() {
  return {"raising",   "gamma-closed", "a1-correspondence",
          "aw-limit",  "classical",    "gevp-split",
          "gevp-generic", "series-match", "finite-dim"};
}

template <class C>
SuiteResult run_suite(const std::string& name, const RunConfig& cfg) {
  if (name == "raising") return run_raising<C>(cfg);
  if (name == "gamma-closed") return run_gamma_closed<C>(cfg);
  if (name == "a1-correspondence") return run_a1_correspondence<C>(cfg);
  if (name == "aw-limit") return run_aw_limit<C>(cfg);
  if (name == "classical") return run_classical<C>(cfg);
  if (name == "gevp-split") return run_gevp_split<C>(cfg);
  if (name == "gevp-generic") return run_gevp_generic<C>(cfg);
  if (name == "series-match") return run_series_match<C>(cfg);
  if (name == "finite-dim") return run_finite_dim<C>(cfg);
  throw invariant_error("unknown suite: " + name);
}

template <class C>
std::vector<SuiteResult> run_suites(const std::string& name, const RunConfig& cfg) {
  std::vector<SuiteResult> results;
  if (name == "all") {
    for (const auto& s : suite_names()) results.push_back(run_suite<C>(s, cfg));
  } else {
    results.push_back(run_suite<C>(name, cfg));
  }
  return results;
}

}  // namespace ratheun::suites
