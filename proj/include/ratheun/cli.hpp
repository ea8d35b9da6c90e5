#pragma once

#include <boost/multiprecision/cpp_complex.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ratheun/suites.hpp"

namespace ratheun::cli {

namespace detail {

template <class C>
C lift(const std::complex<double>& z) {
  return complex_traits<C>::make(z.real(), z.imag());
}

template <class C, std::size_t N>
std::array<C, N> lift_array(const std::vector<std::complex<double>>& v,
                            const char* what) {
  if (v.size() != N)
    throw invariant_error(std::string(what) + ": expected " + std::to_string(N) +
                          " comma-separated complex values");
  std::array<C, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = lift<C>(v[i]);
  return out;
}

struct ComputeArgs {
  std::string object;
  std::vector<std::complex<double>> eps;
  std::complex<double> p{0.6, 0.0};
  std::complex<double> eta0{1.0, 0.0};
  std::complex<double> eta_tilde0{0.0, 0.0};
  std::complex<double> z{0.83, 0.0};
  int n = 0;
  int N = 0;
};

template <class C>
report::ComputeResult run_compute(const ComputeArgs& a, const RunConfig& cfg) {
  auto ctx = cfg.context();
  report::ComputeResult out;
  out.object = a.object;
  Rng rng(cfg.seed);

  if (a.object == "gamma") {
    EpsilonParams<C> eps;
    eps.p = lift<C>(a.p);
    auto e8 = lift_array<C, 8>(a.eps, "--eps");
    eps.eps = e8;
    eps.eta0 = lift<C>(a.eta0);
    eps.eta_tilde0 = lift<C>(a.eta_tilde0);
    eps.validate(ctx);
    out.params = suites::detail::echo_eps(eps) + ";n=" + std::to_string(a.n);
    auto g = gamma_closed(long(a.n), eps);
    const char* names[4] = {"gamma_n_0", "gamma_n_1", "gamma_n_2", "gamma_n_3"};
    for (int k = 0; k < 4; ++k)
      out.rows.push_back({names[k],
                          {static_cast<double>(g[std::size_t(k)].real()),
                           static_cast<double>(g[std::size_t(k)].imag())}});
    return out;
  }

  auto need6 = [&] { return lift_array<C, 6>(a.eps, "--eps"); };
  if (a.object == "two-diag-coeffs") {
    auto e6 = need6();
    C p = lift<C>(a.p);
    out.params = suites::detail::echo_eps6(e6, p) + ";n=" + std::to_string(a.n);
    auto c = two_diag_coeffs(a.n, e6, p);
    auto push = [&](const char* nm, const C& v) {
      out.rows.push_back({nm, {static_cast<double>(v.real()), static_cast<double>(v.imag())}});
    };
    push("mu1", c.mu1);
    push("nu1", c.nu1);
    push("mu2", c.mu2);
    push("nu2", c.nu2);
    return out;
  }
  if (a.object == "rn-coefficients") {
    auto e6 = need6();
    C p = lift<C>(a.p);
    out.params = suites::detail::echo_eps6(e6, p) + ";n=" + std::to_string(a.n);
    auto rn = solve_recurrence(a.n, e6, p, ctx);
    out.rows.push_back({"lambda_n",
                        {static_cast<double>(rn.lambda_n.real()),
                         static_cast<double>(rn.lambda_n.imag())}});
    for (int s = 0; s <= a.n; ++s)
      out.rows.push_back({"A_" + std::to_string(s),
                          {static_cast<double>(rn.A[std::size_t(s)].real()),
                           static_cast<double>(rn.A[std::size_t(s)].imag())}});
    return out;
  }
  if (a.object == "series-value") {
    auto e6 = need6();
    C p = lift<C>(a.p);
    C z = lift<C>(a.z);
    out.params = suites::detail::echo_eps6(e6, p) + ";n=" + std::to_string(a.n) +
                 ";z=" + report::fmt_complex(z);
    auto spec = WilsonRnSpec<C>::from_eps6(e6, p, a.n);
    C v = wilson_rn(spec, z, ctx);
    out.rows.push_back({"R_n", {static_cast<double>(v.real()), static_cast<double>(v.imag())}});
    return out;
  }
  if (a.object == "finite-dim-spectrum") {
    auto e7 = lift_array<C, 7>(a.eps, "--eps (eps_2..eps_8)");
    C p = lift<C>(a.p);
    auto prob = finite_dim(a.N, e7, p, lift<C>(a.eta0), lift<C>(a.eta_tilde0), ctx, rng);
    out.params = suites::detail::echo_eps(prob.eps) + ";N=" + std::to_string(a.N);
    for (int k = 0; k <= a.N; ++k) {
      out.rows.push_back({"lambda_" + std::to_string(k),
                          {static_cast<double>(prob.eigenvalues[std::size_t(k)].real()),
                           static_cast<double>(prob.eigenvalues[std::size_t(k)].imag())}});
      for (int j = 0; j <= a.N; ++j) {
        const C& v = prob.eigenvectors[std::size_t(k)][std::size_t(j)];
        out.rows.push_back({"v_" + std::to_string(k) + "_" + std::to_string(j),
                            {static_cast<double>(v.real()), static_cast<double>(v.imag())}});
      }
    }
    return out;
  }
  throw invariant_error("unknown compute object: " + a.object);
}

inline int write_out(const RunConfig& cfg,
                     const std::function<void(std::ostream&)>& writer) {
  if (cfg.output_path.empty()) {
    writer(std::cout);
    return 0;
  }
  std::ofstream os(cfg.output_path);
  if (!os) {
    std::cerr << "error: cannot open output file " << cfg.output_path << "\n";
    return 3;
  }
  writer(os);
  return 0;
}

}  // namespace detail

/// Entry point shared by the binary and the tests. Returns the process exit
/// code: 0 on success (verify: all checks pass), 1 on verification failure,
/// 2 on usage errors, 3 on I/O errors, 4 on numerical errors.
inline int run(std::vector<std::string> args) {
  CLI::App app{"rational q-Heun operators on the Askey-Wilson grid"};
  app.require_subcommand(1);

  RunConfig cfg;
  bool precision_given = false;
  std::string format = "csv";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "seed for all random draws");
    sub->add_option("--precision", cfg.precision,
                    "working precision in decimal digits (16 = binary64; >18 switches to 50-digit arithmetic)")
        ->check(CLI::Range(15, 45))
        ->each([&](const std::string&) { precision_given = true; });
    sub->add_option("--fit-tol", [&cfg](const std::vector<std::string>& v) {
          cfg.fit_tolerance = std::stod(v[0]);
          return true;
        }, "override the relative fit tolerance");
    sub->add_option("--eq-tol", [&cfg](const std::vector<std::string>& v) {
          cfg.equality_tolerance = std::stod(v[0]);
          return true;
        }, "override the relative equality tolerance");
    sub->add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output,-o", cfg.output_path, "output file (default stdout)");
  };

  // verify
  auto* verify = app.add_subcommand(
      "verify",
      "run a verification suite; report columns: suite,check,draw,n,value,threshold,pass,params");
  std::string suite;
  verify->add_option("suite", suite, "one of: raising, gamma-closed, a1-correspondence, "
                                     "aw-limit, classical, gevp-split, gevp-generic, "
                                     "series-match, finite-dim, all")
      ->required();
  verify->add_option("--draws", cfg.draws, "number of random parameter draws");
  verify->add_option("--n-max", cfg.n_max, "largest expansion index / dimension");
  add_common(verify);

  // compute
  auto* compute = app.add_subcommand(
      "compute", "evaluate one object; report columns: object,name,value,params");
  detail::ComputeArgs ca;
  compute->add_option("object", ca.object,
                      "one of: gamma, two-diag-coeffs, rn-coefficients, "
                      "finite-dim-spectrum, series-value")
      ->required();
  std::string eps_str;
  compute->add_option("--eps", eps_str,
                      "comma-separated complex values re+imj (8 for gamma, 6 for the "
                      "classical family, 7 = eps_2..eps_8 for finite-dim-spectrum)");
  std::string p_str = "0.6", eta0_str = "1", etat0_str = "0", z_str = "0.83";
  compute->add_option("--p", p_str, "square root of q");
  compute->add_option("--eta0", eta0_str, "overall scale eta_0");
  compute->add_option("--eta-tilde0", etat0_str, "additive constant eta-tilde_0");
  compute->add_option("--z", z_str, "evaluation point for series-value");
  compute->add_option("--n", ca.n, "expansion / series index n");
  compute->add_option("--N", ca.N, "finite-dimension parameter N");
  add_common(compute);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    std::stringstream out;
    int code = app.exit(e, out, out);
    std::cerr << out.str();
    return code == 0 ? 0 : 2;
  }

  // environment default for the precision
  if (!precision_given) {
    if (const char* env = std::getenv("RATHEUN_PRECISION")) {
      try {
        cfg.precision = std::stoi(env);
      } catch (const std::exception&) {
        std::cerr << "error: RATHEUN_PRECISION is not an integer\n";
        return 2;
      }
    }
  }
  cfg.format = (format == "json") ? RunConfig::Format::json : RunConfig::Format::csv;

  using c50 = boost::multiprecision::cpp_complex_50;
  try {
    if (verify->parsed()) {
      auto known = suites::suite_names();
      if (suite != "all" &&
          std::find(known.begin(), known.end(), suite) == known.end()) {
        std::cerr << "error: unknown suite '" << suite << "'\n";
        std::cerr << "known suites: all";
        for (const auto& s : known) std::cerr << ", " << s;
        std::cerr << "\n";
        return 2;
      }
      std::vector<report::SuiteResult> results;
      if (cfg.precision <= 18) {
        results = suites::run_suites<std::complex<double>>(suite, cfg);
      } else {
        results = suites::run_suites<c50>(suite, cfg);
      }
      int rc = detail::write_out(cfg, [&](std::ostream& os) {
        if (cfg.format == RunConfig::Format::json)
          report::write_json(os, results, cfg);
        else
          report::write_csv(os, results, cfg);
      });
      if (rc != 0) return rc;
      for (const auto& r : results)
        if (!r.pass) return 1;
      return 0;
    }

    // compute
    ca.eps = report::parse_complex_list(eps_str);
    ca.p = report::parse_complex(p_str);
    ca.eta0 = report::parse_complex(eta0_str);
    ca.eta_tilde0 = report::parse_complex(etat0_str);
    ca.z = report::parse_complex(z_str);
    report::ComputeResult result;
    if (cfg.precision <= 18) {
      result = detail::run_compute<std::complex<double>>(ca, cfg);
    } else {
      result = detail::run_compute<c50>(ca, cfg);
    }
    return detail::write_out(cfg, [&](std::ostream& os) {
      if (cfg.format == RunConfig::Format::json)
        report::write_json(os, result, cfg);
      else
        report::write_csv(os, result, cfg);
    });
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args));
}

}  // namespace ratheun::cli
