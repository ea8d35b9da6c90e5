// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Tolerances are pinned here and must not be loosened.

#include <chrono>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ratheun/cli.hpp"
#include "ratheun/suites.hpp"

using namespace ratheun;
using cd = std::complex<double>;

namespace {

int failures = 0;

void line(int criterion, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
              name, detail.c_str());
  if (!pass) ++failures;
}

double worst_value(const report::SuiteResult& r, const std::string& check) {
  double w = 0.0;
  for (const auto& row : r.rows)
    if (row.check.rfind(check, 0) == 0) w = std::max(w, row.value);
  return w;
}

bool all_pass(const report::SuiteResult& r, const std::string& prefix = "") {
  for (const auto& row : r.rows)
    if (prefix.empty() || row.check.rfind(prefix, 0) == 0)
      if (!row.pass) return false;
  return true;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string strip_timestamp(const std::string& path) {
  std::ifstream is(path);
  std::ostringstream out;
  std::string linebuf;
  while (std::getline(is, linebuf)) {
    if (linebuf.rfind("# generated:", 0) == 0) continue;
    out << linebuf << "\n";
  }
  return out.str();
}

}  // namespace

int main() {
  RunConfig cfg;
  cfg.seed = 987654321ull;

  // 1. raising property: 20 draws, n = 0..8, residual and spurious <= 1e-9, <= 10 s
  {
    RunConfig c = cfg;
    c.draws = 20;
    c.n_max = 8;
    auto t0 = std::chrono::steady_clock::now();
    auto r = suites::run_raising<cd>(c);
    double secs = seconds_since(t0);
    std::ostringstream d;
    d << "worst residual " << worst_value(r, "residual") << ", worst spurious "
      << worst_value(r, "spurious") << ", " << secs << " s";
    line(1, "raising property, W chi_n in span{chi_0..chi_{n+1}}",
         r.pass && secs <= 10.0, d.str());
  }

  // 2. closed-form expansion coefficients match measured ones to 1e-8
  {
    RunConfig c = cfg;
    c.draws = 20;
    c.n_max = 8;
    auto r = suites::run_gamma_closed<cd>(c);
    std::ostringstream d;
    d << "worst coefficient error " << worst_value(r, "coeff-match");
    line(2, "gamma closed forms match fitted coefficients", r.pass, d.str());
  }

  // 3. A^(1) correspondence: gauge identity and two-series patterns, 1e-8
  {
    RunConfig c = cfg;
    c.draws = 10;
    c.n_max = 5;
    auto r = suites::run_a1_correspondence<cd>(c);
    std::ostringstream d;
    d << "worst identity error " << worst_value(r, "coeff-identity")
      << ", worst pattern residual "
      << std::max(worst_value(r, "pattern-x"), worst_value(r, "pattern-y"));
    line(3, "A1 correspondence and two-series raising", r.pass, d.str());
  }

  // 4. AW degeneration: Richardson ratio 4 +- 0.8 between t = 100 and 200
  {
    RunConfig c = cfg;
    c.draws = 6;
    auto r = suites::run_aw_limit<cd>(c);
    line(4, "Askey-Wilson degeneration at O(t^-2)", r.pass,
         "ratios within 4 +- 0.8 at 6 z-points per draw");
  }

  // 5. classical operators: chi_1 suppression for n <= 8 and minimal leakage
  {
    RunConfig c = cfg;
    c.draws = 10;
    c.n_max = 8;
    auto r = suites::run_classical<cd>(c);
    std::ostringstream d;
    d << "worst chi_1 leakage " << worst_value(r, "skip-pole-chi1")
      << ", worst minimal leakage " << worst_value(r, "minimal-leakage");
    line(5, "classical skip-pole and minimal combination", r.pass, d.str());
  }

  report::SuiteResult gevp_split_result{"gevp-split"};
  // 6. GEVP solutions and Moebius covariance, n <= 6, 10 draws
  {
    RunConfig c = cfg;
    c.draws = 10;
    c.n_max = 6;
    gevp_split_result = suites::run_gevp_split<cd>(c);
    bool pass = all_pass(gevp_split_result, "gevp-residual") &&
                all_pass(gevp_split_result, "moebius-residual") &&
                all_pass(gevp_split_result, "split-identity") &&
                all_pass(gevp_split_result, "ratio-independence");
    std::ostringstream d;
    d << "worst GEVP residual " << worst_value(gevp_split_result, "gevp-residual")
      << ", worst Moebius residual "
      << worst_value(gevp_split_result, "moebius-residual");
    line(6, "recurrence solutions satisfy the split GEVP", pass, d.str());
  }

  // 7. series identification, kernel condition, shifted action, 1e-8
  {
    RunConfig c = cfg;
    c.draws = 10;
    c.n_max = 6;
    auto r = suites::run_series_match<cd>(c);
    std::ostringstream d;
    d << "worst ratio spread " << worst_value(r, "series-ratio-spread")
      << ", worst kernel " << std::max(worst_value(r, "kernel-branch-1"),
                                        worst_value(r, "kernel-branch-2"));
    line(7, "10B9 series equals the recurrence solution", r.pass, d.str());
  }

  // 8. finite-dimensional reduction: N = 0..6, 5 draws, residual <= 1e-6, <= 5 s
  {
    RunConfig c = cfg;
    c.draws = 5;
    c.n_max = 6;
    auto t0 = std::chrono::steady_clock::now();
    auto r = suites::run_finite_dim<cd>(c);
    double secs = seconds_since(t0);
    std::ostringstream d;
    d << "worst eigen residual " << worst_value(r, "eigen-residual") << ", " << secs
      << " s";
    line(8, "finite-dimensional reduction eigenpairs", r.pass && secs <= 5.0, d.str());
  }

  // 9. negative control: ordinary EVP residual stays above 1e-6
  {
    bool pass = true;
    double least = 1e300;
    int count = 0;
    for (const auto& row : gevp_split_result.rows) {
      if (row.check == "evp-negative-control") {
        ++count;
        least = std::min(least, row.value);
        pass = pass && row.pass;
      }
    }
    std::ostringstream d;
    d << "smallest best-lambda residual " << least << " over " << count << " trials";
    line(9, "ordinary EVP impossibility (negative control)", pass && count > 0,
         d.str());
  }

  // 10. determinism: identical reports for identical seeds (timestamp aside)
  {
    std::string f1 = "acc_det_1.csv", f2 = "acc_det_2.csv";
    std::vector<std::string> args = {"verify",  "raising", "--seed", "31415",
                                     "--draws", "4",       "--n-max", "5",
                                     "--output", f1};
    int rc1 = cli::run(args);
    args.back() = f2;
    int rc2 = cli::run(args);
    bool pass = rc1 == 0 && rc2 == 0 && strip_timestamp(f1) == strip_timestamp(f2) &&
                !strip_timestamp(f1).empty();
    std::remove(f1.c_str());
    std::remove(f2.c_str());
    line(10, "byte-identical reports for a fixed seed", pass,
         "verify raising run twice");
  }

  if (failures) std::printf("%d criterion(s) FAILED\n", failures);
  else std::printf("all 10 criteria passed\n");
  return failures == 0 ? 0 : 1;
}
