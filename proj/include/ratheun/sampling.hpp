#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ratheun/numerics.hpp"

namespace ratheun {

/// Seeded random source for parameter draws and sample-point rotations.
/// All raw draws happen in double precision and are lifted into the scalar
/// type afterwards, so a seed produces identical parameters at any precision.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return dist_(gen_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double angle() { return 2.0 * M_PI * uniform(); }

  /// Sub-stream for an independent task; keyed so suites can re-derive the
  /// stream of a single draw without replaying earlier ones.
  Rng fork(std::uint64_t key) {
    std::uint64_t s = base_ ^ (key * 0x9e3779b97f4a7c15ull);
    s ^= (s >> 31);
    return Rng(s == 0 ? 1 : s);
  }

  static Rng keyed(std::uint64_t seed, std::uint64_t key) {
    Rng r(seed);
    r.base_ = seed;
    return r.fork(key);
  }

  template <class C>
  C complex_in_annulus(double rmin, double rmax) {
    double m = uniform(rmin, rmax);
    double th = angle();
    return complex_traits<C>::make(m * std::cos(th), m * std::sin(th));
  }

private:
  explicit Rng(std::uint64_t seed, int) : gen_(seed) {}
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> dist_{0.0, 1.0};
  std::uint64_t base_ = 0;
};

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Rejection rule shared by all randomized suites: any two grid points with
/// indices m != n <= max_index must be separated by at least min_sep in x.
template <class C>
bool grid_well_separated(const GridParams<C>& grid, int max_index,
                         double min_sep = 1e-3) {
  std::vector<C> xs;
  for (int n = 0; n <= max_index; ++n) {
    C zn = grid.z_at(n);
    if (std::abs(abs_d(zn) - 1.0) < 1e-6) return false;
    xs.push_back(x_of(zn));
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (abs_d(C(xs[i] - xs[j])) < min_sep) return false;
  return true;
}

/// |q| in [qmin,qmax], |alpha| in [0.5,1.5], phases arbitrary; redrawn until
/// the grid points through max_index are pairwise separated.
template <class C>
GridParams<C> draw_grid(Rng& rng, double qmin = 0.3, double qmax = 0.8,
                        int max_index = 12) {
  for (int tries = 0; tries < 1000; ++tries) {
    C q = rng.complex_in_annulus<C>(qmin, qmax);
    C alpha = rng.complex_in_annulus<C>(0.5, 1.5);
    auto grid = GridParams<C>::from_alpha_q(alpha, q);
    if (grid_well_separated(grid, max_index)) return grid;
  }
  throw degenerate_grid_error("draw_grid: no well-separated grid found");
}

/// Full epsilon draw: |eps_j| in [0.5,1.5], eta_0 and eta-tilde_0 in the same
/// annulus, grid separation enforced on the derived alpha.
template <class C>
EpsilonParams<C> draw_epsilon(Rng& rng, double qmin = 0.3, double qmax = 0.8,
                              int max_index = 12) {
  using std::sqrt;
  for (int tries = 0; tries < 1000; ++tries) {
    EpsilonParams<C> eps;
    C q = rng.complex_in_annulus<C>(qmin, qmax);
    eps.p = sqrt(q);
    for (auto& e : eps.eps) e = rng.complex_in_annulus<C>(0.5, 1.5);
    eps.eta0 = rng.complex_in_annulus<C>(0.5, 1.5);
    eps.eta_tilde0 = rng.complex_in_annulus<C>(0.5, 1.5);
    if (grid_well_separated(eps.grid(), max_index)) return eps;
  }
  throw degenerate_grid_error("draw_epsilon: no well-separated grid found");
}

/// Six epsilons for the classical family (alpha = eps_1...eps_6); the annulus
/// is kept moderate so alpha stays in a well-conditioned range.
template <class C>
std::array<C, 6> draw_eps6(Rng& rng, const C& /*p*/) {
  std::array<C, 6> e;
  for (auto& v : e) v = rng.complex_in_annulus<C>(0.75, 1.3);
  return e;
}

}  // namespace ratheun
