#pragma once

#include <vector>

#include "ratheun/types.hpp"

namespace ratheun {

template <class C>
using Matrix = std::vector<std::vector<C>>;

template <class C>
struct LinearSolve {
  std::vector<C> x;
  double conditioning = 0.0;  // max|U_ii| / min|U_ii| from the LU factors
};

/// Dense LU solve with partial pivoting. Throws singular_system_error when a
/// pivot underflows relative to the matrix scale.
template <class C>
LinearSolve<C> lu_solve(Matrix<C> A, std::vector<C> b) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (auto& row : A)
    for (auto& v : row) scale = std::max(scale, abs_d(v));
  if (scale == 0.0) throw singular_system_error("lu_solve: zero matrix");

  double umax = 0.0, umin = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = abs_d(A[k][k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      double m = abs_d(A[i][k]);
      if (m > best) { best = m; piv = i; }
    }
    if (best < 1e-300 * scale)
      throw singular_system_error("lu_solve: singular pivot");
    if (piv != k) { std::swap(A[k], A[piv]); std::swap(b[k], b[piv]); }
    umax = std::max(umax, best);
    umin = (k == 0) ? best : std::min(umin, best);
    for (std::size_t i = k + 1; i < n; ++i) {
      C m = A[i][k] / A[k][k];
      A[i][k] = C(0);
      for (std::size_t j = k + 1; j < n; ++j) A[i][j] -= m * A[k][j];
      b[i] -= m * b[k];
    }
  }
  LinearSolve<C> out;
  out.x.resize(n);
  for (std::size_t ii = n; ii-- > 0;) {
    C s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= A[ii][j] * out.x[j];
    out.x[ii] = s / A[ii][ii];
  }
  out.conditioning = (umin > 0.0) ? umax / umin : 1e308;
  return out;
}

template <class C>
std::vector<C> mat_vec(const Matrix<C>& A, const std::vector<C>& v) {
  std::vector<C> r(A.size(), C(0));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) r[i] += A[i][j] * v[j];
  return r;
}

template <class C>
Matrix<C> transpose(const Matrix<C>& A) {
  std::size_t n = A.size();
  Matrix<C> T(n, std::vector<C>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) T[i][j] = A[j][i];
  return T;
}

template <class C>
struct EigenPairs {
  std::vector<C> values;
  std::vector<std::vector<C>> vectors;  // vectors[k] belongs to values[k]
};

namespace detail {

/// Characteristic polynomial coefficients (monic, ascending) via Faddeev-LeVerrier.
template <class C>
std::vector<C> char_poly(const Matrix<C>& A) {
  const std::size_t n = A.size();
  std::vector<C> c(n + 1, C(0));
  c[n] = C(1);
  Matrix<C> B = A;
  for (std::size_t k = 1; k <= n; ++k) {
    C tr(0);
    for (std::size_t i = 0; i < n; ++i) tr += B[i][i];
    C ck = -tr / C(double(k));
    c[n - k] = ck;
    if (k == n) break;
    Matrix<C> tmp = B;
    for (std::size_t i = 0; i < n; ++i) tmp[i][i] += ck;
    Matrix<C> nb(n, std::vector<C>(n, C(0)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        C s(0);
        for (std::size_t l = 0; l < n; ++l) s += A[i][l] * tmp[l][j];
        nb[i][j] = s;
      }
    B = std::move(nb);
  }
  return c;
}

/// Durand-Kerner root finder for a monic polynomial (ascending coefficients).
template <class C>
std::vector<C> poly_roots(const std::vector<C>& coeff) {
  const std::size_t deg = coeff.size() - 1;
  double scale = 0.0;
  for (std::size_t k = 0; k < deg; ++k)
    scale = std::max(scale, std::pow(abs_d(coeff[k]), 1.0 / double(deg - k)));
  if (scale == 0.0) scale = 1.0;
  std::vector<C> r(deg);
  for (std::size_t i = 0; i < deg; ++i) {
    double th = 2.0 * M_PI * double(i) / double(deg) + 0.4;
    r[i] = complex_traits<C>::make(1.3 * scale * std::cos(th),
                                   1.3 * scale * std::sin(th));
  }
  auto eval = [&](const C& z) {
    C v(0);
    for (std::size_t k = coeff.size(); k-- > 0;) v = v * z + coeff[k];
    return v;
  };
  for (int it = 0; it < 600; ++it) {
    double worst = 0.0;
    for (std::size_t i = 0; i < deg; ++i) {
      C den(1);
      for (std::size_t j = 0; j < deg; ++j)
        if (j != i) den *= (r[i] - r[j]);
      if (abs_d(den) == 0.0) { den = complex_traits<C>::make(1e-30); }
      C delta = eval(r[i]) / den;
      r[i] -= delta;
      worst = std::max(worst, abs_d(delta) / (1.0 + abs_d(r[i])));
    }
    if (worst < 1e-15) break;
  }
  return r;
}

}  // namespace detail

/// Eigenvalues and eigenvectors of a small dense complex matrix.
/// Roots of the characteristic polynomial, then inverse iteration per root
/// with a least-squares eigenvalue polish; adequate for dimensions <= ~16.
template <class C>
EigenPairs<C> eig_dense(const Matrix<C>& A) {
  const std::size_t n = A.size();
  EigenPairs<C> out;
  if (n == 1) {
    out.values = {A[0][0]};
    out.vectors = {{C(1)}};
    return out;
  }
  out.values = detail::poly_roots(detail::char_poly(A));
  double anorm = 0.0;
  for (auto& row : A)
    for (auto& v : row) anorm = std::max(anorm, abs_d(v));

  for (std::size_t k = 0; k < n; ++k) {
    C lam = out.values[k];
    std::vector<C> v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = complex_traits<C>::make(1.0 + 0.05 * double(i), 0.3 - 0.07 * double(i));
    for (int it = 0; it < 5; ++it) {
      Matrix<C> S = A;
      double shift_eps = 1e-13 * (anorm + abs_d(lam));
      for (std::size_t i = 0; i < n; ++i)
        S[i][i] -= lam + complex_traits<C>::make(shift_eps);
      try {
        v = lu_solve(std::move(S), v).x;
      } catch (const singular_system_error&) {
        break;  // lambda is exact to working precision; keep current v
      }
      double nv = 0.0;
      for (auto& c : v) nv = std::max(nv, abs_d(c));
      for (auto& c : v) c /= complex_traits<C>::make(nv);
      // least-squares eigenvalue update: lam = <v, Av> / <v, v>
      auto av = mat_vec(A, v);
      using std::conj;
      C num(0), den(0);
      for (std::size_t i = 0; i < n; ++i) {
        num += conj(v[i]) * av[i];
        den += conj(v[i]) * v[i];
      }
      lam = num / den;
    }
    out.values[k] = lam;
    out.vectors.push_back(std::move(v));
  }
  return out;
}

}  // namespace ratheun
