#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner. None of these call into the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

// Characteristic polynomial of the Jacobi matrix with diagonal d and unit
// off-diagonal, coefficients lowest power first, by the three-term recurrence
// p_k(x) = (x - d_k) p_{k-1}(x) - p_{k-2}(x).
inline std::vector<long double> charpoly(const std::vector<double>& d) {
  std::vector<long double> prev{1.0L}, cur{static_cast<long double>(-d[0]), 1.0L};
  for (std::size_t k = 1; k < d.size(); ++k) {
    std::vector<long double> next(cur.size() + 1, 0.0L);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      next[i + 1] += cur[i];
      next[i] -= d[k] * cur[i];
    }
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

template <class T>
T horner(const std::vector<long double>& c, T x) {
  T r = 0;
  for (std::size_t i = c.size(); i-- > 0;) r = r * x + T(c[i]);
  return r;
}

// Real roots of a monic polynomial with only real roots: Aberth iteration in
// complex long double, then Newton polishing of the real parts.
inline std::vector<double> real_roots(const std::vector<long double>& c) {
  using C = std::complex<long double>;
  const std::size_t n = c.size() - 1;
  std::vector<long double> dc(n);
  for (std::size_t i = 1; i <= n; ++i) dc[i - 1] = c[i] * static_cast<long double>(i);
  long double bound = 0;
  for (std::size_t i = 0; i < n; ++i) bound = std::max(bound, std::abs(c[i]));
  bound += 1;
  std::vector<C> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::polar(bound, 0.4L + 6.283185307179586L * i / n);
  for (int it = 0; it < 500; ++it) {
    long double move = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const C ratio = horner(c, z[i]) / horner(dc, z[i]);
      C s = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) s += 1.0L / (z[i] - z[j]);
      const C w = ratio / (1.0L - ratio * s);
      z[i] -= w;
      move = std::max(move, std::abs(w));
    }
    if (move < 1e-18L) break;
  }
  std::vector<double> out;
  for (const C& r : z) {
    long double x = r.real();
    for (int k = 0; k < 4; ++k) {
      const long double d = horner(dc, x);
      if (d == 0) break;
      x -= horner(c, x) / d;
    }
    out.push_back(static_cast<double>(x));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Free Dirichlet chain of length n: 2 cos(k pi / (n + 1)), ascending.
inline std::vector<double> free_chain(std::size_t n) {
  std::vector<double> out;
  for (std::size_t k = n; k >= 1; --k) out.push_back(2.0 * std::cos(k * M_PI / (n + 1)));
  return out;
}

// IDS of the free Laplacian on Z.
inline double free_ids(double E) {
  if (E <= -2.0) return 0.0;
  if (E >= 2.0) return 1.0;
  return 1.0 - std::acos(E / 2.0) / M_PI;
}

// Lyapunov exponent of the constant cocycle [[E, -1], [1, 0]].
inline double constant_lyapunov(double E) {
  const double a = std::abs(E);
  return a <= 2.0 ? 0.0 : std::log((a + std::sqrt(a * a - 4.0)) / 2.0);
}

// s_eps(x) with the normalising constant computed to 20 digits offline.
inline constexpr double kBumpNormalization = 2.2522836210435810105;
inline double bump(double eps, double x) {
  const double u = x / eps;
  if (std::abs(u) >= 1.0) return 0.0;
  return kBumpNormalization * std::exp(-1.0 / (1.0 - u * u)) / eps;
}

// Wasserstein-1 distance of two atomic measures on R, as the integral of
// |F - G| over the merged atom set.
inline double wasserstein1(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> xs;
  for (auto& p : a) xs.push_back(p.first);
  for (auto& p : b) xs.push_back(p.first);
  std::sort(xs.begin(), xs.end());
  double F = 0, G = 0, w = 0;
  std::size_t i = 0, j = 0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    while (i < a.size() && a[i].first <= xs[k]) F += a[i++].second;
    while (j < b.size() && b[j].first <= xs[k]) G += b[j++].second;
    w += std::abs(F - G) * (xs[k + 1] - xs[k]);
  }
  return w;
}

}  // namespace oracle
