#include "spectral_lab/cocycle.hpp"

#include "spectral_lab/numeric.hpp"
#include "spectral_lab/operator.hpp"
#include "spectral_lab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectral_lab {

double Mat2::frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }

double Mat2::spectral_norm() const {
  const double s = std::hypot(a + d, b - c);
  const double t = std::hypot(a - d, b + c);
  return 0.5 * (s + t);
}

Mat2 operator*(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

double ScaledProduct::log_norm() const { return std::log(m.spectral_norm()) + log_scale; }

double ScaledProduct::log_abs_det() const { return log_det; }

namespace {

// Running product Q R: Q a rotation with first column (qc, qs), R upper
// triangular and stored relative to r11 as [[1, t], [0, s]]. Each step
// re-triangularises A Q with one Givens rotation.
struct QrState {
  double qc = 1.0, qs = 0.0;
  double t = 0.0, s = 1.0;
  double r11 = 1.0;  // pending factor of r11, folded into log_r11 periodically
  double det = 1.0;  // product of det(R'), one factor per step, each ~1
  double log_r11 = 0.0;
  int since = 0;

  void step(double E, double v) {
    const double tau = E - v;
    const double x1 = tau * qc - qs, x2 = qc;
    const double y1 = -tau * qs - qc, y2 = -qs;
    const double rho = std::sqrt(x1 * x1 + x2 * x2);
    const double inv = 1.0 / rho;
    const double nc = x1 * inv, ns = x2 * inv;
    const double r12 = nc * y1 + ns * y2;
    const double r22 = nc * y2 - ns * y1;
    t += r12 * inv * s;
    s *= r22 * inv;
    qc = nc;
    qs = ns;
    r11 *= rho;
    det *= rho * r22;
    if (++since == ScaledProduct::kRescaleEvery) {
      log_r11 += std::log(r11);
      r11 = 1.0;
      since = 0;
    }
  }

  ScaledProduct result() const {
    ScaledProduct p;
    p.m = {qc, qc * t - qs * s, qs, qs * t + qc * s};
    p.log_scale = log_r11 + std::log(r11);
    p.log_det = std::log(std::abs(det));
    return p;
  }

  double log_norm() const {
    const Mat2 m{qc, qc * t - qs * s, qs, qs * t + qc * s};
    return std::log(m.spectral_norm()) + log_r11 + std::log(r11);
  }
};

}  // namespace

ScaledProduct cocycle_product(std::span<const double> potential, double E) {
  QrState q;
  for (double v : potential) q.step(E, v);
  return q.result();
}

double cocycle_lognorm(std::span<const double> potential, double E) {
  if (potential.empty()) throw std::invalid_argument("cocycle needs n >= 1");
  return cocycle_product(potential, E).log_norm() / static_cast<double>(potential.size());
}

double cocycle_lognorm(const ComposedSampler& v, const BaseSystem& system, double E, double omega, std::size_t n) {
  const std::vector<double> window = potential_window(v, system, omega, n);
  return cocycle_lognorm(window, E);
}

LyapunovEstimate lyapunov(const ComposedSampler& v, const BaseSystem& system, double E, std::size_t n, std::size_t M,
                          std::uint64_t seed) {
  const double energies[] = {E};
  return lyapunov_curve(v, system, energies, n, M, seed).front();
}

std::vector<LyapunovEstimate> lyapunov_curve(const ComposedSampler& v, const BaseSystem& system,
                                             std::span<const double> energies, std::size_t n, std::size_t M,
                                             std::uint64_t seed) {
  if (n < 100 || M < 1) throw std::invalid_argument("lyapunov needs n >= 100 and M >= 1");
  const std::vector<double> omegas = sample_base_points(M, seed);
  std::vector<std::vector<double>> windows(M);
  parallel_for(M, [&](std::size_t i) { windows[i] = potential_window(v, system, omegas[i], n); });

  std::vector<LyapunovEstimate> out(energies.size());
  parallel_for(energies.size(), [&](std::size_t e) {
    std::vector<double> samples(M);
    for (std::size_t i = 0; i < M; ++i) samples[i] = cocycle_lognorm(windows[i], energies[e]);
    const MeanStderr ms = mean_and_stderr(samples);
    out[e] = {ms.mean, ms.stderr_};
  });
  return out;
}

std::vector<double> equispaced_omega_grid(std::size_t size) {
  std::vector<double> g(size);
  for (std::size_t i = 0; i < size; ++i) g[i] = static_cast<double>(i) / static_cast<double>(size);
  return g;
}

std::vector<CocycleStats> uniformity_probe(const ComposedSampler& v, const BaseSystem& system, double E,
                                           std::span<const std::size_t> n_list, std::span<const double> omega_grid) {
  if (omega_grid.empty()) throw std::invalid_argument("probe grid must be nonempty");
  if (n_list.empty()) throw std::invalid_argument("probe needs at least one length");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw std::invalid_argument("probe lengths must be >= 1");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw std::invalid_argument("probe lengths must be increasing");
  }
  const std::size_t n_max = n_list.back();
  const std::size_t G = omega_grid.size();
  std::vector<std::vector<double>> values(n_list.size(), std::vector<double>(G));

  parallel_for(G, [&](std::size_t g) {
    const std::vector<double> window = potential_window(v, system, omega_grid[g], n_max);
    QrState q;
    std::size_t next = 0;
    for (std::size_t j = 0; j < n_max; ++j) {
      q.step(E, window[j]);
      if (j + 1 == n_list[next]) {
        values[next][g] = q.log_norm() / static_cast<double>(j + 1);
        ++next;
      }
    }
  });

  std::vector<CocycleStats> out;
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    CocycleStats s;
    s.E = E;
    s.n = n_list[k];
    s.values = std::move(values[k]);
    const auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
    s.min = *mn;
    s.max = *mx;
    const MeanStderr ms = mean_and_stderr(s.values);
    s.stderr_ = ms.stderr_;
    // The mean of equal values can differ from them in the last ulp.
    s.mean = std::clamp(ms.mean, s.min, s.max);
    s.L_hat = s.mean;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace spectral_lab
