#pragma once

#include "spectral_lab/dynamics.hpp"
#include "spectral_lab/sampler.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace spectral_lab {

struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }
  double frobenius() const;
  // Largest singular value, closed form.
  double spectral_norm() const;
  Mat2 scaled(double s) const { return {a * s, b * s, c * s, d * s}; }
  bool operator==(const Mat2&) const = default;
};

Mat2 operator*(const Mat2& x, const Mat2& y);

// One-step transfer matrix [[E - v, -1], [1, 0]].
inline Mat2 transfer(double E, double v) { return {E - v, -1.0, 1.0, 0.0}; }

// Product matrix as exp(log_scale) * m, accumulated in QR form so that no
// entry overflows and log|det| stays accurate for hyperbolic products (the
// determinant of m itself cancels badly there).
struct ScaledProduct {
  static constexpr int kRescaleEvery = 32;

  Mat2 m;
  double log_scale = 0.0;
  double log_det = 0.0;  // sum of per-step log|det|, ~0 up to rounding

  double log_norm() const;
  double log_abs_det() const;
};

// A_E(T^{n-1} w) ... A_E(w) for the potential values V(0..n-1) of one window.
ScaledProduct cocycle_product(std::span<const double> potential, double E);

// (1/n) log ||A_E^n(omega)||, >= 0 up to rounding.
double cocycle_lognorm(std::span<const double> potential, double E);
double cocycle_lognorm(const ComposedSampler& v, const BaseSystem& system, double E, double omega, std::size_t n);

struct LyapunovEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

// Mean of cocycle_lognorm over M base points drawn from mu with `seed`.
LyapunovEstimate lyapunov(const ComposedSampler& v, const BaseSystem& system, double E, std::size_t n, std::size_t M,
                          std::uint64_t seed);

// lyapunov() at many energies; the M potential windows are generated once.
std::vector<LyapunovEstimate> lyapunov_curve(const ComposedSampler& v, const BaseSystem& system,
                                             std::span<const double> energies, std::size_t n, std::size_t M,
                                             std::uint64_t seed);

struct CocycleStats {
  double E = 0.0;
  std::size_t n = 0;
  std::vector<double> values;  // (1/n) log ||A_E^n(omega)|| per grid point
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double L_hat = 0.0;  // grid mean, the estimate of L(E) at scale n

  // Finite-scale non-uniformity: how far the worst base point lags the mean.
  double gap() const { return L_hat - min; }
};

// omega_i = i / size, i = 0 .. size-1.
std::vector<double> equispaced_omega_grid(std::size_t size);

// For each n in n_list (strictly increasing), cocycle_lognorm at every grid
// point, summarised. One pass per base point covers all n.
std::vector<CocycleStats> uniformity_probe(const ComposedSampler& v, const BaseSystem& system, double E,
                                           std::span<const std::size_t> n_list, std::span<const double> omega_grid);

}  // namespace spectral_lab
