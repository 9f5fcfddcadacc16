#pragma once

#include <array>
#include <vector>

namespace spectral_lab {

// The fixed mollifier s(x) = c exp(-1 / (1 - x^2)) on (-1, 1), zero outside,
// normalised to unit mass. Process-wide singleton; built on first use.
class Kernel {
 public:
  // Highest derivative order available from eval(). sup_derivative() goes
  // one order higher so Lipschitz constants of order-kMaxOrder derivatives
  // are available too.
  static constexpr int kMaxOrder = 16;

  static const Kernel& instance();

  double normalization() const { return c_; }
  // Integral of exp(-1/(1-x^2)) over (-1, 1).
  double raw_mass() const { return 1.0 / c_; }

  // s^{(j)}(x).
  double eval(double x, int j = 0) const;
  // s^{(0..J)}(x) into out[0..J].
  void eval_all(double x, int J, double* out) const;

  // Cumulative integral of s from -1 to x, from a Hermite table.
  double cdf(double x) const;
  // Same by adaptive quadrature; slow.
  double cdf_exact(double x) const;
  // x with cdf_exact(x) = p, for p in (0, 1).
  double quantile(double p) const;

  // max over [-1, 1] of |s^{(j)}|, j <= kMaxOrder + 1, sampled on 2e5 points.
  double sup_derivative(int j) const { return sup_.at(static_cast<std::size_t>(j)); }

  // Even moments int y^k s(y) dy, k = 0, 2, ..., 2 * (kMoments - 1).
  static constexpr int kMoments = 8;
  double even_moment(int k) const { return moments_.at(static_cast<std::size_t>(k / 2)); }

 private:
  Kernel();

  double c_ = 0.0;
  // P_j as coefficient vectors in x, lowest power first; s^{(j)} = c P_j u^{-2j} e^{-1/u}, u = 1 - x^2.
  std::vector<std::vector<double>> poly_;
  std::vector<double> cdf_table_;
  double cdf_step_ = 0.0;
  std::array<double, kMaxOrder + 2> sup_{};
  std::array<double, kMoments> moments_{};
};

// s_eps^{(j)}(x) = eps^{-1-j} s^{(j)}(x / eps).
double kernel_eval(double eps, double x, int j = 0);

}  // namespace spectral_lab
