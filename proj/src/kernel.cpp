#include "spectral_lab/kernel.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace spectral_lab {

namespace {

constexpr int kCdfCells = 4096;

double horner(const std::vector<double>& p, double x) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double raw_bump(double x) {
  if (!(std::abs(x) < 1.0)) return 0.0;
  const double u = (1.0 - x) * (1.0 + x);
  return std::exp(-1.0 / u);
}

// P_{j+1} = u^2 P_j' + ((4j - 2) x - 4j x^3) P_j with u = 1 - x^2.
std::vector<double> next_poly(const std::vector<double>& p, int j) {
  std::vector<double> out(p.size() + 3, 0.0);
  for (std::size_t k = 1; k < p.size(); ++k) {
    const double d = static_cast<double>(k) * p[k];  // coefficient of x^{k-1} in P'
    out[k - 1] += d;
    out[k + 1] -= 2.0 * d;
    out[k + 3] += d;
  }
  for (std::size_t k = 0; k < p.size(); ++k) {
    out[k + 1] += (4.0 * j - 2.0) * p[k];
    out[k + 3] -= 4.0 * j * p[k];
  }
  while (out.size() > 1 && out.back() == 0.0) out.pop_back();
  return out;
}

}  // namespace

const Kernel& Kernel::instance() {
  static const Kernel k;
  return k;
}

Kernel::Kernel() {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double mass = ts.integrate(raw_bump, -1.0, 1.0, 1e-15);
  c_ = 1.0 / mass;

  poly_.push_back({1.0});
  for (int j = 0; j <= kMaxOrder; ++j) poly_.push_back(next_poly(poly_.back(), j));

  // Cumulative table on the left half; the right half follows by symmetry.
  cdf_step_ = 2.0 / kCdfCells;
  cdf_table_.assign(kCdfCells + 1, 0.0);
  double running = 0.0, comp = 0.0;
  for (int i = 0; i < kCdfCells / 2; ++i) {
    const double a = -1.0 + i * cdf_step_;
    const double piece =
        c_ * boost::math::quadrature::gauss<double, 20>::integrate(raw_bump, a, a + cdf_step_);
    const double y = piece - comp;
    const double t = running + y;
    comp = (t - running) - y;
    running = t;
    cdf_table_[i + 1] = running;
  }
  // Pin the midpoint; the half-mass differs from 1/2 only by quadrature error.
  const double half = cdf_table_[kCdfCells / 2];
  for (int i = 0; i <= kCdfCells / 2; ++i) cdf_table_[i] *= 0.5 / half;
  for (int i = 0; i < kCdfCells / 2; ++i) cdf_table_[kCdfCells - i] = 1.0 - cdf_table_[i];

  const int top = kMaxOrder + 1;
  std::vector<double> buf(top + 1);
  const int samples = 200001;
  for (int s = 1; s < samples - 1; ++s) {
    const double x = -1.0 + 2.0 * s / (samples - 1);
    eval_all(x, top, buf.data());
    for (int j = 0; j <= top; ++j) sup_[j] = std::max(sup_[j], std::abs(buf[j]));
  }

  for (int k = 0; k < kMoments; ++k) {
    const int power = 2 * k;
    moments_[k] = c_ * ts.integrate([power](double x) { return std::pow(x, power) * raw_bump(x); }, -1.0, 1.0, 1e-15);
  }
}

void Kernel::eval_all(double x, int J, double* out) const {
  if (J < 0 || J >= static_cast<int>(poly_.size())) throw std::invalid_argument("kernel derivative order out of range");
  if (!(std::abs(x) < 1.0)) {
    for (int j = 0; j <= J; ++j) out[j] = 0.0;
    return;
  }
  const double u = (1.0 - x) * (1.0 + x);
  const double r = 1.0 / (u * u);
  double t = c_ * std::exp(-1.0 / u);
  for (int j = 0; j <= J; ++j) {
    out[j] = t == 0.0 ? 0.0 : horner(poly_[j], x) * t;
    t *= r;
  }
}

double Kernel::eval(double x, int j) const {
  if (j < 0 || j >= static_cast<int>(poly_.size())) throw std::invalid_argument("kernel derivative order out of range");
  if (!(std::abs(x) < 1.0)) return 0.0;
  const double u = (1.0 - x) * (1.0 + x);
  const double e = -1.0 / u - 2.0 * j * std::log(u);
  return c_ * horner(poly_[j], x) * std::exp(e);
}

double Kernel::cdf(double x) const {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double pos = (x + 1.0) / cdf_step_;
  const int i = std::min(static_cast<int>(pos), kCdfCells - 1);
  const double t = pos - i;
  const double x0 = -1.0 + i * cdf_step_;
  const double y0 = cdf_table_[i], y1 = cdf_table_[i + 1];
  const double d0 = eval(x0) * cdf_step_, d1 = eval(x0 + cdf_step_) * cdf_step_;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1;
}

double Kernel::cdf_exact(double x) const {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > 0.0) return 1.0 - cdf_exact(-x);
  const double c = c_;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate([c](double y) { return c * raw_bump(y); },
                                                                      -1.0, x, 15, 1e-15);
}

double Kernel::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("kernel quantile needs p in (0, 1)");
  if (p == 0.5) return 0.0;
  if (p > 0.5) return -quantile(1.0 - p);
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve([&](double x) { return cdf_exact(x) - p; }, -1.0, 0.0,
                                                          -p, 0.5 - p, boost::math::tools::eps_tolerance<double>(52),
                                                          iters);
  return 0.5 * (lo + hi);
}

double kernel_eval(double eps, double x, int j) {
  if (!(eps > 0.0)) throw std::invalid_argument("kernel width eps must be positive");
  if (j < 0 || j > Kernel::kMaxOrder) throw std::invalid_argument("kernel derivative order out of range");
  return std::pow(eps, -1.0 - j) * Kernel::instance().eval(x / eps, j);
}

}  // namespace spectral_lab
