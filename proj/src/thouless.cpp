#include "spectral_lab/thouless.hpp"

#include "spectral_lab/kernel.hpp"
#include "spectral_lab/parallel.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectral_lab {

namespace {

struct Rule {
  std::vector<double> x, w;
};

const Rule& gauss_legendre_129() {
  static const Rule rule = [] {
    const int n = 129;
    Rule r;
    for (double z : boost::math::legendre_p_zeros<double>(n)) {
      const double dp = boost::math::legendre_p_prime<double>(n, z);
      const double w = 2.0 / ((1.0 - z * z) * dp * dp);
      r.x.push_back(z);
      r.w.push_back(w);
      if (z != 0.0) {
        r.x.push_back(-z);
        r.w.push_back(w);
      }
    }
    return r;
  }();
  return rule;
}

double xlogx(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

double half_square_log(double t) { return t == 0.0 ? 0.0 : 0.5 * t * t * std::log(std::abs(t)) - 0.25 * t * t; }

// out[j] = int_{-1}^{1} s^{(j)}(y) log|z - y| dy for j = 0..J. Inside the
// support the first-order Taylor polynomial of s^{(j)} at z is subtracted and
// integrated exactly, leaving a (y - z)^2 log|y - z| remainder for the rule.
void log_moments(double z, int J, double* out) {
  const Kernel& kernel = Kernel::instance();
  const Rule& rule = gauss_legendre_129();
  std::vector<double> s(J + 1), sz(J + 2, 0.0);
  std::fill(out, out + J + 1, 0.0);

  auto piece = [&](double a, double b, bool subtract) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t k = 0; k < rule.x.size(); ++k) {
      const double y = mid + half * rule.x[k];
      kernel.eval_all(y, J, s.data());
      const double lg = std::log(std::abs(z - y)) * rule.w[k] * half;
      for (int j = 0; j <= J; ++j) out[j] += (subtract ? s[j] - sz[j] - sz[j + 1] * (y - z) : s[j]) * lg;
    }
  };

  if (std::abs(z) >= 1.0) {
    piece(-1.0, 1.0, false);
    return;
  }
  kernel.eval_all(z, J + 1, sz.data());
  piece(-1.0, z, true);
  piece(z, 1.0, true);
  const double flat = xlogx(1.0 + z) + xlogx(1.0 - z) - 2.0;  // int log|z - y| dy over [-1, 1]
  const double linear = half_square_log(1.0 - z) - half_square_log(-1.0 - z);  // int (y - z) log|z - y| dy
  for (int j = 0; j <= J; ++j) out[j] += sz[j] * flat + sz[j + 1] * linear;
}

// I(z) = int s(y) log|z - y| dy, even in z, tabulated on [0, kFar] with its
// derivative for cubic Hermite interpolation; far field from the moments.
class LogProfile {
 public:
  static constexpr double kFar = 64.0;
  static constexpr int kPerUnit = 512;

  static const LogProfile& instance() {
    static const LogProfile p;
    return p;
  }

  double operator()(double z) const {
    const double a = std::abs(z);
    if (a >= kFar) {
      const Kernel& k = Kernel::instance();
      const double inv2 = 1.0 / (a * a);
      double tail = 0.0, p = 1.0;
      for (int m = 1; m <= 3; ++m) {
        p *= inv2;
        tail += k.even_moment(2 * m) * p / (2.0 * m);
      }
      return std::log(a) - tail;
    }
    const double pos = a * kPerUnit;
    const std::size_t i = std::min(static_cast<std::size_t>(pos), value_.size() - 2);
    const double t = pos - static_cast<double>(i);
    const double h = 1.0 / kPerUnit;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * value_[i] + (t3 - 2 * t2 + t) * slope_[i] * h + (-2 * t3 + 3 * t2) * value_[i + 1] +
           (t3 - t2) * slope_[i + 1] * h;
  }

 private:
  LogProfile() {
    const std::size_t n = static_cast<std::size_t>(kFar * kPerUnit) + 1;
    value_.resize(n);
    slope_.resize(n);
    parallel_for(n, [&](std::size_t i) {
      double m[2];
      log_moments(static_cast<double>(i) / kPerUnit, 1, m);
      value_[i] = m[0];
      slope_[i] = m[1];
    });
  }

  std::vector<double> value_, slope_;
};

// int_{-d}^{d} log|c + u| du and int_{-d}^{d} u log|c + u| du.
void segment_moments(double c, double d, double& g0, double& g1) {
  if (std::abs(c) >= 8.0 * d) {
    const double r = d / c;
    const double r2 = r * r;
    double s0 = 0.0, s1 = 0.0, p = 1.0;
    for (int k = 2; k <= 16; k += 2) {
      p *= r2;  // r^k
      s0 += p / (k * (k + 1.0));
      s1 += (p / r) / ((k - 1.0) * (k + 1.0));  // odd power k-1
    }
    g0 = 2.0 * d * std::log(std::abs(c)) - 2.0 * d * s0;
    g1 = 2.0 * d * d * s1;
    return;
  }
  auto F0 = [](double t) { return xlogx(std::abs(t)) * (t < 0 ? -1.0 : 1.0) - t; };
  g0 = F0(c + d) - F0(c - d);
  g1 = half_square_log(c + d) - half_square_log(c - d) - c * g0;
}

}  // namespace

LogPotential log_potential(const EmpiricalMeasure& nu, double E) {
  if (!std::isfinite(E)) throw std::invalid_argument("log potential needs a finite energy");
  const double scale = std::max(1.0, std::abs(E));
  const double near = 1e-13 * scale, nudge = 1e-12 * scale;
  const auto& a = nu.atoms();
  const auto& w = nu.weights();
  LogPotential out;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = std::abs(a[i] - E);
    if (d < near) {
      d = nudge;
      out.nudged = true;
    }
    sum += w[i] * std::log(d);
  }
  out.value = sum;
  return out;
}

LogPotentialCurve thouless_curve(const EmpiricalMeasure& nu, const Grid& grid) {
  LogPotentialCurve out;
  out.curve.grid = grid;
  out.curve.values.assign(grid.size, 0.0);
  std::vector<char> flags(grid.size, 0);
  parallel_for(grid.size, [&](std::size_t g) {
    const LogPotential lp = log_potential(nu, grid.x(g));
    out.curve.values[g] = lp.value;
    flags[g] = lp.nudged ? 1 : 0;
  });
  out.nudged.assign(flags.begin(), flags.end());
  out.nudged_count = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
  return out;
}

double kernel_log_moment(double z, int j) {
  if (j < 0 || j > Kernel::kMaxOrder) throw std::invalid_argument("kernel derivative order out of range");
  std::vector<double> out(j + 1);
  log_moments(z, j, out.data());
  return out[j];
}

SmoothedIdentity smoothed_le_identity(const EmpiricalMeasure& nu, double eps, const Grid& grid, int J) {
  if (!(eps > 0.0)) throw std::invalid_argument("smoothing width must be positive");
  if (J < 0 || J > Kernel::kMaxOrder) throw std::invalid_argument("derivative order out of range");
  SmoothedIdentity res;
  for (DensityCurve* c : {&res.lhs, &res.rhs}) {
    c->grid = grid;
    c->J = J;
    c->values.assign(grid.size, 0.0);
    c->derivs.assign(static_cast<std::size_t>(J), std::vector<double>(grid.size, 0.0));
  }
  const auto& a = nu.atoms();
  const auto& w = nu.weights();
  const double log_eps = std::log(eps);

  // Energy smoothing of the log-potential, atom by atom.
  parallel_for(grid.size, [&](std::size_t g) {
    const double E = grid.x(g);
    std::vector<double> acc(J + 1, 0.0), m(J + 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
      log_moments((E - a[i]) / eps, J, m.data());
      for (int j = 0; j <= J; ++j) acc[j] += w[i] * m[j];
    }
    res.lhs.values[g] = acc[0] + log_eps;
    for (int j = 1; j <= J; ++j) res.lhs.derivs[j - 1][g] = acc[j] * std::pow(eps, -j);
  });

  // Log-potential of the smoothed density, by product integration.
  const Grid fine(nu.min_atom() - eps, nu.max_atom() + eps, 10000);
  const DensityCurve f = mollify(nu, eps, fine, J);
  const double d = 0.5 * fine.spacing();
  parallel_for(grid.size, [&](std::size_t g) {
    const double E = grid.x(g);
    std::vector<double> acc(J + 1, 0.0);
    for (std::size_t k = 0; k + 1 < fine.size; ++k) {
      const double mid = 0.5 * (fine.x(k) + fine.x(k + 1));
      double g0, g1;
      segment_moments(mid - E, d, g0, g1);
      for (int j = 0; j <= J; ++j) {
        const auto& fj = f.order(j);
        const double mean = 0.5 * (fj[k] + fj[k + 1]);
        const double slope = (fj[k + 1] - fj[k]) / (2.0 * d);
        acc[j] += mean * g0 + slope * g1;
      }
    }
    res.rhs.values[g] = acc[0];
    for (int j = 1; j <= J; ++j) res.rhs.derivs[j - 1][g] = acc[j];
  });

  for (std::size_t g = 0; g < grid.size; ++g)
    res.sup_gap = std::max(res.sup_gap, std::abs(res.lhs.values[g] - res.rhs.values[g]));
  return res;
}

DensityCurve smoothed_log_potential(const EmpiricalMeasure& nu, double eps, const Grid& grid) {
  if (!(eps > 0.0)) throw std::invalid_argument("smoothing width must be positive");
  const LogProfile& profile = LogProfile::instance();
  const auto& a = nu.atoms();
  const auto& w = nu.weights();
  DensityCurve out;
  out.grid = grid;
  out.values.assign(grid.size, 0.0);
  const double log_eps = std::log(eps), inv = 1.0 / eps;
  parallel_for(grid.size, [&](std::size_t g) {
    const double E = grid.x(g);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += w[i] * profile((E - a[i]) * inv);
    out.values[g] = acc + log_eps;
  });
  return out;
}

}  // namespace spectral_lab
