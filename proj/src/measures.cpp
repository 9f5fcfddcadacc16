#include "spectral_lab/measures.hpp"

#include "spectral_lab/kernel.hpp"
#include "spectral_lab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace spectral_lab {

Grid::Grid(double lo_, double hi_, std::size_t size_) : lo(lo_), hi(hi_), size(size_) {
  if (size == 0) throw std::invalid_argument("grid needs at least one point");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("grid bounds must be finite");
  if (size > 1 && !(hi > lo)) throw std::invalid_argument("grid needs hi > lo");
}

double Grid::x(std::size_t i) const {
  if (size == 1) return lo;
  if (i + 1 == size) return hi;
  return lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(size - 1));
}

std::vector<double> Grid::points() const {
  std::vector<double> p(size);
  for (std::size_t i = 0; i < size; ++i) p[i] = x(i);
  return p;
}

double DensityCurve::trapezoid_mass() const {
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * grid.spacing();
}

double DensityCurve::min_value() const { return *std::min_element(values.begin(), values.end()); }

double BandSet::min_length() const {
  if (bands.empty()) return 0.0;
  double m = bands.front().length();
  for (const auto& b : bands) m = std::min(m, b.length());
  return m;
}

double BandSet::edge_distance(double x) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& b : bands) d = std::min({d, std::abs(x - b.l), std::abs(x - b.r)});
  return d;
}

bool BandSet::contains(double x) const {
  for (const auto& b : bands)
    if (b.l <= x && x <= b.r) return true;
  return false;
}

DensityCurve mollify(const EmpiricalMeasure& nu, double eps, const Grid& grid, int J) {
  if (!(eps > 0.0)) throw std::invalid_argument("mollify needs eps > 0");
  if (J < 0 || J > Kernel::kMaxOrder) throw std::invalid_argument("mollify derivative order out of range");
  const double slack = 1e-12 * std::max({1.0, std::abs(grid.lo), std::abs(grid.hi)});
  if (grid.lo > nu.min_atom() - eps + slack || grid.hi < nu.max_atom() + eps - slack)
    throw std::invalid_argument("grid does not cover the support expanded by eps");

  const Kernel& kernel = Kernel::instance();
  const auto& atoms = nu.atoms();
  const auto& weights = nu.weights();
  DensityCurve out;
  out.grid = grid;
  out.J = J;
  out.values.assign(grid.size, 0.0);
  out.derivs.assign(static_cast<std::size_t>(J), std::vector<double>(grid.size, 0.0));

  std::vector<double> scale(J + 1);
  for (int j = 0; j <= J; ++j) scale[j] = std::pow(eps, -1.0 - j);

  parallel_for(grid.size, [&](std::size_t g) {
    const double x = grid.x(g);
    std::vector<double> acc(J + 1, 0.0), buf(J + 1);
    auto it = std::upper_bound(atoms.begin(), atoms.end(), x - eps);
    for (; it != atoms.end() && *it < x + eps; ++it) {
      const std::size_t i = static_cast<std::size_t>(it - atoms.begin());
      kernel.eval_all((x - *it) / eps, J, buf.data());
      for (int j = 0; j <= J; ++j) acc[j] += weights[i] * buf[j];
    }
    out.values[g] = acc[0] * scale[0];
    for (int j = 1; j <= J; ++j) out.derivs[j - 1][g] = acc[j] * scale[j];
  });
  return out;
}

std::vector<double> mollified_ids(const EmpiricalMeasure& nu, double eps, const Grid& grid) {
  if (!(eps > 0.0)) throw std::invalid_argument("mollify needs eps > 0");
  const Kernel& kernel = Kernel::instance();
  const auto& atoms = nu.atoms();
  const auto& weights = nu.weights();
  std::vector<double> out(grid.size);
  parallel_for(grid.size, [&](std::size_t g) {
    const double x = grid.x(g);
    double acc = nu.ids(x - eps);
    auto it = std::upper_bound(atoms.begin(), atoms.end(), x - eps);
    for (; it != atoms.end() && *it < x + eps; ++it)
      acc += weights[static_cast<std::size_t>(it - atoms.begin())] * kernel.cdf((x - *it) / eps);
    out[g] = acc;
  });
  return out;
}

double cinf_dist(const DensityCurve& f, const DensityCurve& g, int J) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("cinf_dist needs identical grids");
  if (J < 0 || J > f.J || J > g.J) throw std::invalid_argument("cinf_dist order exceeds the curves' derivatives");
  double total = 0.0;
  for (int j = 0; j <= J; ++j) {
    const auto& a = f.order(j);
    const auto& b = g.order(j);
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    total += std::ldexp(std::min(m, 1.0), -j);
  }
  return total;
}

double mollifier_lipschitz(double eps, int J) {
  if (!(eps > 0.0)) throw std::invalid_argument("mollifier width must be positive");
  const Kernel& kernel = Kernel::instance();
  double total = 0.0;
  for (int j = 0; j <= J; ++j) total += std::ldexp(std::pow(eps, -2.0 - j) * kernel.sup_derivative(j + 1), -j);
  return total;
}

BandSet support_bands(const EmpiricalMeasure& nu, double gap_tol, double weight_tol) {
  if (!(gap_tol > 0.0)) throw std::invalid_argument("support_bands needs gap_tol > 0");
  const auto& a = nu.atoms();
  const auto& w = nu.weights();
  const std::size_t n = a.size();

  // Fine clusters first; light ones are boundary artefacts, not spectrum.
  const double fine = gap_tol / kFineDivisor;
  std::vector<std::size_t> kept;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    double mass = w[start];
    while (end < n && a[end] - a[end - 1] < fine) mass += w[end++];
    if (mass > weight_tol)
      for (std::size_t i = start; i < end; ++i) kept.push_back(i);
    start = end;
  }

  BandSet out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const double x = a[kept[i]];
    if (i > 0 && x - a[kept[i - 1]] < gap_tol)
      out.bands.back().r = x;
    else
      out.bands.push_back({x, x});
  }
  return out;
}

BandSet smoothed_support(const EmpiricalMeasure& nu, double eps, double weight_tol) {
  const BandSet core = support_bands(nu, 2.0 * eps, weight_tol);
  BandSet out;
  for (const auto& b : core.bands) {
    const Band wide{b.l - eps, b.r + eps};
    if (!out.bands.empty() && wide.l <= out.bands.back().r)
      out.bands.back().r = wide.r;
    else
      out.bands.push_back(wide);
  }
  return out;
}

WeakStarResult weak_star_diag(const std::vector<EmpiricalMeasure>& nu_seq, const EmpiricalMeasure& nu_limit,
                              const Grid& grid, int J, WeakStarOptions options) {
  if (nu_seq.empty()) throw std::invalid_argument("weak_star_diag needs a nonempty sequence");
  auto& cands = options.eps_candidates;
  if (cands.empty())
    for (int k = 0; k <= 12; ++k) cands.push_back(std::pow(2.0, -0.5 * k));
  std::sort(cands.begin(), cands.end(), std::greater<>());

  std::vector<DensityCurve> limit_curves;
  for (double e : cands) limit_curves.push_back(mollify(nu_limit, e, grid, J));
  const DensityCurve reference = options.reference ? *options.reference : limit_curves.back();

  std::map<std::pair<std::size_t, double>, DensityCurve> cache;
  auto seq_curve = [&](std::size_t n, double e) -> const DensityCurve& {
    auto key = std::make_pair(n, e);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, mollify(nu_seq[n], e, grid, J)).first;
    return it->second;
  };

  WeakStarResult res;
  res.ok = true;
  const std::size_t N = nu_seq.size();
  for (int m = 1; m <= options.m_max; ++m) {
    const double bound = 1.0 / m;
    std::optional<std::size_t> pick;
    for (std::size_t c = 0; c < cands.size(); ++c)
      if (cinf_dist(limit_curves[c], reference, J) < bound) {
        pick = c;
        break;
      }
    if (!pick) {
      res.ok = false;
      res.message = "no candidate eps brings the mollified limit within 1/" + std::to_string(m) +
                    " of the reference; the limit is not smooth at this grid resolution";
      break;
    }
    const double e = cands[*pick];
    // Tail sup: first n with max_{n' >= n} dist < bound.
    std::optional<std::size_t> first;
    double tail = 0.0;
    for (std::size_t k = N; k-- > 0;) {
      tail = std::max(tail, cinf_dist(seq_curve(k, e), limit_curves[*pick], J));
      if (tail < bound) first = k;
      else break;
    }
    res.eps_m.push_back(e);
    if (!first) break;
    std::size_t n_m = *first;
    if (!res.n_m.empty()) n_m = std::max(n_m, res.n_m.back() + 1);
    if (n_m >= N) {
      res.eps_m.pop_back();
      break;
    }
    res.n_m.push_back(n_m);
  }
  if (res.eps_m.empty()) {
    if (res.message.empty()) res.message = "no schedule found";
    res.ok = false;
    return res;
  }

  res.eps_seq.resize(N);
  res.dist_seq.resize(N);
  for (std::size_t n = 0; n < N; ++n) {
    double e = res.eps_m.front();
    for (std::size_t m = 0; m < res.n_m.size(); ++m)
      if (res.n_m[m] <= n) e = res.eps_m[m];
    res.eps_seq[n] = e;
    res.dist_seq[n] = cinf_dist(seq_curve(n, e), reference, J);
  }
  return res;
}

}  // namespace spectral_lab
