#include "spectral_lab/operator.hpp"

#include "spectral_lab/numeric.hpp"
#include "spectral_lab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

extern "C" void dsterf_(int* n, double* d, double* e, int* info);

namespace spectral_lab {

TridiagonalMatrix::TridiagonalMatrix(std::vector<double> d) : diag(std::move(d)) {
  if (diag.empty()) throw std::invalid_argument("tridiagonal matrix needs N >= 1");
  for (double x : diag)
    if (!std::isfinite(x)) throw std::invalid_argument("tridiagonal matrix entries must be finite");
}

double TridiagonalMatrix::gershgorin_lower() const {
  const double off = diag.size() > 1 ? 2.0 : 0.0;
  return *std::min_element(diag.begin(), diag.end()) - off;
}

double TridiagonalMatrix::gershgorin_upper() const {
  const double off = diag.size() > 1 ? 2.0 : 0.0;
  return *std::max_element(diag.begin(), diag.end()) + off;
}

std::size_t eig_count(const TridiagonalMatrix& m, double E) {
  const double scale = std::max({std::abs(m.gershgorin_lower()), std::abs(m.gershgorin_upper()), std::abs(E), 1.0});
  const double tiny = std::numeric_limits<double>::epsilon() * scale;
  std::size_t count = 0;
  double pivot = 1.0;
  for (std::size_t i = 0; i < m.diag.size(); ++i) {
    pivot = (m.diag[i] - E) - (i > 0 ? 1.0 / pivot : 0.0);
    if (pivot == 0.0) pivot = -tiny;
    if (pivot < 0.0) ++count;
  }
  return count;
}

std::vector<double> eigenvalues(const TridiagonalMatrix& m) {
  const std::size_t n = m.size();
  const double lower = m.gershgorin_lower() - 1e-12;
  const double upper = m.gershgorin_upper() + 1e-12;
  const double scale = std::max({std::abs(lower), std::abs(upper), 1.0});
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * scale;

  std::vector<double> out(n);
  double lo_floor = lower;
  for (std::size_t k = 0; k < n; ++k) {
    // Smallest x with eig_count(x) >= k + 1.
    double lo = lo_floor, hi = upper;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (eig_count(m, mid) >= k + 1)
        hi = mid;
      else
        lo = mid;
    }
    out[k] = 0.5 * (lo + hi);
    lo_floor = lo;
  }
  return out;
}

std::vector<double> eigenvalues_fast(const TridiagonalMatrix& m) {
  std::vector<double> d = m.diag;
  std::vector<double> e(d.size() > 1 ? d.size() - 1 : 1, 1.0);
  int n = static_cast<int>(d.size());
  int info = 0;
  dsterf_(&n, d.data(), e.data(), &info);
  if (info != 0) throw std::runtime_error("dsterf failed to converge (info " + std::to_string(info) + ")");
  return d;
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.size() != weights.size()) throw std::invalid_argument("atoms and weights differ in length");
  if (atoms.empty()) throw std::invalid_argument("empirical measure needs at least one atom");
  std::vector<std::size_t> order(atoms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });
  for (std::size_t i : order) {
    if (!std::isfinite(atoms[i])) throw std::invalid_argument("atoms must be finite");
    if (!(weights[i] > 0.0)) throw std::invalid_argument("weights must be positive");
    if (!atoms_.empty() && atoms_.back() == atoms[i]) {
      weights_.back() += weights[i];
    } else {
      atoms_.push_back(atoms[i]);
      weights_.push_back(weights[i]);
    }
  }
  build_cumulative();
  if (std::abs(cumulative_.back() - 1.0) > 1e-12)
    throw std::invalid_argument("weights must sum to 1");
}

EmpiricalMeasure EmpiricalMeasure::from_pooled(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical measure needs at least one atom");
  std::sort(samples.begin(), samples.end());
  const double total = static_cast<double>(samples.size());
  EmpiricalMeasure out;
  std::size_t i = 0;
  while (i < samples.size()) {
    if (!std::isfinite(samples[i])) throw std::invalid_argument("atoms must be finite");
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    out.atoms_.push_back(samples[i]);
    out.weights_.push_back(static_cast<double>(j - i) / total);
    i = j;
  }
  out.build_cumulative();
  return out;
}

void EmpiricalMeasure::build_cumulative() {
  // Compensated prefix sums keep the total within a few ulps of the exact sum.
  cumulative_.resize(weights_.size());
  double running = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double y = weights_[i] - comp;
    const double t = running + y;
    comp = (t - running) - y;
    running = t;
    cumulative_[i] = running;
  }
}

double EmpiricalMeasure::total_mass() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

double EmpiricalMeasure::ids(double E) const {
  const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), E);
  if (it == atoms_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

EmpiricalMeasure EmpiricalMeasure::translate(double c) const {
  EmpiricalMeasure out = *this;
  for (double& a : out.atoms_) a += c;
  // Rounding can merge neighbours that were one ulp apart.
  std::size_t w = 0;
  for (std::size_t i = 1; i < out.atoms_.size(); ++i) {
    if (out.atoms_[i] == out.atoms_[w]) {
      out.weights_[w] += out.weights_[i];
    } else {
      ++w;
      out.atoms_[w] = out.atoms_[i];
      out.weights_[w] = out.weights_[i];
    }
  }
  out.atoms_.resize(w + 1);
  out.weights_.resize(w + 1);
  out.build_cumulative();
  return out;
}

std::vector<double> sample_base_points(std::size_t M, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::vector<double> out(M);
  for (double& w : out) w = uniform01(engine);
  return out;
}

EmpiricalMeasure empirical_dos(const ComposedSampler& v, const BaseSystem& system, std::size_t N, std::size_t M,
                               std::uint64_t seed) {
  if (N < 8) throw std::invalid_argument("empirical DOS needs window N >= 8");
  if (M < 1) throw std::invalid_argument("empirical DOS needs at least one sample");
  const std::vector<double> omegas = sample_base_points(M, seed);
  std::vector<double> pooled(N * M);
  parallel_for(M, [&](std::size_t i) {
    const TridiagonalMatrix m(potential_window(v, system, omegas[i], N));
    const std::vector<double> ev = eigenvalues_fast(m);
    std::copy(ev.begin(), ev.end(), pooled.begin() + static_cast<std::ptrdiff_t>(i * N));
  });
  return EmpiricalMeasure::from_pooled(std::move(pooled));
}

}  // namespace spectral_lab
