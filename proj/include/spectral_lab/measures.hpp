#pragma once

#include "spectral_lab/operator.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace spectral_lab {

// Equispaced points lo = x_0 < ... < x_{size-1} = hi. size 1 means {lo}.
struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t size = 1;

  Grid() = default;
  Grid(double lo, double hi, std::size_t size);
  double x(std::size_t i) const;
  double spacing() const { return size > 1 ? (hi - lo) / static_cast<double>(size - 1) : 0.0; }
  std::vector<double> points() const;
  bool operator==(const Grid&) const = default;
};

// Sampled curve with derivatives of orders 1..J on a Grid.
struct DensityCurve {
  Grid grid;
  int J = 0;
  std::vector<double> values;
  std::vector<std::vector<double>> derivs;  // derivs[j - 1] is order j

  const std::vector<double>& order(int j) const { return j == 0 ? values : derivs.at(static_cast<std::size_t>(j - 1)); }
  // Trapezoidal integral of values.
  double trapezoid_mass() const;
  double min_value() const;
};

struct Band {
  double l = 0.0;
  double r = 0.0;
  double length() const { return r - l; }
  bool contains(const Band& inner) const { return l <= inner.l && inner.r <= r; }
  bool operator==(const Band&) const = default;
};

// Disjoint sorted closed intervals.
struct BandSet {
  std::vector<Band> bands;

  std::size_t count() const { return bands.size(); }
  double min_length() const;
  // Distance from x to the nearest band endpoint.
  double edge_distance(double x) const;
  bool contains(double x) const;
};

// S_eps nu and its derivatives up to order J on the grid. Throws if the grid
// does not cover [min atom - eps, max atom + eps].
DensityCurve mollify(const EmpiricalMeasure& nu, double eps, const Grid& grid, int J);

// Cumulative distribution of S_eps nu at each grid point, via the kernel CDF.
std::vector<double> mollified_ids(const EmpiricalMeasure& nu, double eps, const Grid& grid);

// sum_{j<=J} 2^{-j} min(max_g |f^{(j)} - g^{(j)}|, 1). Throws on mismatched
// grids or when a curve carries fewer than J orders.
double cinf_dist(const DensityCurve& f, const DensityCurve& g, int J);

// Sum over j <= J of 2^{-j} Lip(s_eps^{(j)}); bounds cinf_dist of two
// mollifications by this times their Wasserstein-1 distance.
double mollifier_lipschitz(double eps, int J);

// Support of an atomic measure as bands. Atoms are first grouped at the fine
// scale gap_tol / kFineDivisor and groups of total mass <= weight_tol are
// dropped; the survivors closer than gap_tol are chained into one band.
inline constexpr double kFineDivisor = 8.0;
BandSet support_bands(const EmpiricalMeasure& nu, double gap_tol, double weight_tol);

// Support of S_eps nu: atoms chained at gap 2 eps, each band widened by eps.
BandSet smoothed_support(const EmpiricalMeasure& nu, double eps, double weight_tol);

struct WeakStarOptions {
  std::vector<double> eps_candidates;  // searched from largest to smallest
  std::optional<DensityCurve> reference;  // default: mollify(limit, smallest candidate)
  int m_max = 64;
};

struct WeakStarResult {
  bool ok = false;
  std::string message;
  std::vector<double> eps_m;    // eps^{(m)}, m = 1, 2, ...
  std::vector<std::size_t> n_m;  // n^{(m)}
  std::vector<double> eps_seq;   // eps_n per input measure
  std::vector<double> dist_seq;  // cinf_dist(S_{eps_n} nu_n, reference)
};

// Diagonal selection of a mollifier schedule along a finite sequence of
// measures approaching nu_limit. eps^{(m)} is the largest candidate whose
// mollified limit is within 1/m of the reference; n^{(m)} (strictly
// increasing) is the first index from which every later measure, mollified at
// eps^{(m)}, stays within 1/m of the mollified limit.
WeakStarResult weak_star_diag(const std::vector<EmpiricalMeasure>& nu_seq, const EmpiricalMeasure& nu_limit,
                              const Grid& grid, int J, WeakStarOptions options);

}  // namespace spectral_lab
