#pragma once

#include "spectral_lab/measures.hpp"
#include "spectral_lab/operator.hpp"

#include <cstddef>
#include <vector>

namespace spectral_lab {

struct LogPotential {
  double value = 0.0;
  bool nudged = false;  // an atom sat within 1e-13 * scale of E and was moved off by 1e-12 * scale
};

// sum_i w_i log|a_i - E|.
LogPotential log_potential(const EmpiricalMeasure& nu, double E);

struct LogPotentialCurve {
  DensityCurve curve;  // J = 0
  std::vector<bool> nudged;
  std::size_t nudged_count = 0;
};

LogPotentialCurve thouless_curve(const EmpiricalMeasure& nu, const Grid& grid);

// int_{-1}^{1} s^{(j)}(y) log|z - y| dy by 129-point Gauss-Legendre, split at
// z with the log singularity subtracted when |z| < 1.
double kernel_log_moment(double z, int j);

struct SmoothedIdentity {
  DensityCurve lhs;  // s_eps convolved with the log-potential of nu
  DensityCurve rhs;  // log-potential of the density S_eps nu
  double sup_gap = 0.0;
};

// Both sides of the smoothing identity, with derivatives up to J. lhs costs
// O(atoms * grid * 129 * (J + 1)); meant for modest measures. rhs integrates
// log|E - x| against the piecewise-linear interpolant of S_eps nu sampled on
// 10^4 points.
SmoothedIdentity smoothed_le_identity(const EmpiricalMeasure& nu, double eps, const Grid& grid, int J);

// Values of s_eps * (log-potential of nu) from a tabulated one-dimensional
// profile; agrees with smoothed_le_identity's lhs to ~1e-12 and costs about
// one table lookup per atom and grid point.
DensityCurve smoothed_log_potential(const EmpiricalMeasure& nu, double eps, const Grid& grid);

}  // namespace spectral_lab
