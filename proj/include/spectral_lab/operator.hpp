#pragma once

#include "spectral_lab/dynamics.hpp"
#include "spectral_lab/sampler.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spectral_lab {

// Dirichlet truncation of H = Delta + V to sites 0 .. N-1: diagonal V(n),
// off-diagonal 1.
struct TridiagonalMatrix {
  std::vector<double> diag;

  explicit TridiagonalMatrix(std::vector<double> d);
  std::size_t size() const { return diag.size(); }
  double gershgorin_lower() const;
  double gershgorin_upper() const;
};

// Number of eigenvalues <= E, from the signs of the LDL^T pivots of H - E.
// A pivot that vanishes exactly is replaced by -eps_mach * scale, so an
// eigenvalue sitting exactly at E may be counted on either side.
std::size_t eig_count(const TridiagonalMatrix& m, double E);

// All eigenvalues, ascending, each by bisection on eig_count to a few ulps of
// the spectral scale.
std::vector<double> eigenvalues(const TridiagonalMatrix& m);

// All eigenvalues, ascending, by the root-free QL/QR iteration of LAPACK's
// dsterf. O(N^2) instead of O(N^2 log(1/tol)); used for DOS sampling.
std::vector<double> eigenvalues_fast(const TridiagonalMatrix& m);

// Finite atomic probability measure with strictly increasing atoms.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  // Sorts, merges exactly equal atoms and checks that the weights are positive
  // and sum to 1 within 1e-12.
  EmpiricalMeasure(std::vector<double> atoms, std::vector<double> weights);
  // Equal weight 1 / count on every entry of a pooled sample.
  static EmpiricalMeasure from_pooled(std::vector<double> samples);
  static EmpiricalMeasure dirac(double at) { return EmpiricalMeasure({at}, {1.0}); }

  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double min_atom() const { return atoms_.front(); }
  double max_atom() const { return atoms_.back(); }
  double total_mass() const;

  // Cumulative weight of atoms <= E.
  double ids(double E) const;
  EmpiricalMeasure translate(double c) const;

 private:
  void build_cumulative();

  std::vector<double> atoms_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

// Eigenvalues of M Dirichlet truncations of length N at base points drawn
// i.i.d. from mu with a seeded generator, pooled with weight 1 / (N M) each.
EmpiricalMeasure empirical_dos(const ComposedSampler& v, const BaseSystem& system, std::size_t N, std::size_t M,
                               std::uint64_t seed);

// Base points used by empirical_dos and lyapunov for a given seed.
std::vector<double> sample_base_points(std::size_t M, std::uint64_t seed);

}  // namespace spectral_lab
