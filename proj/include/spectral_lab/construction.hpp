#pragma once

#include "spectral_lab/dynamics.hpp"
#include "spectral_lab/measures.hpp"
#include "spectral_lab/operator.hpp"
#include "spectral_lab/sampler.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spectral_lab {

struct ConstructionParams {
  std::size_t N = 2000;
  std::size_t M = 50;
  std::uint64_t seed = 1;
  std::size_t grid_size = 4001;
  int J = 8;
  double weight_tol = 1e-4;
  // Seeding sweep: v0 = v_tilde + f * eps_0 * cos(2 pi w) for f in order.
  std::vector<double> seed_fractions = {0.0, 0.25, 0.5, 0.75};
  double seed_margin = 0.02;
  // Escalation caps.
  std::int64_t min_tall_height = 64;
  int extra_levels = 2;
  int columns_min = 8;
  int columns_max = 256;
  int max_halvings = 6;
  double min_ramp = 1e-10;
};

// Budgets for a run with total sup-norm allowance eps.
//   eps_seq[n] = (eps / 2) 2^{-n-1}        (sums to eps / 2)
//   ell_seq[n] = (L0 / 2) 2^{-n}, n >= 1   (sums to L0 / 2)
//   eps_smooth[0] = eps_seq[1] / 2; later entries are the accepted sizes.
struct Budgets {
  double eps = 0.0;
  std::vector<double> eps_seq;
  std::vector<double> ell_seq;
  std::vector<double> eps_smooth;
  double L0 = 0.0;

  static Budgets geometric(double eps, std::size_t n_steps);
  void set_floor(double L0);
  double ell_sum(std::size_t n) const;  // sum_{1 <= k <= n} ell_seq[k]
};

// The ((2l - 1) / (2 K'))-quantiles of s_{eps_prev}, l = 1..K', ascending.
std::vector<double> shift_values(double eps_prev, int columns);

// Spectral data of one sampler at one smoothing size.
struct StepCurves {
  double eps_smooth = 0.0;
  EmpiricalMeasure dos;
  DensityCurve smoothed_dos;
  std::vector<double> smoothed_ids;
  DensityCurve smoothed_le;  // s_eps convolved with the log-potential of dos
  BandSet bands;             // support of the smoothed DOS
};

struct LedgerRow {
  std::size_t step = 0;
  double eps_budget = 0.0;  // eps_n
  double eps_smooth = 0.0;  // eps^{(n)}
  int level = 0;            // tower level k
  std::int64_t height = 0;  // tall tower height q_{k+1}
  int columns = 0;          // K'
  double ramp = 0.0;        // tall-tower ramp width
  double increment = 0.0;   // ||v_n - v_{n-1}||_inf
  double cumulative_increment = 0.0;
  std::size_t band_count = 0;
  double min_band_length = 0.0;
  double band_floor = 0.0;  // 2 eps^{(0)}
  bool inherits = false;    // every new band contains an old one
  double density_gap = 0.0;  // largest hole of supp nu_n inside the old smoothed support
  double cinf = 0.0;
  double le_floor = 0.0;
  double le_bound = 0.0;  // L0 - sum_{k<=n} ell_k
  bool sup_ok = false;
  bool band_ok = false;
  bool cinf_ok = false;
  bool le_ok = false;
  bool pass = false;
  int attempts = 0;
  std::string note;
};

struct ConstructionState {
  RotationSystem system;
  ConstructionParams params;
  Budgets budgets;
  Grid grid;
  ComposedSampler v_tilde;
  ComposedSampler current;
  double seed_delta = 0.0;
  std::vector<double> seed_floors;  // smoothed-LE floor of each tried seed
  std::size_t step = 0;
  double cumulative_increment = 0.0;
  StepCurves curves;  // of current, at eps_smooth[step]
  std::vector<LedgerRow> ledger;
};

struct SeedFailure {
  std::string message;
  std::vector<double> fractions;
  std::vector<double> floors;
};

// Seeds the construction. Returns nullopt and fills `failure` if no seed
// candidate has a positive smoothed Lyapunov floor.
std::optional<ConstructionState> init(const ComposedSampler& v_tilde, double eps, const RotationSystem& system,
                                      std::size_t n_steps, const ConstructionParams& params, SeedFailure* failure);

// v_{n-1} plus a layer of shift_values(eps^{(n-1)}, columns) on the level-k
// towers. Throws if the ramp width falls below params.min_ramp.
ComposedSampler apply_layer(const ConstructionState& state, int level, int columns);

// Evaluates the four step conditions for `candidate` as step state.step + 1
// with smoothing size eps_next. A size outside (0, eps_seq[n+1]) is rejected
// before any spectral computation.
LedgerRow verify_step(const ConstructionState& state, const ComposedSampler& candidate, double eps_next,
                      StepCurves* curves_out = nullptr);

enum class RunStatus { ok, seed_failed, capped };

struct ConstructionResult {
  RunStatus status = RunStatus::ok;
  std::string message;
  std::optional<ConstructionState> state;
  std::vector<ComposedSampler> samplers;  // v_0 .. v_n
  std::vector<StepCurves> curves;         // per accepted step
  std::optional<LedgerRow> failed_row;    // best attempt at the failing step
  SeedFailure seed_failure;
};

ConstructionResult run(const ComposedSampler& v_tilde, double eps, std::size_t n_steps, const RotationSystem& system,
                       const ConstructionParams& params);

// Mixture of translates of nu by shift_values(eps, shifts), equal weights:
// the DOS of the family v + s with s quantised from s_eps.
EmpiricalMeasure direct_integral_dos(const EmpiricalMeasure& nu, double eps, int shifts);

}  // namespace spectral_lab
