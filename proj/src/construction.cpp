#include "spectral_lab/construction.hpp"

#include "spectral_lab/kernel.hpp"
#include "spectral_lab/thouless.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spectral_lab {

Budgets Budgets::geometric(double eps, std::size_t n_steps) {
  if (!(eps > 0.0)) throw std::invalid_argument("construction budget eps must be positive");
  Budgets b;
  b.eps = eps;
  for (std::size_t n = 0; n < n_steps + 2; ++n) b.eps_seq.push_back(0.5 * eps * std::ldexp(1.0, -static_cast<int>(n) - 1));
  b.ell_seq.assign(n_steps + 1, 0.0);
  b.eps_smooth.push_back(0.5 * b.eps_seq[1]);
  return b;
}

void Budgets::set_floor(double floor) {
  L0 = floor;
  for (std::size_t n = 1; n < ell_seq.size(); ++n) ell_seq[n] = 0.5 * L0 * std::ldexp(1.0, -static_cast<int>(n));
}

double Budgets::ell_sum(std::size_t n) const {
  double s = 0.0;
  for (std::size_t k = 1; k <= n && k < ell_seq.size(); ++k) s += ell_seq[k];
  return s;
}

std::vector<double> shift_values(double eps_prev, int columns) {
  if (columns < 1) throw std::invalid_argument("shift layer needs at least one column");
  if (!(eps_prev > 0.0)) throw std::invalid_argument("shift range must be positive");
  const Kernel& kernel = Kernel::instance();
  std::vector<double> out(static_cast<std::size_t>(columns), 0.0);
  for (int l = 1; 2 * l <= columns; ++l) {
    const double q = eps_prev * kernel.quantile((2.0 * l - 1.0) / (2.0 * columns));
    out[l - 1] = q;
    out[columns - l] = -q;
  }
  return out;
}

EmpiricalMeasure direct_integral_dos(const EmpiricalMeasure& nu, double eps, int shifts) {
  const std::vector<double> s = shift_values(eps, shifts);
  std::vector<double> atoms, weights;
  atoms.reserve(nu.size() * s.size());
  weights.reserve(nu.size() * s.size());
  for (double shift : s)
    for (std::size_t i = 0; i < nu.size(); ++i) {
      atoms.push_back(nu.atoms()[i] + shift);
      weights.push_back(nu.weights()[i] / static_cast<double>(shifts));
    }
  return EmpiricalMeasure(std::move(atoms), std::move(weights));
}

namespace {

StepCurves smooth(const EmpiricalMeasure& dos, double eps, const Grid& grid, const ConstructionParams& p, bool with_le) {
  StepCurves c;
  c.eps_smooth = eps;
  c.dos = dos;
  c.smoothed_dos = mollify(dos, eps, grid, p.J);
  c.smoothed_ids = mollified_ids(dos, eps, grid);
  if (with_le) c.smoothed_le = smoothed_log_potential(dos, eps, grid);
  c.bands = smoothed_support(dos, eps, p.weight_tol);
  return c;
}

EmpiricalMeasure dos_of(const ComposedSampler& v, const ConstructionState& s) {
  return empirical_dos(v, s.system, s.params.N, s.params.M, s.params.seed);
}

double largest_hole(const EmpiricalMeasure& nu, const BandSet& inside) {
  const auto& a = nu.atoms();
  double worst = 0.0;
  for (const auto& b : inside.bands) {
    double prev = b.l;
    for (auto it = std::lower_bound(a.begin(), a.end(), b.l); it != a.end() && *it <= b.r; ++it) {
      worst = std::max(worst, *it - prev);
      prev = *it;
    }
    worst = std::max(worst, b.r - prev);
  }
  return worst;
}

// Everything except the Lyapunov floor.
void judge_shape(const ConstructionState& s, const StepCurves& c, LedgerRow& row) {
  row.band_count = c.bands.count();
  row.min_band_length = c.bands.min_length();
  row.band_ok = row.band_count > 0 && row.min_band_length >= row.band_floor;
  row.inherits = std::all_of(c.bands.bands.begin(), c.bands.bands.end(), [&](const Band& nb) {
    return std::any_of(s.curves.bands.bands.begin(), s.curves.bands.bands.end(),
                       [&](const Band& ob) { return nb.contains(ob); });
  });
  row.density_gap = largest_hole(c.dos, s.curves.bands);
  row.cinf = cinf_dist(c.smoothed_dos, s.curves.smoothed_dos, s.params.J);
  row.cinf_ok = row.cinf < row.eps_budget;
}

void judge_le(const ConstructionState& s, const StepCurves& c, LedgerRow& row) {
  row.le_floor = c.smoothed_le.min_value();
  row.le_bound = s.budgets.L0 - s.budgets.ell_sum(row.step);
  row.le_ok = row.le_floor >= row.le_bound && row.le_bound > 0.0;
  row.pass = row.sup_ok && row.band_ok && row.cinf_ok && row.le_ok;
}

LedgerRow blank_row(const ConstructionState& s, const ComposedSampler& candidate, double eps_next) {
  LedgerRow row;
  row.step = s.step + 1;
  row.eps_budget = s.budgets.eps_seq.at(row.step);
  row.eps_smooth = eps_next;
  row.band_floor = 2.0 * s.budgets.eps_smooth.front();
  if (candidate.layers().size() > s.current.layers().size()) {
    const ShiftLayer& layer = candidate.layers().back();
    row.level = layer.tower().level();
    row.height = layer.tower().height(TowerKind::tall);
    row.columns = layer.tower().columns();
    row.ramp = layer.ramp_width(TowerKind::tall);
    row.increment = layer.sup_norm();
  }
  row.cumulative_increment = s.cumulative_increment + row.increment;
  row.sup_ok = row.increment < row.eps_budget && row.cumulative_increment < s.budgets.eps;
  return row;
}

bool smoothing_in_budget(const ConstructionState& s, double eps_next) {
  return eps_next > 0.0 && eps_next < s.budgets.eps_seq.at(s.step + 2);
}

int failures(const LedgerRow& r) { return !r.sup_ok + !r.band_ok + !r.cinf_ok + !r.le_ok; }

}  // namespace

std::optional<ConstructionState> init(const ComposedSampler& v_tilde, double eps, const RotationSystem& system,
                                      std::size_t n_steps, const ConstructionParams& params, SeedFailure* failure) {
  if (!(eps > 0.0)) throw std::invalid_argument("construction eps must be positive");
  if (!system.irrational()) throw std::invalid_argument("construction needs an irrational rotation");
  if (!v_tilde.layers().empty() && v_tilde.layers().front().tower().alpha() != system.alpha())
    throw std::invalid_argument("target sampler was built for a different rotation angle");

  ConstructionState s{system, params, Budgets::geometric(eps, n_steps), Grid(), v_tilde, v_tilde, 0.0, {}, 0, 0.0, {}, {}};
  const double M = 2.0 + v_tilde.sup_bound() + eps;
  s.grid = Grid(-M, M, params.grid_size);
  const double eps0 = s.budgets.eps_smooth.front();

  for (double f : params.seed_fractions) {
    const double delta = f * s.budgets.eps_seq.front();
    const ComposedSampler v0 = delta == 0.0 ? v_tilde : v_tilde.plus_cosine({delta, 1, 0.0});
    StepCurves c = smooth(dos_of(v0, s), eps0, s.grid, params, true);
    const double floor = c.smoothed_le.min_value();
    s.seed_floors.push_back(floor);
    if (floor >= params.seed_margin) {
      s.current = v0;
      s.seed_delta = delta;
      s.curves = std::move(c);
      s.budgets.set_floor(floor);
      return s;
    }
  }
  if (failure) {
    failure->fractions = params.seed_fractions;
    failure->floors = s.seed_floors;
    failure->message = "no seed candidate within the eps_0 ball reaches a smoothed Lyapunov floor of " +
                       std::to_string(params.seed_margin);
  }
  return std::nullopt;
}

ComposedSampler apply_layer(const ConstructionState& state, int level, int columns) {
  const double eps_prev = state.budgets.eps_smooth.at(state.step);
  ShiftLayer layer(build_tower(state.system, level, columns), shift_values(eps_prev, columns));
  if (layer.ramp_width(TowerKind::tall) < state.params.min_ramp ||
      layer.ramp_width(TowerKind::short_) < state.params.min_ramp)
    throw std::invalid_argument("ramp width underflows the resolution; use fewer columns or a lower level");
  return state.current.with_layer(std::move(layer));
}

LedgerRow verify_step(const ConstructionState& state, const ComposedSampler& candidate, double eps_next,
                      StepCurves* curves_out) {
  LedgerRow row = blank_row(state, candidate, eps_next);
  row.attempts = 1;
  if (!smoothing_in_budget(state, eps_next)) {
    row.sup_ok = false;
    row.note = "smoothing size outside (0, eps_{n+1})";
    return row;
  }
  StepCurves c = smooth(dos_of(candidate, state), eps_next, state.grid, state.params, true);
  judge_shape(state, c, row);
  judge_le(state, c, row);
  if (curves_out) *curves_out = std::move(c);
  return row;
}

ConstructionResult run(const ComposedSampler& v_tilde, double eps, std::size_t n_steps, const RotationSystem& system,
                       const ConstructionParams& params) {
  ConstructionResult res;
  res.state = init(v_tilde, eps, system, n_steps, params, &res.seed_failure);
  if (!res.state) {
    res.status = RunStatus::seed_failed;
    res.message = res.seed_failure.message;
    return res;
  }
  ConstructionState& s = *res.state;
  res.samplers.push_back(s.current);
  res.curves.push_back(s.curves);

  const auto k0 = level_for_height(system, params.min_tall_height);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    if (!k0) {
      res.status = RunStatus::capped;
      res.message = "continued fraction too short for the minimum tower height";
      return res;
    }
    const double eps_start = std::min(0.5 * s.budgets.eps_seq[n + 1], s.budgets.eps_smooth[n - 1]);
    bool accepted = false;
    struct Best {
      LedgerRow row;
      EmpiricalMeasure dos;
      bool le_done;
    };
    std::optional<Best> best;

    for (int cols = params.columns_min; cols <= params.columns_max && !accepted; cols *= 2) {
      for (int k = *k0; k <= *k0 + params.extra_levels && !accepted; ++k) {
        ComposedSampler candidate;
        try {
          candidate = apply_layer(s, k, cols);
        } catch (const std::invalid_argument&) {
          continue;  // ramp underflow or level beyond the expansion
        }
        const EmpiricalMeasure dos = dos_of(candidate, s);
        // Halve the smoothing size while the C-infinity proximity fails; a
        // failing candidate is represented by its least-bad attempt.
        LedgerRow row;
        StepCurves c;
        for (int h = 0; h <= params.max_halvings; ++h) {
          const double e = std::ldexp(eps_start, -h);
          LedgerRow r = blank_row(s, candidate, e);
          StepCurves cur = smooth(dos, e, s.grid, params, false);
          judge_shape(s, cur, r);
          r.le_ok = true;  // not yet evaluated; keeps the ranking to the shape checks
          if (h == 0 || r.cinf_ok || failures(r) < failures(row) ||
              (failures(r) == failures(row) && r.cinf < row.cinf)) {
            row = r;
            c = std::move(cur);
          }
          row.attempts = h + 1;
          if (r.cinf_ok) break;
        }
        row.le_ok = false;
        const bool le_done = row.sup_ok && row.band_ok && row.cinf_ok;
        if (le_done) {
          c.smoothed_le = smoothed_log_potential(dos, row.eps_smooth, s.grid);
          judge_le(s, c, row);
        } else {
          row.pass = false;
        }
        if (row.pass) {
          accepted = true;
          s.current = candidate;
          s.step = n;
          s.cumulative_increment = row.cumulative_increment;
          s.budgets.eps_smooth.push_back(row.eps_smooth);
          s.curves = std::move(c);
          s.ledger.push_back(row);
          res.samplers.push_back(s.current);
          res.curves.push_back(s.curves);
        } else if (!best || failures(row) < failures(best->row) ||
                   (failures(row) == failures(best->row) && row.cinf < best->row.cinf)) {
          best = Best{row, dos, le_done};
        }
      }
    }
    if (!accepted) {
      res.status = RunStatus::capped;
      if (best) {
        if (!best->le_done) {
          StepCurves tmp;
          tmp.smoothed_le = smoothed_log_potential(best->dos, best->row.eps_smooth, s.grid);
          judge_le(s, tmp, best->row);
        }
        best->row.note = "escalation caps exhausted";
        res.failed_row = best->row;
      }
      res.message = "step " + std::to_string(n) + " failed after exhausting tower level and column caps";
      return res;
    }
  }
  return res;
}

}  // namespace spectral_lab
