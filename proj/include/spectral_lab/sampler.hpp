#pragma once

#include "spectral_lab/dynamics.hpp"

#include <memory>
#include <vector>

namespace spectral_lab {

struct CosineTerm {
  double amplitude = 0.0;
  int frequency = 1;
  double phase = 0.0;
  bool operator==(const CosineTerm&) const = default;
};

// Closed-form part of a sampling function:
//   v0(x) = constant + sum_i amplitude_i cos(2 pi (frequency_i x + phase_i)) + identity * x.
// The identity term is meant for the i.i.d. shift, where x is the letter value.
struct BaseSampler {
  double constant = 0.0;
  std::vector<CosineTerm> cosines;
  double identity = 0.0;

  double operator()(double x) const;
  // Upper bound on sup|v0| over circle coordinates x in [0, 1).
  double sup_bound() const;
  bool operator==(const BaseSampler&) const = default;
};

// One column-shift layer over a two-tower partition. Column l of either
// tower carries the constant shift shifts[l]; across each internal column
// boundary the shift interpolates linearly over a collar of width eta, and at
// both ends of every floor it ramps to 0 over eta / 2, which keeps the layer
// continuous on the circle. eta = (base length) / (ramp_divisor * columns)
// separately for the tall and the short tower.
class ShiftLayer {
 public:
  static constexpr double kRampDivisor = 16.0;

  ShiftLayer(Tower tower, std::vector<double> shifts);

  const Tower& tower() const { return tower_; }
  const std::vector<double>& shifts() const { return shifts_; }
  double ramp_width(TowerKind kind) const { return tower_.base(kind).length / (kRampDivisor * tower_.columns()); }

  double operator()(double x) const;
  // Exact sup|layer|: the profile attains every shift value and nothing larger.
  double sup_norm() const;

 private:
  Tower tower_;
  std::vector<double> shifts_;
};

// v(x) = v0(x) + sum of shift layers. Layers are only meaningful for
// rotations, where x is a point of the circle.
class ComposedSampler {
 public:
  ComposedSampler() = default;
  explicit ComposedSampler(BaseSampler base) : base_(std::move(base)) {}

  static ComposedSampler zero() { return ComposedSampler(); }
  static ComposedSampler constant(double c);
  static ComposedSampler cosine(double lambda, double phase = 0.0);
  static ComposedSampler identity();

  const BaseSampler& base() const { return base_; }
  const std::vector<ShiftLayer>& layers() const { return layers_; }

  // Copy with one more layer on top.
  ComposedSampler with_layer(ShiftLayer layer) const;
  // Copy with a constant added to the closed-form part.
  ComposedSampler plus_constant(double c) const;
  ComposedSampler plus_cosine(CosineTerm term) const;

  double operator()(double x) const;
  double sup_bound() const;

 private:
  BaseSampler base_;
  std::vector<ShiftLayer> layers_;
};

// v(T^j omega) for j = 0 .. n-1.
std::vector<double> potential_window(const ComposedSampler& v, const BaseSystem& system, double omega,
                                     std::size_t n);

}  // namespace spectral_lab
