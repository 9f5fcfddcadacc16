#include "spectral_lab/sampler.hpp"

#include "spectral_lab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectral_lab {

double BaseSampler::operator()(double x) const {
  double v = constant + identity * x;
  for (const auto& c : cosines) v += c.amplitude * std::cos(kTwoPi * (c.frequency * x + c.phase));
  return v;
}

double BaseSampler::sup_bound() const {
  double s = std::abs(constant) + std::abs(identity);
  for (const auto& c : cosines) s += std::abs(c.amplitude);
  return s;
}

ShiftLayer::ShiftLayer(Tower tower, std::vector<double> shifts) : tower_(std::move(tower)), shifts_(std::move(shifts)) {
  if (static_cast<int>(shifts_.size()) != tower_.columns())
    throw std::invalid_argument("shift layer needs exactly one shift per column");
}

double ShiftLayer::operator()(double x) const {
  const TowerCell cell = *tower_.locate(x);
  const double len = tower_.base(cell.tower).length;
  const int cols = tower_.columns();
  const double w = len / cols;
  const double half = 0.5 * ramp_width(cell.tower);
  const double u = cell.offset;

  if (u < half) return shifts_.front() * (u / half);
  if (len - u < half) return shifts_.back() * ((len - u) / half);

  const long b = std::lround(u / w);  // nearest column boundary
  if (b > 0 && b < cols) {
    const double d = u - b * w;
    if (std::abs(d) < half) {
      const double left = shifts_[b - 1];
      const double right = shifts_[b];
      return left + (right - left) * (d + half) / (2.0 * half);
    }
  }
  return shifts_[cell.column];
}

double ShiftLayer::sup_norm() const {
  double m = 0.0;
  for (double s : shifts_) m = std::max(m, std::abs(s));
  return m;
}

ComposedSampler ComposedSampler::constant(double c) {
  BaseSampler b;
  b.constant = c;
  return ComposedSampler(b);
}

ComposedSampler ComposedSampler::cosine(double lambda, double phase) {
  BaseSampler b;
  b.cosines.push_back({lambda, 1, phase});
  return ComposedSampler(b);
}

ComposedSampler ComposedSampler::identity() {
  BaseSampler b;
  b.identity = 1.0;
  return ComposedSampler(b);
}

ComposedSampler ComposedSampler::with_layer(ShiftLayer layer) const {
  ComposedSampler out = *this;
  out.layers_.push_back(std::move(layer));
  return out;
}

ComposedSampler ComposedSampler::plus_constant(double c) const {
  ComposedSampler out = *this;
  out.base_.constant += c;
  return out;
}

ComposedSampler ComposedSampler::plus_cosine(CosineTerm term) const {
  ComposedSampler out = *this;
  out.base_.cosines.push_back(term);
  return out;
}

double ComposedSampler::operator()(double x) const {
  double v = base_(x);
  for (const auto& layer : layers_) v += layer(x);
  return v;
}

double ComposedSampler::sup_bound() const {
  double s = base_.sup_bound();
  for (const auto& layer : layers_) s += layer.sup_norm();
  return s;
}

std::vector<double> potential_window(const ComposedSampler& v, const BaseSystem& system, double omega,
                                     std::size_t n) {
  if (n == 0) throw std::invalid_argument("potential window needs n >= 1");
  if (!v.layers().empty() && !std::holds_alternative<RotationSystem>(system))
    throw std::invalid_argument("tower shift layers require a rotation base system");
  if (const auto* rot = std::get_if<RotationSystem>(&system))
    for (const auto& layer : v.layers())
      if (layer.tower().alpha() != rot->alpha())
        throw std::invalid_argument("shift layer was built for a different rotation angle");
  std::vector<double> coords = orbit(system, omega, n);
  for (double& c : coords) c = v(c);
  return coords;
}

}  // namespace spectral_lab
