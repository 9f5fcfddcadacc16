#include "spectral_lab/dynamics.hpp"

#include "spectral_lab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace spectral_lab {

namespace {

using i128 = __int128;

constexpr std::int64_t kMaxDenominator = std::int64_t{1} << 25;

}  // namespace

ContinuedFraction cf_expand(double alpha, int depth) {
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 1.0)
    throw std::invalid_argument("alpha must lie in (0, 1), got " + std::to_string(alpha));
  if (depth < 1) throw std::invalid_argument("continued-fraction depth must be >= 1");

  int exponent = 0;
  const double mantissa = std::frexp(alpha, &exponent);  // alpha = mantissa * 2^exponent
  const int shift = 53 - exponent;
  if (shift > 120) throw std::invalid_argument("alpha is below working precision");

  // alpha = num / den exactly.
  i128 num = static_cast<i128>(std::ldexp(mantissa, 53));
  i128 den = static_cast<i128>(1) << shift;
  while ((num & 1) == 0 && (den & 1) == 0) {
    num >>= 1;
    den >>= 1;
  }

  ContinuedFraction out;
  std::int64_t p_prev = 1, p = 0;  // p_{-1}, p_0
  std::int64_t q_prev = 0, q = 1;  // q_{-1}, q_0
  while (static_cast<int>(out.terms.size()) < depth) {
    const i128 a = den / num;
    const i128 r = den - a * num;
    if (a > kMaxDenominator) {
      out.truncated = true;
      break;
    }
    const i128 p_next = a * p + p_prev;
    const i128 q_next = a * q + q_prev;
    if (q_next > kMaxDenominator) {
      out.truncated = true;
      break;
    }
    out.terms.push_back({static_cast<std::int64_t>(a), static_cast<std::int64_t>(p_next),
                         static_cast<std::int64_t>(q_next)});
    p_prev = p;
    p = static_cast<std::int64_t>(p_next);
    q_prev = q;
    q = static_cast<std::int64_t>(q_next);
    if (r == 0) {
      out.terminated = true;
      break;
    }
    den = num;
    num = r;
  }
  if (out.terminated && static_cast<int>(out.terms.size()) < depth) out.truncated = true;
  return out;
}

double signed_offset(std::int64_t m, double alpha) {
  const double md = static_cast<double>(m);
  const double hi = md * alpha;
  const double lo = std::fma(md, alpha, -hi);
  const double n = std::nearbyint(hi);
  return (hi - n) + lo;
}

RotationSystem::RotationSystem(double alpha, int depth) : alpha_(alpha), cf_(cf_expand(alpha, depth)) {}

double rotate(double omega, std::int64_t j, double alpha) {
  const double jd = static_cast<double>(j);
  const double hi = jd * alpha;
  const double lo = std::fma(jd, alpha, -hi);
  const double f = hi - std::floor(hi);
  return frac01((omega + f) + lo);
}

IidSystem::IidSystem(std::vector<double> values, std::vector<double> probs, std::uint64_t seed)
    : values_(std::move(values)), probs_(std::move(probs)), seed_(seed) {
  if (values_.empty()) throw std::invalid_argument("iid system needs at least one level");
  if (values_.size() != probs_.size())
    throw std::invalid_argument("iid levels and probs must have the same length");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("iid probs must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("iid probs must sum to 1");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("iid levels must be finite");
  cumulative_.resize(probs_.size());
  std::partial_sum(probs_.begin(), probs_.end(), cumulative_.begin());
  cumulative_.back() = 1.0;
}

std::uint64_t IidSystem::stream_of(double omega) const {
  return static_cast<std::uint64_t>(frac01(omega) * 0x1.0p53);
}

double IidSystem::level(std::uint64_t stream, std::int64_t site) const {
  const std::uint64_t h =
      splitmix64(seed_ ^ splitmix64(stream ^ splitmix64(static_cast<std::uint64_t>(site))));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const std::size_t idx = std::min<std::size_t>(it - cumulative_.begin(), values_.size() - 1);
  return values_[idx];
}

std::vector<double> orbit(const BaseSystem& system, double omega, std::size_t n) {
  std::vector<double> out(n);
  if (const auto* rot = std::get_if<RotationSystem>(&system)) {
    for (std::size_t j = 0; j < n; ++j) out[j] = rot->point(omega, static_cast<std::int64_t>(j));
  } else {
    const auto& iid = std::get<IidSystem>(system);
    const std::uint64_t stream = iid.stream_of(omega);
    for (std::size_t j = 0; j < n; ++j) out[j] = iid.level(stream, static_cast<std::int64_t>(j));
  }
  return out;
}

double Arc::offset_of(double x) const {
  double d = x - start;
  if (d < 0.0) d += 1.0;
  if (d >= 1.0) d -= 1.0;
  return d;
}

Tower::Tower(const RotationSystem& system, int level, int columns)
    : alpha_(system.alpha()), level_(level), columns_(columns) {
  const auto& terms = system.cf().terms;
  if (level < 0 || level + 1 >= static_cast<int>(terms.size()))
    throw std::invalid_argument("tower level " + std::to_string(level) +
                                " is beyond the continued-fraction depth");
  if (columns < 1) throw std::invalid_argument("tower needs at least one column");

  const std::int64_t qk = terms[level].q;
  const std::int64_t qk1 = terms[level + 1].q;
  const double dk = signed_offset(qk, alpha_);
  const double dk1 = signed_offset(qk1, alpha_);
  if (dk == 0.0 || dk1 == 0.0) throw std::invalid_argument("alpha is rational at this tower level");

  // The tall base is the arc between 0 and q_k alpha, the short base the arc
  // between 0 and q_{k+1} alpha; they sit on opposite sides of 0.
  tall_base_ = dk > 0 ? Arc{0.0, dk} : Arc{1.0 + dk, -dk};
  short_base_ = dk1 > 0 ? Arc{0.0, dk1} : Arc{1.0 + dk1, -dk1};
  if (tall_base_.start >= 1.0) tall_base_.start = 0.0;
  if (short_base_.start >= 1.0) short_base_.start = 0.0;
  tall_height_ = qk1;
  short_height_ = qk;

  floors_.reserve(static_cast<std::size_t>(qk + qk1));
  for (std::int64_t j = 0; j < tall_height_; ++j)
    floors_.push_back({system.point(tall_base_.start, j), TowerKind::tall, j});
  for (std::int64_t j = 0; j < short_height_; ++j)
    floors_.push_back({system.point(short_base_.start, j), TowerKind::short_, j});
  std::sort(floors_.begin(), floors_.end(),
            [](const FloorRef& a, const FloorRef& b) { return a.start < b.start; });
}

Arc Tower::floor_arc(TowerKind kind, std::int64_t j) const {
  const Arc& b = base(kind);
  return Arc{rotate(b.start, j, alpha_), b.length};
}

Arc Tower::column_arc(TowerKind kind, std::int64_t j, int column) const {
  const Arc f = floor_arc(kind, j);
  const double w = column_width(kind);
  return Arc{frac01(f.start + column * w), w};
}

std::optional<TowerCell> Tower::locate(double omega, double collar) const {
  const double x = frac01(omega);
  auto it = std::upper_bound(floors_.begin(), floors_.end(), x,
                             [](double v, const FloorRef& f) { return v < f.start; });
  const std::size_t n = floors_.size();
  std::size_t idx = (it == floors_.begin()) ? n - 1 : static_cast<std::size_t>(it - floors_.begin()) - 1;

  // Floor starts carry rounding error of a few ulps, so a point within that
  // error of a boundary may belong to a neighbour.
  const FloorRef* hit = nullptr;
  double offset = 0.0;
  for (std::size_t probe : {idx, (idx + n - 1) % n, (idx + 1) % n}) {
    const FloorRef& f = floors_[probe];
    const Arc arc{f.start, base(f.kind).length};
    const double off = arc.offset_of(x);
    if (off < arc.length) {
      hit = &f;
      offset = off;
      break;
    }
  }
  if (hit == nullptr) {
    // Gap of rounding width between two floors: attach to the floor ending here.
    hit = &floors_[idx];
    offset = std::min(Arc{hit->start, base(hit->kind).length}.offset_of(x),
                      std::nextafter(base(hit->kind).length, 0.0));
  }

  const double w = column_width(hit->kind);
  int column = static_cast<int>(offset / w);
  column = std::clamp(column, 0, columns_ - 1);
  if (collar > 0.0) {
    const double half = 0.5 * collar;
    const double to_left = offset - column * w;
    const double to_right = (column + 1) * w - offset;
    if (to_left < half || to_right < half) return std::nullopt;
  }
  return TowerCell{hit->kind, hit->j, column, offset};
}

Tower build_tower(const RotationSystem& system, int level, int columns) {
  return Tower(system, level, columns);
}

std::optional<int> level_for_height(const RotationSystem& system, std::int64_t min_height) {
  const auto& terms = system.cf().terms;
  for (std::size_t k = 0; k + 1 < terms.size(); ++k)
    if (terms[k + 1].q >= min_height) return static_cast<int>(k);
  return std::nullopt;
}

}  // namespace spectral_lab
