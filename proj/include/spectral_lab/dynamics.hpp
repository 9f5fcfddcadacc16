#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace spectral_lab {

// (sqrt(5) - 1) / 2
inline constexpr double kGoldenMean = 0.61803398874989484820;

struct Convergent {
  std::int64_t a = 0;  // partial quotient
  std::int64_t p = 0;
  std::int64_t q = 0;
};

// Continued-fraction expansion of alpha in (0, 1), integer part dropped:
// terms[0] holds (a_1, p_1, q_1), terms[1] holds (a_2, p_2, q_2), and so on.
//
// The expansion runs Euclid's algorithm exactly on the dyadic rational that
// the double `alpha` represents. Terms are kept only while q_k <= 2^25, beyond
// which the double no longer pins down the continued fraction of the real
// number it approximates.
struct ContinuedFraction {
  std::vector<Convergent> terms;
  bool terminated = false;  // remainder reached zero: alpha is an exact rational
  bool truncated = false;   // requested depth not reachable at working precision
};

ContinuedFraction cf_expand(double alpha, int depth);

// m * alpha - round(m * alpha), computed with an exact two-product so the
// result carries no cancellation error.
double signed_offset(std::int64_t m, double alpha);

// ||m alpha|| = dist(m alpha, Z).
inline double circle_norm(std::int64_t m, double alpha) {
  const double d = signed_offset(m, alpha);
  return d < 0 ? -d : d;
}

// frac(omega + j alpha). The product j alpha is split into a rounded part and
// its exact error term, so there is no drift however large j gets.
double rotate(double omega, std::int64_t j, double alpha);

// Circle rotation x -> x + alpha mod 1 with Lebesgue measure.
class RotationSystem {
 public:
  static constexpr int kDefaultDepth = 40;

  explicit RotationSystem(double alpha, int depth = kDefaultDepth);
  static RotationSystem golden(int depth = kDefaultDepth) { return RotationSystem(kGoldenMean, depth); }

  double alpha() const { return alpha_; }
  const ContinuedFraction& cf() const { return cf_; }
  bool irrational() const { return !cf_.terminated; }

  double point(double omega, std::int64_t j) const { return rotate(omega, j, alpha_); }
  double step(double omega) const { return point(omega, 1); }

 private:
  double alpha_;
  ContinuedFraction cf_;
};

// Full shift on a finite alphabet with i.i.d. letters. Letters are produced
// by a counter-based hash of (seed, stream, site), so any window of any orbit
// is reproducible without replaying the ones before it.
class IidSystem {
 public:
  IidSystem(std::vector<double> values, std::vector<double> probs, std::uint64_t seed);

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }
  std::uint64_t seed() const { return seed_; }

  // Base point omega in [0, 1) selects a stream; site j of that stream.
  std::uint64_t stream_of(double omega) const;
  double level(std::uint64_t stream, std::int64_t site) const;

 private:
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::uint64_t seed_;
};

using BaseSystem = std::variant<RotationSystem, IidSystem>;

// Coordinates seen by a sampling function along the orbit of omega:
// circle points for a rotation, letter values for the i.i.d. shift.
std::vector<double> orbit(const BaseSystem& system, double omega, std::size_t n);

// Half-open arc [start, start + length) on R/Z.
struct Arc {
  double start = 0.0;
  double length = 0.0;

  // Offset of x from the start of the arc, reduced into [0, 1).
  double offset_of(double x) const;
  bool contains(double x) const { return offset_of(x) < length; }
};

enum class TowerKind { tall, short_ };

struct TowerCell {
  TowerKind tower = TowerKind::tall;
  std::int64_t floor = 0;  // j with T^{-j} omega in the base
  int column = 0;
  double offset = 0.0;  // position inside the floor, in [0, base length)
};

// Exact two-tower Kakutani-Rokhlin partition of a rotation at
// continued-fraction level k: a tall tower of height q_{k+1} over an arc of
// length ||q_k alpha|| and a short tower of height q_k over an arc of length
// ||q_{k+1} alpha||. Both bases are cut into the same number of columns.
class Tower {
 public:
  Tower(const RotationSystem& system, int level, int columns);

  int level() const { return level_; }
  int columns() const { return columns_; }
  double alpha() const { return alpha_; }

  const Arc& base(TowerKind kind) const { return kind == TowerKind::tall ? tall_base_ : short_base_; }
  std::int64_t height(TowerKind kind) const { return kind == TowerKind::tall ? tall_height_ : short_height_; }
  double column_width(TowerKind kind) const { return base(kind).length / columns_; }
  double measure(TowerKind kind) const { return static_cast<double>(height(kind)) * base(kind).length; }

  Arc floor_arc(TowerKind kind, std::int64_t j) const;
  Arc column_arc(TowerKind kind, std::int64_t j, int column) const;

  // Floor and column containing omega. With collar > 0, points closer than
  // collar / 2 to a column boundary (floor ends included) are reported as
  // nullopt; with collar == 0 every point of the circle is located.
  std::optional<TowerCell> locate(double omega, double collar = 0.0) const;

  std::size_t floor_count() const { return floors_.size(); }

 private:
  struct FloorRef {
    double start;
    TowerKind kind;
    std::int64_t j;
  };

  double alpha_;
  int level_;
  int columns_;
  Arc tall_base_;
  Arc short_base_;
  std::int64_t tall_height_;
  std::int64_t short_height_;
  std::vector<FloorRef> floors_;  // sorted by start
};

Tower build_tower(const RotationSystem& system, int level, int columns);

// Smallest level k with q_{k+1} >= min_height, if the expansion reaches it.
std::optional<int> level_for_height(const RotationSystem& system, std::int64_t min_height);

}  // namespace spectral_lab
