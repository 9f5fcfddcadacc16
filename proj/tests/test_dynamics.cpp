#include "spectral_lab/dynamics.hpp"
#include "spectral_lab/numeric.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace spectral_lab;

namespace {

// Denominators of successive best approximations, by exhaustive search.
std::vector<std::int64_t> best_denominators(long double alpha, std::int64_t qmax) {
  std::vector<std::int64_t> out;
  long double best = 1.0L;
  for (std::int64_t q = 1; q <= qmax; ++q) {
    const long double d = std::fabs(q * alpha - std::nearbyint(q * alpha));
    if (d < best) {
      best = d;
      out.push_back(q);
    }
  }
  return out;
}

std::vector<std::int64_t> denominators(const ContinuedFraction& cf) {
  std::vector<std::int64_t> q;
  for (const auto& t : cf.terms) q.push_back(t.q);
  return q;
}

}  // namespace

TEST_CASE("golden mean convergents") {
  const auto cf = cf_expand(kGoldenMean, 6);
  CHECK(denominators(cf) == std::vector<std::int64_t>{1, 2, 3, 5, 8, 13});
  CHECK(best_denominators((std::sqrt(5.0L) - 1.0L) / 2.0L, 13) == std::vector<std::int64_t>{1, 2, 3, 5, 8, 13});
  for (const auto& t : cf.terms) CHECK(t.a == 1);
  CHECK_FALSE(cf.terminated);
  CHECK_FALSE(cf.truncated);
}

TEST_CASE("1/pi convergents") {
  const double alpha = 1.0 / kPi;
  const auto cf = cf_expand(alpha, 3);
  REQUIRE(cf.terms.size() == 3);
  CHECK(cf.terms[0].a == 3);
  CHECK(cf.terms[1].a == 7);
  CHECK(cf.terms[2].a == 15);
  CHECK(denominators(cf) == std::vector<std::int64_t>{3, 22, 333});
  // best approximations of the second kind are exactly the convergents
  const auto best = best_denominators(1.0L / 3.14159265358979323846264338327950288L, 333);
  CHECK(best == std::vector<std::int64_t>{1, 3, 22, 333});
  CHECK(cf.terms[1].p == 7);
  CHECK(cf.terms[2].p == 106);
}

TEST_CASE("rational alpha terminates") {
  const auto half = cf_expand(0.5, 5);
  REQUIRE(half.terms.size() == 1);
  CHECK(half.terms[0].a == 2);
  CHECK(half.terminated);
  CHECK(half.truncated);
  CHECK_FALSE(RotationSystem(0.5).irrational());
  CHECK(cf_expand(0.375, 10).terminated);
}

TEST_CASE("cf_expand rejects bad input") {
  CHECK_THROWS_AS(cf_expand(0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(cf_expand(1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(cf_expand(-0.2, 3), std::invalid_argument);
  CHECK_THROWS_AS(cf_expand(std::nan(""), 3), std::invalid_argument);
  CHECK_THROWS_AS(cf_expand(0.3, 0), std::invalid_argument);
}

TEST_CASE("depth beyond double precision is flagged") {
  const auto cf = cf_expand(kGoldenMean, 200);
  CHECK(cf.truncated);
  CHECK(cf.terms.size() < 200);
  CHECK(cf.terms.back().q <= (std::int64_t{1} << 25));
  // each convergent is a best approximation
  for (std::size_t i = 1; i < cf.terms.size(); ++i)
    CHECK(circle_norm(cf.terms[i].q, kGoldenMean) < circle_norm(cf.terms[i - 1].q, kGoldenMean));
}

TEST_CASE("orbit") {
  const BaseSystem quarter = RotationSystem(0.25);
  CHECK(orbit(quarter, 0.0, 4) == std::vector<double>{0.0, 0.25, 0.5, 0.75});
  const BaseSystem any = RotationSystem(0.37);
  CHECK(orbit(any, 0.3, 1) == std::vector<double>{0.3});

  const auto g = orbit(RotationSystem::golden(), 0.0, 3);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == doctest::Approx(0.6180339887498948482).epsilon(1e-15));
  CHECK(g[2] == doctest::Approx(0.2360679774997896964).epsilon(1e-15));
}

TEST_CASE("rotation does not drift") {
  const double alpha = kGoldenMean;
  for (std::int64_t j : {1000LL, 123456LL, 10000000LL}) {
    const long double ref = std::fmod(0.1L + static_cast<long double>(j) * alpha, 1.0L);
    CHECK(std::abs(rotate(0.1, j, alpha) - static_cast<double>(ref)) < 1e-11);
  }
  CHECK(rotate(0.9, -1, 0.25) == doctest::Approx(0.65));
}

TEST_CASE("golden tower at level 4") {
  const auto sys = RotationSystem::golden();
  const Tower t = build_tower(sys, 4, 1);
  CHECK(t.height(TowerKind::tall) == 13);
  CHECK(t.height(TowerKind::short_) == 8);
  CHECK(t.base(TowerKind::tall).length == doctest::Approx(0.05572809000084121436).epsilon(1e-13));
  CHECK(t.measure(TowerKind::tall) == doctest::Approx(0.72446517001093578672).epsilon(1e-13));
  CHECK(t.measure(TowerKind::tall) + t.measure(TowerKind::short_) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(t.floor_count() == 21);
  // K' = 1: the column is the whole base
  CHECK(t.column_arc(TowerKind::tall, 0, 0).length == t.base(TowerKind::tall).length);
  CHECK(t.column_arc(TowerKind::tall, 0, 0).start == t.base(TowerKind::tall).start);

  const Tower t4 = build_tower(sys, 4, 4);
  for (int l = 0; l < 4; ++l)
    CHECK(t4.column_arc(TowerKind::tall, 0, l).length == doctest::Approx(0.05572809000084121436 / 4).epsilon(1e-13));
}

TEST_CASE("build_tower rejects levels beyond the expansion") {
  const auto sys = RotationSystem(kGoldenMean, 10);
  CHECK_THROWS_AS(build_tower(sys, 9, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_tower(sys, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_tower(RotationSystem(0.5), 0, 1), std::invalid_argument);
}

TEST_CASE("locate") {
  const auto sys = RotationSystem::golden();
  const Tower t = build_tower(sys, 4, 4);
  const Arc c0 = t.column_arc(TowerKind::tall, 0, 0);
  const double x0 = c0.start + 0.5 * c0.length;
  auto cell = t.locate(x0);
  REQUIRE(cell);
  CHECK(cell->floor == 0);
  CHECK(cell->column == 0);
  CHECK(cell->tower == TowerKind::tall);

  const Arc c2 = t.column_arc(TowerKind::tall, 0, 2);
  cell = t.locate(sys.step(c2.start + 0.3 * c2.length));
  REQUIRE(cell);
  CHECK(cell->floor == 1);
  CHECK(cell->column == 2);
  CHECK(cell->tower == TowerKind::tall);
}

TEST_CASE("locate partitions the circle") {
  const auto sys = RotationSystem::golden();
  for (int level : {4, 8}) {
    const Tower t = build_tower(sys, level, 8);
    std::mt19937_64 rng(7);
    std::size_t failures = 0;
    for (int i = 0; i < 100000; ++i) {
      const double x = uniform01(rng);
      const auto cell = t.locate(x);
      if (!cell) {
        ++failures;
        continue;
      }
      // brute force over every floor of both towers
      int hits = 0;
      for (TowerKind k : {TowerKind::tall, TowerKind::short_})
        for (std::int64_t j = 0; j < t.height(k); ++j)
          if (t.floor_arc(k, j).contains(x)) {
            ++hits;
            if (k != cell->tower || j != cell->floor) ++failures;
          }
      if (hits != 1) ++failures;
      if (!t.column_arc(cell->tower, cell->floor, cell->column).contains(x)) ++failures;
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("level_for_height") {
  const auto sys = RotationSystem::golden();
  CHECK(level_for_height(sys, 64) == 8);
  CHECK(level_for_height(sys, 13) == 4);
  CHECK_FALSE(level_for_height(RotationSystem(0.5), 64));
}

TEST_CASE("iid system") {
  const IidSystem s({-1.0, 1.0}, {0.25, 0.75}, 5);
  const BaseSystem b = s;
  const auto w = orbit(b, 0.3, 20000);
  const auto again = orbit(b, 0.3, 20000);
  CHECK(w == again);
  double up = 0.0;
  for (double x : w) {
    CHECK((x == -1.0 || x == 1.0));
    up += x > 0;
  }
  CHECK(up / w.size() == doctest::Approx(0.75).epsilon(0.03));
  CHECK(orbit(b, 0.7, 50) != orbit(b, 0.3, 50));
  CHECK_THROWS_AS(IidSystem({1.0}, {0.5}, 1), std::invalid_argument);
  CHECK_THROWS_AS(IidSystem({1.0, 2.0}, {0.5}, 1), std::invalid_argument);
}
