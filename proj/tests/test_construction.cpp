#include "spectral_lab/construction.hpp"
#include "spectral_lab/kernel.hpp"
#include "spectral_lab/numeric.hpp"

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

using namespace spectral_lab;

namespace {

const ConstructionState& cosine_state() {
  static const ConstructionState s = [] {
    SeedFailure f;
    auto st = init(ComposedSampler::cosine(3.0), 0.5, RotationSystem::golden(), 2, ConstructionParams{}, &f);
    REQUIRE(st);
    return *st;
  }();
  return s;
}

// Rejection sampling from s; independent of the kernel's CDF table.
std::vector<double> bump_draws(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  const double top = std::exp(-1.0);
  while (out.size() < n) {
    const double x = 2 * uniform01(rng) - 1;
    if (uniform01(rng) * top < std::exp(-1.0 / (1.0 - x * x))) out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("geometric budgets") {
  const Budgets b = Budgets::geometric(0.5, 2);
  REQUIRE(b.eps_seq.size() == 4);
  double total = 0.0;
  for (std::size_t n = 0; n < b.eps_seq.size(); ++n) {
    CHECK(b.eps_seq[n] == 0.25 * std::ldexp(1.0, -static_cast<int>(n) - 1));
    total += b.eps_seq[n];
  }
  CHECK(total < 0.25);
  CHECK(b.eps_smooth.front() == 0.5 * b.eps_seq[1]);
  Budgets c = b;
  c.set_floor(0.4);
  CHECK(c.ell_seq[1] == 0.1);
  CHECK(c.ell_seq[2] == 0.05);
  CHECK(c.ell_sum(2) == doctest::Approx(0.15));
  CHECK(c.ell_sum(2) < 0.2);
  CHECK_THROWS_AS(Budgets::geometric(0.0, 1), std::invalid_argument);
}

TEST_CASE("shift values") {
  CHECK(shift_values(0.3, 1) == std::vector<double>{0.0});
  const auto two = shift_values(0.2, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == doctest::Approx(-0.2 * 0.31216840803253307534).epsilon(1e-12));
  CHECK(two[1] == -two[0]);

  auto draws = bump_draws(1000000, 17);
  std::nth_element(draws.begin(), draws.begin() + 250000, draws.end());
  CHECK(std::abs(0.2 * draws[250000] - two[0]) < 0.2 * 3e-3);

  for (int K : {3, 8, 16, 64, 256}) {
    const auto s = shift_values(0.1, K);
    REQUIRE(s.size() == static_cast<std::size_t>(K));
    CHECK(std::is_sorted(s.begin(), s.end()));
    for (int l = 0; l < K; ++l) {
      CHECK(std::abs(s[l]) < 0.1);
      CHECK(s[l] == -s[K - 1 - l]);
    }
  }
}

TEST_CASE("shift quantiles against Monte Carlo") {
  auto draws = bump_draws(1000000, 23);
  std::sort(draws.begin(), draws.end());
  const auto s = shift_values(1.0, 8);
  for (int l = 0; l < 8; ++l) {
    const double p = (2.0 * l + 1.0) / 16.0;
    CHECK(std::abs(draws[static_cast<std::size_t>(p * draws.size())] - s[l]) < 3e-3);
  }
}

TEST_CASE("column windows see constant shifts away from the collars") {
  const auto sys = RotationSystem::golden();
  const int K = 16;
  const ShiftLayer layer(build_tower(sys, 8, K), shift_values(0.2, K));
  const Tower& t = layer.tower();
  const std::int64_t h = t.height(TowerKind::tall);
  CHECK(h == 89);
  std::mt19937_64 rng(5);
  int broken = 0;
  for (int i = 0; i < 1000; ++i) {
    const int l = static_cast<int>(rng() % K);
    const Arc col = t.column_arc(TowerKind::tall, 0, l);
    const double w = col.start + col.length * uniform01(rng);
    bool constant = true;
    for (std::int64_t j = 0; j < h; ++j)
      if (layer(sys.point(w, j)) != layer.shifts()[l]) constant = false;
    broken += !constant;
  }
  CHECK(broken <= 1000 * 2 / 16);
}

TEST_CASE("seeding with a supercritical cosine") {
  const auto& s = cosine_state();
  CHECK(s.seed_delta == 0.0);
  CHECK(s.budgets.L0 >= 0.35);
  CHECK(s.curves.smoothed_le.min_value() == s.budgets.L0);
  CHECK(s.budgets.eps_smooth.front() == 0.03125);
}

TEST_CASE("seeding fails around the free operator") {
  SeedFailure f;
  const auto st = init(ComposedSampler::zero(), 0.5, RotationSystem::golden(), 2, ConstructionParams{}, &f);
  CHECK_FALSE(st);
  CHECK(f.floors.size() == ConstructionParams{}.seed_fractions.size());
  for (double x : f.floors) CHECK(x < ConstructionParams{}.seed_margin);
  CHECK(!f.message.empty());
  CHECK_THROWS_AS(init(ComposedSampler::zero(), 0.5, RotationSystem(0.5), 2, ConstructionParams{}, &f),
                  std::invalid_argument);
}

TEST_CASE("zero-shift layer leaves the sampler unchanged") {
  const auto& s = cosine_state();
  const ComposedSampler same = apply_layer(s, 8, 1);
  REQUIRE(same.layers().size() == 1);
  CHECK(same.layers()[0].shifts() == std::vector<double>{0.0});
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double x = uniform01(rng);
    CHECK(same(x) == s.current(x));
  }
}

TEST_CASE("layer increments stay below the previous smoothing size") {
  const auto& s = cosine_state();
  const double eps_prev = s.budgets.eps_smooth.front();
  std::mt19937_64 rng(10);
  for (int K : {2, 8, 16, 64}) {
    const ComposedSampler v = apply_layer(s, 9, K);
    const double bound = *std::max_element(v.layers().back().shifts().begin(), v.layers().back().shifts().end());
    CHECK(v.layers().back().sup_norm() == doctest::Approx(bound));
    CHECK(bound < eps_prev);
    for (int i = 0; i < 20000; ++i) {
      const double x = uniform01(rng);
      CHECK(std::abs(v(x) - s.current(x)) <= bound * (1 + 1e-12));
    }
  }
}

TEST_CASE("verify_step on an unchanged sampler") {
  const auto& s = cosine_state();
  const ComposedSampler same = apply_layer(s, 8, 1);
  const double eps1 = 0.5 * s.budgets.eps_seq[2];
  StepCurves c;
  const LedgerRow row = verify_step(s, same, eps1, &c);
  CHECK(row.increment == 0.0);
  CHECK(row.sup_ok);
  // same atoms, narrower kernel: each new band sits inside an old one
  for (const auto& nb : c.bands.bands)
    CHECK(std::any_of(s.curves.bands.bands.begin(), s.curves.bands.bands.end(),
                      [&](const Band& ob) { return ob.contains(nb); }));
  // the proximity term reduces to the change of mollification size
  const double size_change = cinf_dist(mollify(s.curves.dos, eps1, s.grid, s.params.J), s.curves.smoothed_dos, s.params.J);
  CHECK(row.cinf == doctest::Approx(size_change).epsilon(1e-12));
  CHECK(c.dos.atoms() == s.curves.dos.atoms());

  // keeping the previous size is already outside the open budget interval
  CHECK(s.budgets.eps_smooth.front() == s.budgets.eps_seq[2]);
  CHECK_FALSE(verify_step(s, same, s.budgets.eps_smooth.front()).sup_ok);
}

TEST_CASE("verify_step rejects an over-budget smoothing size before evaluating") {
  const auto& s = cosine_state();
  const ComposedSampler candidate = apply_layer(s, 8, 16);
  const auto t0 = std::chrono::steady_clock::now();
  const LedgerRow row = verify_step(s, candidate, 10.0 * s.budgets.eps_seq[2]);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK_FALSE(row.pass);
  CHECK_FALSE(row.sup_ok);
  CHECK(row.note.find("outside") != std::string::npos);
  CHECK(secs < 0.5);
  CHECK_FALSE(verify_step(s, candidate, 0.0).pass);
}

TEST_CASE("zero steps returns the seed only") {
  const ConstructionResult r = run(ComposedSampler::cosine(3.0), 0.5, 0, RotationSystem::golden(), ConstructionParams{});
  CHECK(r.status == RunStatus::ok);
  CHECK(r.samplers.size() == 1);
  CHECK(r.curves.size() == 1);
  CHECK(r.state->ledger.empty());
  CHECK(r.curves[0].bands.count() > 0);
}

TEST_CASE("direct integral DOS") {
  const EmpiricalMeasure nu({-1.0, 0.5}, {0.25, 0.75});
  const auto d = direct_integral_dos(nu, 0.1, 4);
  CHECK(d.size() == 8);
  CHECK(d.total_mass() == doctest::Approx(1.0));
  const auto s = shift_values(0.1, 4);
  for (double sh : s) {
    CHECK(d.ids(-1.0 + sh) - d.ids(-1.0 + sh - 1e-9) == doctest::Approx(0.0625));
  }
}
