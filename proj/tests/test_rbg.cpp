#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bidla/brw.hpp"
#include "bidla/ensemble.hpp"
#include "bidla/rbg.hpp"
#include "support/test_support.hpp"

using namespace bidla;
using bidla::testing::ScriptedSource;

namespace {

// Particles at the lexicographically-first sites of the sphere boundary.
ParticleConfig sphere_config(int radius, int d, std::int64_t particles,
                             RandomStream& pick) {
  const auto sphere = Domain::ball(static_cast<double>(radius), d).boundary();
  ParticleConfig eta;
  for (std::int64_t i = 0; i < particles; ++i) {
    eta.add(sphere[pick.next_below(static_cast<std::uint32_t>(sphere.size()))],
            1);
  }
  return eta;
}

bool odometer_inside(const Odometer& h, double radius) {
  for (const auto& [site, used] : h) {
    if (used > 0 && !norm_sq_less_than_r_sq(site.norm_sq(), radius)) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("barrier pmf hand values") {
  const BarrierLaw h1(1, 3);
  CHECK(h1.denominator() == 1);
  CHECK(h1.numerator(1) == 1);
  CHECK(h1.pmf(1) == 1.0);

  const BarrierLaw h2(2, 2);  // weights 1, 2
  CHECK(h2.denominator() == 3);
  CHECK(h2.numerator(1) == 1);
  CHECK(h2.numerator(2) == 2);
  CHECK(h2.pmf(1) == doctest::Approx(1.0 / 3.0));
  CHECK(h2.pmf(2) == doctest::Approx(2.0 / 3.0));

  const BarrierLaw h3(3, 3);  // weights 1, 4, 9
  CHECK(h3.denominator() == 14);
  CHECK(h3.numerator(3) == 9);
  CHECK(h3.pmf(2) == doctest::Approx(4.0 / 14.0));

  CHECK_THROWS_AS((void)BarrierLaw(0, 2), std::invalid_argument);
}

TEST_CASE("barrier normalization is exact in integers (spot sweep)") {
  for (const int d : {1, 2, 3, 4, 5, 6}) {
    for (const int width : {1, 2, 7, 100, 999}) {
      const BarrierLaw law(width, d);
      uint128 sum = 0;
      for (int h = 1; h <= width; ++h) sum += law.numerator(h);
      CHECK(sum == law.denominator());
    }
  }
}

TEST_CASE("barrier sampling matches the exact pmf") {
  const BarrierLaw law(5, 3);
  RandomStream stream(404);
  constexpr std::uint64_t n = 200'000;
  std::array<std::uint64_t, 5> counts{};
  for (std::uint64_t i = 0; i < n; ++i) ++counts[law.sample(stream) - 1];
  for (int h = 1; h <= 5; ++h) {
    const double p = law.pmf(h);
    const double se = std::sqrt(p * (1 - p) / static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(counts[h - 1]) / n - p) < 3.5 * se);
  }
}

TEST_CASE("shell width arithmetic") {
  CHECK(shell_width(100, 3, 4.0) == 13);  // ceil((400 ln 101)^(1/3))
  CHECK(shell_width(100, 4, 4.0) == 5);   // ceil(400^(1/4))
  CHECK(shell_width(1, 3, 4.0) == 2);     // ceil((4 ln 2)^(1/3))
  CHECK(shell_width(1, 4, 1.0) == 1);
  CHECK(shell_width(16, 4, 1.0) == 2);    // exact integer root
  CHECK_THROWS_AS((void)shell_width(0, 3, 4.0), std::invalid_argument);
}

TEST_CASE("rbg_shell with no particles is a no-op") {
  const InstructionStacks stacks(2, 2, OffspringLaw::binary_fair());
  auto src = stacks.source();
  Odometer h;
  RandomStream z = stacks.fresh_stream(1);
  const auto res = rbg_shell(ParticleConfig{}, 2, 10, src, &h, z);
  CHECK(res.escaping.empty());
  CHECK(res.escaping_total() == 0);
  CHECK(res.aggregate.empty());
  CHECK(res.steps.empty());
}

TEST_CASE("a particle dying before its barrier leaves no trace") {
  const InstructionStacks stacks(6, 2, OffspringLaw::binary_fair());
  ScriptedSource src(stacks);
  const Site start{2, 0};
  src.script(start, 1, {});  // the probe BRW dies immediately
  Odometer h;
  RandomStream z = stacks.fresh_stream(2);
  const auto res =
      rbg_shell(ParticleConfig::point_mass(start, 1), 2, 10, src, &h, z);
  CHECK(res.aggregate.empty());
  CHECK(res.escaping_total() == 0);
  REQUIRE(res.steps.size() == 1);
  CHECK(res.steps[0].green == 0);
  CHECK(res.steps[0].red == 0);
  CHECK(res.steps[0].settled == 0);
}

TEST_CASE("escaping particles live on the boundary of the outer ball") {
  RandomStream gen(909);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + static_cast<int>(gen.next_below(2));
    const InstructionStacks stacks(gen.next_u64(), d,
                                   OffspringLaw::geometric_half());
    RandomStream pick = stacks.fresh_stream(7);
    const ParticleConfig eta = sphere_config(3, d, 10, pick);
    auto src = stacks.source();
    Odometer h;
    RandomStream z = stacks.fresh_stream(8);
    const int r2 = 9;
    const auto res = rbg_shell(eta, 3, r2, src, &h, z);

    CHECK(res.escaping_total() ==
          static_cast<std::uint64_t>(res.escaping.total()));
    const Ball outer(static_cast<double>(r2), d);
    for (const auto& [site, count] : res.escaping.counts()) {
      CHECK_FALSE(outer.contains(site));
      bool adjacent = false;
      for (int dir = 0; dir < degree(d); ++dir) {
        adjacent = adjacent || outer.contains(step(site, unsigned(dir)));
      }
      CHECK(adjacent);
    }
    // Settled sites are inside the outer ball, one particle each.
    for (const Site& x : res.aggregate.sorted()) {
      CHECK(outer.contains(x));
    }
    CHECK(res.settled_total == res.aggregate.size());
  }
}

TEST_CASE("per-step accounting identity holds exactly") {
  const InstructionStacks stacks(47, 3, OffspringLaw::binary_fair());
  RandomStream pick = stacks.fresh_stream(3);
  const ParticleConfig eta = sphere_config(4, 3, 30, pick);
  auto src = stacks.source();
  Odometer h;
  RandomStream z = stacks.fresh_stream(4);
  const auto res = rbg_shell(eta, 4, 12, src, &h, z);

  std::uint64_t green = 0, red = 0;
  REQUIRE(res.steps.size() == 30);
  for (const auto& rec : res.steps) {
    green += rec.green;
    red += rec.red;
    CHECK(rec.barrier >= 1);
    CHECK(rec.barrier <= 8);
  }
  CHECK(green == res.green_total);
  CHECK(red == res.red_total);
  CHECK(green + red == static_cast<std::uint64_t>(res.escaping.total()));
}

TEST_CASE("rbg through shells: stopping times") {
  const InstructionStacks stacks(11, 2, OffspringLaw::binary_fair());

  SUBCASE("no particles ends immediately") {
    auto src = stacks.source();
    Odometer h;
    RandomStream z = stacks.fresh_stream(5);
    const auto trace =
        rbg_through_shells(ParticleConfig{}, 2, 4.0, 10.0, src, &h, z);
    REQUIRE(trace.t_end.has_value());
    CHECK(*trace.t_end == 0);
    CHECK(trace.records.empty());
  }

  SUBCASE("a single dying walk gives T_end = 1") {
    ScriptedSource src(stacks);
    const Site start{2, 0};
    src.script(start, 1, {});
    Odometer h;
    RandomStream z = stacks.fresh_stream(6);
    const auto trace = rbg_through_shells(
        ParticleConfig::point_mass(start, 1), 2, 4.0, 10.0, src, &h, z);
    REQUIRE(trace.t_end.has_value());
    CHECK(*trace.t_end == 1);
    REQUIRE(trace.records.size() == 1);
    CHECK(trace.records[0].particles == 0);
  }

  SUBCASE("radii increase by the chosen widths until extinction") {
    RandomStream gen(13);
    for (int trial = 0; trial < 8; ++trial) {
      const InstructionStacks st(gen.next_u64(), 2,
                                 OffspringLaw::binary_fair());
      RandomStream pick = st.fresh_stream(1);
      const ParticleConfig eta = sphere_config(2, 2, 6, pick);
      auto src = st.source();
      Odometer h;
      RandomStream z = st.fresh_stream(2);
      const auto trace = rbg_through_shells(eta, 2, 4.0, 10.0, src, &h, z);
      REQUIRE(trace.t_end.has_value());
      int radius = 2;
      std::uint64_t particles = trace.n0;
      for (const auto& rec : trace.records) {
        CHECK(rec.width == shell_width(particles, 2, 4.0));
        CHECK(rec.radius == radius + rec.width);
        radius = rec.radius;
        particles = rec.particles;
      }
      CHECK(trace.records.back().particles == 0);
    }
  }
}

TEST_CASE("least action: the RBG odometer dominates the legal one") {
  RandomStream gen(0x2a);
  for (int instance = 0; instance < 8; ++instance) {
    const InstructionStacks stacks(gen.next_u64(), 2,
                                   OffspringLaw::binary_fair());
    RandomStream pick = stacks.fresh_stream(21);
    const ParticleConfig eta = sphere_config(2, 2, 5, pick);
    if (eta.empty()) continue;

    auto src = stacks.source();
    Odometer acceptable;
    RandomStream z = stacks.fresh_stream(22);
    (void)rbg_shell(eta, 2, 12, src, &acceptable, z);

    const auto legal = stabilize(eta, Domain::ball(12.0, 2), stacks);
    for (const auto& [site, used] : legal.odometer) {
      auto it = acceptable.find(site);
      const std::uint64_t acc = it == acceptable.end() ? 0 : it->second;
      CHECK(used <= acc);
    }
  }
}

TEST_CASE("confinement coupling: if the RBG stays local, so does BIDLA") {
  RandomStream gen(0x515);
  int usable = 0;
  for (int instance = 0; usable < 10 && instance < 40; ++instance) {
    const InstructionStacks stacks(gen.next_u64(), 2,
                                   OffspringLaw::binary_fair());
    const ParticleConfig eta0 = ParticleConfig::point_mass(origin(2), 5);

    // Acceptable realization: freeze on B_2, then RBG through shells.
    auto src = stacks.source();
    const auto freeze = stabilize(eta0, Domain::ball(2.0, 2), stacks);
    Odometer h = freeze.odometer;
    RandomStream z = stacks.fresh_stream(23);
    const auto trace =
        rbg_through_shells(freeze.frozen, 2, 4.0, 10.0, src, &h, z);
    if (!trace.t_end.has_value() || !odometer_inside(h, 30.0)) continue;
    ++usable;

    const auto legal = stabilize(eta0, Domain::all(2), stacks);
    CHECK(odometer_inside(legal.odometer, 30.0));
  }
  CHECK(usable == 10);
}

TEST_CASE("through shells: particle counts decay and blow-ups are rare") {
  constexpr std::uint64_t replicas = 120;
  const auto sphere = Domain::ball(10.0, 3).boundary();
  std::vector<MeanAccumulator> n_at(4);
  std::uint64_t blowups = 0;
  std::vector<double> totals(replicas);
  std::vector<std::uint8_t> blew(replicas, 0);
  std::vector<std::array<double, 4>> counts(replicas);

  parallel_replicas(replicas, 2, [&](std::uint64_t r) {
    RandomStream stream = replica_stream(0xabc, 11, r);
    ParticleConfig eta;
    for (int p = 0; p < 200; ++p) {
      eta.add(sphere[stream.next_below(
                  static_cast<std::uint32_t>(sphere.size()))],
              1);
    }
    const OffspringLaw law = OffspringLaw::binary_fair();
    StreamSource source(stream, law, 3);
    const auto trace =
        rbg_through_shells(eta, 10, 4.0, 10.0, source, nullptr, stream);
    blew[r] = trace.t_alpha &&
              (!trace.t_end || *trace.t_alpha < *trace.t_end);
    counts[r] = {200.0, 0.0, 0.0, 0.0};
    for (const auto& rec : trace.records) {
      if (rec.t < 4) {
        counts[r][rec.t] = static_cast<double>(rec.particles);
      }
    }
  });
  for (std::uint64_t r = 0; r < replicas; ++r) {
    if (blew[r]) ++blowups;
    for (std::size_t t = 0; t < 4; ++t) n_at[t].add(counts[r][t]);
  }
  CHECK(blowups <= replicas / 10);  // T_alpha before extinction stays rare
  CHECK(n_at[0].mean() > n_at[1].mean());
  CHECK(n_at[1].mean() > n_at[2].mean());
  CHECK(n_at[2].mean() > n_at[3].mean());
}
