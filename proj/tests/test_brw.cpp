#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <deque>
#include <vector>

#include "bidla/brw.hpp"
#include "bidla/ensemble.hpp"
#include "bidla/green.hpp"
#include "support/test_support.hpp"

using namespace bidla;
using bidla::testing::ScriptedSource;

namespace {

// Breadth-first exhaust of the same stacks: a different consumption order
// of the identical instruction field must produce the identical local-time
// field (the Harris coupling at work).
LocalTimeField bfs_exhaust(const Site& start, const Domain& K,
                           const InstructionStacks& stacks) {
  LocalTimeField field;
  Odometer odo;
  auto src = stacks.source();
  std::deque<Site> queue = {start};
  while (!queue.empty()) {
    const Site s = queue.front();
    queue.pop_front();
    if (!K.contains(s)) {
      ++field.boundary[s];
      ++field.boundary_total;
      continue;
    }
    ++field.interior[s];
    ++field.interior_total;
    const unsigned k = src.begin(s, ++odo[s]);
    for (unsigned i = 0; i < k; ++i) queue.push_back(step(s, src.next_dir()));
  }
  return field;
}

// Extinction-without-escape probability of the binary BRW on the segment
// {-1,0,1} killed on leaving: the minimal fixed point of u = f(P u) with
// f(s) = (1 + s^2)/2. Survival to the boundary is its complement.
double exact_survival_segment() {
  double u0 = 0.0, v = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const double nv = 0.5 * (1.0 + 0.25 * u0 * u0);
    const double nu0 = 0.5 * (1.0 + nv * nv);
    u0 = nu0;
    v = nv;
  }
  (void)v;
  return 1.0 - u0;
}

}  // namespace

TEST_CASE("the root individual is always counted") {
  const InstructionStacks stacks(1, 1, OffspringLaw::binary_fair());
  const Domain K = Domain::of_sites({origin(1)});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream stream(seed);
    const auto field = run_brw(origin(1), K, stream,
                               OffspringLaw::binary_fair());
    CHECK(field.interior.at(origin(1)) >= 1);
  }
}

TEST_CASE("a start on the exterior boundary freezes immediately") {
  RandomStream stream(4);
  const Domain K = Domain::ball(2.0, 2);
  const Site start{2, 0};  // on the boundary of B_2
  const auto field = run_brw(start, K, stream, OffspringLaw::binary_fair());
  CHECK(field.interior_total == 0);
  CHECK(field.boundary_total == 1);
  CHECK(field.boundary.at(start) == 1);
}

TEST_CASE("stack-mode exploration order does not matter") {
  RandomStream gen(555);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + static_cast<int>(gen.next_below(2));
    const InstructionStacks stacks(gen.next_u64(), d,
                                   OffspringLaw::geometric_half());
    const Domain K = Domain::ball(4.0, d);
    auto src = stacks.source();
    Odometer odo;
    const auto dfs = run_brw(origin(d), K, src, &odo);
    const auto bfs = bfs_exhaust(origin(d), K, stacks);
    CHECK(dfs.interior == bfs.interior);
    CHECK(dfs.boundary == bfs.boundary);
    // Each interior individual consumed exactly one instruction.
    CHECK(dfs.interior == odo);
  }
}

TEST_CASE("pioneer statistics") {
  const InstructionStacks stacks(9, 2, OffspringLaw::binary_fair());
  const Domain K = Domain::of_sites({origin(2)});

  SUBCASE("no pioneers means all-zero stats") {
    ScriptedSource src(stacks);
    src.script(origin(2), 1, {});  // root dies childless
    Odometer odo;
    const auto field = run_brw(origin(2), K, src, &odo);
    const auto st = pioneer_stats(field);
    CHECK(st.total == 0);
    CHECK(st.support == 0);
    CHECK(st.square_sum == 0);
  }

  SUBCASE("distinct pioneer sites: square_sum = total = support") {
    ScriptedSource src(stacks);
    src.script(origin(2), 1,
               {bidla::testing::kPlusX, bidla::testing::kPlusY});
    Odometer odo;
    const auto field = run_brw(origin(2), K, src, &odo);
    const auto st = pioneer_stats(field);
    CHECK(st.total == 2);
    CHECK(st.support == 2);
    CHECK(st.square_sum == 2);
  }

  SUBCASE("clumped pioneers hit the Cauchy-Schwarz equality case") {
    ScriptedSource src(stacks);
    src.script(origin(2), 1,
               {bidla::testing::kPlusX, bidla::testing::kPlusX});
    Odometer odo;
    const auto st = pioneer_stats(run_brw(origin(2), K, src, &odo));
    CHECK(st.total == 2);
    CHECK(st.support == 1);
    CHECK(st.square_sum == 4);
  }

  SUBCASE("Cauchy-Schwarz holds on every random run") {
    RandomStream stream(31);
    const Domain ball = Domain::ball(5.0, 2);
    for (int i = 0; i < 2000; ++i) {
      const auto st = pioneer_stats(
          run_brw(origin(2), ball, stream, OffspringLaw::geometric_half()));
      CHECK(st.total * st.total <= st.square_sum * st.support);
      CHECK(st.support <= st.total);
    }
  }
}

TEST_CASE("mean boundary total is 1 (martingale through the boundary)") {
  constexpr std::uint64_t replicas = 40'000;
  const Domain K = Domain::ball(5.0, 2);
  MeanAccumulator acc;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    RandomStream stream = replica_stream(0xaa, 3, r);
    acc.add(static_cast<double>(
        run_brw(origin(2), K, stream, OffspringLaw::binary_fair())
            .boundary_total));
  }
  CHECK(std::abs(acc.mean() - 1.0) < 3.0 * acc.standard_error());
}

TEST_CASE("interior local-time means match the exact Green table") {
  // On the segment {-1,0,1}: G(0,0) = 2, G(0,+-1) = 1, exit 1/2 each side.
  constexpr std::uint64_t replicas = 60'000;
  const Domain K = Domain::ball(1.5, 1);
  const auto table = GreenTable::solve(K);

  MeanAccumulator at0, at1, exit2;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    RandomStream stream = replica_stream(0xbb, 4, r);
    const auto f = run_brw(origin(1), K, stream, OffspringLaw::binary_fair());
    const auto count = [&](const auto& map, const Site& z) {
      auto it = map.find(z);
      return it == map.end() ? 0.0 : static_cast<double>(it->second);
    };
    at0.add(count(f.interior, Site{0}));
    at1.add(count(f.interior, Site{1}));
    exit2.add(count(f.boundary, Site{2}));
  }
  CHECK(std::abs(at0.mean() - table.value(origin(1), Site{0})) <
        4.0 * at0.standard_error());
  CHECK(std::abs(at1.mean() - table.value(origin(1), Site{1})) <
        4.0 * at1.standard_error());
  CHECK(std::abs(exit2.mean() - table.boundary_hit(origin(1), Site{2})) <
        4.0 * exit2.standard_error());
}

TEST_CASE("survival probability matches the exact fixed-point oracle") {
  const double exact = exact_survival_segment();
  const auto est = survival_probability_estimate(
      1.5, 1, 200'000, OffspringLaw::binary_fair(), 0xdead, 2);
  CHECK(std::abs(est.estimate - exact) < 3.0 * est.se);
}

TEST_CASE("survival estimate validates input and is deterministic") {
  CHECK_THROWS_AS((void)survival_probability_estimate(
                      4.0, 2, 0, OffspringLaw::binary_fair(), 1),
                  std::invalid_argument);
  const auto a = survival_probability_estimate(
      4.0, 2, 5'000, OffspringLaw::binary_fair(), 77, 2);
  const auto b = survival_probability_estimate(
      4.0, 2, 5'000, OffspringLaw::binary_fair(), 77, 1);
  CHECK(a.survivors == b.survivors);  // independent of worker count
  CHECK(a.estimate > 0.0);
  CHECK(a.estimate < 1.0);
}

TEST_CASE("conditioned pioneer window") {
  SUBCASE("degenerate window covers everything") {
    const auto est = conditioned_pioneer_window(
        4.0, 2, 0.0, 1e18, 5'000, OffspringLaw::binary_fair(), 5, 2);
    REQUIRE(est.estimate.has_value());
    CHECK(*est.estimate == 1.0);
    CHECK(est.survivors > 0);
  }
  SUBCASE("window and complement partition the conditional mass") {
    const double alpha = 0.5, beta = 3.0;
    const auto in = conditioned_pioneer_window(
        6.0, 2, alpha, beta, 20'000, OffspringLaw::binary_fair(), 6, 2);
    REQUIRE(in.estimate.has_value());
    const auto below = conditioned_pioneer_window(
        6.0, 2, 0.0, std::nextafter(alpha, 0.0), 20'000,
        OffspringLaw::binary_fair(), 6, 2);
    const auto above = conditioned_pioneer_window(
        6.0, 2, std::nextafter(beta, 4.0), 1e18, 20'000,
        OffspringLaw::binary_fair(), 6, 2);
    REQUIRE(below.estimate.has_value());
    REQUIRE(above.estimate.has_value());
    CHECK(*in.estimate + *below.estimate + *above.estimate ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("no survivors reports an undefined estimate with counts") {
    const auto est = conditioned_pioneer_window(
        60.0, 2, 0.1, 20.0, 3, OffspringLaw::binary_fair(), 7, 1);
    CHECK(est.survivors == 0);
    CHECK_FALSE(est.estimate.has_value());
    CHECK(est.replicas == 3);
  }
  SUBCASE("rejects an empty window") {
    CHECK_THROWS_AS(
        (void)conditioned_pioneer_window(4.0, 2, 2.0, 1.0, 10,
                                         OffspringLaw::binary_fair(), 1),
        std::invalid_argument);
  }
}

TEST_CASE("scaled pioneer MGF stays bounded across radii (smoke)") {
  // Empirical E[exp(lambda * total / R^2)] at small lambda; the scaling
  // theory says this is 1 + O(1/R^2), so the excess times R^2 must stay
  // bounded along the sweep. Thresholds here are generous smoke values.
  const double lambda = 0.1;
  double prev_excess = 0.0;
  for (const double radius : {6.0, 10.0}) {
    MeanAccumulator acc;
    const Domain K = Domain::ball(radius, 2);
    for (std::uint64_t r = 0; r < 30'000; ++r) {
      RandomStream stream = replica_stream(0xcc, 8, r);
      const auto f =
          run_brw(origin(2), K, stream, OffspringLaw::binary_fair());
      acc.add(std::exp(lambda * static_cast<double>(f.boundary_total) /
                       (radius * radius)));
    }
    const double excess = (acc.mean() - 1.0) * radius * radius;
    CHECK(excess > 0.0);
    CHECK(excess < 10.0);
    if (prev_excess > 0.0) CHECK(excess < 3.0 * prev_excess);
    prev_excess = excess;
  }
}

TEST_CASE("pioneer support lower bound from the square sum") {
  // Batch version of the support/square-sum relation: with
  // delta = 1/(2 E[Gamma]), E[support] >= delta (1 - delta E[Gamma]).
  constexpr std::uint64_t replicas = 10'000;
  const Domain K = Domain::ball(6.0, 2);
  MeanAccumulator support, gamma;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    RandomStream stream = replica_stream(0xdd, 9, r);
    const auto st = pioneer_stats(
        run_brw(origin(2), K, stream, OffspringLaw::binary_fair()));
    support.add(static_cast<double>(st.support));
    gamma.add(static_cast<double>(st.square_sum));
  }
  const double delta = 1.0 / (2.0 * gamma.mean());
  const double bound = delta * (1.0 - delta * gamma.mean());  // = delta / 2
  CHECK(support.mean() - 3.0 * support.standard_error() >= bound);
}

TEST_CASE("conditioned window mass stays away from zero across radii") {
  // P(total in [0.1 R^2, 20 R^2] | survival) along a radius sweep; the
  // conditional mass must not drift toward zero as R grows.
  std::vector<double> estimates;
  for (const double radius : {8.0, 16.0, 32.0}) {
    const auto est = conditioned_pioneer_window(
        radius, 2, 0.1, 20.0, 20'000, OffspringLaw::binary_fair(), 0xee, 2);
    REQUIRE(est.estimate.has_value());
    CHECK(est.survivors >= 30);
    estimates.push_back(*est.estimate);
    CHECK(*est.estimate > 0.2);
  }
  CHECK(estimates.back() > 0.5 * estimates.front());
}

TEST_CASE("interior local-time means match the Green table on B_6") {
  constexpr std::uint64_t replicas = 100'000;
  const Domain K = Domain::ball(6.0, 2);
  const auto table = GreenTable::solve(K);
  const auto& sites = table.interior();

  std::vector<double> sum(sites.size(), 0.0), sum2(sites.size(), 0.0);
  std::unordered_map<Site, std::size_t, SiteHash> index;
  for (std::size_t i = 0; i < sites.size(); ++i) index[sites[i]] = i;

  for (std::uint64_t r = 0; r < replicas; ++r) {
    RandomStream stream = replica_stream(0xff, 10, r);
    const auto f = run_brw(origin(2), K, stream, OffspringLaw::binary_fair());
    for (const auto& [z, count] : f.interior) {
      const auto i = index.at(z);
      const double v = static_cast<double>(count);
      sum[i] += v;
      sum2[i] += v * v;
    }
  }
  const auto n = static_cast<double>(replicas);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const double mean = sum[i] / n;
    const double var = (sum2[i] / n - mean * mean) * n / (n - 1);
    const double se = std::sqrt(var / n);
    const double exact = table.value(origin(2), sites[i]);
    CAPTURE(sites[i].to_string());
    CHECK(std::abs(mean - exact) <= 4.0 * se);
  }
}
