#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "bidla/lattice.hpp"
#include "bidla/rng.hpp"

using namespace bidla;

TEST_CASE("ball_sites enumerates strict Euclidean balls in lex order") {
  const auto line = ball_sites(1.5, 1);
  REQUIRE(line.size() == 3);
  CHECK(line[0] == Site{-1});
  CHECK(line[1] == Site{0});
  CHECK(line[2] == Site{1});

  CHECK(ball_sites(0.0, 3).empty());
  CHECK(ball_sites(-2.0, 2).empty());

  // ||e_1|| = 1 is not < 1, so B_1 is the origin alone.
  const auto unit = ball_sites(1.0, 2);
  REQUIRE(unit.size() == 1);
  CHECK(unit[0] == (Site{0, 0}));

  const auto plane = ball_sites(2.5, 2);
  CHECK(std::is_sorted(plane.begin(), plane.end()));
  for (const Site& z : plane) CHECK(z.norm_sq() < 2.5 * 2.5);
}

TEST_CASE("ball membership is exact at integer boundaries") {
  // r = 5 exactly: norm_sq 25 must be excluded, 24 included.
  CHECK(norm_sq_less_than_r_sq(24, 5.0));
  CHECK_FALSE(norm_sq_less_than_r_sq(25, 5.0));
  CHECK(norm_sq_less_than_r_sq(25, std::nextafter(5.0, 6.0)));
  CHECK_FALSE(norm_sq_less_than_r_sq(0, 0.0));
  CHECK(norm_sq_less_than_r_sq(0, 1e-300));
  CHECK_FALSE(norm_sq_less_than_r_sq(1, 1e-300));
  CHECK(norm_sq_less_than_r_sq(1'000'000'000'000ULL, 1e9 + 1));
  // Huge radii: everything in range is inside.
  CHECK(norm_sq_less_than_r_sq(~0ULL, 1e200));
}

TEST_CASE("ball cardinality is nondecreasing in the radius") {
  for (int d = 1; d <= 3; ++d) {
    std::size_t prev = 0;
    for (double r = 0.0; r < 6.0; r += 0.3) {
      const auto count = ball_sites(r, d).size();
      CHECK(count >= prev);
      prev = count;
    }
  }
}

TEST_CASE("ball_sites is closed under signed permutations of coordinates") {
  RandomStream rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng.next_below(2));
    const double r = 1.0 + 4.0 * rng.next_unit();
    const auto sites = ball_sites(r, d);
    std::set<Site> base(sites.begin(), sites.end());

    // Random signed permutation.
    std::vector<int> perm(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = d - 1; i > 0; --i) {
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[rng.next_below(static_cast<std::uint32_t>(i + 1))]);
    }
    std::vector<int> sign(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      sign[static_cast<std::size_t>(i)] = rng.next_below(2) ? 1 : -1;
    }

    for (const Site& z : sites) {
      Site w(d);
      for (int i = 0; i < d; ++i) {
        w[i] = sign[static_cast<std::size_t>(i)] *
               z[perm[static_cast<std::size_t>(i)]];
      }
      CHECK(base.contains(w));
    }
  }
}

TEST_CASE("exterior boundary") {
  const std::vector<Site> single = {Site{0, 0}};
  const auto nb = exterior_boundary(single, 2);
  REQUIRE(nb.size() == 4);
  CHECK(nb[0] == (Site{-1, 0}));
  CHECK(nb[1] == (Site{0, -1}));
  CHECK(nb[2] == (Site{0, 1}));
  CHECK(nb[3] == (Site{1, 0}));

  CHECK(exterior_boundary(std::vector<Site>{}, 2).empty());

  const std::vector<Site> seg = {Site{-1}, Site{0}, Site{1}};
  const auto ends = exterior_boundary(seg, 1);
  REQUIRE(ends.size() == 2);
  CHECK(ends[0] == Site{-2});
  CHECK(ends[1] == Site{2});
}

TEST_CASE("boundary of a ball domain is disjoint from it and adjacent to it") {
  for (int d = 1; d <= 3; ++d) {
    const Domain K = Domain::ball(3.2, d);
    const auto inside = K.sites();
    const auto edge = K.boundary();
    for (const Site& z : edge) {
      CHECK_FALSE(K.contains(z));
      bool touches = false;
      for (int dir = 0; dir < degree(d); ++dir) {
        touches = touches || K.contains(step(z, static_cast<unsigned>(dir)));
      }
      CHECK(touches);
    }
    // No boundary site is enumerated inside.
    std::set<Site> in(inside.begin(), inside.end());
    for (const Site& z : edge) CHECK_FALSE(in.contains(z));
  }
}

TEST_CASE("volume_radius") {
  CHECK(volume_radius(20000.0, 2) ==
        doctest::Approx(std::sqrt(20000.0 / std::numbers::pi)).epsilon(1e-12));
  CHECK(volume_radius(0.0, 3) == 0.0);
  CHECK(volume_radius(4.0 * std::numbers::pi / 3.0, 3) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)volume_radius(1.0, 7), std::out_of_range);
  CHECK_THROWS_AS((void)volume_radius(-1.0, 2), std::invalid_argument);
}

TEST_CASE("domain enumeration honors the cap") {
  const Domain K = Domain::ball(12.0, 3);
  CHECK_THROWS_AS((void)K.sites(100), std::length_error);
  CHECK_THROWS_AS((void)Domain::all(2).sites(), std::logic_error);
}

TEST_CASE("explicit domains deduplicate and sort") {
  const Domain K = Domain::of_sites({Site{1}, Site{0}, Site{1}});
  const auto sites = K.sites();
  REQUIRE(sites.size() == 2);
  CHECK(sites[0] == Site{0});
  CHECK(sites[1] == Site{1});
  CHECK(K.contains(Site{0}));
  CHECK_FALSE(K.contains(Site{2}));
}
