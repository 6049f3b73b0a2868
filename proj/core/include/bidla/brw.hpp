#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "bidla/engine.hpp"
#include "bidla/lattice.hpp"
#include "bidla/offspring.hpp"
#include "bidla/rng.hpp"
#include "bidla/stacks.hpp"

namespace bidla {

/// Local times of one branching random walk restricted to a domain K:
/// `interior` counts individuals per site of K, `boundary` counts the
/// pioneers frozen per site of the exterior boundary.
struct LocalTimeField {
  std::unordered_map<Site, std::uint64_t, SiteHash> interior;
  std::unordered_map<Site, std::uint64_t, SiteHash> boundary;
  std::uint64_t interior_total = 0;
  std::uint64_t boundary_total = 0;
};

/// Pioneer statistics of a single run: the number frozen on the boundary,
/// the number of distinct boundary sites hit, and the sum of squared
/// per-site counts. Cauchy-Schwarz gives total^2 <= square_sum * support.
struct PioneerStats {
  std::uint64_t total = 0;
  std::uint64_t support = 0;
  std::uint64_t square_sum = 0;
};

/// Explores one BRW tree from `start` depth-first, freezing on the exterior
/// boundary of K. Every individual inside K consumes one instruction from
/// `source`; in stacks mode pass the odometer tracking consumption per site
/// (the same bookkeeping the toppling engine uses, which is what makes the
/// two drivers replay-equivalent). A start site outside K is itself a
/// pioneer and freezes immediately.
LocalTimeField run_brw(const Site& start, const Domain& K,
                       InstructionSource& source, Odometer* odometer,
                       std::uint64_t budget = 1'000'000'000);

/// Stream-mode convenience: instructions drawn sequentially from `stream`.
LocalTimeField run_brw(const Site& start, const Domain& K,
                       RandomStream& stream, const OffspringLaw& law,
                       std::uint64_t budget = 1'000'000'000);

PioneerStats pioneer_stats(const LocalTimeField& field);

struct SurvivalEstimate {
  double radius = 0.0;
  std::uint64_t replicas = 0;
  std::uint64_t survivors = 0;
  double estimate = 0.0;
  double se = 0.0;
};

/// Monte Carlo estimate of P(a BRW from the origin reaches the boundary of
/// B_R) with binomial standard error.
SurvivalEstimate survival_probability_estimate(double radius, int d,
                                               std::uint64_t replicas,
                                               const OffspringLaw& law,
                                               std::uint64_t master_seed,
                                               unsigned workers = 0,
                                               std::uint64_t budget =
                                                   1'000'000'000);

struct WindowEstimate {
  double radius = 0.0;
  double lo = 0.0, hi = 0.0;  // window [lo*R^2, hi*R^2]
  std::uint64_t replicas = 0;
  std::uint64_t survivors = 0;
  std::uint64_t in_window = 0;
  /// Empty when no replica survived (conditional estimate undefined).
  std::optional<double> estimate;
  double se = 0.0;
};

/// Conditional probability that the pioneer count lies in
/// [alpha R^2, beta R^2] given survival to the boundary of B_R.
WindowEstimate conditioned_pioneer_window(double radius, int d, double alpha,
                                          double beta, std::uint64_t replicas,
                                          const OffspringLaw& law,
                                          std::uint64_t master_seed,
                                          unsigned workers = 0,
                                          std::uint64_t budget =
                                              1'000'000'000);

}  // namespace bidla
