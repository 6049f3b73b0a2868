#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "bidla/engine.hpp"
#include "bidla/lattice.hpp"
#include "bidla/offspring.hpp"

namespace bidla {

/// Inner/outer deviation of a cluster from the volume-matched ball of
/// radius r(t): delta_in = max(0, r(t) - min missing norm),
/// delta_out = max(0, max occupied norm - r(t)). The extreme norms are kept
/// as exact squared integers.
struct Deviations {
  double r_of_t = 0.0;
  double delta_in = 0.0;
  double delta_out = 0.0;
  std::uint64_t min_missing_norm_sq = 0;
  std::uint64_t max_occupied_norm_sq = 0;
};

Deviations deviations(const OccupiedSet& A, std::uint64_t t, int d);

/// A is epsilon-symmetric iff some ball sandwich B_{(1-eps)r} <= A <=
/// B_{(1+eps)r} exists, which reduces to M/(1+eps) < m*/(1-eps) for the
/// extreme norms M (occupied) and m* (missing).
bool is_eps_symmetric(std::uint64_t max_occupied_norm_sq,
                      std::uint64_t min_missing_norm_sq, double eps);
bool is_eps_symmetric(const OccupiedSet& A, double eps);

/// Incremental shape metrics along a growing cluster: amortized O(1) per
/// settled site. Sites are scanned in increasing-norm order, and the scan
/// pointer only ever advances because clusters only grow.
class ShapeTracker {
 public:
  explicit ShapeTracker(int d);

  void insert(const Site& x);
  bool contains(const Site& x) const { return occupied_.contains(x); }

  std::uint64_t size() const { return occupied_.size(); }
  std::uint64_t max_occupied_norm_sq() const { return max_norm_sq_; }
  std::uint64_t min_missing_norm_sq();

  Deviations metrics(std::uint64_t t);
  bool eps_symmetric(double eps);

 private:
  void extend_enumeration();

  int d_;
  std::unordered_set<Site, SiteHash> occupied_;
  std::uint64_t max_norm_sq_ = 0;
  std::vector<Site> by_norm_;  // sites of a ball sorted by (norm_sq, lex)
  std::size_t scan_ = 0;
  double reach_ = 0.0;
};

struct CoveringReport {
  std::uint64_t replicas = 0;
  std::uint64_t failures = 0;  // replicas with B_n not covered
  double failure_rate = 0.0;
  double se = 0.0;
};

/// Stabilizes `eta` (supported in B_{n/2}) without freezing, `replicas`
/// times with independent stacks, and reports how often B_n is not covered.
CoveringReport covering_experiment(const ParticleConfig& eta, int n, int d,
                                   std::uint64_t replicas,
                                   const OffspringLaw& law,
                                   std::uint64_t master_seed,
                                   unsigned workers = 0,
                                   std::uint64_t budget = 1'000'000'000);

struct InnerBoundReport {
  std::uint64_t replicas = 0;
  std::uint64_t filled = 0;  // replicas with B_{n - n^alpha} fully settled
  double fill_rate = 0.0;
  double se = 0.0;
  double frozen_mean = 0.0;       // mean frozen count on the sphere
  double frozen_se = 0.0;
  double pioneer_scale = 0.0;     // n^{d-1+alpha}, for side-by-side reporting
  std::vector<std::uint64_t> frozen_counts;
};

/// Releases |B_n| particles from the origin with freezing on the boundary
/// of B_n and records whether B_{n - n^alpha} fills, plus the frozen-pioneer
/// counts. Requires d >= 3 and alpha in (1/2, 1).
InnerBoundReport inner_bound_experiment(int n, double alpha_exp, int d,
                                        std::uint64_t replicas,
                                        const OffspringLaw& law,
                                        std::uint64_t master_seed,
                                        unsigned workers = 0,
                                        std::uint64_t budget =
                                            1'000'000'000);

}  // namespace bidla
