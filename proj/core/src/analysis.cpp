#include "bidla/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bidla/ensemble.hpp"

namespace bidla {

namespace {

constexpr std::uint64_t kCoveringExperiment = 0x11;
constexpr std::uint64_t kInnerBoundExperiment = 0x12;

void sort_by_norm(std::vector<Site>& sites) {
  std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
    const auto na = a.norm_sq(), nb = b.norm_sq();
    return na != nb ? na < nb : a < b;
  });
}

}  // namespace

ShapeTracker::ShapeTracker(int d) : d_(d) {
  reach_ = 4.0;
  by_norm_ = ball_sites(reach_, d_);
  sort_by_norm(by_norm_);
}

void ShapeTracker::extend_enumeration() {
  // Appending the next annulus keeps the scanned prefix stable: every new
  // site has a strictly larger norm than anything already enumerated.
  reach_ += 4.0;
  std::vector<Site> grown = ball_sites(reach_, d_);
  sort_by_norm(grown);
  by_norm_ = std::move(grown);
}

void ShapeTracker::insert(const Site& x) {
  if (occupied_.insert(x).second) {
    max_norm_sq_ = std::max(max_norm_sq_, x.norm_sq());
  }
}

std::uint64_t ShapeTracker::min_missing_norm_sq() {
  while (true) {
    while (scan_ < by_norm_.size()) {
      if (!occupied_.contains(by_norm_[scan_])) {
        return by_norm_[scan_].norm_sq();
      }
      ++scan_;
    }
    extend_enumeration();
  }
}

Deviations ShapeTracker::metrics(std::uint64_t t) {
  Deviations dev;
  dev.r_of_t = volume_radius(static_cast<double>(t), d_);
  dev.max_occupied_norm_sq = max_norm_sq_;
  dev.min_missing_norm_sq = min_missing_norm_sq();
  const double m_star = std::sqrt(static_cast<double>(dev.min_missing_norm_sq));
  const double m_occ =
      occupied_.empty() ? 0.0
                        : std::sqrt(static_cast<double>(max_norm_sq_));
  dev.delta_in = std::max(0.0, dev.r_of_t - m_star);
  dev.delta_out = std::max(0.0, m_occ - dev.r_of_t);
  return dev;
}

bool ShapeTracker::eps_symmetric(double eps) {
  return is_eps_symmetric(max_norm_sq_, min_missing_norm_sq(), eps);
}

Deviations deviations(const OccupiedSet& A, std::uint64_t t, int d) {
  ShapeTracker tracker(d);
  for (const Site& x : A.sites()) tracker.insert(x);
  return tracker.metrics(t);
}

bool is_eps_symmetric(std::uint64_t max_occupied_norm_sq,
                      std::uint64_t min_missing_norm_sq, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0,1)");
  }
  // M/(1+eps) < m*/(1-eps), squared to stay in exact integer factors.
  const double lhs =
      static_cast<double>(max_occupied_norm_sq) * (1.0 - eps) * (1.0 - eps);
  const double rhs =
      static_cast<double>(min_missing_norm_sq) * (1.0 + eps) * (1.0 + eps);
  return lhs < rhs;
}

bool is_eps_symmetric(const OccupiedSet& A, double eps) {
  if (A.empty()) throw std::invalid_argument("cluster must be nonempty");
  ShapeTracker tracker(A.sites().begin()->dim);
  for (const Site& x : A.sites()) tracker.insert(x);
  return tracker.eps_symmetric(eps);
}

CoveringReport covering_experiment(const ParticleConfig& eta, int n, int d,
                                   std::uint64_t replicas,
                                   const OffspringLaw& law,
                                   std::uint64_t master_seed, unsigned workers,
                                   std::uint64_t budget) {
  if (replicas == 0) throw std::invalid_argument("replicas must be positive");
  const Ball half(static_cast<double>(n) / 2.0, d);
  for (const auto& [site, count] : eta.counts()) {
    if (!half.contains(site)) {
      throw std::invalid_argument("configuration must be supported in B_{n/2}");
    }
  }
  const std::vector<Site> target = ball_sites(static_cast<double>(n), d);

  std::vector<std::uint8_t> failed(replicas, 0);
  parallel_replicas(replicas, workers, [&](std::uint64_t i) {
    const std::uint64_t seed =
        replica_stream(master_seed, kCoveringExperiment, i).next_u64();
    const InstructionStacks stacks(seed, d, law);
    StabilizeOptions opts;
    opts.budget = budget;
    const auto res = stabilize(eta, Domain::all(d), stacks, opts);
    for (const Site& z : target) {
      if (res.stable.at(z) == 0) {
        failed[i] = 1;
        break;
      }
    }
  });

  CoveringReport rep;
  rep.replicas = replicas;
  for (auto f : failed) rep.failures += f;
  rep.failure_rate =
      static_cast<double>(rep.failures) / static_cast<double>(replicas);
  rep.se = binomial_se(rep.failure_rate, replicas);
  return rep;
}

InnerBoundReport inner_bound_experiment(int n, double alpha_exp, int d,
                                        std::uint64_t replicas,
                                        const OffspringLaw& law,
                                        std::uint64_t master_seed,
                                        unsigned workers,
                                        std::uint64_t budget) {
  if (replicas == 0) throw std::invalid_argument("replicas must be positive");
  if (d < 3) throw std::invalid_argument("inner-bound experiment needs d >= 3");
  if (!(alpha_exp > 0.5) || !(alpha_exp < 1.0)) {
    throw std::invalid_argument("alpha must lie in (1/2, 1)");
  }

  const auto nd = static_cast<double>(n);
  const Domain K = Domain::ball(nd, d);
  const std::vector<Site> inner =
      ball_sites(nd - std::pow(nd, alpha_exp), d);
  const auto mass =
      static_cast<std::int64_t>(ball_sites(nd, d).size());
  const ParticleConfig eta = ParticleConfig::point_mass(origin(d), mass);

  std::vector<std::uint8_t> filled(replicas, 0);
  std::vector<std::uint64_t> frozen(replicas, 0);
  parallel_replicas(replicas, workers, [&](std::uint64_t i) {
    const std::uint64_t seed =
        replica_stream(master_seed, kInnerBoundExperiment, i).next_u64();
    const InstructionStacks stacks(seed, d, law);
    StabilizeOptions opts;
    opts.budget = budget;
    const auto res = stabilize(eta, K, stacks, opts);
    frozen[i] = static_cast<std::uint64_t>(res.frozen.total());
    filled[i] = 1;
    for (const Site& z : inner) {
      if (res.stable.at(z) == 0) {
        filled[i] = 0;
        break;
      }
    }
  });

  InnerBoundReport rep;
  rep.replicas = replicas;
  rep.frozen_counts = frozen;
  MeanAccumulator acc;
  for (std::uint64_t i = 0; i < replicas; ++i) {
    rep.filled += filled[i];
    acc.add(static_cast<double>(frozen[i]));
  }
  rep.fill_rate =
      static_cast<double>(rep.filled) / static_cast<double>(replicas);
  rep.se = binomial_se(rep.fill_rate, replicas);
  rep.frozen_mean = acc.mean();
  rep.frozen_se = acc.standard_error();
  rep.pioneer_scale = std::pow(nd, d - 1 + alpha_exp);
  return rep;
}

}  // namespace bidla
