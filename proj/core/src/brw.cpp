#include "bidla/brw.hpp"

#include <stdexcept>

#include "bidla/ensemble.hpp"

namespace bidla {

namespace {

constexpr std::uint64_t kSurvivalExperiment = 0x1;
constexpr std::uint64_t kWindowExperiment = 0x2;

LocalTimeField explore(const Site& start, const Domain& K,
                       InstructionSource& source, Odometer* odometer,
                       std::uint64_t budget) {
  LocalTimeField field;
  std::vector<Site> frontier;  // one entry per live individual
  frontier.push_back(start);
  std::uint64_t processed = 0;

  while (!frontier.empty()) {
    const Site s = frontier.back();
    frontier.pop_back();

    if (!K.contains(s)) {  // pioneer, frozen on the exterior boundary
      ++field.boundary[s];
      ++field.boundary_total;
      continue;
    }
    if (++processed > budget) {
      throw BudgetExceededError(processed - 1,
                                static_cast<std::int64_t>(frontier.size()));
    }
    ++field.interior[s];
    ++field.interior_total;

    const std::uint64_t j = odometer ? ++(*odometer)[s] : 0;
    const unsigned k = source.begin(s, j);
    for (unsigned i = 0; i < k; ++i) {
      frontier.push_back(step(s, source.next_dir()));
    }
  }
  return field;
}

}  // namespace

LocalTimeField run_brw(const Site& start, const Domain& K,
                       InstructionSource& source, Odometer* odometer,
                       std::uint64_t budget) {
  return explore(start, K, source, odometer, budget);
}

LocalTimeField run_brw(const Site& start, const Domain& K,
                       RandomStream& stream, const OffspringLaw& law,
                       std::uint64_t budget) {
  StreamSource source(stream, law, K.dim());
  return explore(start, K, source, nullptr, budget);
}

PioneerStats pioneer_stats(const LocalTimeField& field) {
  PioneerStats st;
  st.total = field.boundary_total;
  st.support = field.boundary.size();
  for (const auto& [site, count] : field.boundary) {
    st.square_sum += count * count;
  }
  return st;
}

SurvivalEstimate survival_probability_estimate(double radius, int d,
                                               std::uint64_t replicas,
                                               const OffspringLaw& law,
                                               std::uint64_t master_seed,
                                               unsigned workers,
                                               std::uint64_t budget) {
  if (replicas == 0) throw std::invalid_argument("replicas must be positive");
  const Domain K = Domain::ball(radius, d);
  const Site o = origin(d);

  std::vector<std::uint8_t> survived(replicas, 0);
  parallel_replicas(replicas, workers, [&](std::uint64_t i) {
    RandomStream stream = replica_stream(master_seed, kSurvivalExperiment, i);
    const LocalTimeField f = run_brw(o, K, stream, law, budget);
    survived[i] = f.boundary_total > 0 ? 1 : 0;
  });

  SurvivalEstimate est;
  est.radius = radius;
  est.replicas = replicas;
  for (auto s : survived) est.survivors += s;
  est.estimate = static_cast<double>(est.survivors) /
                 static_cast<double>(replicas);
  est.se = binomial_se(est.estimate, replicas);
  return est;
}

WindowEstimate conditioned_pioneer_window(double radius, int d, double alpha,
                                          double beta, std::uint64_t replicas,
                                          const OffspringLaw& law,
                                          std::uint64_t master_seed,
                                          unsigned workers,
                                          std::uint64_t budget) {
  if (replicas == 0) throw std::invalid_argument("replicas must be positive");
  if (!(alpha >= 0.0) || !(beta > alpha)) {
    throw std::invalid_argument("window requires 0 <= alpha < beta");
  }
  const Domain K = Domain::ball(radius, d);
  const Site o = origin(d);
  const double r2 = radius * radius;
  const double lo = alpha * r2;
  const double hi = beta * r2;

  std::vector<std::uint8_t> outcome(replicas, 0);  // 0 dead, 1 out, 2 in
  parallel_replicas(replicas, workers, [&](std::uint64_t i) {
    RandomStream stream = replica_stream(master_seed, kWindowExperiment, i);
    const LocalTimeField f = run_brw(o, K, stream, law, budget);
    if (f.boundary_total == 0) return;
    const auto total = static_cast<double>(f.boundary_total);
    outcome[i] = (total >= lo && total <= hi) ? 2 : 1;
  });

  WindowEstimate est;
  est.radius = radius;
  est.lo = alpha;
  est.hi = beta;
  est.replicas = replicas;
  for (auto s : outcome) {
    if (s > 0) ++est.survivors;
    if (s == 2) ++est.in_window;
  }
  if (est.survivors > 0) {
    est.estimate = static_cast<double>(est.in_window) /
                   static_cast<double>(est.survivors);
    est.se = binomial_se(*est.estimate, est.survivors);
  }
  return est;
}

}  // namespace bidla
