#include "bidla/engine.hpp"

#include <algorithm>
#include <set>
#include <span>

namespace bidla {

ParticleConfig ParticleConfig::point_mass(const Site& x, std::int64_t n) {
  ParticleConfig c;
  c.add(x, n);
  return c;
}

void ParticleConfig::add(const Site& x, std::int64_t delta) {
  if (delta == 0) return;
  auto [it, inserted] = counts_.try_emplace(x, 0);
  it->second += delta;
  total_ += delta;
  if (it->second < 0) {
    throw std::logic_error("particle count went negative at " + x.to_string());
  }
  if (it->second == 0) counts_.erase(it);
}

std::vector<std::pair<Site, std::int64_t>> ParticleConfig::sorted() const {
  std::vector<std::pair<Site, std::int64_t>> v(counts_.begin(), counts_.end());
  std::sort(v.begin(), v.end());
  return v;
}

OccupiedSet::OccupiedSet(std::vector<Site> sites)
    : set_(sites.begin(), sites.end()) {}

std::vector<Site> OccupiedSet::sorted() const {
  std::vector<Site> v(set_.begin(), set_.end());
  std::sort(v.begin(), v.end());
  return v;
}

void topple(ParticleConfig& config, Odometer& odometer, const Site& x,
            InstructionSource& source, ToppleMode mode) {
  const std::int64_t have = config.at(x);
  const std::int64_t need = mode == ToppleMode::legal ? 2 : 1;
  if (have < need) {
    throw std::invalid_argument(
        "forbidden toppling at " + x.to_string() + ": " +
        std::to_string(have) + " particle(s), " +
        (mode == ToppleMode::legal ? "legal" : "acceptable") +
        " mode requires " + std::to_string(need));
  }
  const std::uint64_t j = ++odometer[x];
  const unsigned k = source.begin(x, j);
  config.add(x, -1);
  for (unsigned i = 0; i < k; ++i) {
    config.add(step(x, source.next_dir()), 1);
  }
}

namespace {

// Unstable-site scheduling for the three toppling-order policies. The final
// configuration and odometer do not depend on the choice (the Abelian
// property), which the test suites verify bit-exactly.
class Scheduler {
 public:
  Scheduler(TopplePolicy policy, RandomStream* rng)
      : policy_(policy), rng_(rng) {
    if (policy_ == TopplePolicy::random_unstable && rng_ == nullptr) {
      throw std::invalid_argument(
          "random_unstable policy needs StabilizeOptions::policy_rng");
    }
  }

  void mark_unstable(const Site& x) {
    switch (policy_) {
      case TopplePolicy::lexicographic:
        ordered_.insert(x);
        break;
      case TopplePolicy::random_unstable:
        if (index_.try_emplace(x, pool_.size()).second) pool_.push_back(x);
        break;
      case TopplePolicy::depth_first:
        stack_.push_back(x);  // may hold stale duplicates, validated on pop
        break;
    }
  }

  void mark_stable(const Site& x) {
    switch (policy_) {
      case TopplePolicy::lexicographic:
        ordered_.erase(x);
        break;
      case TopplePolicy::random_unstable: {
        auto it = index_.find(x);
        if (it != index_.end()) {
          const std::size_t i = it->second;
          pool_[i] = pool_.back();
          index_[pool_[i]] = i;
          pool_.pop_back();
          index_.erase(it);
        }
        break;
      }
      case TopplePolicy::depth_first:
        break;
    }
  }

  /// Next site to topple, or nullptr when everything is stable. `unstable`
  /// reports whether a candidate still needs toppling.
  const Site* next(const std::function<bool(const Site&)>& unstable) {
    switch (policy_) {
      case TopplePolicy::lexicographic:
        return ordered_.empty() ? nullptr : &*ordered_.begin();
      case TopplePolicy::random_unstable:
        if (pool_.empty()) return nullptr;
        return &pool_[rng_->next_below(
            static_cast<std::uint32_t>(pool_.size()))];
      case TopplePolicy::depth_first:
        while (!stack_.empty()) {
          if (unstable(stack_.back())) return &stack_.back();
          stack_.pop_back();
        }
        return nullptr;
    }
    return nullptr;
  }

 private:
  TopplePolicy policy_;
  RandomStream* rng_;
  std::set<Site> ordered_;
  std::vector<Site> pool_;
  std::unordered_map<Site, std::size_t, SiteHash> index_;
  std::vector<Site> stack_;
};

struct ToppleCounters {
  std::uint64_t topplings = 0;
  std::uint64_t births = 0;
  std::uint64_t deaths = 0;
};

// Legal toppling loop shared by stabilize() and the BIDLA driver. `config`
// holds the full in-flight configuration restricted to K; births landing
// outside K accumulate in `frozen`. `on_first_occupy` fires when a site of K
// goes from empty to occupied.
// `seeds` lists every site that may be unstable on entry; callers with a
// stable-plus-one-particle configuration pass just that site instead of
// paying a full scan.
void run_topplings(ParticleConfig& config, ParticleConfig& frozen,
                   Odometer& odometer, const Domain& K,
                   InstructionSource& source, const StabilizeOptions& opts,
                   ToppleCounters& counters, std::int64_t ledger_base,
                   std::span<const Site> seeds,
                   const std::function<void(const Site&)>& on_first_occupy) {
  Scheduler sched(opts.policy, opts.policy_rng);
  for (const Site& site : seeds) {
    if (config.at(site) > 1) sched.mark_unstable(site);
  }

  const std::function<bool(const Site&)> unstable = [&config](const Site& x) {
    return config.at(x) > 1;
  };

  while (const Site* next = sched.next(unstable)) {
    const Site x = *next;

    if (++counters.topplings > opts.budget) {
      throw BudgetExceededError(counters.topplings - 1, config.total());
    }

    const std::uint64_t j = ++odometer[x];
    const unsigned k = source.begin(x, j);
    config.add(x, -1);
    counters.deaths += 1;
    counters.births += k;
    for (unsigned i = 0; i < k; ++i) {
      const Site y = step(x, source.next_dir());
      if (K.contains(y)) {
        const std::int64_t now = config.at(y) + 1;
        config.add(y, 1);
        if (now == 1 && on_first_occupy) on_first_occupy(y);
        if (now == 2) sched.mark_unstable(y);
      } else {
        frozen.add(y, 1);
      }
    }
    if (config.at(x) < 2) sched.mark_stable(x);

    if (opts.debug_accounting && (counters.topplings & 0xfffff) == 0) {
      std::int64_t recount = 0;
      for (const auto& [site, count] : config.counts()) recount += count;
      for (const auto& [site, count] : frozen.counts()) recount += count;
      const std::int64_t expected =
          ledger_base + static_cast<std::int64_t>(counters.births) -
          static_cast<std::int64_t>(counters.deaths);
      if (recount != expected) {
        throw std::logic_error("mass ledger mismatch: recounted " +
                               std::to_string(recount) + ", expected " +
                               std::to_string(expected));
      }
    }
  }
}

}  // namespace

StabilizationResult stabilize(const ParticleConfig& eta, const Domain& K,
                              const InstructionStacks& stacks,
                              const StabilizeOptions& opts,
                              Odometer initial_odometer) {
  StabilizationResult res;
  res.odometer = std::move(initial_odometer);

  // Mass already outside the domain is frozen where it stands.
  for (const auto& [site, count] : eta.counts()) {
    (K.contains(site) ? res.stable : res.frozen).add(site, count);
  }

  std::vector<Site> seeds;
  seeds.reserve(res.stable.counts().size());
  for (const auto& [site, count] : res.stable.counts()) seeds.push_back(site);

  auto source = stacks.source();
  ToppleCounters counters;
  run_topplings(res.stable, res.frozen, res.odometer, K, source, opts,
                counters, eta.total(), seeds, nullptr);
  res.topplings = counters.topplings;
  res.births = counters.births;
  res.deaths = counters.deaths;

  const std::int64_t expected = eta.total() +
                                static_cast<std::int64_t>(res.births) -
                                static_cast<std::int64_t>(res.deaths);
  if (res.stable.total() + res.frozen.total() != expected) {
    throw std::logic_error("mass ledger mismatch at end of stabilization");
  }
  return res;
}

std::pair<ParticleConfig, ParticleConfig> replay_odometer(
    const ParticleConfig& eta, const Domain& K, const InstructionStacks& stacks,
    const Odometer& odometer) {
  ParticleConfig all;
  for (const auto& [site, count] : eta.counts()) all.add(site, count);
  for (const auto& [site, used] : odometer) {
    for (std::uint64_t j = 1; j <= used; ++j) {
      const Instruction ins = stacks.instruction_at(site, j);
      for (std::uint8_t dir : ins.steps) all.add(step(site, dir), 1);
    }
  }
  for (const auto& [site, used] : odometer) {
    all.add(site, -static_cast<std::int64_t>(used));  // throws if negative
  }
  ParticleConfig inside, frozen;
  for (const auto& [site, count] : all.counts()) {
    (K.contains(site) ? inside : frozen).add(site, count);
  }
  return {std::move(inside), std::move(frozen)};
}

OccupiedSet bidla_step(const OccupiedSet& A, const InstructionStacks& stacks,
                       Odometer& odometer, const StabilizeOptions& opts) {
  ParticleConfig eta;
  for (const Site& x : A.sites()) eta.add(x, 1);
  eta.add(origin(stacks.dim()), 1);
  auto res = stabilize(eta, Domain::all(stacks.dim()), stacks, opts,
                       std::move(odometer));
  odometer = std::move(res.odometer);
  OccupiedSet out;
  for (const auto& [site, count] : res.stable.counts()) out.insert(site);
  return out;
}

BidlaProcess::BidlaProcess(const InstructionStacks& stacks,
                           StabilizeOptions opts)
    : stacks_(&stacks), opts_(opts) {}

std::size_t BidlaProcess::advance() {
  const Domain all = Domain::all(stacks_->dim());
  const Site o = origin(stacks_->dim());
  ++t_;
  last_added_.clear();

  const auto settle = [&](const Site& y) {
    arrivals_.emplace(y, t_);
    max_norm_sq_ = std::max(max_norm_sq_, y.norm_sq());
    last_added_.push_back(y);
  };

  if (config_.at(o) == 0) settle(o);
  config_.add(o, 1);

  // Between steps the configuration is stable, so the origin is the only
  // candidate for instability.
  ParticleConfig no_frozen;
  auto source = stacks_->source();
  ToppleCounters counters;
  const Site seeds[] = {o};
  run_topplings(config_, no_frozen, odometer_, all, source, opts_, counters,
                config_.total(), seeds, settle);
  topplings_ += counters.topplings;
  volume_ += last_added_.size();
  return last_added_.size();
}

bool BidlaProcess::occupied(const Site& x) const { return config_.at(x) >= 1; }

std::vector<Site> BidlaProcess::cluster_sorted() const {
  std::vector<Site> v;
  v.reserve(config_.counts().size());
  for (const auto& [site, count] : config_.counts()) v.push_back(site);
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<std::size_t> jump_chain(const std::vector<std::uint64_t>& volumes) {
  std::vector<std::size_t> taus;
  if (volumes.size() < 2) return taus;
  taus.push_back(1);  // tau_1 = 1 by definition
  std::size_t last = 1;
  for (std::size_t t = 2; t < volumes.size(); ++t) {
    if (volumes[t] != volumes[last]) {
      taus.push_back(t);
      last = t;
    }
  }
  return taus;
}

}  // namespace bidla
