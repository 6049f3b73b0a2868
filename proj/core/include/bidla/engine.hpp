#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bidla/lattice.hpp"
#include "bidla/rng.hpp"
#include "bidla/stacks.hpp"

namespace bidla {

/// Particle counts eta : Z^d -> N with the total cached. Sites absent from
/// the map hold zero particles.
class ParticleConfig {
 public:
  using Map = std::unordered_map<Site, std::int64_t, SiteHash>;

  ParticleConfig() = default;
  static ParticleConfig point_mass(const Site& x, std::int64_t n);

  std::int64_t at(const Site& x) const {
    auto it = counts_.find(x);
    return it == counts_.end() ? 0 : it->second;
  }
  void add(const Site& x, std::int64_t delta);
  std::int64_t total() const { return total_; }
  const Map& counts() const { return counts_; }
  bool empty() const { return counts_.empty(); }

  std::vector<std::pair<Site, std::int64_t>> sorted() const;

  friend bool operator==(const ParticleConfig& a, const ParticleConfig& b) {
    return a.total_ == b.total_ && a.counts_ == b.counts_;
  }

 private:
  Map counts_;
  std::int64_t total_ = 0;
};

/// Per-site count of instructions consumed (the stack pointers).
using Odometer = std::unordered_map<Site, std::uint64_t, SiteHash>;

/// Presence set for settled particles: the cluster A(t), kept separate from
/// in-flight particle counts.
class OccupiedSet {
 public:
  using Set = std::unordered_set<Site, SiteHash>;

  OccupiedSet() = default;
  explicit OccupiedSet(std::vector<Site> sites);

  bool contains(const Site& x) const { return set_.contains(x); }
  void insert(const Site& x) { set_.insert(x); }
  std::size_t size() const { return set_.size(); }
  bool empty() const { return set_.empty(); }
  const Set& sites() const { return set_; }
  std::vector<Site> sorted() const;

  friend bool operator==(const OccupiedSet& a, const OccupiedSet& b) {
    return a.set_ == b.set_;
  }

 private:
  Set set_;
};

enum class ToppleMode { legal, acceptable };
enum class TopplePolicy { lexicographic, random_unstable, depth_first };

/// Thrown when a stabilization exceeds its toppling budget; carries the
/// partial progress so the caller can report before aborting.
class BudgetExceededError : public std::runtime_error {
 public:
  BudgetExceededError(std::uint64_t topplings, std::int64_t active)
      : std::runtime_error("toppling budget exceeded after " +
                           std::to_string(topplings) + " topplings (" +
                           std::to_string(active) + " particles in flight)"),
        topplings_performed(topplings),
        particles_in_flight(active) {}

  std::uint64_t topplings_performed;
  std::int64_t particles_in_flight;
};

struct StabilizeOptions {
  TopplePolicy policy = TopplePolicy::lexicographic;
  std::uint64_t budget = 1'000'000'000;
  /// Recounts the mass ledger against the maps every 2^20 topplings.
  /// Defaults on in debug builds.
  bool debug_accounting =
#ifdef NDEBUG
      false;
#else
      true;
#endif
  /// Required for the random_unstable policy.
  RandomStream* policy_rng = nullptr;
};

struct StabilizationResult {
  ParticleConfig stable;  // the configuration inside the domain
  ParticleConfig frozen;  // frozen particles on the exterior boundary
  Odometer odometer;
  std::uint64_t topplings = 0;
  std::uint64_t births = 0;
  std::uint64_t deaths = 0;
};

/// One toppling at x: consumes instruction odometer[x]+1, replaces one
/// particle at x by the instruction's children. Legal requires at least two
/// particles at x, acceptable at least one; anything else is a hard error.
void topple(ParticleConfig& config, Odometer& odometer, const Site& x,
            InstructionSource& source, ToppleMode mode);

/// Repeatedly topples unstable sites of K (legally) until the configuration
/// is stable in K. Children stepping outside K freeze on the exterior
/// boundary and are never toppled. Pass Domain::all(d) for full
/// stabilization, where criticality guarantees a.s. termination and the
/// budget converts pathologies into a reported error.
///
/// An `initial_odometer` continues a partially consumed stack field, so the
/// frozen particles of one phase can be released in a later phase against
/// the same stacks.
StabilizationResult stabilize(const ParticleConfig& eta, const Domain& K,
                              const InstructionStacks& stacks,
                              const StabilizeOptions& opts = {},
                              Odometer initial_odometer = {});

/// Rebuilds the outcome of a toppling sequence purely from the consumed
/// stack prefix: final = eta + all births recorded in the stacks up to the
/// odometer - one death per consumed instruction. Returns (inside-K config,
/// frozen-on-boundary config). Throws std::logic_error if the odometer is
/// inconsistent with eta (negative mass).
std::pair<ParticleConfig, ParticleConfig> replay_odometer(
    const ParticleConfig& eta, const Domain& K, const InstructionStacks& stacks,
    const Odometer& odometer);

/// One BIDLA step: stabilization of A + one particle at the origin. The
/// odometer carries the consumed stack prefix across steps.
OccupiedSet bidla_step(const OccupiedSet& A, const InstructionStacks& stacks,
                       Odometer& odometer, const StabilizeOptions& opts = {});

/// The BIDLA process A(0) = {}, A(t+1) = S(A(t) + 1_0), with persistent
/// state so long runs cost one stabilization per step. Records the step at
/// which each site settled and the running extremes used by shape metrics.
class BidlaProcess {
 public:
  explicit BidlaProcess(const InstructionStacks& stacks,
                        StabilizeOptions opts = {});

  /// A(t) -> A(t+1); returns the number of sites added.
  std::size_t advance();

  std::uint64_t time() const { return t_; }
  std::uint64_t volume() const { return volume_; }
  int dim() const { return stacks_->dim(); }

  bool occupied(const Site& x) const;
  std::vector<Site> cluster_sorted() const;
  /// Settling step per occupied site.
  const std::unordered_map<Site, std::uint64_t, SiteHash>& arrivals() const {
    return arrivals_;
  }
  /// Sites settled by the most recent advance().
  const std::vector<Site>& last_added() const { return last_added_; }
  /// Max squared norm over occupied sites (0 when empty).
  std::uint64_t max_occupied_norm_sq() const { return max_norm_sq_; }

  const Odometer& odometer() const { return odometer_; }
  std::uint64_t total_topplings() const { return topplings_; }

 private:
  const InstructionStacks* stacks_;
  StabilizeOptions opts_;
  ParticleConfig config_;  // always stable between steps
  Odometer odometer_;
  std::unordered_map<Site, std::uint64_t, SiteHash> arrivals_;
  std::vector<Site> last_added_;
  std::uint64_t t_ = 0;
  std::uint64_t volume_ = 0;
  std::uint64_t max_norm_sq_ = 0;
  std::uint64_t topplings_ = 0;
};

/// Indices tau_k of the jump process: tau_1 = 1, then the successive times
/// at which the recorded cluster volume changes. Input is |A(t)| for
/// t = 0, 1, ..., using that BIDLA clusters only grow.
std::vector<std::size_t> jump_chain(const std::vector<std::uint64_t>& volumes);

}  // namespace bidla
