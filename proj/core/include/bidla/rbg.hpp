#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bidla/engine.hpp"
#include "bidla/lattice.hpp"
#include "bidla/rng.hpp"
#include "bidla/stacks.hpp"

namespace bidla {

using uint128 = unsigned __int128;

/// Distribution of the random barrier height within a shell of width H:
/// P(Z = h) = h^(d-1) / sum_{r=1..H} r^(d-1), h in {1,...,H}. Weights and
/// normalization are exact 128-bit integers; sampling inverts the exact
/// cumulative weights from an unbiased 128-bit uniform draw.
class BarrierLaw {
 public:
  BarrierLaw(int shell_width, int d);

  int shell_width() const { return width_; }
  int dim() const { return dim_; }

  int sample(RandomStream& stream) const;

  uint128 numerator(int h) const;  // h^(d-1)
  uint128 denominator() const { return cum_.back(); }
  double pmf(int h) const;

 private:
  int width_;
  int dim_;
  std::vector<uint128> cum_;  // cum_[h-1] = sum_{r<=h} r^(d-1)
};

/// Width of the next shell: the smallest integer H with
/// H^d >= kappa * N * (log(N+1))^beta, beta = 1 in dimension 3 and 0
/// otherwise (natural logarithm).
int shell_width(std::uint64_t n_prev, int d, double kappa);

struct RbgShellStep {
  int barrier = 0;               // the sampled Z_t
  std::uint64_t green = 0;       // pioneers continuing from occupied sites
  std::uint64_t red = 0;         // non-settling surplus at newly hit sites
  std::uint64_t settled = 0;     // newly occupied sites this step
};

struct RbgShellResult {
  ParticleConfig escaping;       // on the exterior boundary of B_{R2}
  OccupiedSet aggregate;         // A_{N1}: all sites settled on the layers
  std::vector<RbgShellStep> steps;
  std::uint64_t green_total = 0;
  std::uint64_t red_total = 0;
  std::uint64_t settled_total = 0;
  std::uint64_t escaping_total() const { return green_total + red_total; }
};

/// One Random Barrier Growth pass across the shell between integer radii
/// R1 < R2. Particles of eta (supported on the exterior boundary of B_{R1})
/// are processed in lexicographic label order; each probes the sphere at a
/// sampled barrier height, settles at most one particle per newly hit site,
/// and forwards everything else to the exterior boundary of B_{R2}.
///
/// In stacks mode (odometer != nullptr) the whole pass consumes the shared
/// instruction field as one acceptable toppling sequence, so its odometer is
/// comparable with the engine's legal stabilizations.
RbgShellResult rbg_shell(const ParticleConfig& eta, int r1, int r2,
                         InstructionSource& source, Odometer* odometer,
                         RandomStream& barrier_stream,
                         std::uint64_t budget = 1'000'000'000);

struct ShellRecord {
  std::uint64_t t = 0;
  int radius = 0;        // R_t
  int width = 0;         // H_t
  std::uint64_t particles = 0;  // N_t
  std::uint64_t green = 0;
  std::uint64_t red = 0;
};

struct ShellsTrace {
  int r0 = 0;
  std::uint64_t n0 = 0;
  double kappa = 0.0;
  double alpha = 0.0;
  std::vector<ShellRecord> records;
  /// First t with N_t > alpha * N_0 (inf = not observed).
  std::optional<std::uint64_t> t_alpha;
  /// First t with N_t = 0; empty iff the shell cap was reached first.
  std::optional<std::uint64_t> t_end;
  bool shell_cap_reached = false;
};

/// Iterates rbg_shell through shells of width shell_width(N_{t-1}) until
/// extinction or the shell cap.
ShellsTrace rbg_through_shells(const ParticleConfig& eta0, int r0,
                               double kappa, double alpha,
                               InstructionSource& source, Odometer* odometer,
                               RandomStream& barrier_stream,
                               std::uint64_t shell_cap = 256,
                               std::uint64_t budget = 1'000'000'000);

}  // namespace bidla
