#include "bidla/rbg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bidla/brw.hpp"

namespace bidla {

namespace {

uint128 int_pow(std::uint64_t base, int exp) {
  uint128 r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Support must lie on the exterior boundary of the ball of radius `r`:
// outside the ball, adjacent to it.
void check_on_sphere(const ParticleConfig& eta, int r, int d) {
  const Ball ball(static_cast<double>(r), d);
  for (const auto& [site, count] : eta.counts()) {
    if (ball.contains(site)) {
      throw std::invalid_argument("particle at " + site.to_string() +
                                  " lies inside B_" + std::to_string(r));
    }
    bool adjacent = false;
    for (int dir = 0; dir < degree(d) && !adjacent; ++dir) {
      adjacent = ball.contains(step(site, static_cast<unsigned>(dir)));
    }
    if (!adjacent) {
      throw std::invalid_argument("particle at " + site.to_string() +
                                  " is not on the boundary of B_" +
                                  std::to_string(r));
    }
  }
}

std::vector<Site> label_order(const ParticleConfig& eta) {
  std::vector<Site> labels;
  labels.reserve(static_cast<std::size_t>(eta.total()));
  for (const auto& [site, count] : eta.sorted()) {
    for (std::int64_t i = 0; i < count; ++i) labels.push_back(site);
  }
  return labels;
}

}  // namespace

BarrierLaw::BarrierLaw(int shell_width, int d) : width_(shell_width), dim_(d) {
  if (shell_width < 1) {
    throw std::invalid_argument("shell width must be at least 1");
  }
  if (d < 1 || d > kMaxDim) {
    throw std::out_of_range("barrier dimension out of range");
  }
  cum_.resize(static_cast<std::size_t>(shell_width));
  uint128 acc = 0;
  for (int h = 1; h <= shell_width; ++h) {
    acc += int_pow(static_cast<std::uint64_t>(h), d - 1);
    cum_[static_cast<std::size_t>(h - 1)] = acc;
  }
}

uint128 BarrierLaw::numerator(int h) const {
  if (h < 1 || h > width_) throw std::out_of_range("barrier height out of range");
  return int_pow(static_cast<std::uint64_t>(h), dim_ - 1);
}

double BarrierLaw::pmf(int h) const {
  return static_cast<double>(static_cast<long double>(numerator(h)) /
                             static_cast<long double>(denominator()));
}

int BarrierLaw::sample(RandomStream& stream) const {
  const uint128 total = denominator();
  // Unbiased uniform in [0, total) by rejection on a 128-bit draw.
  const uint128 span = ~uint128{0};
  const uint128 limit = span - (span % total + 1) % total;
  uint128 u;
  do {
    u = (static_cast<uint128>(stream.next_u64()) << 64) | stream.next_u64();
  } while (u > limit);
  const uint128 target = u % total;
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
  return static_cast<int>(it - cum_.begin()) + 1;
}

int shell_width(std::uint64_t n_prev, int d, double kappa) {
  if (n_prev == 0) {
    throw std::invalid_argument(
        "shell width is undefined once the process has died out");
  }
  if (d < 1 || d > kMaxDim) throw std::out_of_range("dimension out of range");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");

  const double n = static_cast<double>(n_prev);
  const double target =
      kappa * n * (d == 3 ? std::log(n + 1.0) : 1.0);
  int h = std::max(1, static_cast<int>(std::ceil(std::pow(target, 1.0 / d))));
  // Fix float edges: h must be the smallest integer with h^d >= target.
  while (h > 1 && std::pow(static_cast<double>(h - 1), d) >= target) --h;
  while (std::pow(static_cast<double>(h), d) < target) ++h;
  return h;
}

RbgShellResult rbg_shell(const ParticleConfig& eta, int r1, int r2,
                         InstructionSource& source, Odometer* odometer,
                         RandomStream& barrier_stream, std::uint64_t budget) {
  if (r2 <= r1 || r1 < 1) {
    throw std::invalid_argument("rbg_shell needs integer radii 1 <= R1 < R2");
  }
  const int d = eta.empty() ? 1 : eta.counts().begin()->first.dim;
  if (!eta.empty()) check_on_sphere(eta, r1, d);

  RbgShellResult res;
  if (eta.empty()) return res;

  const BarrierLaw barrier(r2 - r1, d);
  const Domain outer = Domain::ball(static_cast<double>(r2), d);
  const std::vector<Site> labels = label_order(eta);

  for (const Site& start : labels) {
    RbgShellStep rec;
    rec.barrier = barrier.sample(barrier_stream);
    const Domain probe =
        Domain::ball(static_cast<double>(r1 + rec.barrier), d);

    const LocalTimeField hit = run_brw(start, probe, source, odometer, budget);

    // Pioneer sites in lexicographic order for a reproducible pass.
    std::vector<std::pair<Site, std::uint64_t>> sites(hit.boundary.begin(),
                                                      hit.boundary.end());
    std::sort(sites.begin(), sites.end());

    for (const auto& [x, arrivals] : sites) {
      std::uint64_t continuing = arrivals;
      bool newly_hit = false;
      if (!res.aggregate.contains(x)) {
        // One particle settles at a newly hit site, the rest move on.
        res.aggregate.insert(x);
        newly_hit = true;
        rec.settled += 1;
        continuing -= 1;
      }
      for (std::uint64_t i = 0; i < continuing; ++i) {
        const LocalTimeField esc = run_brw(x, outer, source, odometer, budget);
        for (const auto& [z, count] : esc.boundary) {
          res.escaping.add(z, static_cast<std::int64_t>(count));
        }
        (newly_hit ? rec.red : rec.green) += esc.boundary_total;
      }
    }

    res.green_total += rec.green;
    res.red_total += rec.red;
    res.settled_total += rec.settled;
    res.steps.push_back(rec);
  }

  if (static_cast<std::uint64_t>(res.escaping.total()) !=
      res.escaping_total()) {
    throw std::logic_error("escaping-particle ledger mismatch in rbg_shell");
  }
  return res;
}

ShellsTrace rbg_through_shells(const ParticleConfig& eta0, int r0,
                               double kappa, double alpha,
                               InstructionSource& source, Odometer* odometer,
                               RandomStream& barrier_stream,
                               std::uint64_t shell_cap, std::uint64_t budget) {
  ShellsTrace trace;
  trace.r0 = r0;
  trace.n0 = static_cast<std::uint64_t>(eta0.total());
  trace.kappa = kappa;
  trace.alpha = alpha;

  const double limit = alpha * static_cast<double>(trace.n0);
  if (static_cast<double>(trace.n0) > limit) trace.t_alpha = 0;
  if (trace.n0 == 0) {
    trace.t_end = 0;
    return trace;
  }

  ParticleConfig eta = eta0;
  int radius = r0;
  const int d = eta.counts().begin()->first.dim;

  for (std::uint64_t t = 1;; ++t) {
    if (t > shell_cap) {
      trace.shell_cap_reached = true;
      break;
    }
    const std::uint64_t n_prev = static_cast<std::uint64_t>(eta.total());
    const int width = shell_width(n_prev, d, kappa);
    const int next_radius = radius + width;

    RbgShellResult shell = rbg_shell(eta, radius, next_radius, source,
                                     odometer, barrier_stream, budget);

    ShellRecord rec;
    rec.t = t;
    rec.radius = next_radius;
    rec.width = width;
    rec.particles = shell.escaping_total();
    rec.green = shell.green_total;
    rec.red = shell.red_total;
    trace.records.push_back(rec);

    if (!trace.t_alpha && static_cast<double>(rec.particles) > limit) {
      trace.t_alpha = t;
    }
    radius = next_radius;
    eta = std::move(shell.escaping);
    if (rec.particles == 0) {
      trace.t_end = t;
      break;
    }
  }
  return trace;
}

}  // namespace bidla
