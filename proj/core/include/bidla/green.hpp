#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "bidla/lattice.hpp"

namespace bidla {

struct GreenSolveOptions {
  /// Enumeration guard for the domain.
  std::size_t site_cap = 20'000;
  /// Dense symmetric solve below this many sites, Gauss-Seidel above.
  std::size_t dense_cap = 4'000;
  double tolerance = 1e-10;
  std::uint64_t max_sweeps = 1'000'000;
  /// Forces the iterative path (used to cross-check the two solvers).
  bool force_gauss_seidel = false;
};

/// Green's function of simple random walk killed on leaving a finite domain
/// K: G_K(x,y) = expected visits to y from x before exiting, solved exactly
/// from the linear system G = I + P_K G. For z on the exterior boundary the
/// same table stores the exit-location probabilities, which coincide with
/// G_K(x,z) under the convention used throughout.
class GreenTable {
 public:
  static GreenTable solve(const Domain& K, const GreenSolveOptions& opts = {});

  int dim() const { return dim_; }
  const std::vector<Site>& interior() const { return interior_; }
  const std::vector<Site>& boundary() const { return boundary_; }
  std::size_t interior_size() const { return interior_.size(); }

  bool in_interior(const Site& x) const { return iidx_.contains(x); }
  bool on_boundary(const Site& z) const { return bidx_.contains(z); }

  /// G_K(x,y) for x in K and y in K or on its exterior boundary.
  double value(const Site& x, const Site& y) const;
  /// Exit-location probability P(S^x leaves K at z), z on the boundary.
  double boundary_hit(const Site& x, const Site& z) const;

  /// max_{x,y} |G(x,y) - G(y,x)| (reversibility diagnostic).
  double max_symmetry_residual() const;
  /// max_x |sum_z boundary_hit(x,z) - 1| (the walk leaves K a.s.).
  double max_exit_row_error() const;

 private:
  GreenTable() = default;
  double g(std::size_t i, std::size_t j) const {
    return g_[i * interior_.size() + j];
  }
  double bh(std::size_t i, std::size_t zb) const {
    return bh_[i * boundary_.size() + zb];
  }
  std::size_t interior_index(const Site& x) const;
  std::size_t boundary_index(const Site& z) const;

  int dim_ = 1;
  std::vector<Site> interior_;
  std::vector<Site> boundary_;
  std::unordered_map<Site, std::size_t, SiteHash> iidx_, bidx_;
  std::vector<double> g_;   // interior x interior
  std::vector<double> bh_;  // interior x boundary
};

/// Right-hand side of the local-time second-moment bound at a boundary
/// site z: G(x,z) + sigma^2 * sum_{y in K} G(x,y) G(y,z)^2.
double second_moment_rhs(const GreenTable& table, const Site& x, const Site& z,
                         double sigma2);

/// | |K| G(0,z) - sum_{y in K} G(y,z) | for a boundary site z; the discrete
/// harmonicity defect of the exit measure seen from the origin.
double harmonic_defect(const GreenTable& table, const Site& z);

}  // namespace bidla
