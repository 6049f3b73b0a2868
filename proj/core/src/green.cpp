#include "bidla/green.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace bidla {

namespace {

// Interior adjacency as index pairs plus, per interior site, its boundary
// neighbours.
struct Structure {
  std::vector<std::vector<std::size_t>> neighbors;       // interior -> interior
  std::vector<std::vector<std::size_t>> exit_neighbors;  // interior -> boundary
};

Structure build_structure(const std::vector<Site>& interior,
                          const std::unordered_map<Site, std::size_t, SiteHash>& iidx,
                          const std::unordered_map<Site, std::size_t, SiteHash>& bidx,
                          int d) {
  Structure s;
  s.neighbors.resize(interior.size());
  s.exit_neighbors.resize(interior.size());
  for (std::size_t i = 0; i < interior.size(); ++i) {
    for (int dir = 0; dir < degree(d); ++dir) {
      const Site y = step(interior[i], static_cast<unsigned>(dir));
      if (auto it = iidx.find(y); it != iidx.end()) {
        s.neighbors[i].push_back(it->second);
      } else {
        s.exit_neighbors[i].push_back(bidx.at(y));
      }
    }
  }
  return s;
}

void solve_dense(const Structure& s, double inv_2d, std::vector<double>& g) {
  const auto n = static_cast<Eigen::Index>(s.neighbors.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t j : s.neighbors[static_cast<std::size_t>(i)]) {
      m(i, static_cast<Eigen::Index>(j)) -= inv_2d;
    }
  }
  // I - P is symmetric positive definite for a substochastic P.
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("dense Green solve failed to factorize");
  }
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  g.resize(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g[static_cast<std::size_t>(i * n + j)] = inv(i, j);
    }
  }
}

void solve_gauss_seidel(const Structure& s, double inv_2d, double tol,
                        std::uint64_t max_sweeps, std::vector<double>& g) {
  const std::size_t n = s.neighbors.size();
  g.assign(n * n, 0.0);
  // One column per source y: G(., y) = e_y + P G(., y).
  std::vector<double> col(n);
  for (std::size_t y = 0; y < n; ++y) {
    std::fill(col.begin(), col.end(), 0.0);
    double resid = 1.0;
    std::uint64_t sweep = 0;
    while (resid > tol) {
      if (++sweep > max_sweeps) {
        throw std::runtime_error(
            "Gauss-Seidel did not reach tolerance within the sweep cap");
      }
      resid = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        double acc = x == y ? 1.0 : 0.0;
        for (std::size_t nb : s.neighbors[x]) acc += inv_2d * col[nb];
        resid = std::max(resid, std::abs(acc - col[x]));
        col[x] = acc;
      }
    }
    for (std::size_t x = 0; x < n; ++x) g[x * n + y] = col[x];
  }
}

}  // namespace

GreenTable GreenTable::solve(const Domain& K, const GreenSolveOptions& opts) {
  GreenTable t;
  t.dim_ = K.dim();
  t.interior_ = K.sites(opts.site_cap);
  t.boundary_ = K.boundary(opts.site_cap);
  if (t.interior_.empty()) {
    throw std::invalid_argument("Green solve needs a nonempty domain");
  }
  for (std::size_t i = 0; i < t.interior_.size(); ++i) {
    t.iidx_.emplace(t.interior_[i], i);
  }
  for (std::size_t i = 0; i < t.boundary_.size(); ++i) {
    t.bidx_.emplace(t.boundary_[i], i);
  }

  const Structure s = build_structure(t.interior_, t.iidx_, t.bidx_, t.dim_);
  const double inv_2d = 1.0 / degree(t.dim_);

  if (!opts.force_gauss_seidel && t.interior_.size() <= opts.dense_cap) {
    solve_dense(s, inv_2d, t.g_);
  } else {
    solve_gauss_seidel(s, inv_2d, opts.tolerance, opts.max_sweeps, t.g_);
  }

  // Exit-location probabilities: one step from an interior neighbour of z.
  const std::size_t n = t.interior_.size();
  const std::size_t b = t.boundary_.size();
  t.bh_.assign(n * b, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const double gxy = t.g_[x * n + y];
      if (gxy == 0.0) continue;
      for (std::size_t zb : s.exit_neighbors[y]) {
        t.bh_[x * b + zb] += inv_2d * gxy;
      }
    }
  }
  return t;
}

std::size_t GreenTable::interior_index(const Site& x) const {
  auto it = iidx_.find(x);
  if (it == iidx_.end()) {
    throw std::invalid_argument("site " + x.to_string() +
                                " is not in the domain");
  }
  return it->second;
}

std::size_t GreenTable::boundary_index(const Site& z) const {
  auto it = bidx_.find(z);
  if (it == bidx_.end()) {
    throw std::invalid_argument("site " + z.to_string() +
                                " is not on the exterior boundary");
  }
  return it->second;
}

double GreenTable::value(const Site& x, const Site& y) const {
  const std::size_t i = interior_index(x);
  if (auto it = iidx_.find(y); it != iidx_.end()) return g(i, it->second);
  return bh(i, boundary_index(y));
}

double GreenTable::boundary_hit(const Site& x, const Site& z) const {
  return bh(interior_index(x), boundary_index(z));
}

double GreenTable::max_symmetry_residual() const {
  const std::size_t n = interior_.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      worst = std::max(worst, std::abs(g(i, j) - g(j, i)));
    }
  }
  return worst;
}

double GreenTable::max_exit_row_error() const {
  const std::size_t n = interior_.size();
  const std::size_t b = boundary_.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t z = 0; z < b; ++z) sum += bh(i, z);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double second_moment_rhs(const GreenTable& table, const Site& x, const Site& z,
                         double sigma2) {
  if (!table.on_boundary(z)) {
    throw std::invalid_argument("second_moment_rhs needs z on the boundary");
  }
  double acc = table.boundary_hit(x, z);
  double sum = 0.0;
  for (const Site& y : table.interior()) {
    const double gyz = table.boundary_hit(y, z);
    sum += table.value(x, y) * gyz * gyz;
  }
  return acc + sigma2 * sum;
}

double harmonic_defect(const GreenTable& table, const Site& z) {
  const Site o = origin(table.dim());
  if (!table.in_interior(o)) {
    throw std::invalid_argument("harmonic defect needs the origin inside K");
  }
  const double lead =
      static_cast<double>(table.interior_size()) * table.boundary_hit(o, z);
  double sum = 0.0;
  for (const Site& y : table.interior()) sum += table.boundary_hit(y, z);
  return std::abs(lead - sum);
}

}  // namespace bidla
