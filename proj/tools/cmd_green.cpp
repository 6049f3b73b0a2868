#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <string>

#include "bidla/green.hpp"
#include "commands.hpp"
#include "output.hpp"

namespace bidla::cli {

namespace {

struct GreenOptions {
  int d = 1;
  double radius = 1.5;
  std::string dump_path;
  std::size_t site_cap = 20'000;
  bool gauss_seidel = false;
};

void run_green(const GreenOptions& opt) {
  GreenSolveOptions solve_opts;
  solve_opts.site_cap = opt.site_cap;
  solve_opts.force_gauss_seidel = opt.gauss_seidel;
  const Domain K = Domain::ball(opt.radius, opt.d);
  const auto table = GreenTable::solve(K, solve_opts);

  const Site o = origin(opt.d);
  std::printf("domain: ball R=%g d=%d, %zu interior sites, %zu boundary "
              "sites (%s solver)\n",
              opt.radius, opt.d, table.interior().size(),
              table.boundary().size(),
              opt.gauss_seidel ? "gauss-seidel" : "dense");
  std::printf("G(0,0)=%.10f\n", table.value(o, o));
  Site e1(opt.d);
  e1[0] = 1;
  if (table.in_interior(e1)) {
    std::printf("G(0,e1)=%.10f\n", table.value(o, e1));
  }

  const double sym = table.max_symmetry_residual();
  const double row = table.max_exit_row_error();
  std::printf("max |G(x,y)-G(y,x)| = %.3e\n", sym);
  std::printf("max |sum_z exit(x,z) - 1| = %.3e\n", row);

  // Diagnostics, not contracts: the hitting-probability shape ratio and the
  // harmonicity defect of the exit measure.
  double kappa_hat = 0.0;
  for (const Site& z : table.boundary()) {
    const double dist = std::sqrt(static_cast<double>(distance_sq(o, z)));
    kappa_hat = std::max(kappa_hat, table.boundary_hit(o, z) *
                                        std::pow(dist, opt.d - 1));
  }
  std::printf("diagnostic kappa_hat = max_z G(0,z)*|z|^(d-1) = %.6f\n",
              kappa_hat);
  if (opt.d > 2) {
    double defect = 0.0;
    for (const Site& z : table.boundary()) {
      defect = std::max(defect, harmonic_defect(table, z));
    }
    std::printf("max harmonic defect = %.6f\n", defect);
  }

  if (!opt.dump_path.empty()) {
    LineWriter csv(opt.dump_path);
    std::string header;
    for (int i = 0; i < opt.d; ++i) header += "x" + std::to_string(i) + ",";
    for (int i = 0; i < opt.d; ++i) header += "y" + std::to_string(i) + ",";
    csv.write(header + "value");
    const auto row_of = [&](const Site& x, const Site& y, double value) {
      std::string line;
      for (int i = 0; i < opt.d; ++i) line += std::to_string(x[i]) + ",";
      for (int i = 0; i < opt.d; ++i) line += std::to_string(y[i]) + ",";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", value);
      return line + buf;
    };
    for (const Site& x : table.interior()) {
      for (const Site& y : table.interior()) {
        csv.write(row_of(x, y, table.value(x, y)));
      }
      for (const Site& z : table.boundary()) {
        csv.write(row_of(x, z, table.boundary_hit(x, z)));
      }
    }
  }

  if (sym > 1e-10 || row > 1e-10) {
    throw std::logic_error("Green table failed its exactness invariants");
  }
}

}  // namespace

void register_green(CLI::App& app) {
  auto opt = std::make_shared<GreenOptions>();
  CLI::App* cmd = app.add_subcommand(
      "green", "Solve the killed-walk Green table for a ball domain");
  cmd->add_option("--d", opt->d, "Lattice dimension")
      ->check(CLI::Range(1, 6))
      ->capture_default_str();
  cmd->add_option("--radius", opt->radius, "Ball radius")
      ->capture_default_str();
  cmd->add_option("--dump", opt->dump_path, "CSV dump of (x, y, value)");
  cmd->add_option("--site-cap", opt->site_cap, "Domain enumeration cap")
      ->capture_default_str();
  cmd->add_flag("--gauss-seidel", opt->gauss_seidel,
                "Force the iterative solver");
  cmd->callback([opt] { run_green(*opt); });
}

}  // namespace bidla::cli
