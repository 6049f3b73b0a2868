#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <string>

#include "bidla/analysis.hpp"
#include "bidla/ensemble.hpp"
#include "commands.hpp"
#include "output.hpp"

namespace bidla::cli {

namespace {

struct CoverOptions {
  std::string mode = "covering";  // covering | inner
  int d = 3;
  int n = 8;
  double mass_factor = 8.0;  // covering: |eta| = factor * |B_n| at the origin
  double alpha_exp = 0.6;    // inner: fill target B_{n - n^alpha}
  std::uint64_t replicas = 200;
  std::uint64_t seed = 0;
  std::string offspring = "binary";
  std::uint64_t budget = 1'000'000'000;
  unsigned workers = 0;
  std::string out_path;
};

void run_cover(const CoverOptions& opt) {
  const OffspringLaw law = OffspringLaw::parse(opt.offspring);
  const std::map<std::string, std::string> params = {
      {"cmd", "cover"},        {"mode", opt.mode},
      {"d", std::to_string(opt.d)},
      {"n", std::to_string(opt.n)},
      {"mass_factor", std::to_string(opt.mass_factor)},
      {"alpha_exp", std::to_string(opt.alpha_exp)},
      {"replicas", std::to_string(opt.replicas)},
      {"seed", hex_seed(opt.seed)},
      {"offspring", opt.offspring},
  };
  const std::string cfg = config_hash(params);
  LineWriter out(opt.out_path);

  if (opt.mode == "covering") {
    const auto ball_volume =
        static_cast<double>(ball_sites(static_cast<double>(opt.n), opt.d).size());
    const auto mass =
        static_cast<std::int64_t>(std::llround(opt.mass_factor * ball_volume));
    const auto eta = ParticleConfig::point_mass(origin(opt.d), mass);
    const auto rep = covering_experiment(eta, opt.n, opt.d, opt.replicas, law,
                                         opt.seed, opt.workers, opt.budget);
    json rec = base_record("bidla.cover.v1", opt.seed, cfg);
    rec["mass"] = mass;
    rec["replicas"] = rep.replicas;
    rec["failures"] = rep.failures;
    rec["failure_rate"] = rep.failure_rate;
    rec["se"] = rep.se;
    out.write(rec);
    std::fprintf(stderr,
                 "covering: P(B_%d not covered) = %.4f +- %.4f (%llu/%llu)\n",
                 opt.n, rep.failure_rate, rep.se,
                 static_cast<unsigned long long>(rep.failures),
                 static_cast<unsigned long long>(rep.replicas));
    return;
  }

  if (opt.mode == "inner") {
    const auto rep =
        inner_bound_experiment(opt.n, opt.alpha_exp, opt.d, opt.replicas, law,
                               opt.seed, opt.workers, opt.budget);
    json rec = base_record("bidla.inner.v1", opt.seed, cfg);
    rec["replicas"] = rep.replicas;
    rec["filled"] = rep.filled;
    rec["fill_rate"] = rep.fill_rate;
    rec["se"] = rep.se;
    rec["frozen_mean"] = rep.frozen_mean;
    rec["frozen_se"] = rep.frozen_se;
    rec["pioneer_scale"] = rep.pioneer_scale;  // n^(d-1+alpha) for comparison
    out.write(rec);
    std::fprintf(stderr,
                 "inner: fill rate %.4f +- %.4f, frozen mean %.2f "
                 "(scale n^(d-1+alpha) = %.2f)\n",
                 rep.fill_rate, rep.se, rep.frozen_mean, rep.pioneer_scale);
    return;
  }

  throw std::invalid_argument("--mode must be covering or inner");
}

}  // namespace

void register_cover(CLI::App& app) {
  auto opt = std::make_shared<CoverOptions>();
  CLI::App* cmd = app.add_subcommand(
      "cover", "Covering and inner-bound experiments with freezing");
  cmd->add_option("--mode", opt->mode, "covering | inner")
      ->capture_default_str();
  cmd->add_option("--d", opt->d, "Lattice dimension")
      ->check(CLI::Range(1, 6))
      ->capture_default_str();
  cmd->add_option("--n", opt->n, "Target ball radius")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--mass-factor", opt->mass_factor,
                  "covering: particles = factor * |B_n| at the origin")
      ->capture_default_str();
  cmd->add_option("--alpha-exp", opt->alpha_exp,
                  "inner: fill exponent in (1/2, 1)")
      ->capture_default_str();
  cmd->add_option("--replicas", opt->replicas, "Independent replicas")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", opt->seed, "Master seed (required)")->required();
  cmd->add_option("--offspring", opt->offspring,
                  "binary | geometric | poisson | pmf:p0,p1,...")
      ->capture_default_str();
  cmd->add_option("--budget", opt->budget, "Toppling budget per replica")
      ->capture_default_str();
  cmd->add_option("--workers", opt->workers,
                  "Worker threads (default: BIDLA_WORKERS or all cores)");
  cmd->add_option("--out", opt->out_path,
                  "NDJSON report path (stdout when omitted)");
  cmd->callback([opt] { run_cover(*opt); });
}

}  // namespace bidla::cli
