#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bidla/ensemble.hpp"
#include "bidla/rbg.hpp"
#include "commands.hpp"
#include "output.hpp"

namespace bidla::cli {

namespace {

struct RbgOptions {
  int d = 3;
  int r0 = 10;
  std::int64_t n0 = 200;
  double kappa = 4.0;
  double alpha = 10.0;
  std::uint64_t replicas = 100;
  std::uint64_t seed = 0;
  std::string offspring = "binary";
  std::uint64_t shell_cap = 256;
  std::uint64_t budget = 1'000'000'000;
  unsigned workers = 0;
  std::string trace_path;
  std::string summary_path;
};

void run_rbg(const RbgOptions& opt) {
  const OffspringLaw law = OffspringLaw::parse(opt.offspring);
  const std::map<std::string, std::string> params = {
      {"cmd", "rbg"},
      {"d", std::to_string(opt.d)},
      {"r0", std::to_string(opt.r0)},
      {"n0", std::to_string(opt.n0)},
      {"kappa", std::to_string(opt.kappa)},
      {"alpha", std::to_string(opt.alpha)},
      {"replicas", std::to_string(opt.replicas)},
      {"seed", hex_seed(opt.seed)},
      {"offspring", opt.offspring},
      {"shell_cap", std::to_string(opt.shell_cap)},
      {"budget", std::to_string(opt.budget)},
  };
  const std::string cfg = config_hash(params);

  const auto sphere =
      Domain::ball(static_cast<double>(opt.r0), opt.d).boundary();
  std::vector<ShellsTrace> traces(opt.replicas);
  parallel_replicas(opt.replicas, opt.workers, [&](std::uint64_t r) {
    RandomStream stream = replica_stream(opt.seed, 0xb6, r);
    ParticleConfig eta;
    for (std::int64_t p = 0; p < opt.n0; ++p) {
      eta.add(
          sphere[stream.next_below(static_cast<std::uint32_t>(sphere.size()))],
          1);
    }
    StreamSource source(stream, law, opt.d);
    traces[r] = rbg_through_shells(eta, opt.r0, opt.kappa, opt.alpha, source,
                                   nullptr, stream, opt.shell_cap, opt.budget);
  });

  LineWriter trace(opt.trace_path);
  for (std::uint64_t r = 0; r < opt.replicas; ++r) {
    for (const auto& rec : traces[r].records) {
      json row = base_record("bidla.rbg.v1", opt.seed, cfg);
      row["replica"] = r;
      row["t"] = rec.t;
      row["R"] = rec.radius;
      row["H"] = rec.width;
      row["N"] = rec.particles;
      row["green"] = rec.green;
      row["red"] = rec.red;
      trace.write(row);
    }
    json end = base_record("bidla.rbg.end.v1", opt.seed, cfg);
    end["replica"] = r;
    if (traces[r].t_end) {
      end["T_end"] = *traces[r].t_end;
    } else {
      end["T_end"] = nullptr;
    }
    if (traces[r].t_alpha) {
      end["T_alpha"] = *traces[r].t_alpha;
    } else {
      end["T_alpha"] = nullptr;
    }
    end["overflow"] = traces[r].shell_cap_reached;
    trace.write(end);
  }

  if (!opt.summary_path.empty()) {
    LineWriter csv(opt.summary_path);
    csv.write("replica,n0,t_end,t_alpha,r_end,n_max,overflow");
    for (std::uint64_t r = 0; r < opt.replicas; ++r) {
      const auto& tr = traces[r];
      std::uint64_t n_max = tr.n0;
      int r_end = tr.r0;
      for (const auto& rec : tr.records) {
        n_max = std::max(n_max, rec.particles);
        r_end = rec.radius;
      }
      csv.write(std::to_string(r) + "," + std::to_string(tr.n0) + "," +
                (tr.t_end ? std::to_string(*tr.t_end) : "") + "," +
                (tr.t_alpha ? std::to_string(*tr.t_alpha) : "") + "," +
                std::to_string(r_end) + "," + std::to_string(n_max) + "," +
                (tr.shell_cap_reached ? "1" : "0"));
    }
  }

  std::uint64_t blowups = 0, ended = 0;
  for (const auto& tr : traces) {
    if (tr.t_alpha && (!tr.t_end || *tr.t_alpha < *tr.t_end)) ++blowups;
    if (tr.t_end) ++ended;
  }
  std::fprintf(stderr,
               "rbg: %llu replicas, %llu reached T_end, %llu saw T_alpha "
               "before T_end\n",
               static_cast<unsigned long long>(opt.replicas),
               static_cast<unsigned long long>(ended),
               static_cast<unsigned long long>(blowups));
}

}  // namespace

void register_rbg(CLI::App& app) {
  auto opt = std::make_shared<RbgOptions>();
  CLI::App* cmd = app.add_subcommand(
      "rbg", "Iterate the barrier growth process through shells");
  cmd->add_option("--d", opt->d, "Lattice dimension")
      ->check(CLI::Range(1, 6))
      ->capture_default_str();
  cmd->add_option("--r0", opt->r0, "Initial sphere radius")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--n0", opt->n0, "Particles on the initial sphere")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--kappa", opt->kappa, "Shell-width constant")
      ->capture_default_str();
  cmd->add_option("--alpha", opt->alpha, "Blow-up threshold multiplier")
      ->capture_default_str();
  cmd->add_option("--replicas", opt->replicas, "Independent replicas")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", opt->seed, "Master seed (required)")->required();
  cmd->add_option("--offspring", opt->offspring,
                  "binary | geometric | poisson | pmf:p0,p1,...")
      ->capture_default_str();
  cmd->add_option("--shell-cap", opt->shell_cap, "Maximum number of shells")
      ->capture_default_str();
  cmd->add_option("--budget", opt->budget, "Exploration budget per replica")
      ->capture_default_str();
  cmd->add_option("--workers", opt->workers,
                  "Worker threads (default: BIDLA_WORKERS or all cores)");
  cmd->add_option("--trace", opt->trace_path,
                  "NDJSON shell trace (stdout when omitted)");
  cmd->add_option("--summary", opt->summary_path, "Per-replica summary CSV");
  cmd->callback([opt] { run_rbg(*opt); });
}

}  // namespace bidla::cli
