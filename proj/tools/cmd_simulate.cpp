#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bidla/analysis.hpp"
#include "bidla/engine.hpp"
#include "bidla/ensemble.hpp"
#include "bidla/io.hpp"
#include "bidla/offspring.hpp"
#include "bidla/stacks.hpp"
#include "commands.hpp"
#include "output.hpp"

namespace bidla::cli {

namespace {

struct SimulateOptions {
  int d = 2;
  std::uint64_t t_max = 1000;
  std::uint64_t seed = 0;
  std::string offspring = "binary";
  std::vector<double> eps = {0.1, 0.25, 0.5};
  std::uint64_t metrics_every = 1;
  std::uint64_t budget = 1'000'000'000;
  std::string trace_path;     // NDJSON, stdout when empty
  std::string jump_path;      // NDJSON view along the jump chain
  std::string snapshot_path;  // PGM, d=2 only
  std::string arrivals_path;  // CSV (coords..., arrival_t)
};

std::string fmt_eps(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

void run_simulate(const SimulateOptions& opt) {
  const OffspringLaw law = OffspringLaw::parse(opt.offspring);
  if (!opt.snapshot_path.empty() && opt.d != 2) {
    throw std::invalid_argument("snapshots are only available for --d 2");
  }

  std::map<std::string, std::string> params = {
      {"cmd", "simulate"},
      {"d", std::to_string(opt.d)},
      {"t_max", std::to_string(opt.t_max)},
      {"seed", hex_seed(opt.seed)},
      {"offspring", opt.offspring},
      {"metrics_every", std::to_string(opt.metrics_every)},
      {"budget", std::to_string(opt.budget)},
  };
  for (double e : opt.eps) params["eps_" + fmt_eps(e)] = "1";
  const std::string cfg = config_hash(params);

  const InstructionStacks stacks(opt.seed, opt.d, law);
  StabilizeOptions engine_opts;
  engine_opts.budget = opt.budget;
  BidlaProcess proc(stacks, engine_opts);
  ShapeTracker tracker(opt.d);

  LineWriter trace(opt.trace_path);
  struct StepRow {
    std::uint64_t t, volume;
    double r, din, dout;
    std::vector<bool> sym;
  };
  std::vector<StepRow> rows;
  std::vector<std::uint64_t> volumes = {0};  // |A(0)| = 0

  for (std::uint64_t t = 1; t <= opt.t_max; ++t) {
    proc.advance();
    for (const Site& site : proc.last_added()) tracker.insert(site);
    volumes.push_back(proc.volume());
    if (t % opt.metrics_every != 0 && t != opt.t_max) continue;

    const auto dev = tracker.metrics(t);
    StepRow row{t, proc.volume(), dev.r_of_t, dev.delta_in, dev.delta_out, {}};
    json rec = base_record("bidla.sim.v1", opt.seed, cfg);
    rec["t"] = t;
    rec["volume"] = proc.volume();
    rec["r_of_t"] = dev.r_of_t;
    rec["delta_in"] = dev.delta_in;
    rec["delta_out"] = dev.delta_out;
    json sym;
    for (double e : opt.eps) {
      const bool flag = tracker.eps_symmetric(e);
      sym[fmt_eps(e)] = flag;
      row.sym.push_back(flag);
    }
    rec["sym"] = sym;
    trace.write(rec);
    rows.push_back(std::move(row));
  }

  // Jump-chain view: the same flags indexed by the change times tau_k.
  if (!opt.jump_path.empty()) {
    LineWriter jumps(opt.jump_path);
    const auto taus = jump_chain(volumes);
    std::size_t row_at = 0;
    for (std::size_t k = 0; k < taus.size(); ++k) {
      while (row_at < rows.size() && rows[row_at].t < taus[k]) ++row_at;
      if (row_at >= rows.size() || rows[row_at].t != taus[k]) continue;
      const StepRow& row = rows[row_at];
      json rec = base_record("bidla.jump.v1", opt.seed, cfg);
      rec["k"] = k + 1;
      rec["tau"] = taus[k];
      rec["volume"] = row.volume;
      rec["delta_in"] = row.din;
      rec["delta_out"] = row.dout;
      json sym;
      for (std::size_t i = 0; i < opt.eps.size(); ++i) {
        sym[fmt_eps(opt.eps[i])] = static_cast<bool>(row.sym[i]);
      }
      rec["sym"] = sym;
      jumps.write(rec);
    }
  }

  if (!opt.snapshot_path.empty()) {
    write_pgm_snapshot(opt.snapshot_path, proc.arrivals(), opt.t_max,
                       opt.seed);
  }

  if (!opt.arrivals_path.empty()) {
    LineWriter csv(opt.arrivals_path);
    std::string header;
    for (int i = 0; i < opt.d; ++i) header += "x" + std::to_string(i) + ",";
    csv.write(header + "arrival_t");
    std::vector<std::pair<Site, std::uint64_t>> sorted(
        proc.arrivals().begin(), proc.arrivals().end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [site, when] : sorted) {
      std::string line;
      for (int i = 0; i < opt.d; ++i) {
        line += std::to_string(site[i]) + ",";
      }
      csv.write(line + std::to_string(when));
    }
  }

  // Summary with the outer-deviation log-log slope (recorded, not asserted).
  json summary = base_record("bidla.sim.summary.v1", opt.seed, cfg);
  summary["t_max"] = opt.t_max;
  summary["volume"] = proc.volume();
  summary["topplings"] = proc.total_topplings();
  std::vector<double> lx, ly;
  for (const StepRow& row : rows) {
    if (row.t >= 64 && row.dout > 0.0) {
      lx.push_back(std::log(static_cast<double>(row.t)));
      ly.push_back(std::log(row.dout));
    }
  }
  if (lx.size() >= 8) {
    summary["delta_out_loglog_slope"] = least_squares(lx, ly).slope;
  } else {
    summary["delta_out_loglog_slope"] = nullptr;
  }
  summary["disc_radius"] = volume_radius(static_cast<double>(opt.t_max), opt.d);
  trace.write(summary);
}

}  // namespace

void register_simulate(CLI::App& app) {
  auto opt = std::make_shared<SimulateOptions>();
  CLI::App* cmd = app.add_subcommand(
      "simulate", "Run one aggregation process and record shape metrics");
  cmd->add_option("--d", opt->d, "Lattice dimension")
      ->check(CLI::Range(1, 6))
      ->capture_default_str();
  cmd->add_option("--t-max", opt->t_max, "Number of particle releases")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", opt->seed, "Master seed (required; no wall-clock)")
      ->required();
  cmd->add_option("--offspring", opt->offspring,
                  "binary | geometric | poisson | pmf:p0,p1,...")
      ->capture_default_str();
  cmd->add_option("--eps", opt->eps, "Symmetry thresholds to monitor")
      ->capture_default_str();
  cmd->add_option("--metrics-every", opt->metrics_every,
                  "Record every k-th step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--budget", opt->budget, "Toppling budget per stabilization")
      ->capture_default_str();
  cmd->add_option("--trace", opt->trace_path,
                  "NDJSON trace path (stdout when omitted)");
  cmd->add_option("--jump-chain", opt->jump_path,
                  "NDJSON metrics along the jump times tau_k");
  cmd->add_option("--snapshot", opt->snapshot_path,
                  "PGM arrival-time snapshot (d=2 only)");
  cmd->add_option("--arrivals", opt->arrivals_path,
                  "CSV of (coords..., arrival_t)");
  cmd->callback([opt] { run_simulate(*opt); });
}

}  // namespace bidla::cli
