#include <cstdio>
#include <memory>
#include <string>

#include "bidla/engine.hpp"
#include "bidla/rbg.hpp"
#include "bidla/rng.hpp"
#include "commands.hpp"
#include "output.hpp"

namespace bidla::cli {

namespace {

struct AbelianOptions {
  int instances = 100;
  int d = 2;
  int max_mass = 20;
  std::uint64_t seed = 0;
  std::string offspring = "binary";
};

void run_abelian(const AbelianOptions& opt) {
  const OffspringLaw law = OffspringLaw::parse(opt.offspring);
  RandomStream gen(opt.seed);

  // Phase 1: two legal toppling policies on shared stacks must coincide.
  int identical = 0;
  for (int i = 0; i < opt.instances; ++i) {
    const InstructionStacks stacks(gen.next_u64(), opt.d, law);
    ParticleConfig eta;
    const auto mass =
        1 + gen.next_below(static_cast<std::uint32_t>(opt.max_mass));
    for (std::uint32_t p = 0; p < mass; ++p) {
      Site x(opt.d);
      for (int c = 0; c < opt.d; ++c) {
        x[c] = static_cast<coord_t>(gen.next_below(7)) - 3;
      }
      eta.add(x, 1);
    }
    const Domain K = Domain::ball(8.0, opt.d);

    const auto lex = stabilize(eta, K, stacks);
    RandomStream policy_rng(gen.next_u64());
    StabilizeOptions rnd;
    rnd.policy = TopplePolicy::random_unstable;
    rnd.policy_rng = &policy_rng;
    const auto random = stabilize(eta, K, stacks, rnd);
    if (lex.stable == random.stable && lex.frozen == random.frozen &&
        lex.odometer == random.odometer) {
      ++identical;
    }
  }
  std::printf("abelian: %d/%d identical (config, odometer)\n", identical,
              opt.instances);

  // Phase 2: least action, the barrier-growth odometer dominates the legal
  // one pointwise on shared stacks.
  const int la_instances = opt.instances / 2;
  int dominated = 0;
  for (int i = 0; i < la_instances; ++i) {
    const InstructionStacks stacks(gen.next_u64(), opt.d, law);
    const auto sphere = Domain::ball(2.0, opt.d).boundary();
    ParticleConfig eta;
    RandomStream pick = stacks.fresh_stream(0x21);
    for (int p = 0; p < 5; ++p) {
      eta.add(
          sphere[pick.next_below(static_cast<std::uint32_t>(sphere.size()))],
          1);
    }
    auto src = stacks.source();
    Odometer acceptable;
    RandomStream barriers = stacks.fresh_stream(0x22);
    (void)rbg_shell(eta, 2, 12, src, &acceptable, barriers);
    const auto legal = stabilize(eta, Domain::ball(12.0, opt.d), stacks);
    bool ok = true;
    for (const auto& [site, used] : legal.odometer) {
      const auto it = acceptable.find(site);
      if (it == acceptable.end() || it->second < used) {
        ok = false;
        break;
      }
    }
    if (ok) ++dominated;
  }
  std::printf("least action: %d/%d acceptable odometers dominate\n", dominated,
              la_instances);

  if (identical != opt.instances || dominated != la_instances) {
    throw std::logic_error("toppling-order invariants violated");
  }
}

}  // namespace

void register_abelian(CLI::App& app) {
  auto opt = std::make_shared<AbelianOptions>();
  CLI::App* cmd = app.add_subcommand(
      "abelian", "Toppling-order determinism and least-action report");
  cmd->add_option("--instances", opt->instances, "Number of instances")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--d", opt->d, "Lattice dimension")
      ->check(CLI::Range(1, 6))
      ->capture_default_str();
  cmd->add_option("--max-mass", opt->max_mass, "Particles per instance cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", opt->seed, "Master seed (required)")->required();
  cmd->add_option("--offspring", opt->offspring,
                  "binary | geometric | poisson | pmf:p0,p1,...")
      ->capture_default_str();
  cmd->callback([opt] { run_abelian(*opt); });
}

}  // namespace bidla::cli
