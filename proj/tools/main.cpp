// bidla: batch driver for lattice aggregation experiments.
//
// Subcommands: simulate | rbg | brw-sweep | green | cover | abelian.
// Exit codes: 0 success, 1 configuration error, 2 invariant violation,
// 3 toppling-budget abort.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>

#include "bidla/engine.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Internal aggregation driven by critical branching random "
               "walks: simulation and verification toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key=value configuration file; command-line "
                                 "flags override file entries");

  bidla::cli::register_simulate(app);
  bidla::cli::register_rbg(app);
  bidla::cli::register_brw_sweep(app);
  bidla::cli::register_green(app);
  bidla::cli::register_cover(app);
  bidla::cli::register_abelian(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const bidla::BudgetExceededError& e) {
    std::fprintf(stderr, "budget abort: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 1;
  } catch (const std::length_error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 1;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 1;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
