#pragma once

#include <CLI11.hpp>

namespace bidla::cli {

// Each registers one subcommand on the app; the callback runs the
// experiment when that subcommand is selected.
void register_simulate(CLI::App& app);
void register_rbg(CLI::App& app);
void register_brw_sweep(CLI::App& app);
void register_green(CLI::App& app);
void register_cover(CLI::App& app);
void register_abelian(CLI::App& app);

}  // namespace bidla::cli
