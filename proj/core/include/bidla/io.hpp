#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "bidla/lattice.hpp"

namespace bidla {

/// Writes a d=2 cluster as a portable graymap (P2): pixel intensity encodes
/// the settling step rescaled to 0..254, early arrivals dark, background
/// white. Header comments carry the seed and the radius of the
/// volume-matched disc in pixel coordinates, so the overlay of the cluster
/// against that disc can be reproduced from the file alone.
void write_pgm_snapshot(
    const std::string& path,
    const std::unordered_map<Site, std::uint64_t, SiteHash>& arrivals,
    std::uint64_t t_max, std::uint64_t master_seed);

}  // namespace bidla
