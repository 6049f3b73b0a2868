#include "bidla/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bidla {

void write_pgm_snapshot(
    const std::string& path,
    const std::unordered_map<Site, std::uint64_t, SiteHash>& arrivals,
    std::uint64_t t_max, std::uint64_t master_seed) {
  coord_t min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (const auto& [site, t] : arrivals) {
    if (site.dim != 2) {
      throw std::invalid_argument("snapshots are only defined for d = 2");
    }
    min_x = std::min(min_x, site[0]);
    max_x = std::max(max_x, site[0]);
    min_y = std::min(min_y, site[1]);
    max_y = std::max(max_y, site[1]);
  }
  const int margin = 2;
  const int width = max_x - min_x + 1 + 2 * margin;
  const int height = max_y - min_y + 1 + 2 * margin;
  const int origin_px_x = -min_x + margin;
  const int origin_px_y = max_y + margin;  // rows run top-down

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char buf[128];
  out << "P2\n";
  std::snprintf(buf, sizeof buf, "# seed=0x%016llx t=%llu\n",
                static_cast<unsigned long long>(master_seed),
                static_cast<unsigned long long>(t_max));
  out << buf;
  std::snprintf(buf, sizeof buf,
                "# disc_radius_px=%.6f origin_px=%d,%d (volume-matched disc)\n",
                volume_radius(static_cast<double>(t_max), 2), origin_px_x,
                origin_px_y);
  out << buf;
  out << width << " " << height << "\n255\n";

  std::vector<int> row(static_cast<std::size_t>(width));
  for (int y = max_y + margin; y >= min_y - margin; --y) {
    for (int x = min_x - margin; x <= max_x + margin; ++x) {
      int gray = 255;  // background white
      const auto it = arrivals.find(Site{x, static_cast<coord_t>(y)});
      if (it != arrivals.end()) {
        const double frac =
            t_max > 1 ? static_cast<double>(it->second - 1) /
                            static_cast<double>(t_max - 1)
                      : 0.0;
        gray = static_cast<int>(frac * 254.0);
      }
      row[static_cast<std::size_t>(x - (min_x - margin))] = gray;
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 == row.size() ? '\n' : ' ');
    }
  }
}

}  // namespace bidla
