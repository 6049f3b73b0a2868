#include "output.hpp"

#include <cstdio>
#include <iostream>
#include <stdexcept>

namespace bidla::cli {

std::string config_hash(const std::map<std::string, std::string>& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [key, value] : params) {
    mix(key);
    mix("=");
    mix(value);
    mix("\n");
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string hex_seed(std::uint64_t seed) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(seed));
  return buf;
}

json base_record(const std::string& schema, std::uint64_t seed,
                 const std::string& cfg_hash) {
  json j;
  j["schema"] = schema;
  j["seed"] = hex_seed(seed);
  j["config"] = cfg_hash;
  j["version"] = kVersion;
  return j;
}

LineWriter::LineWriter(const std::string& path) {
  if (path.empty() || path == "-") {
    out_ = &std::cout;
    return;
  }
  file_ = std::make_unique<std::ofstream>(path);
  if (!*file_) throw std::invalid_argument("cannot open " + path);
  out_ = file_.get();
}

void LineWriter::write(const std::string& line) { *out_ << line << "\n"; }

}  // namespace bidla::cli
