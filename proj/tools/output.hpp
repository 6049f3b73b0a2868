#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <json.hpp>
#include <ostream>
#include <string>

#include "bidla/version.hpp"

namespace bidla::cli {

using json = nlohmann::ordered_json;

/// FNV-1a over the canonical "key=value\n" listing of the resolved options;
/// embedded in every output record so a file identifies its configuration.
std::string config_hash(const std::map<std::string, std::string>& params);

std::string hex_seed(std::uint64_t seed);

/// Stamps the reproducibility fields every record carries.
json base_record(const std::string& schema, std::uint64_t seed,
                 const std::string& cfg_hash);

/// Line-oriented writer: stdout when the path is empty or "-".
class LineWriter {
 public:
  explicit LineWriter(const std::string& path);
  void write(const std::string& line);
  void write(const char* line) { write(std::string(line)); }
  void write(const json& record) { write(record.dump()); }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

}  // namespace bidla::cli
