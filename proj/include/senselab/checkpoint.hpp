#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace senselab {

// Shared on-disk model container: a JSON header plus named binary blobs of
// doubles (little-endian), written in insertion order so identical contents
// produce identical bytes.
struct Checkpoint {
  nlohmann::json meta;
  std::vector<std::pair<std::string, std::vector<double>>> blobs;

  void add_blob(const std::string& name, std::vector<double> values);
  bool has_blob(const std::string& name) const;
  const std::vector<double>& blob(const std::string& name) const;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace senselab
