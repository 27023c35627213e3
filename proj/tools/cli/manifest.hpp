#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "phasebeam/io.hpp"

namespace phasebeam::cli {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Run record written next to the outputs. Output entries are keyed by file
/// name relative to the output directory and carry a SHA-256 digest.
class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> arguments);

  void set(const std::string& key, io::Json value);
  void add_input(const std::filesystem::path& path);
  /// Records name (relative to out_dir); array files add both halves.
  void add_output(const std::filesystem::path& out_dir, const std::string& name);
  void add_array_output(const std::filesystem::path& out_dir, const std::string& base);

  const std::map<std::string, std::string>& outputs() const noexcept { return outputs_; }
  io::Json to_json() const;
  void write(const std::filesystem::path& out_dir) const;

 private:
  std::string command_;
  std::vector<std::string> arguments_;
  io::Json extra_ = io::Json::object();
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
};

}  // namespace phasebeam::cli
