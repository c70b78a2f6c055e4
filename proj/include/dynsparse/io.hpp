#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dynsparse/models.hpp"

namespace dynsparse {

/// Refusal to replace a file that was produced under a different config.
class OverwriteError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Output directory bound to one config hash. Every file F written through it
/// gets a sidecar F.json carrying the hash. Existing files are replaced only
/// when their sidecar carries the same hash, or when `force` is set.
class OutputDir {
public:
  OutputDir(std::filesystem::path root, std::string config_hash, bool force);

  const std::filesystem::path& root() const { return root_; }
  const std::string& config_hash() const { return hash_; }

  /// Raw little-endian float64 array, complex interleaved. Frames are the
  /// slowest axis; shape is {frames, height, width}.
  void write_stack(const std::string& name, const DynamicImage& img, Field field, nlohmann::json extra = {}) const;
  void write_vector(const std::string& name, const Vec& v, Field field, nlohmann::json extra = {}) const;
  /// 8-bit P5 preview scaled from [min, max] of `pixels`; the sidecar records both.
  void write_pgm(const std::string& name, int width, int height, const RealVec& pixels, nlohmann::json extra = {}) const;
  void write_text(const std::string& name, const std::string& contents, nlohmann::json extra = {}) const;

  /// Throws OverwriteError if `name` may not be written.
  void claim(const std::string& name) const;

private:
  void write_bytes(const std::string& name, const std::string& bytes, nlohmann::json sidecar) const;

  std::filesystem::path root_;
  std::string hash_;
  bool force_;
};

struct LoadedArray {
  std::vector<long long> shape;
  Field field = Field::Real;
  std::string config_hash;
  Vec values;
};

/// Reads an array written by OutputDir::write_stack / write_vector.
LoadedArray read_array(const std::filesystem::path& path);

std::string array_bytes(const Vec& v, Field field);
/// FNV-1a 64 as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);
/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// 8-bit binary PGM, linearly scaled so lo maps to 0 and hi to 255.
std::string encode_pgm(int width, int height, const RealVec& pixels, double lo, double hi);

}  // namespace dynsparse
