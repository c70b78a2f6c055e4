#include "dynsparse/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dynsparse {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {


void append_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double read_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path sidecar_of(const fs::path& p) { return fs::path(p.string() + ".json"); }

}  // namespace

std::string array_bytes(const Vec& v, Field field) {
  std::string out;
  out.reserve(static_cast<std::size_t>(v.size()) * (field == Field::Complex ? 16 : 8));
  for (Index i = 0; i < v.size(); ++i) {
    append_f64(out, v[i].real());
    if (field == Field::Complex) append_f64(out, v[i].imag());
  }
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string encode_pgm(int width, int height, const RealVec& pixels, double lo, double hi) {
  check_size("pgm pixels", static_cast<Index>(width) * height, pixels.size());
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  const double span = hi - lo;
  for (Index i = 0; i < pixels.size(); ++i) {
    double t = span > 0.0 ? (pixels[i] - lo) / span : 0.0;
    if (!(t >= 0.0)) t = 0.0;  // also maps NaN to black
    if (t > 1.0) t = 1.0;
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
  }
  return out;
}

OutputDir::OutputDir(fs::path root, std::string config_hash, bool force)
    : root_(std::move(root)), hash_(std::move(config_hash)), force_(force) {
  fs::create_directories(root_);
}

void OutputDir::claim(const std::string& name) const {
  if (force_) return;
  const fs::path file = root_ / name;
  if (!fs::exists(file)) return;
  const fs::path side = sidecar_of(file);
  std::string found = "<no sidecar>";
  if (fs::exists(side)) {
    try {
      found = json::parse(read_file(side)).value("config_hash", std::string("<none>"));
    } catch (const json::exception&) {
      found = "<unreadable sidecar>";
    }
  }
  if (found != hash_) {
    throw OverwriteError("refusing to overwrite " + file.string() + " (written under config " + found +
                         ", current config " + hash_ + "); pass --force to replace it");
  }
}

void OutputDir::write_bytes(const std::string& name, const std::string& bytes, json sidecar) const {
  claim(name);
  const fs::path file = root_ / name;
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  sidecar["config_hash"] = hash_;
  {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + file.string());
  }
  std::ofstream side(sidecar_of(file), std::ios::trunc);
  side << sidecar.dump(2) << "\n";
  if (!side) throw std::runtime_error("failed writing sidecar for " + file.string());
}

void OutputDir::write_stack(const std::string& name, const DynamicImage& img, Field field, json extra) const {
  check_size("stack values", img.pixels() * img.frames, img.values.size());
  const std::string bytes = array_bytes(img.values, field);
  json side = std::move(extra);
  if (side.is_null()) side = json::object();
  side["dtype"] = "<f8";
  side["shape"] = {img.frames, img.height, img.width};
  side["field"] = to_string(field);
  side["layout"] = field == Field::Complex ? "row-major frames, interleaved real/imag" : "row-major frames";
  side["checksum_fnv1a64"] = fnv1a_hex(bytes);
  write_bytes(name, bytes, std::move(side));
}

void OutputDir::write_vector(const std::string& name, const Vec& v, Field field, json extra) const {
  const std::string bytes = array_bytes(v, field);
  json side = std::move(extra);
  if (side.is_null()) side = json::object();
  side["dtype"] = "<f8";
  side["shape"] = {v.size()};
  side["field"] = to_string(field);
  side["checksum_fnv1a64"] = fnv1a_hex(bytes);
  write_bytes(name, bytes, std::move(side));
}

void OutputDir::write_pgm(const std::string& name, int width, int height, const RealVec& pixels, json extra) const {
  const double lo = pixels.size() ? pixels.minCoeff() : 0.0;
  const double hi = pixels.size() ? pixels.maxCoeff() : 0.0;
  json side = std::move(extra);
  if (side.is_null()) side = json::object();
  side["format"] = "pgm-p5";
  side["shape"] = {height, width};
  side["min"] = lo;
  side["max"] = hi;
  write_bytes(name, encode_pgm(width, height, pixels, lo, hi), std::move(side));
}

void OutputDir::write_text(const std::string& name, const std::string& contents, json extra) const {
  json side = std::move(extra);
  if (side.is_null()) side = json::object();
  write_bytes(name, contents, std::move(side));
}

LoadedArray read_array(const fs::path& path) {
  const fs::path side = sidecar_of(path);
  if (!fs::exists(side)) throw std::runtime_error("missing sidecar " + side.string());
  json meta;
  try {
    meta = json::parse(read_file(side));
  } catch (const json::exception& e) {
    throw std::runtime_error("unreadable sidecar " + side.string() + ": " + e.what());
  }
  LoadedArray out;
  if (meta.value("dtype", std::string()) != "<f8") throw std::runtime_error(side.string() + ": dtype must be <f8");
  out.shape = meta.at("shape").get<std::vector<long long>>();
  out.field = field_from_string(meta.at("field").get<std::string>());
  out.config_hash = meta.value("config_hash", std::string());
  long long count = 1;
  for (long long s : out.shape) count *= s;
  const std::string bytes = read_file(path);
  const std::size_t per = out.field == Field::Complex ? 16 : 8;
  if (bytes.size() != static_cast<std::size_t>(count) * per) {
    throw SizeError("array file bytes", static_cast<Index>(count * per), static_cast<Index>(bytes.size()));
  }
  out.values.resize(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  for (long long i = 0; i < count; ++i) {
    const double re = read_f64(p + i * per);
    const double im = out.field == Field::Complex ? read_f64(p + i * per + 8) : 0.0;
    out.values[i] = Scalar(re, im);
  }
  return out;
}

}  // namespace dynsparse
