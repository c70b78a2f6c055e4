#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dynsparse/admm.hpp"
#include "dynsparse/ias.hpp"
#include "dynsparse/metrics.hpp"
#include "dynsparse/models.hpp"

namespace dynsparse {

inline constexpr int kSchemaVersion = 1;

enum class SolverKind { Ias, Admm, Lsq };
const char* to_string(SolverKind s);
SolverKind solver_from_string(const std::string& s);  // throws ConfigError

struct ForwardConfig {
  enum class Kind { Tomo, Fourier } kind = Kind::Tomo;
  int angles_per_frame = 8;
  int n_detectors = 0;  // 0: ceil(sqrt(2) * image_size)
  double keep_fraction = 0.25;
  std::uint64_t mask_seed = 7;
};

struct NoiseConfig {
  double sigma = 0.01;
  bool relative = true;  // sigma is a fraction of the peak |F x|
  std::uint64_t seed = 1234;
};

struct LsqConfig {
  double lambda = 1e-3;
  LsmrOptions inner{1e-8, 1e-8, 50, 0.0};
};

/// Grid axes are base-10 exponents: (eta, theta_scale) for IAS,
/// (mu_s, mu_t) for ADMM.
struct SweepConfig {
  std::vector<double> axis1;
  std::vector<double> axis2;
};

struct IterStudyConfig {
  std::vector<int> inner_caps{10, 50, 150, 300};
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  PhantomSpec phantom{};
  int haar_levels = 3;
  ForwardConfig forward{};
  NoiseConfig noise{};
  SolverKind solver = SolverKind::Ias;
  // Harness defaults come from pilot sweeps on the default phantom.
  IasConfig ias{1e-8, 1e-3, 1e-8, 10, LsmrOptions{1e-8, 1e-8, 50, 0.0}};
  AdmmConfig admm{1.0, 1.0, 1.0, 1e-8, 1e-8, 10, LsmrOptions{1e-8, 1e-8, 50, 0.0}};
  LsqConfig lsq{};
  std::optional<SweepConfig> sweep;
  IterStudyConfig iterstudy{};
  SsimParams metrics{};  // mask is filled from the phantom when use_mask is set
  bool use_mask = true;
  std::string output_dir = "out";
  bool record_timing = true;

  /// Throws ConfigError on any invalid field.
  void validate() const;
};

ExperimentConfig default_config();
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON view (sorted keys). The output directory is omitted so that
/// the same experiment written elsewhere keeps its identity.
nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// 16 hex digits of FNV-1a 64 over the canonical JSON dump.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace dynsparse
