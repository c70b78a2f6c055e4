#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dynsparse/config.hpp"
#include "dynsparse/io.hpp"

namespace dynsparse {

/// Everything a solver needs, built once from the problem part of a config.
/// Solver hyper-parameters are not baked in, so one Problem serves a whole sweep.
struct Problem {
  Field field = Field::Real;
  DynamicImage truth;
  Vec measurements;          // noisy data before whitening
  double noise_sigma = 0.0;  // absolute standard deviation
  MapPtr forward;            // whitened forward operator
  Vec data;                  // whitened data
  MapPtr dictionary;         // W = cumsum ⊗ Haar synthesis
  MapPtr spatial_penalty;    // Haar analysis on every frame
  MapPtr temporal_penalty;   // first differences along time for every pixel
  MapPtr spatial_synthesis;  // Haar synthesis on every frame
  SsimParams ssim;           // mask already filled in
};

Problem assemble_problem(const ExperimentConfig& cfg);

/// One row of the metrics table. Hyper-parameters that do not apply to the
/// solver are left empty in the CSV.
struct RunRecord {
  std::string run_id;
  std::string config_hash;
  SolverKind solver = SolverKind::Ias;
  double eta_or_mu_s = 0.0;
  std::optional<double> theta_or_mu_t;
  std::optional<double> rho;
  int inner_cap = 0;
  int outer_iters = 0;
  int total_inner_iters = 0;
  double ssim_t_avg = 0.0;
  double nrmse = 0.0;
  double wall_ms = 0.0;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const RunRecord& r);

struct IterationSnapshot {
  int outer_iter = 0;
  double ssim = 0.0;
  double cum_wall_ms = 0.0;
};

struct RunOutput {
  DynamicImage reconstruction;
  std::optional<DynamicImage> theta_image;  // IAS only
  std::string trace_csv;
  RunRecord record;
  std::vector<IterationSnapshot> snapshots;  // filled when requested
};

/// Runs the solver selected in `cfg` on `problem`. Only the solver blocks and
/// output options of `cfg` are read.
RunOutput run_reconstruction(const Problem& problem, const ExperimentConfig& cfg, bool with_snapshots = false);

struct SweepCell {
  int i = 0;
  int j = 0;
  double axis1_exp = 0.0;
  double axis2_exp = 0.0;
  std::optional<RunRecord> record;
  std::string error;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // row-major over (axis1, axis2)
  int rows = 0;
  int cols = 0;
  /// max - min time-averaged SSIM over successful cells.
  double ssim_spread() const;
};

/// Returns `cfg` with the solver hyper-parameters of grid point (a1, a2),
/// given as base-10 exponents.
ExperimentConfig sweep_point_config(const ExperimentConfig& cfg, double a1_exp, double a2_exp);
SweepResult run_sweep(const Problem& problem, const ExperimentConfig& cfg, int jobs);

struct IterStudyRow {
  SolverKind solver = SolverKind::Ias;
  int inner_cap = 0;
  IterationSnapshot snap;
};
std::vector<IterStudyRow> run_iterstudy(const Problem& problem, const ExperimentConfig& cfg);

/// Bilinear upsampling of a rows x cols grid by `step` pixels per cell.
RealVec interpolate_grid(const RealMat& grid, int step, int& width, int& height);

// Subcommand bodies. Each writes into `out` and returns the rows it produced.
void cmd_phantom(const ExperimentConfig& cfg, const OutputDir& out);
RunRecord cmd_reconstruct(const ExperimentConfig& cfg, const OutputDir& out);
SweepResult cmd_sweep(const ExperimentConfig& cfg, const OutputDir& out, int jobs);
std::vector<IterStudyRow> cmd_iterstudy(const ExperimentConfig& cfg, const OutputDir& out);
RunRecord cmd_metrics(const ExperimentConfig& cfg, const std::filesystem::path& input, const OutputDir& out);

}  // namespace dynsparse
