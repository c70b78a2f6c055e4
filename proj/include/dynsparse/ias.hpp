#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "dynsparse/lsmr.hpp"

namespace dynsparse {

/// Hyper-parameters of the gamma hyperprior and iteration controls.
///
/// `eta` is the sparsity parameter used directly in the variance update and
/// in the log term of the Gibbs energy; `theta_scale` is the gamma scale.
/// Small eta pushes the estimate toward the l1-penalized solution.
struct IasConfig {
  double eta = 1e-8;
  double theta_scale = 1e-1;
  double outer_tol = 1e-8;
  int max_outer_iters = 10;
  LsmrOptions inner{};
  Field field = Field::Real;

  void validate() const;
};

struct IasState {
  Vec z;           // dictionary coefficients
  RealVec theta;   // prior variances, all > 0
  Vec zeta;        // whitened coefficients, z = sqrt(theta_prev) .* zeta
  int iteration = 0;
};

struct IasIterationRecord {
  int iteration = 0;
  double gibbs_energy = 0.0;
  double theta_rel_change = 0.0;
  int inner_iters = 0;
  double wall_ms = 0.0;
};

struct IasTrace {
  std::vector<IasIterationRecord> records;
  bool converged = false;

  int total_inner_iters() const;
  /// CSV with columns iter,gibbs_energy,theta_rel_change,inner_iters,wall_ms.
  void write_csv(std::ostream& os) const;
};

struct IasResult {
  IasState state;
  IasTrace trace;
};

/// A_theta = F ∘ W ∘ diag(sqrt(theta)), kept lazy.
MapPtr build_scaled_operator(const MapPtr& forward, const MapPtr& dictionary, const RealVec& theta);

struct Stage1Result {
  Vec zeta;
  Vec z;
  LsmrReport report;
};

/// Solves min ||A_theta zeta - b||^2 + ||zeta||^2 with LSMR (damp forced to 1)
/// and maps back z = sqrt(theta) .* zeta.
Stage1Result stage1_update(const MapPtr& forward, const MapPtr& dictionary, const RealVec& theta, const Vec& b,
                           const LsmrOptions& inner);

/// Closed-form minimizer over theta for fixed z:
/// theta_i = (s/2) (eta + sqrt(eta^2 + 2 |z_i|^2 / s)), s = theta_scale.
/// In the complex field |z_i|^2 couples the real and imaginary parts.
RealVec stage2_update(const Vec& z, double eta, double theta_scale, Field field);

/// f(z, theta) = 1/2 ||b - F W z||^2 + 1/2 sum |z_i|^2 / theta_i
///               + sum (theta_i / s - eta ln theta_i).
/// The log term carries -eta so that stage2_update is its exact minimizer.
double gibbs_energy(const Vec& z, const RealVec& theta, const LinearMap& forward, const LinearMap& dictionary,
                    const Vec& b, double eta, double theta_scale);

/// Called after every completed outer iteration.
using IasObserver = std::function<void(const IasState&, const IasIterationRecord&)>;

/// Alternates stage1_update and stage2_update from zeta = 0, theta = s * 1
/// until the relative 2-norm change of theta drops below outer_tol or
/// max_outer_iters is reached. The reconstruction is W z.
IasResult ias_run(const MapPtr& forward, const MapPtr& dictionary, const Vec& b, const IasConfig& config,
                  const IasObserver& observer = {});

}  // namespace dynsparse
