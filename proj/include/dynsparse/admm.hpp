#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "dynsparse/lsmr.hpp"

namespace dynsparse {

/// How the scaled dual is advanced after the q-update.
///  Verbatim: u += rho (H x - q)   (as printed in the reference algorithm)
///  Standard: u += (H x - q)       (textbook scaled form)
/// Both share fixed points; Verbatim converges for rho below the golden ratio.
enum class DualUpdate { Verbatim, Standard };

const char* to_string(DualUpdate d);
DualUpdate dual_update_from_string(const std::string& s);

struct AdmmConfig {
  double mu1 = 1.0;   // spatial weight
  double mu2 = 1.0;   // temporal weight
  double rho = 1.0;
  double eps_abs = 1e-8;
  double eps_rel = 1e-8;
  int max_outer_iters = 10;
  LsmrOptions inner{};
  Field field = Field::Real;
  DualUpdate dual_update = DualUpdate::Verbatim;

  void validate() const;
};

struct AdmmState {
  Vec x;
  Vec q;
  Vec u;
  double primal_residual_norm = 0.0;
  double dual_residual_norm = 0.0;
  int iteration = 0;
};

struct AdmmIterationRecord {
  int iteration = 0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  double eps_pri = 0.0;
  double eps_dual = 0.0;
  int inner_iters = 0;
  double wall_ms = 0.0;
};

struct AdmmTrace {
  std::vector<AdmmIterationRecord> records;
  bool converged = false;

  int total_inner_iters() const;
  /// CSV with columns iter,primal_res,dual_res,inner_iters,wall_ms.
  void write_csv(std::ostream& os) const;
};

struct AdmmResult {
  AdmmState state;
  AdmmTrace trace;
};

/// H = [mu1 H1; mu2 H2].
MapPtr stack_penalty(double mu1, double mu2, const MapPtr& h1, const MapPtr& h2);

/// Proximal map of kappa ||.||_1. Real field shrinks real and imaginary parts
/// independently; complex field shrinks magnitudes.
Vec soft_threshold(const Vec& v, double kappa, Field field);

/// argmin ||F x - b||^2 + rho ||H x - (q - u)||^2 via LSMR on [F; sqrt(rho) H].
LsmrResult x_update(const MapPtr& forward, const MapPtr& penalty, const Vec& b, const Vec& q, const Vec& u, double rho,
                    const LsmrOptions& inner);

using AdmmObserver = std::function<void(const AdmmState&, const AdmmIterationRecord&)>;

/// ADMM on 1/2 ||b - F x||^2 + ||H x||_1 for an already weighted H, from
/// x = q = u = 0. mu1/mu2 in the config are ignored here.
AdmmResult admm_solve(const MapPtr& forward, const MapPtr& penalty, const Vec& b, const AdmmConfig& config,
                      const AdmmObserver& observer = {});

/// ADMM on 1/2 ||b - F x||^2 + mu1 ||H1 x||_1 + mu2 ||H2 x||_1.
AdmmResult admm_run(const MapPtr& forward, const MapPtr& h1, const MapPtr& h2, const Vec& b, const AdmmConfig& config,
                    const AdmmObserver& observer = {});

}  // namespace dynsparse
