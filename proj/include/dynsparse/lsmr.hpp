#pragma once

#include <string>

#include "dynsparse/linops.hpp"

namespace dynsparse {

struct LsmrOptions {
  double atol = 1e-8;
  double btol = 1e-8;
  int max_iters = 100;
  double damp = 0.0;

  void validate() const;
};

enum class LsmrStop { ConvergedAtolBtol, MaxIters, ExactSolution };

const char* to_string(LsmrStop s);

struct LsmrReport {
  int iterations = 0;
  LsmrStop stop_reason = LsmrStop::ExactSolution;
  /// Estimate of ||[b; 0] - [A; damp I] x||.
  double residual_norm = 0.0;
  /// Estimate of ||A^H r - damp^2 x||.
  double normal_residual_norm = 0.0;
};

struct LsmrResult {
  Vec x;
  LsmrReport report;
};

/// Damped least squares min ||A x - b||^2 + damp^2 ||x||^2 by LSMR
/// (Fong & Saunders), starting from x = 0.
///
/// Stops when the atol/btol tests pass (compatible or least-squares), on the
/// machine-precision variants of those tests, or after max_iters. The
/// condition-number limit is disabled and no reorthogonalization is done.
LsmrResult lsmr_solve(const LinearMap& a, const Vec& b, const LsmrOptions& opts);

}  // namespace dynsparse
