#pragma once

#include "dynsparse/linops.hpp"

namespace dynsparse {

/// Orthonormal multilevel 2D Haar transform on a width x height frame.
///
/// Pixels are addressed row-major (p = row * width + col). Coefficients use
/// the canonical order: coarsest approximation block, then for each level
/// from coarsest to finest the H, V and D detail blocks, each row-major.
/// H holds vertical high-pass / horizontal low-pass responses (horizontal
/// edges), V the opposite, D high-pass in both directions.
struct HaarSpec {
  int width = 0;
  int height = 0;
  int levels = 3;

  Index size() const { return static_cast<Index>(width) * height; }
  /// Throws DomainError unless both dimensions are positive multiples of 2^levels.
  void validate() const;
};

Vec haar_analysis(const HaarSpec& spec, const Vec& image);
Vec haar_synthesis(const HaarSpec& spec, const Vec& coeffs);

/// The spatial dictionary S: forward = synthesis, adjoint = analysis.
class HaarMap final : public LinearMap {
public:
  explicit HaarMap(HaarSpec spec);
  const HaarSpec& spec() const { return spec_; }

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;

private:
  HaarSpec spec_;
};

struct TemporalSpec {
  int n_frames = 1;
  void validate() const;
};

// E = L^{-1}: running sum. The implicit boundary is x_t = 0 for t < 0.
Vec cumsum_apply(const TemporalSpec& spec, const Vec& v);
// E^T: reverse running sum.
Vec cumsum_adjoint(const TemporalSpec& spec, const Vec& y);
// L: first-order difference with out[0] = v[0].
Vec diff_apply(const TemporalSpec& spec, const Vec& v);
Vec diff_adjoint(const TemporalSpec& spec, const Vec& y);

class CumsumMap final : public LinearMap {
public:
  explicit CumsumMap(TemporalSpec spec);

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;

private:
  TemporalSpec spec_;
};

class DiffMap final : public LinearMap {
public:
  explicit DiffMap(TemporalSpec spec);

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;

private:
  TemporalSpec spec_;
};

MapPtr haar_map(const HaarSpec& spec);
MapPtr cumsum_map(int n_frames);
MapPtr diff_map(int n_frames);

/// Spatiotemporal dictionary W = E ⊗ S for n_frames frames of the given size.
std::shared_ptr<const KroneckerMap> spatiotemporal_dictionary(const HaarSpec& spatial, int n_frames);

}  // namespace dynsparse
