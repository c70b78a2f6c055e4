#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dynsparse/linops.hpp"

namespace dynsparse {

/// Time series of frames. Frames are stored contiguously; pixels within a
/// frame are row-major. values.size() == width * height * frames.
struct DynamicImage {
  int width = 0;
  int height = 0;
  int frames = 0;
  Vec values;

  Index pixels() const { return static_cast<Index>(width) * height; }
  auto frame(int t) { return values.segment(t * pixels(), pixels()); }
  auto frame(int t) const { return values.segment(t * pixels(), pixels()); }
};

// ---------------------------------------------------------------------------
// Parallel-beam tomography

/// Square n x n image with unit-spaced pixels centered on the origin. A ray at
/// angle phi and detector offset s is the line {p : p . (cos phi, sin phi) = s};
/// at phi = 0 rays run along image columns. Detector bins have pixel_spacing
/// width and are sampled at their centers.
struct TomoGeometry {
  int image_size = 0;
  int n_detectors = 0;
  std::vector<std::vector<double>> angles_per_frame;  // radians, in [0, 2pi)
  double pixel_spacing = 1.0;

  int n_frames() const { return static_cast<int>(angles_per_frame.size()); }
  void validate() const;
};

/// Evenly spaced angles per frame, alternating between [0, pi) on even-indexed
/// frames and [pi, 2pi) on odd-indexed frames.
std::vector<std::vector<double>> alternating_angles(int n_frames, int angles_per_frame);

/// One frame of the projector with exact ray/pixel intersection lengths
/// (Siddon), tabulated at construction.
class ParallelBeamProjector final : public LinearMap {
public:
  ParallelBeamProjector(int image_size, int n_detectors, std::vector<double> angles, double pixel_spacing = 1.0);

  Index nonzeros() const { return static_cast<Index>(weights_.size()); }

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;

private:
  std::vector<Index> row_start_;
  std::vector<Index> pixel_;
  std::vector<double> weights_;
};

/// Block-diagonal projector over all frames.
MapPtr make_radon_operator(const TomoGeometry& geom);
Vec radon_apply(const TomoGeometry& geom, const Vec& x);
Vec radon_adjoint(const TomoGeometry& geom, const Vec& y);

// ---------------------------------------------------------------------------
// Masked Cartesian Fourier sampling

struct FourierMask {
  int image_size = 0;
  std::vector<std::vector<bool>> kept;  // per frame, row-major over the n x n frequency grid

  int n_frames() const { return static_cast<int>(kept.size()); }
  void validate() const;
};

FourierMask full_fourier_mask(int image_size, int n_frames);
/// Keeps each frequency with probability keep_fraction (DC always kept).
FourierMask random_fourier_mask(int image_size, int n_frames, double keep_fraction, std::uint64_t seed);

/// Unitary 2D DFT of one n x n frame followed by selection of kept frequencies.
class FourierSampler final : public LinearMap {
public:
  FourierSampler(int image_size, std::vector<bool> kept);

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;

private:
  int n_;
  Mat dft_;  // symmetric unitary DFT matrix
  std::vector<Index> kept_index_;
};

MapPtr make_fourier_operator(const FourierMask& mask);
Vec fourier_sample_apply(const FourierMask& mask, const Vec& x);
Vec fourier_sample_adjoint(const FourierMask& mask, const Vec& y);

// ---------------------------------------------------------------------------
// Phantom

struct DiscSpec {
  double center_row = 15.5;
  double center_col = 15.5;
  double radius = 14.0;
  double intensity = 0.5;
};

/// Square block whose top-left corner moves along a straight line from
/// (start_row, start_col) in frame 0 to (end_row, end_col) in the last frame,
/// rounded to whole pixels.
struct BlockSpec {
  int size = 6;
  double intensity = 1.0;
  int start_row = 13;
  int start_col = 5;
  int end_row = 13;
  int end_col = 20;
};

struct PhantomSpec {
  int image_size = 32;
  int n_frames = 16;
  DiscSpec disc{};
  BlockSpec block{};
  double mask_radius = 15.0;

  void validate() const;
  /// Top-left block corner for each frame.
  std::vector<std::pair<int, int>> block_positions() const;
};

DynamicImage make_phantom(const PhantomSpec& spec);
/// Pixels whose centers lie within mask_radius of the disc center.
std::vector<bool> phantom_mask(const PhantomSpec& spec);

// ---------------------------------------------------------------------------
// Noise

/// y + sigma g with g standard Gaussian from the counter-based stream `seed`.
/// In the complex field real and imaginary parts each carry sigma / sqrt(2).
Vec add_noise(const Vec& y, double sigma, std::uint64_t seed, Field field);

struct Whitened {
  Vec data;
  MapPtr forward;
};

/// (Gamma^{-1/2} y, Gamma^{-1/2} ∘ F) given the inverse Cholesky factor.
Whitened whiten(const Vec& y, const MapPtr& forward, const MapPtr& chol_gamma_inv);

}  // namespace dynsparse
