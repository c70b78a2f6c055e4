#pragma once

#include <optional>
#include <vector>

#include "dynsparse/models.hpp"

namespace dynsparse {

/// SSIM parameterization. Defaults favor contrast and structure over
/// luminance for images with large zero backgrounds.
struct SsimParams {
  double k1 = 0.1;
  double k2 = 0.1;
  double gaussian_sigma = 1.5;
  int window_size = 11;
  std::optional<double> data_range;   // default: max(ref) - min(ref) over the mask
  std::optional<std::vector<bool>> mask;  // row-major, true = pixel counts

  void validate() const;
};

/// Real-valued image for metric evaluation (row-major).
struct Image {
  int width = 0;
  int height = 0;
  RealVec pixels;
};

/// Gaussian window, normalized to unit sum, truncated to window_size taps.
RealVec gaussian_window(int window_size, double sigma);

/// Local SSIM map on the valid region where the full window fits; the map
/// is (height - w + 1) x (width - w + 1), row-major, indexed by window center.
RealMat ssim_map(const Image& a, const Image& b, const SsimParams& p, double data_range);

/// Mean of the SSIM map over valid window centers that are inside the mask.
/// `b` is the reference (used for the default data range).
double ssim(const Image& a, const Image& b, const SsimParams& p);

/// Arithmetic mean of per-frame SSIM. Complex frames are compared by magnitude
/// when `field` is complex, by real part otherwise.
double ssim_time_avg(const DynamicImage& x, const DynamicImage& ref, const SsimParams& p, Field field);

/// ||x - ref||_2 / ||ref||_2.
double nrmse(const Vec& x, const Vec& ref);

Image frame_image(const DynamicImage& img, int t, Field field);

}  // namespace dynsparse
