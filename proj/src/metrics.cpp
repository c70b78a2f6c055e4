#include "dynsparse/metrics.hpp"

#include <cmath>

namespace dynsparse {

void SsimParams::validate() const {
  if (window_size < 3 || window_size % 2 == 0) throw DomainError("SSIM window_size must be odd and >= 3");
  if (!(gaussian_sigma > 0.0)) throw DomainError("SSIM gaussian_sigma must be positive");
  if (data_range && !(*data_range > 0.0)) throw DomainError("SSIM data_range must be positive");
}

RealVec gaussian_window(int window_size, double sigma) {
  RealVec w(window_size);
  const int r = window_size / 2;
  for (int i = 0; i < window_size; ++i) w[i] = std::exp(-0.5 * (i - r) * (i - r) / (sigma * sigma));
  return w / w.sum();
}

namespace {

// Valid-mode separable filtering of a row-major image.
RealMat filter_valid(const RealMat& img, const RealVec& w) {
  const Index k = w.size();
  const Index oh = img.rows() - k + 1, ow = img.cols() - k + 1;
  RealMat tmp(img.rows(), ow);
  for (Index r = 0; r < img.rows(); ++r) {
    for (Index c = 0; c < ow; ++c) tmp(r, c) = img.row(r).segment(c, k).dot(w.transpose());
  }
  RealMat out(oh, ow);
  for (Index c = 0; c < ow; ++c) {
    for (Index r = 0; r < oh; ++r) out(r, c) = tmp.col(c).segment(r, k).dot(w);
  }
  return out;
}

RealMat as_matrix(const Image& img) {
  check_size("image pixels", static_cast<Index>(img.width) * img.height, img.pixels.size());
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      img.pixels.data(), img.height, img.width);
}

}  // namespace

RealMat ssim_map(const Image& a, const Image& b, const SsimParams& p, double data_range) {
  p.validate();
  if (a.width != b.width || a.height != b.height) throw SizeError("ssim: image dimensions differ", a.pixels.size(), b.pixels.size());
  if (p.window_size > a.width || p.window_size > a.height) throw DomainError("ssim: window larger than image");
  if (!(data_range > 0.0)) throw DomainError("ssim: data range must be positive");

  const RealMat ma = as_matrix(a), mb = as_matrix(b);
  const RealVec w = gaussian_window(p.window_size, p.gaussian_sigma);
  const RealMat mu_a = filter_valid(ma, w);
  const RealMat mu_b = filter_valid(mb, w);
  const RealMat e_aa = filter_valid(ma.cwiseProduct(ma), w);
  const RealMat e_bb = filter_valid(mb.cwiseProduct(mb), w);
  const RealMat e_ab = filter_valid(ma.cwiseProduct(mb), w);

  const double c1 = (p.k1 * data_range) * (p.k1 * data_range);
  const double c2 = (p.k2 * data_range) * (p.k2 * data_range);
  RealMat out(mu_a.rows(), mu_a.cols());
  for (Index r = 0; r < out.rows(); ++r) {
    for (Index c = 0; c < out.cols(); ++c) {
      const double ua = mu_a(r, c), ub = mu_b(r, c);
      const double va = e_aa(r, c) - ua * ua;
      const double vb = e_bb(r, c) - ub * ub;
      const double cov = e_ab(r, c) - ua * ub;
      out(r, c) = ((2.0 * ua * ub + c1) * (2.0 * cov + c2)) / ((ua * ua + ub * ub + c1) * (va + vb + c2));
    }
  }
  return out;
}

double ssim(const Image& a, const Image& b, const SsimParams& p) {
  p.validate();
  const Index n = static_cast<Index>(b.width) * b.height;
  if (p.mask && static_cast<Index>(p.mask->size()) != n) throw SizeError("ssim mask", n, p.mask->size());
  auto included = [&](Index i) { return !p.mask || (*p.mask)[static_cast<std::size_t>(i)]; };

  double range = 0.0;
  if (p.data_range) {
    range = *p.data_range;
  } else {
    double lo = INFINITY, hi = -INFINITY;
    for (Index i = 0; i < n && i < b.pixels.size(); ++i) {
      if (!included(i)) continue;
      lo = std::min(lo, b.pixels[i]);
      hi = std::max(hi, b.pixels[i]);
    }
    range = hi - lo;
    if (!(range > 0.0)) throw DomainError("ssim: reference is constant over the mask; pass data_range explicitly");
  }

  const RealMat map = ssim_map(a, b, p, range);
  const int off = p.window_size / 2;
  double sum = 0.0;
  Index count = 0;
  for (Index r = 0; r < map.rows(); ++r) {
    for (Index c = 0; c < map.cols(); ++c) {
      if (!included((r + off) * b.width + (c + off))) continue;
      sum += map(r, c);
      ++count;
    }
  }
  if (count == 0) throw DomainError("ssim: mask excludes every valid window position");
  return sum / static_cast<double>(count);
}

Image frame_image(const DynamicImage& img, int t, Field field) {
  Image out{img.width, img.height, RealVec(img.pixels())};
  const auto f = img.frame(t);
  for (Index i = 0; i < img.pixels(); ++i) out.pixels[i] = field == Field::Complex ? std::abs(f[i]) : f[i].real();
  return out;
}

double ssim_time_avg(const DynamicImage& x, const DynamicImage& ref, const SsimParams& p, Field field) {
  if (x.width != ref.width || x.height != ref.height || x.frames != ref.frames) {
    throw SizeError("ssim_time_avg: stack shapes differ", ref.values.size(), x.values.size());
  }
  if (ref.frames < 1) throw DomainError("ssim_time_avg: empty stack");
  double sum = 0.0;
  for (int t = 0; t < ref.frames; ++t) sum += ssim(frame_image(x, t, field), frame_image(ref, t, field), p);
  return sum / ref.frames;
}

double nrmse(const Vec& x, const Vec& ref) {
  check_size("nrmse", ref.size(), x.size());
  const double denom = ref.norm();
  if (!(denom > 0.0)) throw DomainError("nrmse: reference has zero norm");
  return (x - ref).norm() / denom;
}

}  // namespace dynsparse
