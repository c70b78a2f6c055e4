#include "dynsparse/transforms.hpp"

#include <cmath>
#include <numbers>

namespace dynsparse {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

void forward_pairs(Scalar* v, Index stride, int n, Scalar* scratch) {
  const int half = n / 2;
  for (int j = 0; j < half; ++j) {
    const Scalar a = v[(2 * j) * stride], b = v[(2 * j + 1) * stride];
    scratch[j] = (a + b) * kInvSqrt2;
    scratch[half + j] = (a - b) * kInvSqrt2;
  }
  for (int j = 0; j < n; ++j) v[j * stride] = scratch[j];
}

void inverse_pairs(Scalar* v, Index stride, int n, Scalar* scratch) {
  const int half = n / 2;
  for (int j = 0; j < half; ++j) {
    const Scalar a = v[j * stride], d = v[(half + j) * stride];
    scratch[2 * j] = (a + d) * kInvSqrt2;
    scratch[2 * j + 1] = (a - d) * kInvSqrt2;
  }
  for (int j = 0; j < n; ++j) v[j * stride] = scratch[j];
}

// Copies between the in-place (Mallat) layout and the canonical vector.
// to_canonical == true packs Mallat -> canonical, false unpacks.
void reorder(const HaarSpec& s, Scalar* mallat, Scalar* canonical, bool to_canonical) {
  Index k = 0;
  auto block = [&](int r0, int c0, int h, int w) {
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        Scalar& m = mallat[static_cast<Index>(r0 + r) * s.width + (c0 + c)];
        if (to_canonical) canonical[k++] = m;
        else m = canonical[k++];
      }
    }
  };
  int h = s.height >> s.levels, w = s.width >> s.levels;
  block(0, 0, h, w);
  for (int level = s.levels; level >= 1; --level) {
    h = s.height >> level;
    w = s.width >> level;
    block(h, 0, h, w);  // H: high-pass along columns
    block(0, w, h, w);  // V: high-pass along rows
    block(h, w, h, w);  // D
  }
}

}  // namespace

void HaarSpec::validate() const {
  if (levels < 0) throw DomainError("Haar levels must be nonnegative");
  const int unit = 1 << levels;
  if (width <= 0 || height <= 0 || width % unit != 0 || height % unit != 0) {
    throw DomainError("Haar frame " + std::to_string(width) + "x" + std::to_string(height) +
                      " is not divisible by 2^" + std::to_string(levels));
  }
}

Vec haar_analysis(const HaarSpec& spec, const Vec& image) {
  spec.validate();
  check_size("haar_analysis", spec.size(), image.size());
  Vec buf = image;
  std::vector<Scalar> scratch(std::max(spec.width, spec.height));
  int h = spec.height, w = spec.width;
  for (int level = 0; level < spec.levels; ++level) {
    for (int r = 0; r < h; ++r) forward_pairs(buf.data() + static_cast<Index>(r) * spec.width, 1, w, scratch.data());
    for (int c = 0; c < w; ++c) forward_pairs(buf.data() + c, spec.width, h, scratch.data());
    h /= 2;
    w /= 2;
  }
  Vec out(spec.size());
  reorder(spec, buf.data(), out.data(), true);
  return out;
}

Vec haar_synthesis(const HaarSpec& spec, const Vec& coeffs) {
  spec.validate();
  check_size("haar_synthesis", spec.size(), coeffs.size());
  Vec buf(spec.size());
  Vec canon = coeffs;
  reorder(spec, buf.data(), canon.data(), false);
  std::vector<Scalar> scratch(std::max(spec.width, spec.height));
  for (int level = spec.levels - 1; level >= 0; --level) {
    const int h = spec.height >> level, w = spec.width >> level;
    for (int c = 0; c < w; ++c) inverse_pairs(buf.data() + c, spec.width, h, scratch.data());
    for (int r = 0; r < h; ++r) inverse_pairs(buf.data() + static_cast<Index>(r) * spec.width, 1, w, scratch.data());
  }
  return buf;
}

HaarMap::HaarMap(HaarSpec spec) : LinearMap({spec.size(), spec.size(), Field::Real}), spec_(spec) { spec_.validate(); }
void HaarMap::apply_into(const Vec& x, Vec& out) const { out = haar_synthesis(spec_, x); }
void HaarMap::adjoint_into(const Vec& y, Vec& out) const { out = haar_analysis(spec_, y); }

// ---------------------------------------------------------------------------

void TemporalSpec::validate() const {
  if (n_frames < 1) throw DomainError("temporal transform needs at least one frame");
}

Vec cumsum_apply(const TemporalSpec& spec, const Vec& v) {
  spec.validate();
  check_size("cumsum_apply", spec.n_frames, v.size());
  Vec out(v.size());
  Scalar acc = 0.0;
  for (Index t = 0; t < v.size(); ++t) out[t] = (acc += v[t]);
  return out;
}

Vec cumsum_adjoint(const TemporalSpec& spec, const Vec& y) {
  spec.validate();
  check_size("cumsum_adjoint", spec.n_frames, y.size());
  Vec out(y.size());
  Scalar acc = 0.0;
  for (Index t = y.size() - 1; t >= 0; --t) out[t] = (acc += y[t]);
  return out;
}

Vec diff_apply(const TemporalSpec& spec, const Vec& v) {
  spec.validate();
  check_size("diff_apply", spec.n_frames, v.size());
  Vec out(v.size());
  out[0] = v[0];
  for (Index t = 1; t < v.size(); ++t) out[t] = v[t] - v[t - 1];
  return out;
}

Vec diff_adjoint(const TemporalSpec& spec, const Vec& y) {
  spec.validate();
  check_size("diff_adjoint", spec.n_frames, y.size());
  const Index n = y.size();
  Vec out(n);
  for (Index t = 0; t + 1 < n; ++t) out[t] = y[t] - y[t + 1];
  out[n - 1] = y[n - 1];
  return out;
}

CumsumMap::CumsumMap(TemporalSpec spec) : LinearMap({spec.n_frames, spec.n_frames, Field::Real}), spec_(spec) {
  spec_.validate();
}
void CumsumMap::apply_into(const Vec& x, Vec& out) const { out = cumsum_apply(spec_, x); }
void CumsumMap::adjoint_into(const Vec& y, Vec& out) const { out = cumsum_adjoint(spec_, y); }

DiffMap::DiffMap(TemporalSpec spec) : LinearMap({spec.n_frames, spec.n_frames, Field::Real}), spec_(spec) {
  spec_.validate();
}
void DiffMap::apply_into(const Vec& x, Vec& out) const { out = diff_apply(spec_, x); }
void DiffMap::adjoint_into(const Vec& y, Vec& out) const { out = diff_adjoint(spec_, y); }

MapPtr haar_map(const HaarSpec& spec) { return std::make_shared<HaarMap>(spec); }
MapPtr cumsum_map(int n_frames) { return std::make_shared<CumsumMap>(TemporalSpec{n_frames}); }
MapPtr diff_map(int n_frames) { return std::make_shared<DiffMap>(TemporalSpec{n_frames}); }

std::shared_ptr<const KroneckerMap> spatiotemporal_dictionary(const HaarSpec& spatial, int n_frames) {
  return kronecker(cumsum_map(n_frames), haar_map(spatial));
}

}  // namespace dynsparse
