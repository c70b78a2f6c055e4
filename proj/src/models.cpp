#include "dynsparse/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace dynsparse {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kParallelEps = 1e-12;
}  // namespace

// ---------------------------------------------------------------------------
// Tomography

void TomoGeometry::validate() const {
  if (image_size < 1) throw DomainError("tomography: image_size must be >= 1");
  if (n_detectors < 1) throw DomainError("tomography: n_detectors must be >= 1");
  if (!(pixel_spacing > 0.0)) throw DomainError("tomography: pixel_spacing must be positive");
  if (angles_per_frame.empty()) throw DomainError("tomography: at least one frame is required");
  for (const auto& frame : angles_per_frame) {
    for (double a : frame) {
      if (!(a >= 0.0 && a < kTwoPi)) throw DomainError("tomography: angle outside [0, 2pi)");
    }
  }
}

std::vector<std::vector<double>> alternating_angles(int n_frames, int angles_per_frame) {
  if (n_frames < 1 || angles_per_frame < 1) throw DomainError("alternating_angles: counts must be >= 1");
  std::vector<std::vector<double>> out(n_frames);
  const double step = std::numbers::pi / angles_per_frame;
  for (int t = 0; t < n_frames; ++t) {
    const double base = (t % 2 == 0) ? 0.0 : std::numbers::pi;
    for (int k = 0; k < angles_per_frame; ++k) out[t].push_back(base + k * step);
  }
  return out;
}

ParallelBeamProjector::ParallelBeamProjector(int n, int n_det, std::vector<double> angles, double spacing)
    : LinearMap({static_cast<Index>(angles.size()) * n_det, static_cast<Index>(n) * n, Field::Real}) {
  const double half = 0.5 * n * spacing;
  const double xmin = -half, xmax = half, ymin = -half, ymax = half;
  row_start_.reserve(static_cast<std::size_t>(rows()) + 1);
  row_start_.push_back(0);
  std::vector<double> ts;
  std::map<Index, double> acc;

  for (double phi : angles) {
    const double nx = std::cos(phi), ny = std::sin(phi);
    const double dx = -ny, dy = nx;
    for (int k = 0; k < n_det; ++k) {
      const double s = (k - 0.5 * (n_det - 1)) * spacing;
      const double px = s * nx, py = s * ny;
      double tmin = -INFINITY, tmax = INFINITY;
      bool hit = true;
      auto clip = [&](double p, double d, double lo, double hi) {
        if (std::abs(d) < kParallelEps) {
          if (p <= lo || p >= hi) hit = false;
          return;
        }
        double t0 = (lo - p) / d, t1 = (hi - p) / d;
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
      };
      clip(px, dx, xmin, xmax);
      clip(py, dy, ymin, ymax);

      acc.clear();
      if (hit && tmax > tmin) {
        ts.assign({tmin, tmax});
        for (int i = 0; i <= n; ++i) {
          if (std::abs(dx) >= kParallelEps) {
            const double t = (xmin + i * spacing - px) / dx;
            if (t > tmin && t < tmax) ts.push_back(t);
          }
          if (std::abs(dy) >= kParallelEps) {
            const double t = (ymin + i * spacing - py) / dy;
            if (t > tmin && t < tmax) ts.push_back(t);
          }
        }
        std::sort(ts.begin(), ts.end());
        for (std::size_t j = 0; j + 1 < ts.size(); ++j) {
          const double len = ts[j + 1] - ts[j];
          if (len <= 1e-12 * spacing) continue;
          const double tm = 0.5 * (ts[j] + ts[j + 1]);
          const double x = px + tm * dx, y = py + tm * dy;
          const int c = std::clamp(static_cast<int>(std::floor((x - xmin) / spacing)), 0, n - 1);
          const int r = std::clamp(static_cast<int>(std::floor((ymax - y) / spacing)), 0, n - 1);
          acc[static_cast<Index>(r) * n + c] += len;
        }
      }
      for (const auto& [pix, w] : acc) {
        pixel_.push_back(pix);
        weights_.push_back(w);
      }
      row_start_.push_back(static_cast<Index>(pixel_.size()));
    }
  }
}

void ParallelBeamProjector::apply_into(const Vec& x, Vec& out) const {
  for (Index r = 0; r < rows(); ++r) {
    Scalar sum = 0.0;
    for (Index j = row_start_[r]; j < row_start_[r + 1]; ++j) sum += weights_[j] * x[pixel_[j]];
    out[r] = sum;
  }
}

void ParallelBeamProjector::adjoint_into(const Vec& y, Vec& out) const {
  out.setZero();
  for (Index r = 0; r < rows(); ++r) {
    for (Index j = row_start_[r]; j < row_start_[r + 1]; ++j) out[pixel_[j]] += weights_[j] * y[r];
  }
}

MapPtr make_radon_operator(const TomoGeometry& geom) {
  geom.validate();
  std::vector<MapPtr> blocks;
  blocks.reserve(geom.angles_per_frame.size());
  for (const auto& angles : geom.angles_per_frame) {
    blocks.push_back(
        std::make_shared<ParallelBeamProjector>(geom.image_size, geom.n_detectors, angles, geom.pixel_spacing));
  }
  return block_diagonal(std::move(blocks));
}

Vec radon_apply(const TomoGeometry& geom, const Vec& x) { return make_radon_operator(geom)->apply(x); }
Vec radon_adjoint(const TomoGeometry& geom, const Vec& y) { return make_radon_operator(geom)->adjoint_apply(y); }

// ---------------------------------------------------------------------------
// Fourier sampling

void FourierMask::validate() const {
  if (image_size < 1) throw DomainError("fourier mask: image_size must be >= 1");
  if (kept.empty()) throw DomainError("fourier mask: at least one frame is required");
  const auto cells = static_cast<std::size_t>(image_size) * image_size;
  for (const auto& frame : kept) {
    if (frame.size() != cells) throw SizeError("fourier mask frame", static_cast<Index>(cells), frame.size());
    if (std::none_of(frame.begin(), frame.end(), [](bool b) { return b; })) {
      throw DomainError("fourier mask: every frame must keep at least one frequency");
    }
  }
}

FourierMask full_fourier_mask(int image_size, int n_frames) {
  FourierMask m{image_size, {}};
  m.kept.assign(n_frames, std::vector<bool>(static_cast<std::size_t>(image_size) * image_size, true));
  return m;
}

FourierMask random_fourier_mask(int image_size, int n_frames, double keep_fraction, std::uint64_t seed) {
  const CounterRng rng(seed);
  FourierMask m{image_size, {}};
  const auto cells = static_cast<std::size_t>(image_size) * image_size;
  for (int t = 0; t < n_frames; ++t) {
    std::vector<bool> frame(cells);
    for (std::size_t i = 0; i < cells; ++i) frame[i] = rng.uniform(t * cells + i) < keep_fraction;
    frame[0] = true;
    m.kept.push_back(std::move(frame));
  }
  return m;
}

FourierSampler::FourierSampler(int n, std::vector<bool> kept)
    : LinearMap({static_cast<Index>(std::count(kept.begin(), kept.end(), true)), static_cast<Index>(n) * n,
                 Field::Complex}),
      n_(n),
      dft_(n, n) {
  check_size("FourierSampler mask", static_cast<Index>(n) * n, static_cast<Index>(kept.size()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) {
    for (int r = 0; r < n; ++r) {
      // Reduce k*r mod n first so the phase stays exact for large indices.
      const double phase = -kTwoPi * static_cast<double>((static_cast<long>(k) * r) % n) / n;
      dft_(k, r) = std::polar(scale, phase);
    }
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i]) kept_index_.push_back(static_cast<Index>(i));
  }
}

using RowMajorMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void FourierSampler::apply_into(const Vec& x, Vec& out) const {
  Eigen::Map<const RowMajorMat> img(x.data(), n_, n_);
  const RowMajorMat spec = dft_ * img * dft_;
  for (std::size_t i = 0; i < kept_index_.size(); ++i) out[static_cast<Index>(i)] = spec.data()[kept_index_[i]];
}

void FourierSampler::adjoint_into(const Vec& y, Vec& out) const {
  RowMajorMat spec = RowMajorMat::Zero(n_, n_);
  for (std::size_t i = 0; i < kept_index_.size(); ++i) spec.data()[kept_index_[i]] = y[static_cast<Index>(i)];
  const Mat conj_dft = dft_.conjugate();
  Eigen::Map<RowMajorMat> img(out.data(), n_, n_);
  img = conj_dft * spec * conj_dft;
}

MapPtr make_fourier_operator(const FourierMask& mask) {
  mask.validate();
  std::vector<MapPtr> blocks;
  for (const auto& frame : mask.kept) blocks.push_back(std::make_shared<FourierSampler>(mask.image_size, frame));
  return block_diagonal(std::move(blocks));
}

Vec fourier_sample_apply(const FourierMask& mask, const Vec& x) { return make_fourier_operator(mask)->apply(x); }
Vec fourier_sample_adjoint(const FourierMask& mask, const Vec& y) {
  return make_fourier_operator(mask)->adjoint_apply(y);
}

// ---------------------------------------------------------------------------
// Phantom

std::vector<std::pair<int, int>> PhantomSpec::block_positions() const {
  std::vector<std::pair<int, int>> pos;
  for (int t = 0; t < n_frames; ++t) {
    const double f = n_frames > 1 ? static_cast<double>(t) / (n_frames - 1) : 0.0;
    pos.emplace_back(static_cast<int>(std::lround(block.start_row + f * (block.end_row - block.start_row))),
                     static_cast<int>(std::lround(block.start_col + f * (block.end_col - block.start_col))));
  }
  return pos;
}

void PhantomSpec::validate() const {
  if (image_size < 1) throw DomainError("phantom: image_size must be >= 1");
  if (n_frames < 1) throw DomainError("phantom: n_frames must be >= 1");
  if (!(disc.radius > 0.0)) throw DomainError("phantom: disc radius must be positive");
  if (!(mask_radius > 0.0)) throw DomainError("phantom: mask_radius must be positive");
  if (block.size < 1) throw DomainError("phantom: block size must be >= 1");
  const double r2 = disc.radius * disc.radius;
  for (const auto& [r0, c0] : block_positions()) {
    if (r0 < 0 || c0 < 0 || r0 + block.size > image_size || c0 + block.size > image_size) {
      throw DomainError("phantom: moving block leaves the image");
    }
    for (int dr : {0, block.size - 1}) {
      for (int dc : {0, block.size - 1}) {
        const double y = r0 + dr - disc.center_row, x = c0 + dc - disc.center_col;
        if (x * x + y * y > r2) throw DomainError("phantom: moving block leaves the disc");
      }
    }
  }
}

DynamicImage make_phantom(const PhantomSpec& spec) {
  spec.validate();
  const int n = spec.image_size;
  DynamicImage img{n, n, spec.n_frames, Vec::Zero(static_cast<Index>(n) * n * spec.n_frames)};
  const double r2 = spec.disc.radius * spec.disc.radius;
  const auto positions = spec.block_positions();
  for (int t = 0; t < spec.n_frames; ++t) {
    auto frame = img.frame(t);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const double y = r - spec.disc.center_row, x = c - spec.disc.center_col;
        if (x * x + y * y <= r2) frame[static_cast<Index>(r) * n + c] = spec.disc.intensity;
      }
    }
    const auto [r0, c0] = positions[t];
    for (int r = r0; r < r0 + spec.block.size; ++r) {
      for (int c = c0; c < c0 + spec.block.size; ++c) frame[static_cast<Index>(r) * n + c] += spec.block.intensity;
    }
  }
  return img;
}

std::vector<bool> phantom_mask(const PhantomSpec& spec) {
  const int n = spec.image_size;
  std::vector<bool> mask(static_cast<std::size_t>(n) * n);
  const double r2 = spec.mask_radius * spec.mask_radius;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double y = r - spec.disc.center_row, x = c - spec.disc.center_col;
      mask[static_cast<std::size_t>(r) * n + c] = x * x + y * y <= r2;
    }
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Noise

Vec add_noise(const Vec& y, double sigma, std::uint64_t seed, Field field) {
  if (!(sigma >= 0.0)) throw DomainError("add_noise: sigma must be nonnegative");
  if (sigma == 0.0) return y;
  const Vec g = gaussian_vector(y.size(), seed, field);
  const double scale = field == Field::Complex ? sigma / std::numbers::sqrt2 : sigma;
  return y + scale * g;
}

Whitened whiten(const Vec& y, const MapPtr& forward, const MapPtr& chol_gamma_inv) {
  if (chol_gamma_inv->rows() != chol_gamma_inv->cols()) {
    throw SizeError("whiten: Gamma^{-1/2} must be square", chol_gamma_inv->rows(), chol_gamma_inv->cols());
  }
  check_size("whiten: data", chol_gamma_inv->cols(), y.size());
  check_size("whiten: forward rows", chol_gamma_inv->cols(), forward->rows());
  return {chol_gamma_inv->apply(y), compose(chol_gamma_inv, forward)};
}

}  // namespace dynsparse
