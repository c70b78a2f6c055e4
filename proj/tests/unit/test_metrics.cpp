#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "dynsparse/metrics.hpp"

using namespace dynsparse;

namespace {

Image random_image(int w, int h, std::uint64_t seed) {
  return Image{w, h, gaussian_vector(static_cast<Index>(w) * h, seed, Field::Real).real()};
}

}  // namespace

TEST_CASE("Gaussian window sums to one and is symmetric") {
  const RealVec w = gaussian_window(11, 1.5);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-15));
  for (int i = 0; i < 11; ++i) CHECK(w[i] == w[10 - i]);
  CHECK(w[5] == w.maxCoeff());
}

TEST_CASE("identical images score exactly one") {
  const Image a = random_image(32, 32, 1);
  CHECK(ssim(a, a, SsimParams{}) == 1.0);
}

TEST_CASE("SSIM is symmetric for an explicit data range and drops with noise") {
  SsimParams p;
  p.data_range = 4.0;
  const Image a = random_image(24, 20, 2);
  Image b = a;
  b.pixels += 0.3 * gaussian_vector(480, 3, Field::Real).real();
  const double s = ssim(a, b, p);
  CHECK(s == doctest::Approx(ssim(b, a, p)).epsilon(1e-14));
  CHECK(s < 1.0);
  CHECK(s > 0.0);
  CHECK(ssim_map(a, b, p, 4.0).rows() == 10);
  CHECK(ssim_map(a, b, p, 4.0).cols() == 14);
}

TEST_CASE("mask restricts the average") {
  Image a = random_image(16, 16, 4);
  Image b = a;
  for (int r = 0; r < 16; ++r)
    for (int c = 8; c < 16; ++c) b.pixels[r * 16 + c] += 1.0;
  SsimParams p;
  p.window_size = 3;
  p.data_range = 4.0;
  std::vector<bool> left(256, false);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 6; ++c) left[r * 16 + c] = true;
  p.mask = left;
  CHECK(ssim(a, b, p) == 1.0);
  p.mask.reset();
  CHECK(ssim(a, b, p) < 1.0);
}

TEST_CASE("degenerate inputs raise") {
  SsimParams p;
  const Image flat{16, 16, RealVec::Ones(256)};
  CHECK_THROWS_AS(ssim(flat, flat, p), DomainError);
  const Image small = random_image(8, 8, 5);
  CHECK_THROWS_AS(ssim(small, small, p), DomainError);
  p.window_size = 4;
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK_THROWS_AS(ssim(random_image(16, 16, 6), random_image(16, 12, 7), SsimParams{}), SizeError);
}

TEST_CASE("time-averaged SSIM averages frames") {
  DynamicImage ref{16, 16, 2, gaussian_vector(512, 8, Field::Real)};
  DynamicImage x = ref;
  x.frame(1) += 0.5 * gaussian_vector(256, 9, Field::Real);
  SsimParams p;
  p.window_size = 7;
  const double s0 = ssim(frame_image(x, 0, Field::Real), frame_image(ref, 0, Field::Real), p);
  const double s1 = ssim(frame_image(x, 1, Field::Real), frame_image(ref, 1, Field::Real), p);
  CHECK(s0 == 1.0);
  CHECK(ssim_time_avg(x, ref, p, Field::Real) == doctest::Approx((s0 + s1) / 2).epsilon(1e-15));
}

TEST_CASE("complex frames are compared by magnitude") {
  DynamicImage ref{16, 16, 1, gaussian_vector(256, 10, Field::Real).cwiseAbs().cast<Scalar>()};
  DynamicImage rotated = ref;
  rotated.values *= std::polar(1.0, 0.7);
  CHECK(ssim_time_avg(rotated, ref, SsimParams{}, Field::Complex) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nrmse") {
  Vec ref(2), x(2);
  ref << 3.0, 4.0;
  x << 3.0, 3.0;
  CHECK(nrmse(x, ref) == doctest::Approx(0.2));
  CHECK(nrmse(ref, ref) == 0.0);
  CHECK_THROWS_AS(nrmse(x, Vec::Zero(2)), DomainError);
}
