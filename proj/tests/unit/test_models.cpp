#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include <numbers>

#include "dynsparse/models.hpp"

using namespace dynsparse;
using testing::rel_err;

namespace {

Vec image(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("projector hand computation on a 2x2 image") {
  const Vec x = image({1.0, 2.0, 3.0, 4.0});  // [1 2; 3 4]
  // angle 0: rays are vertical lines through the column centers
  const Vec col_sums = ParallelBeamProjector(2, 2, {0.0}).apply(x);
  CHECK(std::abs(col_sums[0] - Scalar(4.0)) < 1e-12);
  CHECK(std::abs(col_sums[1] - Scalar(6.0)) < 1e-12);
  // angle pi/2: rays are horizontal lines, the first bin sits at negative y (bottom row)
  const Vec row_sums = ParallelBeamProjector(2, 2, {std::numbers::pi / 2}).apply(x);
  CHECK(std::abs(row_sums[0] - Scalar(7.0)) < 1e-12);
  CHECK(std::abs(row_sums[1] - Scalar(3.0)) < 1e-12);
}

TEST_CASE("diagonal ray through a single pixel has length sqrt(2)") {
  const Vec y = ParallelBeamProjector(1, 1, {std::numbers::pi / 4}).apply(image({1.0}));
  CHECK(y[0].real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("ray sums of a uniform square approximate its area") {
  const int n = 8;
  // axis-aligned rays each cross a full column of unit pixels
  const Vec y0 = ParallelBeamProjector(n, n, {0.0}).apply(Vec::Ones(n * n));
  CHECK((y0.real().array() - n).abs().maxCoeff() < 1e-12);
  // oblique rays sampled at bin centers integrate the area to within sampling error
  const ParallelBeamProjector p(n, 12, {0.3});
  CHECK(p.apply(Vec::Ones(n * n)).real().sum() == doctest::Approx(n * n).epsilon(0.02));
  CHECK(p.nonzeros() > 0);
}

TEST_CASE("mirrored angle reverses the detector") {
  const Vec x = gaussian_vector(16, 3, Field::Real);
  const Vec a = ParallelBeamProjector(4, 6, {0.4}).apply(x);
  const Vec b = ParallelBeamProjector(4, 6, {0.4 + std::numbers::pi}).apply(x);
  CHECK(rel_err(b, a.reverse()) < 1e-12);
}

TEST_CASE("alternating angle sets") {
  const auto a = alternating_angles(3, 4);
  REQUIRE(a.size() == 3);
  CHECK(a[0][0] == 0.0);
  CHECK(a[1][0] == doctest::Approx(std::numbers::pi));
  CHECK(a[0][3] < std::numbers::pi);
  CHECK(a[1][3] < 2 * std::numbers::pi);
  CHECK(a[2] == a[0]);
  CHECK_THROWS_AS(alternating_angles(0, 4), DomainError);
}

TEST_CASE("radon operator is block diagonal over frames") {
  TomoGeometry g{8, 12, alternating_angles(3, 5)};
  const auto f = make_radon_operator(g);
  CHECK(f->rows() == 3 * 5 * 12);
  Vec x = gaussian_vector(3 * 64, 4, Field::Real);
  x.segment(64, 64).setZero();
  const Vec y = radon_apply(g, x);
  CHECK(y.segment(60, 60).norm() == 0.0);
  CHECK(rel_err(radon_adjoint(g, y), f->adjoint_apply(y)) < 1e-15);
  g.n_detectors = 0;
  CHECK_THROWS_AS(g.validate(), DomainError);
}

TEST_CASE("full Fourier mask is unitary and puts the mean at DC") {
  const FourierMask m = full_fourier_mask(8, 2);
  const Vec x = gaussian_vector(128, 5, Field::Complex);
  const Vec y = fourier_sample_apply(m, x);
  CHECK(std::abs(y.norm() - x.norm()) < 1e-12 * x.norm());
  CHECK(rel_err(fourier_sample_adjoint(m, y), x) < 1e-13);
  const Vec c = fourier_sample_apply(full_fourier_mask(8, 1), Vec::Constant(64, 2.0));
  CHECK(std::abs(c[0] - Scalar(16.0)) < 1e-12);  // 2 * 64 / sqrt(64)
  CHECK(c.tail(63).norm() < 1e-12);
}

TEST_CASE("random Fourier mask keeps DC and is seed-deterministic") {
  const auto a = random_fourier_mask(16, 4, 0.25, 9);
  const auto b = random_fourier_mask(16, 4, 0.25, 9);
  const auto c = random_fourier_mask(16, 4, 0.25, 10);
  CHECK(a.kept == b.kept);
  CHECK(a.kept != c.kept);
  std::size_t kept = 0;
  for (const auto& f : a.kept) {
    CHECK(f[0]);
    kept += static_cast<std::size_t>(std::count(f.begin(), f.end(), true));
  }
  CHECK(kept > 4 * 256 / 8);
  CHECK(kept < 4 * 256 / 2);
  const auto op = make_fourier_operator(a);
  CHECK(op->rows() == static_cast<Index>(kept));
}

TEST_CASE("default phantom") {
  const PhantomSpec spec;
  const DynamicImage img = make_phantom(spec);
  CHECK(img.frames == 16);
  CHECK(img.values.size() == 32 * 32 * 16);
  const auto pos = spec.block_positions();
  CHECK(pos.front() == std::pair{13, 5});
  CHECK(pos.back() == std::pair{13, 20});
  // inside block, inside disc only, outside disc
  CHECK(img.frame(0)[15 * 32 + 7].real() == 1.5);
  CHECK(img.frame(0)[15 * 32 + 25].real() == 0.5);
  CHECK(img.frame(0)[0].real() == 0.0);
  CHECK(img.values.imag().norm() == 0.0);
  const auto mask = phantom_mask(spec);
  CHECK(std::count(mask.begin(), mask.end(), true) > 600);
  CHECK(!mask[0]);
}

TEST_CASE("invalid phantom specs are rejected") {
  PhantomSpec s;
  s.n_frames = 0;
  CHECK_THROWS_AS(make_phantom(s), DomainError);
  s = PhantomSpec{};
  s.block.end_col = 30;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("noise is deterministic and has the requested level") {
  const Vec y = Vec::Zero(20000);
  const Vec a = add_noise(y, 0.5, 3, Field::Real);
  CHECK((a - add_noise(y, 0.5, 3, Field::Real)).norm() == 0.0);
  CHECK((a - add_noise(y, 0.5, 4, Field::Real)).norm() > 0.0);
  CHECK(a.imag().norm() == 0.0);
  CHECK(a.norm() / std::sqrt(20000.0) == doctest::Approx(0.5).epsilon(0.02));
  const Vec c = add_noise(y, 0.5, 3, Field::Complex);
  CHECK(c.norm() / std::sqrt(20000.0) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("whitening with the identity changes nothing") {
  const auto f = dense(gaussian_matrix(5, 4, 6, Field::Real));
  const Vec y = gaussian_vector(5, 7, Field::Real);
  const Whitened w = whiten(y, f, identity(5));
  CHECK((w.data - y).norm() == 0.0);
  const Vec x = gaussian_vector(4, 8, Field::Real);
  CHECK((w.forward->apply(x) - f->apply(x)).norm() == 0.0);
  const Whitened h = whiten(y, f, scaled(Scalar(0.5), identity(5)));
  CHECK(rel_err(h.data, y / 2.0) < 1e-15);
}
