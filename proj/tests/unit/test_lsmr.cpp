#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include <Eigen/Dense>

#include "dynsparse/lsmr.hpp"

using namespace dynsparse;
using testing::rel_err;

namespace {

Vec ridge(const Mat& a, const Vec& b, double damp) {
  const Mat n = a.adjoint() * a + damp * damp * Mat::Identity(a.cols(), a.cols());
  return n.ldlt().solve(a.adjoint() * b);
}

LsmrOptions tight(double damp, int iters = 500) { return {1e-14, 1e-14, iters, damp}; }

}  // namespace

TEST_CASE("damped real solve matches the normal equations") {
  const Mat a = gaussian_matrix(60, 40, 1, Field::Real);
  const Vec b = gaussian_vector(60, 2, Field::Real);
  for (double damp : {0.0, 0.1, 3.0}) {
    const auto r = lsmr_solve(*dense(a), b, tight(damp));
    CHECK(rel_err(r.x, ridge(a, b, damp)) < 1e-8);
    CHECK(r.report.stop_reason == LsmrStop::ConvergedAtolBtol);
  }
}

TEST_CASE("damped complex solve matches the normal equations") {
  const Mat a = gaussian_matrix(20, 12, 3, Field::Complex);
  const Vec b = gaussian_vector(20, 4, Field::Complex);
  const auto r = lsmr_solve(*dense(a), b, tight(0.5));
  CHECK(rel_err(r.x, ridge(a, b, 0.5)) < 1e-8);
}

TEST_CASE("underdetermined consistent system gives the minimum-norm solution") {
  const Mat a = gaussian_matrix(10, 25, 5, Field::Real);
  const Vec b = gaussian_vector(10, 6, Field::Real);
  const Vec x_min = a.adjoint() * (a * a.adjoint()).ldlt().solve(b);
  const auto r = lsmr_solve(*dense(a), b, tight(0.0));
  CHECK(rel_err(r.x, x_min) < 1e-8);
}

TEST_CASE("identity with unit damping halves the data") {
  const Vec b = gaussian_vector(30, 7, Field::Complex);
  const auto r = lsmr_solve(*identity(30, Field::Complex), b, {1e-8, 1e-8, 10, 1.0});
  CHECK((r.x - b / 2.0).norm() <= 1e-12 * b.norm());
}

TEST_CASE("zero data returns zero immediately") {
  const auto r = lsmr_solve(*dense(gaussian_matrix(5, 4, 8, Field::Real)), Vec::Zero(5), {});
  CHECK(r.x.norm() == 0.0);
  CHECK(r.report.iterations == 0);
  CHECK(r.report.stop_reason == LsmrStop::ExactSolution);
}

TEST_CASE("iteration cap is honored and reported") {
  const Mat a = gaussian_matrix(80, 60, 9, Field::Real);
  const auto r = lsmr_solve(*dense(a), gaussian_vector(80, 10, Field::Real), tight(0.0, 3));
  CHECK(r.report.iterations == 3);
  CHECK(r.report.stop_reason == LsmrStop::MaxIters);
}

TEST_CASE("one forward and one adjoint product per iteration") {
  const auto inner = dense(gaussian_matrix(40, 30, 11, Field::Real));
  const auto counted = std::make_shared<testing::CountingMap>(inner);
  const auto r = lsmr_solve(*counted, gaussian_vector(40, 12, Field::Real), tight(0.0, 7));
  CHECK(r.report.iterations == 7);
  CHECK(counted->forward_calls <= 8);
  CHECK(counted->adjoint_calls <= 8);
}

TEST_CASE("residual estimates agree with recomputed residuals") {
  const Mat a = gaussian_matrix(50, 20, 13, Field::Real);
  const Vec b = gaussian_vector(50, 14, Field::Real);
  const double damp = 0.7;
  const auto r = lsmr_solve(*dense(a), b, tight(damp));
  const double true_res = std::sqrt((b - a * r.x).squaredNorm() + damp * damp * r.x.squaredNorm());
  CHECK(r.report.residual_norm == doctest::Approx(true_res).epsilon(1e-6));
}

TEST_CASE("invalid input is rejected") {
  const auto a = dense(gaussian_matrix(5, 4, 15, Field::Real));
  CHECK_THROWS_AS(lsmr_solve(*a, Vec::Zero(4), {}), SizeError);
  Vec bad = Vec::Ones(5);
  bad[2] = Scalar(NAN, 0);
  CHECK_THROWS_AS(lsmr_solve(*a, bad, {}), DomainError);
  CHECK_THROWS_AS(lsmr_solve(*a, Vec::Ones(5), {1e-8, 1e-8, 0, 0.0}), DomainError);
  CHECK_THROWS_AS(lsmr_solve(*a, Vec::Ones(5), {1e-8, 1e-8, 10, -1.0}), DomainError);
}
