#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include <Eigen/Dense>

#include "dynsparse/admm.hpp"

using namespace dynsparse;
using testing::rel_err;

TEST_CASE("soft threshold on real data") {
  Vec v(5);
  v << 3.0, -3.0, 0.5, -0.5, 1.0;
  const Vec s = soft_threshold(v, 1.0, Field::Real);
  Vec expect(5);
  expect << 2.0, -2.0, 0.0, 0.0, 0.0;
  CHECK((s - expect).norm() == 0.0);
  CHECK((soft_threshold(v, 0.0, Field::Real) - v).norm() == 0.0);
  CHECK_THROWS_AS(soft_threshold(v, -1.0, Field::Real), DomainError);
}

TEST_CASE("soft threshold on complex data shrinks the magnitude") {
  Vec v(2);
  v << Scalar(3, 4), Scalar(0.3, 0.4);
  const Vec s = soft_threshold(v, 1.0, Field::Complex);
  CHECK(std::abs(s[0] - Scalar(2.4, 3.2)) < 1e-15);
  CHECK(s[1] == Scalar(0, 0));
  const Vec r = soft_threshold(v, 1.0, Field::Real);
  CHECK(std::abs(r[0] - Scalar(2, 3)) < 1e-15);
}

TEST_CASE("penalty stack with zero lower weight has a zero lower block") {
  const auto h1 = dense(gaussian_matrix(4, 6, 1, Field::Real));
  const auto h2 = dense(gaussian_matrix(5, 6, 2, Field::Real));
  const Vec y = stack_penalty(1.0, 0.0, h1, h2)->apply(gaussian_vector(6, 3, Field::Real));
  CHECK(y.size() == 9);
  CHECK(y.tail(5).norm() == 0.0);
}

TEST_CASE("x-update matches the dense normal equations") {
  const Mat f = gaussian_matrix(10, 8, 4, Field::Real);
  const Mat h = gaussian_matrix(7, 8, 5, Field::Real);
  const Vec b = gaussian_vector(10, 6, Field::Real);
  const Vec q = gaussian_vector(7, 7, Field::Real);
  const Vec u = gaussian_vector(7, 8, Field::Real);
  const double rho = 0.8;
  const auto r = x_update(dense(f), dense(h), b, q, u, rho, {1e-14, 1e-14, 500, 0.0});
  const Mat n = f.adjoint() * f + rho * h.adjoint() * h;
  const Vec x = n.ldlt().solve(f.adjoint() * b + rho * h.adjoint() * (q - u));
  CHECK(rel_err(r.x, x) < 1e-9);
}

TEST_CASE("zero temporal weight reduces to a single-transform run") {
  const auto f = dense(gaussian_matrix(12, 16, 9, Field::Real));
  const auto h1 = dense(gaussian_matrix(16, 16, 10, Field::Real));
  const auto h2 = dense(gaussian_matrix(15, 16, 11, Field::Real));
  const Vec b = gaussian_vector(12, 12, Field::Real);
  AdmmConfig cfg;
  cfg.mu1 = 0.3;
  cfg.mu2 = 0.0;
  cfg.rho = 0.5;
  cfg.max_outer_iters = 15;
  const auto two = admm_run(f, h1, h2, b, cfg);
  const auto one = admm_solve(f, scaled(Scalar(0.3), h1), b, cfg);
  CHECK((two.state.x - one.state.x).norm() <= 1e-12 * one.state.x.norm());
}

TEST_CASE("both dual updates reach the same minimizer") {
  const auto f = dense(gaussian_matrix(15, 20, 13, Field::Real));
  const auto h = identity(20);
  const Vec b = gaussian_vector(15, 14, Field::Real);
  AdmmConfig cfg;
  cfg.rho = 0.5;
  cfg.max_outer_iters = 3000;
  cfg.eps_abs = cfg.eps_rel = 1e-12;
  cfg.inner = {1e-14, 1e-14, 200, 0.0};
  const auto v = admm_solve(f, scaled(Scalar(0.4), h), b, cfg);
  cfg.dual_update = DualUpdate::Standard;
  const auto s = admm_solve(f, scaled(Scalar(0.4), h), b, cfg);
  CHECK(v.trace.converged);
  CHECK(s.trace.converged);
  CHECK(rel_err(v.state.x, s.state.x) < 1e-6);
}

TEST_CASE("observer, trace and validation") {
  AdmmConfig cfg;
  cfg.max_outer_iters = 3;
  cfg.eps_abs = cfg.eps_rel = 0.0;
  int calls = 0;
  const auto res = admm_run(identity(4), identity(4), identity(4), Vec::Ones(4), cfg,
                            [&](const AdmmState&, const AdmmIterationRecord&) { ++calls; });
  CHECK(calls == 3);
  CHECK(res.trace.records.size() == 3);
  cfg.rho = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  CHECK(dual_update_from_string("standard") == DualUpdate::Standard);
  CHECK_THROWS(dual_update_from_string("bogus"));
}
