#include "dynsparse/ias.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace dynsparse {

namespace {

double squared_magnitude(const Scalar& v, Field field) {
  return field == Field::Complex ? std::norm(v) : v.real() * v.real();
}

void require_positive(const RealVec& theta, const char* where) {
  for (Index i = 0; i < theta.size(); ++i) {
    if (!(theta[i] > 0.0)) {
      throw DomainError(std::string(where) + ": theta[" + std::to_string(i) + "] = " + std::to_string(theta[i]) +
                        " is not positive");
    }
  }
}

}  // namespace

void IasConfig::validate() const {
  if (!(eta > 0.0)) throw DomainError("IAS eta must be positive");
  if (!(theta_scale > 0.0)) throw DomainError("IAS theta_scale must be positive");
  if (!(outer_tol > 0.0)) throw DomainError("IAS outer_tol must be positive");
  if (max_outer_iters < 1) throw DomainError("IAS max_outer_iters must be >= 1");
  inner.validate();
}

int IasTrace::total_inner_iters() const {
  int n = 0;
  for (const auto& r : records) n += r.inner_iters;
  return n;
}

void IasTrace::write_csv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << "iter,gibbs_energy,theta_rel_change,inner_iters,wall_ms\n";
  for (const auto& r : records) {
    os << r.iteration << ',' << r.gibbs_energy << ',' << r.theta_rel_change << ',' << r.inner_iters << ','
       << r.wall_ms << '\n';
  }
  os.precision(old);
}

MapPtr build_scaled_operator(const MapPtr& forward, const MapPtr& dictionary, const RealVec& theta) {
  check_size("build_scaled_operator: theta vs dictionary columns", dictionary->cols(), theta.size());
  check_size("build_scaled_operator: forward columns vs dictionary rows", dictionary->rows(), forward->cols());
  require_positive(theta, "build_scaled_operator");
  return compose({forward, dictionary, diagonal(RealVec(theta.cwiseSqrt()))});
}

Stage1Result stage1_update(const MapPtr& forward, const MapPtr& dictionary, const RealVec& theta, const Vec& b,
                           const LsmrOptions& inner) {
  const MapPtr a_theta = build_scaled_operator(forward, dictionary, theta);
  LsmrOptions opts = inner;
  opts.damp = 1.0;
  LsmrResult solved = lsmr_solve(*a_theta, b, opts);
  Stage1Result out;
  out.z = theta.cwiseSqrt().cast<Scalar>().cwiseProduct(solved.x);
  out.zeta = std::move(solved.x);
  out.report = solved.report;
  return out;
}

RealVec stage2_update(const Vec& z, double eta, double theta_scale, Field field) {
  if (!(eta > 0.0) || !(theta_scale > 0.0)) throw DomainError("stage2_update: eta and theta_scale must be positive");
  RealVec theta(z.size());
  const double half = 0.5 * theta_scale;
  for (Index i = 0; i < z.size(); ++i) {
    const double m2 = squared_magnitude(z[i], field);
    theta[i] = half * (eta + std::sqrt(eta * eta + 2.0 * m2 / theta_scale));
  }
  return theta;
}

double gibbs_energy(const Vec& z, const RealVec& theta, const LinearMap& forward, const LinearMap& dictionary,
                    const Vec& b, double eta, double theta_scale) {
  check_size("gibbs_energy: theta", z.size(), theta.size());
  require_positive(theta, "gibbs_energy");
  const Vec residual = b - forward.apply(dictionary.apply(z));
  double prior = 0.0, hyper = 0.0;
  for (Index i = 0; i < z.size(); ++i) {
    prior += std::norm(z[i]) / theta[i];
    hyper += theta[i] / theta_scale - eta * std::log(theta[i]);
  }
  return 0.5 * residual.squaredNorm() + 0.5 * prior + hyper;
}

IasResult ias_run(const MapPtr& forward, const MapPtr& dictionary, const Vec& b, const IasConfig& config,
                  const IasObserver& observer) {
  config.validate();
  check_size("ias_run: data", forward->rows(), b.size());
  check_size("ias_run: forward columns vs dictionary rows", dictionary->rows(), forward->cols());
  if (!all_finite(b)) throw DomainError("ias_run: data contains non-finite values");

  using clock = std::chrono::steady_clock;
  const Index p = dictionary->cols();
  IasResult result;
  IasState& st = result.state;
  st.zeta = Vec::Zero(p);
  st.z = Vec::Zero(p);
  st.theta = RealVec::Constant(p, config.theta_scale);

  for (int k = 1; k <= config.max_outer_iters; ++k) {
    const auto t0 = clock::now();
    Stage1Result s1 = stage1_update(forward, dictionary, st.theta, b, config.inner);
    RealVec theta_new = stage2_update(s1.z, config.eta, config.theta_scale, config.field);
    const double rel = (theta_new - st.theta).norm() / st.theta.norm();

    st.zeta = std::move(s1.zeta);
    st.z = std::move(s1.z);
    st.theta = std::move(theta_new);
    st.iteration = k;

    IasIterationRecord rec;
    rec.iteration = k;
    rec.theta_rel_change = rel;
    rec.inner_iters = s1.report.iterations;
    rec.gibbs_energy = gibbs_energy(st.z, st.theta, *forward, *dictionary, b, config.eta, config.theta_scale);
    rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    if (!std::isfinite(rec.gibbs_energy)) {
      throw SolverError("ias_run: Gibbs energy became non-finite at iteration " + std::to_string(k));
    }
    result.trace.records.push_back(rec);
    if (observer) observer(st, rec);

    if (rel < config.outer_tol) {
      result.trace.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace dynsparse
