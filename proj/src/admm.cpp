#include "dynsparse/admm.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace dynsparse {

namespace {

double shrink(double v, double kappa) {
  const double m = std::abs(v) - kappa;
  return m > 0.0 ? std::copysign(m, v) : 0.0;
}

}  // namespace

const char* to_string(DualUpdate d) { return d == DualUpdate::Verbatim ? "verbatim" : "standard"; }

DualUpdate dual_update_from_string(const std::string& s) {
  if (s == "verbatim") return DualUpdate::Verbatim;
  if (s == "standard") return DualUpdate::Standard;
  throw ConfigError("unknown dual update '" + s + "' (expected verbatim or standard)");
}

void AdmmConfig::validate() const {
  if (!(rho > 0.0)) throw DomainError("ADMM rho must be positive");
  if (!(mu1 >= 0.0) || !(mu2 >= 0.0)) throw DomainError("ADMM weights must be nonnegative");
  if (mu1 == 0.0 && mu2 == 0.0) throw DomainError("ADMM weights must not both be zero");
  if (!(eps_abs >= 0.0) || !(eps_rel >= 0.0)) throw DomainError("ADMM tolerances must be nonnegative");
  if (max_outer_iters < 1) throw DomainError("ADMM max_outer_iters must be >= 1");
  inner.validate();
}

int AdmmTrace::total_inner_iters() const {
  int n = 0;
  for (const auto& r : records) n += r.inner_iters;
  return n;
}

void AdmmTrace::write_csv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << "iter,primal_res,dual_res,inner_iters,wall_ms\n";
  for (const auto& r : records) {
    os << r.iteration << ',' << r.primal_res << ',' << r.dual_res << ',' << r.inner_iters << ',' << r.wall_ms << '\n';
  }
  os.precision(old);
}

MapPtr stack_penalty(double mu1, double mu2, const MapPtr& h1, const MapPtr& h2) {
  check_size("stack_penalty: H2 columns vs H1 columns", h1->cols(), h2->cols());
  return vstack({scaled(mu1, h1), scaled(mu2, h2)});
}

Vec soft_threshold(const Vec& v, double kappa, Field field) {
  if (!(kappa >= 0.0)) throw DomainError("soft_threshold: kappa must be nonnegative");
  Vec out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    if (field == Field::Real) {
      out[i] = Scalar(shrink(v[i].real(), kappa), shrink(v[i].imag(), kappa));
    } else {
      const double mag = std::abs(v[i]);
      out[i] = mag > kappa ? v[i] * (1.0 - kappa / mag) : Scalar(0.0);
    }
  }
  return out;
}

LsmrResult x_update(const MapPtr& forward, const MapPtr& penalty, const Vec& b, const Vec& q, const Vec& u, double rho,
                    const LsmrOptions& inner) {
  check_size("x_update: q", penalty->rows(), q.size());
  check_size("x_update: u", penalty->rows(), u.size());
  check_size("x_update: data", forward->rows(), b.size());
  const double root = std::sqrt(rho);
  const MapPtr stacked = vstack({forward, scaled(root, penalty)});
  Vec rhs(stacked->rows());
  rhs << b, root * (q - u);
  LsmrOptions opts = inner;
  opts.damp = 0.0;
  return lsmr_solve(*stacked, rhs, opts);
}

AdmmResult admm_solve(const MapPtr& forward, const MapPtr& penalty, const Vec& b, const AdmmConfig& config,
                      const AdmmObserver& observer) {
  if (!(config.rho > 0.0)) throw DomainError("ADMM rho must be positive");
  if (config.max_outer_iters < 1) throw DomainError("ADMM max_outer_iters must be >= 1");
  config.inner.validate();
  check_size("admm: penalty columns vs forward columns", forward->cols(), penalty->cols());
  check_size("admm: data", forward->rows(), b.size());
  if (!all_finite(b)) throw DomainError("admm: data contains non-finite values");

  using clock = std::chrono::steady_clock;
  const double rho = config.rho;
  const double sqrt_p = std::sqrt(static_cast<double>(penalty->rows()));
  const double sqrt_n = std::sqrt(static_cast<double>(penalty->cols()));

  AdmmResult result;
  AdmmState& st = result.state;
  st.x = Vec::Zero(forward->cols());
  st.q = Vec::Zero(penalty->rows());
  st.u = Vec::Zero(penalty->rows());

  for (int k = 1; k <= config.max_outer_iters; ++k) {
    const auto t0 = clock::now();
    LsmrResult xs = x_update(forward, penalty, b, st.q, st.u, rho, config.inner);
    st.x = std::move(xs.x);

    const Vec hx = penalty->apply(st.x);
    Vec q_new = soft_threshold(hx + st.u, 1.0 / rho, config.field);
    const Vec r = hx - q_new;
    st.u += (config.dual_update == DualUpdate::Verbatim ? rho : 1.0) * r;
    const Vec s = rho * penalty->adjoint_apply(q_new - st.q);
    st.q = std::move(q_new);

    if (!all_finite(st.x) || !all_finite(st.u)) {
      throw SolverError("admm: non-finite iterate at iteration " + std::to_string(k));
    }

    AdmmIterationRecord rec;
    rec.iteration = k;
    rec.primal_res = r.norm();
    rec.dual_res = s.norm();
    rec.eps_pri = sqrt_p * config.eps_abs + config.eps_rel * std::max(hx.norm(), st.q.norm());
    rec.eps_dual = sqrt_n * config.eps_abs + config.eps_rel * (rho * penalty->adjoint_apply(st.u)).norm();
    rec.inner_iters = xs.report.iterations;
    rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();

    st.primal_residual_norm = rec.primal_res;
    st.dual_residual_norm = rec.dual_res;
    st.iteration = k;
    result.trace.records.push_back(rec);
    if (observer) observer(st, rec);

    if (rec.primal_res <= rec.eps_pri && rec.dual_res <= rec.eps_dual) {
      result.trace.converged = true;
      break;
    }
  }
  return result;
}

AdmmResult admm_run(const MapPtr& forward, const MapPtr& h1, const MapPtr& h2, const Vec& b, const AdmmConfig& config,
                    const AdmmObserver& observer) {
  config.validate();
  return admm_solve(forward, stack_penalty(config.mu1, config.mu2, h1, h2), b, config, observer);
}

}  // namespace dynsparse
