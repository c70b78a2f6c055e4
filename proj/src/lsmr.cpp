#include "dynsparse/lsmr.hpp"

#include <cmath>

namespace dynsparse {

namespace {

struct Givens {
  double c, s, r;
};

// Stable plane rotation zeroing b against a.
Givens sym_ortho(double a, double b) {
  if (b == 0.0) return {a >= 0.0 ? 1.0 : -1.0, 0.0, std::abs(a)};
  if (a == 0.0) return {0.0, b >= 0.0 ? 1.0 : -1.0, std::abs(b)};
  if (std::abs(b) > std::abs(a)) {
    const double tau = a / b;
    const double s = (b >= 0.0 ? 1.0 : -1.0) / std::sqrt(1.0 + tau * tau);
    return {s * tau, s, b / s};
  }
  const double tau = b / a;
  const double c = (a >= 0.0 ? 1.0 : -1.0) / std::sqrt(1.0 + tau * tau);
  return {c, c * tau, a / c};
}

}  // namespace

void LsmrOptions::validate() const {
  if (!(atol >= 0.0) || !(btol >= 0.0)) throw DomainError("LSMR tolerances must be nonnegative");
  if (max_iters < 1) throw DomainError("LSMR max_iters must be >= 1");
  if (!(damp >= 0.0) || !std::isfinite(damp)) throw DomainError("LSMR damp must be a finite nonnegative number");
}

const char* to_string(LsmrStop s) {
  switch (s) {
    case LsmrStop::ConvergedAtolBtol: return "converged_atol_btol";
    case LsmrStop::MaxIters: return "max_iters";
    case LsmrStop::ExactSolution: return "exact_solution";
  }
  return "unknown";
}

LsmrResult lsmr_solve(const LinearMap& a, const Vec& b, const LsmrOptions& opts) {
  opts.validate();
  check_size("lsmr_solve: right-hand side", a.rows(), b.size());
  if (!all_finite(b)) throw DomainError("lsmr_solve: right-hand side contains non-finite values");

  const double damp = opts.damp;
  LsmrResult result{Vec::Zero(a.cols()), {}};
  Vec& x = result.x;
  LsmrReport& rep = result.report;

  Vec u = b;
  const double normb = b.norm();
  double beta = normb;
  Vec v = Vec::Zero(a.cols());
  double alpha = 0.0;
  if (beta > 0.0) {
    u /= beta;
    v = a.adjoint_apply(u);
    alpha = v.norm();
  }
  if (alpha > 0.0) v /= alpha;

  double zetabar = alpha * beta, alphabar = alpha;
  double rho = 1.0, rhobar = 1.0, cbar = 1.0, sbar = 0.0;
  Vec h = v;
  Vec hbar = Vec::Zero(a.cols());

  // ||r|| estimation.
  double betadd = beta, betad = 0.0, rhodold = 1.0, tautildeold = 0.0, thetatilde = 0.0, zeta = 0.0, d = 0.0;
  // ||A|| estimation.
  double norm_a2 = alpha * alpha;

  rep.residual_norm = beta;
  rep.normal_residual_norm = alpha * beta;
  if (rep.normal_residual_norm == 0.0) {
    rep.stop_reason = LsmrStop::ExactSolution;
    return result;
  }

  rep.stop_reason = LsmrStop::MaxIters;
  for (int itn = 1; itn <= opts.max_iters; ++itn) {
    rep.iterations = itn;

    // Golub-Kahan bidiagonalization step.
    u = a.apply(v) - alpha * u;
    beta = u.norm();
    if (beta > 0.0) {
      u /= beta;
      v = a.adjoint_apply(u) - beta * v;
      alpha = v.norm();
      if (alpha > 0.0) v /= alpha;
    }

    const Givens qhat = sym_ortho(alphabar, damp);
    const double alphahat = qhat.r;

    const double rhoold = rho;
    const Givens p = sym_ortho(alphahat, beta);
    rho = p.r;
    const double thetanew = p.s * alpha;
    alphabar = p.c * alpha;

    const double rhobarold = rhobar;
    const double zetaold = zeta;
    const double thetabar = sbar * rho;
    const Givens pbar = sym_ortho(cbar * rho, thetanew);
    cbar = pbar.c;
    sbar = pbar.s;
    rhobar = pbar.r;
    zeta = cbar * zetabar;
    zetabar = -sbar * zetabar;

    hbar = h - (thetabar * rho / (rhoold * rhobarold)) * hbar;
    x += (zeta / (rho * rhobar)) * hbar;
    h = v - (thetanew / rho) * h;

    const double betaacute = qhat.c * betadd;
    const double betacheck = -qhat.s * betadd;
    const double betahat = p.c * betaacute;
    betadd = -p.s * betaacute;

    const double thetatildeold = thetatilde;
    const Givens tilde = sym_ortho(rhodold, thetabar);
    thetatilde = tilde.s * rhobar;
    rhodold = tilde.c * rhobar;
    betad = -tilde.s * betad + tilde.c * betahat;

    tautildeold = (zetaold - thetatildeold * tautildeold) / tilde.r;
    const double taud = (zeta - thetatilde * tautildeold) / rhodold;
    d += betacheck * betacheck;
    const double normr = std::sqrt(d + (betad - taud) * (betad - taud) + betadd * betadd);

    norm_a2 += beta * beta;
    const double norm_a = std::sqrt(norm_a2);
    norm_a2 += alpha * alpha;

    const double normar = std::abs(zetabar);
    const double normx = x.norm();
    rep.residual_norm = normr;
    rep.normal_residual_norm = normar;

    if (!std::isfinite(normr) || !std::isfinite(normx)) throw SolverError("lsmr_solve: non-finite iterate");

    const double test1 = normr / normb;
    const double test2 = (norm_a * normr) != 0.0 ? normar / (norm_a * normr) : INFINITY;
    const double t1 = test1 / (1.0 + norm_a * normx / normb);
    const double rtol = opts.btol + opts.atol * norm_a * normx / normb;

    if (test1 <= rtol || test2 <= opts.atol || 1.0 + t1 <= 1.0 || 1.0 + test2 <= 1.0) {
      rep.stop_reason = LsmrStop::ConvergedAtolBtol;
      break;
    }
  }
  return result;
}

}  // namespace dynsparse
