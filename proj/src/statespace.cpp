#include "statespace.hpp"

#include <cmath>

#include "dataset.hpp"
#include "errors.hpp"
#include "gibbs.hpp"

namespace dfosr {

void DlmSpec::validate() const {
  const arma::uword T = n_times();
  const arma::uword p = n_pred();
  if (T < 1) throw InvalidArgument("DlmSpec: empty observation matrix");
  if (obs_var.n_elem != T || gamma_innov_var.n_elem != T ||
      alpha_innov_var.n_rows != T || alpha_innov_var.n_cols != p ||
      init_var.n_elem != p + 1) {
    throw InvalidArgument("DlmSpec: dimension mismatch");
  }
  if (!obs_var.is_finite() || obs_var.min() <= 0.0) {
    throw InvalidArgument("DlmSpec: observation variances must be positive");
  }
  if (!alpha_innov_var.is_finite() || !gamma_innov_var.is_finite() ||
      !init_var.is_finite() || !std::isfinite(phi)) {
    throw InvalidArgument("DlmSpec: non-finite entries");
  }
  if ((alpha_innov_var.n_elem > 0 && alpha_innov_var.min() < 0.0) ||
      gamma_innov_var.min() < 0.0 || init_var.min() < 0.0) {
    throw InvalidArgument("DlmSpec: negative variance");
  }
}

namespace {

struct FilterOutput {
  arma::mat shat;  // T x n, E[s_t | y]
};

// Kalman filter + fast state smoother for the mean of the states given y.
// States propagate with transition diag(I_p, phi); innovations enter t >= 2.
FilterOutput smooth_mean(const DlmSpec& spec, const arma::vec& y) {
  const arma::uword T = spec.n_times();
  const arma::uword p = spec.n_pred();
  const arma::uword n = p + 1;

  arma::vec tdiag(n, arma::fill::ones);
  tdiag(p) = spec.phi;

  arma::vec a(n, arma::fill::zeros);
  arma::mat P = arma::diagmat(spec.init_var);

  arma::vec v(T), F(T);
  arma::mat Ks(n, T);
  arma::cube Ls(n, n, T);

  for (arma::uword t = 0; t < T; ++t) {
    const arma::rowvec Zt = spec.Z.row(t);
    double vt = y(t) - arma::as_scalar(Zt * a);
    arma::vec PZ = P * Zt.t();
    double Ft = arma::as_scalar(Zt * PZ) + spec.obs_var(t);
    if (!(Ft > 0.0) || !std::isfinite(Ft)) {
      // one symmetrization retry, then give up
      P = 0.5 * (P + P.t());
      PZ = P * Zt.t();
      Ft = arma::as_scalar(Zt * PZ) + spec.obs_var(t);
      if (!(Ft > 0.0) || !std::isfinite(Ft)) {
        throw NumericalError(
            "simulation_smoother: filter variance lost positive definiteness "
            "at t = " + std::to_string(t + 1));
      }
    }
    v(t) = vt;
    F(t) = Ft;
    const arma::vec K = (tdiag % PZ) / Ft;  // T P Z' / F
    Ks.col(t) = K;
    arma::mat L = arma::diagmat(tdiag) - K * Zt;
    Ls.slice(t) = L;
    a = tdiag % a + K * vt;
    P = (arma::diagmat(tdiag) * P) * L.t();
    if (t + 1 < T) {
      for (arma::uword j = 0; j < p; ++j) P(j, j) += spec.alpha_innov_var(t + 1, j);
      P(p, p) += spec.gamma_innov_var(t + 1);
    }
    P = 0.5 * (P + P.t());
  }

  // backward recursion r_{t-1} = Z' v/F + L' r, then forward state smoother
  arma::mat r(n, T + 1, arma::fill::zeros);
  for (arma::uword t = T; t-- > 0;) {
    r.col(t) = spec.Z.row(t).t() * (v(t) / F(t)) + Ls.slice(t).t() * r.col(t + 1);
  }

  FilterOutput out;
  out.shat.set_size(T, n);
  arma::vec s = spec.init_var % r.col(0);  // a_1 = 0, shat_1 = P_1 r_0
  out.shat.row(0) = s.t();
  for (arma::uword t = 1; t < T; ++t) {
    s = tdiag % s;
    for (arma::uword j = 0; j < p; ++j) s(j) += spec.alpha_innov_var(t, j) * r(j, t);
    s(p) += spec.gamma_innov_var(t) * r(p, t);
    out.shat.row(t) = s.t();
  }
  return out;
}

}  // namespace

StatePath simulation_smoother(const DlmSpec& spec, const arma::vec& y,
                              RandomStream& rng) {
  spec.validate();
  const arma::uword T = spec.n_times();
  const arma::uword p = spec.n_pred();
  const arma::uword n = p + 1;
  if (y.n_elem != T || !y.is_finite()) {
    throw InvalidArgument("simulation_smoother: bad observation vector");
  }

  // unconditional pseudo-path and pseudo-data
  arma::mat splus(T, n);
  arma::vec yplus(T);
  arma::vec s(n);
  for (arma::uword i = 0; i < n; ++i) {
    s(i) = rng.normal() * std::sqrt(spec.init_var(i));
  }
  for (arma::uword t = 0; t < T; ++t) {
    if (t > 0) {
      for (arma::uword j = 0; j < p; ++j) {
        s(j) += rng.normal() * std::sqrt(spec.alpha_innov_var(t, j));
      }
      s(p) = spec.phi * s(p) + rng.normal() * std::sqrt(spec.gamma_innov_var(t));
    }
    splus.row(t) = s.t();
    yplus(t) = arma::as_scalar(spec.Z.row(t) * s) +
               rng.normal() * std::sqrt(spec.obs_var(t));
  }

  const FilterOutput sm = smooth_mean(spec, y - yplus);

  StatePath path;
  arma::mat states = splus + sm.shat;
  path.alpha = states.cols(0, p == 0 ? 0 : p - 1);
  if (p == 0) path.alpha.set_size(T, 0);
  path.gamma = states.col(p);
  return path;
}

DlmSpec build_dlm_spec(arma::uword k, const ModelState& state,
                       const FunctionalDataset& data) {
  const arma::uword T = data.n_times();
  const arma::uword p = data.n_pred();
  if (k >= state.n_factors()) throw InvalidArgument("build_dlm_spec: factor index");

  DlmSpec spec;
  spec.Z.set_size(T, p + 1);
  if (p > 0) spec.Z.cols(0, p - 1) = data.X;
  spec.Z.col(p).ones();
  spec.phi = state.phi(k);

  spec.obs_var = state.obs_variances();

  spec.alpha_innov_var.zeros(T, p);
  spec.gamma_innov_var.zeros(T);
  spec.init_var.set_size(p + 1);

  for (arma::uword t = 1; t < T; ++t) {
    spec.gamma_innov_var(t) = state.mgp.sigma_eta_kt(k, t);
    spec.gamma_innov_var(t) *= spec.gamma_innov_var(t);
  }
  spec.init_var(p) = 1.0 / state.init_xi_eta(k);

  switch (state.variant) {
    case ModelVariant::FosrAr:
      // static coefficient as an initial state: no innovations at any t
      for (arma::uword j = 0; j < p; ++j) {
        const double l = state.hs.lambda_jk(j, k);
        spec.init_var(j) = l * l;
      }
      break;
    case ModelVariant::DfosrHs:
    case ModelVariant::DfosrNig:
      for (arma::uword t = 1; t < T; ++t) {
        for (arma::uword j = 0; j < p; ++j) {
          const double s = state.variant == ModelVariant::DfosrNig
                               ? state.hs.sigma_omega_nig(j, k)
                               : state.hs.sigma_omega(j, k, t);
          spec.alpha_innov_var(t, j) = s * s;
        }
      }
      for (arma::uword j = 0; j < p; ++j) {
        spec.init_var(j) = 1.0 / state.init_xi_omega(j, k);
      }
      break;
  }
  spec.validate();
  return spec;
}

}  // namespace dfosr
