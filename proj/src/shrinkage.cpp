#include "shrinkage.hpp"

#include <cmath>

#include "errors.hpp"
#include "sampling.hpp"
#include "statespace.hpp"

namespace dfosr {

double clamp_positive(double x) {
  if (x < kPrecisionFloor) return kPrecisionFloor;
  if (x > kPrecisionCap) return kPrecisionCap;
  return x;
}

namespace {

double draw_clamped(const GammaParams& g, RandomStream& rng) {
  return clamp_positive(rng.gamma(g.shape, std::max(g.rate, 1e-300)));
}

}  // namespace

// --- full-conditional parameters ---

GammaParams hs_sigma_omega_prec(double xi_sigma, double omega) {
  return {1.0, xi_sigma + 0.5 * omega * omega};
}
GammaParams hs_xi_sigma(double lambda_jk_prec, double sigma_omega_prec) {
  return {1.0, lambda_jk_prec + sigma_omega_prec};
}
GammaParams hs_lambda_jk_prec(arma::uword n_times, double xi_lambda_jk,
                              double sum_xi_sigma) {
  return {0.5 * static_cast<double>(n_times), xi_lambda_jk + sum_xi_sigma};
}
GammaParams hs_xi_lambda_jk(double lambda_j_prec, double lambda_jk_prec) {
  return {1.0, lambda_j_prec + lambda_jk_prec};
}
GammaParams hs_lambda_j_prec(arma::uword n_factors, double xi_lambda_j,
                             double sum_xi_lambda_jk) {
  return {0.5 * static_cast<double>(n_factors + 1),
          xi_lambda_j + sum_xi_lambda_jk};
}
GammaParams hs_xi_lambda_j(double lambda0_prec, double lambda_j_prec) {
  return {1.0, lambda0_prec + lambda_j_prec};
}
GammaParams hs_lambda0_prec(arma::uword n_pred, double xi_lambda0,
                            double sum_xi_lambda_j) {
  return {0.5 * static_cast<double>(n_pred + 1), xi_lambda0 + sum_xi_lambda_j};
}
GammaParams hs_xi_lambda0(arma::uword n_times, double lambda0_prec) {
  return {1.0, static_cast<double>(n_times - 1) + lambda0_prec};
}
GammaParams fosr_ar_lambda_jk_prec(double xi_lambda_jk, double alpha_jk) {
  return {1.0, xi_lambda_jk + 0.5 * alpha_jk * alpha_jk};
}
GammaParams nig_sigma_omega_prec(arma::uword n_times, double sum_omega_sq) {
  return {0.001 + 0.5 * static_cast<double>(n_times - 1),
          0.001 + 0.5 * sum_omega_sq};
}

GammaParams mgp_delta_mu_first(double a_mu1, arma::uword n_factors,
                               double weighted_sum_sq) {
  return {a_mu1 + 0.5 * static_cast<double>(n_factors),
          1.0 + 0.5 * weighted_sum_sq};
}
GammaParams mgp_delta_mu_later(double a_mu2, arma::uword n_factors,
                               arma::uword ell, double weighted_sum_sq) {
  return {a_mu2 + 0.5 * static_cast<double>(n_factors - ell + 1),
          1.0 + 0.5 * weighted_sum_sq};
}
GammaParams mgp_delta_eta_first(double a_eta1, arma::uword n_factors,
                                arma::uword n_times, double weighted_sum_sq) {
  return {a_eta1 + 0.5 * static_cast<double>(n_factors * (n_times - 1)),
          1.0 + 0.5 * weighted_sum_sq};
}
GammaParams mgp_delta_eta_later(double a_eta2, arma::uword n_factors,
                                arma::uword n_times, arma::uword ell,
                                double weighted_sum_sq) {
  return {a_eta2 +
              0.5 * static_cast<double>((n_factors - ell + 1) * (n_times - 1)),
          1.0 + 0.5 * weighted_sum_sq};
}
GammaParams mgp_xi_eta(double nu_eta, double eta, double sigma_eta_k) {
  return {0.5 * nu_eta + 0.5,
          0.5 * nu_eta + 0.5 * eta * eta / (sigma_eta_k * sigma_eta_k)};
}

GammaParams init_xi_params(double initial_state) {
  return {2.0, 1.5 + 0.5 * initial_state * initial_state};
}

double hyper_shape_logdensity(double a, const arma::vec& deltas) {
  if (!(a > 0.0)) return -arma::datum::inf;
  double out = std::log(a) - a;  // Gamma(2,1) prior
  for (const double d : deltas) {
    out += (a - 1.0) * std::log(d) - std::lgamma(a);
  }
  return out;
}

double nu_eta_logdensity(double nu, arma::uword n_terms, double sum_log_xi,
                         double sum_xi) {
  if (!(nu >= 2.0 && nu <= 128.0)) return -arma::datum::inf;
  const double half = 0.5 * nu;
  return static_cast<double>(n_terms) * (half * std::log(half) - std::lgamma(half)) +
         (half - 1.0) * sum_log_xi - half * sum_xi;
}

// --- states ---

HorseshoeState HorseshoeState::init(arma::uword p, arma::uword K, arma::uword T) {
  HorseshoeState hs;
  hs.sigma_omega.ones(p, K, T);
  hs.xi_sigma.ones(p, K, T);
  hs.lambda_jk.ones(p, K);
  hs.xi_lambda_jk.ones(p, K);
  hs.lambda_j.ones(p);
  hs.xi_lambda_j.ones(p);
  hs.lambda0 = 1.0;
  hs.xi_lambda0 = 1.0;
  hs.sigma_omega_nig_.ones(p, K);
  return hs;
}

bool HorseshoeState::all_positive_finite() const {
  auto ok = [](const auto& a) { return a.is_finite() && a.min() > 0.0; };
  return ok(sigma_omega) && ok(xi_sigma) && ok(lambda_jk) && ok(xi_lambda_jk) &&
         (lambda_j.n_elem == 0 || (ok(lambda_j) && ok(xi_lambda_j))) &&
         ok(sigma_omega_nig_) && lambda0 > 0.0 && xi_lambda0 > 0.0 &&
         std::isfinite(lambda0) && std::isfinite(xi_lambda0);
}

MgpState MgpState::init(arma::uword K, arma::uword T) {
  MgpState mgp;
  mgp.delta_mu.ones(K);
  mgp.delta_eta.ones(K);
  mgp.xi_eta.ones(K, T);
  mgp.recompute_sigma_mu();
  mgp.recompute_sigma_eta();
  return mgp;
}

void MgpState::recompute_sigma_mu() {
  sigma_mu.set_size(delta_mu.n_elem);
  double prod = 1.0;
  for (arma::uword k = 0; k < delta_mu.n_elem; ++k) {
    prod *= delta_mu(k);
    sigma_mu(k) = 1.0 / std::sqrt(clamp_positive(prod));
  }
}

void MgpState::recompute_sigma_eta() {
  sigma_eta.set_size(delta_eta.n_elem);
  double prod = 1.0;
  for (arma::uword k = 0; k < delta_eta.n_elem; ++k) {
    prod *= delta_eta(k);
    sigma_eta(k) = 1.0 / std::sqrt(clamp_positive(prod));
  }
}

VolatilityState VolatilityState::init(arma::uword T, double log_var0) {
  VolatilityState sv;
  sv.h.set_size(T);
  sv.h.fill(log_var0);
  sv.mu_h = log_var0;
  return sv;
}

// --- updates ---

void update_horseshoe(const arma::cube& omega, HorseshoeState& hs,
                      RandomStream& rng) {
  const arma::uword p = omega.n_rows;
  const arma::uword K = omega.n_cols;
  const arma::uword n_inc = omega.n_slices;  // T - 1
  const arma::uword T = n_inc + 1;

  const double l0_prec = 1.0 / (hs.lambda0 * hs.lambda0);

  arma::vec sum_xi_lambda_j(p, arma::fill::zeros);
  for (arma::uword j = 0; j < p; ++j) {
    const double lj_prec = 1.0 / (hs.lambda_j(j) * hs.lambda_j(j));
    double sum_xi_lambda_jk = 0.0;
    for (arma::uword k = 0; k < K; ++k) {
      double ljk_prec = 1.0 / (hs.lambda_jk(j, k) * hs.lambda_jk(j, k));
      double sum_xi_sigma = 0.0;
      for (arma::uword t = 0; t < n_inc; ++t) {
        const double w = omega(j, k, t);
        if (!std::isfinite(w)) {
          throw NumericalError("update_horseshoe: non-finite increment at (j=" +
                               std::to_string(j + 1) + ", k=" +
                               std::to_string(k + 1) + ", t=" +
                               std::to_string(t + 2) + ")");
        }
        const double s_prec =
            draw_clamped(hs_sigma_omega_prec(hs.xi_sigma(j, k, t + 1), w), rng);
        hs.sigma_omega(j, k, t + 1) = 1.0 / std::sqrt(s_prec);
        hs.xi_sigma(j, k, t + 1) =
            draw_clamped(hs_xi_sigma(ljk_prec, s_prec), rng);
        sum_xi_sigma += hs.xi_sigma(j, k, t + 1);
      }
      ljk_prec = draw_clamped(
          hs_lambda_jk_prec(T, hs.xi_lambda_jk(j, k), sum_xi_sigma), rng);
      hs.lambda_jk(j, k) = 1.0 / std::sqrt(ljk_prec);
      hs.xi_lambda_jk(j, k) =
          draw_clamped(hs_xi_lambda_jk(lj_prec, ljk_prec), rng);
      sum_xi_lambda_jk += hs.xi_lambda_jk(j, k);
    }
    const double lj_new = draw_clamped(
        hs_lambda_j_prec(K, hs.xi_lambda_j(j), sum_xi_lambda_jk), rng);
    hs.lambda_j(j) = 1.0 / std::sqrt(lj_new);
    hs.xi_lambda_j(j) = draw_clamped(hs_xi_lambda_j(l0_prec, lj_new), rng);
    sum_xi_lambda_j(j) = hs.xi_lambda_j(j);
  }
  const double l0_new = draw_clamped(
      hs_lambda0_prec(p, hs.xi_lambda0, arma::accu(sum_xi_lambda_j)), rng);
  hs.lambda0 = 1.0 / std::sqrt(l0_new);
  hs.xi_lambda0 = draw_clamped(hs_xi_lambda0(T, l0_new), rng);
}

void update_fosr_ar_shrinkage(const arma::mat& alpha_static,
                              arma::uword n_times, HorseshoeState& hs,
                              RandomStream& rng) {
  const arma::uword p = alpha_static.n_rows;
  const arma::uword K = alpha_static.n_cols;
  const double l0_prec = 1.0 / (hs.lambda0 * hs.lambda0);

  double sum_xi_lambda_j = 0.0;
  for (arma::uword j = 0; j < p; ++j) {
    const double lj_prec = 1.0 / (hs.lambda_j(j) * hs.lambda_j(j));
    double sum_xi_lambda_jk = 0.0;
    for (arma::uword k = 0; k < K; ++k) {
      if (!std::isfinite(alpha_static(j, k))) {
        throw NumericalError("fosr-ar shrinkage: non-finite coefficient at (j=" +
                             std::to_string(j + 1) + ", k=" +
                             std::to_string(k + 1) + ")");
      }
      const double ljk_prec = draw_clamped(
          fosr_ar_lambda_jk_prec(hs.xi_lambda_jk(j, k), alpha_static(j, k)),
          rng);
      hs.lambda_jk(j, k) = 1.0 / std::sqrt(ljk_prec);
      hs.xi_lambda_jk(j, k) =
          draw_clamped(hs_xi_lambda_jk(lj_prec, ljk_prec), rng);
      sum_xi_lambda_jk += hs.xi_lambda_jk(j, k);
    }
    const double lj_new = draw_clamped(
        hs_lambda_j_prec(K, hs.xi_lambda_j(j), sum_xi_lambda_jk), rng);
    hs.lambda_j(j) = 1.0 / std::sqrt(lj_new);
    hs.xi_lambda_j(j) = draw_clamped(hs_xi_lambda_j(l0_prec, lj_new), rng);
    sum_xi_lambda_j += hs.xi_lambda_j(j);
  }
  const double l0_new =
      draw_clamped(hs_lambda0_prec(p, hs.xi_lambda0, sum_xi_lambda_j), rng);
  hs.lambda0 = 1.0 / std::sqrt(l0_new);
  hs.xi_lambda0 = draw_clamped(hs_xi_lambda0(n_times, l0_new), rng);
}

void update_nig_shrinkage(const arma::cube& omega, HorseshoeState& hs,
                          RandomStream& rng) {
  const arma::uword p = omega.n_rows;
  const arma::uword K = omega.n_cols;
  const arma::uword T = omega.n_slices + 1;
  for (arma::uword j = 0; j < p; ++j) {
    for (arma::uword k = 0; k < K; ++k) {
      double ss = 0.0;
      for (arma::uword t = 0; t < omega.n_slices; ++t) {
        const double w = omega(j, k, t);
        if (!std::isfinite(w)) {
          throw NumericalError("nig shrinkage: non-finite increment at (j=" +
                               std::to_string(j + 1) + ", k=" +
                               std::to_string(k + 1) + ", t=" +
                               std::to_string(t + 2) + ")");
        }
        ss += w * w;
      }
      const double prec = draw_clamped(nig_sigma_omega_prec(T, ss), rng);
      hs.sigma_omega_nig_(j, k) = 1.0 / std::sqrt(prec);
    }
  }
}

namespace {

// leave-one-out cumulative products tau^{(ell)}_k = prod_{h<=k, h!=ell} delta_h
double weighted_sumsq(const arma::vec& delta, const arma::vec& sq,
                      arma::uword ell) {
  const arma::uword K = delta.n_elem;
  double out = 0.0;
  double prod = 1.0;
  for (arma::uword k = 0; k < K; ++k) {
    if (k != ell) prod *= delta(k);
    if (k >= ell) out += prod * sq(k);
  }
  return out;
}

}  // namespace

void update_mgp_mu(const arma::vec& mu, MgpState& mgp, RandomStream& rng) {
  const arma::uword K = mu.n_elem;
  const arma::vec musq = arma::square(mu);
  for (arma::uword ell = 0; ell < K; ++ell) {
    const double wss = weighted_sumsq(mgp.delta_mu, musq, ell);
    const GammaParams g =
        ell == 0 ? mgp_delta_mu_first(mgp.a_mu1, K, wss)
                 : mgp_delta_mu_later(mgp.a_mu2, K, ell + 1, wss);
    mgp.delta_mu(ell) = draw_clamped(g, rng);
  }
  mgp.recompute_sigma_mu();
}

void update_mgp_eta(const arma::mat& eta, MgpState& mgp, RandomStream& rng) {
  const arma::uword K = eta.n_rows;
  const arma::uword n_inc = eta.n_cols;  // T - 1
  const arma::uword T = n_inc + 1;

  // weighted innovation sums use the current local scales
  arma::vec esq(K);
  for (arma::uword k = 0; k < K; ++k) {
    double s = 0.0;
    for (arma::uword t = 0; t < n_inc; ++t) {
      s += eta(k, t) * eta(k, t) * mgp.xi_eta(k, t + 1);
    }
    esq(k) = s;
  }
  for (arma::uword ell = 0; ell < K; ++ell) {
    const double wss = weighted_sumsq(mgp.delta_eta, esq, ell);
    const GammaParams g =
        ell == 0 ? mgp_delta_eta_first(mgp.a_eta1, K, T, wss)
                 : mgp_delta_eta_later(mgp.a_eta2, K, T, ell + 1, wss);
    mgp.delta_eta(ell) = draw_clamped(g, rng);
  }
  mgp.recompute_sigma_eta();

  for (arma::uword k = 0; k < K; ++k) {
    for (arma::uword t = 0; t < n_inc; ++t) {
      mgp.xi_eta(k, t + 1) = draw_clamped(
          mgp_xi_eta(mgp.nu_eta, eta(k, t), mgp.sigma_eta(k)), rng);
    }
  }
}

void update_hyper_shapes(MgpState& mgp, RandomStream& rng) {
  const arma::uword K = mgp.delta_mu.n_elem;
  const double a_lo = 0.1, a_hi = 50.0, width = 1.0;

  auto slice_shape = [&](double current, const arma::vec& deltas) {
    const double x0 = std::clamp(current, a_lo + 1e-6, a_hi - 1e-6);
    return slice_sample(
        [&](double a) { return hyper_shape_logdensity(a, deltas); }, x0, a_lo,
        a_hi, width, rng);
  };
  mgp.a_mu1 = slice_shape(mgp.a_mu1, mgp.delta_mu.head(1));
  mgp.a_eta1 = slice_shape(mgp.a_eta1, mgp.delta_eta.head(1));
  if (K > 1) {
    mgp.a_mu2 = slice_shape(mgp.a_mu2, mgp.delta_mu.tail(K - 1));
    mgp.a_eta2 = slice_shape(mgp.a_eta2, mgp.delta_eta.tail(K - 1));
  } else {
    mgp.a_mu2 = slice_shape(mgp.a_mu2, arma::vec());
    mgp.a_eta2 = slice_shape(mgp.a_eta2, arma::vec());
  }

  // nu_eta against the Gamma(nu/2, nu/2) likelihood of the local scales
  const arma::uword T = mgp.xi_eta.n_cols;
  arma::uword n_terms = 0;
  double sum_log_xi = 0.0, sum_xi = 0.0;
  for (arma::uword k = 0; k < K; ++k) {
    for (arma::uword t = 1; t < T; ++t) {
      sum_log_xi += std::log(mgp.xi_eta(k, t));
      sum_xi += mgp.xi_eta(k, t);
      ++n_terms;
    }
  }
  const double nu0 = std::clamp(mgp.nu_eta, 2.0 + 1e-6, 128.0 - 1e-6);
  mgp.nu_eta = slice_sample(
      [&](double nu) {
        return nu_eta_logdensity(nu, n_terms, sum_log_xi, sum_xi);
      },
      nu0, 2.0, 128.0, 1.0, rng);
}

namespace {

// Omori, Chib, Shephard & Nakajima (2007) ten-component mixture for log chi^2_1
constexpr int kMix = 10;
constexpr double kMixProb[kMix] = {0.00609, 0.04775, 0.13057, 0.20674,
                                   0.22715, 0.18842, 0.12047, 0.05591,
                                   0.01575, 0.00115};
constexpr double kMixMean[kMix] = {1.92677,  1.34744,  0.73504,  0.02266,
                                   -0.85173, -1.97278, -3.46788, -5.55246,
                                   -8.68384, -14.65000};
constexpr double kMixVar[kMix] = {0.11265, 0.17788, 0.26768, 0.40611,
                                  0.62699, 0.98583, 1.57469, 2.54498,
                                  4.16591, 7.33342};

}  // namespace

void update_stochastic_volatility(const arma::mat& residuals,
                                  VolatilityState& sv, RandomStream& rng) {
  const arma::uword T = residuals.n_rows;
  const arma::uword M = residuals.n_cols;
  if (!residuals.is_finite()) {
    throw NumericalError("stochastic volatility: non-finite residual");
  }
  if (sv.h.n_elem != T) {
    throw InvalidArgument("stochastic volatility: state length mismatch");
  }

  // linearize: x = log(resid^2), mixture indicators given current h
  arma::vec work_y(T), work_var(T);
  double weights[kMix];
  for (arma::uword t = 0; t < T; ++t) {
    double acc = 0.0, accv = 0.0;
    for (arma::uword m = 0; m < M; ++m) {
      double r = residuals(t, m);
      if (r == 0.0) r = 1e-10;
      const double x = std::log(r * r);
      const double c = x - sv.h(t);
      for (int i = 0; i < kMix; ++i) {
        const double d = c - kMixMean[i];
        weights[i] =
            kMixProb[i] / std::sqrt(kMixVar[i]) * std::exp(-0.5 * d * d / kMixVar[i]);
      }
      const int idx = rng.discrete(weights, kMix);
      acc += x - kMixMean[idx];
      accv += kMixVar[idx];
    }
    work_y(t) = acc / static_cast<double>(M);
    work_var(t) = accv / (static_cast<double>(M) * static_cast<double>(M));
  }

  // joint draw of h through the p = 0 simulation smoother on g = h - mu_h
  DlmSpec spec;
  spec.Z.ones(T, 1);
  spec.phi = sv.phi_h;
  spec.obs_var = work_var;
  spec.alpha_innov_var.set_size(T, 0);
  spec.gamma_innov_var.set_size(T);
  spec.gamma_innov_var.fill(sv.sigma_nu * sv.sigma_nu);
  spec.init_var = {sv.sigma_nu * sv.sigma_nu /
                   std::max(1.0 - sv.phi_h * sv.phi_h, 1e-10)};
  const StatePath path = simulation_smoother(spec, work_y - sv.mu_h, rng);
  sv.h = sv.mu_h + path.gamma;

  // mu_h: N(-10, 100) prior, AR(1) likelihood with stationary initial state
  const double s2 = sv.sigma_nu * sv.sigma_nu;
  const double phi = sv.phi_h;
  double Q = 1.0 / 100.0 + (1.0 - phi * phi) / s2 +
             (1.0 - phi) * (1.0 - phi) * static_cast<double>(T - 1) / s2;
  double ell = -10.0 / 100.0 + sv.h(0) * (1.0 - phi * phi) / s2;
  for (arma::uword t = 1; t < T; ++t) {
    ell += (1.0 - phi) * (sv.h(t) - phi * sv.h(t - 1)) / s2;
  }
  sv.mu_h = ell / Q + rng.normal() / std::sqrt(Q);

  const arma::vec g = sv.h - sv.mu_h;
  auto ar_loglik = [&](double ph, double sd) {
    const double v = sd * sd;
    double out = 0.5 * std::log(1.0 - ph * ph) - 0.5 * g(0) * g(0) * (1.0 - ph * ph) / v -
                 0.5 * std::log(v);
    for (arma::uword t = 1; t < T; ++t) {
      const double e = g(t) - ph * g(t - 1);
      out += -0.5 * std::log(v) - 0.5 * e * e / v;
    }
    return out;
  };

  // phi_h: Beta(20, 1.5) prior on (phi+1)/2
  const double ph0 = std::clamp(sv.phi_h, -0.999, 0.999);
  sv.phi_h = slice_sample(
      [&](double ph) {
        const double u = 0.5 * (ph + 1.0);
        if (u <= 0.0 || u >= 1.0) return -arma::datum::inf;
        return ar_loglik(ph, sv.sigma_nu) + 19.0 * std::log(u) +
               0.5 * std::log(1.0 - u);
      },
      ph0, -1.0, 1.0, 1.0, rng);

  // sigma_nu: Uniform(0, 100) prior on the sd
  const double s0 = std::clamp(sv.sigma_nu, 1e-8, 100.0 - 1e-8);
  sv.sigma_nu = slice_sample(
      [&](double sd) { return ar_loglik(sv.phi_h, sd); }, s0, 1e-10, 100.0,
      1.0, rng);
}

}  // namespace dfosr
