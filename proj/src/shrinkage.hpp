#pragma once

#include <armadillo>

#include "rng.hpp"

namespace dfosr {

// Sampled precisions are floored at 1e-12 and capped at 1e12 (variances the
// reciprocal range).
constexpr double kPrecisionFloor = 1e-12;
constexpr double kPrecisionCap = 1e12;

double clamp_positive(double x);

struct GammaParams {
  double shape;
  double rate;
};

// --- full-conditional parameter builders (appendix forms, unit-testable) ---

// hierarchical half-Cauchy expansion for the dynamic-coefficient innovations
GammaParams hs_sigma_omega_prec(double xi_sigma, double omega);
GammaParams hs_xi_sigma(double lambda_jk_prec, double sigma_omega_prec);
GammaParams hs_lambda_jk_prec(arma::uword n_times, double xi_lambda_jk,
                              double sum_xi_sigma);
GammaParams hs_xi_lambda_jk(double lambda_j_prec, double lambda_jk_prec);
GammaParams hs_lambda_j_prec(arma::uword n_factors, double xi_lambda_j,
                             double sum_xi_lambda_jk);
GammaParams hs_xi_lambda_j(double lambda0_prec, double lambda_j_prec);
GammaParams hs_lambda0_prec(arma::uword n_pred, double xi_lambda0,
                            double sum_xi_lambda_j);
GammaParams hs_xi_lambda0(arma::uword n_times, double lambda0_prec);
// FOSR-AR drops the time level: the static coefficient plays the innovation
GammaParams fosr_ar_lambda_jk_prec(double xi_lambda_jk, double alpha_jk);
// DFOSR-NIG replaces the hierarchy with one normal-inverse-gamma per (j,k)
GammaParams nig_sigma_omega_prec(arma::uword n_times, double sum_omega_sq);

// multiplicative gamma process
GammaParams mgp_delta_mu_first(double a_mu1, arma::uword n_factors,
                               double weighted_sum_sq);
GammaParams mgp_delta_mu_later(double a_mu2, arma::uword n_factors,
                               arma::uword ell, double weighted_sum_sq);
GammaParams mgp_delta_eta_first(double a_eta1, arma::uword n_factors,
                                arma::uword n_times, double weighted_sum_sq);
GammaParams mgp_delta_eta_later(double a_eta2, arma::uword n_factors,
                                arma::uword n_times, arma::uword ell,
                                double weighted_sum_sq);
GammaParams mgp_xi_eta(double nu_eta, double eta, double sigma_eta_k);

// parameter-expanded t3 initial states
GammaParams init_xi_params(double initial_state);

// hyper-shape conditional log densities (Gamma(2,1) prior for the a's;
// Uniform(2,128) prior for nu)
double hyper_shape_logdensity(double a, const arma::vec& deltas);
double nu_eta_logdensity(double nu, arma::uword n_terms, double sum_log_xi,
                         double sum_xi);

// --- shrinkage state ---

// Innovation-variance state for all three variants. DFOSR-HS uses the full
// hierarchy; DFOSR-NIG keeps only sigma_omega_nig; FOSR-AR keeps the lambda
// levels with the static coefficient in place of the innovations.
struct HorseshoeState {
  arma::cube sigma_omega;   // p x K x T, slice t >= 1 used (sd scale)
  arma::cube xi_sigma;      // p x K x T
  arma::mat lambda_jk;      // p x K (sd scale)
  arma::mat xi_lambda_jk;   // p x K
  arma::vec lambda_j;       // p
  arma::vec xi_lambda_j;    // p
  double lambda0 = 1.0;
  double xi_lambda0 = 1.0;
  arma::mat sigma_omega_nig_;  // p x K, NIG variant only (sd scale)

  static HorseshoeState init(arma::uword p, arma::uword K, arma::uword T);
  double sigma_omega_at(arma::uword j, arma::uword k, arma::uword t) const {
    return sigma_omega(j, k, t);
  }
  double sigma_omega_nig(arma::uword j, arma::uword k) const {
    return sigma_omega_nig_(j, k);
  }
  bool all_positive_finite() const;
};

// Ordered-shrinkage state for intercepts and factor innovations.
struct MgpState {
  arma::vec delta_mu;   // K multipliers
  arma::vec sigma_mu;   // K, sigma_mu(k) = prod_{l<=k} delta_mu(l)^{-1/2}
  arma::vec delta_eta;  // K
  arma::vec sigma_eta;  // K
  arma::mat xi_eta;     // K x T local scales, column t >= 1 used
  double a_mu1 = 2.0, a_mu2 = 2.0, a_eta1 = 2.0, a_eta2 = 2.0;
  double nu_eta = 30.0;

  static MgpState init(arma::uword K, arma::uword T);
  void recompute_sigma_mu();
  void recompute_sigma_eta();
  double sigma_eta_kt(arma::uword k, arma::uword t) const {
    return sigma_eta(k) / std::sqrt(xi_eta(k, t));
  }
};

// AR(1) log-variance state for the stochastic-volatility option.
struct VolatilityState {
  arma::vec h;  // length T log-variances
  double mu_h = -10.0;
  double phi_h = 0.9;
  double sigma_nu = 0.2;

  static VolatilityState init(arma::uword T, double log_var0);
  arma::vec variances() const { return arma::exp(h); }
};

// --- updates (one Gibbs pass each) ---

// omega holds the p x K x (T-1) state increments alpha_{.,.,t} - alpha_{.,.,t-1}.
void update_horseshoe(const arma::cube& omega, HorseshoeState& hs,
                      RandomStream& rng);
// FOSR-AR: alpha_static is p x K; updates the lambda levels only.
void update_fosr_ar_shrinkage(const arma::mat& alpha_static,
                              arma::uword n_times, HorseshoeState& hs,
                              RandomStream& rng);
// NIG: per-(j,k) precision shared over time.
void update_nig_shrinkage(const arma::cube& omega, HorseshoeState& hs,
                          RandomStream& rng);

void update_mgp_mu(const arma::vec& mu, MgpState& mgp, RandomStream& rng);
// eta is K x (T-1): the AR innovations for t = 2..T.
void update_mgp_eta(const arma::mat& eta, MgpState& mgp, RandomStream& rng);
void update_hyper_shapes(MgpState& mgp, RandomStream& rng);

// Auxiliary-mixture update of the log-variance path and its AR parameters
// given the T x M fit residuals. The M within-time residuals are pooled into
// one working observation per time with variance scaled by 1/M.
void update_stochastic_volatility(const arma::mat& residuals,
                                  VolatilityState& sv, RandomStream& rng);

}  // namespace dfosr
