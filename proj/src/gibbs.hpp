#pragma once

#include <armadillo>
#include <cstdint>
#include <string>
#include <vector>

#include "basis.hpp"
#include "dataset.hpp"
#include "rng.hpp"
#include "shrinkage.hpp"

namespace dfosr {

enum class ModelVariant { DfosrHs = 0, DfosrNig = 1, FosrAr = 2 };

std::string variant_name(ModelVariant v);
ModelVariant variant_from_name(const std::string& name);

struct McmcConfig {
  arma::uword K = 6;
  arma::uword n_iter = 5000;
  arma::uword burn_in = 2000;
  arma::uword thin = 1;
  ModelVariant variant = ModelVariant::DfosrHs;
  bool sv_enabled = false;
  bool stationary_phi = true;
  std::uint64_t seed = 1;

  void validate() const;
  arma::uword n_retained() const { return (n_iter - burn_in) / thin; }
};

// Basis coefficients and evaluated loading curves, kept consistent
// (F = B Psi) with orthonormal columns.
struct LoadingSet {
  arma::mat Psi;  // L x K
  arma::mat F;    // M x K, F'F = I_K
};

// All latent quantities of one Gibbs iteration.
struct ModelState {
  ModelVariant variant = ModelVariant::DfosrHs;
  BasisSystem basis;
  LoadingSet loadings;
  arma::vec lambda_f;        // K smoothing precisions
  arma::mat beta;            // K x T
  arma::vec mu;              // K
  arma::vec phi;             // K
  arma::mat gamma;           // K x T
  arma::cube alpha;          // T x p x K (slice k is the factor-k path)
  HorseshoeState hs;
  MgpState mgp;
  bool sv_enabled = false;
  VolatilityState sv;        // used when sv_enabled
  double sigma2_eps = 1.0;   // used otherwise
  arma::vec init_xi_eta;     // K, xi_{eta_{k,0}}
  arma::mat init_xi_omega;   // p x K, xi_{omega_{j,k,0}}
  arma::mat Ycomp;           // T x M completed data (imputations filled)
  arma::mat BtY;             // L x T, B' Ycomp'
  bool degenerate_fit_warning = false;

  arma::uword n_factors() const { return beta.n_rows; }
  arma::uword n_times() const { return beta.n_cols; }
  arma::uword n_pred() const { return alpha.n_cols; }
  arma::vec obs_variances() const;
  void refresh_projection();  // recompute BtY from Ycomp
};

ModelState initialize_state(const FunctionalDataset& data,
                            const McmcConfig& config);

// Retained posterior draws plus everything needed to summarize them later.
struct PosteriorDraws {
  McmcConfig config;
  arma::vec tau;
  arma::umat missing;                  // T x M mask
  std::vector<std::string> time_labels;
  std::vector<std::string> predictor_names;
  BasisSystem basis;
  std::uint64_t input_hash = 0;

  std::vector<arma::mat> psi;        // L x K
  std::vector<arma::mat> beta;       // K x T
  std::vector<arma::cube> alpha;     // T x p x K
  std::vector<arma::vec> mu;         // K
  std::vector<arma::vec> phi;        // K
  std::vector<arma::vec> sigma_eps;  // T (constant path when SV off)
  std::vector<arma::vec> imputed;    // missing-cell values, row-major (t, m)

  double max_orth_error = 0.0;
  double max_beta_identity_error = 0.0;

  arma::uword n_draws() const { return psi.size(); }
  arma::uword n_times() const { return missing.n_rows; }
  arma::uword n_points() const { return missing.n_cols; }
  arma::uword n_pred() const { return predictor_names.size(); }

  arma::mat loading_curves(arma::uword d) const;               // M x K
  arma::mat surface_draw(arma::uword d, arma::uword j) const;  // T x M
  arma::mat fitted_draw(arma::uword d) const;                  // T x M

  void save(const std::string& path) const;
  static PosteriorDraws load(const std::string& path);
};

// --- Gibbs steps ---

void impute_missing(ModelState& state, const FunctionalDataset& data,
                    RandomStream& rng);
void update_loading_curves(ModelState& state, const FunctionalDataset& data,
                           RandomStream& rng);
arma::mat project(const ModelState& state);  // K x T working data F'Y
void update_dynamic_states(ModelState& state, const arma::mat& ytilde,
                           const FunctionalDataset& data, RandomStream& rng);
void update_mu_phi(ModelState& state, const McmcConfig& config,
                   RandomStream& rng);
void update_observation_variance(ModelState& state,
                                 const FunctionalDataset& data,
                                 RandomStream& rng);

GammaParams obs_variance_params(arma::uword n_points, arma::uword n_times,
                                double residual_sum_sq);
void mu_full_conditional(const arma::vec& gamma_c, double phi,
                         double sigma_mu_k, const arma::vec& sigma_eta_t,
                         double* prec_out, double* lin_out);

PosteriorDraws run_gibbs(const McmcConfig& config,
                         const FunctionalDataset& data);

// Per-draw regression surfaces alpha~_{j,t}(tau) (Sum_k f_k(tau) alpha_{j,k,t}).
std::vector<arma::mat> regression_surface(const PosteriorDraws& draws,
                                          arma::uword j);
// Per-draw fitted curves Sum_k f_k(tau) beta_{k,t}.
std::vector<arma::mat> fitted_curves(const PosteriorDraws& draws);

}  // namespace dfosr
