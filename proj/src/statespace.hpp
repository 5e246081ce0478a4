#pragma once

#include <armadillo>

#include "rng.hpp"

namespace dfosr {

struct ModelState;
struct FunctionalDataset;

// Dynamic linear model for one factor: scalar observations
//   y_t = Z_t s_t + e_t,   e_t ~ N(0, obs_var[t])
// with state s_t = (alpha_{1..p,t}, gamma_t)', transition diag(I_p, phi) and
// independent innovations. The first state is drawn from N(0, diag(init_var));
// innovation variances apply to the transitions into t = 2..T (row/entry 0 of
// the innovation arrays is ignored).
struct DlmSpec {
  arma::mat Z;                // T x (p+1), rows (x_t', 1)
  double phi = 0.0;           // AR coefficient of the gamma state
  arma::vec obs_var;          // length T, strictly positive
  arma::mat alpha_innov_var;  // T x p, nonnegative
  arma::vec gamma_innov_var;  // length T, nonnegative
  arma::vec init_var;         // length p+1, nonnegative

  arma::uword n_times() const { return Z.n_rows; }
  arma::uword n_pred() const { return Z.n_cols - 1; }
  void validate() const;
};

struct StatePath {
  arma::mat alpha;  // T x p
  arma::vec gamma;  // length T
};

// One draw from the exact joint conditional distribution of all states given
// y, by mean correction (Durbin & Koopman 2002): simulate an unconditional
// pseudo-path and pseudo-data, Kalman-filter and state-smooth the difference,
// and recombine. Cost O(T (p+1)^3).
StatePath simulation_smoother(const DlmSpec& spec, const arma::vec& y,
                              RandomStream& rng);

// Assemble the per-factor DLM from the current model state: predictor rows,
// shrinkage-driven innovation variances, and parameter-expanded initial
// variances. The FOSR-AR variant pins the alpha block (zero innovations,
// lambda_{j,k}^2 initial variance).
DlmSpec build_dlm_spec(arma::uword k, const ModelState& state,
                       const FunctionalDataset& data);

}  // namespace dfosr
