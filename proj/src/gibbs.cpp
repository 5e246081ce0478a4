#include "gibbs.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "errors.hpp"
#include "sampling.hpp"
#include "statespace.hpp"

namespace dfosr {

std::string variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::DfosrHs: return "dfosr-hs";
    case ModelVariant::DfosrNig: return "dfosr-nig";
    case ModelVariant::FosrAr: return "fosr-ar";
  }
  return "unknown";
}

ModelVariant variant_from_name(const std::string& name) {
  if (name == "hs" || name == "dfosr-hs") return ModelVariant::DfosrHs;
  if (name == "nig" || name == "dfosr-nig") return ModelVariant::DfosrNig;
  if (name == "fosr-ar" || name == "ar") return ModelVariant::FosrAr;
  throw InvalidArgument("unknown variant: " + name);
}

void McmcConfig::validate() const {
  if (K < 1) throw InvalidArgument("config: K must be at least 1");
  if (n_iter < 1 || burn_in >= n_iter) {
    throw InvalidArgument("config: need burn_in < n_iter");
  }
  if (thin < 1) throw InvalidArgument("config: thin must be at least 1");
}

arma::vec ModelState::obs_variances() const {
  if (sv_enabled) return sv.variances();
  return arma::vec(n_times(), arma::fill::value(sigma2_eps));
}

void ModelState::refresh_projection() { BtY = basis.B.t() * Ycomp.t(); }

namespace {

// linear interpolation across the observed cells of one curve; constant
// extension at the ends
arma::rowvec interpolate_row(const arma::rowvec& y, const arma::urowvec& miss,
                             const arma::vec& tau) {
  const arma::uword M = y.n_elem;
  arma::rowvec out = y;
  arma::uvec obs = arma::find(miss == 0);
  if (obs.n_elem == M) return out;
  for (arma::uword m = 0; m < M; ++m) {
    if (!miss(m)) continue;
    const arma::uvec right = arma::find(obs > m, 1, "first");
    const arma::uvec left = arma::find(obs < m, 1, "last");
    if (left.n_elem && right.n_elem) {
      const arma::uword a = obs(left(0)), b = obs(right(0));
      const double w = (tau(m) - tau(a)) / (tau(b) - tau(a));
      out(m) = (1.0 - w) * y(a) + w * y(b);
    } else if (left.n_elem) {
      out(m) = y(obs(left(0)));
    } else {
      out(m) = y(obs(right(0)));
    }
  }
  return out;
}

}  // namespace

ModelState initialize_state(const FunctionalDataset& data,
                            const McmcConfig& config) {
  const arma::uword T = data.n_times();
  const arma::uword M = data.n_points();
  const arma::uword p = data.n_pred();
  const arma::uword K = config.K;
  if (K > M) throw InvalidArgument("config: K exceeds the number of observation points");

  ModelState state;
  state.variant = config.variant;
  state.basis = build_basis(ObservationGrid::from_points(data.tau));
  const arma::uword L = state.basis.dim();
  if (K > L || K > T) {
    throw InvalidArgument("config: K = " + std::to_string(K) +
                          " exceeds the basis dimension (" + std::to_string(L) +
                          ") or T (" + std::to_string(T) + ")");
  }

  state.Ycomp.set_size(T, M);
  for (arma::uword t = 0; t < T; ++t) {
    state.Ycomp.row(t) =
        interpolate_row(data.Y.row(t), data.missing.row(t), data.tau);
  }
  state.refresh_projection();

  // loading curves from the projected SVD of the column-centered data
  arma::mat Yc = state.Ycomp.each_row() - arma::mean(state.Ycomp, 0);
  arma::mat U, V;
  arma::vec s;
  if (!arma::svd_econ(U, s, V, state.basis.B.t() * Yc.t())) {
    throw NumericalError("initialization: svd failed");
  }
  if (U.n_cols < K) throw NumericalError("initialization: data rank below K");
  state.loadings.Psi = U.cols(0, K - 1);
  state.loadings.F = state.basis.B * state.loadings.Psi;

  state.beta = state.loadings.Psi.t() * state.BtY;
  state.mu = arma::mean(state.beta, 1);
  state.alpha.zeros(T, p, K);
  state.gamma = state.beta.each_col() - state.mu;
  state.phi.set_size(K);
  state.phi.fill(0.5);
  state.lambda_f.ones(K);

  state.hs = HorseshoeState::init(p, K, T);
  state.mgp = MgpState::init(K, T);
  state.init_xi_eta.ones(K);
  state.init_xi_omega.ones(p, K);

  const arma::mat resid = state.Ycomp - (state.loadings.F * state.beta).t();
  double v0 = arma::accu(arma::square(resid)) /
              static_cast<double>(T * M);
  v0 = std::max(v0, 1e-8);
  state.sigma2_eps = v0;
  state.sv_enabled = config.sv_enabled;
  if (config.sv_enabled) state.sv = VolatilityState::init(T, std::log(v0));
  return state;
}

void impute_missing(ModelState& state, const FunctionalDataset& data,
                    RandomStream& rng) {
  if (data.n_missing() == 0) return;
  const arma::mat fit = state.loadings.F * state.beta;  // M x T
  const arma::vec sd = arma::sqrt(state.obs_variances());
  for (arma::uword t = 0; t < data.n_times(); ++t) {
    for (arma::uword m = 0; m < data.n_points(); ++m) {
      if (data.missing(t, m)) {
        state.Ycomp(t, m) = fit(m, t) + sd(t) * rng.normal();
      }
    }
  }
  state.refresh_projection();
}

void update_loading_curves(ModelState& state, const FunctionalDataset& data,
                           RandomStream& rng) {
  (void)data;
  const arma::uword K = state.n_factors();
  const arma::uword L = state.basis.dim();
  const arma::vec prec_eps = 1.0 / state.obs_variances();
  const arma::mat& Omega = state.basis.Omega;

  for (arma::uword k = 0; k < K; ++k) {
    // smoothing precision, truncated to (1e-8, inf)
    const arma::vec psi_k = state.loadings.Psi.col(k);
    const double quad = arma::as_scalar(psi_k.t() * Omega * psi_k);
    state.lambda_f(k) = clamp_positive(sample_truncated_gamma(
        0.5 * static_cast<double>(L - state.basis.D + 2),
        std::max(0.5 * quad, 1e-300), 1e-8, rng));

    // full conditional in the orthonormal-basis form
    const arma::vec bw = state.beta.row(k).t() % prec_eps;  // T
    const double qscale = arma::dot(state.beta.row(k).t(), bw);
    GaussianSystem sys;
    sys.Q = state.lambda_f(k) * Omega;
    sys.Q.diag() += qscale;
    sys.ell = state.BtY * bw;
    if (K > 1) {
      const arma::vec cross = state.beta * bw;  // K, entries sum_t b_k b_l prec
      for (arma::uword l = 0; l < K; ++l) {
        if (l != k) sys.ell -= state.loadings.Psi.col(l) * cross(l);
      }
      arma::mat C(K - 1, L);
      arma::uword r = 0;
      for (arma::uword l = 0; l < K; ++l) {
        if (l != k) C.row(r++) = state.loadings.Psi.col(l).t();
      }
      const arma::vec draw = sample_constrained_gaussian(sys, C, rng);
      const double nrm = arma::norm(draw);
      if (nrm < 1e-12) throw NumericalError("degenerate loading draw (norm ~ 0)");
      state.loadings.Psi.col(k) = draw / nrm;
      state.beta.row(k) *= nrm;
    } else {
      const arma::vec draw = sample_gaussian_precision(sys, rng);
      const double nrm = arma::norm(draw);
      if (nrm < 1e-12) throw NumericalError("degenerate loading draw (norm ~ 0)");
      state.loadings.Psi.col(k) = draw / nrm;
      state.beta.row(k) *= nrm;
    }
  }
  state.loadings.F = state.basis.B * state.loadings.Psi;
}

arma::mat project(const ModelState& state) {
  return state.loadings.Psi.t() * state.BtY;
}

void update_dynamic_states(ModelState& state, const arma::mat& ytilde,
                           const FunctionalDataset& data, RandomStream& rng) {
  const arma::uword K = state.n_factors();
  const arma::uword T = state.n_times();
  const arma::uword p = state.n_pred();
  for (arma::uword k = 0; k < K; ++k) {
    const DlmSpec spec = build_dlm_spec(k, state, data);
    const arma::vec y = ytilde.row(k).t() - state.mu(k);
    const StatePath path = simulation_smoother(spec, y, rng);
    state.alpha.slice(k) = path.alpha;
    state.gamma.row(k) = path.gamma.t();
  }
  // recompose beta = mu + x'alpha + gamma
  for (arma::uword k = 0; k < K; ++k) {
    for (arma::uword t = 0; t < T; ++t) {
      double reg = 0.0;
      for (arma::uword j = 0; j < p; ++j) {
        reg += data.X(t, j) * state.alpha(t, j, k);
      }
      state.beta(k, t) = state.mu(k) + reg + state.gamma(k, t);
    }
  }
}

void mu_full_conditional(const arma::vec& gamma_c, double phi,
                         double sigma_mu_k, const arma::vec& sigma_eta_t,
                         double* prec_out, double* lin_out) {
  const arma::uword T = gamma_c.n_elem;
  double Q = 1.0 / (sigma_mu_k * sigma_mu_k);
  double ell = 0.0;
  for (arma::uword t = 1; t < T; ++t) {
    const double pr = 1.0 / (sigma_eta_t(t) * sigma_eta_t(t));
    Q += (1.0 - phi) * (1.0 - phi) * pr;
    ell += (1.0 - phi) * (gamma_c(t) - phi * gamma_c(t - 1)) * pr;
  }
  *prec_out = Q;
  *lin_out = ell;
}

void update_mu_phi(ModelState& state, const McmcConfig& config,
                   RandomStream& rng) {
  const arma::uword K = state.n_factors();
  const arma::uword T = state.n_times();
  for (arma::uword k = 0; k < K; ++k) {
    const arma::vec gamma_c = state.gamma.row(k).t() + state.mu(k);
    arma::vec sig_eta(T);
    for (arma::uword t = 1; t < T; ++t) sig_eta(t) = state.mgp.sigma_eta_kt(k, t);
    sig_eta(0) = 1.0;

    double Q, ell;
    mu_full_conditional(gamma_c, state.phi(k), state.mgp.sigma_mu(k), sig_eta,
                        &Q, &ell);
    state.mu(k) = ell / Q + rng.normal() / std::sqrt(Q);
    state.gamma.row(k) = (gamma_c - state.mu(k)).t();

    const arma::rowvec g = state.gamma.row(k);
    arma::vec prec(T);
    for (arma::uword t = 1; t < T; ++t) prec(t) = 1.0 / (sig_eta(t) * sig_eta(t));
    auto ar_loglik = [&](double ph) {
      double out = 0.0;
      for (arma::uword t = 1; t < T; ++t) {
        const double e = g(t) - ph * g(t - 1);
        out -= 0.5 * e * e * prec(t);
      }
      return out;
    };
    double lo, hi;
    std::function<double(double)> target;
    if (config.stationary_phi) {
      lo = -1.0;
      hi = 1.0;
      target = [&](double ph) {
        const double u = 0.5 * (ph + 1.0);
        if (u <= 0.0 || u >= 1.0) return -arma::datum::inf;
        // Beta(5, 2) prior on (phi+1)/2
        return ar_loglik(ph) + 4.0 * std::log(u) + std::log(1.0 - u);
      };
    } else {
      lo = -0.99;
      hi = 0.99;
      target = ar_loglik;
    }
    const double x0 = std::clamp(state.phi(k), lo + 1e-6, hi - 1e-6);
    state.phi(k) = slice_sample(target, x0, lo, hi, 1.0, rng);
  }
}

GammaParams obs_variance_params(arma::uword n_points, arma::uword n_times,
                                double residual_sum_sq) {
  return {0.5 * static_cast<double>(n_points * n_times), 0.5 * residual_sum_sq};
}

void update_observation_variance(ModelState& state,
                                 const FunctionalDataset& data,
                                 RandomStream& rng) {
  const arma::mat resid = state.Ycomp - (state.loadings.F * state.beta).t();
  if (state.sv_enabled) {
    update_stochastic_volatility(resid, state.sv, rng);
    return;
  }
  GammaParams g = obs_variance_params(data.n_points(), data.n_times(),
                                      arma::accu(arma::square(resid)));
  if (g.rate < 1e-300) {
    g.rate = 1e-300;
    state.degenerate_fit_warning = true;
  }
  state.sigma2_eps = 1.0 / clamp_positive(rng.gamma(g.shape, g.rate));
}

namespace {

void update_innovation_shrinkage(ModelState& state, RandomStream& rng) {
  const arma::uword T = state.n_times();
  const arma::uword p = state.n_pred();
  const arma::uword K = state.n_factors();
  if (p == 0) return;
  if (state.variant == ModelVariant::FosrAr) {
    arma::mat alpha_static(p, K);
    for (arma::uword k = 0; k < K; ++k) {
      for (arma::uword j = 0; j < p; ++j) alpha_static(j, k) = state.alpha(0, j, k);
    }
    update_fosr_ar_shrinkage(alpha_static, T, state.hs, rng);
    return;
  }
  arma::cube omega(p, K, T - 1);
  for (arma::uword k = 0; k < K; ++k) {
    for (arma::uword j = 0; j < p; ++j) {
      for (arma::uword t = 1; t < T; ++t) {
        omega(j, k, t - 1) = state.alpha(t, j, k) - state.alpha(t - 1, j, k);
      }
    }
  }
  if (state.variant == ModelVariant::DfosrNig) {
    update_nig_shrinkage(omega, state.hs, rng);
  } else {
    update_horseshoe(omega, state.hs, rng);
  }
}

void update_initial_expansions(ModelState& state, RandomStream& rng) {
  const arma::uword K = state.n_factors();
  const arma::uword p = state.n_pred();
  for (arma::uword k = 0; k < K; ++k) {
    const GammaParams g = init_xi_params(state.gamma(k, 0));
    state.init_xi_eta(k) = clamp_positive(rng.gamma(g.shape, g.rate));
  }
  if (state.variant == ModelVariant::FosrAr) return;
  for (arma::uword k = 0; k < K; ++k) {
    for (arma::uword j = 0; j < p; ++j) {
      const GammaParams g = init_xi_params(state.alpha(0, j, k));
      state.init_xi_omega(j, k) = clamp_positive(rng.gamma(g.shape, g.rate));
    }
  }
}

}  // namespace

PosteriorDraws run_gibbs(const McmcConfig& config,
                         const FunctionalDataset& data) {
  config.validate();
  data.validate();
  ModelState state = initialize_state(data, config);
  RandomStream rng(config.seed);

  const arma::uword T = data.n_times();
  const arma::uword p = data.n_pred();
  const arma::uword K = config.K;

  PosteriorDraws draws;
  draws.config = config;
  draws.tau = data.tau;
  draws.missing = data.missing;
  draws.time_labels = data.time_labels;
  draws.predictor_names = data.predictor_names;
  draws.basis = state.basis;
  draws.input_hash = content_hash(serialize_dataset(data));
  const arma::uword n_keep = config.n_retained();
  draws.psi.reserve(n_keep);

  arma::uword iter = 0;
  std::string step_name;
  auto step = [&](const char* name, auto&& fn) {
    step_name = name;
    fn();
  };

  const arma::uvec miss_idx = arma::find(data.missing.t() != 0);  // row-major order

  try {
    for (iter = 1; iter <= config.n_iter; ++iter) {
      step("imputation", [&] { impute_missing(state, data, rng); });
      step("loading curves", [&] { update_loading_curves(state, data, rng); });
      arma::mat ytilde;
      step("projection", [&] { ytilde = project(state); });
      step("dynamic states",
           [&] { update_dynamic_states(state, ytilde, data, rng); });
      step("mean and AR coefficients",
           [&] { update_mu_phi(state, config, rng); });
      step("observation variance",
           [&] { update_observation_variance(state, data, rng); });
      step("multiplicative gamma process", [&] {
        update_mgp_mu(state.mu, state.mgp, rng);
        arma::mat eta(K, T - 1);
        for (arma::uword k = 0; k < K; ++k) {
          for (arma::uword t = 1; t < T; ++t) {
            eta(k, t - 1) = state.gamma(k, t) - state.phi(k) * state.gamma(k, t - 1);
          }
        }
        update_mgp_eta(eta, state.mgp, rng);
      });
      step("innovation shrinkage",
           [&] { update_innovation_shrinkage(state, rng); });
      step("initial-value expansions",
           [&] { update_initial_expansions(state, rng); });
      step("hyperparameters", [&] { update_hyper_shapes(state.mgp, rng); });

      if (iter > config.burn_in && (iter - config.burn_in) % config.thin == 0) {
        step("draw retention", [&] {
          const arma::mat& F = state.loadings.F;
          const double orth =
              arma::abs(F.t() * F - arma::eye(K, K)).max();
          draws.max_orth_error = std::max(draws.max_orth_error, orth);
          if (orth > 1e-6) {
            throw NumericalError("orthonormality lost: |F'F - I| = " +
                                 std::to_string(orth));
          }
          double ident = 0.0;
          for (arma::uword k = 0; k < K; ++k) {
            for (arma::uword t = 0; t < T; ++t) {
              double reg = 0.0;
              for (arma::uword j = 0; j < p; ++j) {
                reg += data.X(t, j) * state.alpha(t, j, k);
              }
              ident = std::max(ident, std::abs(state.beta(k, t) - state.mu(k) -
                                               reg - state.gamma(k, t)));
            }
          }
          draws.max_beta_identity_error =
              std::max(draws.max_beta_identity_error, ident);

          draws.psi.push_back(state.loadings.Psi);
          draws.beta.push_back(state.beta);
          draws.alpha.push_back(state.alpha);
          draws.mu.push_back(state.mu);
          draws.phi.push_back(state.phi);
          draws.sigma_eps.push_back(state.obs_variances());
          arma::vec imp(miss_idx.n_elem);
          const arma::mat Yt = state.Ycomp.t();
          for (arma::uword i = 0; i < miss_idx.n_elem; ++i) {
            imp(i) = Yt(miss_idx(i));
          }
          draws.imputed.push_back(imp);
        });
      }
    }
  } catch (const std::exception& e) {
    throw NumericalError("gibbs sampler failed at iteration " +
                         std::to_string(iter) + ", step '" + step_name +
                         "': " + e.what());
  }
  return draws;
}

arma::mat PosteriorDraws::loading_curves(arma::uword d) const {
  return basis.B * psi.at(d);
}

arma::mat PosteriorDraws::surface_draw(arma::uword d, arma::uword j) const {
  if (j >= n_pred()) throw InvalidArgument("surface_draw: predictor index out of range");
  const arma::cube& a = alpha.at(d);
  arma::mat A(a.n_rows, a.n_slices);
  for (arma::uword k = 0; k < a.n_slices; ++k) A.col(k) = a.slice(k).col(j);
  return A * loading_curves(d).t();  // T x M
}

arma::mat PosteriorDraws::fitted_draw(arma::uword d) const {
  return (loading_curves(d) * beta.at(d)).t();  // T x M
}

std::vector<arma::mat> regression_surface(const PosteriorDraws& draws,
                                          arma::uword j) {
  std::vector<arma::mat> out;
  out.reserve(draws.n_draws());
  for (arma::uword d = 0; d < draws.n_draws(); ++d) {
    out.push_back(draws.surface_draw(d, j));
  }
  return out;
}

std::vector<arma::mat> fitted_curves(const PosteriorDraws& draws) {
  std::vector<arma::mat> out;
  out.reserve(draws.n_draws());
  for (arma::uword d = 0; d < draws.n_draws(); ++d) {
    out.push_back(draws.fitted_draw(d));
  }
  return out;
}

// --- binary draws file ---

namespace {

constexpr char kMagic[8] = {'D', 'F', 'O', 'S', 'R', 'D', '0', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
void write_doubles(std::ostream& out, const double* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p), n * sizeof(double));
}
void read_doubles(std::istream& in, double* p, std::size_t n) {
  in.read(reinterpret_cast<char*>(p), n * sizeof(double));
}
void write_string(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), s.size());
}
std::string read_string(std::istream& in) {
  const std::uint64_t n = read_u64(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  return s;
}

}  // namespace

void PosteriorDraws::save(const std::string& path) const {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write draws file: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_u64(out, input_hash);
  write_u64(out, config.K);
  write_u64(out, config.n_iter);
  write_u64(out, config.burn_in);
  write_u64(out, config.thin);
  write_u64(out, static_cast<std::uint64_t>(config.variant));
  write_u64(out, config.sv_enabled ? 1 : 0);
  write_u64(out, config.stationary_phi ? 1 : 0);
  write_u64(out, config.seed);

  const arma::uword T = n_times(), M = n_points(), p = n_pred();
  const arma::uword L = basis.dim();
  write_u64(out, T);
  write_u64(out, M);
  write_u64(out, p);
  write_u64(out, L);
  write_doubles(out, tau.memptr(), M);
  for (arma::uword t = 0; t < T; ++t) {
    for (arma::uword m = 0; m < M; ++m) {
      const char c = missing(t, m) ? 1 : 0;
      out.write(&c, 1);
    }
  }
  for (const auto& s : time_labels) write_string(out, s);
  for (const auto& s : predictor_names) write_string(out, s);
  write_doubles(out, &max_orth_error, 1);
  write_doubles(out, &max_beta_identity_error, 1);

  write_u64(out, n_draws());
  const arma::uword n_miss = arma::accu(missing);
  for (arma::uword d = 0; d < n_draws(); ++d) {
    write_doubles(out, psi[d].memptr(), L * config.K);
    write_doubles(out, beta[d].memptr(), config.K * T);
    write_doubles(out, alpha[d].memptr(), T * p * config.K);
    write_doubles(out, mu[d].memptr(), config.K);
    write_doubles(out, phi[d].memptr(), config.K);
    write_doubles(out, sigma_eps[d].memptr(), T);
    write_doubles(out, imputed[d].memptr(), n_miss);
  }
  if (!out) throw IoError("write failed: " + path);
}

PosteriorDraws PosteriorDraws::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open draws file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw ParseError(path + ": not a draws file");
  }
  PosteriorDraws draws;
  draws.input_hash = read_u64(in);
  draws.config.K = read_u64(in);
  draws.config.n_iter = read_u64(in);
  draws.config.burn_in = read_u64(in);
  draws.config.thin = read_u64(in);
  draws.config.variant = static_cast<ModelVariant>(read_u64(in));
  draws.config.sv_enabled = read_u64(in) != 0;
  draws.config.stationary_phi = read_u64(in) != 0;
  draws.config.seed = read_u64(in);

  const arma::uword T = read_u64(in);
  const arma::uword M = read_u64(in);
  const arma::uword p = read_u64(in);
  const arma::uword L = read_u64(in);
  draws.tau.set_size(M);
  read_doubles(in, draws.tau.memptr(), M);
  draws.missing.set_size(T, M);
  for (arma::uword t = 0; t < T; ++t) {
    for (arma::uword m = 0; m < M; ++m) {
      char c = 0;
      in.read(&c, 1);
      draws.missing(t, m) = c ? 1 : 0;
    }
  }
  draws.time_labels.resize(T);
  for (auto& s : draws.time_labels) s = read_string(in);
  draws.predictor_names.resize(p);
  for (auto& s : draws.predictor_names) s = read_string(in);
  read_doubles(in, &draws.max_orth_error, 1);
  read_doubles(in, &draws.max_beta_identity_error, 1);

  draws.basis = build_basis(ObservationGrid::from_points(draws.tau));
  if (draws.basis.dim() != L) {
    throw ParseError(path + ": basis dimension mismatch");
  }

  const arma::uword n = read_u64(in);
  const arma::uword K = draws.config.K;
  const arma::uword n_miss = arma::accu(draws.missing);
  for (arma::uword d = 0; d < n; ++d) {
    arma::mat psi(L, K), beta(K, T);
    arma::cube alpha(T, p, K);
    arma::vec mu(K), phi(K), sig(T), imp(n_miss);
    read_doubles(in, psi.memptr(), L * K);
    read_doubles(in, beta.memptr(), K * T);
    read_doubles(in, alpha.memptr(), T * p * K);
    read_doubles(in, mu.memptr(), K);
    read_doubles(in, phi.memptr(), K);
    read_doubles(in, sig.memptr(), T);
    read_doubles(in, imp.memptr(), n_miss);
    if (!in) throw ParseError(path + ": truncated draws file");
    draws.psi.push_back(std::move(psi));
    draws.beta.push_back(std::move(beta));
    draws.alpha.push_back(std::move(alpha));
    draws.mu.push_back(std::move(mu));
    draws.phi.push_back(std::move(phi));
    draws.sigma_eps.push_back(std::move(sig));
    draws.imputed.push_back(std::move(imp));
  }
  return draws;
}

}  // namespace dfosr
