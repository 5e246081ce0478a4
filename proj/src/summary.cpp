#include "summary.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "errors.hpp"

namespace dfosr {

double quantile(const arma::vec& sorted_values, double p) {
  const arma::uword n = sorted_values.n_elem;
  if (n == 0) throw InvalidArgument("quantile of empty vector");
  const double h = (static_cast<double>(n) - 1.0) * p;
  const auto i = static_cast<arma::uword>(std::floor(h));
  if (i + 1 >= n) return sorted_values(n - 1);
  const double frac = h - std::floor(h);
  return sorted_values(i) + frac * (sorted_values(i + 1) - sorted_values(i));
}

arma::vec quantiles(arma::vec values, const arma::vec& ps) {
  values = arma::sort(values);
  arma::vec out(ps.n_elem);
  for (arma::uword i = 0; i < ps.n_elem; ++i) out(i) = quantile(values, ps(i));
  return out;
}

BandSummary simultaneous_band(const arma::mat& curve_draws, double level) {
  const arma::uword n = curve_draws.n_rows;
  const arma::uword M = curve_draws.n_cols;
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidArgument("band level must be in (0, 1)");
  }
  if (n < 100) {
    throw InvalidArgument("simultaneous_band: need at least 100 draws, got " +
                          std::to_string(n));
  }
  BandSummary band;
  band.mean = arma::mean(curve_draws, 0).t();
  const arma::vec sd = arma::stddev(curve_draws, 0, 0).t();

  band.pw_lo.set_size(M);
  band.pw_hi.set_size(M);
  const double alpha = 1.0 - level;
  for (arma::uword m = 0; m < M; ++m) {
    arma::vec col = arma::sort(curve_draws.col(m));
    band.pw_lo(m) = std::min(quantile(col, 0.5 * alpha), band.mean(m));
    band.pw_hi(m) = std::max(quantile(col, 1.0 - 0.5 * alpha), band.mean(m));
  }

  // points with zero spread are excluded from the max statistic; the band
  // collapses to the curve there
  arma::vec stats(n, arma::fill::zeros);
  for (arma::uword i = 0; i < n; ++i) {
    double s = 0.0;
    for (arma::uword m = 0; m < M; ++m) {
      if (sd(m) > 0.0) {
        s = std::max(s, std::abs(curve_draws(i, m) - band.mean(m)) / sd(m));
      }
    }
    stats(i) = s;
  }
  const double m_alpha = quantile(arma::sort(stats), level);
  band.sim_lo = band.mean - m_alpha * sd;
  band.sim_hi = band.mean + m_alpha * sd;
  // nesting invariant: the simultaneous band contains the pointwise band
  band.sim_lo = arma::min(band.sim_lo, band.pw_lo);
  band.sim_hi = arma::max(band.sim_hi, band.pw_hi);
  return band;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

constexpr const char* kBandStats[5] = {"mean", "pw_lower", "pw_upper",
                                       "sim_lower", "sim_upper"};

void write_band_rows(std::ostream& out, const std::string& quantity,
                     arma::uword j, arma::uword t, const arma::vec& coord,
                     const BandSummary& band) {
  const arma::vec* cols[5] = {&band.mean, &band.pw_lo, &band.pw_hi,
                              &band.sim_lo, &band.sim_hi};
  for (arma::uword m = 0; m < band.mean.n_elem; ++m) {
    for (int s = 0; s < 5; ++s) {
      out << quantity << ',' << j << ',' << t << ',' << m + 1 << ','
          << fmt(coord(m)) << ',' << kBandStats[s] << ','
          << fmt((*cols[s])(m)) << '\n';
    }
  }
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write summary file: " + path.string());
  out << "quantity,j,t,m,tau,statistic,value\n";
  return out;
}

// per-draw loading matrices on an arbitrary evaluation basis
std::vector<arma::mat> loading_draws(const PosteriorDraws& draws,
                                     const arma::mat& B_eval) {
  std::vector<arma::mat> F;
  F.reserve(draws.n_draws());
  for (arma::uword d = 0; d < draws.n_draws(); ++d) {
    F.push_back(B_eval * draws.psi[d]);
  }
  return F;
}

void write_surfaces(const std::filesystem::path& path,
                    const PosteriorDraws& draws, const std::vector<arma::mat>& F,
                    const arma::vec& coord, double level) {
  auto out = open_csv(path);
  const arma::uword n = draws.n_draws();
  const arma::uword T = draws.n_times();
  const arma::uword M = coord.n_elem;
  const arma::uword K = draws.config.K;
  for (arma::uword j = 0; j < draws.n_pred(); ++j) {
    // factor paths for predictor j, one T x K matrix per draw
    std::vector<arma::mat> A;
    A.reserve(n);
    for (arma::uword d = 0; d < n; ++d) {
      arma::mat Ad(T, K);
      for (arma::uword k = 0; k < K; ++k) Ad.col(k) = draws.alpha[d].slice(k).col(j);
      A.push_back(std::move(Ad));
    }
    arma::mat curve(n, M);
    for (arma::uword t = 0; t < T; ++t) {
      for (arma::uword d = 0; d < n; ++d) {
        curve.row(d) = A[d].row(t) * F[d].t();
      }
      write_band_rows(out, "alpha_surface", j + 1, t + 1, coord,
                      simultaneous_band(curve, level));
    }
  }
}

void write_fitted(const std::filesystem::path& path, const PosteriorDraws& draws,
                  const std::vector<arma::mat>& F, const arma::vec& coord,
                  double level, const std::string& quantity) {
  auto out = open_csv(path);
  const arma::uword n = draws.n_draws();
  arma::mat curve(n, coord.n_elem);
  for (arma::uword t = 0; t < draws.n_times(); ++t) {
    for (arma::uword d = 0; d < n; ++d) {
      curve.row(d) = (F[d] * draws.beta[d].col(t)).t();
    }
    write_band_rows(out, quantity, 0, t + 1, coord,
                    simultaneous_band(curve, level));
  }
}

void write_loadings(const std::filesystem::path& path,
                    const PosteriorDraws& draws, const std::vector<arma::mat>& F,
                    const arma::vec& coord, double level,
                    const std::string& quantity) {
  auto out = open_csv(path);
  const arma::uword n = draws.n_draws();
  for (arma::uword k = 0; k < draws.config.K; ++k) {
    // align signs to the running mean so flips do not cancel in the average
    arma::mat curve(n, coord.n_elem);
    arma::vec ref = F[0].col(k);
    for (arma::uword d = 0; d < n; ++d) {
      arma::vec f = F[d].col(k);
      if (arma::dot(f, ref) < 0.0) f = -f;
      curve.row(d) = f.t();
      ref += f;
    }
    write_band_rows(out, quantity, k + 1, 0, coord,
                    simultaneous_band(curve, level));
  }
}

void write_sigma(const std::filesystem::path& path, const PosteriorDraws& draws,
                 double level) {
  auto out = open_csv(path);
  const arma::uword n = draws.n_draws();
  const arma::uword T = draws.n_times();
  arma::mat curve(n, T);
  for (arma::uword d = 0; d < n; ++d) {
    curve.row(d) = arma::sqrt(draws.sigma_eps[d]).t();
  }
  const BandSummary band = simultaneous_band(curve, level);
  const arma::vec* cols[5] = {&band.mean, &band.pw_lo, &band.pw_hi,
                              &band.sim_lo, &band.sim_hi};
  for (arma::uword t = 0; t < T; ++t) {
    for (int s = 0; s < 5; ++s) {
      out << "sigma_eps,0," << t + 1 << ",0,," << kBandStats[s] << ','
          << fmt((*cols[s])(t)) << '\n';
    }
  }
}

void write_imputed(const std::filesystem::path& path,
                   const PosteriorDraws& draws, double level) {
  auto out = open_csv(path);
  const arma::uword n = draws.n_draws();
  if (draws.imputed.empty() || draws.imputed[0].n_elem == 0) return;
  const arma::uword n_miss = draws.imputed[0].n_elem;
  const double alpha = 1.0 - level;
  // cells are stored row-major by (t, m)
  std::vector<std::pair<arma::uword, arma::uword>> cells;
  cells.reserve(n_miss);
  for (arma::uword t = 0; t < draws.n_times(); ++t) {
    for (arma::uword m = 0; m < draws.n_points(); ++m) {
      if (draws.missing(t, m)) cells.emplace_back(t, m);
    }
  }
  arma::vec vals(n);
  for (arma::uword i = 0; i < n_miss; ++i) {
    for (arma::uword d = 0; d < n; ++d) vals(d) = draws.imputed[d](i);
    const arma::vec q =
        quantiles(vals, arma::vec{0.5 * alpha, 1.0 - 0.5 * alpha});
    const auto [t, m] = cells[i];
    const std::string prefix = "imputed,0," + std::to_string(t + 1) + ',' +
                               std::to_string(m + 1) + ',' +
                               fmt(draws.tau(m)) + ',';
    out << prefix << "mean," << fmt(arma::mean(vals)) << '\n';
    out << prefix << "pw_lower," << fmt(q(0)) << '\n';
    out << prefix << "pw_upper," << fmt(q(1)) << '\n';
  }
}

}  // namespace

void write_summaries(const PosteriorDraws& draws, const std::string& out_dir,
                     const SummaryOptions& options) {
  if (draws.n_draws() < 100) {
    throw InvalidArgument("write_summaries: need at least 100 retained draws");
  }
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  const double level = options.band_level;
  const auto F = loading_draws(draws, draws.basis.B);
  if (draws.n_pred() > 0) {
    write_surfaces(dir / "alpha_surface.csv", draws, F, draws.tau, level);
  }
  write_fitted(dir / "fitted.csv", draws, F, draws.tau, level, "fitted");
  write_loadings(dir / "loadings.csv", draws, F, draws.tau, level, "loading");
  write_sigma(dir / "sigma_eps.csv", draws, level);
  write_imputed(dir / "imputed.csv", draws, level);

  if (options.grid_points > draws.n_points()) {
    const arma::vec dense = arma::linspace(draws.tau.min(), draws.tau.max(),
                                           options.grid_points);
    const arma::mat Bg = evaluate_basis(draws.basis, dense);
    const auto Fg = loading_draws(draws, Bg);
    write_fitted(dir / "fitted_grid.csv", draws, Fg, dense, level,
                 "fitted_grid");
    write_loadings(dir / "loadings_grid.csv", draws, Fg, dense, level,
                   "loading_grid");
  }

  nlohmann::json manifest;
  manifest["seed"] = draws.config.seed;
  manifest["config"] = {
      {"k", draws.config.K},          {"n_iter", draws.config.n_iter},
      {"burn_in", draws.config.burn_in}, {"thin", draws.config.thin},
      {"variant", variant_name(draws.config.variant)},
      {"sv_enabled", draws.config.sv_enabled},
      {"stationary_phi", draws.config.stationary_phi}};
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(draws.input_hash));
  manifest["input_hash"] = hash_hex;
  manifest["n_draws"] = draws.n_draws();
  manifest["band_level"] = level;
  manifest["grid_points"] = options.grid_points;
  manifest["max_orth_error"] = draws.max_orth_error;
  manifest["max_beta_identity_error"] = draws.max_beta_identity_error;

  std::ofstream mf(dir / "manifest.json", std::ios::binary);
  if (!mf) throw IoError("cannot write manifest");
  mf << manifest.dump(2) << '\n';
}

}  // namespace dfosr
