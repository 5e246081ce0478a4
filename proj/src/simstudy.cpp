#include "simstudy.hpp"

#include <chrono>
#include <filesystem>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <thread>

#include "errors.hpp"
#include "summary.hpp"

namespace dfosr {

namespace {

constexpr arma::uword kTrueFactors = 4;
constexpr arma::uword kZeroPred = 10;
constexpr arma::uword kActivePred = 5;
constexpr double kRsnr = 5.0;
constexpr double kArTruth = 0.8;
constexpr double kJumpProb = 0.01;

int poisson_one(RandomStream& rng) {
  // Knuth, lambda = 1
  int k = 0;
  double prod = rng.uniform_open();
  const double target = std::exp(-1.0);
  while (prod > target) {
    ++k;
    prod *= rng.uniform_open();
  }
  return k;
}

// degree-k monomials orthonormalized on the grid (two Gram-Schmidt passes)
arma::mat orthonormal_polynomials(const arma::vec& tau) {
  const arma::uword M = tau.n_elem;
  arma::mat F(M, kTrueFactors);
  F.col(0).fill(1.0 / std::sqrt(static_cast<double>(M)));
  for (arma::uword k = 1; k < kTrueFactors; ++k) {
    arma::vec v = arma::pow(tau, static_cast<double>(k + 1));
    for (int pass = 0; pass < 2; ++pass) {
      for (arma::uword l = 0; l < k; ++l) {
        v -= arma::dot(F.col(l), v) * F.col(l);
      }
    }
    F.col(k) = v / arma::norm(v);
  }
  return F;
}

}  // namespace

FunctionalDataset SimTruth::to_dataset() const {
  FunctionalDataset data;
  data.Y = Y;
  data.missing.zeros(Y.n_rows, Y.n_cols);
  data.tau = tau;
  data.X = X;
  data.time_labels.resize(Y.n_rows);
  for (arma::uword t = 0; t < Y.n_rows; ++t) {
    data.time_labels[t] = std::to_string(t + 1);
  }
  data.predictor_names.resize(X.n_cols);
  for (arma::uword j = 0; j < X.n_cols; ++j) {
    data.predictor_names[j] = "x" + std::to_string(j + 1);
  }
  data.validate();
  return data;
}

SimTruth simulate_design(SimKind kind, arma::uword T, arma::uword M,
                         std::uint64_t seed) {
  if (T < 2 || M < 8) {
    throw InvalidArgument("simulate_design: need T >= 2 and M >= 8");
  }
  RandomStream rng(seed);
  const arma::uword p = kZeroPred + kActivePred;

  SimTruth truth;
  truth.tau = arma::linspace(0.0, 1.0, M);
  truth.f_star = orthonormal_polynomials(truth.tau);

  truth.mu_star.set_size(kTrueFactors);
  for (arma::uword k = 0; k < kTrueFactors; ++k) {
    truth.mu_star(k) = 1.0 / static_cast<double>(k + 1);
  }

  truth.X.set_size(T, p);
  for (auto& x : truth.X) x = rng.normal();

  truth.alpha_star.zeros(T, p, kTrueFactors);
  for (arma::uword j = 0; j < kActivePred; ++j) {
    int n_active;
    do {
      n_active = poisson_one(rng);
    } while (n_active < 1 || n_active > static_cast<int>(kTrueFactors));
    // choose that many distinct factors uniformly
    arma::uvec ks = {0, 1, 2, 3};
    for (arma::uword i = 0; i < kTrueFactors - 1; ++i) {
      const auto swap_with =
          i + static_cast<arma::uword>(rng.uniform() * (kTrueFactors - i));
      std::swap(ks(i), ks(std::min(swap_with, kTrueFactors - 1)));
    }
    for (int a = 0; a < n_active; ++a) {
      const arma::uword k = ks(a);
      const double sdk = 1.0 / static_cast<double>(k + 1);
      if (kind == SimKind::Static) {
        const double v = rng.normal() * sdk;
        for (arma::uword t = 0; t < T; ++t) truth.alpha_star(t, j, k) = v;
      } else {
        double level = rng.normal() * sdk;  // Z_{k,0}
        for (arma::uword t = 0; t < T; ++t) {
          if (rng.uniform() < kJumpProb) level += rng.normal() * sdk;
          truth.alpha_star(t, j, k) = level;
        }
      }
    }
  }

  truth.gamma_star.set_size(kTrueFactors, T);
  for (arma::uword k = 0; k < kTrueFactors; ++k) {
    const double sdk = 1.0 / static_cast<double>(k + 1);
    const double innov_sd = std::sqrt(1.0 - kArTruth * kArTruth) * sdk;
    double g = rng.normal() * sdk;  // stationary start
    for (arma::uword t = 0; t < T; ++t) {
      g = kArTruth * g + rng.normal() * innov_sd;
      truth.gamma_star(k, t) = g;
    }
  }

  truth.beta_star.set_size(kTrueFactors, T);
  for (arma::uword k = 0; k < kTrueFactors; ++k) {
    for (arma::uword t = 0; t < T; ++t) {
      double reg = 0.0;
      for (arma::uword j = 0; j < p; ++j) {
        reg += truth.X(t, j) * truth.alpha_star(t, j, k);
      }
      truth.beta_star(k, t) = truth.mu_star(k) + reg + truth.gamma_star(k, t);
    }
  }

  truth.Ystar = (truth.f_star * truth.beta_star).t();
  const double ybar = arma::accu(truth.Ystar) / static_cast<double>(T * M);
  const double signal_sd =
      std::sqrt(arma::accu(arma::square(truth.Ystar - ybar)) /
                (static_cast<double>(T * M) - 1.0));
  truth.sigma_star = signal_sd / kRsnr;
  truth.Y = truth.Ystar;
  for (auto& y : truth.Y) y += truth.sigma_star * rng.normal();

  truth.surface.set_size(T, M, p);
  for (arma::uword j = 0; j < p; ++j) {
    arma::mat A(T, kTrueFactors);
    for (arma::uword k = 0; k < kTrueFactors; ++k) {
      A.col(k) = truth.alpha_star.slice(k).col(j);
    }
    truth.surface.slice(j) = A * truth.f_star.t();
  }
  return truth;
}

double rmse(const arma::cube& estimate, const SimTruth& truth) {
  if (arma::size(estimate) != arma::size(truth.surface)) {
    throw InvalidArgument("rmse: dimension mismatch");
  }
  const double n = static_cast<double>(estimate.n_elem);
  return std::sqrt(arma::accu(arma::square(estimate - truth.surface)) / n);
}

arma::cube posterior_mean_surfaces(const PosteriorDraws& draws) {
  const arma::uword T = draws.n_times();
  const arma::uword M = draws.n_points();
  const arma::uword p = draws.n_pred();
  arma::cube mean(T, M, p, arma::fill::zeros);
  for (arma::uword d = 0; d < draws.n_draws(); ++d) {
    for (arma::uword j = 0; j < p; ++j) {
      mean.slice(j) += draws.surface_draw(d, j);
    }
  }
  mean /= static_cast<double>(draws.n_draws());
  return mean;
}

double rmse(const PosteriorDraws& draws, const SimTruth& truth) {
  return rmse(posterior_mean_surfaces(draws), truth);
}

IntervalMetrics interval_metrics_from_cells(const arma::mat& cell_draws,
                                            const arma::vec& truth_cells,
                                            double level) {
  const arma::uword n = cell_draws.n_rows;
  const arma::uword n_cells = cell_draws.n_cols;
  if (n < 100) {
    throw InvalidArgument("interval metrics: need at least 100 draws");
  }
  if (truth_cells.n_elem != n_cells) {
    throw InvalidArgument("interval metrics: truth dimension mismatch");
  }
  const double alpha = 1.0 - level;
  double width_sum = 0.0;
  arma::uword covered = 0;
  for (arma::uword c = 0; c < n_cells; ++c) {
    arma::vec v = arma::sort(cell_draws.col(c));
    const double lo = quantile(v, 0.5 * alpha);
    const double hi = quantile(v, 1.0 - 0.5 * alpha);
    width_sum += hi - lo;
    if (truth_cells(c) >= lo && truth_cells(c) <= hi) ++covered;
  }
  IntervalMetrics out;
  out.mciw = width_sum / static_cast<double>(n_cells);
  out.coverage = static_cast<double>(covered) / static_cast<double>(n_cells);
  return out;
}

IntervalMetrics mciw_and_coverage(const PosteriorDraws& draws,
                                  const SimTruth& truth, double level) {
  const arma::uword n = draws.n_draws();
  if (n < 100) {
    throw InvalidArgument("mciw_and_coverage: need at least 100 draws");
  }
  const arma::uword T = draws.n_times();
  const arma::uword M = draws.n_points();
  const arma::uword p = draws.n_pred();

  double width_sum = 0.0;
  double cover_sum = 0.0;
  arma::mat cell(n, T * M);
  for (arma::uword j = 0; j < p; ++j) {
    for (arma::uword d = 0; d < n; ++d) {
      cell.row(d) = arma::vectorise(draws.surface_draw(d, j)).t();
    }
    const IntervalMetrics m = interval_metrics_from_cells(
        cell, arma::vectorise(truth.surface.slice(j)), level);
    width_sum += m.mciw;
    cover_sum += m.coverage;
  }
  IntervalMetrics out;
  out.mciw = width_sum / static_cast<double>(p);
  out.coverage = cover_sum / static_cast<double>(p);
  return out;
}

namespace {

arma::uword worker_cap() {
  if (const char* env = std::getenv("DFOSR_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<arma::uword>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::vector<StudyRow> run_replicate(SimKind kind, arma::uword T, arma::uword M,
                                    const std::vector<StudyMethod>& methods,
                                    arma::uword rep, std::uint64_t seed) {
  const RandomStream master(seed);
  const SimTruth truth =
      simulate_design(kind, T, M, master.derive(2 * rep).seed());
  const FunctionalDataset data = truth.to_dataset();
  const std::uint64_t ych = content_hash(serialize_dataset(data));

  std::vector<StudyRow> rows;
  for (arma::uword m = 0; m < methods.size(); ++m) {
    StudyRow row;
    row.replicate = rep + 1;
    row.method = methods[m].name;
    row.y_checksum = ych;
    McmcConfig config = methods[m].config;
    config.seed = master.derive(2 * rep + 1).derive(m).seed();
    const auto start = std::chrono::steady_clock::now();
    try {
      const PosteriorDraws draws = run_gibbs(config, data);
      row.rmse = rmse(draws, truth);
      const IntervalMetrics im = mciw_and_coverage(draws, truth, 0.90);
      row.mciw = im.mciw;
      row.coverage = im.coverage;
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    row.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<StudyRow> run_study(SimKind kind, arma::uword T, arma::uword M,
                                const std::vector<StudyMethod>& methods,
                                arma::uword n_reps, std::uint64_t seed) {
  if (methods.empty()) throw InvalidArgument("run_study: no methods given");
  const arma::uword cap = std::max<arma::uword>(1, worker_cap());

  std::vector<std::vector<StudyRow>> results(n_reps);
  arma::uword next = 0;
  while (next < n_reps) {
    const arma::uword batch = std::min<arma::uword>(cap, n_reps - next);
    std::vector<std::future<std::vector<StudyRow>>> futures;
    for (arma::uword b = 0; b < batch; ++b) {
      const arma::uword rep = next + b;
      futures.push_back(std::async(std::launch::async, [&, rep] {
        return run_replicate(kind, T, M, methods, rep, seed);
      }));
    }
    for (arma::uword b = 0; b < batch; ++b) {
      results[next + b] = futures[b].get();
    }
    next += batch;
  }

  std::vector<StudyRow> rows;
  for (auto& r : results) {
    for (auto& row : r) rows.push_back(std::move(row));
  }
  return rows;
}

void write_study_csv(const std::vector<StudyRow>& rows,
                     const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write study report: " + path);
  out << "replicate,method,status,rmse,mciw,coverage,seconds,y_checksum\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.replicate << ',' << r.method << ',' << r.status << ',';
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.3f,", r.rmse, r.mciw,
                  r.coverage, r.seconds);
    out << buf;
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(r.y_checksum));
    out << buf << '\n';
  }
}

}  // namespace dfosr
