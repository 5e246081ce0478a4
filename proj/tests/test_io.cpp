#include <doctest.h>

#include <armadillo>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dataset.hpp"
#include "errors.hpp"
#include "gibbs.hpp"
#include "rng.hpp"
#include "summary.hpp"

using namespace dfosr;

namespace {

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("toy dataset round-trips bit-exactly") {
  RandomStream rng(1);
  FunctionalDataset data;
  data.tau = {0.5, 1.25, 2.0, 3.5};
  data.Y.set_size(3, 4);
  for (auto& y : data.Y) y = rng.normal() * 1e-7;  // exercise formatting
  data.missing.zeros(3, 4);
  data.missing(1, 2) = 1;
  data.Y(1, 2) = arma::datum::nan;
  data.X.set_size(3, 2);
  for (auto& x : data.X) x = rng.normal();
  data.time_labels = {"1994", "1999", "2004"};
  data.predictor_names = {"contraception", "marriage_age"};
  data.validate();

  save_dataset(data, "/tmp/dfosr_resp.csv", "/tmp/dfosr_pred.csv");
  const FunctionalDataset back =
      load_dataset("/tmp/dfosr_resp.csv", "/tmp/dfosr_pred.csv");
  CHECK(arma::abs(back.tau - data.tau).max() == 0.0);
  CHECK(back.time_labels == data.time_labels);
  CHECK(back.predictor_names == data.predictor_names);
  CHECK(arma::all(arma::vectorise(back.missing == data.missing)));
  for (arma::uword t = 0; t < 3; ++t) {
    for (arma::uword m = 0; m < 4; ++m) {
      if (!data.missing(t, m)) CHECK(back.Y(t, m) == data.Y(t, m));
    }
  }
  CHECK(arma::abs(back.X - data.X).max() == 0.0);

  // canonical serialization is what content hashing keys on
  CHECK(content_hash(serialize_dataset(back)) ==
        content_hash(serialize_dataset(data)));
}

TEST_CASE("fertility-shaped sparsity: 24 missing cells per row") {
  std::string head = "year";
  for (int age = 17; age <= 47; ++age) head += "," + std::to_string(age);
  std::string row1 = "2000", row2 = "2005";
  for (int age = 17; age <= 47; ++age) {
    const bool observed = (age - 17) % 5 == 0;  // 7 of 31
    row1 += observed ? ",1.5" : ",";
    row2 += observed ? ",2.5" : ",";
  }
  write_file("/tmp/dfosr_fert.csv", head + "\n" + row1 + "\n" + row2 + "\n");
  const FunctionalDataset data = load_dataset("/tmp/dfosr_fert.csv", "");
  CHECK(data.n_points() == 31);
  CHECK(arma::accu(data.missing.row(0)) == 24);
  CHECK(arma::accu(data.missing.row(1)) == 24);
}

TEST_CASE("predictor standardization flag") {
  write_file("/tmp/dfosr_r.csv", "t,1,2,3,4\na,1,2,3,4\nb,2,3,4,5\nc,0,1,2,3\n");
  write_file("/tmp/dfosr_p.csv", "u,v\n10,0.1\n20,0.4\n40,0.2\n");
  const FunctionalDataset data =
      load_dataset("/tmp/dfosr_r.csv", "/tmp/dfosr_p.csv", true);
  for (arma::uword j = 0; j < 2; ++j) {
    CHECK(std::abs(arma::mean(data.X.col(j))) < 1e-12);
    CHECK(std::abs(arma::stddev(data.X.col(j)) - 1.0) < 1e-12);
  }
}

TEST_CASE("parse errors carry row and column locations") {
  write_file("/tmp/dfosr_bad1.csv", "t,1,2,3,4\na,1,2,3\n");
  CHECK_THROWS_WITH_AS(load_dataset("/tmp/dfosr_bad1.csv", ""),
                       doctest::Contains("row 2"), ParseError);

  write_file("/tmp/dfosr_bad2.csv", "t,1,2,3,4\na,1,2,oops,4\n");
  CHECK_THROWS_WITH_AS(load_dataset("/tmp/dfosr_bad2.csv", ""),
                       doctest::Contains("column 4"), ParseError);

  write_file("/tmp/dfosr_bad3.csv", "t,1,2,3,4\na,1,2,3,4\nb,1,2,3,4\n");
  write_file("/tmp/dfosr_bad3p.csv", "u\n1\n2\n3\n");
  CHECK_THROWS_AS(load_dataset("/tmp/dfosr_bad3.csv", "/tmp/dfosr_bad3p.csv"),
                  ParseError);

  CHECK_THROWS_AS(load_dataset("/tmp/does_not_exist.csv", ""), IoError);
}

TEST_CASE("band collapses when all draws are identical") {
  arma::mat draws(150, 8);
  for (arma::uword i = 0; i < draws.n_rows; ++i) {
    draws.row(i) = arma::linspace(0.0, 1.0, 8).t();
  }
  const BandSummary band = simultaneous_band(draws, 0.95);
  CHECK(arma::abs(band.pw_hi - band.pw_lo).max() < 1e-12);
  CHECK(arma::abs(band.pw_lo - band.mean).max() < 1e-12);
  CHECK(arma::abs(band.sim_lo - band.mean).max() < 1e-12);
  CHECK(arma::abs(band.sim_hi - band.mean).max() < 1e-12);
}

TEST_CASE("simultaneous band contains the pointwise band") {
  RandomStream rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    arma::mat draws(300, 12);
    for (auto& d : draws) d = rng.normal() * (1.0 + rep) + rep;
    const BandSummary band = simultaneous_band(draws, 0.9);
    for (arma::uword m = 0; m < 12; ++m) {
      CHECK(band.sim_lo(m) <= band.pw_lo(m));
      CHECK(band.sim_hi(m) >= band.pw_hi(m));
      CHECK(band.mean(m) >= band.pw_lo(m));
      CHECK(band.mean(m) <= band.pw_hi(m));
      CHECK(band.mean(m) >= band.sim_lo(m));
      CHECK(band.mean(m) <= band.sim_hi(m));
    }
  }
  CHECK_THROWS_AS(simultaneous_band(arma::mat(50, 4), 0.95), InvalidArgument);
}

TEST_CASE("simultaneous band achieves nominal joint coverage") {
  // iid N(0, I_M) draws; the true curve is a fresh draw from the same law,
  // so a calibrated 95% simultaneous band covers it in ~95% of trials
  RandomStream rng(6);
  const arma::uword M = 10, n = 2000, trials = 400;
  arma::uword covered = 0;
  for (arma::uword trial = 0; trial < trials; ++trial) {
    arma::vec truth(M);
    for (auto& v : truth) v = rng.normal();
    arma::mat draws(n, M);
    for (auto& d : draws) d = rng.normal();
    const BandSummary band = simultaneous_band(draws, 0.95);
    bool inside = true;
    for (arma::uword m = 0; m < M && inside; ++m) {
      inside = band.sim_lo(m) <= truth(m) && truth(m) <= band.sim_hi(m);
    }
    if (inside) ++covered;
  }
  const double rate = double(covered) / double(trials);
  CHECK(rate > 0.92);
  CHECK(rate < 0.98);
}

TEST_CASE("summaries are deterministic and correctly sized") {
  // small fit with missing cells so every summary block is exercised
  RandomStream rng(8);
  FunctionalDataset data;
  const arma::uword T = 9, M = 12, p = 2;
  data.tau = arma::linspace(0.0, 1.0, M);
  data.X.set_size(T, p);
  for (auto& x : data.X) x = rng.normal();
  data.Y.set_size(T, M);
  data.missing.zeros(T, M);
  for (arma::uword t = 0; t < T; ++t) {
    for (arma::uword m = 0; m < M; ++m) {
      data.Y(t, m) = std::sin(3.0 * data.tau(m)) + 0.3 * rng.normal();
    }
  }
  data.missing(4, 3) = 1;
  data.Y(4, 3) = arma::datum::nan;
  data.time_labels.resize(T, "t");
  data.predictor_names = {"a", "b"};
  data.validate();

  McmcConfig config;
  config.K = 2;
  config.n_iter = 160;
  config.burn_in = 40;
  config.seed = 3;
  const PosteriorDraws draws = run_gibbs(config, data);

  SummaryOptions options;
  options.band_level = 0.95;
  options.grid_points = 25;
  write_summaries(draws, "/tmp/dfosr_sum_a", options);
  write_summaries(draws, "/tmp/dfosr_sum_b", options);

  for (const char* name :
       {"alpha_surface.csv", "fitted.csv", "loadings.csv", "sigma_eps.csv",
        "imputed.csv", "fitted_grid.csv", "loadings_grid.csv",
        "manifest.json"}) {
    const std::string a = slurp(std::string("/tmp/dfosr_sum_a/") + name);
    const std::string b = slurp(std::string("/tmp/dfosr_sum_b/") + name);
    CHECK(a == b);
  }

  // surface block: p * T * M * 5 statistics rows (plus header)
  const std::string surf = slurp("/tmp/dfosr_sum_a/alpha_surface.csv");
  const auto lines = std::count(surf.begin(), surf.end(), '\n');
  CHECK(lines == 1 + p * T * M * 5);

  const std::string manifest = slurp("/tmp/dfosr_sum_a/manifest.json");
  CHECK(manifest.find("\"seed\": 3") != std::string::npos);
  CHECK(manifest.find("\"band_level\": 0.95") != std::string::npos);

  // imputed block: one missing cell, three statistics
  const std::string imp = slurp("/tmp/dfosr_sum_a/imputed.csv");
  CHECK(std::count(imp.begin(), imp.end(), '\n') == 1 + 3);

  CHECK_THROWS_AS(
      write_summaries(draws, "/proc/no_such_dir/x", options), IoError);
}
