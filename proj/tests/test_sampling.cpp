#include <doctest.h>

#include <armadillo>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "errors.hpp"
#include "rng.hpp"
#include "sampling.hpp"

using namespace dfosr;

namespace {

// chi-squared goodness of fit of standardized values against N(0,1),
// 20 equiprobable bins, 0.001 level
bool gof_standard_normal(const arma::vec& z) {
  const int bins = 20;
  boost::math::normal_distribution<> nd;
  arma::vec edges(bins - 1);
  for (int b = 1; b < bins; ++b) {
    edges(b - 1) = boost::math::quantile(nd, b / double(bins));
  }
  arma::vec counts(bins, arma::fill::zeros);
  for (const double v : z) {
    int b = 0;
    while (b < bins - 1 && v > edges(b)) ++b;
    counts(b) += 1.0;
  }
  const double expected = z.n_elem / double(bins);
  const double stat = arma::accu(arma::square(counts - expected) / expected);
  boost::math::chi_squared_distribution<> chi2(bins - 1);
  return stat < boost::math::quantile(chi2, 0.999);
}

// one-sample Kolmogorov-Smirnov statistic against a CDF
template <typename Cdf>
double ks_statistic(arma::vec x, Cdf cdf) {
  x = arma::sort(x);
  const double n = x.n_elem;
  double d = 0.0;
  for (arma::uword i = 0; i < x.n_elem; ++i) {
    const double F = cdf(x(i));
    d = std::max(d, std::abs(F - (i + 1) / n));
    d = std::max(d, std::abs(F - i / n));
  }
  return d;
}

}  // namespace

TEST_CASE("precision sampler: standard normal case") {
  RandomStream rng(11);
  GaussianSystem sys{arma::eye(2, 2), arma::zeros(2)};
  const int n = 50000;
  arma::vec mean(2, arma::fill::zeros);
  for (int i = 0; i < n; ++i) mean += sample_gaussian_precision(sys, rng);
  mean /= n;
  const double tol = 3.0 / std::sqrt(double(n));
  CHECK(std::abs(mean(0)) < tol);
  CHECK(std::abs(mean(1)) < tol);
}

TEST_CASE("precision sampler: diagonal case solved analytically") {
  RandomStream rng(12);
  GaussianSystem sys{arma::diagmat(arma::vec{4.0, 1.0}), arma::vec{8.0, 0.0}};
  const int n = 100000;
  arma::mat draws(n, 2);
  for (int i = 0; i < n; ++i) draws.row(i) = sample_gaussian_precision(sys, rng).t();
  CHECK(std::abs(arma::mean(draws.col(0)) - 2.0) < 4.0 * 0.5 / std::sqrt(n));
  CHECK(std::abs(arma::mean(draws.col(1)) - 0.0) < 4.0 / std::sqrt(n));
  CHECK(std::abs(arma::var(draws.col(0)) - 0.25) < 0.01);
  CHECK(std::abs(arma::var(draws.col(1)) - 1.0) < 0.03);
}

TEST_CASE("precision sampler matches the dense-inverse oracle") {
  RandomStream rng(13);
  arma::arma_rng::set_seed(99);
  arma::mat A(3, 3, arma::fill::randn);
  arma::mat Q = A * A.t() + 3.0 * arma::eye(3, 3);
  arma::vec ell(3, arma::fill::randn);
  GaussianSystem sys{Q, ell};

  const arma::mat cov_oracle = arma::inv_sympd(Q);
  const arma::vec mean_oracle = cov_oracle * ell;

  const int n = 100000;
  arma::mat draws(n, 3);
  for (int i = 0; i < n; ++i) draws.row(i) = sample_gaussian_precision(sys, rng).t();
  const arma::vec mean_hat = arma::mean(draws, 0).t();
  const arma::mat cov_hat = arma::cov(draws);
  for (int i = 0; i < 3; ++i) {
    const double se = std::sqrt(cov_oracle(i, i) / n);
    CHECK(std::abs(mean_hat(i) - mean_oracle(i)) < 4.0 * se);
    for (int j = 0; j < 3; ++j) {
      const double se_cov = std::sqrt((cov_oracle(i, i) * cov_oracle(j, j) +
                                       cov_oracle(i, j) * cov_oracle(i, j)) /
                                      n);
      CHECK(std::abs(cov_hat(i, j) - cov_oracle(i, j)) < 4.0 * se_cov);
    }
  }
}

TEST_CASE("precision sampler marginals pass chi-squared GOF") {
  const std::vector<GaussianSystem> systems = {
      {arma::eye(2, 2), arma::zeros(2)},
      {arma::diagmat(arma::vec{4.0, 1.0}), arma::vec{8.0, 0.0}},
      {arma::mat{{2.0, 0.7}, {0.7, 1.5}}, arma::vec{1.0, -1.0}}};
  int sysid = 0;
  for (const auto& sys : systems) {
    RandomStream rng(100 + sysid++);
    const arma::mat cov = arma::inv_sympd(sys.Q);
    const arma::vec mean = cov * sys.ell;
    const int n = 100000;
    arma::mat draws(n, sys.Q.n_rows);
    for (int i = 0; i < n; ++i) {
      draws.row(i) = sample_gaussian_precision(sys, rng).t();
    }
    for (arma::uword j = 0; j < sys.Q.n_rows; ++j) {
      const arma::vec z = (draws.col(j) - mean(j)) / std::sqrt(cov(j, j));
      CHECK(gof_standard_normal(z));
    }
  }
}

TEST_CASE("precision sampler rejects bad input") {
  RandomStream rng(1);
  CHECK_THROWS_AS(
      sample_gaussian_precision({arma::mat{{1.0, 0.5}, {0.2, 1.0}}, arma::zeros(2)}, rng),
      InvalidArgument);
  CHECK_THROWS_AS(
      sample_gaussian_precision({arma::mat{{1.0, 2.0}, {2.0, 1.0}}, arma::zeros(2)}, rng),
      NumericalError);
}

TEST_CASE("constrained sampler: empty constraint equals unconstrained") {
  GaussianSystem sys{arma::mat{{2.0, 0.7}, {0.7, 1.5}}, arma::vec{1.0, -1.0}};
  RandomStream a(21), b(21);
  for (int i = 0; i < 50; ++i) {
    const arma::vec x = sample_constrained_gaussian(sys, arma::mat(0, 2), a);
    const arma::vec y = sample_gaussian_precision(sys, b);
    CHECK(arma::approx_equal(x, y, "absdiff", 0.0));
  }
}

TEST_CASE("constrained sampler: constraint holds exactly") {
  RandomStream rng(22);
  GaussianSystem sys{arma::eye(2, 2), arma::zeros(2)};
  const arma::mat C{{1.0, 1.0}};
  for (int i = 0; i < 1000; ++i) {
    const arma::vec x = sample_constrained_gaussian(sys, C, rng);
    CHECK(std::abs(x(0) + x(1)) < 1e-12);
  }
}

TEST_CASE("constrained sampler matches the analytic conditional") {
  RandomStream rng(23);
  GaussianSystem sys{arma::eye(3, 3), arma::vec{1.0, 2.0, 3.0}};
  const arma::mat C{{1.0, 0.0, 0.0}};
  // with identity precision, conditioning on x1 = 0 leaves x2 ~ N(2,1),
  // x3 ~ N(3,1) untouched
  const int n = 100000;
  arma::mat draws(n, 3);
  for (int i = 0; i < n; ++i) {
    draws.row(i) = sample_constrained_gaussian(sys, C, rng).t();
  }
  CHECK(arma::abs(draws.col(0)).max() < 1e-10);
  CHECK(std::abs(arma::mean(draws.col(1)) - 2.0) < 4.0 / std::sqrt(n));
  CHECK(std::abs(arma::mean(draws.col(2)) - 3.0) < 4.0 / std::sqrt(n));
  CHECK(std::abs(arma::var(draws.col(1)) - 1.0) < 0.02);
  CHECK(std::abs(arma::var(draws.col(2)) - 1.0) < 0.02);
  CHECK(std::abs(arma::as_scalar(arma::cov(draws.col(1), draws.col(2)))) < 0.02);
}

TEST_CASE("constrained sampler rejects redundant constraints") {
  RandomStream rng(24);
  GaussianSystem sys{arma::eye(3, 3), arma::zeros(3)};
  const arma::mat C{{1.0, 1.0, 0.0}, {1.0, 1.0, 0.0}};
  CHECK_THROWS_AS(sample_constrained_gaussian(sys, C, rng), NumericalError);
}

TEST_CASE("slice sampler respects bounds on a uniform target") {
  RandomStream rng(31);
  auto logf = [](double) { return 0.0; };
  for (double x0 : {0.1, 0.5, 0.9}) {
    for (int i = 0; i < 200; ++i) {
      const double x = slice_sample(logf, x0, 0.0, 1.0, 1.0, rng);
      CHECK(x > 0.0);
      CHECK(x < 1.0);
    }
  }
}

TEST_CASE("slice sampler reproduces truncated-normal moments") {
  RandomStream rng(32);
  auto logf = [](double x) { return -0.5 * x * x; };
  const int n = 100000;
  double x = 0.5, sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    x = slice_sample(logf, x, -10.0, 10.0, 1.0, rng);
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sum2 / n - 1.0) < 0.05);
}

TEST_CASE("slice sampler reproduces the Beta(5,2) mean") {
  RandomStream rng(33);
  auto logf = [](double x) {
    if (x <= 0.0 || x >= 1.0) return -arma::datum::inf;
    return 4.0 * std::log(x) + std::log(1.0 - x);
  };
  const int n = 100000;
  double x = 0.5, sum = 0.0;
  for (int i = 0; i < n; ++i) {
    x = slice_sample(logf, x, 0.0, 1.0, 1.0, rng);
    sum += x;
  }
  CHECK(std::abs(sum / n - 5.0 / 7.0) < 0.02);
}

TEST_CASE("slice sampler propagates NaN densities") {
  RandomStream rng(34);
  auto logf = [](double) { return std::nan(""); };
  CHECK_THROWS_AS(slice_sample(logf, 0.5, 0.0, 1.0, 1.0, rng), NumericalError);
}

TEST_CASE("truncated gamma: lower = 0 is an ordinary gamma") {
  RandomStream rng(41);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += sample_truncated_gamma(2.0, 1.0, 0.0, rng);
  CHECK(std::abs(sum / n - 2.0) < 0.02);
}

TEST_CASE("truncated exponential is memoryless") {
  RandomStream rng(42);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_truncated_gamma(1.0, 1.0, 5.0, rng);
    CHECK(x > 5.0);
    sum += x;
  }
  CHECK(std::abs(sum / n - 6.0) < 0.05);
}

TEST_CASE("near-vacuous truncation is indistinguishable from untruncated") {
  RandomStream rng(43);
  const int n = 10000;
  arma::vec x(n);
  for (int i = 0; i < n; ++i) x(i) = sample_truncated_gamma(11.0, 3.0, 1e-8, rng);
  const double d = ks_statistic(
      x, [](double v) { return boost::math::gamma_p(11.0, 3.0 * v); });
  CHECK(d < 0.01);
}

TEST_CASE("truncated gamma underflow error") {
  RandomStream rng(44);
  CHECK_THROWS_AS(sample_truncated_gamma(1.0, 1.0, 1e5, rng), NumericalError);
}
