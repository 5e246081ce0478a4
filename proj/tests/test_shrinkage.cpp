#include <doctest.h>

#include <armadillo>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "errors.hpp"
#include "rng.hpp"
#include "shrinkage.hpp"

using namespace dfosr;

namespace {

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

TEST_CASE("half-Cauchy full-conditional parameters match the hierarchy") {
  // zero increment: shape stays 1 and the rate is exactly xi
  auto g = hs_sigma_omega_prec(0.37, 0.0);
  CHECK(g.shape == 1.0);
  CHECK(g.rate == 0.37);
  g = hs_sigma_omega_prec(0.5, 2.0);
  CHECK(g.rate == 0.5 + 2.0);

  // T = 2 gives lambda_{j,k} shape T/2 = 1
  g = hs_lambda_jk_prec(2, 0.1, 0.2);
  CHECK(g.shape == 1.0);
  CHECK(g.rate == doctest::Approx(0.3));
  CHECK(hs_lambda_jk_prec(50, 0.0, 0.0).shape == 25.0);

  CHECK(hs_xi_sigma(0.25, 4.0).shape == 1.0);
  CHECK(hs_xi_sigma(0.25, 4.0).rate == 4.25);
  CHECK(hs_lambda_j_prec(6, 0.0, 0.0).shape == 3.5);   // (K+1)/2
  CHECK(hs_lambda0_prec(15, 0.0, 0.0).shape == 8.0);   // (p+1)/2
  CHECK(hs_xi_lambda0(50, 2.0).rate == 49.0 + 2.0);    // (T-1) + lambda0^{-2}
  CHECK(fosr_ar_lambda_jk_prec(0.2, 3.0).rate == doctest::Approx(0.2 + 4.5));
  CHECK(nig_sigma_omega_prec(50, 2.0).shape == doctest::Approx(0.001 + 24.5));
  CHECK(nig_sigma_omega_prec(50, 2.0).rate == doctest::Approx(1.001));
}

TEST_CASE("MGP full-conditional parameters") {
  // K = 1, mu = 0: delta ~ Gamma(a + 1/2, 1)
  auto g = mgp_delta_mu_first(2.0, 1, 0.0);
  CHECK(g.shape == 2.5);
  CHECK(g.rate == 1.0);
  CHECK(mgp_delta_mu_later(3.0, 6, 2, 0.0).shape == 3.0 + 2.5);
  CHECK(mgp_delta_eta_first(2.0, 6, 51, 0.0).shape == 2.0 + 150.0);
  CHECK(mgp_delta_eta_later(2.0, 6, 51, 3, 0.0).shape == 2.0 + 100.0);
  // eta = 0: xi ~ Gamma(nu/2 + 1/2, nu/2)
  g = mgp_xi_eta(16.0, 0.0, 0.7);
  CHECK(g.shape == 8.5);
  CHECK(g.rate == 8.0);
  // t3 expansion
  CHECK(init_xi_params(0.0).shape == 2.0);
  CHECK(init_xi_params(0.0).rate == 1.5);
  CHECK(init_xi_params(2.0).rate == 3.5);
}

TEST_CASE("prior-only chain reproduces the half-Cauchy marginal") {
  RandomStream rng(101);
  HorseshoeState hs = HorseshoeState::init(1, 1, 2);
  const int n = 100000;
  arma::vec ratio(n);
  arma::cube omega(1, 1, 1);
  for (int i = 0; i < n; ++i) {
    omega(0, 0, 0) = rng.normal() * hs.sigma_omega(0, 0, 1);
    update_horseshoe(omega, hs, rng);
    ratio(i) = hs.sigma_omega(0, 0, 1) / hs.lambda_jk(0, 0);
  }
  const double med = arma::median(ratio);
  CHECK(std::abs(med - 1.0) < 0.1);  // C+(0,1) median is 1
  const double d = ks_statistic(
      ratio, [](double x) { return x <= 0.0 ? 0.0 : 2.0 / arma::datum::pi * std::atan(x); });
  CHECK(d < 0.02);
}

TEST_CASE("prior-only chain reproduces the t3 initial-state marginal") {
  RandomStream rng(102);
  const int n = 100000;
  arma::vec draws(n);
  double xi = 1.0;
  for (int i = 0; i < n; ++i) {
    const double w0 = rng.normal() / std::sqrt(xi);
    const GammaParams g = init_xi_params(w0);
    xi = rng.gamma(g.shape, g.rate);
    draws(i) = w0;
  }
  boost::math::students_t_distribution<> t3(3.0);
  const double d = ks_statistic(
      draws, [&](double x) { return boost::math::cdf(t3, x); });
  CHECK(d < 0.02);
}

TEST_CASE("MGP prior gives stochastically ordered intercept variances") {
  RandomStream rng(103);
  const int K = 6, n = 100000;
  arma::vec mean_var(K, arma::fill::zeros);
  for (int i = 0; i < n; ++i) {
    double prod = 1.0;
    for (int k = 0; k < K; ++k) {
      prod *= rng.gamma(k == 0 ? 2.0 : 3.0, 1.0);
      mean_var(k) += 1.0 / prod;
    }
  }
  mean_var /= n;
  for (int k = 1; k < K; ++k) CHECK(mean_var(k) < mean_var(k - 1));
}

TEST_CASE("cumulative products stay consistent after updates") {
  RandomStream rng(104);
  MgpState mgp = MgpState::init(4, 10);
  arma::vec mu{0.5, -0.2, 0.1, 0.05};
  arma::mat eta(4, 9, arma::fill::randn);
  for (int i = 0; i < 50; ++i) {
    update_mgp_mu(mu, mgp, rng);
    update_mgp_eta(eta, mgp, rng);
    double prod_mu = 1.0, prod_eta = 1.0;
    for (int k = 0; k < 4; ++k) {
      prod_mu *= mgp.delta_mu(k);
      prod_eta *= mgp.delta_eta(k);
      CHECK(std::abs(mgp.sigma_mu(k) * mgp.sigma_mu(k) * prod_mu - 1.0) < 1e-12);
      CHECK(std::abs(mgp.sigma_eta(k) * mgp.sigma_eta(k) * prod_eta - 1.0) < 1e-12);
    }
    CHECK(mgp.sigma_mu.min() > 0.0);
    CHECK(mgp.xi_eta.min() > 0.0);
  }
}

TEST_CASE("delta_eta = (4, 1) gives sigma_eta_2 = 1/2") {
  MgpState mgp = MgpState::init(2, 5);
  mgp.delta_eta = {4.0, 1.0};
  mgp.recompute_sigma_eta();
  CHECK(mgp.sigma_eta(1) == doctest::Approx(0.5));
}

TEST_CASE("local scales give Student-t innovations with matching kurtosis") {
  RandomStream rng(105);
  const double nu = 16.0;
  const int n = 400000;
  double m2 = 0.0, m4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = rng.gamma(nu / 2.0, nu / 2.0);
    const double e = rng.normal() / std::sqrt(xi);
    m2 += e * e;
    m4 += e * e * e * e;
  }
  m2 /= n;
  m4 /= n;
  const double kurt = m4 / (m2 * m2);
  const double target = 3.0 * (nu - 2.0) / (nu - 4.0);
  CHECK(std::abs(kurt - target) < 0.1 * target);
}

TEST_CASE("hyper-shape conditional density and slice updates") {
  CHECK(std::isfinite(hyper_shape_logdensity(2.0, arma::vec{1.0})));
  // log density at delta = 1: prior log(a) - a, likelihood -lgamma(a)
  const double v = hyper_shape_logdensity(2.0, arma::vec{1.0});
  CHECK(v == doctest::Approx(std::log(2.0) - 2.0 - std::lgamma(2.0)));

  RandomStream rng(106);
  MgpState mgp = MgpState::init(3, 6);
  for (int i = 0; i < 200; ++i) {
    update_hyper_shapes(mgp, rng);
    CHECK(mgp.nu_eta >= 2.0);
    CHECK(mgp.nu_eta <= 128.0);
    CHECK(mgp.a_mu1 > 0.0);
  }
}

TEST_CASE("prior-only chain for a_mu1 has the Gamma(2,1) mean") {
  RandomStream rng(107);
  MgpState mgp = MgpState::init(1, 3);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    // draw delta from its prior given a, then a from its slice conditional
    mgp.delta_mu(0) = rng.gamma(mgp.a_mu1, 1.0);
    mgp.delta_eta(0) = rng.gamma(mgp.a_eta1, 1.0);
    mgp.recompute_sigma_mu();
    mgp.recompute_sigma_eta();
    update_hyper_shapes(mgp, rng);
    sum += mgp.a_mu1;
  }
  CHECK(std::abs(sum / n - 2.0) < 0.1);
}

TEST_CASE("stochastic volatility: degenerate innovation collapses the path") {
  RandomStream rng(108);
  const arma::uword T = 40, M = 6;
  arma::mat resid(T, M, arma::fill::randn);
  VolatilityState sv = VolatilityState::init(T, 0.0);
  sv.sigma_nu = 1e-8;
  sv.phi_h = 0.5;
  update_stochastic_volatility(resid, sv, rng);
  CHECK(arma::abs(sv.h - sv.h(0)).max() < 1e-3);
}

TEST_CASE("stochastic volatility handles exactly-zero residuals") {
  RandomStream rng(109);
  arma::mat resid(10, 4, arma::fill::randn);
  resid(3, 2) = 0.0;
  VolatilityState sv = VolatilityState::init(10, 0.0);
  update_stochastic_volatility(resid, sv, rng);
  CHECK(sv.h.is_finite());
}

TEST_CASE("stochastic volatility recovers a two-regime scale") {
  RandomStream rng(110);
  const arma::uword T = 300, M = 50;
  arma::mat resid(T, M);
  for (arma::uword t = 0; t < T; ++t) {
    const double sd = t < T / 2 ? 0.1 : 1.0;
    for (arma::uword m = 0; m < M; ++m) resid(t, m) = sd * rng.normal();
  }
  VolatilityState sv = VolatilityState::init(T, std::log(0.25));
  const int burn = 300, keep = 700;
  arma::vec post_sd(T, arma::fill::zeros);
  for (int i = 0; i < burn + keep; ++i) {
    update_stochastic_volatility(resid, sv, rng);
    if (i >= burn) post_sd += arma::exp(0.5 * sv.h);
  }
  post_sd /= keep;
  const double low = arma::mean(post_sd.subvec(10, T / 2 - 11));
  const double high = arma::mean(post_sd.subvec(T / 2 + 10, T - 11));
  CHECK(std::abs(low - 0.1) < 0.025);
  CHECK(std::abs(high - 1.0) < 0.25);
}

TEST_CASE("updates reject non-finite inputs with location info") {
  RandomStream rng(111);
  HorseshoeState hs = HorseshoeState::init(2, 2, 4);
  arma::cube omega(2, 2, 3, arma::fill::zeros);
  omega(1, 0, 2) = arma::datum::nan;
  CHECK_THROWS_WITH_AS(update_horseshoe(omega, hs, rng),
                       doctest::Contains("j=2"), NumericalError);
  CHECK(hs.all_positive_finite());
}
