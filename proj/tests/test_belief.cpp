#include <cmath>
#include <limits>

#include "catch_amalgamated.hpp"
#include "ecoroute/belief.hpp"
#include "ecoroute/energy.hpp"
#include "ecoroute/errors.hpp"
#include "ecoroute/rng.hpp"
#include "oracles.hpp"

using namespace ecoroute;
using Catch::Approx;

TEST_CASE("gaussian prior from the energy estimate") {
  const auto a = gaussian_prior(100.0, 0.25, 1.0);
  CHECK(a.mean == 100.0);
  CHECK(a.variance == 625.0);
  const auto b = gaussian_prior(10.0, 0.1, 1.0);
  CHECK(b.mean == 10.0);
  CHECK(b.variance == Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(gaussian_prior(-5.0, 0.25, 1.0), InvalidInput);
  CHECK_THROWS_AS(gaussian_prior(0.0, 0.25, 1.0), InvalidInput);
}

TEST_CASE("log-gaussian prior matches the requested moments") {
  const auto p = loggaussian_prior(10.0, 6.25, 0.01);
  CHECK(p.log_variance == Approx(0.0606246218164348).epsilon(1e-12));
  CHECK(std::abs(p.log_mean - 2.2722728) < 5e-8);
  CHECK(p.log_mean == Approx(std::log(10.0) - 0.5 * std::log(1.0625)).epsilon(1e-15));
  const auto m = lognormal_moments(p.log_mean, p.log_variance);
  CHECK(m.mean == Approx(10.0).epsilon(1e-13));
  CHECK(m.variance == Approx(6.25).epsilon(1e-12));

  const auto q = loggaussian_prior(42.0, 17.0, 0.01);
  const auto mq = lognormal_moments(q.log_mean, q.log_variance);
  CHECK(std::abs(mq.mean - 42.0) < 1e-10);
  CHECK(std::abs(mq.variance - 17.0) < 1e-10);

  const auto tiny = loggaussian_prior(1.0, 1e-14, 0.01);
  CHECK(std::abs(tiny.log_mean) < 1e-13);
  CHECK(std::abs(tiny.log_variance) < 1e-13);
  CHECK_THROWS_AS(loggaussian_prior(0.0, 1.0, 0.01), InvalidInput);
}

TEST_CASE("log-space noise variance matches the Gaussian likelihood variance") {
  const double s = loggaussian_noise_variance(4.0, 10.0);
  // y ~ LogNormal(ln 10 - s/2, s) has mean 10 and variance 4.
  const auto m = lognormal_moments(std::log(10.0) - 0.5 * s, s);
  CHECK(m.mean == Approx(10.0).epsilon(1e-14));
  CHECK(m.variance == Approx(4.0).epsilon(1e-13));
}

TEST_CASE("gaussian update hand example") {
  const auto post = gaussian_update({10.0, 4.0, 4.0}, 14.0);
  CHECK(post.mean == 12.0);
  CHECK(post.variance == 2.0);
  CHECK(post.noise_variance == 4.0);

  const auto same = gaussian_update({10.0, 4.0, 4.0}, 10.0);
  CHECK(same.mean == 10.0);
  CHECK(same.variance == 2.0);

  const auto vague = gaussian_update({10.0, 4.0, 1e12}, 1000.0);
  CHECK(vague.mean == Approx(10.0).margin(1e-6));
  CHECK(vague.variance == Approx(4.0).epsilon(1e-10));

  const auto neg = gaussian_update({10.0, 4.0, 4.0}, -6.0);
  CHECK(neg.mean == 2.0);
}

TEST_CASE("log-gaussian update hand example") {
  const auto post = loggaussian_update({0.0, 1.0, 1.0}, std::exp(0.5));
  CHECK(post.log_mean == Approx(0.5).epsilon(1e-15));
  CHECK(post.log_variance == 0.5);

  // ln y + s/2 == log_mean leaves the mean in place
  const LogGaussianEdgeBelief b{2.0, 0.3, 0.2};
  CHECK(loggaussian_update(b, std::exp(2.0 - 0.1)).log_mean == Approx(2.0).epsilon(1e-15));

  CHECK_THROWS_AS(loggaussian_update(b, 0.0), NonPositiveObservation);
  CHECK_THROWS_AS(loggaussian_update(b, -1.0), NonPositiveObservation);
}

TEST_CASE("updates agree with grid-based Bayes") {
  Rng rng(99);
  for (int i = 0; i < 50; ++i) {
    const double m = 1.0 + 99.0 * rng.uniform();
    const double v = std::pow(0.1 + 5.0 * rng.uniform(), 2.0);
    const double n = v * std::exp(std::log(10.0) * (2.0 * rng.uniform() - 1.0));
    const double y = m + 2.0 * std::sqrt(v + n) * rng.normal();
    const auto post = gaussian_update({m, v, n}, y);
    const auto ref = oracle::gaussian_posterior(m, v, n, y);
    CHECK(post.mean == Approx(ref.mean).epsilon(1e-6));
    CHECK(post.variance == Approx(ref.variance).epsilon(1e-6));
  }
  for (int i = 0; i < 50; ++i) {
    const double m = 4.0 * rng.uniform();
    const double v = std::pow(0.05 + 0.5 * rng.uniform(), 2.0);
    const double s = v * std::exp(std::log(10.0) * (2.0 * rng.uniform() - 1.0));
    const double y = std::exp(m - 0.5 * s + 2.0 * std::sqrt(v + s) * rng.normal());
    const auto post = loggaussian_update({m, v, s}, y);
    const auto ref = oracle::loggaussian_posterior(m, v, s, y);
    CHECK(post.log_mean == Approx(ref.mean).epsilon(1e-6).margin(1e-9));
    CHECK(post.log_variance == Approx(ref.variance).epsilon(1e-6));
  }
}

TEST_CASE("observation order does not change the posterior") {
  const double ys[] = {9.0, 12.5, 7.25, 11.0, 10.5};
  GaussianEdgeBelief fwd{10.0, 4.0, 3.0};
  GaussianEdgeBelief rev = fwd;
  LogGaussianEdgeBelief lfwd{2.3, 0.1, 0.05};
  LogGaussianEdgeBelief lrev = lfwd;
  for (int i = 0; i < 5; ++i) {
    fwd = update(fwd, ys[i]);
    rev = update(rev, ys[4 - i]);
    lfwd = update(lfwd, ys[i]);
    lrev = update(lrev, ys[4 - i]);
  }
  CHECK(fwd.mean == Approx(rev.mean).epsilon(1e-12));
  CHECK(fwd.variance == Approx(rev.variance).epsilon(1e-12));
  CHECK(lfwd.log_mean == Approx(lrev.log_mean).epsilon(1e-12));
  CHECK(lfwd.log_variance == Approx(lrev.log_variance).epsilon(1e-12));

  // five sequential updates equal one update with the sample mean and noise/5
  double sum = 0.0;
  for (const double y : ys) sum += y;
  const auto batch = gaussian_update({10.0, 4.0, 3.0 / 5.0}, sum / 5.0);
  CHECK(fwd.mean == Approx(batch.mean).epsilon(1e-12));
  CHECK(fwd.variance == Approx(batch.variance).epsilon(1e-12));
}

TEST_CASE("point-mass beliefs absorb nothing") {
  const GaussianEdgeBelief g{7.0, 0.0, 1.0};
  CHECK(gaussian_update(g, 100.0) == g);
  const LogGaussianEdgeBelief l{1.0, 0.0, 1.0};
  CHECK(loggaussian_update(l, 100.0) == l);
  Rng rng(1);
  CHECK(sample_mean(g, rng) == 7.0);
  CHECK(sample_mean(l, rng) == std::exp(1.0));
}

TEST_CASE("posterior samples are reproducible and centred") {
  Rng a(3);
  Rng b(3);
  CHECK(sample_mean(GaussianEdgeBelief{0.0, 1.0, 1.0}, a) == sample_mean(GaussianEdgeBelief{0.0, 1.0, 1.0}, b));

  Rng rng(17);
  constexpr int n = 100000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += sample_mean(GaussianEdgeBelief{10.0, 4.0, 1.0}, rng);
  CHECK(std::abs(s / n - 10.0) < 0.02);
}

TEST_CASE("posterior quantiles") {
  CHECK(posterior_quantile(GaussianEdgeBelief{10.0, 4.0, 1.0}, 0.5) == 10.0);
  CHECK(posterior_quantile(GaussianEdgeBelief{10.0, 4.0, 1.0}, 0.1) == Approx(7.436896868910799).epsilon(1e-14));
  CHECK(posterior_quantile(LogGaussianEdgeBelief{0.0, 1.0, 1.0}, 0.1) ==
        Approx(std::exp(-1.2815515655446004)).epsilon(1e-14));
  CHECK(posterior_quantile(LogGaussianEdgeBelief{0.0, 1.0, 1.0}, 0.1) == Approx(0.277606).epsilon(1e-5));
  CHECK_THROWS_AS(posterior_quantile(GaussianEdgeBelief{}, 0.0), InvalidInput);
  CHECK_THROWS_AS(posterior_quantile(LogGaussianEdgeBelief{}, 1.0), InvalidInput);
}

TEST_CASE("predictive means") {
  CHECK(predictive_mean(GaussianEdgeBelief{100.0, 4.0, 1e-4}) == Approx(100.0).margin(1e-9));
  CHECK(predictive_mean(GaussianEdgeBelief{0.0, 4.0, 1.0}) == Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(predictive_mean(loggaussian_prior(10.0, 6.25, 0.01)) == Approx(10.0).epsilon(1e-14));
}

TEST_CASE("belief validation") {
  CHECK_NOTHROW(validate(GaussianEdgeBelief{-3.0, 0.0, 1.0}));
  CHECK_THROWS_AS(validate(GaussianEdgeBelief{0.0, -1.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(validate(GaussianEdgeBelief{0.0, 1.0, 0.0}), InvalidInput);
  CHECK_THROWS_AS(validate(GaussianEdgeBelief{std::nan(""), 1.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(validate(LogGaussianEdgeBelief{0.0, 1.0, -1.0}), InvalidInput);
  CHECK_THROWS_AS(validate(LogGaussianEdgeBelief{800.0, 1.0, 1.0}), InvalidInput);
}

TEST_CASE("model names round-trip") {
  CHECK(parse_belief_model(to_string(BeliefModel::gaussian)) == BeliefModel::gaussian);
  CHECK(parse_belief_model(to_string(BeliefModel::log_gaussian)) == BeliefModel::log_gaussian);
  CHECK_THROWS_AS(parse_belief_model("normal"), InvalidInput);
}
