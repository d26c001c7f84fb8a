#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "catch_amalgamated.hpp"
#include "ecoroute/errors.hpp"
#include "ecoroute/rng.hpp"
#include "ecoroute/stats.hpp"

using namespace ecoroute;
using Catch::Approx;

TEST_CASE("normal quantile matches tabulated values") {
  CHECK(stats::normal_quantile(0.1) == Approx(-1.2815515655446004).epsilon(1e-15));
  CHECK(stats::normal_quantile(0.5) == 0.0);
  CHECK(stats::normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-15));
  CHECK(stats::normal_quantile(1e-10) == Approx(-6.361340902404056).epsilon(1e-14));
}

TEST_CASE("normal quantile agrees with boost over both tails") {
  const boost::math::normal_distribution<double> n01;
  for (double lp = -300.0; lp < -0.31; lp += 0.37) {
    const double p = std::pow(10.0, lp);
    const double got = stats::normal_quantile(p);
    const double want = boost::math::quantile(n01, p);
    CHECK(got == Approx(want).epsilon(4e-15));
    const double upper = 1.0 - p;
    if (upper < 1.0) {
      CHECK(stats::normal_quantile(upper) == Approx(boost::math::quantile(n01, upper)).epsilon(1e-12));
    }
  }
}

TEST_CASE("normal quantile inverts the cdf") {
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    const double p = stats::normal_cdf(x);
    if (p <= 0.0 || p >= 1.0) continue;
    // near p = 1 the spacing of doubles limits how well x is determined
    const double slack = 1e-9 + 4e-16 / stats::normal_pdf(x);
    CHECK(stats::normal_quantile(p) == Approx(x).margin(slack));
  }
}

TEST_CASE("normal quantile rejects probabilities outside the open interval") {
  CHECK_THROWS_AS(stats::normal_quantile(0.0), InvalidInput);
  CHECK_THROWS_AS(stats::normal_quantile(1.0), InvalidInput);
  CHECK_THROWS_AS(stats::normal_quantile(std::nan("")), InvalidInput);
}

TEST_CASE("cdf, sf and pdf agree with boost") {
  const boost::math::normal_distribution<double> n01;
  for (double x = -30.0; x <= 30.0; x += 0.5) {
    CHECK(stats::normal_pdf(x) == Approx(boost::math::pdf(n01, x)).epsilon(1e-14));
    CHECK(stats::normal_cdf(x) == Approx(boost::math::cdf(n01, x)).epsilon(1e-13));
    CHECK(stats::normal_sf(x) == Approx(boost::math::cdf(boost::math::complement(n01, x))).epsilon(1e-13));
  }
}

TEST_CASE("derived seeds separate streams and tags") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t master = 0; master < 4; ++master) {
    for (auto s : {Stream::run, Stream::agent, Stream::environment, Stream::synth, Stream::truth_mc}) {
      for (std::uint64_t a = 0; a < 5; ++a) {
        for (std::uint64_t b = 0; b < 5; ++b) seen.insert(derive_seed(master, s, {a, b}));
      }
    }
  }
  CHECK(seen.size() == 4u * 5u * 25u);
  CHECK(derive_seed(1, Stream::agent, {2, 3}) != derive_seed(1, Stream::agent, {3, 2}));
  CHECK(derive_seed(9, Stream::run, {1}) == derive_seed(9, Stream::run, {1}));
}

TEST_CASE("rng draws are reproducible") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.normal() == b.normal());
    CHECK(a.uniform() == b.uniform());
  }
}

TEST_CASE("uniform and normal draws have the right moments") {
  Rng rng(7);
  constexpr int n = 200000;
  double su = 0.0;
  double sn = 0.0;
  double sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  // 4.5 standard errors
  CHECK(std::abs(su / n - 0.5) < 4.5 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sn / n) < 4.5 / std::sqrt(n));
  CHECK(std::abs(sn2 / n - 1.0) < 4.5 * std::sqrt(2.0 / n));
}

TEST_CASE("uniform_index covers its range evenly") {
  Rng rng(11);
  std::vector<int> counts(7, 0);
  constexpr int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(7)];
  for (const int c : counts) CHECK(std::abs(c - n / 7) < 4.5 * std::sqrt(n / 7.0));
  CHECK_THROWS_AS(rng.uniform_index(0), InvalidInput);
  CHECK(rng.uniform_index(1) == 0u);
}
