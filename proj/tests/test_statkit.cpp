#include <catch2/catch_amalgamated.hpp>

#include "rngsentinel/statkit.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace rngsentinel;

TEST_CASE("binomial pmf basics", "[statkit]") {
    REQUIRE(binom_pmf(0, 10, 0.0) == 1.0);
    REQUIRE(binom_pmf(3, 10, 0.0) == 0.0);
    REQUIRE(binom_pmf(10, 10, 1.0) == 1.0);
    REQUIRE_THAT(binom_pmf(1, 2, 0.5), Catch::Matchers::WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(binom_pmf(5, 10, 0.5),
                 Catch::Matchers::WithinRel(252.0 / 1024.0, 1e-14));
    REQUIRE(binom_pmf(11, 10, 0.5) == 0.0);
    REQUIRE_THROWS_AS(binom_pmf(0, 10, 1.5), std::invalid_argument);
}

TEST_CASE("binomial tails agree with exact rational sums", "[statkit][oracle]") {
    struct Case {
        std::uint64_t k, n, num, den;
    };
    const Case cases[] = {
        {8, 16, 1, 2},     {500, 1000, 1, 2},  {400, 1000, 3, 10}, {61, 511, 1, 16},
        {62, 511, 1, 16},  {8, 511, 1, 16},    {9, 511, 1, 16},    {2048, 4096, 1, 2},
        {2112, 4096, 1, 2}, {100, 2048, 1, 16}, {0, 511, 1, 16},   {511, 511, 1, 16},
    };
    for (const Case& c : cases) {
        const double p = static_cast<double>(c.num) / static_cast<double>(c.den);
        const double sf_exact = oracle::to_double(oracle::binom_tail_ge(c.k, c.n, c.num, c.den));
        const double sf_lib = binom_sf(c.k, c.n, p);
        INFO("sf k=" << c.k << " n=" << c.n);
        REQUIRE_THAT(sf_lib, Catch::Matchers::WithinRel(sf_exact, 1e-12));
        const double cdf_exact = oracle::to_double(oracle::binom_tail_le(c.k, c.n, c.num, c.den));
        const double cdf_lib = binom_cdf(c.k, c.n, p);
        INFO("cdf k=" << c.k << " n=" << c.n);
        REQUIRE_THAT(cdf_lib, Catch::Matchers::WithinRel(cdf_exact, 1e-12));
    }
}

TEST_CASE("binomial pmf sums to one and cdf is monotone", "[statkit]") {
    const std::uint64_t n = 4096;
    const double p = 1.0 / 16.0;
    long double total = 0.0L;
    for (std::uint64_t k = 0; k <= n; ++k) total += binom_pmf(k, n, p);
    REQUIRE_THAT(static_cast<double>(total), Catch::Matchers::WithinAbs(1.0, 1e-10));
    double prev = 0.0;
    for (std::uint64_t k = 0; k <= 300; k += 10) {
        const double c = binom_cdf(k, n, p);
        REQUIRE(c >= prev);
        prev = c;
    }
    // Complement identity, evaluated where both sides are well-conditioned.
    REQUIRE_THAT(binom_cdf(255, n, p) + binom_sf(256, n, p),
                 Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("gaussian two-tail matches quoted confidence levels", "[statkit]") {
    using testutil::round_sig;
    REQUIRE(gauss_two_tail(0.0) == 1.0);
    REQUIRE(round_sig(gauss_two_tail(1.0), 3) == 0.317);
    REQUIRE(round_sig(gauss_two_tail(3.0), 2) == 2.7e-3);
    REQUIRE(round_sig(gauss_two_tail(5.0), 2) == 5.7e-7);
    REQUIRE(round_sig(gauss_two_tail(7.0), 3) == 2.56e-12);
    // and the implied expected gaps 1/p
    REQUIRE(round_sig(1.0 / gauss_two_tail(1.0), 3) == 3.15);
    REQUIRE(round_sig(1.0 / gauss_two_tail(3.0), 4) == 370.4);
    REQUIRE(round_sig(1.0 / gauss_two_tail(5.0), 2) == 1.7e6);
    REQUIRE(round_sig(1.0 / gauss_two_tail(7.0), 2) == 3.9e11);
    REQUIRE_THROWS_AS(gauss_two_tail(-1.0), std::invalid_argument);
}

TEST_CASE("geometric fit recovers the mean-gap parameter", "[statkit]") {
    const std::vector<double> ones(50, 1.0);
    const GeometricFit unit = fit_geometric(ones);
    REQUIRE(unit.p_hat == 1.0);
    REQUIRE(unit.std_error == 0.0);

    // Mean gap quoted as 370.4 corresponds to p at the three-sigma level.
    const std::vector<double> g370(100, 370.4);
    REQUIRE(testutil::round_sig(fit_geometric(g370).p_hat, 2) == 2.7e-3);

    std::mt19937_64 rng(7);
    std::geometric_distribution<std::uint64_t> dist(0.317);
    std::vector<double> sample;
    sample.reserve(100000);
    for (int i = 0; i < 100000; ++i) sample.push_back(static_cast<double>(dist(rng) + 1));
    const GeometricFit f = fit_geometric(sample);
    REQUIRE(f.n_obs == sample.size());
    REQUIRE(std::fabs(f.p_hat - 0.317) <= 3.0 * f.std_error);
    REQUIRE(f.std_error > 0.0);

    REQUIRE_THROWS_AS(fit_geometric(std::vector<double>{}), std::invalid_argument);
    REQUIRE_THROWS_AS(fit_geometric(std::vector<double>{0.5}), std::invalid_argument);
}

TEST_CASE("exponential fit recovers the rate and scales exactly", "[statkit]") {
    std::mt19937_64 rng(11);
    std::exponential_distribution<double> dist(1.0);
    std::vector<double> sample;
    sample.reserve(50000);
    for (int i = 0; i < 50000; ++i) sample.push_back(dist(rng) + 1e-12);
    const ExponentialFit f = fit_exponential(sample);
    REQUIRE(std::fabs(f.rate_hat - 1.0) <= 3.0 * f.std_error);

    // Scaling all gaps by a power of two divides the rate exactly.
    std::vector<double> doubled = sample;
    for (double& x : doubled) x *= 2.0;
    const ExponentialFit g = fit_exponential(doubled);
    REQUIRE(g.rate_hat == f.rate_hat / 2.0);

    REQUIRE_THROWS_AS(fit_exponential(std::vector<double>{}), std::invalid_argument);
    REQUIRE_THROWS_AS(fit_exponential(std::vector<double>{-1.0}), std::invalid_argument);
}
