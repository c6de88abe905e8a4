#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace rngsentinel {

// P(|Z| >= k) for standard normal Z.
inline double gauss_two_tail(double k) {
    if (k < 0.0) throw std::invalid_argument("gauss_two_tail: k must be non-negative");
    return std::erfc(k / std::sqrt(2.0));
}

namespace detail {

inline long double log_binom_pmf(std::uint64_t k, std::uint64_t n, long double p) {
    // long double lgamma keeps enough headroom for ~1e-13 relative accuracy
    // after exponentiation at the n used here.
    const long double lc = std::lgamma(static_cast<long double>(n) + 1.0L)
                         - std::lgamma(static_cast<long double>(k) + 1.0L)
                         - std::lgamma(static_cast<long double>(n - k) + 1.0L);
    long double lp = 0.0L;
    if (k > 0) lp += static_cast<long double>(k) * std::log(p);
    if (n - k > 0) lp += static_cast<long double>(n - k) * std::log1p(-p);
    return lc + lp;
}

inline void check_binom_args(std::uint64_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial: p outside [0,1]");
    if (n > (std::uint64_t{1} << 24)) throw std::invalid_argument("binomial: n too large");
}

} // namespace detail

// P(X = k), X ~ Bin(n, p).
inline double binom_pmf(std::uint64_t k, std::uint64_t n, double p) {
    detail::check_binom_args(n, p);
    if (k > n) return 0.0;
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == n ? 1.0 : 0.0;
    return static_cast<double>(std::exp(detail::log_binom_pmf(k, n, static_cast<long double>(p))));
}

// P(X <= k). Term-by-term long double summation; tail sums add only positive
// terms, so tiny probabilities keep full relative precision (no 1-cdf
// cancellation anywhere in this header).
inline double binom_cdf(std::uint64_t k, std::uint64_t n, double p) {
    detail::check_binom_args(n, p);
    if (k >= n) return 1.0;
    if (p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;
    const long double lp = static_cast<long double>(p);
    long double sum = 0.0L;
    for (std::uint64_t i = 0; i <= k; ++i)
        sum += std::exp(detail::log_binom_pmf(i, n, lp));
    return static_cast<double>(sum > 1.0L ? 1.0L : sum);
}

// P(X >= k), summed directly over the upper tail.
inline double binom_sf(std::uint64_t k, std::uint64_t n, double p) {
    detail::check_binom_args(n, p);
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    const long double lp = static_cast<long double>(p);
    long double sum = 0.0L;
    for (std::uint64_t i = k; i <= n; ++i)
        sum += std::exp(detail::log_binom_pmf(i, n, lp));
    return static_cast<double>(sum > 1.0L ? 1.0L : sum);
}

struct GeometricFit {
    double p_hat = 0.0;
    double std_error = 0.0;
    std::size_t n_obs = 0;
};

struct ExponentialFit {
    double rate_hat = 0.0;
    double std_error = 0.0;
    std::size_t n_obs = 0;
};

namespace detail {

inline double mean_of(std::span<const double> xs, const char* who) {
    if (xs.empty()) throw std::invalid_argument(std::string(who) + ": empty sample");
    long double s = 0.0L;
    for (double x : xs) {
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::invalid_argument(std::string(who) + ": samples must be finite and positive");
        s += static_cast<long double>(x);
    }
    return static_cast<double>(s / static_cast<long double>(xs.size()));
}

} // namespace detail

// ML fit of P(X = x) = p(1-p)^(x-1) on support x >= 1: p_hat = 1/mean.
inline GeometricFit fit_geometric(std::span<const double> gaps) {
    for (double g : gaps)
        if (g < 1.0) throw std::invalid_argument("fit_geometric: gaps must be >= 1");
    const double mean = detail::mean_of(gaps, "fit_geometric");
    GeometricFit f;
    f.n_obs = gaps.size();
    f.p_hat = 1.0 / mean;
    f.std_error = f.p_hat * std::sqrt((1.0 - f.p_hat) / static_cast<double>(f.n_obs));
    return f;
}

// ML fit of an exponential gap law: rate_hat = 1/mean, stderr = rate/sqrt(n).
inline ExponentialFit fit_exponential(std::span<const double> gaps) {
    const double mean = detail::mean_of(gaps, "fit_exponential");
    ExponentialFit f;
    f.n_obs = gaps.size();
    f.rate_hat = 1.0 / mean;
    f.std_error = f.rate_hat / std::sqrt(static_cast<double>(f.n_obs));
    return f;
}

} // namespace rngsentinel
