#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rngsentinel/health_tests.hpp"
#include "rngsentinel/statkit.hpp"

namespace rngsentinel {

// Inter-failure gap sample. Stored gaps may be pre-divided by an expected
// gap (scale), in which case absolute gaps are stored * scale; scale = 1
// means raw. mean_isn is the mean of the stored gaps.
struct IsnHistogram {
    std::vector<double> gaps;
    std::size_t n_fails = 0; // number of gap observations
    double mean_isn = 0.0;
    double scale = 1.0;

    double absolute_mean() const { return mean_isn * scale; }

    static IsnHistogram from_gaps(std::span<const std::uint64_t> raw) {
        return build(raw, 1.0, 1.0);
    }

    // Stores raw/expected so a unit-mean law is the conformance target.
    static IsnHistogram scaled(std::span<const std::uint64_t> raw, double expected) {
        if (!(expected > 0.0)) throw std::invalid_argument("IsnHistogram: expected gap <= 0");
        return build(raw, 1.0 / expected, expected);
    }

    static IsnHistogram from_stored(std::vector<double> stored, double scale_) {
        if (!(scale_ > 0.0)) throw std::invalid_argument("IsnHistogram: scale must be > 0");
        IsnHistogram h;
        h.gaps = std::move(stored);
        h.n_fails = h.gaps.size();
        long double sum = 0.0L;
        for (double g : h.gaps) {
            if (!(g > 0.0)) throw std::invalid_argument("IsnHistogram: gaps must be positive");
            sum += static_cast<long double>(g);
        }
        h.mean_isn = h.gaps.empty() ? 0.0
                                    : static_cast<double>(sum / static_cast<long double>(h.gaps.size()));
        h.scale = scale_;
        return h;
    }

private:
    static IsnHistogram build(std::span<const std::uint64_t> raw, double mul, double scale_) {
        std::vector<double> stored;
        stored.reserve(raw.size());
        for (std::uint64_t g : raw) {
            if (g == 0) throw std::invalid_argument("IsnHistogram: gaps must be >= 1");
            stored.push_back(static_cast<double>(g) * mul);
        }
        return from_stored(std::move(stored), scale_);
    }
};

// Expected inter-failure gap (in symbols) of a repetition test at cutoff C
// when every symbol carries min-entropy H: failure rate (m-1) * 2^(-C*H).
inline double expected_isn_rct(std::uint64_t m, double min_entropy, std::uint32_t cutoff) {
    if (m < 2) throw std::invalid_argument("expected_isn_rct: need m >= 2");
    if (!(min_entropy > 0.0)) throw std::invalid_argument("expected_isn_rct: min_entropy > 0");
    if (cutoff < 1) throw std::invalid_argument("expected_isn_rct: cutoff >= 1");
    return std::exp2(min_entropy * static_cast<double>(cutoff)) / static_cast<double>(m - 1);
}

enum class GapLaw { Geometric, Exponential };

struct ConformanceReport {
    GapLaw law = GapLaw::Exponential;
    double fitted = 0.0;
    double std_error = 0.0;
    double expected = 0.0;
    bool compatible = false; // |fitted - expected| <= 3 * std_error
    std::size_t n_obs = 0;
};

// Fits the stored gaps and checks the expected parameter sits within three
// standard errors of the fit. Geometric fits require unscaled integer gaps.
inline ConformanceReport isn_conformance(const IsnHistogram& hist, GapLaw law, double expected,
                                         std::size_t min_fails = 10) {
    if (hist.n_fails < min_fails)
        throw std::domain_error("isn_conformance: need at least " + std::to_string(min_fails) +
                                " failures, observed " + std::to_string(hist.n_fails));
    ConformanceReport r;
    r.law = law;
    r.expected = expected;
    r.n_obs = hist.n_fails;
    if (law == GapLaw::Geometric) {
        const GeometricFit f = fit_geometric(hist.gaps);
        r.fitted = f.p_hat;
        r.std_error = f.std_error;
    } else {
        const ExponentialFit f = fit_exponential(hist.gaps);
        r.fitted = f.rate_hat;
        r.std_error = f.std_error;
    }
    r.compatible = std::abs(r.fitted - r.expected) <= 3.0 * r.std_error;
    return r;
}

struct EntropyEstimate {
    double h_measured = 0.0;
    double sigma_h = 0.0;
    double h_lower_bound = 0.0;
    double confidence = 0.997; // three-sigma bound on the mean gap
    std::uint32_t cutoff = 0;
};

// Inverts the repetition-failure rate into per-symbol min-entropy:
//   alpha_bar = 1 / mean_gap,  H = (log2(m-1) + log2(mean_gap)) / C.
// The mean gap of n observations carries relative error 1/sqrt(n), so
// sigma_H = 1 / (C * ln2 * sqrt(n)) and the lower bound uses mean - 3 sigma.
inline EntropyEstimate entropy_from_rct(const IsnHistogram& hist, std::uint32_t cutoff,
                                        std::uint64_t m, std::size_t min_fails = 30) {
    if (m < 2) throw std::invalid_argument("entropy_from_rct: need m >= 2");
    if (cutoff < 1) throw std::invalid_argument("entropy_from_rct: cutoff >= 1");
    if (hist.n_fails < min_fails)
        throw std::domain_error("entropy_from_rct: need at least " + std::to_string(min_fails) +
                                " failures, observed " + std::to_string(hist.n_fails));
    const double n = static_cast<double>(hist.n_fails);
    const double mean_abs = hist.absolute_mean();
    const double sigma_mean = mean_abs / std::sqrt(n);
    const double dimmed = mean_abs - 3.0 * sigma_mean;
    if (!(dimmed > 0.0))
        throw std::domain_error("entropy_from_rct: mean gap not resolved at three sigma");
    const double c = static_cast<double>(cutoff);
    const double lm = std::log2(static_cast<double>(m - 1));
    EntropyEstimate e;
    e.cutoff = cutoff;
    e.h_measured = (lm + std::log2(mean_abs)) / c;
    e.sigma_h = 1.0 / (c * std::numbers::ln2 * std::sqrt(n));
    e.h_lower_bound = (lm + std::log2(dimmed)) / c;
    return e;
}

// Per-window failure probability when the window's first symbol recurs with
// probability p: both tails of the companion count Bin(window-1, p).
inline double apt_failure_probability(double p, const AptConfig& cfg) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("apt_failure_probability: p in (0,1)");
    if (cfg.cutoff_hi == 0) return 1.0; // degenerate: every window fails
    const std::uint64_t n = cfg.window - 1;
    double prob = binom_sf(cfg.cutoff_hi - 1, n, p);
    if (cfg.cutoff_lo >= 1) prob += binom_cdf(cfg.cutoff_lo - 1, n, p);
    return prob > 1.0 ? 1.0 : prob;
}

struct AptInversion {
    double p_hat = 0.0;
    bool degenerate = false; // observed rate at or below the uniform floor
};

// Solves apt_failure_probability(p) = rate on the upper-tail branch
// p >= 1/m, where the failure probability increases monotonically.
inline AptInversion invert_apt_rate(double rate, const AptConfig& cfg) {
    const double floor_p = 1.0 / static_cast<double>(cfg.m);
    AptInversion inv;
    if (!(rate > 0.0 && rate <= 1.0))
        throw std::invalid_argument("invert_apt_rate: rate in (0,1]");
    if (rate <= apt_failure_probability(floor_p, cfg)) {
        inv.p_hat = floor_p;
        inv.degenerate = true;
        return inv;
    }
    double lo = floor_p, hi = 1.0 - 1e-12;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (apt_failure_probability(mid, cfg) < rate)
            lo = mid;
        else
            hi = mid;
    }
    inv.p_hat = 0.5 * (lo + hi);
    return inv;
}

struct AptEntropy {
    EntropyEstimate estimate;
    double p_hat = 0.0;
    double sigma_p = 0.0;
    bool degenerate = false;
};

// Min-entropy from an observed APT failure rate: H = -log2(p_hat). The
// failure count is treated as Poisson (sigma = sqrt(n_fails)); the lower
// bound inverts the rate inflated by three sigma (more failures => more
// probable symbol => less entropy).
inline AptEntropy entropy_from_apt(std::uint64_t n_fails, std::uint64_t n_windows,
                                   const AptConfig& cfg, std::size_t min_fails = 30) {
    if (n_windows == 0) throw std::invalid_argument("entropy_from_apt: no windows");
    if (n_fails > n_windows) throw std::invalid_argument("entropy_from_apt: n_fails > n_windows");
    if (n_fails < min_fails)
        throw std::domain_error("entropy_from_apt: need at least " + std::to_string(min_fails) +
                                " failures, observed " + std::to_string(n_fails));
    const double nw = static_cast<double>(n_windows);
    const double rate = static_cast<double>(n_fails) / nw;
    const double sigma_rate = std::sqrt(static_cast<double>(n_fails)) / nw;

    const AptInversion centre = invert_apt_rate(rate, cfg);
    AptEntropy out;
    out.p_hat = centre.p_hat;
    out.degenerate = centre.degenerate;
    out.estimate.cutoff = cfg.cutoff_hi;
    out.estimate.h_measured = -std::log2(centre.p_hat);

    const double up = invert_apt_rate(std::min(rate + sigma_rate, 1.0), cfg).p_hat;
    const double down = invert_apt_rate(std::max(rate - sigma_rate, 1e-300), cfg).p_hat;
    out.sigma_p = 0.5 * (up - down);
    out.estimate.sigma_h = 0.5 * (std::log2(up) - std::log2(down));

    const double p_worst = invert_apt_rate(std::min(rate + 3.0 * sigma_rate, 1.0), cfg).p_hat;
    out.estimate.h_lower_bound = -std::log2(p_worst);
    return out;
}

// Inverse-variance pooling of independent estimates (our convention for
// combining per-source results).
inline EntropyEstimate combine_inverse_variance(std::span<const EntropyEstimate> estimates) {
    if (estimates.empty())
        throw std::invalid_argument("combine_inverse_variance: empty input");
    long double wsum = 0.0L, hsum = 0.0L, lbsum = 0.0L;
    for (const EntropyEstimate& e : estimates) {
        if (!(e.sigma_h > 0.0))
            throw std::invalid_argument("combine_inverse_variance: sigma_h must be > 0");
        const long double w = 1.0L / (static_cast<long double>(e.sigma_h) * e.sigma_h);
        wsum += w;
        hsum += w * static_cast<long double>(e.h_measured);
        lbsum += w * static_cast<long double>(e.h_lower_bound);
    }
    EntropyEstimate out;
    out.h_measured = static_cast<double>(hsum / wsum);
    out.sigma_h = static_cast<double>(std::sqrt(1.0L / wsum));
    out.h_lower_bound = static_cast<double>(lbsum / wsum);
    out.cutoff = estimates.front().cutoff;
    return out;
}

} // namespace rngsentinel
