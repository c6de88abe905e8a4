#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rngsentinel/health_tests.hpp"

namespace rngsentinel {

struct SeriesConfig {
    std::uint64_t series_length = 1u << 17; // sequences per series (N)
    double k_warn = 3.0;
    std::uint32_t consecutive_alarm = 2;

    void validate() const {
        if (series_length == 0) throw std::invalid_argument("SeriesConfig: series_length >= 1");
        if (!(k_warn >= 0.0)) throw std::invalid_argument("SeriesConfig: k_warn must be >= 0");
        if (consecutive_alarm == 0)
            throw std::invalid_argument("SeriesConfig: consecutive_alarm >= 1");
    }
};

struct SeriesReport {
    std::uint64_t series_index = 0;
    double mean_stat = 0.0;     // mean of the per-sequence statistic
    double std_error = 0.0;     // null stddev of that mean
    double tail_fraction = 0.0; // fraction of sequences individually beyond k_warn
    bool warning = false;       // |mean| >= k_warn * std_error (inclusive)
    bool alarm = false;         // set by WarningMachine
};

// Mean of raw monobit statistics over one series. Under the null each S has
// stddev sqrt(n_bits), so the mean's stderr is sqrt(n_bits / count).
inline SeriesReport aggregate_monobit(std::span<const std::int64_t> stats, std::uint64_t n_bits,
                                      const SeriesConfig& cfg, std::uint64_t series_index = 0) {
    cfg.validate();
    if (stats.empty()) throw std::invalid_argument("aggregate_monobit: empty series");
    const MonobitConfig mono{n_bits, cfg.k_warn};
    const double thr = monobit_threshold(mono);
    long double sum = 0.0L;
    std::uint64_t tail = 0;
    for (std::int64_t s : stats) {
        sum += static_cast<long double>(s);
        if (std::abs(static_cast<double>(s)) >= thr) ++tail;
    }
    const double count = static_cast<double>(stats.size());
    SeriesReport r;
    r.series_index = series_index;
    r.mean_stat = static_cast<double>(sum / static_cast<long double>(stats.size()));
    r.std_error = std::sqrt(static_cast<double>(n_bits) / count);
    r.tail_fraction = static_cast<double>(tail) / count;
    r.warning = std::abs(r.mean_stat) >= cfg.k_warn * r.std_error;
    return r;
}

// Mean of runs z-scores; the null z has unit variance so stderr = 1/sqrt(count).
// Degenerate sequences (constant bits) must be filtered out by the caller.
inline SeriesReport aggregate_runs(std::span<const double> zscores, const SeriesConfig& cfg,
                                   std::uint64_t series_index = 0) {
    cfg.validate();
    if (zscores.empty()) throw std::invalid_argument("aggregate_runs: empty series");
    long double sum = 0.0L;
    std::uint64_t tail = 0;
    for (double z : zscores) {
        sum += static_cast<long double>(z);
        if (std::abs(z) >= cfg.k_warn) ++tail;
    }
    const double count = static_cast<double>(zscores.size());
    SeriesReport r;
    r.series_index = series_index;
    r.mean_stat = static_cast<double>(sum / static_cast<long double>(zscores.size()));
    r.std_error = 1.0 / std::sqrt(count);
    r.tail_fraction = static_cast<double>(tail) / count;
    r.warning = std::abs(r.mean_stat) >= cfg.k_warn * r.std_error;
    return r;
}

// Escalates warnings to alarms once `consecutive_alarm` warnings arrive
// back-to-back. update() stamps the alarm flag and returns true exactly when
// the streak first reaches the threshold (one event per episode).
class WarningMachine {
public:
    explicit WarningMachine(SeriesConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    bool update(SeriesReport& report) {
        streak_ = report.warning ? streak_ + 1 : 0;
        report.alarm = streak_ >= cfg_.consecutive_alarm;
        const bool event = streak_ == cfg_.consecutive_alarm;
        if (event) ++alarms_;
        return event;
    }

    std::uint64_t streak() const { return streak_; }
    std::uint64_t alarms() const { return alarms_; }

private:
    SeriesConfig cfg_;
    std::uint64_t streak_ = 0;
    std::uint64_t alarms_ = 0;
};

// Gaps between successive failures, in units of the index field. Adjacent
// failing indices yield a gap of 1; the support is therefore x >= 1.
class IsnCollector {
public:
    void add(std::uint64_t index, bool failed) {
        if (last_index_ && index <= *last_index_)
            throw std::invalid_argument("IsnCollector: indices must be strictly increasing");
        last_index_ = index;
        if (!failed) return;
        if (last_failure_) gaps_.push_back(index - *last_failure_);
        last_failure_ = index;
        ++failures_;
    }

    const std::vector<std::uint64_t>& gaps() const { return gaps_; }
    std::uint64_t failures() const { return failures_; }

private:
    std::vector<std::uint64_t> gaps_;
    std::optional<std::uint64_t> last_index_;
    std::optional<std::uint64_t> last_failure_;
    std::uint64_t failures_ = 0;
};

inline std::vector<std::uint64_t> isn_extract(std::span<const SequenceStat> stats) {
    IsnCollector c;
    for (const SequenceStat& s : stats) c.add(s.index, s.failed);
    return c.gaps();
}

// Adapts series warnings into the failure-stream shape isn_extract consumes,
// so inter-failure analysis runs identically at sequence and series level.
inline std::vector<SequenceStat> series_failures_to_stats(std::span<const SeriesReport> reports) {
    std::vector<SequenceStat> out;
    out.reserve(reports.size());
    for (const SeriesReport& r : reports)
        out.push_back(SequenceStat{r.series_index, r.mean_stat, r.warning});
    return out;
}

} // namespace rngsentinel
