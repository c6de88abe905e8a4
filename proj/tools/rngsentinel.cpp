// rngsentinel: command-line qualification of random bit streams.
//
// Subcommands:
//   monitor      on-line series monitoring (monobit / runs), alarm on streaks
//   analyze      retrospective inter-failure and min-entropy analysis
//   tables       reference threshold and expected-gap tables
//   sensitivity  tamper-detection power curves (exact and Monte Carlo)
//
// Reports are JSON lines (or CSV for curve data); the first record of every
// report is a manifest describing the full configuration, and each following
// record carries the manifest's run id. Exit codes: 0 healthy, 2 alarm,
// 1 usage or I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rngsentinel/rngsentinel.hpp"

using nlohmann::json;
namespace rs = rngsentinel;

namespace {

// ------------------------------------------------------------- plumbing --

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
    std::uint64_t v = 0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(begin, end, v);
    if (r.ec != std::errc{} || r.ptr != end)
        throw std::runtime_error(std::string(what) + ": not a valid unsigned integer: " + s);
    return v;
}

// Comma-separated unsigned integers, with "a-b" range expansion.
std::vector<std::uint64_t> parse_u64_list(const std::string& spec, const char* what) {
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t comma = std::min(spec.find(',', pos), spec.size());
        const std::string tok = spec.substr(pos, comma - pos);
        if (tok.empty()) throw std::runtime_error(std::string(what) + ": empty element");
        const std::size_t dash = tok.find('-');
        if (dash == std::string::npos) {
            out.push_back(parse_u64(tok, what));
        } else {
            const std::uint64_t lo = parse_u64(tok.substr(0, dash), what);
            const std::uint64_t hi = parse_u64(tok.substr(dash + 1), what);
            if (hi < lo) throw std::runtime_error(std::string(what) + ": descending range");
            for (std::uint64_t v = lo; v <= hi; ++v) out.push_back(v);
        }
        pos = comma + 1;
    }
    return out;
}

std::vector<std::string> split_list(const std::string& spec) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t comma = std::min(spec.find(',', pos), spec.size());
        out.push_back(spec.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

// Shared stream/report options.
struct IoOptions {
    std::string input;  // empty: seeded generator; "-": stdin; else file path
    std::optional<std::uint64_t> seed;
    std::uint64_t bits = 0;  // total bit budget; 0 = until end of input
    std::size_t buffer = 65536;
    std::string out;  // empty or "-": stdout
    std::string format;
};

void add_stream_options(CLI::App* cmd, IoOptions& io) {
    cmd->add_option("--input", io.input, "input file path, or - for stdin (default: generator)");
    cmd->add_option("--seed", io.seed, "generator / Monte Carlo seed (fallback: RNGSENTINEL_SEED)");
    cmd->add_option("--bits", io.bits, "total bits to consume (0 = until end of input)");
    cmd->add_option("--buffer-size", io.buffer, "read buffer in bytes (does not affect results)")
        ->check(CLI::PositiveNumber);
}

void add_report_options(CLI::App* cmd, IoOptions& io, const std::string& default_format) {
    io.format = default_format;
    cmd->add_option("--out", io.out, "report path (default: stdout)");
    cmd->add_option("--format", io.format, "report format")
        ->check(CLI::IsMember({"jsonl", "csv"}));
}

std::uint64_t resolve_seed(const IoOptions& io) {
    if (io.seed) return *io.seed;
    if (const char* env = std::getenv("RNGSENTINEL_SEED")) return parse_u64(env, "RNGSENTINEL_SEED");
    return 0;
}

// Output sink: stdout by default, file when --out is given.
class Report {
public:
    explicit Report(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
            os_ = &file_;
        }
    }
    std::ostream& os() { return *os_; }
    void line(const std::string& s) { *os_ << s << '\n'; }
    void record(const json& j) { *os_ << j.dump() << '\n'; }

private:
    std::ofstream file_;
    std::ostream* os_ = &std::cout;
};

json input_identity(const IoOptions& io, std::uint64_t seed) {
    json in;
    if (io.input.empty()) {
        in["kind"] = "generator";
        in["seed"] = seed;
    } else if (io.input == "-") {
        in["kind"] = "stdin";
    } else {
        in["kind"] = "file";
        in["path"] = io.input;
        std::error_code ec;
        const auto size = std::filesystem::file_size(io.input, ec);
        if (!ec) in["size"] = static_cast<std::uint64_t>(size);
    }
    return in;
}

// The run id hashes the manifest body, so identical configurations produce
// identical ids and, with deterministic inputs, byte-identical reports.
// Read-buffer size is deliberately not part of the manifest.
json make_manifest(const std::string& command, json params, const IoOptions& io,
                   std::uint64_t seed) {
    json m;
    m["command"] = command;
    m["input"] = input_identity(io, seed);
    m["params"] = std::move(params);
    m["seed"] = seed;
    m["tool"] = "rngsentinel";
    m["type"] = "manifest";
    m["version"] = rs::version;
    m["run"] = hex16(fnv1a64(m.dump()));
    return m;
}

rs::BitSourceSpec source_spec(const IoOptions& io, std::uint64_t seed) {
    if (io.input.empty()) return rs::BitSourceSpec::generator(seed);
    if (io.input == "-") return rs::BitSourceSpec::standard_input();
    return rs::BitSourceSpec::file(io.input);
}

std::optional<rs::BiasModel> parse_inject(const std::string& spec, std::uint64_t n) {
    if (spec.empty()) return std::nullopt;
    const std::size_t comma = spec.find(',');
    if (comma == std::string::npos)
        throw std::runtime_error("--inject expects j,f (forced ones, tamper period)");
    rs::BiasModel bias;
    bias.forced_ones = parse_u64(spec.substr(0, comma), "--inject j");
    bias.period = parse_u64(spec.substr(comma + 1), "--inject f");
    if (bias.period == 0) throw std::runtime_error("--inject: period f must be >= 1");
    if (bias.forced_ones > n) throw std::runtime_error("--inject: j exceeds sequence length n");
    return bias;
}

std::vector<std::string> parse_tests(const std::string& spec,
                                     const std::vector<std::string>& allowed) {
    std::vector<std::string> tests = split_list(spec);
    for (const std::string& t : tests) {
        bool ok = false;
        for (const std::string& a : allowed) ok = ok || t == a;
        if (!ok) {
            std::string choices;
            for (const auto& a : allowed) choices += (choices.empty() ? "" : ", ") + a;
            throw std::runtime_error("unknown test '" + t + "' (choose from: " + choices + ")");
        }
    }
    return tests;
}

bool has(const std::vector<std::string>& tests, const char* name) {
    for (const std::string& t : tests)
        if (t == name) return true;
    return false;
}

// -------------------------------------------------------------- monitor --

struct MonitorOptions {
    IoOptions io;
    std::uint64_t n = 32;
    std::uint64_t series_length = 1u << 17;
    double k = 3.0;
    std::uint32_t consecutive = 2;
    std::string tests = "monobit,runs";
    std::string inject;
};

int run_monitor(const MonitorOptions& opt) {
    const std::vector<std::string> tests = parse_tests(opt.tests, {"monobit", "runs"});
    if (opt.n < 2) throw std::runtime_error("--n must be >= 2");
    if (opt.io.format == "csv") throw std::runtime_error("monitor reports are jsonl only");
    const std::uint64_t seed = resolve_seed(opt.io);
    const auto bias = parse_inject(opt.inject, opt.n);

    IoOptions io = opt.io;
    if (io.input.empty() && io.bits == 0) io.bits = opt.n * opt.series_length;

    json params;
    params["bits"] = io.bits;
    params["consecutive"] = opt.consecutive;
    params["inject"] = opt.inject;
    params["k"] = opt.k;
    params["n"] = opt.n;
    params["series_length"] = opt.series_length;
    params["tests"] = tests;
    const json manifest = make_manifest("monitor", params, io, seed);
    const std::string run = manifest["run"];

    rs::BitReader reader(rs::make_byte_source(source_spec(io, seed)), io.buffer);
    Report report(io.out);
    report.record(manifest);

    const rs::SeriesConfig scfg{opt.series_length, opt.k, opt.consecutive};
    rs::WarningMachine machine_mono(scfg), machine_runs(scfg);
    const bool do_mono = has(tests, "monobit"), do_runs = has(tests, "runs");
    std::vector<std::int64_t> mono_stats;
    std::vector<double> run_zs;
    std::uint64_t degenerate = 0;
    std::uint64_t warn_mono = 0, warn_runs = 0;
    std::uint64_t seq_index = 0, series_index = 0, bits_done = 0;

    const auto flush_series = [&] {
        if (do_mono) {
            rs::SeriesReport r = rs::aggregate_monobit(mono_stats, opt.n, scfg, series_index);
            machine_mono.update(r);
            warn_mono += r.warning ? 1 : 0;
            json rec;
            rec["alarm"] = r.alarm;
            rec["index"] = r.series_index;
            rec["mean"] = r.mean_stat;
            rec["run"] = run;
            rec["sequences"] = opt.series_length;
            rec["std_error"] = r.std_error;
            rec["streak"] = machine_mono.streak();
            rec["tail_fraction"] = r.tail_fraction;
            rec["test"] = "monobit";
            rec["type"] = "series";
            rec["warning"] = r.warning;
            report.record(rec);
        }
        if (do_runs) {
            rs::SeriesReport r;
            if (run_zs.empty()) {
                // No sequence in the series had a defined run statistic; a
                // constant stream is the worst case, so flag it.
                r.series_index = series_index;
                r.tail_fraction = 1.0;
                r.warning = true;
            } else {
                r = rs::aggregate_runs(run_zs, scfg, series_index);
            }
            machine_runs.update(r);
            warn_runs += r.warning ? 1 : 0;
            json rec;
            rec["alarm"] = r.alarm;
            rec["degenerate"] = degenerate;
            rec["index"] = r.series_index;
            rec["mean"] = r.mean_stat;
            rec["run"] = run;
            rec["sequences"] = opt.series_length;
            rec["std_error"] = r.std_error;
            rec["streak"] = machine_runs.streak();
            rec["tail_fraction"] = r.tail_fraction;
            rec["test"] = "runs";
            rec["type"] = "series";
            rec["warning"] = r.warning;
            report.record(rec);
        }
        mono_stats.clear();
        run_zs.clear();
        degenerate = 0;
        ++series_index;
    };

    rs::BitVec seq;
    while ((io.bits == 0 || bits_done + opt.n <= io.bits) && reader.read_bits(opt.n, seq)) {
        bits_done += opt.n;
        if (bias) rs::apply_bias_inplace(seq, *bias, seq_index);
        const std::uint64_t ones = seq.popcount();
        if (do_mono)
            mono_stats.push_back(2 * static_cast<std::int64_t>(ones) -
                                 static_cast<std::int64_t>(opt.n));
        if (do_runs) {
            // Zero stddev covers constant sequences and the n=2 balanced case,
            // where the run count is deterministic.
            const rs::RunsMoments rm = rs::runs_expectation(opt.n, ones);
            if (rm.stddev > 0.0)
                run_zs.push_back(
                    (static_cast<double>(rs::runs_count(seq)) - rm.mean) / rm.stddev);
            else
                ++degenerate;
        }
        ++seq_index;
        if (seq_index % opt.series_length == 0) flush_series();
    }

    const std::uint64_t alarms = machine_mono.alarms() + machine_runs.alarms();
    json summary;
    summary["bits"] = bits_done;
    summary["run"] = run;
    summary["sequences"] = seq_index;
    summary["series"] = series_index;
    json per_test;
    if (do_mono)
        per_test["monobit"] = {{"alarms", machine_mono.alarms()}, {"warnings", warn_mono}};
    if (do_runs) per_test["runs"] = {{"alarms", machine_runs.alarms()}, {"warnings", warn_runs}};
    summary["tests"] = per_test;
    summary["type"] = "summary";
    summary["verdict"] = alarms ? "alarm" : "healthy";
    report.record(summary);
    return alarms ? 2 : 0;
}

// -------------------------------------------------------------- analyze --

struct AnalyzeOptions {
    IoOptions io;
    std::string tests = "rct";
    std::uint64_t n = 32;
    std::uint64_t series_length = 1u << 17;
    double k = 3.0;
    unsigned symbol_bits = 4;
    std::uint32_t window = 512;
    double alpha = 0x1p-20;
    std::optional<std::uint32_t> cutoff;
    double target_entropy = 0.0;  // 0: use symbol_bits (uniform symbols)
    std::string inject;
};

// Series-level gap record shared by the monobit and runs analyses.
json isn_record(const std::string& test, const std::string& run, double k,
                const rs::IsnCollector& coll, std::uint64_t n_series, double expected_p) {
    json rec;
    rec["expected_fraction"] = expected_p;
    rec["failures"] = coll.failures();
    rec["k"] = k;
    rec["run"] = run;
    rec["series"] = n_series;
    rec["test"] = test;
    rec["type"] = "isn";
    if (n_series)
        rec["failure_fraction"] =
            static_cast<double>(coll.failures()) / static_cast<double>(n_series);
    try {
        const rs::IsnHistogram hist = rs::IsnHistogram::from_gaps(coll.gaps());
        rec["mean_gap"] = hist.absolute_mean();
        const rs::ConformanceReport fit =
            rs::isn_conformance(hist, rs::GapLaw::Geometric, expected_p);
        rec["geometric_p"] = fit.fitted;
        rec["geometric_stderr"] = fit.std_error;
        rec["compatible"] = fit.compatible;
    } catch (const std::exception& e) {
        rec["error"] = e.what();
    }
    return rec;
}

int run_analyze(const AnalyzeOptions& opt) {
    const std::vector<std::string> tests =
        parse_tests(opt.tests, {"monobit", "runs", "rct", "apt"});
    if (opt.n < 2) throw std::runtime_error("--n must be >= 2");
    if (opt.symbol_bits < 1 || opt.symbol_bits > 20)
        throw std::runtime_error("--symbol-bits must be in 1..20");
    if (opt.io.format == "csv") throw std::runtime_error("analyze reports are jsonl only");
    const std::uint64_t seed = resolve_seed(opt.io);
    const auto bias = parse_inject(opt.inject, opt.n);
    const std::uint64_t m = std::uint64_t{1} << opt.symbol_bits;
    const double target_h =
        opt.target_entropy > 0.0 ? opt.target_entropy : static_cast<double>(opt.symbol_bits);

    IoOptions io = opt.io;
    if (io.input.empty() && io.bits == 0) io.bits = opt.n * opt.series_length;

    json params;
    params["alpha"] = opt.alpha;
    params["bits"] = io.bits;
    params["cutoff"] = opt.cutoff ? json(*opt.cutoff) : json();
    params["inject"] = opt.inject;
    params["k"] = opt.k;
    params["n"] = opt.n;
    params["series_length"] = opt.series_length;
    params["symbol_bits"] = opt.symbol_bits;
    params["target_entropy"] = target_h;
    params["tests"] = tests;
    params["window"] = opt.window;
    const json manifest = make_manifest("analyze", params, io, seed);
    const std::string run = manifest["run"];

    rs::BitReader reader(rs::make_byte_source(source_spec(io, seed)), io.buffer);
    Report report(io.out);
    report.record(manifest);

    const bool do_mono = has(tests, "monobit"), do_runs = has(tests, "runs");
    const bool do_rct = has(tests, "rct"), do_apt = has(tests, "apt");

    const rs::RctConfig rct_cfg = rs::RctConfig::make(m, target_h, opt.alpha, opt.cutoff);
    const rs::AptConfig apt_cfg = rs::AptConfig::make(m, opt.window, opt.alpha);
    rs::RctEvaluator rct(rct_cfg);
    rs::AptEvaluator apt(apt_cfg);
    rs::IsnCollector rct_coll, apt_coll, mono_coll, runs_coll;
    std::vector<std::uint64_t> apt_hist(opt.window + 1, 0);

    const rs::SeriesConfig scfg{opt.series_length, opt.k, 2};
    std::vector<std::int64_t> mono_stats;
    std::vector<double> run_zs;
    std::uint64_t n_series = 0;

    rs::BitVec seq;
    std::uint64_t bits_done = 0, seq_index = 0;
    std::uint64_t symbol = 0;
    unsigned sym_fill = 0;

    while ((io.bits == 0 || bits_done + opt.n <= io.bits) && reader.read_bits(opt.n, seq)) {
        bits_done += opt.n;
        if (bias) rs::apply_bias_inplace(seq, *bias, seq_index);
        if (do_mono || do_runs) {
            const std::uint64_t ones = seq.popcount();
            if (do_mono)
                mono_stats.push_back(2 * static_cast<std::int64_t>(ones) -
                                     static_cast<std::int64_t>(opt.n));
            if (do_runs) {
                const rs::RunsMoments rm = rs::runs_expectation(opt.n, ones);
                if (rm.stddev > 0.0)
                    run_zs.push_back(
                        (static_cast<double>(rs::runs_count(seq)) - rm.mean) / rm.stddev);
            }
            if ((seq_index + 1) % opt.series_length == 0) {
                if (do_mono) {
                    const rs::SeriesReport r =
                        rs::aggregate_monobit(mono_stats, opt.n, scfg, n_series);
                    mono_coll.add(n_series + 1, r.warning);
                }
                if (do_runs) {
                    bool warn = true;
                    if (!run_zs.empty())
                        warn = rs::aggregate_runs(run_zs, scfg, n_series).warning;
                    runs_coll.add(n_series + 1, warn);
                }
                mono_stats.clear();
                run_zs.clear();
                ++n_series;
            }
        }
        if (do_rct || do_apt) {
            for (std::size_t i = 0; i < seq.size(); ++i) {
                symbol |= static_cast<std::uint64_t>(seq.get(i)) << sym_fill;
                if (++sym_fill < opt.symbol_bits) continue;
                if (do_rct) {
                    const auto st = rct.feed(symbol);
                    rct_coll.add(rct.symbols_seen(), st.has_value());
                }
                if (do_apt) {
                    if (const auto st = apt.feed(symbol)) {
                        ++apt_hist[static_cast<std::size_t>(st->statistic)];
                        apt_coll.add(st->index + 1, st->failed);
                    }
                }
                symbol = 0;
                sym_fill = 0;
            }
        }
        ++seq_index;
    }

    if (do_mono)
        report.record(isn_record("monobit", run, opt.k, mono_coll, n_series,
                                 rs::monobit_single_power(opt.n * opt.series_length, opt.k, 0)
                                     .fpp));
    if (do_runs)
        report.record(isn_record("runs", run, opt.k, runs_coll, n_series,
                                 rs::gauss_two_tail(opt.k)));

    if (do_rct) {
        json rec;
        rec["cutoff"] = rct_cfg.cutoff;
        rec["failures"] = rct_coll.failures();
        rec["m"] = m;
        rec["run"] = run;
        rec["symbols"] = rct.symbols_seen();
        rec["test"] = "rct";
        rec["type"] = "entropy";
        const double expected_gap = rs::expected_isn_rct(m, target_h, rct_cfg.cutoff);
        rec["expected_gap"] = expected_gap;
        const rs::IsnHistogram raw = rs::IsnHistogram::from_gaps(rct_coll.gaps());
        rec["mean_gap"] = raw.absolute_mean();
        try {
            const rs::IsnHistogram scaled =
                rs::IsnHistogram::scaled(rct_coll.gaps(), expected_gap);
            const rs::ConformanceReport exp_fit =
                rs::isn_conformance(scaled, rs::GapLaw::Exponential, 1.0);
            rec["exponential_rate"] = exp_fit.fitted;
            rec["exponential_stderr"] = exp_fit.std_error;
            rec["exponential_compatible"] = exp_fit.compatible;
            const rs::ConformanceReport geo_fit =
                rs::isn_conformance(raw, rs::GapLaw::Geometric, 1.0 / expected_gap);
            rec["geometric_p"] = geo_fit.fitted;
            rec["geometric_stderr"] = geo_fit.std_error;
            rec["geometric_compatible"] = geo_fit.compatible;
        } catch (const std::exception& e) {
            rec["fit_error"] = e.what();
            std::cerr << "analyze rct: " << e.what() << '\n';
        }
        try {
            const rs::EntropyEstimate est = rs::entropy_from_rct(raw, rct_cfg.cutoff, m);
            rec["confidence"] = est.confidence;
            rec["h_measured"] = est.h_measured;
            rec["h_sigma"] = est.sigma_h;
            rec["h_lower_bound"] = est.h_lower_bound;
        } catch (const std::exception& e) {
            rec["error"] = e.what();
            std::cerr << "analyze rct: " << e.what() << '\n';
        }
        report.record(rec);
    }

    if (do_apt) {
        json rec;
        rec["cutoff_hi"] = apt_cfg.cutoff_hi;
        rec["cutoff_lo"] = apt_cfg.cutoff_lo;
        rec["failures"] = apt_coll.failures();
        rec["m"] = m;
        rec["run"] = run;
        rec["test"] = "apt";
        rec["type"] = "entropy";
        rec["window"] = opt.window;
        const std::uint64_t windows = apt.windows_completed();
        rec["windows"] = windows;
        // Observed vs predicted exceedance fractions across a ladder of
        // inclusive-count cutoffs, in the test's own first-symbol units.
        if (windows) {
            const double p0 = 1.0 / static_cast<double>(m);
            const std::uint64_t companions = opt.window - 1;
            json scan = json::array();
            std::vector<std::uint64_t> cum_ge(opt.window + 2, 0);
            for (std::size_t s = opt.window; s + 1 > 0; --s)
                cum_ge[s] = cum_ge[s + 1] + apt_hist[s];
            const auto add_row = [&](std::uint32_t c, bool upper) {
                if (c < 1 || c > opt.window) return;
                const std::uint64_t obs_count = upper ? cum_ge[c] : windows - cum_ge[c + 1];
                const double observed =
                    static_cast<double>(obs_count) / static_cast<double>(windows);
                // The inclusive count s = X + 1 lands in the tail at s >= c
                // (X >= c-1) or s <= c (X <= c-1).
                const double predicted = upper ? rs::binom_sf(c - 1, companions, p0)
                                               : rs::binom_cdf(c - 1, companions, p0);
                const double sigma =
                    std::sqrt(predicted * (1.0 - predicted) / static_cast<double>(windows));
                json row;
                row["cutoff"] = c;
                row["observed"] = observed;
                row["predicted"] = predicted;
                row["sigma"] = sigma;
                row["tail"] = upper ? "upper" : "lower";
                row["within_3sigma"] = std::abs(observed - predicted) <= 3.0 * sigma;
                scan.push_back(row);
            };
            for (std::uint32_t c = 8; c <= 32; c += 4) add_row(c, false);
            for (std::uint32_t c = 36; c <= 60; c += 4) add_row(c, true);
            add_row(apt_cfg.cutoff_hi, true);
            rec["scan"] = scan;
        }
        try {
            const rs::AptEntropy est =
                rs::entropy_from_apt(apt_coll.failures(), windows, apt_cfg);
            rec["confidence"] = est.estimate.confidence;
            rec["degenerate"] = est.degenerate;
            rec["h_measured"] = est.estimate.h_measured;
            rec["h_sigma"] = est.estimate.sigma_h;
            rec["h_lower_bound"] = est.estimate.h_lower_bound;
            rec["p_hat"] = est.p_hat;
        } catch (const std::exception& e) {
            rec["error"] = e.what();
            std::cerr << "analyze apt: " << e.what() << '\n';
        }
        report.record(rec);
    }
    return 0;
}

// --------------------------------------------------------------- tables --

struct TablesOptions {
    IoOptions io;
    std::vector<double> k_list{1.0, 3.0, 5.0, 7.0};
    std::vector<double> h_list{2.0, 4.0};
    std::vector<double> alpha_list{0x1p-20, 0x1p-40};
    unsigned symbol_bits = 4;
    std::uint32_t window = 512;
    double alpha = 0x1p-20;
};

int run_tables(const TablesOptions& opt) {
    const std::uint64_t m = std::uint64_t{1} << opt.symbol_bits;
    json params;
    params["alpha"] = opt.alpha;
    params["alpha_list"] = opt.alpha_list;
    params["h_list"] = opt.h_list;
    params["k_list"] = opt.k_list;
    params["symbol_bits"] = opt.symbol_bits;
    params["window"] = opt.window;
    const json manifest = make_manifest("tables", params, opt.io, resolve_seed(opt.io));

    Report report(opt.io.out);
    const bool csv = opt.io.format == "csv";
    if (csv) report.line("# manifest " + manifest.dump());
    else report.record(manifest);

    if (csv) report.line("k,two_tail_probability,expected_isn");
    for (double k : opt.k_list) {
        const double p = rs::gauss_two_tail(k);
        const double isn = 1.0 / p;
        if (csv) {
            report.line(fmt_double(k) + "," + fmt_double(p) + "," + fmt_double(isn));
        } else {
            json rec;
            rec["expected_isn"] = isn;
            rec["k"] = k;
            rec["run"] = manifest["run"];
            rec["two_tail_probability"] = p;
            rec["type"] = "gauss_isn";
            report.record(rec);
        }
    }

    if (csv) report.line("\nmin_entropy,alpha,cutoff");
    for (double h : opt.h_list) {
        for (double a : opt.alpha_list) {
            const std::uint32_t c = rs::rct_cutoff(m, h, a);
            if (csv) {
                report.line(fmt_double(h) + "," + fmt_double(a) + "," + std::to_string(c));
            } else {
                json rec;
                rec["alpha"] = a;
                rec["cutoff"] = c;
                rec["m"] = m;
                rec["min_entropy"] = h;
                rec["run"] = manifest["run"];
                rec["type"] = "rct_cutoff";
                report.record(rec);
            }
        }
    }

    const rs::AptCutoffs cut = rs::apt_cutoffs(m, opt.window, opt.alpha);
    if (csv) {
        report.line("\nm,window,alpha,cutoff_lo,cutoff_hi");
        report.line(std::to_string(m) + "," + std::to_string(opt.window) + "," +
                    fmt_double(opt.alpha) + "," + std::to_string(cut.lower) + "," +
                    std::to_string(cut.upper));
    } else {
        json rec;
        rec["alpha"] = opt.alpha;
        rec["cutoff_hi"] = cut.upper;
        rec["cutoff_lo"] = cut.lower;
        rec["m"] = m;
        rec["run"] = manifest["run"];
        rec["type"] = "apt_cutoffs";
        rec["window"] = opt.window;
        report.record(rec);
    }
    return 0;
}

// ---------------------------------------------------------- sensitivity --

struct SensitivityOptions {
    IoOptions io;
    std::uint64_t n = 32;
    std::uint64_t series_length = 32;
    double k = 3.0;
    std::string j_list = "0-10";
    std::string f_list = "1,10,100";
    std::uint64_t trials = 10000;
    std::string inject;  // single j,f point override
};

int run_sensitivity(const SensitivityOptions& opt) {
    if (opt.trials < 2) throw std::runtime_error("--trials must be >= 2");
    const std::uint64_t seed = resolve_seed(opt.io);
    std::vector<std::uint64_t> js, fs;
    if (!opt.inject.empty()) {
        const auto bias = parse_inject(opt.inject, opt.n);
        js = {bias->forced_ones};
        fs = {bias->period};
    } else {
        js = parse_u64_list(opt.j_list, "--j-list");
        fs = parse_u64_list(opt.f_list, "--f-list");
    }
    for (std::uint64_t j : js)
        if (j > opt.n) throw std::runtime_error("--j-list: j exceeds sequence length n");

    json params;
    params["f_list"] = fs;
    params["j_list"] = js;
    params["k"] = opt.k;
    params["n"] = opt.n;
    params["series_length"] = opt.series_length;
    params["trials"] = opt.trials;
    const json manifest = make_manifest("sensitivity", params, opt.io, seed);

    Report report(opt.io.out);
    const bool csv = opt.io.format != "jsonl";
    if (csv) {
        report.line("# manifest " + manifest.dump());
        report.line("n,N,j,f,k,trials,tpp,fpp,pull_shift,pull_tail");
    } else {
        report.record(manifest);
    }

    for (std::uint64_t j : js) {
        for (std::uint64_t f : fs) {
            const std::uint64_t point_seed =
                rs::detail::splitmix64(rs::detail::splitmix64(seed ^ j) ^ f);
            const rs::PowerPoint p =
                rs::pull_comparison(opt.n, opt.series_length, j, f, opt.k, opt.trials,
                                    point_seed);
            if (csv) {
                report.line(std::to_string(p.n_bits) + "," + std::to_string(p.series_length) +
                            "," + std::to_string(p.forced_ones) + "," + std::to_string(p.period) +
                            "," + fmt_double(p.k) + "," + std::to_string(p.trials) + "," +
                            fmt_double(p.tpp) + "," + fmt_double(p.fpp) + "," +
                            fmt_double(p.pull_shift) + "," + fmt_double(p.pull_tail));
            } else {
                json rec;
                rec["f"] = p.period;
                rec["fpp"] = p.fpp;
                rec["j"] = p.forced_ones;
                rec["k"] = p.k;
                rec["n"] = p.n_bits;
                rec["pull_shift"] = p.pull_shift;
                rec["pull_tail"] = p.pull_tail;
                rec["run"] = manifest["run"];
                rec["series_length"] = p.series_length;
                rec["tpp"] = p.tpp;
                rec["trials"] = p.trials;
                rec["type"] = "power";
                report.record(rec);
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rngsentinel: streaming qualification of random bit streams"};
    app.require_subcommand(1);

    MonitorOptions mon;
    CLI::App* monitor = app.add_subcommand("monitor", "on-line series monitoring with alarms");
    add_stream_options(monitor, mon.io);
    add_report_options(monitor, mon.io, "jsonl");
    monitor->add_option("--n", mon.n, "bits per sequence")->capture_default_str();
    monitor->add_option("--N", mon.series_length, "sequences per series")->capture_default_str();
    monitor->add_option("--k", mon.k, "warning threshold in sigma units")->capture_default_str();
    monitor->add_option("--consecutive", mon.consecutive, "consecutive warnings that raise an alarm")
        ->capture_default_str();
    monitor->add_option("--tests", mon.tests, "comma list: monobit,runs")->capture_default_str();
    monitor->add_option("--inject", mon.inject, "force j ones in every f-th sequence (j,f)");

    AnalyzeOptions ana;
    CLI::App* analyze =
        app.add_subcommand("analyze", "retrospective inter-failure and entropy analysis");
    add_stream_options(analyze, ana.io);
    add_report_options(analyze, ana.io, "jsonl");
    analyze->add_option("--tests", ana.tests, "comma list: monobit,runs,rct,apt")
        ->capture_default_str();
    analyze->add_option("--n", ana.n, "bits per sequence")->capture_default_str();
    analyze->add_option("--N", ana.series_length, "sequences per series")->capture_default_str();
    analyze->add_option("--k", ana.k, "series warning threshold in sigma units")
        ->capture_default_str();
    analyze->add_option("--symbol-bits", ana.symbol_bits, "bits per symbol")->capture_default_str();
    analyze->add_option("--window", ana.window, "window length in symbols")->capture_default_str();
    analyze->add_option("--alpha", ana.alpha, "per-test failure probability")
        ->capture_default_str();
    analyze->add_option("--cutoff", ana.cutoff, "repetition cutoff override");
    analyze->add_option("--target-entropy", ana.target_entropy,
                        "per-symbol min-entropy for expectations (default: symbol bits)");
    analyze->add_option("--inject", ana.inject, "force j ones in every f-th sequence (j,f)");

    TablesOptions tab;
    CLI::App* tables = app.add_subcommand("tables", "reference thresholds and expected gaps");
    add_report_options(tables, tab.io, "jsonl");
    tables->add_option("--k-list", tab.k_list, "sigma thresholds for the expected-gap table")
        ->delimiter(',');
    tables->add_option("--h-list", tab.h_list, "min-entropy values for the cutoff table")
        ->delimiter(',');
    tables->add_option("--alpha-list", tab.alpha_list, "failure probabilities for the cutoff table")
        ->delimiter(',');
    tables->add_option("--symbol-bits", tab.symbol_bits, "bits per symbol")->capture_default_str();
    tables->add_option("--window", tab.window, "window length in symbols")->capture_default_str();
    tables->add_option("--alpha", tab.alpha, "failure probability for the window cutoffs")
        ->capture_default_str();
    tables->add_option("--seed", tab.io.seed, "recorded in the manifest only");

    SensitivityOptions sens;
    CLI::App* sensitivity =
        app.add_subcommand("sensitivity", "tamper-detection power curves");
    add_report_options(sensitivity, sens.io, "csv");
    sensitivity->add_option("--seed", sens.io.seed,
                            "Monte Carlo seed (fallback: RNGSENTINEL_SEED)");
    sensitivity->add_option("--n", sens.n, "bits per sequence")->capture_default_str();
    sensitivity->add_option("--N", sens.series_length, "sequences per series")
        ->capture_default_str();
    sensitivity->add_option("--k", sens.k, "failure threshold in sigma units")
        ->capture_default_str();
    sensitivity->add_option("--j-list", sens.j_list, "forced-ones sweep (comma list, a-b ranges)")
        ->capture_default_str();
    sensitivity->add_option("--f-list", sens.f_list, "tamper periods (comma list, a-b ranges)")
        ->capture_default_str();
    sensitivity->add_option("--trials", sens.trials, "Monte Carlo trials per point")
        ->capture_default_str();
    sensitivity->add_option("--inject", sens.inject, "single j,f point instead of the sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (monitor->parsed()) return run_monitor(mon);
        if (analyze->parsed()) return run_analyze(ana);
        if (tables->parsed()) return run_tables(tab);
        if (sensitivity->parsed()) return run_sensitivity(sens);
    } catch (const std::exception& e) {
        std::cerr << "rngsentinel: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
