#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "helpers.hpp"

using nlohmann::json;
using testutil::read_file;
using testutil::round_sig;
using testutil::run_command;
using testutil::temp_path;
using testutil::write_file;

namespace {

const std::string cli = RNGSENTINEL_CLI_PATH;

std::vector<json> parse_jsonl(const std::string& text) {
    std::vector<json> records;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty()) records.push_back(json::parse(line));
    return records;
}

std::vector<json> records_of_type(const std::vector<json>& recs, const std::string& type) {
    std::vector<json> out;
    for (const json& r : recs)
        if (r.at("type") == type) out.push_back(r);
    return out;
}

std::string random_bytes(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::string bytes(count, '\0');
    for (std::size_t i = 0; i < count; ++i)
        bytes[i] = static_cast<char>(rng() & 0xff);
    return bytes;
}

struct TempFile {
    std::string path = temp_path();
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("tables reproduces the reference thresholds", "[cli]") {
    const auto res = run_command(cli + " tables");
    REQUIRE(res.exit_code == 0);
    const auto recs = parse_jsonl(res.output);
    REQUIRE(recs.front().at("type") == "manifest");
    const std::string run = recs.front().at("run");
    REQUIRE(run.size() == 16);

    const auto gauss = records_of_type(recs, "gauss_isn");
    REQUIRE(gauss.size() == 4);
    const auto row = [&](double k) {
        for (const json& g : gauss)
            if (g.at("k") == k) return g;
        FAIL("missing k row");
        return json{};
    };
    CHECK(round_sig(row(1).at("two_tail_probability"), 3) == 0.317);
    CHECK(round_sig(row(1).at("expected_isn"), 3) == 3.15);
    CHECK(round_sig(row(3).at("two_tail_probability"), 2) == 2.7e-3);
    CHECK(round_sig(row(3).at("expected_isn"), 4) == 370.4);
    CHECK(round_sig(row(5).at("two_tail_probability"), 2) == 5.7e-7);
    CHECK(round_sig(row(5).at("expected_isn"), 2) == 1.7e6);
    CHECK(round_sig(row(7).at("two_tail_probability"), 3) == 2.56e-12);
    CHECK(round_sig(row(7).at("expected_isn"), 2) == 3.9e11);

    const auto cuts = records_of_type(recs, "rct_cutoff");
    REQUIRE(cuts.size() == 4);
    for (const json& c : cuts) {
        const double h = c.at("min_entropy");
        const double a = c.at("alpha");
        const unsigned cutoff = c.at("cutoff");
        if (h == 2.0) CHECK(cutoff == (a > 1e-7 ? 12u : 22u));
        if (h == 4.0) CHECK(cutoff == (a > 1e-7 ? 6u : 11u));
    }

    const auto apt = records_of_type(recs, "apt_cutoffs");
    REQUIRE(apt.size() == 1);
    CHECK(apt[0].at("cutoff_lo") == 8);
    CHECK(apt[0].at("cutoff_hi") == 62);
    for (const json& r : recs)
        if (r.at("type") != "manifest") CHECK(r.at("run") == run);
}

TEST_CASE("tables handles the degenerate threshold and csv output", "[cli]") {
    const auto res = run_command(cli + " tables --k-list 0");
    REQUIRE(res.exit_code == 0);
    const auto gauss = records_of_type(parse_jsonl(res.output), "gauss_isn");
    REQUIRE(gauss.size() == 1);
    CHECK(gauss[0].at("two_tail_probability") == 1.0);
    CHECK(gauss[0].at("expected_isn") == 1.0);

    const auto csv = run_command(cli + " tables --format csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.output.find("# manifest {") != std::string::npos);
    CHECK(csv.output.find("k,two_tail_probability,expected_isn") != std::string::npos);
    CHECK(csv.output.find("min_entropy,alpha,cutoff") != std::string::npos);
    CHECK(csv.output.find("16,512,") != std::string::npos);
}

TEST_CASE("monitor on an empty input exits clean with zero series", "[cli]") {
    TempFile in;
    write_file(in.path, "");
    const auto res = run_command(cli + " monitor --input " + in.path);
    REQUIRE(res.exit_code == 0);
    const auto recs = parse_jsonl(res.output);
    REQUIRE(recs.size() == 2); // manifest + summary
    const json& summary = recs.back();
    CHECK(summary.at("type") == "summary");
    CHECK(summary.at("series") == 0);
    CHECK(summary.at("sequences") == 0);
    CHECK(summary.at("verdict") == "healthy");
}

TEST_CASE("monitor emits one record per series per test", "[cli]") {
    const auto res =
        run_command(cli + " monitor --seed 11 --n 32 --N 256 --bits " +
                    std::to_string(32 * 256 * 4));
    REQUIRE(res.exit_code == 0);
    const auto recs = parse_jsonl(res.output);
    const auto series = records_of_type(recs, "series");
    REQUIRE(series.size() == 8); // 4 series x {monobit, runs}
    for (const json& s : series) {
        CHECK((s.at("test") == "monobit" || s.at("test") == "runs"));
        CHECK(s.at("sequences") == 256);
        if (s.at("test") == "monobit")
            CHECK_THAT(double(s.at("std_error")),
                       Catch::Matchers::WithinRel(std::sqrt(32.0 / 256.0), 1e-12));
        else
            CHECK(double(s.at("std_error")) <= 1.0 / std::sqrt(250.0));
    }
    const json& summary = recs.back();
    CHECK(summary.at("series") == 4);
    CHECK(summary.at("sequences") == 1024);
    CHECK(summary.at("bits") == 32 * 256 * 4);
}

TEST_CASE("monitor raises an alarm on a saturating bias", "[cli]") {
    const auto res = run_command(cli + " monitor --seed 5 --n 32 --N 128 --bits " +
                                 std::to_string(32 * 128 * 3) + " --inject 32,1");
    REQUIRE(res.exit_code == 2);
    const auto recs = parse_jsonl(res.output);
    const json& summary = recs.back();
    CHECK(summary.at("verdict") == "alarm");
    CHECK(summary.at("tests").at("monobit").at("alarms") == 1);
    const auto series = records_of_type(recs, "series");
    std::uint64_t mono_warnings = 0;
    for (const json& s : series)
        if (s.at("test") == "monobit" && s.at("warning").get<bool>()) ++mono_warnings;
    CHECK(mono_warnings == 3);
    // All-ones sequences carry no run statistic; the series is still flagged.
    for (const json& s : series)
        if (s.at("test") == "runs") {
            CHECK(s.at("degenerate") == 128);
            CHECK(s.at("warning").get<bool>());
        }
}

TEST_CASE("monitor verdicts and bytes are buffer-size independent", "[cli]") {
    TempFile in;
    write_file(in.path, random_bytes(8192, 99));
    std::vector<std::string> outputs;
    for (const std::string bufsize : {"1", "4096", "1048576"}) {
        TempFile out;
        const auto res = run_command(cli + " monitor --input " + in.path +
                                     " --n 32 --N 64 --buffer-size " + bufsize + " --out " +
                                     out.path);
        REQUIRE(res.exit_code == 0);
        outputs.push_back(read_file(out.path));
    }
    CHECK(outputs[0] == outputs[1]);
    CHECK(outputs[1] == outputs[2]);
    const auto recs = parse_jsonl(outputs[0]);
    CHECK(records_of_type(recs, "series").size() == 2 * 32); // 2048 sequences / 64
}

TEST_CASE("monitor reads stdin when input is dash", "[cli]") {
    TempFile in;
    write_file(in.path, random_bytes(4096, 7));
    const auto from_file =
        run_command(cli + " monitor --input " + in.path + " --n 32 --N 128");
    const auto from_stdin =
        run_command("cat " + in.path + " | " + cli + " monitor --input - --n 32 --N 128");
    REQUIRE(from_file.exit_code == 0);
    REQUIRE(from_stdin.exit_code == 0);
    const auto series_a = records_of_type(parse_jsonl(from_file.output), "series");
    const auto series_b = records_of_type(parse_jsonl(from_stdin.output), "series");
    REQUIRE(series_a.size() == series_b.size());
    for (std::size_t i = 0; i < series_a.size(); ++i)
        CHECK(series_a[i].at("mean") == series_b[i].at("mean"));
}

TEST_CASE("the environment seed matches an explicit seed flag", "[cli]") {
    const std::string args = " monitor --n 32 --N 64 --bits 16384";
    const auto flagged = run_command(cli + args + " --seed 123");
    const auto env = run_command("RNGSENTINEL_SEED=123 " + cli + args);
    const auto other = run_command(cli + args + " --seed 124");
    REQUIRE(flagged.exit_code == 0);
    REQUIRE(env.exit_code == 0);
    CHECK(flagged.output == env.output);
    CHECK(flagged.output != other.output);
}

TEST_CASE("analyze reports repetition-gap entropy on uniform symbols", "[cli]") {
    TempFile out;
    const auto res = run_command(cli + " analyze --tests rct --seed 21 --cutoff 3 --bits " +
                                 std::to_string(200000ull * 4) + " --out " + out.path);
    REQUIRE(res.exit_code == 0);
    const auto recs = parse_jsonl(read_file(out.path));
    const auto ent = records_of_type(recs, "entropy");
    REQUIRE(ent.size() == 1);
    const json& r = ent[0];
    CHECK(r.at("test") == "rct");
    CHECK(r.at("cutoff") == 3);
    CHECK(r.at("symbols") == 200000);
    CHECK(double(r.at("failures")) > 500);
    CHECK_THAT(double(r.at("expected_gap")), Catch::Matchers::WithinRel(4096.0 / 15.0, 1e-12));
    const double h = r.at("h_measured");
    const double sigma = r.at("h_sigma");
    CHECK(std::abs(h - 4.0) <= 4.0 * sigma);
    CHECK(double(r.at("h_lower_bound")) < h);
    CHECK(r.at("exponential_compatible").get<bool>());
    CHECK(r.at("geometric_compatible").get<bool>());
}

TEST_CASE("analyze names the minimum when failures are too few", "[cli]") {
    TempFile out;
    const auto res = run_command(cli + " analyze --tests rct --seed 3 --bits 40960 --out " +
                                 out.path);
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("at least 30") != std::string::npos); // stderr diagnostic
    const auto ent = records_of_type(parse_jsonl(read_file(out.path)), "entropy");
    REQUIRE(ent.size() == 1);
    const std::string err = ent[0].at("error");
    CHECK(err.find("at least 30") != std::string::npos);
    CHECK(ent[0].contains("failures"));
    CHECK_FALSE(ent[0].contains("h_measured"));
}

TEST_CASE("analyze tracks series-level warning gaps", "[cli]") {
    TempFile out;
    const std::uint64_t bits = 32ull * 64 * 512;
    const auto res = run_command(cli + " analyze --tests monobit,runs --seed 17 --n 32 --N 64" +
                                 " --k 1 --bits " + std::to_string(bits) + " --out " + out.path);
    REQUIRE(res.exit_code == 0);
    const auto recs = parse_jsonl(read_file(out.path));
    const auto isn = records_of_type(recs, "isn");
    REQUIRE(isn.size() == 2);
    for (const json& r : isn) {
        CHECK(r.at("series") == 512);
        const double expected = r.at("expected_fraction");
        CHECK(expected > 0.25);
        CHECK(expected < 0.40);
        REQUIRE_FALSE(r.contains("error"));
        const double p = r.at("geometric_p");
        const double se = r.at("geometric_stderr");
        CHECK(std::abs(p - expected) <= 4.0 * se);
    }
}

TEST_CASE("analyze scans window cutoffs against the binomial law", "[cli]") {
    TempFile out;
    const std::uint64_t windows = 4000;
    const auto res = run_command(cli + " analyze --tests apt --seed 29 --bits " +
                                 std::to_string(windows * 512 * 4) + " --out " + out.path);
    REQUIRE(res.exit_code == 0);
    const auto ent = records_of_type(parse_jsonl(read_file(out.path)), "entropy");
    REQUIRE(ent.size() == 1);
    const json& r = ent[0];
    CHECK(r.at("windows") == windows);
    CHECK(r.at("cutoff_lo") == 8);
    CHECK(r.at("cutoff_hi") == 62);
    REQUIRE(r.contains("scan"));
    const json& scan = r.at("scan");
    REQUIRE(scan.size() >= 12);
    for (const json& row : scan) CHECK(row.at("within_3sigma").get<bool>());
    // Far too few window failures at this scale for an entropy estimate.
    const std::string err = r.at("error");
    CHECK(err.find("at least 30") != std::string::npos);
}

TEST_CASE("sensitivity emits one curve row per sweep point", "[cli]") {
    const std::string args = " sensitivity --j-list 0-3 --f-list 1,10 --trials 50 --seed 4";
    const auto res = run_command(cli + args);
    REQUIRE(res.exit_code == 0);
    std::istringstream ss(res.output);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#') rows.push_back(line);
    REQUIRE(rows.size() == 1 + 4 * 2); // header + |j| * |f|
    CHECK(rows[0] == "n,N,j,f,k,trials,tpp,fpp,pull_shift,pull_tail");
    // j=0 rows: common random numbers make both pulls exactly zero.
    CHECK(rows[1].substr(rows[1].size() - 4) == ",0,0");
    const auto rerun = run_command(cli + args);
    CHECK(rerun.output == res.output);
}

TEST_CASE("sensitivity jsonl honours a single injection point", "[cli]") {
    const auto res =
        run_command(cli + " sensitivity --inject 5,100 --trials 100 --seed 8 --format jsonl");
    REQUIRE(res.exit_code == 0);
    const auto recs = parse_jsonl(res.output);
    const auto power = records_of_type(recs, "power");
    REQUIRE(power.size() == 1);
    CHECK(power[0].at("j") == 5);
    CHECK(power[0].at("f") == 100);
    CHECK(power[0].at("trials") == 100);
}

TEST_CASE("usage and i/o errors exit with status one", "[cli]") {
    CHECK(run_command(cli + " frobnicate").exit_code == 1);
    CHECK(run_command(cli + " monitor --tests monobit,apt --bits 64").exit_code == 1);
    CHECK(run_command(cli + " monitor --inject nonsense --bits 64").exit_code == 1);
    CHECK(run_command(cli + " monitor --input /nonexistent/stream.bin").exit_code == 1);
    CHECK(run_command(cli + " analyze --tests rct --symbol-bits 40 --bits 64").exit_code == 1);
    CHECK(run_command(cli + " --help").exit_code == 0);
    CHECK(run_command(cli + " monitor --help").exit_code == 0);
}
