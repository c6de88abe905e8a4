#pragma once

// Shared between the Catch2 suite and the acceptance harness.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace testutil {

// mkstemp-backed scratch file path.
inline std::string temp_path() {
    std::string tmpl = "/tmp/rngsentinel-test-XXXXXX";
    const int fd = ::mkstemp(tmpl.data());
    if (fd == -1) throw std::runtime_error("temp_path: mkstemp failed");
    ::close(fd);
    return tmpl;
}

// Rounds x to `digits` significant figures, mirroring how printed tables are
// quoted (e.g. 5.7330e-7 -> 5.7e-7 at two figures). Round-trips through the
// decimal form so the result compares bit-exactly against literals like 1.7e6.
inline double round_sig(double x, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
    return std::strtod(buf, nullptr);
}

inline bool close_rel(double a, double b, double rel) {
    return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

struct CommandResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

// Runs a shell command, capturing combined output. Only used with paths the
// tests themselves construct.
inline CommandResult run_command(const std::string& cmd) {
    const std::string capture = temp_path();
    const std::string full = cmd + " > " + capture + " 2>&1";
    const int rc = std::system(full.c_str());
    CommandResult r;
    if (rc == -1)
        throw std::runtime_error("run_command: system() failed");
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream in(capture, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    std::remove(capture.c_str());
    return r;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_file: cannot open " + path);
    out << data;
}

} // namespace testutil
