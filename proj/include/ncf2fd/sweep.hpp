#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncf2fd/optimizer.hpp"
#include "ncf2fd/simulator.hpp"

// Command-line front end: configuration parsing, (SNR, N_r) sweep
// orchestration and CSV/JSON emission of analytic, optimized and simulated
// results.

namespace ncf2fd {

enum class Mode { analyze, optimize, simulate, sweep };

struct SweepSpec {
    Mode mode = Mode::analyze;
    std::vector<double> snr_db_list{30.0};
    std::vector<int> n_r_list{4};
    SystemParams base; // snr_db / n_r replaced per sweep point
    DescentConfig descent;
    GridResolutions grid;
    SimConfig sim;
    bool run_algorithm = true;
    bool run_exhaustive = false;
    bool exact_thresholds = false;
    // fixed constellation for analyze mode (and simulate when given explicitly)
    double fixed_alpha = 0.5;
    double fixed_eta1 = 0.1;
    double fixed_eta2 = 1.5;
    bool fixed_explicit = false;
    std::string out_path = "-";
    enum class Format { csv, json } format = Format::csv;
    int threads = 0;
};

struct ResultRow {
    double snr_db = 0;
    int n_r = 0;
    std::optional<double> alpha, eta1, eta2, eps1, eps2;
    std::optional<double> pe_star, pe_exact;
    std::optional<double> ser_mc, alice_ber, charlie_ber, fab_power;
    std::optional<double> wall_time_s;
    std::string method;
    std::optional<std::uint64_t> seed;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct HelpRequested : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses argv-style arguments (without argv[0]) plus an optional `key = value`
// config file (--config); command-line flags win over file values.  Throws
// UsageError listing every violated constraint, HelpRequested for --help.
SweepSpec parse_config(const std::vector<std::string>& args);

// One row per (snr, n_r, method); per-point failures are recorded with an
// `:error` method suffix instead of aborting.  Rows come back sorted by
// (snr_db, n_r, method).
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

// Header line, then `# key = value` metadata when a spec is supplied, then
// one row per line with 17-significant-digit numbers and NA for absent values.
void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os,
              const SweepSpec* meta = nullptr);
void emit_json(const std::vector<ResultRow>& rows, std::ostream& os);

// Inverse of emit_csv (metadata lines are skipped).
std::vector<ResultRow> parse_csv(std::istream& is);

extern const char* const kCsvHeader;

} // namespace ncf2fd
