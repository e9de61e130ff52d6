#include "ncf2fd/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

namespace ncf2fd {

const char* const kCsvHeader =
    "snr_db,n_r,alpha,eta1,eta2,eps1,eps2,pe_star,pe_exact,ser_mc,alice_ber,"
    "charlie_ber,fab_power,wall_time_s,method,seed";

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string cell(const std::optional<double>& v) {
    return v ? fmt_double(*v) : "NA";
}

std::string cell(const std::optional<std::uint64_t>& v) {
    return v ? std::to_string(*v) : "NA";
}

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::analyze: return "analyze";
        case Mode::optimize: return "optimize";
        case Mode::simulate: return "simulate";
        case Mode::sweep: return "sweep";
    }
    return "?";
}

std::string list_to_string(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i)
        s += (i ? "," : "") + fmt_double(xs[i]);
    return s;
}

std::string list_to_string(const std::vector<int>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
    return s;
}

struct Task {
    double snr_db = 0;
    int n_r = 0;
    enum class Kind { fixed_analytic, optimize_algorithm, optimize_exhaustive,
                      simulate_fixed, simulate_optimized, baseline } kind;
    std::uint64_t run_index = 0; // deterministic seed derivation slot
};

ResultRow fill_constellation(ResultRow row, const Constellation& c) {
    row.alpha = c.alpha;
    row.eta1 = c.eta1;
    row.eta2 = c.eta2;
    row.eps1 = c.eps1;
    row.eps2 = c.eps2;
    return row;
}

ResultRow run_task(const SweepSpec& spec, const Task& task, int inner_threads) {
    SystemParams params = spec.base;
    params.snr_db = task.snr_db;
    params.n_r = task.n_r;
    const ThresholdMode mode =
        spec.exact_thresholds ? ThresholdMode::exact : ThresholdMode::approximate;

    ResultRow row;
    row.snr_db = task.snr_db;
    row.n_r = task.n_r;

    auto analytic = [&](const Constellation& c) {
        const auto eb = error_breakdown(params, c, mode);
        row = fill_constellation(std::move(row), c);
        row.pe_star = eb.pe_star;
        row.pe_exact = eb.pe;
    };
    auto simulate_on = [&](const Constellation& c) {
        SimConfig sim = spec.sim;
        sim.seed = substream_seed(spec.sim.seed, task.run_index);
        sim.exact_thresholds = spec.exact_thresholds;
        sim.threads = inner_threads;
        const auto r = simulate_ncf2fd(params, c, sim);
        row.ser_mc = r.joint_ser;
        row.alice_ber = r.alice_ber;
        row.charlie_ber = r.charlie_ber;
        row.fab_power = r.fab_mean_power;
        row.seed = sim.seed;
    };

    switch (task.kind) {
        case Task::Kind::fixed_analytic: {
            row.method = "fixed";
            analytic(complete_constellation(spec.fixed_alpha, spec.fixed_eta1,
                                            spec.fixed_eta2));
            break;
        }
        case Task::Kind::optimize_algorithm: {
            row.method = "algorithm";
            DescentConfig cfg = spec.descent;
            cfg.thresholds = mode;
            const auto r = greedy_descent(params, cfg);
            analytic(r.constellation);
            row.wall_time_s = r.wall_time_s;
            break;
        }
        case Task::Kind::optimize_exhaustive: {
            row.method = "exhaustive";
            GridResolutions res = spec.grid;
            res.thresholds = mode;
            res.threads = inner_threads;
            const auto r = exhaustive_search(params, res);
            analytic(r.constellation);
            row.wall_time_s = r.wall_time_s;
            break;
        }
        case Task::Kind::simulate_fixed: {
            row.method = "fixed";
            const auto c = complete_constellation(spec.fixed_alpha, spec.fixed_eta1,
                                                  spec.fixed_eta2);
            analytic(c);
            simulate_on(c);
            break;
        }
        case Task::Kind::simulate_optimized: {
            row.method = "algorithm";
            DescentConfig cfg = spec.descent;
            cfg.thresholds = mode;
            const auto r = greedy_descent(params, cfg);
            analytic(r.constellation);
            row.wall_time_s = r.wall_time_s;
            simulate_on(r.constellation);
            break;
        }
        case Task::Kind::baseline: {
            row.method = "baseline";
            SimConfig sim = spec.sim;
            sim.seed = substream_seed(spec.sim.seed, task.run_index);
            sim.threads = inner_threads;
            const auto r = simulate_jammed_baseline(params, sim);
            row.alice_ber = r.alice_ber;
            row.seed = sim.seed;
            break;
        }
    }
    return row;
}

} // namespace

SweepSpec parse_config(const std::vector<std::string>& args) {
    CLI::App app{"NC-F2FD constellation designer and link simulator"};
    app.set_config("--config", "", "configuration file (key = value lines)");
    app.fallthrough();

    SweepSpec spec;
    std::string mode_str;
    std::string format_str = "csv";
    std::string method_str = "algorithm";

    app.add_option("--mode", mode_str, "analyze | optimize | simulate | sweep");
    app.add_option("--snr", spec.snr_db_list, "SNR grid in dB");
    app.add_option("--nr", spec.n_r_list, "receive antenna counts");
    app.add_option("--sigma-ac2", spec.base.sigma_ac2, "Alice->Charlie link variance");
    app.add_option("--lambda-sic", spec.base.lambda_sic, "residual SIC factor");
    app.add_option("--trials", spec.sim.trials, "Monte Carlo symbols per point");
    app.add_option("--seed", spec.sim.seed, "base RNG seed");
    app.add_option("--jam-power", spec.sim.jam_power, "baseline jamming power on f_AB");
    app.add_option("--delta-pe", spec.descent.delta_pe, "descent P_e* tolerance");
    app.add_option("--delta-eta1", spec.descent.delta_eta1, "outer-loop eta1 step");
    app.add_option("--eta2-init", spec.descent.eta2_init, "descent eta2 start");
    app.add_option("--alpha-init", spec.descent.alpha_init, "descent alpha start");
    app.add_option("--nr-tolerance", spec.descent.nr_tolerance,
                   "root-finder bracket tolerance");
    app.add_option("--grid-alpha", spec.grid.alpha_step, "exhaustive alpha step");
    auto* grid_eta = app.add_option("--grid-eta", "exhaustive eta1/eta2 step");
    app.add_option("--max-grid-points", spec.grid.max_points, "exhaustive size cap");
    app.add_flag("--exact-thresholds", spec.exact_thresholds,
                 "retain the ln(P11/P00) term in rho1/rho3");
    auto* opt_alpha = app.add_option("--alpha", spec.fixed_alpha, "fixed constellation alpha");
    auto* opt_eta1 = app.add_option("--eta1", spec.fixed_eta1, "fixed constellation eta1");
    auto* opt_eta2 = app.add_option("--eta2", spec.fixed_eta2, "fixed constellation eta2");
    app.add_option("--method", method_str, "algorithm | exhaustive | both");
    app.add_option("--out", spec.out_path, "output path, '-' for stdout");
    app.add_option("--format", format_str, "csv | json");
    app.add_option("--threads", spec.threads, "worker threads, 0 = hardware");

    // subcommand form: `ncf2fd optimize --snr 35`
    for (const char* m : {"analyze", "optimize", "simulate", "sweep"}) {
        auto* sub = app.add_subcommand(m, std::string("run in ") + m + " mode");
        sub->fallthrough();
        sub->callback([&mode_str, m] {
            if (!mode_str.empty() && mode_str != m)
                throw UsageError("conflicting --mode and subcommand");
            mode_str = m;
        });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (grid_eta->count()) {
        const double step = grid_eta->as<double>();
        spec.grid.eta1_step = step;
        spec.grid.eta2_step = step;
    }
    spec.fixed_explicit = opt_alpha->count() || opt_eta1->count() || opt_eta2->count();

    std::ostringstream bad;
    if (mode_str == "analyze") spec.mode = Mode::analyze;
    else if (mode_str == "optimize") spec.mode = Mode::optimize;
    else if (mode_str == "simulate") spec.mode = Mode::simulate;
    else if (mode_str == "sweep") spec.mode = Mode::sweep;
    else bad << "mode must be one of analyze|optimize|simulate|sweep; ";

    if (format_str == "csv") spec.format = SweepSpec::Format::csv;
    else if (format_str == "json") spec.format = SweepSpec::Format::json;
    else bad << "format must be csv or json; ";

    if (method_str == "algorithm") { spec.run_algorithm = true; spec.run_exhaustive = false; }
    else if (method_str == "exhaustive") { spec.run_algorithm = false; spec.run_exhaustive = true; }
    else if (method_str == "both") { spec.run_algorithm = true; spec.run_exhaustive = true; }
    else bad << "method must be algorithm|exhaustive|both; ";

    if (spec.snr_db_list.empty()) bad << "--snr list must not be empty; ";
    if (spec.n_r_list.empty()) bad << "--nr list must not be empty; ";
    for (int nr : spec.n_r_list)
        if (nr < 1) { bad << "--nr values must be >= 1; "; break; }
    for (double s : spec.snr_db_list)
        if (!std::isfinite(s)) { bad << "--snr values must be finite; "; break; }
    if (!(spec.base.lambda_sic > 0)) bad << "--lambda-sic must be > 0; ";
    if (!(spec.base.sigma_ac2 > spec.base.sigma_cb2))
        bad << "--sigma-ac2 must exceed 1 (helper vicinity); ";
    if (spec.sim.trials < 1) bad << "--trials must be >= 1; ";
    if (!(spec.sim.jam_power >= 0)) bad << "--jam-power must be >= 0; ";
    if (!(spec.descent.delta_pe > 0)) bad << "--delta-pe must be > 0; ";
    if (!(spec.descent.delta_eta1 > 0)) bad << "--delta-eta1 must be > 0; ";
    if (!(spec.descent.nr_tolerance > 0)) bad << "--nr-tolerance must be > 0; ";
    if (!(spec.descent.alpha_init > 0 && spec.descent.alpha_init < 1))
        bad << "--alpha-init must lie in (0,1); ";
    if (!(spec.descent.eta2_init > 0)) bad << "--eta2-init must be > 0; ";
    if (!(spec.grid.alpha_step > 0 && spec.grid.alpha_step < 1))
        bad << "--grid-alpha must lie in (0,1); ";
    if (!(spec.grid.eta1_step > 0)) bad << "--grid-eta must be > 0; ";
    if (spec.threads < 0) bad << "--threads must be >= 0; ";
    if (spec.out_path.empty()) bad << "--out must not be empty; ";
    if (spec.fixed_explicit || spec.mode == Mode::analyze) {
        if (!(spec.fixed_alpha > 0 && spec.fixed_alpha < 1))
            bad << "--alpha must lie in (0,1); ";
        else if (!(spec.fixed_eta1 >= 0 && spec.fixed_eta1 < 1))
            bad << "--eta1 must lie in [0,1); ";
        else if (!(spec.fixed_eta2 > spec.fixed_eta1 &&
                   spec.fixed_eta2 <
                       0.5 * (3.0 + 1.0 / spec.fixed_alpha - spec.fixed_eta1)))
            bad << "--eta2 must lie in (eta1, 0.5*(3 + 1/alpha - eta1)); ";
    }
    if (!bad.str().empty()) throw UsageError("invalid configuration: " + bad.str());
    return spec;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
    std::vector<Task> tasks;
    std::uint64_t run_index = 0;
    for (double snr : spec.snr_db_list) {
        for (int nr : spec.n_r_list) {
            switch (spec.mode) {
                case Mode::analyze:
                    tasks.push_back({snr, nr, Task::Kind::fixed_analytic, run_index++});
                    break;
                case Mode::optimize:
                    if (spec.run_algorithm)
                        tasks.push_back({snr, nr, Task::Kind::optimize_algorithm, run_index++});
                    if (spec.run_exhaustive)
                        tasks.push_back({snr, nr, Task::Kind::optimize_exhaustive, run_index++});
                    break;
                case Mode::simulate:
                    tasks.push_back({snr, nr,
                                     spec.fixed_explicit ? Task::Kind::simulate_fixed
                                                         : Task::Kind::simulate_optimized,
                                     run_index++});
                    tasks.push_back({snr, nr, Task::Kind::baseline, run_index++});
                    break;
                case Mode::sweep:
                    if (spec.run_algorithm)
                        tasks.push_back({snr, nr, Task::Kind::simulate_optimized, run_index++});
                    if (spec.run_exhaustive)
                        tasks.push_back({snr, nr, Task::Kind::optimize_exhaustive, run_index++});
                    tasks.push_back({snr, nr, Task::Kind::baseline, run_index++});
                    break;
            }
        }
    }

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned workers = std::min<std::size_t>(
        spec.threads > 0 ? unsigned(spec.threads) : hw, std::max<std::size_t>(tasks.size(), 1));
    const int inner_threads = (tasks.size() > 1 && workers > 1) ? 1 : spec.threads;

    std::vector<ResultRow> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            try {
                rows[i] = run_task(spec, tasks[i], inner_threads);
            } catch (const std::exception& e) {
                ResultRow row;
                row.snr_db = tasks[i].snr_db;
                row.n_r = tasks[i].n_r;
                switch (tasks[i].kind) {
                    case Task::Kind::fixed_analytic:
                    case Task::Kind::simulate_fixed: row.method = "fixed"; break;
                    case Task::Kind::optimize_algorithm:
                    case Task::Kind::simulate_optimized: row.method = "algorithm"; break;
                    case Task::Kind::optimize_exhaustive: row.method = "exhaustive"; break;
                    case Task::Kind::baseline: row.method = "baseline"; break;
                }
                row.method += ":error";
                std::fprintf(stderr, "point (snr=%g, nr=%d, %s) failed: %s\n",
                             tasks[i].snr_db, tasks[i].n_r, row.method.c_str(), e.what());
                rows[i] = std::move(row);
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
        if (a.n_r != b.n_r) return a.n_r < b.n_r;
        return a.method < b.method;
    });
    return rows;
}

namespace {

void emit_metadata(const SweepSpec& spec, std::ostream& os) {
    os << "# mode = " << mode_name(spec.mode) << "\n";
    os << "# snr = " << list_to_string(spec.snr_db_list) << "\n";
    os << "# nr = " << list_to_string(spec.n_r_list) << "\n";
    os << "# sigma-ac2 = " << fmt_double(spec.base.sigma_ac2) << "\n";
    os << "# lambda-sic = " << fmt_double(spec.base.lambda_sic) << "\n";
    os << "# trials = " << spec.sim.trials << "\n";
    os << "# seed = " << spec.sim.seed << "\n";
    os << "# jam-power = " << fmt_double(spec.sim.jam_power) << "\n";
    os << "# delta-pe = " << fmt_double(spec.descent.delta_pe) << "\n";
    os << "# delta-eta1 = " << fmt_double(spec.descent.delta_eta1) << "\n";
    os << "# eta2-init = " << fmt_double(spec.descent.eta2_init) << "\n";
    os << "# alpha-init = " << fmt_double(spec.descent.alpha_init) << "\n";
    os << "# nr-tolerance = " << fmt_double(spec.descent.nr_tolerance) << "\n";
    os << "# grid-alpha = " << fmt_double(spec.grid.alpha_step) << "\n";
    os << "# grid-eta = " << fmt_double(spec.grid.eta2_step) << "\n";
    os << "# exact-thresholds = " << (spec.exact_thresholds ? 1 : 0) << "\n";
    os << "# method = "
       << (spec.run_algorithm && spec.run_exhaustive
               ? "both"
               : (spec.run_exhaustive ? "exhaustive" : "algorithm"))
       << "\n";
    os << "# alpha = " << fmt_double(spec.fixed_alpha) << "\n";
    os << "# eta1 = " << fmt_double(spec.fixed_eta1) << "\n";
    os << "# eta2 = " << fmt_double(spec.fixed_eta2) << "\n";
}

} // namespace

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os, const SweepSpec* meta) {
    os << kCsvHeader << "\n";
    if (meta) emit_metadata(*meta, os);
    for (const auto& r : rows) {
        os << fmt_double(r.snr_db) << ',' << r.n_r << ',' << cell(r.alpha) << ','
           << cell(r.eta1) << ',' << cell(r.eta2) << ',' << cell(r.eps1) << ','
           << cell(r.eps2) << ',' << cell(r.pe_star) << ',' << cell(r.pe_exact) << ','
           << cell(r.ser_mc) << ',' << cell(r.alice_ber) << ',' << cell(r.charlie_ber)
           << ',' << cell(r.fab_power) << ',' << cell(r.wall_time_s) << ',' << r.method
           << ',' << cell(r.seed) << "\n";
    }
}

void emit_json(const std::vector<ResultRow>& rows, std::ostream& os) {
    using json = nlohmann::ordered_json;
    json arr = json::array();
    auto put = [](json& o, const char* key, const std::optional<double>& v) {
        if (v) o[key] = *v; else o[key] = nullptr;
    };
    for (const auto& r : rows) {
        json o;
        o["snr_db"] = r.snr_db;
        o["n_r"] = r.n_r;
        put(o, "alpha", r.alpha);
        put(o, "eta1", r.eta1);
        put(o, "eta2", r.eta2);
        put(o, "eps1", r.eps1);
        put(o, "eps2", r.eps2);
        put(o, "pe_star", r.pe_star);
        put(o, "pe_exact", r.pe_exact);
        put(o, "ser_mc", r.ser_mc);
        put(o, "alice_ber", r.alice_ber);
        put(o, "charlie_ber", r.charlie_ber);
        put(o, "fab_power", r.fab_power);
        put(o, "wall_time_s", r.wall_time_s);
        o["method"] = r.method;
        if (r.seed) o["seed"] = *r.seed; else o["seed"] = nullptr;
        arr.push_back(std::move(o));
    }
    os << arr.dump(2) << "\n";
}

std::vector<ResultRow> parse_csv(std::istream& is) {
    std::vector<ResultRow> rows;
    std::string line;
    bool header_seen = false;
    auto opt_double = [](const std::string& s) -> std::optional<double> {
        if (s == "NA") return std::nullopt;
        return std::stod(s);
    };
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kCsvHeader)
                throw std::runtime_error("parse_csv: unexpected header: " + line);
            header_seen = true;
            continue;
        }
        std::vector<std::string> f;
        std::string tok;
        std::istringstream ls(line);
        while (std::getline(ls, tok, ',')) f.push_back(tok);
        if (f.size() != 16)
            throw std::runtime_error("parse_csv: expected 16 fields, got " +
                                     std::to_string(f.size()));
        ResultRow r;
        r.snr_db = std::stod(f[0]);
        r.n_r = std::stoi(f[1]);
        r.alpha = opt_double(f[2]);
        r.eta1 = opt_double(f[3]);
        r.eta2 = opt_double(f[4]);
        r.eps1 = opt_double(f[5]);
        r.eps2 = opt_double(f[6]);
        r.pe_star = opt_double(f[7]);
        r.pe_exact = opt_double(f[8]);
        r.ser_mc = opt_double(f[9]);
        r.alice_ber = opt_double(f[10]);
        r.charlie_ber = opt_double(f[11]);
        r.fab_power = opt_double(f[12]);
        r.wall_time_s = opt_double(f[13]);
        r.method = f[14];
        if (f[15] != "NA") r.seed = std::stoull(f[15]);
        rows.push_back(std::move(r));
    }
    if (!header_seen) throw std::runtime_error("parse_csv: missing header");
    return rows;
}

} // namespace ncf2fd
