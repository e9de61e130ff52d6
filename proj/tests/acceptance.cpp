// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Criteria run against the library defaults (sigma_ac2 = 10,
// lambda_sic = 1e-5) and print enough detail to audit each bound.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "ncf2fd/optimizer.hpp"
#include "ncf2fd/simulator.hpp"
#include "ncf2fd/specfun.hpp"
#include "ncf2fd/sweep.hpp"

using namespace ncf2fd;

namespace {

int g_failures = 0;

struct Criterion {
    std::string detail;
    bool ok = true;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

void report(int number, const std::string& name, const Criterion& c, double seconds) {
    std::printf("[%s] criterion %d: %s (%.2f s)%s%s\n", c.ok ? "PASS" : "FAIL", number,
                name.c_str(), seconds, c.detail.empty() ? "" : " -- ",
                c.detail.c_str());
    if (!c.ok) ++g_failures;
}

template <typename F>
void run(int number, const std::string& name, F&& body) {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(number, name, c, s);
}

SystemParams params_at(double snr_db, int n_r) {
    SystemParams p;
    p.snr_db = snr_db;
    p.n_r = n_r;
    return p;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---- criterion 1 helpers: independent 80-bit oracles ----

long double upper_oracle(int n, long double x) {
    long double term = std::exp(-x), sum = term;
    for (int k = 1; k < n; ++k) {
        term *= x / (long double)k;
        sum += term;
    }
    return sum;
}

long double lower_oracle(int n, long double x) {
    long double fact = 1.0L;
    for (int k = 2; k <= n; ++k) fact *= (long double)k;
    const long double prefix = std::pow(x, (long double)n) * std::exp(-x) / fact;
    long double sum = 0.0L, term = 1.0L;
    for (int m = 0; m < 20000; ++m) {
        sum += term;
        term *= x / (long double)(n + m + 1);
        if (term < sum * 1e-22L) break;
    }
    return prefix * sum;
}

void criterion1(Criterion& c) {
    using specfun::reg_lower_gamma;
    using specfun::reg_upper_gamma;
    constexpr int kGrid = 160;
    double worst_q = 0, worst_p = 0, worst_c = 0;
    for (int a = 1; a <= 64; ++a) {
        for (int i = 0; i < kGrid; ++i) {
            const double x = 1e-8 * std::pow(200.0 / 1e-8, double(i) / (kGrid - 1));
            const double q = reg_upper_gamma(a, x);
            const double p = reg_lower_gamma(a, x);
            const long double qr = upper_oracle(a, x);
            worst_q = std::max(worst_q, double(std::fabs((long double)q - qr) / qr));
            const long double pr = lower_oracle(a, x);
            if (pr >= 1e-300)
                worst_p = std::max(worst_p, double(std::fabs((long double)p - pr) / pr));
            else if (p != 0.0)
                c.require(false, "underflow clamp missed at a=" + std::to_string(a));
            worst_c = std::max(worst_c, std::fabs(p + q - 1.0));
        }
    }
    c.require(worst_q <= 1e-10, "upper rel err " + fmt(worst_q));
    c.require(worst_p <= 1e-10, "lower rel err " + fmt(worst_p));
    c.require(worst_c <= 1e-12, "complementarity " + fmt(worst_c));
    c.detail = "rel err upper " + fmt(worst_q) + ", lower " + fmt(worst_p) +
               ", |P+Q-1| " + fmt(worst_c) + (c.ok ? "" : "; " + c.detail);
}

void criterion2(Criterion& c) {
    for (double snr : {10.0, 20.0, 30.0, 40.0}) {
        const auto p = params_at(snr, 4);
        double p11 = 2, p00 = 2, p10 = -1, p01 = -1;
        for (int i = 1; i <= 99; ++i) {
            const double alpha = i / 100.0;
            const auto d = charlie_detection(p, alpha);
            c.require(d.p10 > d.p01, "P10 <= P01 at snr=" + fmt(snr) + " a=" + fmt(alpha));
            c.require(d.p00 > d.p01, "P00 <= P01 at snr=" + fmt(snr) + " a=" + fmt(alpha));
            if (alpha < d.nu)
                c.require(d.p10 < d.p11,
                          "P10 >= P11 below nu at snr=" + fmt(snr) + " a=" + fmt(alpha));
            c.require(d.p11 <= p11 && d.p00 <= p00 && d.p10 >= p10 && d.p01 >= p01,
                      "monotonicity break at snr=" + fmt(snr) + " a=" + fmt(alpha));
            p11 = d.p11;
            p00 = d.p00;
            p10 = d.p10;
            p01 = d.p01;
        }
    }
}

struct Terms {
    double p1, p21, p23, p32, p34, p4;
};

Terms terms_at(const SystemParams& p, double alpha, double eta1, double eta2) {
    const auto e = error_breakdown(p, complete_constellation(alpha, eta1, eta2));
    return {e.p1, e.p21, e.p23, e.p32, e.p34, e.p4};
}

void criterion3(Criterion& c) {
    for (int nr : {2, 4}) {
        const auto p = params_at(30.0, nr);

        // eta2 sweep, (eta1, alpha) fixed
        const double eta1 = 0.1, alpha = 0.5;
        const double bound = 0.5 * (3.0 + 1.0 / alpha - eta1);
        const double lo = eta1 + 0.01 * (bound - eta1);
        const double hi = bound - 0.01 * (bound - eta1);
        Terms prev = terms_at(p, alpha, eta1, lo);
        const Terms first = prev;
        for (int i = 1; i < 200; ++i) {
            const double eta2 = lo + (hi - lo) * i / 199.0;
            const Terms t = terms_at(p, alpha, eta1, eta2);
            c.require(std::fabs(t.p1 - first.p1) <= 1e-15, "P1 moved under eta2");
            c.require(std::fabs(t.p21 - first.p21) <= 1e-15, "P21 moved under eta2");
            c.require(t.p23 <= prev.p23, "P23 rose under eta2");
            c.require(t.p32 <= prev.p32, "P32 rose under eta2");
            c.require(t.p34 >= prev.p34, "P34 fell under eta2");
            c.require(t.p4 >= prev.p4, "P4 fell under eta2");
            prev = t;
        }

        // alpha sweep, (eta1, eta2) fixed
        const double eta2 = 0.9;
        prev = terms_at(p, 0.01, eta1, eta2);
        for (int i = 2; i <= 99; ++i) {
            const double a = i / 100.0;
            const Terms t = terms_at(p, a, eta1, eta2);
            c.require(t.p1 >= prev.p1, "P1 fell under alpha");
            c.require(t.p21 >= prev.p21, "P21 fell under alpha");
            c.require(t.p23 <= prev.p23, "P23 rose under alpha");
            c.require(t.p32 <= prev.p32, "P32 rose under alpha");
            c.require(t.p34 <= prev.p34, "P34 rose under alpha");
            c.require(t.p4 <= prev.p4, "P4 rose under alpha");
            prev = t;
        }
    }
}

void criterion4(Criterion& c) {
    constexpr int kScan = 10000;
    auto crossings = [](const std::vector<double>& v) {
        int n = 0;
        double prev = 0;
        for (double x : v) {
            if (x == 0.0) continue;
            if (prev != 0.0 && (x > 0) != (prev > 0)) ++n;
            prev = x;
        }
        return n;
    };
    for (double snr : {20.0, 30.0, 35.0}) {
        for (int nr : {2, 4, 32}) {
            const auto p = params_at(snr, nr);
            for (double eta1 : {0.0, 0.05, 0.1}) {
                std::vector<double> gs, hs;
                gs.reserve(kScan);
                hs.reserve(kScan);
                const double alpha = 0.5;
                const double bound = 0.5 * (3.0 + 1.0 / alpha - eta1);
                const double span = bound - eta1;
                for (int i = 0; i < kScan; ++i) {
                    const double eta2 =
                        eta1 + span * (1e-6 + (1.0 - 2e-6) * i / (kScan - 1));
                    const auto e =
                        error_breakdown(p, complete_constellation(alpha, eta1, eta2));
                    gs.push_back((e.p23 + e.p32) - (e.p34 + e.p4));
                }
                const double eta2 = 0.9;
                for (int i = 0; i < kScan; ++i) {
                    const double a = 1e-6 + (1.0 - 2e-6) * i / (kScan - 1);
                    const auto e =
                        error_breakdown(p, complete_constellation(a, eta1, eta2));
                    hs.push_back((e.charlie.p00 * (e.p1 + e.p4) +
                                  e.charlie.p11 * (e.p21 + e.p23 + e.p32 + e.p34)) -
                                 2.0 * (e.charlie.p01 + e.charlie.p10));
                }
                std::ostringstream at;
                at << "snr=" << snr << " nr=" << nr << " eta1=" << eta1;
                c.require(crossings(gs) == 1, "g crossings != 1 at " + at.str());
                c.require(crossings(hs) == 1, "h crossings != 1 at " + at.str());
            }
        }
    }
}

void criterion5(Criterion& c) {
    std::string ratios;
    for (double snr : {20.0, 30.0, 35.0}) {
        for (int nr : {2, 4}) {
            const auto p = params_at(snr, nr);
            const auto g = greedy_descent(p);
            c.require(g.wall_time_s < 30.0,
                      "greedy wall " + fmt(g.wall_time_s) + "s at snr=" + fmt(snr) +
                          " nr=" + std::to_string(nr));
            const auto e = exhaustive_search(p);
            const double ratio = g.pe_star_value / e.pe_star_value;
            ratios += (ratios.empty() ? "" : " ") + fmt(ratio);
            c.require(ratio <= 1.05, "greedy " + fmt(ratio) +
                                         "x above exhaustive at snr=" + fmt(snr) +
                                         " nr=" + std::to_string(nr));
            if (ratio < 0.95) {
                // greedy sits below the coarse grid's resolution: refine the
                // oracle locally and require two-sided agreement there
                const double ga = g.constellation.alpha;
                double refined = e.pe_star_value;
                for (double alpha = std::max(0.002, ga - 0.05);
                     alpha < std::min(0.9999, ga + 0.05); alpha += 0.002) {
                    for (double eta1 : {0.0, 0.02}) {
                        const double bound = 0.5 * (3.0 + 1.0 / alpha - eta1);
                        for (double eta2 = eta1 + 0.005; eta2 < bound; eta2 += 0.005) {
                            const double pe = pe_star(
                                p, complete_constellation(alpha, eta1, eta2));
                            refined = std::min(refined, pe);
                        }
                    }
                }
                const double r2 = g.pe_star_value / refined;
                c.require(r2 >= 0.95 && r2 <= 1.05,
                          "refined-oracle ratio " + fmt(r2) + " at snr=" + fmt(snr) +
                              " nr=" + std::to_string(nr));
            }
        }
    }
    c.detail = "greedy/exhaustive: " + ratios + (c.ok ? "" : "; " + c.detail);
}

void criterion6(Criterion& c) {
    const auto p = params_at(30.0, 4);
    const auto opt = greedy_descent(p);
    SimConfig sim;
    sim.trials = 1000000;
    sim.seed = 42;
    const auto r = simulate_ncf2fd(p, opt.constellation, sim);
    const double pe = opt.pe_exact_value;
    c.require(std::fabs(r.joint_ser - pe) <= 3.0 * r.joint_ser_se,
              "SER " + fmt(r.joint_ser) + " vs pe " + fmt(pe) + " (3se " +
                  fmt(3.0 * r.joint_ser_se) + ")");
    c.require(pe <= opt.pe_star_value, "pe above pe_star");
    c.require(std::fabs(r.fab_mean_power - 0.5) <= 3.0 * r.fab_power_se,
              "f_AB power " + fmt(r.fab_mean_power));
    const auto& cc = opt.constellation;
    const auto d = charlie_detection(p, cc.alpha);
    const double fcb_implied =
        1.0 + (d.p10 - d.p01) * (cc.eps1 + cc.eps2 - cc.alpha * (cc.eta1 + cc.eta2)) / 4.0;
    c.require(std::fabs(r.fcb_mean_power - 1.0) <= 3.0 * r.fcb_power_se,
              "f_CB power " + fmt(r.fcb_mean_power) +
                  " off the design figure 1.0 (relay errors imply " + fmt(fcb_implied) +
                  "; simulated mean agrees with that within 3se)");
    c.require(r.fab_fluctuation_rate == r.charlie_relay_ber,
              "fluctuation rate != relay error rate");
    c.detail = "SER " + fmt(r.joint_ser) + " vs pe " + fmt(pe) + ", f_AB " +
               fmt(r.fab_mean_power) + ", f_CB " + fmt(r.fcb_mean_power) +
               (c.ok ? "" : "; " + c.detail);
}

void criterion7(Criterion& c) {
    double prev = 1.0;
    std::string vals;
    for (int nr : {2, 4, 8, 16, 32}) {
        const auto r = greedy_descent(params_at(35.0, nr));
        vals += (vals.empty() ? "" : " ") + fmt(r.pe_star_value);
        c.require(r.pe_star_value < prev,
                  "pe_star not decreasing at nr=" + std::to_string(nr));
        prev = r.pe_star_value;
    }
    c.detail = "pe_star over nr {2,4,8,16,32}: " + vals + (c.ok ? "" : "; " + c.detail);
}

void criterion8(Criterion& c) {
    double prev = 1.0;
    std::string pairs;
    for (int i = 0; i < 6; ++i) {
        const double snr = 10.0 + 5.0 * i;
        const auto p = params_at(snr, 4);
        const auto opt = greedy_descent(p);
        SimConfig sim;
        sim.trials = 1000000;
        sim.seed = substream_seed(42, std::uint64_t(i));
        const auto r = simulate_ncf2fd(p, opt.constellation, sim);
        SimConfig bsim;
        bsim.trials = 300000;
        bsim.seed = substream_seed(43, std::uint64_t(i));
        bsim.jam_power = 10.0;
        const auto b = simulate_jammed_baseline(p, bsim);
        pairs += (pairs.empty() ? "" : " ") + fmt(r.alice_ber) + "/" + fmt(b.alice_ber);
        c.require(r.alice_ber < prev, "alice BER not decreasing at snr=" + fmt(snr));
        if (snr >= 20.0)
            c.require(r.alice_ber < b.alice_ber,
                      "not below the jammed baseline at snr=" + fmt(snr));
        prev = r.alice_ber;
    }
    c.detail = "ncf2fd/baseline alice BER: " + pairs + (c.ok ? "" : "; " + c.detail);
}

void criterion9(Criterion& c) {
    const std::vector<std::string> args = {
        "--mode", "simulate", "--snr", "20",  "--snr",  "30",    "--nr",    "2",
        "--nr",   "4",        "--alpha", "0.5", "--eta1", "0.1",  "--eta2",  "1.5",
        "--trials", "200000"};
    const auto spec1 = parse_config(args);
    const auto spec2 = parse_config(args);
    std::ostringstream a, b;
    emit_csv(run_sweep(spec1), a, &spec1);
    emit_csv(run_sweep(spec2), b, &spec2);
    c.require(a.str() == b.str(), "CSV outputs differ between invocations");
    c.require(a.str().size() > 0, "empty output");
    c.detail = std::to_string(a.str().size()) + " bytes, byte-identical" +
               (c.ok ? "" : "; " + c.detail);
}

} // namespace

int main() {
    run(1, "regularized gamma vs integer-shape series oracle (< 5 s)", [](Criterion& c) {
        const auto t0 = std::chrono::steady_clock::now();
        criterion1(c);
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        c.require(s < 5.0, "runtime " + fmt(s) + "s");
    });
    run(2, "Charlie lemma suite on the alpha x SNR grid (< 5 s)", [](Criterion& c) {
        const auto t0 = std::chrono::steady_clock::now();
        criterion2(c);
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        c.require(s < 5.0, "runtime " + fmt(s) + "s");
    });
    run(3, "error-term behaviour table on sampled grids", criterion3);
    run(4, "single sign change of both intersection objectives", criterion4);
    run(5, "greedy descent within 5% of the exhaustive oracle", criterion5);
    run(6, "Monte Carlo consistency at SNR=30 dB, N_r=4 (< 60 s)", [](Criterion& c) {
        const auto t0 = std::chrono::steady_clock::now();
        criterion6(c);
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        c.require(s < 60.0, "runtime " + fmt(s) + "s");
    });
    run(7, "optimized pe_star strictly improves with receive diversity", criterion7);
    run(8, "victim error rate falls with SNR and beats the jammed baseline", criterion8);
    run(9, "byte-identical sweep output for a fixed seed", criterion9);

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", g_failures);
    return 1;
}
