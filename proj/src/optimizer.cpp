#include "ncf2fd/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

namespace ncf2fd {
namespace {

constexpr double kAlphaClip = 1e-6;   // alpha in [kAlphaClip, 1 - kAlphaClip]
constexpr double kDomainMargin = 1e-7; // relative inset from open-interval ends

double alpha_upper(double eta1, double eta2) {
    double hi = 1.0 - kAlphaClip;
    const double denom = 2.0 * eta2 + eta1 - 3.0;
    if (denom > 0.0) hi = std::min(hi, (1.0 - kDomainMargin) / denom);
    return hi;
}

// Safeguarded Newton-Raphson on a bracketing interval: numerical central
// difference (1e-6 relative step), bisection fallback, terminates when the
// bracket width falls below xtol*(1+|x|).
double solve_bracketed(const std::function<double(double)>& f, double lo, double hi,
                       double xtol, const std::string& context) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        std::ostringstream msg;
        msg << "bracket failure in " << context << ": f(" << lo << ")=" << flo
            << ", f(" << hi << ")=" << fhi;
        throw BracketError(msg.str());
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if (hi - lo <= xtol * (1.0 + std::fabs(x))) break;
        const double h = 1e-6 * std::max(std::fabs(x), 1e-3);
        const double xp = std::min(x + h, hi);
        const double xm = std::max(x - h, lo);
        const double df = (xp > xm) ? (f(xp) - f(xm)) / (xp - xm) : 0.0;
        double xn = (df != 0.0) ? x - fx / df : lo;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
    }
    return 0.5 * (lo + hi);
}

// Coarse scan followed by golden-section refinement; f must be continuous.
double line_minimum(const std::function<double(double)>& f, double lo, double hi,
                    double xtol) {
    constexpr int kCoarse = 64;
    constexpr double kGolden = 0.6180339887498949;
    double best_x = lo, best_v = f(lo);
    for (int i = 1; i < kCoarse; ++i) {
        const double x = lo + (hi - lo) * double(i) / double(kCoarse - 1);
        const double v = f(x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    const double step = (hi - lo) / double(kCoarse - 1);
    double a = std::max(lo, best_x - step), b = std::min(hi, best_x + step);
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol * (1.0 + std::fabs(b))) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

struct Objective {
    const SystemParams& params;
    ThresholdMode mode;
    long long evaluations = 0;

    double pe_star_at(double alpha, double eta1, double eta2) {
        ++evaluations;
        return pe_star(params, complete_constellation(alpha, eta1, eta2), mode);
    }
    double g(double alpha, double eta1, double eta2) {
        ++evaluations;
        const auto e = error_breakdown(params, complete_constellation(alpha, eta1, eta2), mode);
        return (e.p23 + e.p32) - (e.p34 + e.p4);
    }
    double h(double alpha, double eta1, double eta2) {
        ++evaluations;
        const auto e = error_breakdown(params, complete_constellation(alpha, eta1, eta2), mode);
        return (e.charlie.p00 * (e.p1 + e.p4) +
                e.charlie.p11 * (e.p21 + e.p23 + e.p32 + e.p34)) -
               2.0 * (e.charlie.p01 + e.charlie.p10);
    }
};

double eta2_root(Objective& obj, double eta1, double alpha, const DescentConfig& cfg) {
    const double bound = 0.5 * (3.0 + 1.0 / alpha - eta1);
    const double span = bound - eta1;
    const double lo = eta1 + kDomainMargin * span;
    const double hi = bound - kDomainMargin * span;
    std::ostringstream ctx;
    ctx << "find_eta2_star(eta1=" << eta1 << ", alpha=" << alpha << ")";
    return solve_bracketed([&](double e2) { return obj.g(alpha, eta1, e2); }, lo, hi,
                           cfg.nr_tolerance, ctx.str());
}

double alpha_root(Objective& obj, double eta1, double eta2, const DescentConfig& cfg) {
    const double lo = kAlphaClip;
    const double hi = alpha_upper(eta1, eta2);
    std::ostringstream ctx;
    ctx << "find_alpha_star(eta1=" << eta1 << ", eta2=" << eta2 << ")";
    if (hi <= lo) throw BracketError(ctx.str() + ": empty feasible alpha interval");
    return solve_bracketed([&](double a) { return obj.h(a, eta1, eta2); }, lo, hi,
                           cfg.nr_tolerance, ctx.str());
}

struct InnerResult {
    double pe = 0.0;
    double alpha = 0.0, eta2 = 0.0;
    long iterations = 0;
};

// One pass of the coordinate loop at fixed eta1.  The Theorem-1/2 roots are
// the primary step candidates; when a root candidate fails to descend, the
// coordinate falls back to a direct line minimum.  Exits when neither
// coordinate can improve the objective by more than delta_pe.
InnerResult inner_loop(Objective& obj, double eta1, double eta2, double alpha,
                       const DescentConfig& cfg, const std::function<void()>& on_iter) {
    InnerResult r;
    r.alpha = alpha;
    r.eta2 = eta2;
    for (long it = 1;; ++it) {
        if (it > cfg.max_inner_iterations) {
            r.iterations = it - 1;
            throw IterationCapError("greedy_descent: inner iteration cap at eta1=" +
                                        std::to_string(eta1),
                                    OptimizerResult{});
        }
        on_iter();
        r.iterations = it;
        const double pe_cur = obj.pe_star_at(r.alpha, eta1, r.eta2);

        double e2_cand;
        try {
            e2_cand = eta2_root(obj, eta1, r.alpha, cfg);
        } catch (const BracketError&) {
            e2_cand = r.eta2;
        }
        double pe_e2 = obj.pe_star_at(r.alpha, eta1, e2_cand);
        if (!(pe_e2 < pe_cur - cfg.delta_pe)) {
            const double bound = 0.5 * (3.0 + 1.0 / r.alpha - eta1);
            const double span = bound - eta1;
            e2_cand = line_minimum(
                [&](double e2) { return obj.pe_star_at(r.alpha, eta1, e2); },
                eta1 + kDomainMargin * span, bound - kDomainMargin * span, 1e-7);
            pe_e2 = obj.pe_star_at(r.alpha, eta1, e2_cand);
        }

        double a_cand;
        try {
            a_cand = alpha_root(obj, eta1, r.eta2, cfg);
        } catch (const BracketError&) {
            a_cand = r.alpha;
        }
        double pe_a = obj.pe_star_at(a_cand, eta1, r.eta2);
        if (!(pe_a < pe_cur - cfg.delta_pe)) {
            a_cand = line_minimum(
                [&](double a) { return obj.pe_star_at(a, eta1, r.eta2); }, kAlphaClip,
                alpha_upper(eta1, r.eta2), 1e-7);
            pe_a = obj.pe_star_at(a_cand, eta1, r.eta2);
        }

        const double d = pe_a - pe_e2;
        if (d >= cfg.delta_pe && pe_e2 < pe_cur - cfg.delta_pe) {
            r.eta2 = e2_cand; // eta2 branch descends more
            continue;
        }
        if (d <= -cfg.delta_pe && pe_a < pe_cur - cfg.delta_pe) {
            r.alpha = a_cand;
            continue;
        }
        // no candidate improves beyond delta_pe: settle on the best evaluated state
        double best_pe = pe_cur, best_alpha = r.alpha, best_eta2 = r.eta2;
        if (pe_e2 < best_pe) {
            best_pe = pe_e2;
            best_alpha = r.alpha;
            best_eta2 = e2_cand;
        }
        if (pe_a < best_pe) {
            best_pe = pe_a;
            best_alpha = a_cand;
            best_eta2 = r.eta2;
        }
        r.pe = best_pe;
        r.alpha = best_alpha;
        r.eta2 = best_eta2;
        return r;
    }
}

} // namespace

void DescentConfig::validate() const {
    std::ostringstream bad;
    if (!(delta_pe > 0.0)) bad << "delta_pe must be > 0; ";
    if (!(delta_eta1 > 0.0)) bad << "delta_eta1 must be > 0; ";
    if (!(nr_tolerance > 0.0)) bad << "nr_tolerance must be > 0; ";
    if (max_inner_iterations < 1) bad << "max_inner_iterations must be >= 1; ";
    if (max_outer_iterations < 1) bad << "max_outer_iterations must be >= 1; ";
    if (!(alpha_init > 0.0 && alpha_init < 1.0)) bad << "alpha_init must lie in (0,1); ";
    if (!(eta2_init > 0.0 && eta2_init < 0.5 * (3.0 + 1.0 / alpha_init)))
        bad << "eta2_init outside the feasible domain at eta1=0; ";
    if (!bad.str().empty()) throw std::invalid_argument("DescentConfig: " + bad.str());
}

double find_eta2_star(const SystemParams& params, double eta1, double alpha,
                      const DescentConfig& cfg) {
    cfg.validate();
    params.validate();
    Objective obj{params, cfg.thresholds};
    return eta2_root(obj, eta1, alpha, cfg);
}

double find_alpha_star(const SystemParams& params, double eta1, double eta2,
                       const DescentConfig& cfg) {
    cfg.validate();
    params.validate();
    Objective obj{params, cfg.thresholds};
    return alpha_root(obj, eta1, eta2, cfg);
}

OptimizerResult greedy_descent(const SystemParams& params, const DescentConfig& cfg) {
    cfg.validate();
    params.validate();
    const auto t0 = std::chrono::steady_clock::now();
    Objective obj{params, cfg.thresholds};

    double eta1 = 0.0;
    double eta2 = cfg.eta2_init;
    double alpha = cfg.alpha_init;

    OptimizerResult out;
    double best_pe = obj.pe_star_at(alpha, eta1, eta2);
    double best_alpha = alpha, best_eta1 = eta1, best_eta2 = eta2;
    const double pe_initial = best_pe;
    double pe_prev = pe_initial;
    long total_inner = 0;

    auto finish = [&](long outer) {
        out.constellation = complete_constellation(best_alpha, best_eta1, best_eta2);
        const auto eb = error_breakdown(params, out.constellation, cfg.thresholds);
        out.pe_star_value = eb.pe_star;
        out.pe_exact_value = eb.pe;
        out.outer_iterations = outer;
        out.inner_iterations = total_inner;
        out.evaluations = obj.evaluations;
        out.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    };

    for (long outer = 1;; ++outer) {
        if (outer > cfg.max_outer_iterations || eta1 >= 1.0) {
            auto best = finish(outer - 1);
            throw IterationCapError("greedy_descent: outer iteration cap", best);
        }
        InnerResult r;
        try {
            r = inner_loop(obj, eta1, eta2, alpha, cfg, [&] { ++total_inner; });
        } catch (IterationCapError&) {
            throw IterationCapError("greedy_descent: inner iteration cap at eta1=" +
                                        std::to_string(eta1),
                                    finish(outer));
        }
        if (r.pe < best_pe) {
            best_pe = r.pe;
            best_alpha = r.alpha;
            best_eta1 = eta1;
            best_eta2 = r.eta2;
        }
        // advance eta1 only while the inner solution keeps improving
        if (pe_prev - r.pe > cfg.delta_pe) {
            pe_prev = r.pe;
            alpha = r.alpha;
            eta2 = r.eta2;
            eta1 += cfg.delta_eta1;
            continue;
        }
        auto result = finish(outer);
        if (result.pe_star_value > pe_initial)
            throw std::logic_error("greedy_descent: result worse than the initial point");
        return result;
    }
}

namespace {

// keep grid points a hair inside the open eta2 interval so the derived
// strict orderings survive floating-point rounding at the boundary
double eta2_grid_bound(double alpha, double eta1) {
    const double bound = 0.5 * (3.0 + 1.0 / alpha - eta1);
    return bound - 1e-9 * std::max(1.0, bound);
}

} // namespace

std::uint64_t exhaustive_grid_size(const GridResolutions& res) {
    if (!(res.alpha_step > 0.0 && res.eta1_step > 0.0 && res.eta2_step > 0.0))
        throw std::invalid_argument("exhaustive_grid_size: steps must be > 0");
    std::uint64_t count = 0;
    for (std::uint64_t ia = 1;; ++ia) {
        const double alpha = double(ia) * res.alpha_step;
        if (alpha >= 1.0) break;
        for (std::uint64_t i1 = 0;; ++i1) {
            const double eta1 = double(i1) * res.eta1_step;
            if (eta1 >= 1.0) break;
            const double span = eta2_grid_bound(alpha, eta1) - eta1;
            if (span > res.eta2_step) {
                const auto n2 =
                    std::uint64_t(std::ceil(span / res.eta2_step - 1e-12)) - 1;
                count += n2;
            }
            if (count > res.max_points * 8) return count; // far past any cap
        }
    }
    return count;
}

OptimizerResult exhaustive_search(const SystemParams& params, const GridResolutions& res) {
    params.validate();
    const auto t0 = std::chrono::steady_clock::now();

    // a quick lower bound: every (alpha, eta1) pair admits at least one eta2
    // point at the resolutions of interest, so pairs alone can exceed the cap
    {
        const auto n_alpha = std::uint64_t(std::ceil(1.0 / res.alpha_step)) - 1;
        const auto n_eta1 = std::uint64_t(std::ceil(1.0 / res.eta1_step));
        if (n_alpha * n_eta1 > res.max_points)
            throw GridTooLargeError(
                "exhaustive_search: grid exceeds max_points; use coarser steps");
    }
    const std::uint64_t total = exhaustive_grid_size(res);
    if (total > res.max_points)
        throw GridTooLargeError("exhaustive_search: grid of " + std::to_string(total) +
                                " points exceeds max_points=" +
                                std::to_string(res.max_points) + "; use coarser steps");

    struct Best {
        double pe = std::numeric_limits<double>::infinity();
        double alpha = 0, eta1 = 0, eta2 = 0;
        bool better_than(const Best& o) const {
            if (pe != o.pe) return pe < o.pe;
            if (alpha != o.alpha) return alpha < o.alpha;
            if (eta1 != o.eta1) return eta1 < o.eta1;
            return eta2 < o.eta2;
        }
    };

    std::vector<double> alphas;
    for (std::uint64_t ia = 1;; ++ia) {
        const double alpha = double(ia) * res.alpha_step;
        if (alpha >= 1.0) break;
        alphas.push_back(alpha);
    }

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned workers =
        std::min<unsigned>(res.threads > 0 ? unsigned(res.threads) : hw,
                           std::max<std::size_t>(alphas.size(), 1));

    std::vector<Best> partial(alphas.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::uint64_t> evals{0};

    auto worker = [&] {
        std::uint64_t local_evals = 0;
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= alphas.size()) break;
            const double alpha = alphas[idx];
            const auto charlie = charlie_detection(params, alpha);
            Best best;
            for (std::uint64_t i1 = 0;; ++i1) {
                const double eta1 = double(i1) * res.eta1_step;
                if (eta1 >= 1.0) break;
                const double bound = eta2_grid_bound(alpha, eta1);
                for (std::uint64_t i2 = 1;; ++i2) {
                    const double eta2 = eta1 + double(i2) * res.eta2_step;
                    if (eta2 >= bound) break;
                    const auto c = complete_constellation(alpha, eta1, eta2);
                    const double pe =
                        error_breakdown_with(params, c, charlie, res.thresholds).pe_star;
                    ++local_evals;
                    const Best cand{pe, alpha, eta1, eta2};
                    if (cand.better_than(best)) best = cand;
                }
            }
            partial[idx] = best;
        }
        evals.fetch_add(local_evals);
    };

    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Best best;
    for (const auto& b : partial)
        if (b.better_than(best)) best = b;
    if (!std::isfinite(best.pe))
        throw std::runtime_error("exhaustive_search: no feasible grid point");

    OptimizerResult out;
    out.constellation = complete_constellation(best.alpha, best.eta1, best.eta2);
    const auto eb = error_breakdown(params, out.constellation, res.thresholds);
    out.pe_star_value = eb.pe_star;
    out.pe_exact_value = eb.pe;
    out.outer_iterations = long(alphas.size());
    out.inner_iterations = long(evals.load());
    out.evaluations = (long long)evals.load();
    out.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace ncf2fd
