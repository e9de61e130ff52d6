#include "ncf2fd/linkmodel.hpp"

#include <cmath>
#include <sstream>

#include "ncf2fd/specfun.hpp"

namespace ncf2fd {
namespace {

// log1p(k)/k, stable through k -> 0.
double log1p_over(double k) {
    if (std::fabs(k) < 1e-5) return 1.0 - k / 2.0 + k * k / 3.0 - k * k * k / 4.0;
    return std::log1p(k) / k;
}

double clamp_prob(double p, const char* what) {
    if (p < -1e-9 || p > 1.0 + 1e-9)
        throw std::runtime_error(std::string("probability out of range in ") + what +
                                 ": " + std::to_string(p));
    if (p < 0.0) return 0.0;
    if (p > 1.0) return 1.0;
    return p;
}

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

} // namespace

double noise_power(double snr_db) {
    if (!std::isfinite(snr_db)) fail("noise_power: snr_db must be finite");
    return std::pow(10.0, -snr_db / 10.0);
}

double SystemParams::noise_power() const { return ncf2fd::noise_power(snr_db); }

void SystemParams::validate() const {
    std::ostringstream bad;
    if (!std::isfinite(snr_db)) bad << "snr_db must be finite; ";
    if (n_r < 1) bad << "n_r must be >= 1; ";
    if (!(lambda_sic > 0.0) || !std::isfinite(lambda_sic)) bad << "lambda_sic must be > 0; ";
    if (sigma_ab2 != 1.0) bad << "sigma_ab2 is fixed to 1; ";
    if (sigma_cb2 != 1.0) bad << "sigma_cb2 is fixed to 1; ";
    if (!(sigma_ac2 > sigma_cb2)) bad << "sigma_ac2 must exceed sigma_cb2 (helper vicinity); ";
    if (!bad.str().empty()) fail("SystemParams: " + bad.str());
}

double Constellation::eta2_upper_bound() const {
    return 0.5 * (3.0 + 1.0 / alpha - eta1);
}

void Constellation::validate() const {
    std::ostringstream bad;
    if (!(alpha > 0.0 && alpha < 1.0)) bad << "alpha must lie in (0,1); ";
    if (!(eta1 >= 0.0 && eta1 < 1.0)) bad << "eta1 must lie in [0,1); ";
    if (!(eps1 >= 0.0)) bad << "eps1 must be >= 0; ";
    if (!(eta2 > eta1)) bad << "eta2 must exceed eta1; ";
    if (!bad.str().empty()) fail("Constellation: " + bad.str());

    if (!(eps1 < alpha * eta1 || (eps1 == 0.0 && eta1 == 0.0)))
        bad << "ordering eps1 < alpha*eta1 violated; ";
    if (!(alpha * eta2 < eps2)) bad << "ordering alpha*eta2 < eps2 violated; ";
    if (!(eta2 < eta2_upper_bound())) bad << "eta2 at or above 0.5*(3 + 1/alpha - eta1); ";
    // dominant received-energy ordering, noise-free parts
    if (!(eps1 < 1.0 - alpha + alpha * eta1)) bad << "v00 < v10 violated; ";
    if (!(1.0 - alpha + alpha * eta2 < eps2)) bad << "v11 < v01 violated; ";
    const double avg = (eps1 + alpha * eta1 + alpha * eta2 + eps2) / 4.0;
    if (std::fabs(avg - 0.5 * (1.0 + alpha)) > 1e-12)
        bad << "average power constraint violated; ";
    if (!bad.str().empty()) fail("Constellation: " + bad.str());
}

Constellation complete_constellation(double alpha, double eta1, double eta2) {
    if (!(alpha > 0.0 && alpha < 1.0))
        fail("complete_constellation: alpha must lie in (0,1)");
    if (!(eta1 >= 0.0 && eta1 < 1.0))
        fail("complete_constellation: eta1 must lie in [0,1)");
    const double bound = 0.5 * (3.0 + 1.0 / alpha - eta1);
    if (!(eta2 > eta1 && eta2 < bound)) {
        std::ostringstream msg;
        msg << "complete_constellation: eta2=" << eta2 << " outside (" << eta1 << ", "
            << bound << ") for alpha=" << alpha;
        fail(msg.str());
    }
    Constellation c;
    c.alpha = alpha;
    c.eta1 = eta1;
    c.eta2 = eta2;
    c.eps1 = 0.0;
    c.eps2 = 2.0 - alpha * (eta1 + eta2 - 2.0);
    c.validate();
    return c;
}

CharlieDetection charlie_detection(const SystemParams& params, double alpha) {
    params.validate();
    if (!(alpha > 0.0 && alpha < 1.0))
        fail("charlie_detection: alpha must lie in (0,1)");
    const double n_o = params.noise_power();
    CharlieDetection d;
    d.n_c0 = n_o + 0.5 * params.lambda_sic * (1.0 + alpha);
    // kc = (n_c1 - n_c0)/n_c0 formed from (1-alpha) directly, stable near alpha -> 1
    const double kc = params.sigma_ac2 * (1.0 - alpha) / d.n_c0;
    d.n_c1 = d.n_c0 * (1.0 + kc);
    if (!(d.n_c1 > d.n_c0))
        throw std::runtime_error("charlie_detection: degenerate configuration, n_c1 <= n_c0");
    const double l = log1p_over(kc); // tau / n_c1
    d.tau = d.n_c0 * (1.0 + kc) * l;
    d.p01 = std::exp(-(1.0 + kc) * l); // exp(-tau/n_c0)
    d.p10 = -std::expm1(-l);           // 1 - exp(-tau/n_c1)
    d.p00 = 1.0 - d.p01;
    d.p11 = 1.0 - d.p10;
    d.nu = (params.sigma_ac2 - n_o - params.lambda_sic / 2.0) /
           (params.sigma_ac2 + params.lambda_sic / 2.0);
    return d;
}

BobVariances bob_variances(const Constellation& c, double n_o) {
    c.validate();
    if (!(n_o > 0.0)) fail("bob_variances: n_o must be > 0");
    BobVariances v;
    v.v00 = c.eps1 + n_o;
    v.v10 = 1.0 - c.alpha + c.alpha * c.eta1 + n_o;
    v.v11 = 1.0 - c.alpha + c.alpha * c.eta2 + n_o;
    v.v01 = c.eps2 + n_o;
    v.w10 = 1.0 - c.alpha + c.eps1 + n_o;
    v.w11 = 1.0 - c.alpha + c.eps2 + n_o;
    v.w01 = c.alpha * c.eta2 + n_o;
    v.w00 = c.alpha * c.eta1 + n_o;
    return v;
}

namespace {

struct PairRatio {
    double k;      // (v_hi - v_lo)/v_lo, > 0
    double arg_lo; // rho / v_lo = n_r (1+k) log1p(k)/k
    double arg_hi; // rho / v_hi = n_r log1p(k)/k
    double rho;
};

PairRatio pair_ratio(double v_lo, double v_hi, int n_r) {
    if (!(v_hi > v_lo))
        throw std::domain_error("bob_thresholds: adjacent variances equal or out of order");
    PairRatio r;
    r.k = (v_hi - v_lo) / v_lo;
    const double l = log1p_over(r.k);
    r.arg_hi = double(n_r) * l;
    r.arg_lo = r.arg_hi * (1.0 + r.k);
    r.rho = v_lo * r.arg_lo;
    return r;
}

void check_threshold_order(const Thresholds& t) {
    if (!(t.rho1 > 0.0 && t.rho1 < t.rho2 && t.rho2 < t.rho3))
        throw std::runtime_error("bob_thresholds: rho1 < rho2 < rho3 violated");
}

} // namespace

Thresholds bob_thresholds(const BobVariances& v, int n_r) {
    if (n_r < 1) fail("bob_thresholds: n_r must be >= 1");
    Thresholds t;
    t.rho1 = pair_ratio(v.v00, v.v10, n_r).rho;
    t.rho2 = pair_ratio(v.v10, v.v11, n_r).rho;
    t.rho3 = pair_ratio(v.v11, v.v01, n_r).rho;
    check_threshold_order(t);
    return t;
}

Thresholds bob_thresholds_exact(const BobVariances& v, int n_r,
                                const CharlieDetection& charlie) {
    if (n_r < 1) fail("bob_thresholds: n_r must be >= 1");
    const double lr = std::log(charlie.p11 / charlie.p00);
    Thresholds t;
    {
        const double k = (v.v10 - v.v00) / v.v00;
        t.rho1 = v.v00 * (1.0 + k) / k * (double(n_r) * std::log1p(k) - lr);
    }
    t.rho2 = pair_ratio(v.v10, v.v11, n_r).rho;
    {
        const double k = (v.v01 - v.v11) / v.v11;
        t.rho3 = v.v11 * (1.0 + k) / k * (double(n_r) * std::log1p(k) + lr);
    }
    check_threshold_order(t);
    return t;
}

ErrorBreakdown error_breakdown_with(const SystemParams& params, const Constellation& c,
                                    const CharlieDetection& charlie, ThresholdMode mode) {
    using specfun::reg_lower_gamma;
    using specfun::reg_upper_gamma;

    ErrorBreakdown e;
    e.charlie = charlie;
    e.v = bob_variances(c, params.noise_power());
    const int n_r = params.n_r;
    const double nr = double(n_r);

    double a1_lo, a1_hi, a2_lo, a2_hi, a3_lo, a3_hi;
    if (mode == ThresholdMode::approximate) {
        const PairRatio r1 = pair_ratio(e.v.v00, e.v.v10, n_r);
        const PairRatio r2 = pair_ratio(e.v.v10, e.v.v11, n_r);
        const PairRatio r3 = pair_ratio(e.v.v11, e.v.v01, n_r);
        e.rho = Thresholds{r1.rho, r2.rho, r3.rho};
        check_threshold_order(e.rho);
        a1_lo = r1.arg_lo; a1_hi = r1.arg_hi;
        a2_lo = r2.arg_lo; a2_hi = r2.arg_hi;
        a3_lo = r3.arg_lo; a3_hi = r3.arg_hi;
    } else {
        e.rho = bob_thresholds_exact(e.v, n_r, charlie);
        a1_lo = e.rho.rho1 / e.v.v00; a1_hi = e.rho.rho1 / e.v.v10;
        a2_lo = e.rho.rho2 / e.v.v10; a2_hi = e.rho.rho2 / e.v.v11;
        a3_lo = e.rho.rho3 / e.v.v11; a3_hi = e.rho.rho3 / e.v.v01;
    }

    e.p1 = reg_upper_gamma(nr, a1_lo);
    e.p1c = reg_upper_gamma(nr, e.rho.rho1 / e.v.w00);
    e.p21 = reg_lower_gamma(nr, a1_hi);
    e.p21c = reg_lower_gamma(nr, e.rho.rho1 / e.v.w10);
    e.p23 = reg_upper_gamma(nr, a2_lo);
    e.p32 = reg_lower_gamma(nr, a2_hi);
    e.p34 = reg_upper_gamma(nr, a3_lo);
    e.p34c = reg_upper_gamma(nr, e.rho.rho3 / e.v.w11);
    e.p4 = reg_lower_gamma(nr, a3_hi);
    e.p4c = reg_lower_gamma(nr, e.rho.rho3 / e.v.w01);

    const auto& ch = e.charlie;
    e.ev00_10 = clamp_prob(ch.p00 * e.p1 + ch.p01 * e.p1c, "Pr((00)->(10))");
    e.ev10_00 = clamp_prob(ch.p11 * e.p21 + ch.p10 * e.p21c, "Pr((10)->(00))");
    e.ev10_11 = clamp_prob(ch.p11 * e.p23, "Pr((10)->(11))");
    e.ev11_10 = clamp_prob(ch.p11 * e.p32, "Pr((11)->(10))");
    e.ev11_01 = clamp_prob(ch.p11 * e.p34 + ch.p10 * e.p34c, "Pr((11)->(01))");
    e.ev01_11 = clamp_prob(ch.p00 * e.p4 + ch.p01 * e.p4c, "Pr((01)->(11))");

    e.pe = clamp_prob((e.ev00_10 + e.ev10_00 + e.ev10_11 + e.ev11_10 + e.ev11_01 +
                       e.ev01_11) / 4.0, "pe");
    e.pe_star = clamp_prob((ch.p00 * (e.p1 + e.p4) + 2.0 * ch.p01 + 2.0 * ch.p10 +
                            ch.p11 * (e.p21 + e.p23 + e.p32 + e.p34)) / 4.0, "pe_star");
    return e;
}

ErrorBreakdown error_breakdown(const SystemParams& params, const Constellation& c,
                               ThresholdMode mode) {
    return error_breakdown_with(params, c, charlie_detection(params, c.alpha), mode);
}

double pe_exact(const SystemParams& params, const Constellation& c, ThresholdMode mode) {
    return error_breakdown(params, c, mode).pe;
}

double pe_star(const SystemParams& params, const Constellation& c, ThresholdMode mode) {
    return error_breakdown(params, c, mode).pe_star;
}

} // namespace ncf2fd
