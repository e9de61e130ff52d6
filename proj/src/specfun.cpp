#include "ncf2fd/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncf2fd::specfun {
namespace {

constexpr double kUnderflow = 1e-300;
constexpr int kMaxIntShape = 1024;
constexpr double kEps = std::numeric_limits<double>::epsilon();

const std::vector<double>& log_factorials() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kMaxIntShape + 1);
        for (int k = 0; k <= kMaxIntShape; ++k) t[k] = std::lgamma(double(k) + 1.0);
        return t;
    }();
    return table;
}

void check_domain(double a, double x) {
    if (!std::isfinite(a) || !std::isfinite(x) || a <= 0.0 || x < 0.0)
        throw std::domain_error("reg_gamma: need finite a > 0, x >= 0 (a=" +
                                std::to_string(a) + ", x=" + std::to_string(x) + ")");
}

// Q(n,x) = e^{-x} sum_{k<n} x^k/k!, each term in log space, Kahan-summed.
double upper_finite_series(int n, double x) {
    const auto& lf = log_factorials();
    const double lx = std::log(x);
    double sum = 0.0, carry = 0.0;
    for (int k = 0; k < n; ++k) {
        const double term = std::exp(double(k) * lx - x - lf[k]);
        const double y = term - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

// P(a,x) via the ascending series, full relative accuracy for x < a+1.
double lower_series(double a, double x) {
    const double prefix = a * std::log(x) - x - std::lgamma(a + 1.0);
    double sum = 1.0, term = 1.0;
    for (int m = 1; m < 10000; ++m) {
        term *= x / (a + m);
        sum += term;
        if (term < sum * kEps) break;
    }
    return std::exp(prefix) * sum;
}

// Q(a,x) via the Lentz continued fraction, for x >= a+1.
double upper_cont_fraction(double a, double x) {
    const double tiny = 1e-30;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return std::exp(a * std::log(x) - x - std::lgamma(a)) * h;
}

double clamp_result(double v) {
    if (v < kUnderflow) return 0.0;
    if (v > 1.0) return 1.0;
    return v;
}

bool integer_shape(double a, int& n) {
    if (a != std::floor(a) || a > double(kMaxIntShape)) return false;
    n = int(a);
    return true;
}

} // namespace

double reg_upper_gamma(double a, double x) {
    check_domain(a, x);
    if (x == 0.0) return 1.0;
    int n = 0;
    double q;
    if (integer_shape(a, n))
        q = upper_finite_series(n, x);
    else if (x < a + 1.0)
        q = 1.0 - lower_series(a, x);
    else
        q = upper_cont_fraction(a, x);
    return clamp_result(q);
}

double reg_lower_gamma(double a, double x) {
    check_domain(a, x);
    if (x == 0.0) return 0.0;
    double p;
    if (x < a + 1.0) {
        p = lower_series(a, x);
    } else {
        int n = 0;
        const double q = integer_shape(a, n) ? upper_finite_series(n, x)
                                             : upper_cont_fraction(a, x);
        p = 1.0 - q;
    }
    return clamp_result(p);
}

} // namespace ncf2fd::specfun
