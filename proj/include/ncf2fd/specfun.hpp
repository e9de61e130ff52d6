#pragma once

// Regularized incomplete gamma functions, the only special functions the
// link model needs.  P(a,x) = γ(a,x)/Γ(a), Q(a,x) = Γ(a,x)/Γ(a).
//
// Integer shapes (a = receive antenna count, 1..1024) are evaluated with the
// finite Poisson series in log space with compensated summation; other shapes
// switch between the ascending series and a continued fraction at x ≈ a+1.
// Results smaller than 1e-300 are clamped to exactly 0.

namespace ncf2fd::specfun {

// Throws std::domain_error unless a > 0, x >= 0 and both are finite.
double reg_lower_gamma(double a, double x);
double reg_upper_gamma(double a, double x);

} // namespace ncf2fd::specfun
