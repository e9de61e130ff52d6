#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "ncf2fd/linkmodel.hpp"

// Constellation design: two-layer greedy descent over (eta1 | eta2, alpha)
// driven by the single-crossing intersection solvers, plus an exhaustive
// grid-search oracle.

namespace ncf2fd {

struct DescentConfig {
    double delta_pe = 1e-9;   // tolerance on P_e* differences
    double delta_eta1 = 1e-3; // outer-loop eta1 step
    double eta2_init = 1.5;
    double alpha_init = 0.5;
    int max_inner_iterations = 10000;
    int max_outer_iterations = 1000;
    double nr_tolerance = 1e-12; // root-finder bracket width, relative
    ThresholdMode thresholds = ThresholdMode::approximate;

    void validate() const;
};

struct OptimizerResult {
    Constellation constellation;
    double pe_star_value = 0.0;
    double pe_exact_value = 0.0;
    long outer_iterations = 0;
    long inner_iterations = 0;
    long long evaluations = 0; // objective (P_e*) call count
    double wall_time_s = 0.0;
};

struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridTooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IterationCapError : std::runtime_error {
    OptimizerResult best_so_far;
    IterationCapError(const std::string& msg, OptimizerResult best)
        : std::runtime_error(msg), best_so_far(std::move(best)) {}
};

// Root of g(eta2) = (P23+P32) - (P34+P4) on (eta1, 0.5*(3 + 1/alpha - eta1)).
// Throws BracketError when the endpoint signs coincide.
double find_eta2_star(const SystemParams& params, double eta1, double alpha,
                      const DescentConfig& cfg = {});

// Root of h(alpha) = [P00(P1+P4) + P11(P21+P23+P32+P34)] - 2(P01+P10) on the
// clipped feasible interval; see BracketError as above.
double find_alpha_star(const SystemParams& params, double eta1, double eta2,
                       const DescentConfig& cfg = {});

OptimizerResult greedy_descent(const SystemParams& params, const DescentConfig& cfg = {});

struct GridResolutions {
    double alpha_step = 0.02;
    double eta1_step = 0.02;
    double eta2_step = 0.02;
    std::uint64_t max_points = 200'000'000;
    int threads = 0; // 0 = hardware concurrency
    ThresholdMode thresholds = ThresholdMode::approximate;
};

// Number of feasible (alpha, eta1, eta2) grid points the scan would visit.
std::uint64_t exhaustive_grid_size(const GridResolutions& res);

// Deterministic argmin of pe_star over the feasible grid (eps1 = 0, eps2 from
// the power constraint); ties broken toward the smallest (alpha, eta1, eta2).
// Throws GridTooLargeError when the grid exceeds res.max_points.
OptimizerResult exhaustive_search(const SystemParams& params,
                                  const GridResolutions& res = {});

} // namespace ncf2fd
