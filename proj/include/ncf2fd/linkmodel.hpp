#pragma once

#include <stdexcept>

// Closed-form link quantities for the NC-F2FD relaying chain: Charlie's
// energy-detection statistics, Bob's received-energy variances, the joint
// dominant decoder thresholds, the adjacent error-event probabilities and the
// average pair error P_e with its upper bound P_e*.

namespace ncf2fd {

struct SystemParams {
    double snr_db = 30.0;
    int n_r = 4;              // receive antennas at Bob
    double lambda_sic = 1e-5; // residual self-interference factor at Charlie
    double sigma_ac2 = 10.0;  // Alice->Charlie link variance
    double sigma_ab2 = 1.0;   // fixed by the model
    double sigma_cb2 = 1.0;   // fixed by the model

    double noise_power() const; // 10^(-snr_db/10)
    void validate() const;      // throws std::invalid_argument
};

double noise_power(double snr_db);

// Design variables {eps1, eps2, eta1, eta2, alpha}.  Charlie's amplitudes are
// sqrt(eps1) < sqrt(alpha*eta1) < sqrt(alpha*eta2) < sqrt(eps2) and the four
// energies average to (1+alpha)/2.  eta1 = 0 (with eps1 = 0) is permitted: the
// two lowest levels coincide there and every downstream quantity stays valid.
struct Constellation {
    double eps1 = 0.0;
    double eps2 = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double alpha = 0.0;

    double eta2_upper_bound() const; // 0.5*(3 + 1/alpha - eta1)
    void validate() const;           // throws std::invalid_argument
};

// eps1 = 0, eps2 = 2 - alpha*(eta1 + eta2 - 2); validates the feasible domain
// alpha in (0,1), 0 <= eta1 < 1, eta1 < eta2 < 0.5*(3 + 1/alpha - eta1).
Constellation complete_constellation(double alpha, double eta1, double eta2);

struct CharlieDetection {
    double n_c0 = 0, n_c1 = 0; // received-energy means for Alice's bit 0 / 1
    double tau = 0;            // energy-detection threshold
    double p00 = 0, p01 = 0, p10 = 0, p11 = 0;
    double nu = 0;             // alpha upper bound below which p10 < p11
};
CharlieDetection charlie_detection(const SystemParams& params, double alpha);

struct BobVariances {
    // dominant hypotheses (relay decoded Alice correctly), pair (x y)
    double v00 = 0, v10 = 0, v11 = 0, v01 = 0;
    // counterpart hypotheses (relay flipped Alice's bit), same sent pair
    double w00 = 0, w01 = 0, w10 = 0, w11 = 0;
};
BobVariances bob_variances(const Constellation& c, double n_o);

enum class ThresholdMode { approximate, exact };

struct Thresholds {
    double rho1 = 0, rho2 = 0, rho3 = 0;
};

// Approximate form, N_r * logarithmic-mean of each adjacent dominant pair.
Thresholds bob_thresholds(const BobVariances& v, int n_r);
// Exact form retaining the ln(p11/p00) prior term in rho1 and rho3.
Thresholds bob_thresholds_exact(const BobVariances& v, int n_r,
                                const CharlieDetection& charlie);

struct ErrorBreakdown {
    CharlieDetection charlie;
    BobVariances v;
    Thresholds rho;
    // pairwise cross-event terms; pXc is the same event conditioned on the
    // counterpart variance
    double p1 = 0, p1c = 0;
    double p21 = 0, p21c = 0;
    double p23 = 0, p32 = 0;
    double p34 = 0, p34c = 0;
    double p4 = 0, p4c = 0;
    // the six valid adjacent error events
    double ev00_10 = 0, ev10_00 = 0, ev10_11 = 0;
    double ev11_10 = 0, ev11_01 = 0, ev01_11 = 0;
    double pe = 0;      // (1/4) * sum of the six events
    double pe_star = 0; // upper bound with all counterpart terms at 1
};

ErrorBreakdown error_breakdown(const SystemParams& params, const Constellation& c,
                               ThresholdMode mode = ThresholdMode::approximate);
// Hoisted variant for sweeps where charlie_detection(alpha) is shared.
ErrorBreakdown error_breakdown_with(const SystemParams& params, const Constellation& c,
                                    const CharlieDetection& charlie,
                                    ThresholdMode mode = ThresholdMode::approximate);

double pe_exact(const SystemParams& params, const Constellation& c,
                ThresholdMode mode = ThresholdMode::approximate);
double pe_star(const SystemParams& params, const Constellation& c,
               ThresholdMode mode = ThresholdMode::approximate);

} // namespace ncf2fd
