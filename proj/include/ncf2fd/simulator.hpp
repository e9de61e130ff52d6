#pragma once

#include <cstdint>
#include <random>

#include "ncf2fd/linkmodel.hpp"

// Fast-fading Monte Carlo simulation of the full chain (Alice -> full-duplex
// Charlie -> multi-antenna Bob with the joint dominant decoder) plus jammed
// band power accounting, and the no-countermeasure jammed baseline.

namespace ncf2fd {

struct SimConfig {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 42;
    double jam_power = 10.0; // noise power on f_AB for the baseline scenario
    bool exact_thresholds = false;
    int threads = 0; // 0 = hardware concurrency

    void validate() const;
};

struct SimResult {
    std::uint64_t trials = 0;
    double joint_ser = 0;         // decoded pair != sent pair at Bob
    double alice_ber = 0;         // Bob's estimate of Alice's bit wrong
    double charlie_ber = 0;       // Bob's estimate of Charlie's bit wrong
    double charlie_relay_ber = 0; // Charlie decoded Alice's bit wrong
    double fab_mean_power = 0;
    double fab_fluctuation_rate = 0; // per-symbol f_AB energy off the pre-hop pattern
    double fcb_mean_power = 0;
    // binomial standard errors for the rates, sample standard errors for means
    double joint_ser_se = 0, alice_ber_se = 0, charlie_ber_se = 0;
    double charlie_relay_ber_se = 0, fab_fluctuation_rate_se = 0;
    double fab_power_se = 0, fcb_power_se = 0;
};

struct BitPair {
    int x = 0;
    int y = 0;
    bool operator==(const BitPair&) const = default;
};

// Region decode of the energy statistic; boundary ties go to the upper region.
// [0,rho1) -> (0,0), [rho1,rho2) -> (1,0), [rho2,rho3) -> (1,1), [rho3,inf) -> (0,1).
BitPair jdd_classify(double energy, const Thresholds& rho);

// One symbol through the chain.  Public so distribution-level tests can drive
// exactly the code path the Monte Carlo loop uses.
class ChainSampler {
public:
    ChainSampler(const SystemParams& params, const Constellation& c,
                 bool exact_thresholds = false);

    struct Symbol {
        int x = 0, y = 0, xhat = 0;
        double bob_energy = 0;
        BitPair decoded;
        double fab_energy = 0, fcb_energy = 0;
    };

    Symbol step(std::mt19937_64& rng) const;
    // Bob's energy statistic conditioned on (x, xhat, y).
    double bob_energy(int x, int xhat, int y, std::mt19937_64& rng) const;

    const Thresholds& thresholds() const { return rho_; }
    double tau() const { return charlie_.tau; }

private:
    SystemParams params_;
    Constellation c_;
    CharlieDetection charlie_;
    Thresholds rho_;
    double n_o_ = 0;
    double alice_amp_ = 0;      // sqrt(1 - alpha)
    double charlie_amp_[2][2];  // [xhat][y]
    double si_noise_var_ = 0;   // residual SI + thermal noise at Charlie
};

SimResult simulate_ncf2fd(const SystemParams& params, const Constellation& c,
                          const SimConfig& sim);

// Alice alone on the jammed band with on-off keying; Bob's per-antenna noise
// is N_o + J.  Populates trials, alice_ber and alice_ber_se only.
SimResult simulate_jammed_baseline(const SystemParams& params, const SimConfig& sim);

// SplitMix64 stream derivation for reproducible substreams.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

} // namespace ncf2fd
