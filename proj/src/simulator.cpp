#include "ncf2fd/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace ncf2fd {
namespace {

struct Complex {
    double re = 0, im = 0;
};

Complex gaussian(std::mt19937_64& rng, double variance) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    return {n(rng), n(rng)};
}

double binom_se(double p, std::uint64_t n) {
    return std::sqrt(p * (1.0 - p) / double(n));
}

struct Counters {
    std::uint64_t joint = 0, alice = 0, charlie = 0, relay = 0, fluct = 0;
    double fab_sum = 0, fab_sumsq = 0, fcb_sum = 0, fcb_sumsq = 0;

    void add(const Counters& o) {
        joint += o.joint;
        alice += o.alice;
        charlie += o.charlie;
        relay += o.relay;
        fluct += o.fluct;
        fab_sum += o.fab_sum;
        fab_sumsq += o.fab_sumsq;
        fcb_sum += o.fcb_sum;
        fcb_sumsq += o.fcb_sumsq;
    }
};

// Fixed shard layout so results do not depend on the worker count.
std::uint64_t shard_count(std::uint64_t trials) {
    const std::uint64_t by_size = trials / 50000;
    return std::max<std::uint64_t>(1, std::min<std::uint64_t>(256, by_size));
}

template <typename PerShard>
void run_sharded(std::uint64_t trials, int threads, PerShard&& per_shard) {
    const std::uint64_t shards = shard_count(trials);
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned workers =
        std::min<std::uint64_t>(threads > 0 ? unsigned(threads) : hw, shards);

    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::uint64_t s = next.fetch_add(1);
            if (s >= shards) break;
            const std::uint64_t lo = trials * s / shards;
            const std::uint64_t hi = trials * (s + 1) / shards;
            per_shard(s, hi - lo);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
}

} // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

void SimConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("SimConfig: trials must be >= 1");
    if (!(jam_power >= 0.0)) throw std::invalid_argument("SimConfig: jam_power must be >= 0");
}

BitPair jdd_classify(double energy, const Thresholds& rho) {
    if (energy < rho.rho1) return {0, 0};
    if (energy < rho.rho2) return {1, 0};
    if (energy < rho.rho3) return {1, 1};
    return {0, 1};
}

ChainSampler::ChainSampler(const SystemParams& params, const Constellation& c,
                           bool exact_thresholds)
    : params_(params), c_(c) {
    params_.validate();
    c_.validate();
    charlie_ = charlie_detection(params_, c_.alpha);
    n_o_ = params_.noise_power();
    const auto v = bob_variances(c_, n_o_);
    rho_ = exact_thresholds ? bob_thresholds_exact(v, params_.n_r, charlie_)
                            : bob_thresholds(v, params_.n_r);
    alice_amp_ = std::sqrt(1.0 - c_.alpha);
    charlie_amp_[0][0] = std::sqrt(c_.eps1);
    charlie_amp_[1][0] = std::sqrt(c_.alpha * c_.eta1);
    charlie_amp_[1][1] = std::sqrt(c_.alpha * c_.eta2);
    charlie_amp_[0][1] = std::sqrt(c_.eps2);
    si_noise_var_ = params_.lambda_sic * (1.0 + c_.alpha) / 2.0 + n_o_;
}

double ChainSampler::bob_energy(int x, int xhat, int y, std::mt19937_64& rng) const {
    const double ax = x ? alice_amp_ : 0.0;
    const double ac = charlie_amp_[xhat][y];
    double energy = 0.0;
    for (int i = 0; i < params_.n_r; ++i) {
        const Complex hab = gaussian(rng, params_.sigma_ab2);
        const Complex hcb = gaussian(rng, params_.sigma_cb2);
        const Complex nb = gaussian(rng, n_o_);
        const double re = hab.re * ax + hcb.re * ac + nb.re;
        const double im = hab.im * ax + hcb.im * ac + nb.im;
        energy += re * re + im * im;
    }
    return energy;
}

ChainSampler::Symbol ChainSampler::step(std::mt19937_64& rng) const {
    Symbol s;
    const std::uint64_t bits = rng();
    s.x = int(bits & 1u);
    s.y = int((bits >> 1) & 1u);

    // Charlie's receive side: Alice's faded symbol plus residual SI and noise
    const double ax = s.x ? alice_amp_ : 0.0;
    const Complex hac = gaussian(rng, params_.sigma_ac2);
    const Complex w = gaussian(rng, si_noise_var_);
    const double rc_re = hac.re * ax + w.re;
    const double rc_im = hac.im * ax + w.im;
    s.xhat = (rc_re * rc_re + rc_im * rc_im > charlie_.tau) ? 1 : 0;

    s.bob_energy = bob_energy(s.x, s.xhat, s.y, rng);
    s.decoded = jdd_classify(s.bob_energy, rho_);

    // f_AB: Alice pours alpha when her bit is 1, Charlie pours 1-alpha when
    // xhat = 1; the pattern equals the pre-countermeasure one exactly when
    // xhat == x
    s.fab_energy = (s.xhat == s.x) ? double(s.x)
                                   : c_.alpha * s.x + (1.0 - c_.alpha) * s.xhat;
    const double ac = charlie_amp_[s.xhat][s.y];
    s.fcb_energy = (1.0 - c_.alpha) * s.x + ac * ac;
    return s;
}

SimResult simulate_ncf2fd(const SystemParams& params, const Constellation& c,
                          const SimConfig& sim) {
    sim.validate();
    const ChainSampler sampler(params, c, sim.exact_thresholds);

    const std::uint64_t shards = shard_count(sim.trials);
    std::vector<Counters> partial(shards);
    run_sharded(sim.trials, sim.threads, [&](std::uint64_t s, std::uint64_t count) {
        std::mt19937_64 rng(substream_seed(sim.seed, s));
        Counters k;
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto sym = sampler.step(rng);
            const double pattern = double(sym.x);
            k.joint += (sym.decoded.x != sym.x || sym.decoded.y != sym.y);
            k.alice += (sym.decoded.x != sym.x);
            k.charlie += (sym.decoded.y != sym.y);
            k.relay += (sym.xhat != sym.x);
            k.fluct += (sym.fab_energy != pattern);
            k.fab_sum += sym.fab_energy;
            k.fab_sumsq += sym.fab_energy * sym.fab_energy;
            k.fcb_sum += sym.fcb_energy;
            k.fcb_sumsq += sym.fcb_energy * sym.fcb_energy;
        }
        partial[s] = k;
    });

    Counters k;
    for (const auto& p : partial) k.add(p);

    const double n = double(sim.trials);
    SimResult r;
    r.trials = sim.trials;
    r.joint_ser = double(k.joint) / n;
    r.alice_ber = double(k.alice) / n;
    r.charlie_ber = double(k.charlie) / n;
    r.charlie_relay_ber = double(k.relay) / n;
    r.fab_fluctuation_rate = double(k.fluct) / n;
    r.fab_mean_power = k.fab_sum / n;
    r.fcb_mean_power = k.fcb_sum / n;
    r.joint_ser_se = binom_se(r.joint_ser, sim.trials);
    r.alice_ber_se = binom_se(r.alice_ber, sim.trials);
    r.charlie_ber_se = binom_se(r.charlie_ber, sim.trials);
    r.charlie_relay_ber_se = binom_se(r.charlie_relay_ber, sim.trials);
    r.fab_fluctuation_rate_se = binom_se(r.fab_fluctuation_rate, sim.trials);
    r.fab_power_se =
        std::sqrt(std::max(0.0, k.fab_sumsq / n - r.fab_mean_power * r.fab_mean_power) / n);
    r.fcb_power_se =
        std::sqrt(std::max(0.0, k.fcb_sumsq / n - r.fcb_mean_power * r.fcb_mean_power) / n);
    return r;
}

SimResult simulate_jammed_baseline(const SystemParams& params, const SimConfig& sim) {
    params.validate();
    sim.validate();
    const double n_o = params.noise_power();
    const double v0 = n_o + sim.jam_power;
    const double v1 = params.sigma_ab2 + n_o + sim.jam_power;
    // same N_r-scaled log-ratio threshold form as the JDD thresholds
    const double rho =
        double(params.n_r) * (v0 * v1 / (v1 - v0)) * std::log(v1 / v0);

    const std::uint64_t shards = shard_count(sim.trials);
    std::vector<std::uint64_t> errors(shards, 0);
    run_sharded(sim.trials, sim.threads, [&](std::uint64_t s, std::uint64_t count) {
        std::mt19937_64 rng(substream_seed(sim.seed, s));
        std::uint64_t err = 0;
        for (std::uint64_t i = 0; i < count; ++i) {
            const int x = int(rng() & 1u);
            const double ax = double(x);
            double energy = 0.0;
            for (int a = 0; a < params.n_r; ++a) {
                const Complex h = gaussian(rng, params.sigma_ab2);
                const Complex nb = gaussian(rng, v0);
                const double re = h.re * ax + nb.re;
                const double im = h.im * ax + nb.im;
                energy += re * re + im * im;
            }
            const int xb = (energy >= rho) ? 1 : 0;
            err += (xb != x);
        }
        errors[s] = err;
    });

    std::uint64_t err = 0;
    for (auto e : errors) err += e;

    SimResult r;
    r.trials = sim.trials;
    r.alice_ber = double(err) / double(sim.trials);
    r.alice_ber_se = binom_se(r.alice_ber, sim.trials);
    const double nan = std::nan("");
    r.joint_ser = r.charlie_ber = r.charlie_relay_ber = nan;
    r.fab_mean_power = r.fab_fluctuation_rate = r.fcb_mean_power = nan;
    r.joint_ser_se = r.charlie_ber_se = r.charlie_relay_ber_se = nan;
    r.fab_fluctuation_rate_se = r.fab_power_se = r.fcb_power_se = nan;
    return r;
}

} // namespace ncf2fd
