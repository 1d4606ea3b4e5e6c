#pragma once

// Exact sampling of the correlated composite SNR pair and indicator
// estimators built on it.
//
// The generator is xoshiro256** (period 2^256 - 1). A (seed, stream) pair maps
// to a state by seeding with splitmix64 and then applying the 2^128-step jump
// `stream` times, so substreams never overlap for any practical sample count.

#include <array>
#include <cstdint>

#include "wiretap/channel.hpp"

namespace wiretap::mc {

struct RngSpec {
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
};

class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()();
    /// Advances the state by 2^128 steps.
    void jump();

    const std::array<std::uint64_t, 4>& state() const { return s_; }

private:
    std::array<std::uint64_t, 4> s_;
};

/// Generator plus the variate algorithms; carries the spare normal deviate of
/// the polar method, so copies diverge only if used differently.
class Rng {
public:
    explicit Rng(const RngSpec& spec);

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    double normal();
    /// Unit-scale Gamma(shape), shape > 0: Marsaglia-Tsang squeeze, with
    /// G(a) = G(a + 1) U^{1/a} for a < 1.
    double gamma(double shape);
    /// Poisson(mean): sequential inversion below 10, PTRS transformed rejection above.
    std::uint64_t poisson(double mean);

    const RngSpec& spec() const { return spec_; }

private:
    RngSpec spec_;
    Xoshiro256 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// NB(i; k, rho) = (1-rho)^k (k)_i rho^i / i! via lambda ~ Gamma(k) rho/(1-rho),
/// i ~ Poisson(lambda). k_shape = 0 or rho = 0 return 0.
std::uint64_t sample_mixture_index(double k_shape, double rho, Rng& rng);

struct SnrDraw {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    // shadow components (1 - rho) G(k1 + i) and (1 - rho) G(k2 + i + j)
    double shadow1 = 0.0;
    double shadow2 = 0.0;
};

/// Precomputed sampler for one model. Handles link exchange internally, so the
/// model may be given in any order and draws come back in its own labelling.
class PairSampler {
public:
    explicit PairSampler(const WiretapModel& model);
    SnrDraw operator()(Rng& rng) const;

private:
    WiretapModel canonical_;
    bool swapped_ = false;
    double a1_ = 0.0, a2_ = 0.0;
    double dk_ = 0.0;
};

SnrDraw sample_snr_pair(const WiretapModel& model, Rng& rng);

struct McEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::uint64_t n = 0;
    RngSpec rng;              // seed and the first stream used
    std::uint64_t streams = 1;  // substreams pooled
};

/// Fraction of n pairs with gamma_1 <= h(gamma_2, r). Deterministic in `rng`.
McEstimate estimate_sop(const WiretapModel& model, double r, std::uint64_t n, const RngSpec& rng);

/// The same estimate split over `streams` substreams 0 .. streams-1 of `seed`
/// (shard w gets n / streams samples, the first n % streams shards one more),
/// run on up to `threads` threads. Pooled counts are integers, so the result
/// depends on (seed, streams, n) only, never on the thread count.
McEstimate estimate_sop_sharded(const WiretapModel& model, double r, std::uint64_t n, std::uint64_t seed,
                                std::uint64_t streams, unsigned threads);

/// Pearson correlation of the two shadow components over n draws. std_err is
/// the large-sample (1 - c^2) / sqrt(n - 3) approximation.
McEstimate estimate_shadow_correlation(const WiretapModel& model, std::uint64_t n, const RngSpec& rng);

}  // namespace wiretap::mc
