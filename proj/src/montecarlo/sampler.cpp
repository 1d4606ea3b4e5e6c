#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "wiretap/errors.hpp"
#include "wiretap/montecarlo.hpp"
#include "wiretap/secrecy.hpp"

namespace wiretap::mc {

std::uint64_t sample_mixture_index(double k_shape, double rho, Rng& rng) {
    if (!(k_shape >= 0.0) || !(rho >= 0.0 && rho < 1.0)) throw DomainError("mixture index: need k >= 0, 0 <= rho < 1");
    if (k_shape == 0.0 || rho == 0.0) return 0;
    const double lambda = rng.gamma(k_shape) * rho / (1.0 - rho);
    return rng.poisson(lambda);
}

PairSampler::PairSampler(const WiretapModel& model) {
    const CanonicalModel c = canonical_order(model);
    canonical_ = c.model;
    swapped_ = c.swapped;
    const DerivedParams d = derived_params(canonical_);
    a1_ = d.a1;
    a2_ = d.a2;
    dk_ = d.k2 - d.k1;
}

SnrDraw PairSampler::operator()(Rng& rng) const {
    const double rho = canonical_.rho;
    const double i = static_cast<double>(sample_mixture_index(canonical_.link_b.k, rho, rng));
    const double j = static_cast<double>(sample_mixture_index(dk_, rho, rng));
    const double s1 = rng.gamma(canonical_.link_b.k + i);
    const double s2 = rng.gamma(canonical_.link_e.k + i + j);
    const double w1 = rng.gamma(canonical_.link_b.m);
    const double w2 = rng.gamma(canonical_.link_e.m);
    SnrDraw d;
    d.gamma1 = w1 * s1 / a1_;
    d.gamma2 = w2 * s2 / a2_;
    d.shadow1 = (1.0 - rho) * s1;
    d.shadow2 = (1.0 - rho) * s2;
    if (swapped_) {
        std::swap(d.gamma1, d.gamma2);
        std::swap(d.shadow1, d.shadow2);
    }
    return d;
}

SnrDraw sample_snr_pair(const WiretapModel& model, Rng& rng) { return PairSampler(model)(rng); }

namespace {

std::uint64_t count_outages(const PairSampler& sampler, double two_r, std::uint64_t n, Rng& rng) {
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < n; ++s) {
        const SnrDraw d = sampler(rng);
        // gamma_1 <= h(gamma_2, r)
        if (d.gamma1 <= (1.0 + d.gamma2) * two_r - 1.0) ++hits;
    }
    return hits;
}

McEstimate finish(std::uint64_t hits, std::uint64_t n, const RngSpec& spec, std::uint64_t streams) {
    McEstimate e;
    e.n = n;
    e.mean = static_cast<double>(hits) / static_cast<double>(n);
    e.std_err = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n));
    e.rng = spec;
    e.streams = streams;
    return e;
}

}  // namespace

McEstimate estimate_sop(const WiretapModel& model, double r, std::uint64_t n, const RngSpec& spec) {
    if (n < 1) throw DomainError("estimate_sop: need n >= 1");
    if (!(r >= 0.0)) throw DomainError("estimate_sop: rate must be >= 0");
    const PairSampler sampler(model);
    Rng rng(spec);
    return finish(count_outages(sampler, std::exp2(r), n, rng), n, spec, 1);
}

McEstimate estimate_sop_sharded(const WiretapModel& model, double r, std::uint64_t n, std::uint64_t seed,
                                std::uint64_t streams, unsigned threads) {
    if (n < 1) throw DomainError("estimate_sop: need n >= 1");
    if (streams < 1) throw DomainError("estimate_sop: need at least one stream");
    if (!(r >= 0.0)) throw DomainError("estimate_sop: rate must be >= 0");
    const PairSampler sampler(model);
    const double two_r = std::exp2(r);
    std::vector<std::uint64_t> hits(streams, 0);
    auto shard_size = [&](std::uint64_t w) { return n / streams + (w < n % streams ? 1 : 0); };
    auto run_shard = [&](std::uint64_t w) {
        Rng rng(RngSpec{seed, w});
        hits[w] = count_outages(sampler, two_r, shard_size(w), rng);
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(streams)));
    if (threads == 1) {
        for (std::uint64_t w = 0; w < streams; ++w) run_shard(w);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::uint64_t w = t; w < streams; w += threads) run_shard(w);
            });
        }
        for (auto& th : pool) th.join();
    }
    std::uint64_t total = 0;
    for (auto h : hits) total += h;
    return finish(total, n, RngSpec{seed, 0}, streams);
}

McEstimate estimate_shadow_correlation(const WiretapModel& model, std::uint64_t n, const RngSpec& spec) {
    if (n < 2) throw DomainError("estimate_shadow_correlation: need n >= 2");
    const PairSampler sampler(model);
    Rng rng(spec);
    // Welford co-moments
    double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::uint64_t s = 1; s <= n; ++s) {
        const SnrDraw d = sampler(rng);
        const double dx = d.shadow1 - mx;
        const double dy = d.shadow2 - my;
        mx += dx / static_cast<double>(s);
        my += dy / static_cast<double>(s);
        sxx += dx * (d.shadow1 - mx);
        syy += dy * (d.shadow2 - my);
        sxy += dx * (d.shadow2 - my);
    }
    McEstimate e;
    e.n = n;
    e.rng = spec;
    e.mean = (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
    e.std_err = (n > 3) ? (1.0 - e.mean * e.mean) / std::sqrt(static_cast<double>(n - 3)) : 1.0;
    return e;
}

}  // namespace wiretap::mc
