#pragma once

// Goodness-of-fit helpers shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "wiretap/channel.hpp"
#include "wiretap/montecarlo.hpp"
#include "wiretap/quadrature.hpp"

namespace wiretap::testing {

/// Asymptotic Kolmogorov p-value for the one-sample statistic D at sample
/// size n, with the usual finite-n correction of the argument.
inline double ks_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lam = (sn + 0.12 + 0.11 / sn) * d;
    if (lam < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lam * lam);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// One-sample KS statistic of `xs` (sorted in place) against `cdf`.
inline double ks_statistic(std::vector<double>& xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

struct ChiSquare {
    double stat = 0.0;
    int dof = 0;
    double critical = 0.0;  // upper quantile at the requested significance
    double p_value = 0.0;
    bool pass() const { return stat <= critical; }
};

/// Pearson chi-square of counts against expected probabilities. Cells with
/// expected count below 5 are pooled into one.
inline ChiSquare chi_square(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs,
                            double significance) {
    double n = 0.0;
    for (auto c : counts) n += static_cast<double>(c);
    double stat = 0.0, pooled_o = 0.0, pooled_e = 0.0;
    int cells = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double e = n * probs[i];
        if (e < 5.0) {
            pooled_o += static_cast<double>(counts[i]);
            pooled_e += e;
            continue;
        }
        const double diff = static_cast<double>(counts[i]) - e;
        stat += diff * diff / e;
        ++cells;
    }
    if (pooled_e > 0.0) {
        const double diff = pooled_o - pooled_e;
        stat += diff * diff / std::max(pooled_e, 1e-300);
        ++cells;
    }
    ChiSquare r;
    r.stat = stat;
    r.dof = cells - 1;
    const boost::math::chi_squared dist(r.dof);
    r.critical = boost::math::quantile(boost::math::complement(dist, significance));
    r.p_value = boost::math::cdf(boost::math::complement(dist, stat));
    return r;
}

/// Bin edges splitting a link's marginal into `bins` equiprobable cells; the
/// last edge is the 1e-12 upper quantile instead of infinity.
inline std::vector<double> equiprobable_edges(const LinkParams& link, int bins) {
    std::vector<double> edges(static_cast<std::size_t>(bins + 1), 0.0);
    for (int b = 1; b < bins; ++b) {
        edges[static_cast<std::size_t>(b)] =
            gk_marginal_quantile_upper(link, 1.0 - static_cast<double>(b) / static_cast<double>(bins));
    }
    edges.back() = gk_marginal_quantile_upper(link, 1e-12);
    return edges;
}

/// Cell masses of the joint density over edges1 x edges2 (row-major in the
/// gamma_2 bin), by nested adaptive quadrature in square-root variables.
inline std::vector<double> cell_masses(const WiretapModel& model, const std::vector<double>& edges1,
                                       const std::vector<double>& edges2) {
    const CanonicalModel c = canonical_order(model);
    SeriesControl ctrl;
    ctrl.tail_tol = 1e-9;
    JointDensity dens(c.model, ctrl);
    // the density's row coordinate is the canonical second link
    const auto& e_row = c.swapped ? edges1 : edges2;
    const auto& e_col = c.swapped ? edges2 : edges1;
    const std::size_t nr = e_row.size() - 1, nc = e_col.size() - 1;
    std::vector<double> mass(nr * nc, 0.0);
    quad::Options qi;
    qi.abs_tol = 1e-11;
    qi.rel_tol = 1e-8;
    quad::Options qo = qi;
    for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t col = 0; col < nc; ++col) {
            const double lo = std::sqrt(e_col[col]), hi = std::sqrt(e_col[col + 1]);
            const auto res = quad::integrate(
                [&](double u) {
                    dens.set_row(u * u);
                    const auto in = quad::integrate([&](double v) { return 2.0 * v * dens(v * v); }, lo, hi, qi);
                    return 2.0 * u * in.value;
                },
                std::sqrt(e_row[r]), std::sqrt(e_row[r + 1]), qo);
            const std::size_t i1 = c.swapped ? r : col, i2 = c.swapped ? col : r;
            mass[i2 * (edges1.size() - 1) + i1] = res.value;
        }
    }
    return mass;
}

inline std::size_t bin_of(const std::vector<double>& edges, double x) {
    const auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, x);
    return static_cast<std::size_t>(it - (edges.begin() + 1));
}

/// 2D chi-square of sampled (gamma_1, gamma_2) pairs against cell_masses.
inline ChiSquare pair_chi_square(const WiretapModel& model, int bins, std::uint64_t n, std::uint64_t seed,
                                 double significance) {
    const auto e1 = equiprobable_edges(model.link_b, bins);
    const auto e2 = equiprobable_edges(model.link_e, bins);
    const auto probs = cell_masses(model, e1, e2);
    std::vector<std::uint64_t> counts(probs.size(), 0);
    mc::Rng rng(mc::RngSpec{seed, 0});
    const mc::PairSampler sampler(model);
    for (std::uint64_t s = 0; s < n; ++s) {
        const auto d = sampler(rng);
        ++counts[bin_of(e2, d.gamma2) * static_cast<std::size_t>(bins) + bin_of(e1, d.gamma1)];
    }
    return chi_square(counts, probs, significance);
}

}  // namespace wiretap::testing
