// Direct two-dimensional integration of the joint SNR density over the
// non-outage region. Both axes are integrated in square-root variables so
// the x^{(m+k)/2-1} behaviour at the origin is tamed.

#include <algorithm>
#include <cmath>

#include "wiretap/errors.hpp"
#include "wiretap/quadrature.hpp"
#include "wiretap/secrecy.hpp"

namespace wiretap {

SecrecyResult sop_oracle(const WiretapModel& model, double r, double quad_tol) {
    model.validate();
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("sop_oracle: rate must be finite and >= 0");
    if (!(quad_tol > 0.0)) throw DomainError("sop_oracle: quad_tol must be > 0");

    const CanonicalModel c = canonical_order(model);
    // outer axis is the canonical second coordinate, inner the first
    const LinkParams& outer_link = c.model.link_e;
    const LinkParams& inner_link = c.model.link_b;
    const double tail = quad_tol / 10.0;
    const double x_outer_max = gk_marginal_quantile_upper(outer_link, tail);
    const double x_inner_max = gk_marginal_quantile_upper(inner_link, tail);
    const double eps_outer = 1e-12 * outer_link.snr_avg, eps_inner = 1e-12 * inner_link.snr_avg;

    SeriesControl ctrl;
    ctrl.tail_tol = tail;
    JointDensity density(c.model, ctrl);

    const double two_r = std::exp2(r);
    // non-outage region: gamma_1 > h(gamma_2) in original coordinates
    auto inner_bounds = [&](double x_outer, double& lo, double& hi) {
        if (!c.swapped) {
            lo = std::max(eps_inner, outage_threshold(x_outer, r));
            hi = x_inner_max;
        } else {
            lo = eps_inner;
            hi = std::min(x_inner_max, (1.0 + x_outer) / two_r - 1.0);
        }
    };

    bool inner_failed = false;
    double inner_err_sum = 0.0;
    auto outer_integrand = [&](double u) {
        const double x_outer = u * u;
        double lo, hi;
        inner_bounds(x_outer, lo, hi);
        if (!(hi > lo)) return 0.0;
        density.set_row(x_outer);
        const double row = density.row_marginal();
        if (!(row > 0.0)) return 0.0;
        quad::Options qi;
        qi.abs_tol = 0.25 * quad_tol * row;
        qi.rel_tol = 0.0;
        qi.max_intervals = 400;
        const quad::Result ri = quad::integrate(
            [&](double v) {
                const double x = v * v;
                return 2.0 * v * density(x);
            },
            std::sqrt(lo), std::sqrt(hi), qi);
        if (!ri.converged) inner_failed = true;
        inner_err_sum += ri.error;
        return 2.0 * u * ri.value;
    };

    quad::Options qo;
    qo.abs_tol = 0.25 * quad_tol;
    qo.rel_tol = 0.0;
    qo.max_intervals = 400;
    qo.initial_intervals = 4;
    const quad::Result ro = quad::integrate(outer_integrand, std::sqrt(eps_outer), std::sqrt(x_outer_max), qo);

    const double non_outage = ro.value;
    const double err = ro.error + 4.0 * tail + density.truncation().mass_deficit;
    if (!ro.converged || inner_failed) {
        throw PrecisionError("sop_oracle: nested quadrature did not reach quad_tol", 1.0 - non_outage, err);
    }
    SecrecyResult res;
    res.value = clamp_probability(1.0 - non_outage, "sop_oracle", err);
    res.terms_used = density.truncation().order;
    res.tail_estimate = err;
    res.method = Method::oracle_2d;
    res.swapped = c.swapped;
    return res;
}

}  // namespace wiretap
