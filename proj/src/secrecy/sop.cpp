#include <algorithm>
#include <cmath>
#include <string>

#include "wiretap/errors.hpp"
#include "wiretap/secrecy.hpp"
#include "wiretap/specfun.hpp"

namespace wiretap {

namespace sf = specfun;

namespace {

constexpr double kClampSlack = 1e-9;

struct GaussSeries {
    double non_outage = 0.0;
    // sum_ij p(i,j) |sum_k w_k e_k - 1|: how far the 15-point rule is from
    // integrating each outer density to one
    double rule_defect = 0.0;
};

struct LinkSide {
    double m, k, a;
};

// sum_{i,j} p(i,j) sum_k w_k e_o(t_k) S_in(h(t_k^4 / (4 a_o))), where the outer
// link's density is written with 2 sqrt(a_o x) = y^2 and K <-> U, and S_in is
// the survival of the inner link. `outer_on_n` selects whether the outer
// link's shadow shape steps with n = i + j (link 2) or with i (link 1).
GaussSeries gauss_series(const MixtureWeights& w, const LinkSide& outer, const LinkSide& inner, bool outer_on_n,
                         double r) {
    const auto& rule = sf::gauss_rule_15();
    const std::size_t nodes = rule.nodes.size();
    const int n = w.trunc.order, nj = w.trunc.active_j;
    const std::size_t len_n = static_cast<std::size_t>(n + nj - 1), len_i = static_cast<std::size_t>(n);
    const std::size_t len_outer = outer_on_n ? len_n : len_i;
    const std::size_t len_inner = outer_on_n ? len_i : len_n;

    // weighted outer factors, [l][k]
    std::vector<double> wo(len_outer * nodes), surv(len_inner * nodes);
    std::vector<double> lk(len_outer), sl(len_inner);
    const double lg_m = sf::lgamma_pos(outer.m);
    for (std::size_t q = 0; q < nodes; ++q) {
        const double t = rule.nodes[q];
        const double t2 = t * t;
        sf::log_bessel_k_scaled_descending(outer.m - outer.k, t2, lk);
        double lg_kappa = sf::lgamma_pos(outer.k);
        for (std::size_t l = 0; l < len_outer; ++l) {
            const double kappa = outer.k + static_cast<double>(l);
            if (l > 0) lg_kappa += std::log(kappa - 1.0);
            const double psi = outer.m - kappa;
            const double le = (3.0 - 2.0 * kappa) * sf::kLn2 - lg_m - lg_kappa + (4.0 * outer.m - 1.0) * std::log(t) +
                              lk[l] - psi * std::log(2.0 * t2);
            wo[l * nodes + q] = rule.weights[q] * std::exp(le);
        }
        const double x_outer = t2 * t2 / (4.0 * outer.a);
        gk_survival_ladder(inner.m, inner.k, inner.a, outage_threshold(x_outer, r), sl);
        for (std::size_t l = 0; l < len_inner; ++l) surv[l * nodes + q] = sl[l];
    }

    std::vector<double> mass(len_outer, 0.0);
    for (std::size_t l = 0; l < len_outer; ++l)
        for (std::size_t q = 0; q < nodes; ++q) mass[l] += wo[l * nodes + q];

    GaussSeries out;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < nj; ++j) {
            const std::size_t lo = static_cast<std::size_t>(outer_on_n ? i + j : i);
            const std::size_t li = static_cast<std::size_t>(outer_on_n ? i : i + j);
            double dot = 0.0;
            for (std::size_t q = 0; q < nodes; ++q) dot += wo[lo * nodes + q] * surv[li * nodes + q];
            const double p = w.at(i, j);
            out.non_outage += p * dot;
            out.rule_defect += p * std::abs(mass[lo] - 1.0);
        }
    }
    return out;
}

// Unclamped 1 - non_outage; tail_estimate carries truncation plus rule defect.
SecrecyResult sop_series(const WiretapModel& canonical, double r, const SeriesControl& ctrl, SopFormula formula) {
    const DerivedParams d = derived_params(canonical);
    const MixtureWeights w = mixture_weights(canonical, ctrl);
    const LinkSide l1{d.m1, d.k1, d.a1}, l2{d.m2, d.k2, d.a2};
    const GaussSeries g = (formula == SopFormula::corrected) ? gauss_series(w, l2, l1, true, r)
                                                              : gauss_series(w, l1, l2, false, r);
    SecrecyResult res;
    res.value = 1.0 - g.non_outage;
    res.terms_used = w.trunc.order;
    res.tail_estimate = w.trunc.mass_deficit + g.rule_defect;
    res.method = Method::series_quadrature;
    return res;
}

}  // namespace

std::string_view method_name(Method m) {
    switch (m) {
        case Method::series_quadrature:
            return "series_quadrature";
        case Method::series_closed:
            return "series_closed";
        case Method::oracle_2d:
            return "oracle_2d";
        case Method::asymptotic:
            return "asymptotic";
    }
    return "unknown";
}

double clamp_probability(double raw, std::string_view what, double slack) {
    slack = std::max(slack, kClampSlack);
    if (std::isnan(raw) || raw < -slack || raw > 1.0 + slack) {
        throw ConsistencyError(std::string(what) + ": probability " + std::to_string(raw) + " is outside [0, 1]");
    }
    return std::clamp(raw, 0.0, 1.0);
}

double outage_threshold(double x2, double r) {
    if (!(x2 >= 0.0) || !(r >= 0.0)) throw DomainError("outage_threshold: need x2 >= 0 and r >= 0");
    return (1.0 + x2) * std::exp2(r) - 1.0;
}

SecrecyResult sop(const WiretapModel& model, double r, const SeriesControl& ctrl, const SopOptions& opts) {
    model.validate();
    ctrl.validate();
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("sop: rate must be finite and >= 0");
    const CanonicalModel c = canonical_order(model);
    SecrecyResult res;
    bool use_oracle = c.swapped && r > 0.0;
    if (!use_oracle) {
        res = sop_series(c.model, r, ctrl, opts.formula);
        // the fixed 15-point rule cannot resolve mixture components whose
        // shadow shape has drifted far up (large rho); hand those to the oracle
        const bool unresolved = res.tail_estimate > opts.max_rule_defect;
        if (opts.formula == SopFormula::corrected && opts.oracle_fallback && unresolved) {
            use_oracle = true;
        } else {
            res.value = clamp_probability(res.value, "sop", res.tail_estimate);
            if (c.swapped) {
                // P_o(0) of the original is Pr[gamma_1' > gamma_2'] = 1 - P_o'(0) in the exchanged model
                res.value = 1.0 - res.value;
                res.swapped = true;
            }
        }
    }
    if (use_oracle) {
        res = sop_oracle(model, r, opts.quad_tol);
        res.swapped = c.swapped;
    }
    if (opts.guard && res.method != Method::oracle_2d) {
        const SecrecyResult o = sop_oracle(model, r, opts.quad_tol);
        if (std::abs(o.value - res.value) > opts.guard_tol) {
            throw ConsistencyError("sop: series value " + std::to_string(res.value) + " disagrees with the oracle " +
                                   std::to_string(o.value) + " beyond " + std::to_string(opts.guard_tol));
        }
    }
    return res;
}

TruncationReport truncation_report(const WiretapModel& model, const SeriesControl& ctrl) {
    const CanonicalModel c = canonical_order(model);
    TruncationReport rep;
    rep.trunc = choose_truncation(c.model, ctrl);
    const int n = rep.trunc.order, nj = rep.trunc.active_j;
    std::vector<double> p1(static_cast<std::size_t>(n)), p2(static_cast<std::size_t>(nj));
    nb_pmf(c.model.link_b.k, c.model.rho, p1);
    nb_pmf(c.model.link_e.k - c.model.link_b.k, c.model.rho, p2);
    double f2 = 0.0;
    for (double v : p2) f2 += v;
    rep.row_mass.resize(p1.size());
    for (std::size_t i = 0; i < p1.size(); ++i) rep.row_mass[i] = p1[i] * f2;
    return rep;
}

}  // namespace wiretap
