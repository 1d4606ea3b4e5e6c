#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "wiretap/channel.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/specfun.hpp"

namespace wiretap {

namespace {

bool finite_all(std::initializer_list<double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

void LinkParams::validate() const {
    if (!finite_all({m, k, snr_avg})) throw DomainError("link parameters must be finite");
    if (m < 0.5) throw DomainError("Nakagami shape m must be >= 0.5, got " + std::to_string(m));
    if (!(k > 0.0)) throw DomainError("shadowing shape k must be > 0, got " + std::to_string(k));
    if (!(snr_avg > 0.0)) throw DomainError("average SNR must be > 0");
}

void WiretapModel::validate() const {
    link_b.validate();
    link_e.validate();
    if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("rho must lie in [0, 1), got " + std::to_string(rho));
}

void SeriesControl::validate() const {
    if (!(tail_tol > 0.0) || !std::isfinite(tail_tol)) throw DomainError("tail_tol must be > 0");
    if (max_terms < 1) throw DomainError("max_terms must be >= 1");
}

DerivedParams derived_params(const WiretapModel& model) {
    model.validate();
    DerivedParams d;
    d.m1 = model.link_b.m;
    d.k1 = model.link_b.k;
    d.m2 = model.link_e.m;
    d.k2 = model.link_e.k;
    d.a1 = d.m1 * d.k1 / ((1.0 - model.rho) * model.link_b.snr_avg);
    d.a2 = d.m2 * d.k2 / ((1.0 - model.rho) * model.link_e.snr_avg);
    return d;
}

CanonicalModel canonical_order(const WiretapModel& model) {
    CanonicalModel c{model, false};
    if (model.link_b.k > model.link_e.k) {
        std::swap(c.model.link_b, c.model.link_e);
        c.swapped = true;
    }
    return c;
}

double nb_log_pmf(double k, double rho, int i) {
    if (i < 0) return -INFINITY;
    if (i == 0) return k * std::log1p(-rho);
    if (k == 0.0 || rho == 0.0) return -INFINITY;
    return k * std::log1p(-rho) + specfun::lgamma_pos(k + i) - specfun::lgamma_pos(k) + i * std::log(rho) -
           std::lgamma(i + 1.0);
}

void nb_pmf(double k, double rho, std::span<double> out) {
    if (out.empty()) return;
    double lp = k * std::log1p(-rho);
    out[0] = std::exp(lp);
    const bool degenerate = (k == 0.0 || rho == 0.0);
    const double log_rho = degenerate ? 0.0 : std::log(rho);
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (degenerate) {
            out[i] = 0.0;
            continue;
        }
        lp += std::log((k + static_cast<double>(i) - 1.0) / static_cast<double>(i)) + log_rho;
        out[i] = std::exp(lp);
    }
}

Truncation choose_truncation(const WiretapModel& canonical, const SeriesControl& ctrl) {
    canonical.validate();
    ctrl.validate();
    const double k1 = canonical.link_b.k;
    const double dk = canonical.link_e.k - k1;
    if (dk < 0.0) throw DomainError("choose_truncation: model is not in canonical order (k1 > k2)");
    const double rho = canonical.rho;

    Truncation t;
    t.capped = false;
    const bool j_trivial = (dk == 0.0 || rho == 0.0);
    // running pmf values in log form so large shapes do not underflow the start
    double lp1 = k1 * std::log1p(-rho), lp2 = dk * std::log1p(-rho);
    double f1 = std::exp(lp1), f2 = std::exp(lp2);
    const double log_rho = (rho > 0.0) ? std::log(rho) : 0.0;
    int n = 1;
    for (;;) {
        const double t1 = std::max(0.0, 1.0 - f1), t2 = std::max(0.0, 1.0 - f2);
        const double deficit = t1 + t2 - t1 * t2;
        if (deficit < ctrl.tail_tol || rho == 0.0) {
            t.mass_deficit = deficit;
            break;
        }
        if (n >= ctrl.max_terms) {
            t.mass_deficit = deficit;
            t.capped = true;
            break;
        }
        // extend both indices to n
        lp1 += std::log((k1 + n - 1.0) / n) + log_rho;
        f1 += std::exp(lp1);
        if (!j_trivial) {
            lp2 += std::log((dk + n - 1.0) / n) + log_rho;
            f2 += std::exp(lp2);
        }
        ++n;
    }
    t.order = n;
    t.active_j = j_trivial ? 1 : n;
    return t;
}

MixtureWeights mixture_weights(const WiretapModel& canonical, const SeriesControl& ctrl) {
    MixtureWeights w;
    w.trunc = choose_truncation(canonical, ctrl);
    if (w.trunc.capped) {
        throw PrecisionError("series truncation reached max_terms = " + std::to_string(ctrl.max_terms) +
                                 " before the tail tolerance",
                             1.0 - w.trunc.mass_deficit, w.trunc.mass_deficit);
    }
    const int n = w.trunc.order, nj = w.trunc.active_j;
    std::vector<double> p1(static_cast<std::size_t>(n)), p2(static_cast<std::size_t>(nj));
    nb_pmf(canonical.link_b.k, canonical.rho, p1);
    nb_pmf(canonical.link_e.k - canonical.link_b.k, canonical.rho, p2);
    w.p.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(nj));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < nj; ++j) w.p[static_cast<std::size_t>(i * nj + j)] = p1[i] * p2[j];
    return w;
}

}  // namespace wiretap
