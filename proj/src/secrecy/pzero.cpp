// P_o(0) = Pr[gamma_2 > gamma_1].
//
// Component (i, j) contributes Pr[G(m2) G(k2+n) / A2 > G(m1) G(k1+i) / A1],
// n = i + j, which is
//   G^{2,3}_{3,3}[A1/A2 | 1, 1-m2, 1-k2-n; k1+i, m1, 0] / (Gamma(m1) Gamma(m2) Gamma(k1+i) Gamma(k2+n)).
// Its Mellin-Barnes integrand is
//   Gamma(k1+i+s) Gamma(m1+s) Gamma(m2-s) Gamma(k2+n-s) (-1/s) z^{-s} / (...),
// so every component shares the strip -min(k1, m1) < Re s < 0 and the whole
// mixture can go under one integral. The Gamma ratios in i and n are built by
// multiplication along the ladder.

#include <algorithm>
#include <cmath>
#include <complex>

#include "wiretap/errors.hpp"
#include "wiretap/quadrature.hpp"
#include "wiretap/secrecy.hpp"
#include "wiretap/specfun.hpp"

namespace wiretap {

namespace sf = specfun;

namespace {

using Complex = std::complex<double>;

class SharedIntegrand {
public:
    SharedIntegrand(const DerivedParams& d, const MixtureWeights& w)
        : d_(d), w_(w), lnz_(std::log(d.a1 / d.a2)), lg_m_(sf::lgamma_pos(d.m1) + sf::lgamma_pos(d.m2)) {
        const int n = w.trunc.order, nj = w.trunc.active_j;
        l1_.resize(static_cast<std::size_t>(n));
        l2_.resize(static_cast<std::size_t>(n + nj - 1));
    }

    // sum_{i,j} p(i,j) Gamma(k1+i+s)/Gamma(k1+i) * Gamma(k2+n-s)/Gamma(k2+n)
    Complex mixture(Complex s) const {
        const int n = w_.trunc.order, nj = w_.trunc.active_j;
        Complex g1 = 1.0;
        for (int i = 0; i < n; ++i) {
            if (i > 0) {
                const double kk = d_.k1 + i - 1;
                g1 *= (kk + s) / kk;
            }
            l1_[static_cast<std::size_t>(i)] = g1;
        }
        Complex g2 = 1.0;
        for (int m = 0; m < n + nj - 1; ++m) {
            if (m > 0) {
                const double kk = d_.k2 + m - 1;
                g2 *= (kk - s) / kk;
            }
            l2_[static_cast<std::size_t>(m)] = g2;
        }
        Complex acc = 0.0;
        for (int i = 0; i < n; ++i) {
            Complex row = 0.0;
            for (int j = 0; j < nj; ++j) row += w_.at(i, j) * l2_[static_cast<std::size_t>(i + j)];
            acc += row * l1_[static_cast<std::size_t>(i)];
        }
        return acc;
    }

    // ln of the i = n = 0 part without the mixture: the Gamma(k1+s) Gamma(k2-s) pair
    // is kept in log form so the ladders above only carry ratios of order one
    Complex log_base(Complex s) const {
        return sf::log_gamma(d_.k1 + s) - sf::lgamma_pos(d_.k1) + sf::log_gamma(d_.k2 - s) - sf::lgamma_pos(d_.k2) +
               sf::log_gamma(d_.m1 + s) + sf::log_gamma(d_.m2 - s) - lg_m_ - std::log(-s) - s * lnz_;
    }

    Complex value(Complex s) const { return std::exp(log_base(s)) * mixture(s); }

    double log_abs_real(double c) const {
        const double v = std::real(mixture(Complex(c, 0.0)));
        return log_base(Complex(c, 0.0)).real() + std::log(v);
    }

private:
    const DerivedParams& d_;
    const MixtureWeights& w_;
    double lnz_;
    double lg_m_;
    mutable std::vector<Complex> l1_, l2_;
};

double pzero_shared(const DerivedParams& d, const MixtureWeights& w, double& err_out) {
    const SharedIntegrand f(d, w);
    const double lo = -std::min(d.k1, d.m1), hi = 0.0;
    // real saddle of the integrand inside the strip
    const double margin = std::min(0.02, 0.01 * (hi - lo));
    double a = lo + margin, b = hi - margin;
    {
        constexpr int kGrid = 48;
        double best = INFINITY;
        int best_k = 0;
        for (int k = 0; k <= kGrid; ++k) {
            const double c = a + (b - a) * k / kGrid;
            const double v = f.log_abs_real(c);
            if (v < best) {
                best = v;
                best_k = k;
            }
        }
        const double h = (b - a) / kGrid;
        const double a2 = a + std::max(0, best_k - 1) * h, b2 = a + std::min(kGrid, best_k + 1) * h;
        a = a2;
        b = b2;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - g * (b - a), x2 = a + g * (b - a);
        double f1 = f.log_abs_real(x1), f2 = f.log_abs_real(x2);
        for (int it = 0; it < 30; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = f.log_abs_real(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = f.log_abs_real(x2);
            }
        }
    }
    const double c = 0.5 * (a + b);
    const double peak = std::abs(f.value(Complex(c, 0.0)));

    // |integrand| decays like exp(-pi t) times powers; march out to 1e-16 of the peak
    double t = 1.0;
    while (t < 4000.0 && std::abs(f.value(Complex(c, t))) > 1e-16 * peak) t *= 1.3;
    t = std::max(t, 4.0);

    quad::Options qo;
    qo.abs_tol = 1e-13 * peak;
    qo.rel_tol = 1e-12;
    qo.max_intervals = 2000;
    qo.initial_intervals = std::clamp(static_cast<int>(t * (1.0 + std::abs(std::log(d.a1 / d.a2))) / 2.0), 4, 400);
    const quad::Result r = quad::integrate([&](double tt) { return f.value(Complex(c, tt)).real(); }, 0.0, t, qo);
    if (!r.converged) {
        throw PrecisionError("pzero: contour integral did not converge", r.value / sf::kPi, r.error / sf::kPi);
    }
    err_out = r.error / sf::kPi;
    return r.value / sf::kPi;
}

double pzero_term_by_term(const DerivedParams& d, const MixtureWeights& w, double& err_out) {
    const int n = w.trunc.order, nj = w.trunc.active_j;
    const double z = d.a1 / d.a2;
    const double lg_m = sf::lgamma_pos(d.m1) + sf::lgamma_pos(d.m2);
    double sum = 0.0, err = 0.0;
    for (int i = 0; i < n; ++i) {
        const double k1i = d.k1 + i;
        for (int j = 0; j < nj; ++j) {
            const double k2n = d.k2 + i + j;
            sf::MeijerSpec spec{2, 3, {1.0, 1.0 - d.m2, 1.0 - k2n}, {k1i, d.m1, 0.0}};
            sf::MeijerOptions o;
            o.log_scale = lg_m + sf::lgamma_pos(k1i) + sf::lgamma_pos(k2n);
            const sf::MeijerValue g = sf::meijer_g_contour(spec, z, o);
            sum += w.at(i, j) * g.value;
            err += w.at(i, j) * g.error;
        }
    }
    err_out = err;
    return sum;
}

}  // namespace

SecrecyResult pzero(const WiretapModel& model, const SeriesControl& ctrl, PzeroRoute route) {
    model.validate();
    ctrl.validate();
    const CanonicalModel c = canonical_order(model);
    const DerivedParams d = derived_params(c.model);
    const MixtureWeights w = mixture_weights(c.model, ctrl);
    double err = 0.0;
    const double raw =
        (route == PzeroRoute::shared_contour) ? pzero_shared(d, w, err) : pzero_term_by_term(d, w, err);
    SecrecyResult res;
    res.terms_used = w.trunc.order;
    res.tail_estimate = w.trunc.mass_deficit + err;
    res.method = Method::series_closed;
    res.swapped = c.swapped;
    const double v = clamp_probability(raw, "pzero");
    res.value = c.swapped ? 1.0 - v : v;
    return res;
}

SecrecyResult pnzsc(const WiretapModel& model, const SeriesControl& ctrl) {
    SecrecyResult r = pzero(model, ctrl);
    r.value = 1.0 - r.value;
    return r;
}

double pzero_asymptotic(const WiretapModel& model) {
    model.validate();
    const double m1 = model.link_b.m, k1 = model.link_b.k, m2 = model.link_e.m, k2 = model.link_e.k;
    if (k1 == m1) {
        throw UnsupportedParameters("pzero_asymptotic: k1 == m1 is the logarithmic boundary case, not supported");
    }
    const double alpha = std::min(k1, m1);
    const double ratio = m1 * k1 * model.link_e.snr_avg / (m2 * k2 * model.link_b.snr_avg);
    const double lv = k2 * std::log1p(-model.rho) + sf::lgamma_pos(std::abs(k1 - m1)) + sf::lgamma_pos(k2 + alpha) +
                      sf::lgamma_pos(m2 + alpha) - std::log(alpha) - sf::lgamma_pos(m1) - sf::lgamma_pos(m2) -
                      sf::lgamma_pos(k1) - sf::lgamma_pos(k2) + alpha * std::log(ratio);
    return std::exp(lv);
}

}  // namespace wiretap
