#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "wiretap/channel.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/quadrature.hpp"
#include "wiretap/specfun.hpp"

namespace wiretap {

namespace sf = specfun;

namespace {

constexpr double kLn2 = sf::kLn2;

// ln f_GK(x; m, k0 + l, a) for l = 0 .. out.size()-1, sharing one Bessel ladder.
void gk_log_pdf_ladder(double m, double k0, double a, double x, std::span<double> out) {
    if (out.empty()) return;
    const double z = a * x;
    const double arg = 2.0 * std::sqrt(z);
    sf::log_bessel_k_scaled_descending(m - k0, arg, out);
    const double ln_z = std::log(z), ln_x = std::log(x);
    const double base = kLn2 - sf::lgamma_pos(m) - arg - ln_x;
    double lg = sf::lgamma_pos(k0);
    for (std::size_t l = 0; l < out.size(); ++l) {
        const double k = k0 + static_cast<double>(l);
        if (l > 0) lg += std::log(k - 1.0);
        out[l] += base + 0.5 * (m + k) * ln_z - lg;
    }
}

double log_sum_exp(std::span<const double> v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

// Pr[G(m) G(k) > z] (upper) or Pr[G(m) G(k) <= z], by conditioning on the
// shadow variate: E[Q(m, z / G(k))] or E[P(m, z / G(k))]. In u = ln G(k) the
// log-integrand is concave, so the mass sits in one bump around its maximum
// and neither tail suffers cancellation. The Meijer G forms are kept for the
// test suite; in the bulk they are two orders of magnitude slower here.
double gk_tail(double m, double k, double z, bool upper) {
    const double lgk = sf::lgamma_pos(k);
    const double ln_z = std::log(z);
    // Boost returns P and Q each to full relative accuracy
    using Policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;
    auto ln_t = [&](double x) {
        return std::log(upper ? boost::math::gamma_q(m, x, Policy()) : boost::math::gamma_p(m, x, Policy()));
    };
    auto phi = [&](double u) { return k * u - std::exp(u) - lgk + ln_t(std::exp(ln_z - u)); };

    // bracket the maximum, starting from the mode of ln G(k)
    double u0 = std::log(k), f0 = phi(u0);
    double step = 1.0;
    const double dir = (phi(u0 + 1e-3) >= f0) ? 1.0 : -1.0;
    double u1 = u0 + dir * step, f1 = phi(u1);
    double u_prev = u0;
    for (int it = 0; it < 200 && f1 >= f0; ++it) {
        u_prev = u0;
        u0 = u1;
        f0 = f1;
        step *= 1.6;
        u1 = u0 + dir * step;
        f1 = phi(u1);
    }
    double a = std::min(u_prev, u1), b = std::max(u_prev, u1);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double p1 = phi(x1), p2 = phi(x2);
    for (int it = 0; it < 60 && b - a > 1e-6; ++it) {
        if (p1 > p2) {
            b = x2;
            x2 = x1;
            p2 = p1;
            x1 = b - g * (b - a);
            p1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            p1 = p2;
            x2 = a + g * (b - a);
            p2 = phi(x2);
        }
    }
    const double u_star = 0.5 * (a + b);
    const double peak = phi(u_star);
    if (!std::isfinite(peak)) return 0.0;

    // concavity: step out until 40 e-folds below the peak
    constexpr double kDrop = 40.0;
    auto edge = [&](double sgn) {
        double h = 0.5;
        double u = u_star + sgn * h;
        while (phi(u) > peak - kDrop && h < 1e4) {
            h *= 2.0;
            u = u_star + sgn * h;
        }
        return u;
    };
    const double lo = edge(-1.0), hi = edge(1.0);
    quad::Options o;
    o.abs_tol = 0.0;
    o.rel_tol = 1e-13;
    o.initial_intervals = 4;
    const quad::Result r = quad::integrate([&](double u) { return std::exp(phi(u) - peak); }, lo, hi, o);
    return r.value * std::exp(peak);
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double gk_log_pdf(double m, double k, double a, double x) {
    if (!(x > 0.0)) throw DomainError("generalized-K density: x must be > 0");
    double v = 0.0;
    gk_log_pdf_ladder(m, k, a, x, std::span<double>(&v, 1));
    return v;
}

double gk_pdf(double m, double k, double a, double x) { return std::exp(gk_log_pdf(m, k, a, x)); }

double gk_survival(double m, double k, double a, double y) {
    if (!(y > 0.0)) return 1.0;
    if (std::isinf(y)) return 0.0;
    return clamp_unit(gk_tail(m, k, a * y, true));
}

double gk_cdf(double m, double k, double a, double y) {
    if (!(y > 0.0)) return 0.0;
    if (std::isinf(y)) return 1.0;
    return clamp_unit(gk_tail(m, k, a * y, false));
}

void gk_survival_ladder(double m, double k0, double a, double y, std::span<double> out) {
    if (out.empty()) return;
    if (!(y > 0.0)) {
        std::fill(out.begin(), out.end(), 1.0);
        return;
    }
    out[0] = gk_survival(m, k0, a, y);
    if (out.size() == 1) return;
    const double z = a * y;
    const double arg = 2.0 * std::sqrt(z);
    const std::size_t steps = out.size() - 1;
    std::vector<double> lk(steps);
    sf::log_bessel_k_scaled_descending(m - k0, arg, lk);
    const double ln_z = std::log(z);
    const double base = kLn2 - sf::lgamma_pos(m) - arg;
    double lg = sf::lgamma_pos(k0 + 1.0);
    for (std::size_t l = 0; l < steps; ++l) {
        const double k = k0 + static_cast<double>(l);
        if (l > 0) lg += std::log(k);
        const double inc = std::exp(base + 0.5 * (m + k) * ln_z + lk[l] - lg);
        out[l + 1] = std::min(1.0, out[l] + inc);
    }
}

double gk_marginal_pdf(const LinkParams& link, double x) {
    link.validate();
    return gk_pdf(link.m, link.k, link.m * link.k / link.snr_avg, x);
}

double gk_marginal_cdf(const LinkParams& link, double x) {
    link.validate();
    return gk_cdf(link.m, link.k, link.m * link.k / link.snr_avg, x);
}

double gk_marginal_survival(const LinkParams& link, double x) {
    link.validate();
    return gk_survival(link.m, link.k, link.m * link.k / link.snr_avg, x);
}

double gk_marginal_quantile_upper(const LinkParams& link, double tail) {
    if (!(tail > 0.0 && tail < 1.0)) throw DomainError("quantile: tail must lie in (0, 1)");
    double hi = link.snr_avg;
    while (gk_marginal_survival(link, hi) > tail) hi *= 2.0;
    double lo = hi / 2.0;
    for (int it = 0; it < 60 && hi / lo > 1.0 + 1e-10; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (gk_marginal_survival(link, mid) > tail)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

DensityValue joint_snr_pdf(const WiretapModel& model, double x1, double x2, const SeriesControl& ctrl) {
    if (!(x1 > 0.0) || !(x2 > 0.0)) throw DomainError("joint_snr_pdf: x1 and x2 must be > 0");
    const CanonicalModel c = canonical_order(model);
    if (c.swapped) std::swap(x1, x2);
    const DerivedParams d = derived_params(c.model);
    const MixtureWeights w = mixture_weights(c.model, ctrl);
    const int n = w.trunc.order, nj = w.trunc.active_j;

    std::vector<double> lf1(static_cast<std::size_t>(n)), lf2(static_cast<std::size_t>(n + nj - 1));
    gk_log_pdf_ladder(d.m1, d.k1, d.a1, x1, lf1);
    gk_log_pdf_ladder(d.m2, d.k2, d.a2, x2, lf2);

    double sum = 0.0, largest = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < nj; ++j) {
            const double comp = std::exp(lf1[static_cast<std::size_t>(i)] + lf2[static_cast<std::size_t>(i + j)]);
            largest = std::max(largest, comp);
            sum += w.at(i, j) * comp;
        }
    }
    DensityValue out;
    out.value = sum;
    out.terms_used = n;
    out.tail_estimate = w.trunc.mass_deficit * largest;
    return out;
}

double joint_snr_pdf_asymptotic(const WiretapModel& model, double x1, double x2) {
    if (!(x1 > 0.0) || !(x2 > 0.0)) throw DomainError("joint_snr_pdf_asymptotic: x1 and x2 must be > 0");
    const DerivedParams d = derived_params(model);
    const double lv = model.link_e.k * std::log1p(-model.rho) + gk_log_pdf(d.m1, d.k1, d.a1, x1) +
                      gk_log_pdf(d.m2, d.k2, d.a2, x2);
    return std::exp(lv);
}

JointDensity::JointDensity(const WiretapModel& canonical, const SeriesControl& ctrl)
    : d_(derived_params(canonical)), weights_(mixture_weights(canonical, ctrl)) {
    const int n = weights_.trunc.order, nj = weights_.trunc.active_j;
    log_g_.assign(static_cast<std::size_t>(n), 0.0);
    scratch_.assign(static_cast<std::size_t>(n + nj - 1), 0.0);
}

void JointDensity::set_row(double x2) {
    if (!(x2 > 0.0)) throw DomainError("JointDensity: x2 must be > 0");
    const int n = weights_.trunc.order, nj = weights_.trunc.active_j;
    std::vector<double>& lf2 = scratch_;
    lf2.resize(static_cast<std::size_t>(n + nj - 1));
    gk_log_pdf_ladder(d_.m2, d_.k2, d_.a2, x2, lf2);
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : lf2) mx = std::max(mx, v);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < nj; ++j) s += weights_.at(i, j) * std::exp(lf2[static_cast<std::size_t>(i + j)] - mx);
        log_g_[static_cast<std::size_t>(i)] = (s > 0.0) ? std::log(s) + mx : -std::numeric_limits<double>::infinity();
    }
    row_empty_ = false;
}

double JointDensity::operator()(double x1) const {
    if (row_empty_) throw Error("JointDensity: set_row() must be called first");
    if (!(x1 > 0.0)) throw DomainError("JointDensity: x1 must be > 0");
    const std::size_t n = log_g_.size();
    scratch_.resize(n);
    gk_log_pdf_ladder(d_.m1, d_.k1, d_.a1, x1, scratch_);
    for (std::size_t i = 0; i < n; ++i) scratch_[i] += log_g_[i];
    return std::exp(log_sum_exp(scratch_));
}

double JointDensity::row_marginal() const {
    if (row_empty_) throw Error("JointDensity: set_row() must be called first");
    return std::exp(log_sum_exp(log_g_));
}

}  // namespace wiretap
