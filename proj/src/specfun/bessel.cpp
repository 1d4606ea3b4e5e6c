// Exponentially scaled modified Bessel function of the second kind, real order.
//
// For |mu| <= 1/2 the pair (K_mu, K_{mu+1}) comes from Temme's series when
// x <= 2 and from Steed's evaluation of the second continued fraction (CF2)
// when x > 2; larger orders follow by upward recurrence, which is stable for
// K. Everything is carried as e^x K so nothing underflows for large x, and
// the recurrence rescales on the fly so huge orders at tiny x stay finite in
// log form.

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "wiretap/errors.hpp"
#include "wiretap/specfun.hpp"

namespace wiretap::specfun {

namespace {

// Taylor coefficients of 1/Gamma(1+x) about 0.
constexpr std::array<double, 31> kRecipGamma = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
    -2.2987456844353702066e-19,
    1.7144063219273374334e-20,
    1.3373517304936931149e-22,
};

constexpr double kEps = 1e-17;
constexpr int kMaxIter = 100000;

struct TemmeGammas {
    double gam1;   // (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
    double gam2;   // (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
    double gampl;  // 1/Gamma(1+mu)
    double gammi;  // 1/Gamma(1-mu)
};

TemmeGammas temme_gammas(double mu) {
    double even = 0.0, odd = 0.0;
    double mu_pow = 1.0;
    double mu2 = mu * mu;
    // even part: sum c_{2k} mu^{2k}; odd part / mu: sum c_{2k+1} mu^{2k}
    for (std::size_t k = 0; k < kRecipGamma.size(); k += 2) {
        even += kRecipGamma[k] * mu_pow;
        if (k + 1 < kRecipGamma.size()) odd += kRecipGamma[k + 1] * mu_pow;
        mu_pow *= mu2;
    }
    TemmeGammas g;
    g.gampl = even + mu * odd;
    g.gammi = even - mu * odd;
    g.gam1 = -odd;
    g.gam2 = even;
    return g;
}

// Scaled pair (e^x K_mu(x), e^x K_{mu+1}(x)) for |mu| <= 1/2.
void scaled_pair(double mu, double x, double& kmu, double& kmu1) {
    const double xmu2 = mu * mu;
    if (x <= 2.0) {
        const double x2 = 0.5 * x;
        const double pimu = kPi * mu;
        const double fact = (std::abs(pimu) < 1e-15) ? 1.0 : pimu / std::sin(pimu);
        double d = -std::log(x2);
        double e = mu * d;
        const double fact2 = (std::abs(e) < 1e-15) ? 1.0 : std::sinh(e) / e;
        const TemmeGammas g = temme_gammas(mu);
        double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
        double sum = ff;
        e = std::exp(e);
        double p = 0.5 * e / g.gampl;
        double q = 0.5 / (e * g.gammi);
        double c = 1.0;
        d = x2 * x2;
        double sum1 = p;
        for (int i = 1; i <= kMaxIter; ++i) {
            ff = (i * ff + p + q) / (i * static_cast<double>(i) - xmu2);
            c *= d / i;
            p /= i - mu;
            q /= i + mu;
            const double del = c * ff;
            sum += del;
            const double del1 = c * (p - i * ff);
            sum1 += del1;
            if (std::abs(del) < std::abs(sum) * kEps) break;
        }
        const double ex = std::exp(x);
        kmu = sum * ex;
        kmu1 = sum1 * (2.0 / x) * ex;
        return;
    }
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - xmu2;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= kMaxIter; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    h = a1 * h;
    kmu = std::sqrt(kPi / (2.0 * x)) / s;
    kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

}  // namespace

void log_bessel_k_scaled_ladder(double nu0, double x, std::span<double> out) {
    if (!(x > 0.0)) throw DomainError("bessel_k: x must be positive");
    if (out.empty()) return;
    nu0 = std::abs(nu0);
    const int nl = static_cast<int>(nu0 + 0.5);
    const double mu = nu0 - nl;
    double k0 = 0.0, k1 = 0.0;
    scaled_pair(mu, x, k0, k1);
    double log_scale = 0.0;
    constexpr double kBig = 1e250;
    const double log_big = std::log(kBig);
    const double two_over_x = 2.0 / x;
    auto step = [&](double order) {
        // K_{order+1} = K_{order-1} + (2 order / x) K_order
        const double next = order * two_over_x * k1 + k0;
        k0 = k1;
        k1 = next;
        if (k1 > kBig) {
            k0 /= kBig;
            k1 /= kBig;
            log_scale += log_big;
        }
    };
    for (int i = 1; i <= nl; ++i) step(mu + i);
    out[0] = std::log(k0) + log_scale;
    for (std::size_t l = 1; l < out.size(); ++l) {
        step(nu0 + static_cast<double>(l));
        out[l] = std::log(k0) + log_scale;
    }
}

void log_bessel_k_scaled_descending(double nu_start, double x, std::span<double> out) {
    if (out.empty()) return;
    if (!(x > 0.0)) throw DomainError("bessel_k: x must be positive");
    const std::size_t count = out.size();
    // orders nu_start - i = frac + (fl - i); nonnegative branch ladders up from
    // frac, negative branch |frac + n| = (1 - frac) + (-n - 1) ladders from 1 - frac
    const double fl = std::floor(nu_start);
    const double frac = nu_start - fl;
    const long long top = static_cast<long long>(fl);
    const long long bottom = top - static_cast<long long>(count) + 1;
    std::vector<double> up, down;
    if (top >= 0) {
        up.resize(static_cast<std::size_t>(top + 1));
        log_bessel_k_scaled_ladder(frac, x, up);
    }
    if (bottom < 0) {
        down.resize(static_cast<std::size_t>(-bottom));
        log_bessel_k_scaled_ladder(1.0 - frac, x, down);
    }
    for (std::size_t i = 0; i < count; ++i) {
        const long long n = top - static_cast<long long>(i);
        out[i] = (n >= 0) ? up[static_cast<std::size_t>(n)] : down[static_cast<std::size_t>(-n - 1)];
    }
}

double log_bessel_k_scaled(double nu, double x) {
    double v = 0.0;
    log_bessel_k_scaled_ladder(nu, x, std::span<double>(&v, 1));
    return v;
}

double bessel_k_scaled(double nu, double x) { return std::exp(log_bessel_k_scaled(nu, x)); }

double log_kummer_u_bessel_family(double nu, double x) {
    return log_bessel_k_scaled(nu, x) - nu * std::log(2.0 * x) - 0.5 * std::log(kPi);
}

double kummer_u_bessel_family(double nu, double x) { return std::exp(log_kummer_u_bessel_family(nu, x)); }

}  // namespace wiretap::specfun
