#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wiretap/errors.hpp"
#include "wiretap/specfun.hpp"

namespace wiretap::specfun {

namespace {

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// ln sin(pi z), stable for large |Im z| where sin itself overflows.
std::complex<double> log_sin_pi(std::complex<double> z) {
    using C = std::complex<double>;
    const C i_unit(0.0, 1.0);
    if (std::abs(z.imag()) < 8.0) return std::log(std::sin(kPi * z));
    if (z.imag() > 0.0) {
        return -i_unit * kPi * z + std::log(0.5 * i_unit) + std::log(1.0 - std::exp(2.0 * i_unit * kPi * z));
    }
    return i_unit * kPi * z - std::log(2.0 * i_unit) + std::log(1.0 - std::exp(-2.0 * i_unit * kPi * z));
}

}  // namespace

LogGamma ln_gamma(double x) {
    if (is_nonpositive_integer(x) || std::isnan(x)) {
        throw DomainError("ln_gamma: pole at x = " + std::to_string(x));
    }
#if defined(__GLIBC__) || defined(__APPLE__)
    int sign = 1;
    const double v = ::lgamma_r(x, &sign);
    return {v, sign};
#else
    // Gamma(x) < 0 exactly when x < 0 and floor(x) is odd.
    const int sign = (x < 0.0 && static_cast<long long>(std::floor(x)) % 2 != 0) ? -1 : 1;
    return {std::lgamma(x), sign};
#endif
}

double lgamma_pos(double x) { return ln_gamma(x).value; }

std::complex<double> log_gamma(std::complex<double> z) {
    using C = std::complex<double>;
    if (z.real() < 0.5) {
        // reflection; a pole gives +inf real part, which exp() maps correctly
        return std::log(kPi) - log_sin_pi(z) - log_gamma(1.0 - z);
    }
    C w = z;
    C prod = 1.0;
    while (std::abs(w) < 15.0) {
        prod *= w;
        w += 1.0;
    }
    const C inv = 1.0 / w;
    const C inv2 = inv * inv;
    // Stirling series, Bernoulli terms B_2k / (2k (2k-1))
    const C series =
        inv * (1.0 / 12.0 +
               inv2 * (-1.0 / 360.0 +
                       inv2 * (1.0 / 1260.0 +
                               inv2 * (-1.0 / 1680.0 +
                                       inv2 * (1.0 / 1188.0 +
                                               inv2 * (-691.0 / 360360.0 +
                                                       inv2 * (1.0 / 156.0 + inv2 * (-3617.0 / 122400.0))))))));
    constexpr double half_log_two_pi = 0.918938533204672741780329736405617640;
    return (w - 0.5) * std::log(w) - w + half_log_two_pi + series - std::log(prod);
}

double pochhammer(double x, unsigned n) {
    if (n == 0) return 1.0;
    if (is_nonpositive_integer(x)) {
        // the product x (x+1) ... (x+n-1) passes through zero
        if (x + n - 1 >= 0.0) return 0.0;
    }
    if (n <= 32) {
        double p = 1.0;
        for (unsigned i = 0; i < n; ++i) p *= x + i;
        return p;
    }
    if (is_nonpositive_integer(x)) {
        // all factors negative integers: (x)_n = (-1)^n (-x)! / (-x-n)!
        const double v = std::lgamma(1.0 - x) - std::lgamma(1.0 - x - n);
        return (n % 2 ? -1.0 : 1.0) * std::exp(v);
    }
    const LogGamma num = ln_gamma(x + n);
    const LogGamma den = ln_gamma(x);
    return num.sign * den.sign * std::exp(num.value - den.value);
}

double log_pochhammer(double x, unsigned n) {
    if (n == 0) return 0.0;
    const double p = pochhammer(x, std::min(n, 32u));
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (n <= 32) return std::log(std::abs(p));
    if (x > 0.0) return lgamma_pos(x + n) - lgamma_pos(x);
    return std::log(std::abs(pochhammer(x, n)));
}

}  // namespace wiretap::specfun
