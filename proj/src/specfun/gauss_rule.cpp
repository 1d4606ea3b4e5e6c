#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wiretap/errors.hpp"
#include "wiretap/specfun.hpp"

namespace wiretap::specfun {

namespace {

#if defined(__SIZEOF_FLOAT128__) && !defined(__clang__)
using Wide = __float128;
#else
using Wide = long double;
#endif

// Recurrence coefficients (alpha_k, beta_k), k < n, of the monic orthogonal
// polynomials for exp(-x^2) on [0, inf), from the moments by the modified
// Chebyshev algorithm. The moment map is badly conditioned, so the work is
// done in the widest floating type available.
void recurrence_from_moments(std::size_t n, std::vector<long double>& alpha, std::vector<long double>& beta) {
    const std::size_t count = 2 * n;
    std::vector<Wide> mom(count + 1);
    // mu_l = Gamma((l+1)/2) / 2
    const Wide sqrt_pi = static_cast<Wide>(1.7724538509055160272981674833411452L);
    Wide g_half = sqrt_pi;  // Gamma(1/2), Gamma(3/2), ...
    Wide g_int = 1;         // Gamma(1), Gamma(2), ...
    for (std::size_t l = 0; l <= count; ++l) {
        if (l % 2 == 0) {
            // (l+1)/2 = j + 1/2 with j = l/2
            mom[l] = g_half / 2;
            g_half *= static_cast<Wide>(l / 2) + static_cast<Wide>(0.5L);
        } else {
            // (l+1)/2 = j with j = (l+1)/2
            mom[l] = g_int / 2;
            g_int *= static_cast<Wide>((l + 1) / 2);
        }
    }
    std::vector<Wide> a(n), b(n);
    std::vector<Wide> sig_prev(count + 1, 0), sig(mom), sig_new(count + 1, 0);
    a[0] = mom[1] / mom[0];
    b[0] = mom[0];
    for (std::size_t k = 1; k < n; ++k) {
        for (std::size_t l = k; l + k < count; ++l) {
            sig_new[l] = sig[l + 1] - a[k - 1] * sig[l] - b[k - 1] * sig_prev[l];
        }
        a[k] = sig_new[k + 1] / sig_new[k] - sig[k] / sig[k - 1];
        b[k] = sig_new[k] / sig[k - 1];
        if (!(b[k] > 0)) throw Error("gauss rule: moment recursion lost positivity at k = " + std::to_string(k));
        sig_prev.swap(sig);
        sig.swap(sig_new);
    }
    alpha.assign(n, 0.0L);
    beta.assign(n, 0.0L);
    for (std::size_t k = 0; k < n; ++k) {
        alpha[k] = static_cast<long double>(a[k]);
        beta[k] = static_cast<long double>(b[k]);
    }
}

// Eigenvalues of the symmetric tridiagonal matrix (diag d, off-diagonal e,
// e.size() == d.size(), last entry unused) by implicit QL.
void tridiagonal_eigenvalues(std::vector<long double>& d, std::vector<long double> e) {
    const int n = static_cast<int>(d.size());
    constexpr long double eps = 1e-19L;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const long double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (++iter > 60) throw Error("gauss rule: QL iteration did not converge");
                long double g = (d[l + 1] - d[l]) / (2.0L * e[l]);
                long double r = std::hypot(g, 1.0L);
                g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
                long double s = 1.0L, c = 1.0L, p = 0.0L;
                int i;
                for (i = m - 1; i >= l; --i) {
                    const long double f = s * e[i];
                    const long double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0L) {
                        d[i + 1] -= p;
                        e[m] = 0.0L;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0L * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0L && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0L;
            }
        } while (m != l);
    }
}

}  // namespace

GaussRule half_range_hermite_rule(std::size_t n) {
    if (n == 0) throw DomainError("gauss rule: need at least one point");
    std::vector<long double> alpha, beta;
    recurrence_from_moments(n, alpha, beta);

    std::vector<long double> d(alpha);
    std::vector<long double> e(n, 0.0L);
    for (std::size_t k = 0; k + 1 < n; ++k) e[k] = std::sqrt(beta[k + 1]);
    tridiagonal_eigenvalues(d, e);
    std::sort(d.begin(), d.end());

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        long double t = d[idx];
        // Newton on the monic pi_n
        for (int it = 0; it < 8; ++it) {
            long double p_prev = 0.0L, p = 1.0L, dp_prev = 0.0L, dp = 0.0L;
            for (std::size_t k = 0; k < n; ++k) {
                const long double bk = (k == 0) ? 0.0L : beta[k];
                const long double p_next = (t - alpha[k]) * p - bk * p_prev;
                const long double dp_next = p + (t - alpha[k]) * dp - bk * dp_prev;
                p_prev = p;
                p = p_next;
                dp_prev = dp;
                dp = dp_next;
            }
            const long double step = p / dp;
            t -= step;
            if (std::abs(step) <= 1e-21L * std::abs(t)) break;
        }
        // w = 1 / sum_k p_k(t)^2 over the orthonormal polynomials
        long double q_prev = 0.0L, q = 1.0L / std::sqrt(beta[0]);
        long double sum = q * q;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const long double bk = (k == 0) ? 0.0L : std::sqrt(beta[k]);
            const long double q_next = ((t - alpha[k]) * q - bk * q_prev) / std::sqrt(beta[k + 1]);
            q_prev = q;
            q = q_next;
            sum += q * q;
        }
        rule.nodes[idx] = static_cast<double>(t);
        rule.weights[idx] = static_cast<double>(1.0L / sum);
    }
    return rule;
}

const GaussRule& gauss_rule_15() {
    static const GaussRule rule = half_range_hermite_rule(15);
    return rule;
}

}  // namespace wiretap::specfun
