#pragma once

// Special-function kernel: gamma family, exponentially scaled Bessel K of real
// order, the Kummer U family tied to K, a small Meijer G engine, and the
// half-range Gauss rule for the weight exp(-x^2) on [0, inf).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wiretap::specfun {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kSqrtPi = 1.772453850905516027298167483341145183;
inline constexpr double kLn2 = 0.693147180559945309417232121458176568;

// ---------------------------------------------------------------- gamma family

struct LogGamma {
    double value;  // ln |Gamma(x)|
    int sign;      // sign of Gamma(x)
};

/// ln|Gamma(x)| and the sign of Gamma(x). Throws DomainError at x = 0, -1, -2, ...
LogGamma ln_gamma(double x);

/// Shorthand for ln_gamma(x).value when x > 0 is known.
double lgamma_pos(double x);

/// log Gamma(z) for complex z. Only exp() of the result is meaningful: the
/// imaginary part is correct modulo 2*pi.
std::complex<double> log_gamma(std::complex<double> z);

/// Rising factorial Gamma(x+n)/Gamma(x), with (x)_0 = 1 for every x.
double pochhammer(double x, unsigned n);

/// Natural log of |(x)_n|; -inf when (x)_n = 0.
double log_pochhammer(double x, unsigned n);

// --------------------------------------------------------------------- Bessel

/// e^x K_nu(x) for real nu and x > 0. Symmetric in nu. Returns +inf when the
/// value overflows a double; use log_bessel_k_scaled in that regime.
double bessel_k_scaled(double nu, double x);

/// ln(e^x K_nu(x)); finite for every x > 0 and every real nu.
double log_bessel_k_scaled(double nu, double x);

/// ln(e^x K_{nu0 + l}(x)) for l = 0 .. out.size()-1 (nu0 >= 0), by one seed
/// evaluation and upward recurrence.
void log_bessel_k_scaled_ladder(double nu0, double x, std::span<double> out);

/// ln(e^x K_{|nu_start - i|}(x)) for i = 0 .. out.size()-1: the order steps
/// down by one per entry and may cross zero.
void log_bessel_k_scaled_descending(double nu_start, double x, std::span<double> out);

/// U(nu + 1/2, 2 nu + 1, 2x), from K_nu(x) = sqrt(pi) e^-x (2x)^nu U(nu + 1/2, 2 nu + 1, 2x).
double kummer_u_bessel_family(double nu, double x);
double log_kummer_u_bessel_family(double nu, double x);

// ------------------------------------------------------------ Gauss rule

struct GaussRule {
    std::vector<double> nodes;    // strictly increasing, positive
    std::vector<double> weights;  // positive
};

/// n-point Gaussian rule for the integral over [0, inf) of exp(-x^2) f(x).
/// Built from the moments Gamma((k+1)/2)/2 with the Chebyshev algorithm in
/// extended precision, then the Jacobi matrix eigenvalues, Newton-polished.
GaussRule half_range_hermite_rule(std::size_t n);

/// The fixed 15-point rule; computed once, immutable afterwards.
const GaussRule& gauss_rule_15();

// ---------------------------------------------------------------- Meijer G

/// G^{m,n}_{p,q}[z | a; b] with p = a.size(), q = b.size().
struct MeijerSpec {
    int m = 0;
    int n = 0;
    std::vector<double> a;
    std::vector<double> b;

    int p() const { return static_cast<int>(a.size()); }
    int q() const { return static_cast<int>(b.size()); }

    /// Throws DomainError on bad sizes or when a pole of Gamma(b_j + s), j <= m,
    /// coincides with a pole of Gamma(1 - a_h - s), h <= n.
    void validate() const;
};

struct MeijerOptions {
    double rel_tol = 1e-12;
    // Evaluations whose estimated relative error exceeds this throw PrecisionError.
    double max_rel_error = 1e-7;
    // The returned value is G * exp(-log_scale); lets callers fold large
    // normalizing constants into the integrand.
    double log_scale = 0.0;
};

struct MeijerValue {
    double value;
    double error;
};

/// Evaluates the Meijer G-function for z > 0. Uses the Mellin-Barnes contour
/// when its integrand decays exponentially (m + n > (p + q)/2), and otherwise
/// the convergent residue series.
double meijer_g(const MeijerSpec& spec, double z, const MeijerOptions& opts = {});

/// Mellin-Barnes integral along the vertical line Re(s) = c separating the
/// two pole families, with c placed at the real saddle of the integrand.
MeijerValue meijer_g_contour(const MeijerSpec& spec, double z, const MeijerOptions& opts = {});

enum class ResidueSide { left, right };

/// Sum of residues on one side of the contour (left: poles of Gamma(b_j + s);
/// right: poles of Gamma(1 - a_h - s)). Integer-separated parameters on the
/// summed side are split by +-1e-6 and the two evaluations averaged.
MeijerValue meijer_g_residues(const MeijerSpec& spec, double z, ResidueSide side,
                              const MeijerOptions& opts = {});

}  // namespace wiretap::specfun
