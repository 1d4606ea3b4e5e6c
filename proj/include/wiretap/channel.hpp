#pragma once

// Correlated composite Nakagami-m / Gamma wiretap channel at SNR level.
//
// The joint density of (gamma_1, gamma_2) is handled as a discrete mixture
//
//   f(x1, x2) = sum_{i,j} p(i,j) f_GK(x1; m1, k1+i, A1) f_GK(x2; m2, k2+i+j, A2)
//
// where p(i,j) = NB(i; k1, rho) NB(j; k2-k1, rho) is a product of two
// negative-binomial pmfs and f_GK is the generalized-K density. This needs
// k2 >= k1; canonical_order() exchanges the links when it does not hold.

#include <cstddef>
#include <span>
#include <vector>

namespace wiretap {

struct LinkParams {
    double m = 1.0;        // Nakagami shape, >= 0.5
    double k = 1.0;        // shadowing Gamma shape, > 0
    double snr_avg = 1.0;  // average SNR, linear

    void validate() const;
};

/// link_b is the legitimate link (gamma_1), link_e the eavesdropper (gamma_2).
/// Note: the average eavesdropper SNR is simply taken as given; the noise
/// variance that defines it physically never enters at this level.
struct WiretapModel {
    LinkParams link_b;
    LinkParams link_e;
    double rho = 0.0;  // shadow correlation, [0, 1)

    void validate() const;
};

struct SeriesControl {
    double tail_tol = 1e-10;
    int max_terms = 2000;  // cap on the truncation order N per index

    void validate() const;
};

/// A_l = m_l k_l / ((1 - rho) snr_avg_l) and the per-term exponents.
struct DerivedParams {
    double a1 = 0.0;
    double a2 = 0.0;
    double m1 = 0.0, k1 = 0.0, m2 = 0.0, k2 = 0.0;

    double xi1(int i) const { return 0.5 * (m1 + k1 + i); }
    double xi2(int i, int j) const { return 0.5 * (m2 + k2 + i + j); }
    double psi1(int i) const { return m1 - k1 - i; }
    double psi2(int i, int j) const { return m2 - k2 - i - j; }
};

DerivedParams derived_params(const WiretapModel& model);

struct CanonicalModel {
    WiretapModel model;
    bool swapped = false;
};

/// Returns the model with k1 <= k2, exchanging the two links if needed.
/// Pr[gamma_2 > gamma_1] in the swapped model is Pr[gamma_1 > gamma_2] in the original.
CanonicalModel canonical_order(const WiretapModel& model);

// ------------------------------------------------------- generalized-K pieces

/// ln of the generalized-K density 2 A^{(m+k)/2} x^{(m+k)/2-1} K_{m-k}(2 sqrt(A x)) / (Gamma(m) Gamma(k)).
double gk_log_pdf(double m, double k, double a, double x);
double gk_pdf(double m, double k, double a, double x);

/// Pr[X > y] and Pr[X <= y] for X = G(m) G(k) / a, as Meijer G^{3,0}_{1,3} and G^{2,1}_{1,3}.
double gk_survival(double m, double k, double a, double y);
double gk_cdf(double m, double k, double a, double y);

/// Pr[G(m) G(k0 + l) / a > y] for l = 0 .. out.size()-1, from one Meijer G
/// evaluation and the contiguous relation in the shadow shape
///   S_{k+1}(y) = S_k(y) + 2 z^{(m+k)/2} K_{m-k}(2 sqrt z) / (Gamma(m) Gamma(k+1)),  z = a y.
void gk_survival_ladder(double m, double k0, double a, double y, std::span<double> out);

/// Marginal laws of one link: generalized-K with A0 = m k / snr_avg.
double gk_marginal_pdf(const LinkParams& link, double x);
double gk_marginal_cdf(const LinkParams& link, double x);
double gk_marginal_survival(const LinkParams& link, double x);

/// Smallest x with gk_marginal_survival(link, x) <= tail.
double gk_marginal_quantile_upper(const LinkParams& link, double tail);

// ------------------------------------------------------- mixture weights

/// ln NB(i; k, rho) = k ln(1-rho) + ln (k)_i + i ln rho - ln i!.  k = 0 gives
/// the point mass at 0; rho = 0 likewise (0^0 = 1).
double nb_log_pmf(double k, double rho, int i);

/// pmf values NB(i; k, rho), i = 0 .. out.size()-1, by the ratio recurrence.
void nb_pmf(double k, double rho, std::span<double> out);

struct Truncation {
    int order = 1;              // N: indices i, j = 0 .. N-1 are retained
    int active_j = 1;           // j terms that are not identically zero (1 when k1 == k2)
    double mass_deficit = 0.0;  // 1 - sum of retained p(i,j)
    bool capped = false;        // max_terms reached before tail_tol
};

/// Square truncation by negative-binomial mass: the smallest N with
/// 1 - F1(N-1) F2(N-1) < tail_tol, F the two NB cdfs. Model must be canonical.
/// Never throws on the cap; callers decide.
Truncation choose_truncation(const WiretapModel& canonical, const SeriesControl& ctrl);

/// Retained mixture weights p(i, j) on the truncation square, row-major
/// (i * active_j + j).
struct MixtureWeights {
    Truncation trunc;
    std::vector<double> p;

    double at(int i, int j) const { return p[static_cast<std::size_t>(i * trunc.active_j + j)]; }
};

/// Throws PrecisionError when the cap is hit before tail_tol.
MixtureWeights mixture_weights(const WiretapModel& canonical, const SeriesControl& ctrl);

// ------------------------------------------------------- joint density

struct DensityValue {
    double value = 0.0;
    int terms_used = 0;
    // bound on the omitted part: mass deficit times the largest component product seen
    double tail_estimate = 0.0;
};

/// The double series for the joint SNR density at x1, x2 > 0. The model may
/// be in either order; it is canonicalized internally.
DensityValue joint_snr_pdf(const WiretapModel& model, double x1, double x2, const SeriesControl& ctrl = {});

/// High-SNR product form (1-rho)^{k2} prod_l f_GK(x_l; m_l, k_l, A_l) with
/// A_l including the 1/(1-rho). Its total mass is (1-rho)^{k2}, not 1.
double joint_snr_pdf_asymptotic(const WiretapModel& model, double x1, double x2);

/// Fast evaluator of the joint density along a row of fixed x2, for nested
/// quadrature: set_row() prepares g_i(x2) = sum_j p(i,j) f_GK(x2; m2, k2+i+j, A2),
/// after which operator() at x1 costs one Bessel ladder. Not thread safe;
/// use one instance per thread.
class JointDensity {
public:
    /// canonical: k1 <= k2 required.
    JointDensity(const WiretapModel& canonical, const SeriesControl& ctrl);

    void set_row(double x2);
    double operator()(double x1) const;

    /// Marginal density of gamma_2 at the current row, sum_i g_i.
    double row_marginal() const;

    const Truncation& truncation() const { return weights_.trunc; }

private:
    DerivedParams d_;
    MixtureWeights weights_;
    std::vector<double> log_g_;  // ln g_i(x2)
    mutable std::vector<double> scratch_;
    bool row_empty_ = true;
};

}  // namespace wiretap
