#pragma once

// Secrecy outage probability P_o(r) = 1 - Pr[gamma_1 > 2^r (1 + gamma_2) - 1]
// and the r = 0 quantities P_o(0) = Pr[gamma_2 > gamma_1] and its complement.

#include <string_view>
#include <vector>

#include "wiretap/channel.hpp"

namespace wiretap {

enum class Method { series_quadrature, series_closed, oracle_2d, asymptotic };

std::string_view method_name(Method m);

struct SecrecyResult {
    double value = 0.0;
    int terms_used = 0;          // truncation order N per index
    double tail_estimate = 0.0;  // estimated error from truncation (and quadrature, for the oracle)
    Method method = Method::series_quadrature;
    bool swapped = false;  // links were exchanged to reach k1 <= k2
};

/// Which Gauss-rule series sop() evaluates.
///  - corrected: the 15-point rule applied to the outer integral over gamma_2
///    with the survival of gamma_1 inside, which is what the definition of
///    P_o(r) gives after the substitution 2 sqrt(A2 x2) = y^2.
///  - as_printed: the closed expression with the rule on the wrong link. It swaps
///    the two links in the quadrature and therefore evaluates
///    1 - Pr[gamma_2 > 2^r (1 + gamma_1) - 1]; kept for comparison only.
enum class SopFormula { corrected, as_printed };

struct SopOptions {
    SopFormula formula = SopFormula::corrected;
    // when set, the series value is checked against sop_oracle and a
    // ConsistencyError is raised on disagreement beyond guard_tol
    bool guard = false;
    double guard_tol = 1e-3;
    double quad_tol = 1e-6;  // used by the oracle when sop() has to fall back to it
    // The 15-point rule integrates each outer mixture density to 1 only
    // approximately; when the weighted defect plus the truncation mass exceeds
    // max_rule_defect the corrected series is replaced by the oracle.
    bool oracle_fallback = true;
    double max_rule_defect = 1e-4;
};

/// h(x2, r) = (1 + x2) 2^r - 1.
double outage_threshold(double x2, double r);

/// Series/quadrature evaluation of P_o(r). When canonical ordering exchanges
/// the links and r > 0 the series no longer applies and the 2D oracle is used
/// (method = oracle_2d); at r = 0 the exchanged series is complemented. The
/// oracle is also used when the 15-point rule is visibly unresolved (see
/// SopOptions::max_rule_defect). `method` in the result says which route ran.
SecrecyResult sop(const WiretapModel& model, double r, const SeriesControl& ctrl = {}, const SopOptions& opts = {});

/// P_o(r) by nested adaptive Gauss-Kronrod integration of the joint density
/// over the non-outage region, to absolute error quad_tol.
SecrecyResult sop_oracle(const WiretapModel& model, double r, double quad_tol = 1e-6);

enum class PzeroRoute {
    shared_contour,  // whole double series inside one Mellin-Barnes integral
    term_by_term,    // one Meijer G^{2,3}_{3,3} per (i, j); slow, for cross-checks
};

/// P_o(0) = Pr[gamma_2 > gamma_1] from the Meijer G^{2,3}_{3,3} double series.
SecrecyResult pzero(const WiretapModel& model, const SeriesControl& ctrl = {},
                    PzeroRoute route = PzeroRoute::shared_contour);

/// Probability of non-zero secrecy capacity, Pr[gamma_1 > gamma_2] = 1 - pzero.
SecrecyResult pnzsc(const WiretapModel& model, const SeriesControl& ctrl = {});

/// High-SNR closed form for P_o(0), valid as snr_avg of link_b grows, with
/// alpha_1 = min(k1, m1). Throws UnsupportedParameters when k1 == m1.
double pzero_asymptotic(const WiretapModel& model);

struct TruncationReport {
    Truncation trunc;
    std::vector<double> row_mass;  // sum_j p(i, j) for each retained i
};

TruncationReport truncation_report(const WiretapModel& model, const SeriesControl& ctrl = {});

/// Raw probabilities within `slack` (1e-9 by default) of [0, 1] are clamped;
/// anything further out raises ConsistencyError naming `what`. The oracle
/// passes its own error estimate as the slack.
double clamp_probability(double raw, std::string_view what, double slack = 1e-9);

}  // namespace wiretap
