#pragma once

#include <functional>

namespace wiretap::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    // Also accept once error <= l1_rel_tol * integral of |f|; for oscillatory
    // integrands whose value is much smaller than their L1 norm.
    double l1_rel_tol = 0.0;
    int max_intervals = 2000;
    // Number of equal panels the interval is split into before adaptive refinement.
    int initial_intervals = 1;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    double abs_integral = 0.0;  // integral of |f|, used to judge cancellation
    int evaluations = 0;
    bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature of f over [a, b].
/// Never evaluates f at the endpoints.
Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opts = {});

}  // namespace wiretap::quad
