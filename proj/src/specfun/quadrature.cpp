#include "wiretap/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace wiretap::quad {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error, abs_value;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel kronrod15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double resabs = std::abs(resk);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double value = resk * half;
    const double abs_value = resabs * std::abs(half);
    double err = std::abs((resk - resg) * half);
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * abs_value;
    if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    return {a, b, value, std::max(err, roundoff), abs_value};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opts) {
    Result out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    const int initial = std::max(1, opts.initial_intervals);
    std::vector<Panel> heap;
    heap.reserve(static_cast<std::size_t>(std::max(initial, opts.max_intervals)) + 1);
    double total = 0.0, total_err = 0.0, total_abs = 0.0;
    const double width = (b - a) / initial;
    for (int i = 0; i < initial; ++i) {
        const double lo = a + i * width;
        const double hi = (i + 1 == initial) ? b : a + (i + 1) * width;
        Panel p = kronrod15(f, lo, hi);
        total += p.value;
        total_err += p.error;
        total_abs += p.abs_value;
        heap.push_back(p);
        std::push_heap(heap.begin(), heap.end());
    }
    out.evaluations = 15 * initial;
    int intervals = initial;
    auto done = [&] {
        return total_err <= std::max({opts.abs_tol, opts.rel_tol * std::abs(total), opts.l1_rel_tol * total_abs});
    };
    while (!done() && intervals < opts.max_intervals) {
        std::pop_heap(heap.begin(), heap.end());
        const Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // cannot bisect further
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end());
            break;
        }
        Panel left = kronrod15(f, worst.a, mid);
        Panel right = kronrod15(f, mid, worst.b);
        out.evaluations += 30;
        ++intervals;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.abs_value + right.abs_value - worst.abs_value;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        if (intervals % 16 == 0 || !std::isfinite(total_err) || done()) {
            // re-sum to remove drift from the running add/subtract updates
            total = total_err = total_abs = 0.0;
            for (const Panel& p : heap) {
                total += p.value;
                total_err += p.error;
                total_abs += p.abs_value;
            }
        }
    }
    out.value = total;
    out.error = total_err;
    out.abs_integral = total_abs;
    out.converged = done();
    return out;
}

}  // namespace wiretap::quad
