#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wiretap/errors.hpp"
#include "wiretap/quadrature.hpp"
#include "wiretap/specfun.hpp"

namespace wiretap::specfun {

namespace {

using Complex = std::complex<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNudge = 1e-6;
// contour is cut where |integrand| < 1e-18 * peak
const double kLogCut = std::log(1e-18);

bool near_integer(double x, double tol = 1e-9) { return std::abs(x - std::round(x)) < tol; }

double decay_rate(const MeijerSpec& s) { return s.m + s.n - 0.5 * (s.p() + s.q()); }

// log of Phi(s) z^{-s} e^{-log_scale}
struct MellinBarnes {
    const MeijerSpec& spec;
    double lnz;
    double log_scale;

    Complex log_integrand(Complex s) const {
        Complex acc = -s * lnz - log_scale;
        for (int j = 0; j < spec.q(); ++j) {
            if (j < spec.m)
                acc += log_gamma(spec.b[j] + s);
            else
                acc -= log_gamma(1.0 - spec.b[j] - s);
        }
        for (int h = 0; h < spec.p(); ++h) {
            if (h < spec.n)
                acc += log_gamma(1.0 - spec.a[h] - s);
            else
                acc -= log_gamma(spec.a[h] + s);
        }
        return acc;
    }

    double log_abs(double c) const {
        const double v = log_integrand(Complex(c, 0.0)).real();
        return std::isnan(v) ? kInf : v;
    }
};

// Minimizes mb.log_abs over (lo, hi) where either end may be infinite.
double saddle_abscissa(const MellinBarnes& mb, double lo, double hi) {
    double left, right;
    bool open_left = false, open_right = false;
    if (std::isfinite(lo) && std::isfinite(hi)) {
        const double margin = std::min(0.05, 0.01 * (hi - lo));
        left = lo + margin;
        right = hi - margin;
    } else if (std::isfinite(lo)) {
        left = lo + 0.05;
        right = left + 16.0 + std::abs(mb.lnz);
        open_right = true;
    } else {
        right = hi - 0.05;
        left = right - 16.0 - std::abs(mb.lnz);
        open_left = true;
    }
    constexpr int kGrid = 64;
    for (int attempt = 0;; ++attempt) {
        double best = kInf;
        int best_k = 0;
        for (int k = 0; k <= kGrid; ++k) {
            const double c = left + (right - left) * k / kGrid;
            const double v = mb.log_abs(c);
            if (v < best) {
                best = v;
                best_k = k;
            }
        }
        const bool at_open_end = (open_right && best_k == kGrid) || (open_left && best_k == 0);
        if (!at_open_end || attempt > 12) {
            // golden-section refinement inside the neighbouring grid cells
            const double h = (right - left) / kGrid;
            double a = left + std::max(0, best_k - 1) * h;
            double b = left + std::min(kGrid, best_k + 1) * h;
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = b - g * (b - a), x2 = a + g * (b - a);
            double f1 = mb.log_abs(x1), f2 = mb.log_abs(x2);
            for (int it = 0; it < 40; ++it) {
                if (f1 < f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - g * (b - a);
                    f1 = mb.log_abs(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + g * (b - a);
                    f2 = mb.log_abs(x2);
                }
            }
            const double c = 0.5 * (a + b);
            return std::isfinite(mb.log_abs(c)) ? c : left + best_k * h;
        }
        const double width = right - left;
        if (open_right) right += width;
        if (open_left) left -= width;
    }
}

void check_result(const char* route, const MeijerValue& v, const MeijerOptions& opts) {
    if (!std::isfinite(v.value)) {
        throw PrecisionError(std::string("meijer_g: ") + route + " produced a non-finite value", v.value, v.error);
    }
    constexpr double kTiny = 1e-290;
    if (std::abs(v.value) < kTiny && v.error < kTiny) return;
    if (v.error > opts.max_rel_error * std::abs(v.value)) {
        throw PrecisionError(std::string("meijer_g: ") + route + " did not reach the requested accuracy", v.value,
                             v.error);
    }
}

}  // namespace

void MeijerSpec::validate() const {
    if (p() > 4 || q() > 4) throw DomainError("meijer_g: only p, q <= 4 are supported");
    if (m < 0 || n < 0 || m > q() || n > p()) throw DomainError("meijer_g: need 0 <= m <= q and 0 <= n <= p");
    for (int j = 0; j < m; ++j) {
        for (int h = 0; h < n; ++h) {
            const double d = a[h] - b[j];
            if (d > 0.5 && near_integer(d, 1e-12)) {
                throw DomainError("meijer_g: poles of Gamma(b_j + s) and Gamma(1 - a_h - s) coincide");
            }
        }
    }
}

MeijerValue meijer_g_contour(const MeijerSpec& spec, double z, const MeijerOptions& opts) {
    spec.validate();
    if (!(z > 0.0)) throw DomainError("meijer_g: z must be positive");
    if (decay_rate(spec) <= 0.0) {
        throw UnsupportedParameters("meijer_g: Mellin-Barnes integrand does not decay (m + n <= (p + q)/2)");
    }
    double lo = -kInf, hi = kInf;
    for (int j = 0; j < spec.m; ++j) lo = std::max(lo, -spec.b[j]);
    for (int h = 0; h < spec.n; ++h) hi = std::min(hi, 1.0 - spec.a[h]);
    if (!(lo < hi)) {
        throw UnsupportedParameters("meijer_g: no vertical contour separates the two pole families");
    }
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
        throw UnsupportedParameters("meijer_g: need m > 0 or n > 0");
    }
    const MellinBarnes mb{spec, std::log(z), opts.log_scale};
    const double c = saddle_abscissa(mb, lo, hi);

    // march outwards until the envelope is below the cut
    double peak = mb.log_integrand(Complex(c, 0.0)).real();
    double t_prev = 0.0, t = 0.5;
    for (int guard = 0; guard < 60; ++guard) {
        const double v = mb.log_integrand(Complex(c, t)).real();
        peak = std::max(peak, v);
        if (v < peak + kLogCut && t > 1.0) break;
        t_prev = t;
        t *= 1.5;
    }
    // bisect the crossing
    double a = t_prev, b = t;
    for (int it = 0; it < 30; ++it) {
        const double mid = 0.5 * (a + b);
        if (mb.log_integrand(Complex(c, mid)).real() < peak + kLogCut)
            b = mid;
        else
            a = mid;
    }
    const double t_max = b;

    auto f = [&](double tt) {
        const Complex l = mb.log_integrand(Complex(c, tt)) - peak;
        return std::exp(l.real()) * std::cos(l.imag());
    };
    const double freq = std::abs(mb.lnz) + (spec.p() + spec.q()) * std::log(2.0 + t_max);
    quad::Options qo;
    qo.abs_tol = 0.0;
    qo.rel_tol = opts.rel_tol;
    qo.l1_rel_tol = 1e-15;
    qo.max_intervals = 4000;
    qo.initial_intervals = std::clamp(static_cast<int>(std::ceil(t_max * freq / kPi)), 8, 1000);
    const quad::Result r = quad::integrate(f, 0.0, t_max, qo);
    const double scale = std::exp(peak) / kPi;
    MeijerValue out{r.value * scale, r.error * scale};
    if (scale == 0.0) out = {0.0, 0.0};
    check_result("contour", out, opts);
    return out;
}

namespace {

struct ResidueSum {
    double value;
    double error;
};

// log|Gamma(x)| and its sign in extended precision
struct LogGammaL {
    long double value;
    int sign;
};

// log|Gamma(base + shift)|. The argument is kept split so that reflection
// sees the distance to the nearest pole exactly; after nudging that distance
// is 1e-6, below the resolution of base + shift for shifts of a few dozen.
LogGammaL ln_gamma_l(long double base, int shift) {
    int unused = 1;
    const long double x = base + shift;
    if (x >= 0.5L) return {::lgammal_r(x, &unused), 1};
    const long double rb = std::nearbyint(base);
    const long double sn = std::sin(std::numbers::pi_v<long double> * (base - rb));  // +- sin(pi x)
    int sign = sn < 0.0L ? -1 : 1;
    if (std::fmod(rb + shift, 2.0L) != 0.0L) sign = -sign;
    const long double v = std::log(std::numbers::pi_v<long double> / std::abs(sn)) - ::lgammal_r(1.0L - x, &unused);
    return {v, sign};
}

bool at_pole(long double base, int shift) { return base + shift <= 0.0L && base == std::nearbyint(base); }

// One residue series with explicit parameters (already nudged apart).
// The series of different poles cancel each other for large z, so terms are
// formed and summed in long double; the error estimate charges every term the
// rounding of its log magnitude.
ResidueSum residue_series(const MeijerSpec& spec, double lnz, ResidueSide side, double log_scale) {
    using LD = long double;
    LD sum = 0.0L, err = 0.0L;
    double last = 0.0;
    const int poles = (side == ResidueSide::left) ? spec.m : spec.n;
    constexpr int kMaxTerms = 5000;
    constexpr LD eps = std::numeric_limits<LD>::epsilon();
    for (int h = 0; h < poles; ++h) {
        // factors 1/Gamma(.) whose argument grows with k can vanish for the
        // first few k only; do not stop inside that stretch
        double zero_stretch = 0.0;
        if (side == ResidueSide::left) {
            for (int l = spec.m; l < spec.q(); ++l) zero_stretch = std::max(zero_stretch, spec.b[l] - spec.b[h]);
        } else {
            for (int i = spec.n; i < spec.p(); ++i) zero_stretch = std::max(zero_stretch, spec.a[h] - spec.a[i] - 1.0);
        }
        const int k_min = static_cast<int>(std::ceil(zero_stretch)) + 3;
        int small_run = 0;
        LD prev_mag = std::numeric_limits<LD>::infinity();
        for (int k = 0; k < kMaxTerms; ++k) {
            // s0 = s_base + dir k is the pole; arguments are (base, shift) pairs
            const LD s_base = (side == ResidueSide::left) ? -static_cast<LD>(spec.b[h]) : 1.0L - static_cast<LD>(spec.a[h]);
            const int dir = (side == ResidueSide::left) ? -1 : 1;
            const LD s0 = s_base + dir * k;
            LD log_mag = -ln_gamma_l(k + 1.0L, 0).value - s0 * static_cast<LD>(lnz) - log_scale;
            LD log_size = std::abs(log_mag);  // scale of the rounding in log_mag
            int sign = (k % 2 == 0) ? 1 : -1;
            bool zero = false;
            auto mul = [&](LD base, int shift) {
                const LogGammaL g = ln_gamma_l(base, shift);
                log_mag += g.value;
                log_size += std::abs(g.value);
                sign *= g.sign;
            };
            auto div = [&](LD base, int shift) {
                if (at_pole(base, shift)) {
                    zero = true;  // 1/Gamma vanishes
                    return;
                }
                const LogGammaL g = ln_gamma_l(base, shift);
                log_mag -= g.value;
                log_size += std::abs(g.value);
                sign *= g.sign;
            };
            for (int j = 0; j < spec.q() && !zero; ++j) {
                if (j < spec.m) {
                    if (side == ResidueSide::left && j == h) continue;
                    mul(spec.b[j] + s_base, dir * k);
                } else {
                    div(1.0L - spec.b[j] - s_base, -dir * k);
                }
            }
            for (int i = 0; i < spec.p() && !zero; ++i) {
                if (i < spec.n) {
                    if (side == ResidueSide::right && i == h) continue;
                    mul(1.0L - spec.a[i] - s_base, -dir * k);
                } else {
                    div(spec.a[i] + s_base, dir * k);
                }
            }
            const LD term = zero ? 0.0L : sign * std::exp(log_mag);
            const LD mag = std::abs(term);
            sum += term;
            err += mag * eps * (4.0L + log_size);
            last = static_cast<double>(mag);
            const bool small = zero || (mag <= 1e-20L * std::abs(sum) && mag <= prev_mag);
            small_run = small ? small_run + 1 : 0;
            if (!zero) prev_mag = mag;
            if (small_run >= 3 && k >= k_min) break;
            if (k + 1 == kMaxTerms) {
                throw PrecisionError("meijer_g: residue series did not converge", static_cast<double>(sum), last);
            }
        }
    }
    // the final rounding to double
    const double value = static_cast<double>(sum);
    return {value, static_cast<double>(err) + last + std::numeric_limits<double>::epsilon() * std::abs(value)};
}

}  // namespace

MeijerValue meijer_g_residues(const MeijerSpec& spec, double z, ResidueSide side, const MeijerOptions& opts) {
    spec.validate();
    if (!(z > 0.0)) throw DomainError("meijer_g: z must be positive");
    const double lnz = std::log(z);
    // split integer-separated parameters on the summed side
    auto& params_ref = (side == ResidueSide::left) ? spec.b : spec.a;
    const int count = (side == ResidueSide::left) ? spec.m : spec.n;
    std::vector<int> bump(static_cast<std::size_t>(count), 0);
    bool collided = false;
    for (int j = 1; j < count; ++j) {
        for (int l = 0; l < j; ++l) {
            if (near_integer(params_ref[j] - params_ref[l])) {
                bump[static_cast<std::size_t>(j)] = j;
                collided = true;
                break;
            }
        }
    }
    if (!collided) {
        const ResidueSum r = residue_series(spec, lnz, side, opts.log_scale);
        MeijerValue out{r.value, r.error};
        check_result("residue series", out, opts);
        return out;
    }
    ResidueSum pair[2];
    for (int sgn = 0; sgn < 2; ++sgn) {
        MeijerSpec nudged = spec;
        auto& params = (side == ResidueSide::left) ? nudged.b : nudged.a;
        for (int j = 0; j < count; ++j) {
            // a shifts the right poles the opposite way, keep the same relative motion
            params[static_cast<std::size_t>(j)] += (sgn == 0 ? 1.0 : -1.0) * kNudge * bump[static_cast<std::size_t>(j)];
        }
        pair[sgn] = residue_series(nudged, lnz, side, opts.log_scale);
    }
    // the average keeps an O(nudge^2 ln^2 z) bias; the spread of the pair is O(nudge ln z)
    const double max_bump = *std::max_element(bump.begin(), bump.end());
    const double bias = std::abs(pair[0].value - pair[1].value) * kNudge * max_bump * std::max(1.0, std::abs(lnz));
    MeijerValue out{0.5 * (pair[0].value + pair[1].value), std::max(pair[0].error, pair[1].error) + bias};
    check_result("residue series", out, opts);
    return out;
}

double meijer_g(const MeijerSpec& spec, double z, const MeijerOptions& opts) {
    spec.validate();
    if (!(z > 0.0)) throw DomainError("meijer_g: z must be positive");
    if (decay_rate(spec) > 0.0) {
        // With p != q one residue series converges for every z and costs far
        // less than the contour; take it unless its cancellation estimate
        // (large z) says the contour is needed.
        if (spec.p() != spec.q()) {
            try {
                MeijerOptions loose = opts;
                loose.max_rel_error = kInf;
                const MeijerValue r =
                    meijer_g_residues(spec, z, spec.q() > spec.p() ? ResidueSide::left : ResidueSide::right, loose);
                if (r.error <= 10.0 * opts.rel_tol * std::abs(r.value)) return r.value;
            } catch (const PrecisionError&) {
            }
        }
        return meijer_g_contour(spec, z, opts).value;
    }
    if (spec.q() > spec.p()) return meijer_g_residues(spec, z, ResidueSide::left, opts).value;
    if (spec.p() > spec.q()) return meijer_g_residues(spec, z, ResidueSide::right, opts).value;
    if (z == 1.0) throw UnsupportedParameters("meijer_g: p == q without contour decay is singular at z = 1");
    return meijer_g_residues(spec, z, z < 1.0 ? ResidueSide::left : ResidueSide::right, opts).value;
}

}  // namespace wiretap::specfun
