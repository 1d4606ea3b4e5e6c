#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "wiretap/channel.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/quadrature.hpp"

using namespace wiretap;

namespace {

WiretapModel make(double m1, double k1, double s1, double m2, double k2, double s2, double rho) {
    WiretapModel w;
    w.link_b = {m1, k1, s1};
    w.link_e = {m2, k2, s2};
    w.rho = rho;
    return w;
}

// integral over (0, inf) in sqrt variables, split at the 1e-13 upper quantile
double integrate_link(const LinkParams& link, const std::function<double(double)>& f, double tol = 1e-12) {
    quad::Options o;
    o.abs_tol = tol;
    o.rel_tol = tol;
    const double hi = gk_marginal_quantile_upper(link, 1e-14);
    return quad::integrate([&](double u) { return 2.0 * u * f(u * u); }, 0.0, std::sqrt(hi), o).value;
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((LinkParams{0.4, 1, 1}.validate()), DomainError);
    CHECK_THROWS_AS((LinkParams{1, 0, 1}.validate()), DomainError);
    CHECK_THROWS_AS((LinkParams{1, 1, 0}.validate()), DomainError);
    CHECK_THROWS_AS(make(1, 1, 1, 1, 1, 1, 1.0).validate(), DomainError);
    CHECK_THROWS_AS(make(1, 1, 1, 1, 1, 1, -0.1).validate(), DomainError);
    CHECK_NOTHROW(make(0.5, 0.3, 1e-3, 7, 12, 1e4, 0.999).validate());
    CHECK_THROWS_AS((SeriesControl{0.0, 10}.validate()), DomainError);
    CHECK_THROWS_AS((SeriesControl{1e-8, 0}.validate()), DomainError);
}

TEST_CASE("derived parameters and canonical order") {
    const WiretapModel w = make(2, 3, 4.0, 1.5, 1, 0.5, 0.25);
    const DerivedParams d = derived_params(w);
    CHECK(d.a1 == doctest::Approx(2.0 * 3.0 / (0.75 * 4.0)));
    CHECK(d.a2 == doctest::Approx(1.5 * 1.0 / (0.75 * 0.5)));
    const CanonicalModel c = canonical_order(w);
    CHECK(c.swapped);
    CHECK(c.model.link_b.k == 1.0);
    CHECK(c.model.link_e.snr_avg == 4.0);
    CHECK_FALSE(canonical_order(make(1, 2, 1, 1, 2, 1, 0.3)).swapped);
}

TEST_CASE("negative binomial weights") {
    for (double k : {0.4, 1.0, 3.5})
        for (double rho : {0.0, 0.3, 0.9}) {
            std::vector<double> p(4000);
            nb_pmf(k, rho, p);
            const double total = std::accumulate(p.begin(), p.end(), 0.0);
            double mean = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) mean += static_cast<double>(i) * p[i];
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(mean == doctest::Approx(k * rho / (1.0 - rho)).epsilon(1e-10));
            for (int i : {0, 3, 17}) {
                if (p[static_cast<std::size_t>(i)] > 0.0)
                    CHECK(std::log(p[static_cast<std::size_t>(i)]) == doctest::Approx(nb_log_pmf(k, rho, i)).epsilon(1e-12));
            }
        }
    std::vector<double> z(3);
    nb_pmf(0.0, 0.5, z);
    CHECK(z[0] == 1.0);
    CHECK(z[1] == 0.0);
}

TEST_CASE("truncation order") {
    SeriesControl ctrl;
    CHECK(choose_truncation(make(1, 1, 1, 1, 1, 1, 0.0), ctrl).order == 1);
    int prev = 0;
    for (double rho : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95}) {
        const Truncation t = choose_truncation(make(1, 1, 1, 2, 3, 1, rho), ctrl);
        CHECK(t.order >= prev);
        CHECK(t.mass_deficit < ctrl.tail_tol);
        CHECK_FALSE(t.capped);
        prev = t.order;
    }
    CHECK(choose_truncation(make(1, 2, 1, 1, 2, 1, 0.5), ctrl).active_j == 1);
    const WiretapModel hard = make(1, 1, 1, 1, 3, 1, 0.99);
    SeriesControl tight{1e-12, 50};
    CHECK(choose_truncation(hard, tight).capped);
    CHECK_THROWS_AS(mixture_weights(hard, tight), PrecisionError);
    const MixtureWeights w = mixture_weights(make(1, 1, 1, 1, 3, 1, 0.6), ctrl);
    CHECK(std::accumulate(w.p.begin(), w.p.end(), 0.0) == doctest::Approx(1.0 - w.trunc.mass_deficit).epsilon(1e-13));
}

TEST_CASE("generalized-K law") {
    // mpmath values of G^{3,0}_{1,3}[a y | 1; 0, k, m] / (Gamma(m) Gamma(k))
    struct Row {
        double m, k, a, y, s;
    };
    for (const Row& r : {Row{1, 1, 1, 1.0, 0.27973176363304485}, Row{3.5, 2, 2.0, 0.05, 0.99879174496669904},
                         Row{0.5, 4, 1.5, 3.0, 0.12764233049086101}, Row{4, 7, 10, 0.2, 0.99903309891633593}}) {
        CHECK(gk_survival(r.m, r.k, r.a, r.y) == doctest::Approx(r.s).epsilon(1e-11));
        CHECK(gk_cdf(r.m, r.k, r.a, r.y) == doctest::Approx(1.0 - r.s).epsilon(1e-11));
    }
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> um(0.5, 6.0), uk(0.3, 8.0), us(-1.0, 1.5);
    for (int t = 0; t < 15; ++t) {
        const LinkParams link{um(gen), uk(gen), std::pow(10.0, us(gen))};
        INFO("m=" << link.m << " k=" << link.k << " snr=" << link.snr_avg);
        CHECK(integrate_link(link, [&](double x) { return gk_marginal_pdf(link, x); }) ==
              doctest::Approx(1.0).epsilon(1e-9));
        // mean is the average SNR
        CHECK(integrate_link(link, [&](double x) { return x * gk_marginal_pdf(link, x); }) ==
              doctest::Approx(link.snr_avg).epsilon(1e-7));
        const double x0 = link.snr_avg * 0.7;
        quad::Options o;
        o.rel_tol = 1e-12;
        const double head =
            quad::integrate([&](double u) { return 2.0 * u * gk_marginal_pdf(link, u * u); }, 0.0, std::sqrt(x0), o)
                .value;
        CHECK(gk_marginal_cdf(link, x0) == doctest::Approx(head).epsilon(1e-9));
        CHECK(gk_marginal_cdf(link, x0) + gk_marginal_survival(link, x0) == doctest::Approx(1.0).epsilon(1e-14));
        const double q = gk_marginal_quantile_upper(link, 1e-6);
        CHECK(gk_marginal_survival(link, q) <= 1e-6 * (1 + 1e-9));
        CHECK(gk_marginal_survival(link, q * 0.999) > 1e-6 * 0.99);
    }
}

TEST_CASE("survival ladder in the shadow shape") {
    for (double y : {0.01, 0.4, 3.0, 25.0}) {
        std::vector<double> s(30);
        gk_survival_ladder(2.5, 0.7, 1.3, y, s);
        for (int l = 0; l < 30; ++l) {
            const double direct = gk_survival(2.5, 0.7 + l, 1.3, y);
            CHECK(s[static_cast<std::size_t>(l)] == doctest::Approx(direct).epsilon(1e-10));
        }
    }
}

TEST_CASE("joint density: independence at rho = 0") {
    const WiretapModel w = make(2, 1.5, 2.0, 3, 2.5, 0.7, 0.0);
    for (double x1 : {0.05, 1.0, 6.0})
        for (double x2 : {0.02, 0.5, 4.0}) {
            const double prod = gk_marginal_pdf(w.link_b, x1) * gk_marginal_pdf(w.link_e, x2);
            CHECK(joint_snr_pdf(w, x1, x2).value == doctest::Approx(prod).epsilon(1e-12));
        }
}

TEST_CASE("joint density: marginals, exchange and the row evaluator") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> um(0.6, 4.0), uk(0.5, 4.0), ur(0.0, 0.92);
    for (int t = 0; t < 6; ++t) {
        WiretapModel w = make(um(gen), uk(gen), 1.6, um(gen), uk(gen), 0.8, ur(gen));
        INFO("m1=" << w.link_b.m << " k1=" << w.link_b.k << " m2=" << w.link_e.m << " k2=" << w.link_e.k
                   << " rho=" << w.rho);
        // integrating out gamma_1 leaves the gamma_2 marginal and vice versa
        for (double x : {0.1, 0.9, 3.0}) {
            const double m2 = integrate_link(
                w.link_b, [&](double x1) { return joint_snr_pdf(w, x1, x).value; }, 1e-10);
            CHECK(m2 == doctest::Approx(gk_marginal_pdf(w.link_e, x)).epsilon(1e-7));
            const double m1 = integrate_link(
                w.link_e, [&](double x2) { return joint_snr_pdf(w, x, x2).value; }, 1e-10);
            CHECK(m1 == doctest::Approx(gk_marginal_pdf(w.link_b, x)).epsilon(1e-7));
        }
        WiretapModel sw = w;
        std::swap(sw.link_b, sw.link_e);
        CHECK(joint_snr_pdf(w, 0.7, 1.9).value == doctest::Approx(joint_snr_pdf(sw, 1.9, 0.7).value).epsilon(1e-13));

        const CanonicalModel c = canonical_order(w);
        JointDensity row(c.model, SeriesControl{});
        row.set_row(1.1);
        CHECK(row.row_marginal() == doctest::Approx(gk_marginal_pdf(c.model.link_e, 1.1)).epsilon(1e-9));
        for (double x1 : {0.03, 0.8, 5.0}) {
            CHECK(row(x1) == doctest::Approx(joint_snr_pdf(c.model, x1, 1.1).value).epsilon(1e-11));
        }
    }
}

TEST_CASE("joint density is positive and finite far into the tails") {
    const WiretapModel w = make(4, 1, 2.5, 4, 2, 1.0, 0.9);
    for (double x1 : {1e-8, 1e-3, 50.0, 400.0})
        for (double x2 : {1e-8, 1e-3, 50.0, 400.0}) {
            const double v = joint_snr_pdf(w, x1, x2).value;
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
        }
    CHECK_THROWS_AS(joint_snr_pdf(w, -1.0, 1.0), DomainError);
}

TEST_CASE("high-SNR product form") {
    // with m > k the (0, 0) mixture term dominates as both SNRs go to zero
    const WiretapModel w = make(3, 1, 2.0, 3.5, 1.5, 1.0, 0.6);
    const double ratio = joint_snr_pdf_asymptotic(w, 1e-7, 1e-7) / joint_snr_pdf(w, 1e-7, 1e-7).value;
    CHECK(ratio == doctest::Approx(1.0).epsilon(1e-4));
    // total mass (1 - rho)^{k2}: separable, so one row integral suffices
    const LinkParams& b = w.link_b;
    const double row = integrate_link(b, [&](double x1) { return joint_snr_pdf_asymptotic(w, x1, 0.5); });
    const DerivedParams d = derived_params(w);
    const double expect = std::pow(1.0 - w.rho, w.link_e.k) * gk_pdf(w.link_e.m, w.link_e.k, d.a2, 0.5);
    CHECK(row == doctest::Approx(expect).epsilon(1e-8));
}
