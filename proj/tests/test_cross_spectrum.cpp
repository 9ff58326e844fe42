#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "doctest.h"
#include "warpedheat/cross_spectrum.hpp"
#include "warpedheat/errors.hpp"
#include "warpedheat/specfun.hpp"

using namespace warpedheat;
using namespace warpedheat::cross_spectrum;

namespace {

double rel(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// Hurwitz zeta at offset 3/2 from the Riemann function
double hurwitz_32(double s) {
    return (std::pow(2.0, s) - 1.0) * std::riemann_zeta(s) - std::pow(2.0, s);
}

}  // namespace

TEST_CASE("sphere spectrum: eigenvalues, multiplicities, volume") {
    auto s2 = sphere_spectrum(3, 1.0, 50);
    CHECK(s2.alpha == doctest::Approx(1.0));
    CHECK(s2.vol_N == doctest::Approx(4.0 * M_PI).epsilon(1e-14));
    CHECK(s2.levels[2].mu == doctest::Approx(6.0));
    CHECK(s2.levels[2].d == 5);
    long long total = 0;
    for (const auto& l : s2.levels) total += l.d;
    CHECK(total == 51LL * 51LL);  // sum of 2k+1 up to 50

    auto s5 = sphere_spectrum(6, 1.0, 5);
    CHECK(s5.levels[5].d == 196);
    CHECK(s5.vol_N == doctest::Approx(M_PI * M_PI * M_PI).epsilon(1e-14));

    auto circ = sphere_spectrum(2, 1.0, 4);
    CHECK(circ.alpha == doctest::Approx(0.5));
    CHECK(circ.vol_N == doctest::Approx(2.0 * M_PI));
    CHECK(circ.levels[0].d == 1);
    CHECK(circ.levels[3].d == 2);
    CHECK(circ.levels[3].mu == doctest::Approx(9.0));

    auto scaled = sphere_spectrum(3, 1.5, 3);
    CHECK(scaled.levels[1].mu == doctest::Approx(2.0 / 2.25).epsilon(1e-15));

    CHECK_THROWS_AS(sphere_spectrum(1, 1.0, 3), InvalidParameter);
    CHECK_THROWS_AS(sphere_spectrum(3, 0.0, 3), InvalidParameter);
    CHECK_THROWS_AS(sphere_spectrum(3, 1.0, -1), InvalidParameter);
}

TEST_CASE("torus spectrum: lattice enumeration and grouping") {
    auto t1 = torus_spectrum({1.0}, 4.5);
    REQUIRE(t1.levels.size() == 3);
    CHECK(t1.levels[0].mu == doctest::Approx(0.0));
    CHECK(t1.levels[0].d == 1);
    CHECK(t1.levels[1].mu == doctest::Approx(1.0));
    CHECK(t1.levels[1].d == 2);
    CHECK(t1.levels[2].mu == doctest::Approx(4.0));
    CHECK(t1.levels[2].d == 2);
    CHECK(t1.vol_N == doctest::Approx(2.0 * M_PI));
    CHECK(t1.n == 2);

    auto t2 = torus_spectrum({1.0, 1.0}, 30.0);
    CHECK(t2.alpha == doctest::Approx(1.0));
    CHECK(t2.vol_N == doctest::Approx(4.0 * M_PI * M_PI));
    auto find_d = [&](double mu) {
        for (const auto& l : t2.levels)
            if (std::abs(l.mu - mu) < 1e-9) return l.d;
        return -1LL;
    };
    CHECK(find_d(1.0) == 4);
    CHECK(find_d(25.0) == 12);  // (+-5,0),(0,+-5),(+-3,+-4),(+-4,+-3)

    CHECK_THROWS_AS(torus_spectrum({1.0, 1.0, 1.0}, 1e6), CutoffTooLarge);
    CHECK_THROWS_AS(torus_spectrum({}, 4.0), InvalidParameter);
    CHECK_THROWS_AS(torus_spectrum({1.0, -1.0}, 4.0), InvalidParameter);
}

TEST_CASE("heat trace: dominated by low levels at large t") {
    auto s2 = sphere_spectrum(3, 1.0, 50);
    double got = heat_trace_N(s2, 10.0);
    CHECK(rel(got, 1.0 + 3.0 * std::exp(-20.0)) < 1e-12);
    CHECK(heat_trace_N(s2, 100.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(heat_trace_N(s2, 0.0), InvalidParameter);
}

TEST_CASE("heat trace: certified truncation failure carries a usable cutoff") {
    auto coarse = sphere_spectrum(3, 1.0, 5);
    try {
        heat_trace_N(coarse, 1e-3);
        FAIL("expected TruncationInsufficient");
    } catch (const TruncationInsufficient& e) {
        CHECK(e.required > coarse.cutoff);
    }
}

TEST_CASE("heat trace: small-t volume scaling") {
    double t = 1e-3;
    auto s2 = sphere_spectrum(3, 1.0, 300);
    double lead = s2.vol_N / (4.0 * M_PI);  // alpha = 1
    CHECK(std::abs(t * heat_trace_N(s2, t) / lead - 1.0) < 0.02);

    auto t2 = torus_spectrum({1.0, 1.0}, 5e4);
    double lead2 = t2.vol_N / (4.0 * M_PI);
    CHECK(std::abs(t * heat_trace_N(t2, t) / lead2 - 1.0) < 1e-6);
}

TEST_CASE("torus heat trace factorizes over circle factors") {
    double t = 0.3;
    auto prod = torus_spectrum({1.3, 0.7}, 500.0);
    auto f1 = torus_spectrum({1.3}, 500.0);
    auto f2 = torus_spectrum({0.7}, 500.0);
    double lhs = heat_trace_N(prod, t);
    double rhs = heat_trace_N(f1, t) * heat_trace_N(f2, t);
    CHECK(rel(lhs, rhs) < 1e-12);
}

TEST_CASE("spectral zeta: closed-form values") {
    // circle of circumference 2 pi: sum' k^-2s = 2 zeta_R(4) at s = 2
    auto t1 = torus_spectrum({1.0}, 1e5);
    CHECK(rel(zeta_N(t1, 2.0), std::pow(M_PI, 4) / 45.0) < 1e-7);

    // unit two-sphere at s = 2: sum (2k+1)/(k(k+1))^2 telescopes to 1
    auto s2 = sphere_spectrum(3, 1.0, 3000);
    CHECK(rel(zeta_N(s2, 2.0), 1.0) < 1e-8);

    // radius scaling: zeta_a(s) = a^{2s} zeta_1(s)
    auto sa = sphere_spectrum(3, 1.5, 3000);
    double want = std::pow(1.5, 5.0) * zeta_N(s2, 2.5);
    CHECK(rel(zeta_N(sa, 2.5), want) < 1e-12);

    CHECK_THROWS_AS(zeta_N(s2, 1.5), OutsideConvergence);
    CHECK_THROWS_AS(zeta_N(s2, 1.4), OutsideConvergence);
    auto coarse = sphere_spectrum(3, 1.0, 8);
    CHECK_THROWS_AS(zeta_N(coarse, 2.0), TruncationInsufficient);
}

TEST_CASE("spectral zeta agrees with the Mellin transform of the heat trace") {
    auto s2 = sphere_spectrum(3, 1.0, 1000);
    double s = 2.0, alpha = 1.0, delta = 1e-3;
    double a0 = s2.vol_N, a1 = (2.0 / 6.0) * s2.vol_N;
    // [0, delta] from the two-term small-t model, kernel term subtracted
    double head = (a0 / (4.0 * M_PI)) * std::pow(delta, s - alpha) / (s - alpha) +
                  (a1 / (4.0 * M_PI)) * std::pow(delta, s - alpha + 1) / (s - alpha + 1) -
                  std::pow(delta, s) / s;
    double T = 20.0;
    auto f = [&](double t) { return std::pow(t, s - 1.0) * (heat_trace_N(s2, t) - 1.0); };
    double body = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                      f, delta, 1.0, 15, 1e-11) +
                  boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                      f, 1.0, T, 15, 1e-11);
    double mellin = (head + body) / std::tgamma(s);
    CHECK(rel(zeta_N(s2, s), mellin) < 1e-6);
}

TEST_CASE("zeta at zero: trace coefficients, closed form, continuation") {
    auto s2 = sphere_spectrum(3, 1.0, 50);
    auto zs = zeta0_and_residues(s2);
    CHECK(zs.A_coeffs[0] == doctest::Approx(4.0 * M_PI).epsilon(1e-14));
    CHECK(zs.A_coeffs[1] == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-14));
    CHECK(zs.zeta0_closed_form == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(zs.zeta0 == zs.zeta0_closed_form);
    CHECK(std::abs(zs.zeta0_continued - (-2.0 / 3.0)) < 1e-4);
    CHECK(zs.zeta_at.size() == 4);

    auto t2 = torus_spectrum({1.0, 1.0}, 30.0);
    auto zt = zeta0_and_residues(t2);
    CHECK(zt.A_coeffs[0] == doctest::Approx(4.0 * M_PI * M_PI).epsilon(1e-14));
    CHECK(zt.A_coeffs[1] == doctest::Approx(0.0));
    CHECK(zt.zeta0_closed_form == doctest::Approx(0.0));
    CHECK(std::abs(zt.zeta0_continued - (-1.0)) < 1e-4);

    // circle: sum' = 2 zeta_R(2s), value -1 at s = 0
    auto t1 = torus_spectrum({1.0}, 30.0);
    auto zc = zeta0_and_residues(t1);
    CHECK(std::abs(zc.zeta0_continued - (-1.0)) < 1e-4);

    CHECK_THROWS_AS(zeta0_and_residues(sphere_spectrum(5, 1.0, 10)),
                    UnsupportedCrossSection);
}

TEST_CASE("zeta derivative at zero: square torus against the beta-function value") {
    auto t2 = torus_spectrum({1.0, 1.0}, 30.0);
    // Z(s) = 4 zeta_R(s) beta(s); differentiate the product at 0
    double zr0 = -0.5, zrp0 = -0.5 * std::log(2.0 * M_PI);
    double beta0 = 0.5;
    double betap0 = std::log(std::exp(2.0 * std::lgamma(0.25)) /
                             (2.0 * M_PI * std::sqrt(2.0)));
    double want = 4.0 * (zrp0 * beta0 + zr0 * betap0);
    CHECK(std::abs(zeta_prime0(t2) - want) < 1e-6);
}

TEST_CASE("zeta derivative at zero: unit sphere against the Hurwitz expansion") {
    // (2k+1) [k(k+1)]^-s expanded about (k+1/2)^2; derivative at s = 0
    double h = 1e-4;
    double zrp_m1 =
        (std::riemann_zeta(-1.0 + h) - std::riemann_zeta(-1.0 - h)) / (2.0 * h);
    double hzp_m1 = (std::log(2.0) / 2.0) * (-1.0 / 12.0) - zrp_m1 / 2.0 -
                    std::log(2.0) / 2.0;
    double psi32 = specfun::digamma({1.5, 0.0}).real();
    double want = 4.0 * hzp_m1 - psi32 / 2.0;
    for (int m = 2; m <= 40; ++m)
        want += 2.0 * hurwitz_32(2.0 * m - 1.0) / (m * std::pow(4.0, m));

    auto s2 = sphere_spectrum(3, 1.0, 50);
    CHECK(std::abs(zeta_prime0(s2) - want) < 1e-5);

    CHECK_THROWS_AS(zeta_prime0(sphere_spectrum(2, 1.0, 10)), UnsupportedCrossSection);
}

TEST_CASE("csv export") {
    auto t1 = torus_spectrum({1.0}, 4.5);
    std::string csv = spectrum_csv(t1);
    CHECK(csv.substr(0, 28) == "k,eigenvalue,multiplicity\n0,");
    CHECK(csv.find("\n1,1,2\n") != std::string::npos);
    CHECK(csv.find("\n2,4,2\n") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
