#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "warpedheat/assembly.hpp"
#include "warpedheat/cross_spectrum.hpp"
#include "warpedheat/errors.hpp"
#include "warpedheat/geometry.hpp"
#include "warpedheat/oracle.hpp"
#include "warpedheat/spectral1d.hpp"

using namespace warpedheat;
using namespace warpedheat::assembly;

namespace {

ProductModel circle_model(double nu, double b, int k_max, double cutoff = 901.0) {
    return {geometry::make_cusp_warp(nu, 1.0, b), 1.0,
            cross_spectrum::torus_spectrum({1.0}, cutoff), k_max};
}

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("product trace is stable under raising the mode cutoff") {
    auto m20 = circle_model(1.0, 1.0, 20);
    auto m30 = circle_model(1.0, 1.0, 30);
    double t20 = heat_trace_M_regularized(m20, 0.5);
    double t30 = heat_trace_M_regularized(m30, 0.5);
    CHECK(std::abs(t30 - t20) <= 1e-6);
}

TEST_CASE("breakdown total equals line trace plus weighted mode traces") {
    auto m = circle_model(1.0, 1.0, 8);
    auto bd = heat_trace_M_breakdown(m, 0.5);
    REQUIRE(bd.per_mode.size() == 8);
    double total = bd.trace_D0;
    for (const auto& pm : bd.per_mode) total += pm.d * pm.trace;
    CHECK(bd.trace_total == doctest::Approx(total).epsilon(1e-14));
    CHECK(heat_trace_M_regularized(m, 0.5) ==
          doctest::Approx(bd.trace_total).epsilon(1e-14));
    // circle modes come in +/- pairs
    for (const auto& pm : bd.per_mode) {
        CHECK(pm.d == 2);
        CHECK(pm.mu == doctest::Approx(double(pm.k) * pm.k).epsilon(1e-15));
    }
}

TEST_CASE("per-mode trace agrees with a direct solve on a different grid") {
    auto m = circle_model(1.0, 1.0, 8);
    auto bd = heat_trace_M_breakdown(m, 0.5);
    oracle::Grid1D g(14.0, 3001);
    double q_cap = 40.0 / (g.h * g.h);
    auto op = oracle::discretize(
        [&](double y) {
            return std::min(q_cap,
                            spectral1d::potential_Qk(m.warp, 1.0, 1.0, y));
        },
        g);
    double direct = oracle::trace_numeric(op, 0.5, oracle::TraceMode::Full);
    CHECK(bd.per_mode[0].trace == doctest::Approx(direct).epsilon(2e-4));
}

TEST_CASE("long-time trace is carried by the zero mode alone") {
    auto m = circle_model(1.0, 1.0, 20);
    CHECK(heat_trace_M_regularized(m, 30.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("trace refuses an uncertified mode cutoff and suggests one") {
    auto m = circle_model(1.0, 1.0, 2, 3000.0);
    CHECK_THROWS_AS(heat_trace_M_regularized(m, 0.05), TruncationInsufficient);
    try {
        heat_trace_M_regularized(m, 0.05);
    } catch (const TruncationInsufficient& e) {
        CHECK(e.required >= 15.0);
        CHECK(e.required <= 30.0);
    }
    // the suggested cutoff is indeed certified
    try {
        heat_trace_M_regularized(m, 0.05);
    } catch (const TruncationInsufficient& e) {
        auto fixed = circle_model(1.0, 1.0, static_cast<int>(e.required), 3000.0);
        CHECK_NOTHROW(heat_trace_M_regularized(fixed, 0.05));
    }
}

TEST_CASE("product trace matches a two-dimensional lattice computation") {
    auto m = circle_model(1.0, 1.0, 20);
    const double t = 0.5;
    double model_trace = heat_trace_M_regularized(m, t);

    // Discretize the full cylinder operator: 64 Fourier modes of the periodic
    // second difference in the circle direction, a Dirichlet line per mode.
    oracle::Grid1D g(12.0, 1201);
    const int q = 64;
    const double htheta = 2.0 * kPi / q;
    const double q_cap = 40.0 / (g.h * g.h);
    double lattice = 0.0;
    for (int mm = 0; mm < q; ++mm) {
        double muhat = 2.0 * (1.0 - std::cos(mm * htheta)) / (htheta * htheta);
        if (mm > 0 && t * (muhat - 1.0) > 45.0) continue;
        auto op = oracle::discretize(
            [&](double y) {
                return std::min(
                    q_cap, spectral1d::potential_Qk(m.warp, 1.0, muhat, y));
            },
            g);
        lattice +=
            mm == 0
                ? oracle::trace_numeric(op, t, oracle::TraceMode::Regularized,
                                        1.0)
                : oracle::trace_numeric(op, t, oracle::TraceMode::Full);
    }
    CHECK(std::abs(lattice - model_trace) / std::abs(model_trace) < 0.01);
}

TEST_CASE("trace breakdown serializes to parseable json") {
    auto m = circle_model(1.0, 1.0, 8);
    auto bd = heat_trace_M_breakdown(m, 0.5);
    auto j = nlohmann::json::parse(trace_json(bd));
    CHECK(j["t"].get<double>() == doctest::Approx(0.5));
    CHECK(j["trace_total"].get<double>() ==
          doctest::Approx(bd.trace_total).epsilon(1e-15));
    CHECK(j["trace_D0"].get<double>() ==
          doctest::Approx(bd.trace_D0).epsilon(1e-15));
    REQUIRE(j["per_mode"].size() == 8);
    CHECK(j["per_mode"][0]["k"].get<int>() == 1);
    CHECK(j["per_mode"][0]["mu_k"].get<double>() == doctest::Approx(1.0));
    CHECK(j["per_mode"][0]["d_k"].get<long long>() == 2);
    CHECK(j["per_mode"][2]["trace"].get<double>() ==
          doctest::Approx(bd.per_mode[2].trace).epsilon(1e-15));
}

TEST_CASE("flat cross-section asymptotics: leading term drops, conventions differ by volume") {
    const double nu = 1.3, b = 1.0, al = 1.0;
    auto cross = cross_spectrum::torus_spectrum({1.0, 1.0}, 40.0);
    ProductModel m{geometry::make_cusp_warp(nu, 1.0, b), al, cross, 3};
    auto law = trace_asymptotics_S1_S2(m);
    const double pref = b / std::sqrt(4.0 * kPi);
    const double r = al / nu;
    // flat cross-section: zeta_N(0) = 0 in the heat-coefficient convention,
    // -1 once the kernel mode is removed (the continuation is numerical, so
    // the -1 holds to its quadrature accuracy while the wiring is exact)
    auto zv = cross_spectrum::zeta0_and_residues(cross);
    double zp = cross_spectrum::zeta_prime0(cross);
    CHECK(std::abs(law.S1) < 1e-15);
    CHECK(law.S1_continued ==
          doctest::Approx(-pref * r * zv.zeta0_continued).epsilon(1e-13));
    CHECK(law.S1_continued == doctest::Approx(pref * r).epsilon(1e-6));
    CHECK(law.S2 == doctest::Approx(pref * r * zp).epsilon(1e-13));
    double shift = pref * (r * std::numbers::egamma - 2.0 * std::numbers::ln2);
    CHECK(law.S2_continued == doctest::Approx(law.S2 + shift).epsilon(1e-6));
}

TEST_CASE("round cross-section asymptotics use zeta(0) = 1/3") {
    const double nu = 1.3, b = 1.0;
    auto sph = cross_spectrum::sphere_spectrum(3, 1.0, 40);
    ProductModel m{geometry::make_cusp_warp(nu, 1.0, b), 1.0, sph, 5};
    auto law = trace_asymptotics_S1_S2(m);
    const double pref = b / std::sqrt(4.0 * kPi);
    const double r = 1.0 / nu;
    CHECK(law.S1 == doctest::Approx(-pref * r / 3.0).epsilon(1e-13));
    CHECK(law.S1_continued ==
          doctest::Approx(-pref * r * (1.0 / 3.0 - 1.0)).epsilon(1e-6));
}

TEST_CASE("asymptotic law requires a three-dimensional product") {
    ProductModel m{geometry::make_cusp_warp(1.0, 1.0, 1.0), 1.0,
                   cross_spectrum::torus_spectrum({1.0}, 40.0), 3};
    CHECK_THROWS_AS(trace_asymptotics_S1_S2(m), UnsupportedCrossSection);
}

TEST_CASE("leading heat coefficient is the warped volume") {
    auto warp = geometry::make_cusp_warp(1.5, 2.0, 1.0);
    auto cross = cross_spectrum::torus_spectrum({1.0, 1.0}, 40.0);
    ProductModel m{warp, 2.0, cross, 3};
    auto [a0, a1] = heat_coeff_A01_M(m);
    CHECK(a0 == doctest::Approx(geometry::volume_beta(warp, 2.0) *
                                cross.vol_N)
                    .epsilon(1e-10));
    CHECK(std::isfinite(a1));
}

TEST_CASE("curvature part of the second coefficient has a closed form") {
    // Per unit cross-section volume, the sphere and torus A1 differ by
    // exactly C10 * F with C10 = (b sqrt(pi)/6) Gamma(nu/2)/Gamma((nu+1)/2)
    // at weight exponent 2 and F = 2/a^2 on the unit-curvature scale.
    const double nu = 1.5, b = 1.0, a = 0.7;
    auto warp = geometry::make_cusp_warp(nu, 2.0, b);
    auto torus = cross_spectrum::torus_spectrum({1.0, 1.0}, 40.0);
    auto sph = cross_spectrum::sphere_spectrum(3, a, 40);
    auto [a0t, a1t] = heat_coeff_A01_M({warp, 2.0, torus, 3});
    auto [a0s, a1s] = heat_coeff_A01_M({warp, 2.0, sph, 3});
    double c10 = b * std::sqrt(kPi) / 6.0 * std::tgamma(nu / 2.0) /
                 std::tgamma((nu + 1.0) / 2.0);
    double f = 2.0 / (a * a);
    CHECK(a1s / sph.vol_N - a1t / torus.vol_N ==
          doctest::Approx(c10 * f).epsilon(1e-8));
}

TEST_CASE("curvature coefficient diverges at unit weight exponent, flat one does not") {
    auto warp = geometry::make_cusp_warp(1.5, 1.0, 1.0);
    auto sph = cross_spectrum::sphere_spectrum(3, 1.0, 40);
    auto torus = cross_spectrum::torus_spectrum({1.0, 1.0}, 40.0);
    CHECK_THROWS_AS(heat_coeff_A01_M({warp, 1.0, sph, 3}), DivergentCoefficient);
    CHECK_NOTHROW(heat_coeff_A01_M({warp, 1.0, torus, 3}));
}

TEST_CASE("regularized line trace follows its two-term short-time series") {
    for (double nu : {1.0, 1.5}) {
        auto fit = verify_short_time_identity(nu, 1.0, {0.02, 0.05, 0.1}, 2);
        CHECK(fit.ok);
        CHECK(fit.fitted_exponent == doctest::Approx(2.5).epsilon(0.12));
        REQUIRE(fit.lhs.size() == 3);
        // the series itself is already close at these times
        for (size_t i = 0; i < fit.lhs.size(); ++i)
            CHECK(std::abs(fit.lhs[i] - fit.rhs[i]) < 2e-2);
    }
}

TEST_CASE("short-time remainder exponent is scale covariant") {
    auto fit = verify_short_time_identity(1.5, 2.0, {0.08, 0.2, 0.4}, 2);
    CHECK(fit.ok);
    CHECK(fit.tau[0] == doctest::Approx(0.02).epsilon(1e-15));
    auto fit1 = verify_short_time_identity(1.5, 1.0, {0.02, 0.05, 0.1}, 2);
    CHECK(fit.fitted_exponent ==
          doctest::Approx(fit1.fitted_exponent).epsilon(1e-6));
}

TEST_CASE("one-term truncation fits the three-halves power") {
    auto fit = verify_short_time_identity(1.0, 1.0, {0.02, 0.05, 0.1}, 1);
    CHECK(fit.ok);
    CHECK(fit.expected_exponent == doctest::Approx(1.5));
}

TEST_CASE("identity verifier validates its inputs") {
    CHECK_THROWS_AS(verify_short_time_identity(0.0, 1.0, {0.02, 0.05}, 2),
                    InvalidParameter);
    CHECK_THROWS_AS(verify_short_time_identity(1.0, 1.0, {0.02}, 2),
                    InvalidParameter);
    CHECK_THROWS_AS(verify_short_time_identity(1.0, 1.0, {0.02, 0.05}, 3),
                    InvalidParameter);
    CHECK_THROWS_AS(verify_short_time_identity(1.0, 1.0, {0.02, 0.7}, 2),
                    InvalidParameter);
}

TEST_CASE("cylinder kernel averaged over the circle leaves the zero mode") {
    auto m = circle_model(1.0, 1.0, 2, 10.0);
    const double t = 0.5, y = 0.3, yp = -0.2;
    const int nx = 64;
    double avg = 0.0;
    for (int i = 0; i < nx; ++i)
        avg += heat_kernel_M_torus(m, t, y, {0.7}, yp, {2.0 * kPi * i / nx});
    avg *= 2.0 * kPi / nx;
    double zero = std::exp(m.warp.omega(y) + m.warp.omega(yp)) *
                  spectral1d::heat_kernel_U0({1.0, 1.0}, t, y, yp);
    CHECK(avg == doctest::Approx(zero).epsilon(1e-10));
}

TEST_CASE("cylinder kernel is symmetric and positive") {
    auto m = circle_model(1.0, 1.0, 2, 10.0);
    double k1 = heat_kernel_M_torus(m, 0.5, 0.3, {0.7}, -0.2, {0.1});
    double k2 = heat_kernel_M_torus(m, 0.5, -0.2, {0.1}, 0.3, {0.7});
    CHECK(k1 == doctest::Approx(k2).epsilon(1e-10));
    CHECK(k1 > 0.0);
    CHECK(heat_kernel_M_torus(m, 0.2, 0.0, {0.0}, 0.0, {0.0}) > 0.0);
}

TEST_CASE("cylinder kernel rejects mismatched points and cross-sections") {
    auto m = circle_model(1.0, 1.0, 2, 10.0);
    CHECK_THROWS_AS(heat_kernel_M_torus(m, 0.5, 0.3, {0.7, 0.1}, -0.2, {0.1}),
                    InvalidParameter);
    CHECK_THROWS_AS(heat_kernel_M_torus(m, -0.5, 0.3, {0.7}, -0.2, {0.1}),
                    InvalidParameter);
    ProductModel ms{geometry::make_cusp_warp(1.0, 1.0, 1.0), 1.0,
                    cross_spectrum::sphere_spectrum(3, 1.0, 10), 2};
    CHECK_THROWS_AS(heat_kernel_M_torus(ms, 0.5, 0.3, {0.7}, -0.2, {0.1}),
                    UnsupportedCrossSection);
}

TEST_CASE("model validation rejects malformed inputs") {
    auto cross = cross_spectrum::torus_spectrum({1.0}, 40.0);
    ProductModel bad_alpha{geometry::make_cusp_warp(1.0, 1.0, 1.0), -1.0, cross, 2};
    CHECK_THROWS_AS(heat_trace_M_regularized(bad_alpha, 0.5), InvalidParameter);
    ProductModel bad_k{geometry::make_cusp_warp(1.0, 1.0, 1.0), 1.0, cross, 4000};
    CHECK_THROWS_AS(heat_trace_M_regularized(bad_k, 0.5), InvalidParameter);
    ProductModel linear{geometry::make_linear_warp(1.0), 1.0, cross, 2};
    CHECK_THROWS_AS(heat_trace_M_regularized(linear, 0.5), InvalidParameter);
    auto good = circle_model(1.0, 1.0, 2);
    CHECK_THROWS_AS(heat_trace_M_regularized(good, 0.0), InvalidParameter);
}
