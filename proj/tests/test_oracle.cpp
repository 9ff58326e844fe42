#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "warpedheat/errors.hpp"
#include "warpedheat/oracle.hpp"

using namespace warpedheat;
using namespace warpedheat::oracle;

namespace {

// Poschl-Teller potential at b = 1
auto pt_potential(double nu) {
    return [nu](double y) {
        double s = 1.0 / std::cosh(y);
        return nu * nu - nu * (nu + 1.0) * s * s;
    };
}

double lattice_box_mode(const Tridiag& op, int j) {
    int m = op.size();
    double s = std::sin(j * M_PI / (2.0 * (m + 1)));
    return 4.0 / (op.h * op.h) * s * s;
}

}  // namespace

TEST_CASE("grid construction") {
    Grid1D g(10.0, 5);
    CHECK(g.h == doctest::Approx(5.0));
    CHECK(g.node(2) == doctest::Approx(0.0));
    CHECK_THROWS_AS(Grid1D(10.0, 4), InvalidParameter);
    CHECK_THROWS_AS(Grid1D(-1.0, 5), InvalidParameter);
}

TEST_CASE("box: lowest mode matches both the lattice closed form and the continuum") {
    Grid1D g(M_PI, 201);
    auto op = discretize([](double) { return 0.0; }, g);
    auto pairs = eigen_lowest(op, 2);
    CHECK(std::abs(pairs[0].value - lattice_box_mode(op, 1)) < 1e-10);
    CHECK(std::abs(pairs[0].value - 0.25) < 2e-5);  // (pi/2L)^2, O(h^2) off
    CHECK(std::abs(pairs[1].value - lattice_box_mode(op, 2)) < 1e-10);
    // h-normalization
    long double nrm = 0;
    for (double v : pairs[0].vector) nrm += (long double)v * v;
    CHECK(std::abs((double)nrm * op.h - 1.0) < 1e-12);
}

TEST_CASE("constant shift adds to the diagonal and nothing else") {
    Grid1D g(5.0, 101);
    auto q = [](double y) { return std::exp(-y * y); };
    auto a = discretize(q, g);
    auto b = discretize([&](double y) { return q(y) + 3.25; }, g);
    for (int i = 0; i < a.size(); ++i)
        CHECK(b.diag[i] == doctest::Approx(a.diag[i] + 3.25).epsilon(1e-14));
    for (int i = 0; i + 1 < a.size(); ++i) CHECK(a.off[i] == b.off[i]);
    auto ea = eigen_lowest(a, 2), eb = eigen_lowest(b, 2);
    CHECK(eb[0].value == doctest::Approx(ea[0].value + 3.25).epsilon(1e-10));
    CHECK(eb[1].value == doctest::Approx(ea[1].value + 3.25).epsilon(1e-10));
}

TEST_CASE("Poschl-Teller nu=2.5: bound levels j(2 nu - j) and eigenvector parity") {
    Grid1D g(40.0, 4001);
    auto op = discretize(pt_potential(2.5), g);
    auto pairs = eigen_lowest(op, 3);
    // h^2 lattice bias: absolute for the zero mode, relative above it
    CHECK(std::abs(pairs[0].value - 0.0) < 2e-4);
    CHECK(std::abs(pairs[1].value - 4.0) / 4.0 < 1e-4);
    CHECK(std::abs(pairs[2].value - 6.0) / 6.0 < 1e-4);
    int m = op.size();
    for (int j = 0; j < 3; ++j) {
        double sign = (j % 2 == 0) ? 1.0 : -1.0;
        double worst = 0, peak = 0;
        for (int i = 0; i < m; ++i) {
            worst = std::max(worst,
                             std::abs(pairs[j].vector[i] -
                                      sign * pairs[j].vector[m - 1 - i]));
            peak = std::max(peak, std::abs(pairs[j].vector[i]));
        }
        CHECK(worst < 1e-6 * peak);
    }
}

TEST_CASE("harmonic proxy: evenly spaced levels") {
    // quadratic warp exponent gives Q = 4 y^2 - 2 at b = 1: levels 4j
    Grid1D g(10.0, 2001);
    auto op = discretize([](double y) { return 4.0 * y * y - 2.0; }, g);
    auto pairs = eigen_lowest(op, 4);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(pairs[j].value - 4.0 * j) < 5e-3);
}

TEST_CASE("confined mode-k operator has a strictly positive bottom") {
    // cusp nu=1, alpha=1, mu_k=2: Q = tanh^2 - sech^2 + 2 cosh^2
    Grid1D g(40.0, 4001);
    auto op = discretize(
        [](double y) {
            double th = std::tanh(y), se = 1.0 / std::cosh(y);
            double c = std::cosh(y);
            return th * th - se * se + 2.0 * c * c;
        },
        g);
    auto pairs = eigen_lowest(op, 1);
    CHECK(pairs[0].value > 0.5);
}

TEST_CASE("Crank-Nicolson: constant potential factorizes against the free kernel") {
    double q = 0.7, t = 0.1;
    Grid1D g(10.0, 20001);
    auto op = discretize([&](double) { return q; }, g);
    int source = (g.n - 1) / 2 - 1;  // interior index of y = 0
    auto u = crank_nicolson(op, t, 1800, source);
    for (double y : {0.0, 0.1, -0.1, 0.5, -0.5, 1.0, 2.0}) {
        int i = source + (int)std::lround(y / g.h);
        double want = std::exp(-q * t) / std::sqrt(4.0 * M_PI * t) *
                      std::exp(-y * y / (4.0 * t));
        CHECK(std::abs(u[i] - want) < 1e-6);
    }
    // mass before boundary leakage
    long double mass = 0;
    for (double x : u) mass += x;
    CHECK(std::abs((double)mass * g.h - std::exp(-q * t)) < 1e-6);
}

TEST_CASE("Crank-Nicolson: propagated kernel is symmetric in source and probe") {
    Grid1D g(8.0, 401);
    auto op = discretize([](double y) { return 1.0 / (1.0 + y * y); }, g);
    int a = 150, b = 260;
    auto ua = crank_nicolson(op, 0.2, 300, a);
    auto ub = crank_nicolson(op, 0.2, 300, b);
    CHECK(std::abs(ua[b] - ub[a]) < 1e-8);
}

TEST_CASE("eigenvalues are monotone in the potential") {
    Grid1D g(8.0, 401);
    auto a = discretize([](double) { return 0.0; }, g);
    auto b = discretize([](double y) { return 0.3 * std::exp(-y * y); }, g);
    auto ea = eigen_lowest(a, 3), eb = eigen_lowest(b, 3);
    for (int i = 0; i < 3; ++i) CHECK(ea[i].value <= eb[i].value + 1e-12);
}

TEST_CASE("trace: free operator cancels exactly in regularized mode") {
    Grid1D g(12.0, 801);
    auto free_op = discretize([](double) { return 2.25; }, g);
    CHECK(std::abs(trace_numeric(free_op, 0.7, TraceMode::Regularized, 2.25)) < 1e-10);
    // full trace against the closed-form lattice spectrum
    long double want = 0;
    for (int j = 1; j <= free_op.size(); ++j)
        want += std::exp(-0.7L * (2.25 + lattice_box_mode(free_op, j)));
    CHECK(trace_numeric(free_op, 0.7, TraceMode::Full) ==
          doctest::Approx((double)want).epsilon(1e-12));
}

TEST_CASE("regularized trace approaches the bound-state sum once the continuum is cut") {
    // PT nu=1.5: bound levels {0, 2}; continuum suppressed by exp(-nu^2 t)
    Grid1D g(20.0, 2001);
    auto op = discretize(pt_potential(1.5), g);
    auto bound = eigen_lowest(op, 2);
    // the continuum difference scales like exp(-nu^2 t): visible at t=4,
    // dead at t=8
    double r8 = trace_numeric(op, 8.0, TraceMode::Regularized, 2.25);
    double s8 = std::exp(-8.0 * bound[0].value) + std::exp(-8.0 * bound[1].value);
    CHECK(std::abs(r8 - s8) < 1e-6);
    double rc = trace_numeric(op, 4.0, TraceMode::Regularized, 2.25);
    double s4 = std::exp(-4.0 * bound[0].value) + std::exp(-4.0 * bound[1].value);
    CHECK(std::abs(rc - s4) < 3e-4);
    CHECK(std::abs(rc - s4) > 1e-6);
    // against the exact levels {0, 2} the h^2 bias enters scaled by t
    double r4 = trace_numeric(op, 4.0, TraceMode::Regularized, 2.25);
    CHECK(std::abs(r4 - (1.0 + std::exp(-8.0))) < 1e-3);
}

TEST_CASE("trace converges at second order under grid halving") {
    double t = 0.5;
    std::vector<double> vals;
    for (int n : {501, 1001, 2001}) {
        Grid1D g(20.0, n);
        auto op = discretize(pt_potential(1.5), g);
        vals.push_back(trace_numeric(op, t, TraceMode::Full));
    }
    double ratio = (vals[0] - vals[1]) / (vals[1] - vals[2]);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("mode-k trace has the predicted log-enhanced small-t size") {
    // cusp nu=1, b=1, alpha=1, mu_k=2 at t=0.01; potential clipped where the
    // states are thermally dead so the QL absolute error stays below the signal
    double t = 0.01;
    Grid1D g(15.0, 3001);
    auto op = discretize(
        [](double y) {
            double th = std::tanh(y), se = 1.0 / std::cosh(y);
            double c = std::cosh(y);
            return std::min(th * th - se * se + 2.0 * c * c, 1e6);
        },
        g);
    double got = trace_numeric(op, t, TraceMode::Full);
    // integrate exp(-t Q) across the exponential walls: the wall prefactor
    // mu_k / 2^{2 nu/alpha} sets the log argument and the constant
    double want = -1.0 / std::sqrt(4.0 * M_PI * t) *
                  ((std::log(2.0 * t) + 0.57721566490153286) - 2.0 * std::log(2.0));
    CHECK(std::abs(got - want) / std::abs(want) < 0.05);
}

TEST_CASE("dirichlet truncation bias on the ground state is negligible by L=20") {
    auto lowest = [](double L, int n) {
        Grid1D g(L, n);
        auto op = discretize(pt_potential(1.5), g);
        return eigen_lowest(op, 1)[0].value;
    };
    CHECK(std::abs(lowest(20.0, 2001) - lowest(40.0, 4001)) < 1e-8);
}

TEST_CASE("input guards") {
    Grid1D g(8.0, 401);
    auto op = discretize([](double) { return 0.0; }, g);
    CHECK_THROWS_AS(eigen_lowest(op, 1000), InvalidParameter);
    CHECK_THROWS_AS(crank_nicolson(op, 0.5, 5, 200), StepBudget);
    auto stiff = discretize([](double) { return 10.0; }, g);
    CHECK_THROWS_AS(crank_nicolson(stiff, 1.0, 10, 200), StepBudget);
    CHECK_THROWS_AS(crank_nicolson(op, 0.5, 100, 399), InvalidParameter);
    CHECK_THROWS_AS(trace_numeric(op, 0.0, TraceMode::Full), InvalidParameter);
    CHECK_THROWS_AS(discretize([](double) { return 1.0 / 0.0; }, g),
                    InvalidParameter);
}
