#include "warpedheat/geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <utility>

#include "warpedheat/errors.hpp"

namespace warpedheat::geometry {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

double logcosh(double x) {
    double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - 0.6931471805599453094172321;
}

double sech(double x) {
    double e = std::exp(-std::abs(x));
    return 2.0 * e / (1.0 + e * e);
}

// 4th-order central differences; step scales with |y|.
double fd1(const std::function<double(double)>& f, double y) {
    double h = 1e-4 * std::max(1.0, std::abs(y));
    return (-f(y + 2 * h) + 8 * f(y + h) - 8 * f(y - h) + f(y - 2 * h)) /
           (12 * h);
}

double fd2(const std::function<double(double)>& f, double y) {
    double h = 1e-4 * std::max(1.0, std::abs(y));
    return (-f(y + 2 * h) + 16 * f(y + h) - 30 * f(y) + 16 * f(y - h) -
            f(y - 2 * h)) /
           (12 * h * h);
}

double brent_root(const std::function<double(double)>& f, double lo, double hi) {
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace

WarpFunction make_cusp_warp(double nu, double alpha, double b) {
    if (!(nu > 0.0) || !(alpha > 0.0) || !(b > 0.0))
        throw InvalidParameter("make_cusp_warp: nu, alpha, b must be positive");
    WarpFunction w;
    w.kind = WarpKind::Cusp;
    w.nu = nu;
    w.alpha = alpha;
    w.b = b;
    w.omega = [=](double y) { return nu / alpha * logcosh(y / b); };
    w.omega1 = [=](double y) { return nu / (alpha * b) * std::tanh(y / b); };
    w.omega2 = [=](double y) {
        double s = sech(y / b);
        return nu / (alpha * b * b) * s * s;
    };
    w.asymptotic_slope = nu / (alpha * b);
    return w;
}

WarpFunction make_linear_warp(double a) {
    if (!(a > 0.0)) throw InvalidParameter("make_linear_warp: a must be positive");
    WarpFunction w;
    w.kind = WarpKind::Linear;
    w.omega = [=](double y) { return y / a; };
    w.omega1 = [=](double) { return 1.0 / a; };
    w.omega2 = [](double) { return 0.0; };
    w.asymptotic_slope = 1.0 / a;
    return w;
}

WarpFunction make_quadratic_warp(double b) {
    if (!(b > 0.0))
        throw InvalidParameter("make_quadratic_warp: b must be positive");
    WarpFunction w;
    w.kind = WarpKind::Quadratic;
    w.omega = [=](double y) { return y * y / (b * b); };
    w.omega1 = [=](double y) { return 2.0 * y / (b * b); };
    w.omega2 = [=](double) { return 2.0 / (b * b); };
    w.asymptotic_slope = std::numeric_limits<double>::infinity();
    return w;
}

WarpFunction make_custom_warp(std::function<double(double)> omega) {
    WarpFunction w;
    w.kind = WarpKind::Custom;
    auto om = std::move(omega);
    w.omega = om;
    w.omega1 = [om](double y) { return fd1(om, y); };
    w.omega2 = [om](double y) { return fd2(om, y); };
    w.asymptotic_slope =
        std::min(std::abs(fd1(om, 1e6)), std::abs(fd1(om, -1e6)));
    return w;
}

CurvatureReport curvature_at(const WarpFunction& warp, double alpha, double y) {
    double w1 = warp.omega1(y);
    double w2 = warp.omega2(y);
    CurvatureReport r;
    r.r_0k0i_factor = w1 * w1 - w2;
    r.r_ijkm_warp_term = -w1 * w1;
    r.ricci_00 = -2.0 * alpha * (w1 * w1 - w2);
    r.scalar_R_warp_part = 4.0 * alpha * w2 - 2.0 * alpha * (2.0 * alpha + 1.0) * w1 * w1;
    r.conformal_factor = std::exp(2.0 * warp.omega(y));
    return r;
}

double volume_beta(const WarpFunction& warp, double alpha) {
    if (!(alpha > 0.0)) throw InvalidParameter("volume_beta: alpha must be positive");
    if (warp.kind == WarpKind::Linear)
        throw DivergentVolume("volume_beta: linear warp diverges toward y -> -inf");

    auto f = [&](double y) { return std::exp(-2.0 * alpha * warp.omega(y)); };

    // Expand the window until the integrand has decayed on both ends and the
    // local exponential envelope gives a negligible tail.
    double peak = std::max(f(0.0), 1e-300);
    double Y = 1.0;
    for (;;) {
        if (Y > 1e7)
            throw DivergentVolume("volume_beta: no decay up to |y| = 1e7");
        peak = std::max({peak, f(Y / 2), f(-Y / 2)});
        double rp = 2.0 * alpha * warp.omega1(Y);    // outward decay rates
        double rm = -2.0 * alpha * warp.omega1(-Y);
        if (f(Y) < 1e-15 * peak && f(-Y) < 1e-15 * peak && rp > 0 && rm > 0)
            break;
        Y *= 2.0;
    }
    double err = 0.0;
    double total = GK::integrate(f, -Y, Y, 15, 1e-11, &err);
    // envelope bound on the dropped tails
    double tail = f(Y) / (2.0 * alpha * warp.omega1(Y)) +
                  f(-Y) / (-2.0 * alpha * warp.omega1(-Y));
    if (!(total > 0.0) || err > 1e-9 * total)
        throw NoConvergence("volume_beta: quadrature failed to converge");
    if (tail > 1e-12 * total)
        throw DivergentVolume("volume_beta: tail bound too large");
    return total + tail;
}

double geodesic_distance_cusp(double y, double yp, double sigma_hat, double a) {
    if (!(a > 0.0))
        throw InvalidParameter("geodesic_distance_cusp: a must be positive");
    if (sigma_hat < 0.0)
        throw InvalidParameter("geodesic_distance_cusp: sigma_hat must be >= 0");
    double arg = std::cosh((y - yp) / a) + std::exp(-(y + yp) / a) * sigma_hat / (a * a);
    return a * std::acosh(arg);
}

double geodesic_y_of_s(const WarpFunction& warp, double y0, double c1, double s) {
    auto g = [&](double y) {
        double e = c1 * std::exp(warp.omega(y));
        return 1.0 - e * e;
    };
    if (!(g(y0) > 0.0))
        throw InvalidParameter("geodesic_y_of_s: starting point at or beyond the turning point");
    if (s == 0.0) return y0;

    const double dir = (s > 0.0) ? 1.0 : -1.0;
    const double target = std::abs(s);
    auto speed_inv = [&](double y) { return 1.0 / std::sqrt(g(y)); };

    const double step = 0.5 * std::max(1.0, std::abs(y0));
    double ya = y0;
    double acc = 0.0;
    for (long it = 0; it < 400000; ++it) {
        double yb = ya + dir * step;
        double ymid = 0.5 * (ya + yb);
        if (g(yb) <= 0.0 || g(ymid) <= 0.0) {
            // turning point inside this chunk
            double bad = (g(ymid) <= 0.0) ? ymid : yb;
            double lo = std::min(ya, bad), hi = std::max(ya, bad);
            double yt = brent_root(g, lo, hi);
            // integrable 1/sqrt singularity: substitute y = yt - dir v^2, so
            // |dy|/sqrt(g) = 2 dv / sqrt(G(v^2)) with G(u) = g(yt - dir u)/u,
            // which is smooth and positive through the turning point.  Below
            // u1 the direct ratio is rounding noise over noise, so switch to
            // the secant model built from two safely separated samples.
            double L = std::abs(yt - ya);
            double u1 = 1e-5 * std::max(1.0, L), u2 = 2.0 * u1;
            auto Gu = [&](double u) { return g(yt - dir * u) / u; };
            double G1 = Gu(u1), G2 = Gu(u2);
            auto h = [&](double v) {
                double u = v * v;
                double G = (u < u1) ? G1 + (G2 - G1) * (u - u1) / (u2 - u1)
                                    : Gu(u);
                return 2.0 / std::sqrt(std::max(G, 1e-300));
            };
            double vmax = std::sqrt(L);
            double arc_t = GK::integrate(h, 0.0, vmax, 15, 1e-12);
            double remaining = target - acc;
            if (remaining > arc_t + 1e-12)
                throw TurningPoint("geodesic_y_of_s: turning point reached before arc length s",
                                   yt, dir * (acc + arc_t));
            if (remaining >= arc_t) return yt;  // s lands (numerically) on the turning point
            // solve for v with arc(ya -> y(v)) = remaining
            auto fv = [&](double v) {
                return GK::integrate(h, 0.0, v, 15, 1e-12) - (arc_t - remaining);
            };
            double v = brent_root(fv, 0.0, vmax);
            return yt - dir * v * v;
        }
        double seg = GK::integrate(speed_inv, std::min(ya, yb), std::max(ya, yb), 15, 1e-12);
        if (acc + seg >= target) {
            auto fy = [&](double y) {
                double part = GK::integrate(speed_inv, std::min(ya, y), std::max(ya, y), 15, 1e-12);
                return acc + part - target;
            };
            double lo = std::min(ya, yb), hi = std::max(ya, yb);
            return brent_root(fy, lo, hi);
        }
        acc += seg;
        ya = yb;
    }
    throw ConvergenceFailure("geodesic_y_of_s: marching budget exhausted");
}

}  // namespace warpedheat::geometry
