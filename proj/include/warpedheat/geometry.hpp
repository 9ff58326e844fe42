#pragma once

// Warp profiles omega(y), curvature of the warped metric
// dy^2 + e^{-2 omega(y)} dl_N^2, warped volume, and radial geodesics.

#include <functional>

namespace warpedheat::geometry {

enum class WarpKind { Cusp, Linear, Quadratic, Custom };

struct WarpFunction {
    WarpKind kind = WarpKind::Custom;
    std::function<double(double)> omega;
    std::function<double(double)> omega1;  // d omega / dy
    std::function<double(double)> omega2;  // d^2 omega / dy^2
    // Limit of |omega'| as |y| -> inf (infinity() when unbounded).
    double asymptotic_slope = 0.0;
    // Cusp parameters, kept for the closed-form paths. Zero otherwise.
    double nu = 0.0;
    double alpha = 0.0;
    double b = 0.0;
};

// omega(y) = (nu/alpha) log cosh(y/b); finite-volume cusp profile.
WarpFunction make_cusp_warp(double nu, double alpha, double b);

// omega(y) = y/a (hyperbolic cusp end; volume over the full line diverges).
WarpFunction make_linear_warp(double a);

// omega(y) = (y/b)^2.
WarpFunction make_quadratic_warp(double b);

// Arbitrary profile; derivatives by 4th-order central differences with
// step 1e-4 * max(1, |y|).
WarpFunction make_custom_warp(std::function<double(double)> omega);

struct CurvatureReport {
    // R^{0k}_{0i} = -delta^k_i * r_0k0i_factor
    double r_0k0i_factor;
    // warp contribution -omega'^2 to the purely tangential R^{ij}_{km}
    double r_ijkm_warp_term;
    // Ricci R^0_0 = -2 alpha (omega'^2 - omega'')
    double ricci_00;
    // scalar curvature minus the e^{2 omega} F(cross) piece
    double scalar_R_warp_part;  // 4 alpha omega'' - 2 alpha (2 alpha + 1) omega'^2
    double conformal_factor;    // e^{2 omega(y)}
};

CurvatureReport curvature_at(const WarpFunction& warp, double alpha, double y);

// beta = integral over R of e^{-2 alpha omega(y)} dy, adaptive quadrature to
// 1e-10 relative. Throws DivergentVolume when the profile does not decay on
// both ends.
double volume_beta(const WarpFunction& warp, double alpha);

// Geodesic distance on the constant-curvature cusp (omega = y/a) between
// (y, x) and (y', x'), where sigma_hat is the flat cross-section separation
// term: d = a arccosh[ cosh((y-y')/a) + e^{-(y+y')/a} sigma_hat / a^2 ].
double geodesic_distance_cusp(double y, double yp, double sigma_hat, double a);

// Radial position y(s) along the geodesic with first integral
// ydot^2 = 1 - c1^2 e^{2 omega(y)}, on the ydot >= 0 branch through y0.
// Negative s walks the same trajectory backward. Inverts the arc-length
// quadrature to |s(y) - s| <= 1e-9. Throws TurningPoint if |s| exceeds the
// arc length to the point where ydot = 0.
double geodesic_y_of_s(const WarpFunction& warp, double y0, double c1, double s);

}  // namespace warpedheat::geometry
