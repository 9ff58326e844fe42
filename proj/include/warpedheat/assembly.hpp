#pragma once

#include <string>
#include <utility>
#include <vector>

#include "warpedheat/cross_spectrum.hpp"
#include "warpedheat/geometry.hpp"

namespace warpedheat::assembly {

// Warped product of the line (cusp warp) with a cross-section N.  alpha is
// the warp exponent; a geometric product of dimension n has alpha = (n-1)/2,
// but any positive value defines the same family of operators.  k_max counts
// the positive cross-section levels kept in mode sums.
struct ProductModel {
    geometry::WarpFunction warp;
    double alpha = 1.0;
    cross_spectrum::CrossSpectrum cross;
    int k_max = 0;
};

struct ModeTrace {
    int k = 0;          // level index in cross.levels
    double mu = 0.0;    // cross-section eigenvalue
    long long d = 0;    // multiplicity
    double trace = 0.0; // lattice value of Tr e^{-t D_k}
};

struct TraceBreakdown {
    double t = 0.0;
    double trace_D0 = 0.0;            // analytic regularized line trace
    std::vector<ModeTrace> per_mode;  // k = 1..k_max
    double trace_total = 0.0;         // trace_D0 + sum d_k * trace_k
};

// Regularized heat trace of the product: the analytic zero-mode line trace
// plus d_k-weighted lattice traces of the confined operators with potentials
// potential_Qk(warp, alpha, mu_k, .), each solved on an auto-sized grid.
// The omitted k > k_max part is certified <= 1e-8 through the cross-section
// heat trace and the bound Q_k >= mu_k - nu/b^2; TruncationInsufficient
// carries the k_max that would pass.
TraceBreakdown heat_trace_M_breakdown(const ProductModel& model, double t);
double heat_trace_M_regularized(const ProductModel& model, double t);

// One-line JSON record {t, trace_total, trace_D0, per_mode:[{k,mu_k,d_k,trace}]}.
std::string trace_json(const TraceBreakdown& bd);

// Coefficients of the t -> 0 law S1 t^{-1/2} log t + S2 t^{-1/2} + ... of the
// mode sum, by zeta-regularizing the per-mode short-time traces.  Both
// zeta(0) conventions of the cross-section are reported: the closed heat
// coefficient form and the kernel-removed continuation (they differ by 1).
// Requires a 3-dimensional product (cross-section log-determinant).
struct ShortTimeLaw {
    double S1 = 0.0, S2 = 0.0;                      // closed-form zeta(0)
    double S1_continued = 0.0, S2_continued = 0.0;  // kernel-removed zeta(0)
};
ShortTimeLaw trace_asymptotics_S1_S2(const ProductModel& model);

// A0 = vol(M) and A1 = (1/6) int_M R, reduced to weighted line integrals
// times cross-section data; quadrature relative error <= 1e-9.  The curvature
// part of A1 (present for sphere cross-sections) needs a slower-decaying line
// integral that converges only for alpha > 1 (DivergentCoefficient otherwise);
// flat cross-sections work for any alpha > 0.
std::pair<double, double> heat_coeff_A01_M(const ProductModel& model);

// Compares e^{nu^2 t / b^2} x (regularized line trace) against its short-time
// series truncated after k_trunc terms (k_trunc in {1,2}) on a grid of times
// t <= 0.5 b^2, then fits the remainder's power of t/b^2.  ok means the
// fitted exponent lies within 0.3 of the first dropped half-integer power.
struct RemainderFit {
    std::vector<double> tau;        // times in units of b^2
    std::vector<double> lhs, rhs;
    double fitted_exponent = 0.0;
    double fitted_scale = 0.0;      // |lhs-rhs| ~ scale * tau^exponent
    double expected_exponent = 0.0;
    bool ok = false;
};
RemainderFit verify_short_time_identity(double nu, double b,
                                        const std::vector<double>& t_grid,
                                        int k_trunc);

// Pointwise product heat kernel, torus cross-sections only: explicit Fourier
// sum over lattice modes with |mu| up to level k_max, Crank-Nicolson columns
// in y for the confined modes (the source is snapped to the nearest grid
// node), the analytic kernel for the zero mode, and the intertwining factor
// e^{alpha(omega(y)+omega(y'))} applied outermost.
double heat_kernel_M_torus(const ProductModel& model, double t, double y,
                           const std::vector<double>& x, double yp,
                           const std::vector<double>& xp);

}  // namespace warpedheat::assembly
