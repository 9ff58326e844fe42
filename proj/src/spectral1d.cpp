#include "warpedheat/spectral1d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "warpedheat/errors.hpp"
#include "warpedheat/specfun.hpp"

namespace warpedheat::spectral1d {

namespace {

constexpr double kPoleTol = 1e-10;

void check_op(const PoschlTellerOp& op) {
    if (!(op.nu > 0.0) || !(op.b > 0.0))
        throw InvalidParameter("PoschlTellerOp: nu and b must be positive");
}

bool near_nonpositive_integer(Complex w, double tol) {
    if (std::abs(w.imag()) > tol) return false;
    const double n = std::round(w.real());
    return n <= 0.0 && std::abs(w.real() - n) <= tol;
}

double sin_pi(double x) { return specfun::sinpi(Complex(x, 0.0)).real(); }
double cos_pi(double x) { return specfun::cospi(Complex(x, 0.0)).real(); }

// nu within 1e-8 of an integer: sin(pi nu) vanishes and the well is
// reflectionless; the gamma quotients are evaluated by their analytic limits.
bool reflectionless(double nu) { return std::abs(sin_pi(nu)) < 1e-8; }

// F(-nu, nu+1; c; x) at x = 1/(1 + e^{-2u}).  The u > 0 half routes through
// the right-endpoint form so the x -> 1 prefactor (1-x)^{c-1} keeps full
// precision; for u beyond ~355 the complement underflows and the Gauss
// endpoint value is exact to machine precision.
Complex well_hyp(double nu, Complex c, double u) {
    const Complex fa(-nu, 0.0), fb(nu + 1.0, 0.0);
    if (u <= 0.0)
        return specfun::hyp2f1(fa, fb, c, 1.0 / (1.0 + std::exp(-2.0 * u)));
    const double w = 1.0 / (1.0 + std::exp(2.0 * u));
    if (w == 0.0)
        return specfun::gamma_complex(c) * specfun::gamma_complex(c - 1.0) *
               specfun::rgamma(c + nu) * specfun::rgamma(c - nu - 1.0);
    return specfun::hyp2f1_near1(fa, fb, c, w);
}

// 16-node Gauss-Legendre rule on [lo, hi]: ascending nodes with weights.
struct Panel16 {
    double x[16];
    double w[16];
};

Panel16 panel16(double lo, double hi) {
    using G = boost::math::quadrature::gauss<double, 16>;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    Panel16 out;
    for (int i = 0; i < 8; ++i) {
        out.x[i] = mid - half * G::abscissa()[7 - i];
        out.w[i] = half * G::weights()[7 - i];
        out.x[8 + i] = mid + half * G::abscissa()[i];
        out.w[8 + i] = half * G::weights()[i];
    }
    return out;
}

template <class F>
double gl16(F&& f, double lo, double hi) {
    const Panel16 nd = panel16(lo, hi);
    double acc = 0.0;
    for (int i = 0; i < 16; ++i) acc += nd.w[i] * f(nd.x[i]);
    return acc;
}

// T(mu) for integer nu = n: the gamma quotient collapses to a rational
// function, finite everywhere except the poles mu = 1..n.
Complex transmission_integer(int n, Complex mu) {
    Complex t(1.0, 0.0);
    for (int j = 1; j <= n; ++j)
        t *= (mu + static_cast<double>(j)) / (mu - static_cast<double>(j));
    return t;
}

Complex transmission_generic(double nu, Complex mu) {
    return specfun::gamma_complex(mu + nu + 1.0) *
           specfun::gamma_complex(mu - nu) * specfun::rgamma(mu + 1.0) *
           specfun::rgamma(mu);
}

// R(mu) with 1/Gamma(mu) replaced through the reflection formula: the
// sin(pi mu) denominator cancels, so the negative axis is regular away from
// the gamma poles and the only extra poles come from Gamma(1-mu).
Complex reflection_generic(double nu, Complex mu) {
    return sin_pi(nu) / std::numbers::pi *
           specfun::gamma_complex(mu + nu + 1.0) *
           specfun::gamma_complex(mu - nu) * specfun::gamma_complex(1.0 - mu) *
           specfun::rgamma(mu + 1.0);
}

Complex transmission(const PoschlTellerOp& op, Complex mu) {
    if (reflectionless(op.nu))
        return transmission_integer(static_cast<int>(std::lround(op.nu)), mu);
    return transmission_generic(op.nu, mu);
}

int discrete_count(double nu) {
    return static_cast<int>(std::lround(std::ceil(nu)));
}

double normalization(double nu, int j, double b) {
    return std::sqrt((nu - j) * std::tgamma(2.0 * nu - j + 1.0) /
                     std::tgamma(j + 1.0) / b);
}

// E_+(ip, y) E_+(-ip, y') + E_-(ip, y) E_-(-ip, y').  The hermitian pairing
// makes the sum exactly real and symmetric; Re() discards rounding dust.
double w_offdiag(const PoschlTellerOp& op, double p, double y, double yp) {
    const Complex mu(0.0, p);
    const Complex right = jost_E(op, Side::Plus, mu, y) *
                          std::conj(jost_E(op, Side::Plus, mu, yp));
    const Complex left = jost_E(op, Side::Plus, mu, -y) *
                         std::conj(jost_E(op, Side::Plus, mu, -yp));
    return right.real() + left.real();
}

// Panel layout of the trace p-quadrature: [0,1] as four quarter panels, then
// unit panels [k, k+1].  Node positions depend only on the flat node index,
// so cached I_W values stay valid as the upper limit grows with 1/t.
std::pair<double, double> trace_panel(int q) {
    if (q < 4) return {0.25 * q, 0.25 * (q + 1)};
    return {static_cast<double>(q - 3), static_cast<double>(q - 2)};
}

// I_W(p) = int_R [W(p; y, y) - 2] dy / b, a function of p and nu only.
// Body on |y| <= 15 b; beyond that W - 2 is the oscillation
// R(ip) e^{-2ip|y|/b} + c.c. up to O(e^{-30}), and its integral is taken in
// closed form, which turns the conditionally convergent tail into an exact
// term plus an absolutely convergent remainder.
double iw_at(double nu, double p) {
    const PoschlTellerOp unit{nu, 1.0};
    const double width = std::min(1.0, 5.0 / p);
    const int n = static_cast<int>(std::ceil(15.0 / width));
    const double h = 15.0 / n;
    double body = 0.0;
    for (int k = 0; k < n; ++k)
        body += gl16([&](double eta) { return W_diagonal(unit, p, eta) - 2.0; },
                     k * h, (k + 1) * h);
    double tail = 0.0;
    if (!reflectionless(nu)) {
        const Complex refl = scattering(unit, Complex(0.0, p)).second;
        tail = 2.0 / p * std::imag(refl * std::exp(Complex(0.0, -30.0 * p)));
    }
    return 2.0 * body + tail;
}

// Cached I_W values on the fixed node layout, grown on demand per nu.
std::vector<double> iw_nodes(double nu, int count) {
    static std::mutex lock;
    static std::map<double, std::vector<double>> cache;
    std::scoped_lock guard(lock);
    std::vector<double>& vals = cache[nu];
    for (int idx = static_cast<int>(vals.size()); idx < count; ++idx) {
        const auto [lo, hi] = trace_panel(idx / 16);
        vals.push_back(iw_at(nu, panel16(lo, hi).x[idx % 16]));
    }
    return std::vector<double>(vals.begin(), vals.begin() + count);
}

}  // namespace

double potential_Q0(const PoschlTellerOp& op, double y) {
    check_op(op);
    const double sech = 1.0 / std::cosh(y / op.b);
    return (op.nu * (op.nu + 1.0) * (-sech) * sech + op.nu * op.nu) /
           (op.b * op.b);
}

double potential_Qk(const geometry::WarpFunction& warp, double alpha,
                    double mu_k, double y) {
    if (!(alpha > 0.0) || !(mu_k >= 0.0))
        throw InvalidParameter(
            "potential_Qk: alpha must be positive, mu_k nonnegative");
    const double w1 = warp.omega1(y);
    const double w2 = warp.omega2(y);
    return alpha * alpha * w1 * w1 - alpha * w2 +
           mu_k * std::exp(2.0 * warp.omega(y));
}

SpectralDecomposition discrete_spectrum(const PoschlTellerOp& op) {
    check_op(op);
    SpectralDecomposition out;
    out.n_discrete = discrete_count(op.nu);
    out.continuum_threshold = op.nu * op.nu / (op.b * op.b);
    for (int j = 0; j < out.n_discrete; ++j)
        out.discrete.push_back({j, j * (2.0 * op.nu - j) / (op.b * op.b),
                                normalization(op.nu, j, op.b)});
    return out;
}

double eigenfunction(const PoschlTellerOp& op, int j, double y) {
    check_op(op);
    if (j < 0 || j >= discrete_count(op.nu))
        throw IndexOutOfRange(
            "eigenfunction: label outside the discrete spectrum");
    const double mu = op.nu - j;
    // Evaluate on the |y| side, where the hypergeometric argument stays in
    // (0, 1/2], and restore the sign from the exact (-1)^j parity (the
    // coefficient of the growing solution vanishes at mu = nu - j).
    const double u = std::abs(y) / op.b;
    const double x = 1.0 / (1.0 + std::exp(2.0 * u));
    const double f = specfun::hyp2f1(Complex(-op.nu, 0.0),
                                     Complex(op.nu + 1.0, 0.0),
                                     Complex(1.0 + mu, 0.0), x)
                         .real();
    double val = normalization(op.nu, j, op.b) * std::exp(-mu * u) * f /
                 std::tgamma(1.0 + mu);
    if (y < 0.0 && j % 2 != 0) val = -val;
    return val;
}

Complex jost_E(const PoschlTellerOp& op, Side side, Complex mu, double y) {
    check_op(op);
    if (near_nonpositive_integer(mu - op.nu, kPoleTol))
        throw PoleError("jost_E: mu at a pole of the Gamma(mu - nu) prefactor",
                        mu);
    if (near_nonpositive_integer(mu + op.nu + 1.0, kPoleTol))
        throw PoleError(
            "jost_E: mu at a pole of the Gamma(mu + nu + 1) prefactor", mu);
    if (near_nonpositive_integer(mu, kPoleTol))
        throw PoleError(
            "jost_E: representation degenerates at nonpositive integer mu", mu);
    const double u = (side == Side::Plus ? y : -y) / op.b;
    const Complex pref = specfun::gamma_complex(mu + op.nu + 1.0) *
                         specfun::gamma_complex(mu - op.nu) *
                         specfun::rgamma(mu) * specfun::rgamma(mu + 1.0);
    return pref * std::exp(mu * u) * well_hyp(op.nu, mu + 1.0, u);
}

std::pair<Complex, Complex> scattering(const PoschlTellerOp& op, Complex mu) {
    check_op(op);
    if (reflectionless(op.nu)) {
        const int n = static_cast<int>(std::lround(op.nu));
        for (int j = 1; j <= n; ++j)
            if (std::abs(mu - Complex(j, 0.0)) <= kPoleTol)
                throw PoleError("scattering: mu at a transmission pole", mu);
        return {transmission_integer(n, mu), Complex(0.0, 0.0)};
    }
    if (near_nonpositive_integer(mu - op.nu, kPoleTol))
        throw PoleError("scattering: mu at a pole of Gamma(mu - nu)", mu);
    if (near_nonpositive_integer(mu + op.nu + 1.0, kPoleTol))
        throw PoleError("scattering: mu at a pole of Gamma(mu + nu + 1)", mu);
    if (near_nonpositive_integer(1.0 - mu, kPoleTol))
        throw PoleError(
            "scattering: reflection pole at positive integer mu", mu);
    return {transmission_generic(op.nu, mu), reflection_generic(op.nu, mu)};
}

ScatteringData scattering_data(const PoschlTellerOp& op, int left_depth) {
    check_op(op);
    if (left_depth < 0)
        throw InvalidParameter("scattering_data: left_depth must be >= 0");
    ScatteringData out;
    const PoschlTellerOp held = op;
    out.T = [held](Complex mu) { return scattering(held, mu).first; };
    out.R = [held](Complex mu) { return scattering(held, mu).second; };
    for (int j = 0; j < discrete_count(op.nu); ++j)
        out.poles_right.push_back(op.nu - j);
    if (reflectionless(op.nu)) return out;  // candidates cancel pairwise
    // Merge the two descending families nu - j (j > floor(nu)) and
    // -nu - 1 - m.  When 2 nu is an odd integer they collide, and each
    // collision is a double pole (both numerator gammas blow up there).
    const bool collide = std::abs(cos_pi(op.nu)) < 1e-8;
    int j = static_cast<int>(std::floor(op.nu)) + 1;
    int m = 0;
    while (static_cast<int>(out.poles_left.size()) < left_depth) {
        const double aj = op.nu - j;
        const double bm = -op.nu - 1.0 - m;
        if (collide && std::abs(aj - bm) < 1e-9) {
            out.poles_left.push_back({bm, 2});
            ++j;
            ++m;
        } else if (aj > bm) {
            out.poles_left.push_back({aj, 1});
            ++j;
        } else {
            out.poles_left.push_back({bm, 1});
            ++m;
        }
    }
    return out;
}

Complex resolvent_G0(const PoschlTellerOp& op, Complex lambda, double y,
                     double yp) {
    check_op(op);
    const double m2 = op.nu * op.nu / (op.b * op.b);
    if (std::abs(lambda.imag()) <= kPoleTol && lambda.real() >= m2 - kPoleTol)
        throw OnSpectrum(
            "resolvent_G0: lambda within 1e-10 of the continuous spectrum");
    for (const auto& lv : discrete_spectrum(op).discrete)
        if (std::abs(lambda - Complex(lv.lambda, 0.0)) <= kPoleTol)
            throw OnSpectrum(
                "resolvent_G0: lambda within 1e-10 of a discrete eigenvalue");
    const Complex mu = std::sqrt(op.nu * op.nu - lambda * op.b * op.b);
    const double lo = std::min(y, yp), hi = std::max(y, yp);
    return op.b / (2.0 * mu * transmission(op, mu)) *
           jost_E(op, Side::Plus, mu, lo) * jost_E(op, Side::Minus, mu, hi);
}

double W_diagonal(const PoschlTellerOp& op, double p, double y) {
    check_op(op);
    if (!(p > 0.0)) throw InvalidParameter("W_diagonal: p must be positive");
    const double u = y / op.b;
    const Complex c(1.0, p);
    const double psi_r = std::norm(well_hyp(op.nu, c, u));
    const double psi_l = std::norm(well_hyp(op.nu, c, -u));
    // sinh^2(pi p) / (sinh^2(pi p) + sin^2(pi nu)), written so that sinh
    // overflow collapses to 1 and the integer-nu limit needs no special case
    const double q = sin_pi(op.nu) / std::sinh(std::numbers::pi * p);
    const double prefactor = 1.0 / (1.0 + q * q);
    return prefactor * (psi_r + psi_l);
}

double heat_kernel_U0(const PoschlTellerOp& op, double t, double y,
                      double yp) {
    check_op(op);
    if (!(t > 0.0))
        throw InvalidParameter("heat_kernel_U0: t must be positive");
    const double b = op.b;
    const double tau = t / (b * b);
    const double p_max = std::sqrt(30.0 / t) * std::max(1.0, b);
    const double bound =
        std::exp(-p_max * p_max * tau) * 2.1 * p_max / (std::numbers::pi * t);
    if (!(bound < 1e-10))
        throw TailBoundViolated(
            "heat_kernel_U0: continuum tail bound above 1e-10 at this t");
    double acc = 0.0;
    for (const auto& lv : discrete_spectrum(op).discrete)
        acc += std::exp(-lv.lambda * t) * eigenfunction(op, lv.j, y) *
               eigenfunction(op, lv.j, yp);
    // panel width keeps the e^{ip(|y|+|y'|)/b} phases of W resolved
    const double rate = (std::abs(y) + std::abs(yp)) / b;
    const double width = std::min(1.0, 10.0 / std::max(1.0, rate));
    const int n = static_cast<int>(std::ceil(p_max / width));
    const double h = p_max / n;
    double cont = 0.0;
    for (int k = 0; k < n; ++k)
        cont += gl16(
            [&](double p) {
                return std::exp(-p * p * tau) * w_offdiag(op, p, y, yp);
            },
            k * h, (k + 1) * h);
    return acc + std::exp(-op.nu * op.nu * tau) * cont /
                     (2.0 * std::numbers::pi * b);
}

double regularized_trace_D0(const PoschlTellerOp& op, double t) {
    check_op(op);
    if (!(t > 0.0))
        throw InvalidParameter("regularized_trace_D0: t must be positive");
    const double tau = t / (op.b * op.b);
    double disc = 0.0;
    for (const auto& lv : discrete_spectrum(op).discrete)
        disc += std::exp(-lv.lambda * t);
    const int kmax =
        std::max(1, static_cast<int>(std::ceil(std::sqrt(30.0 / tau))));
    const int panels = kmax + 3;
    const std::vector<double> vals = iw_nodes(op.nu, 16 * panels);
    double integral = 0.0;
    double magnitude = 1.0;
    for (int q = 0; q < panels; ++q) {
        const auto [lo, hi] = trace_panel(q);
        const Panel16 nd = panel16(lo, hi);
        for (int i = 0; i < 16; ++i) {
            const double iw = vals[16 * q + i];
            magnitude = std::max(magnitude, std::abs(iw));
            integral += nd.w[i] * std::exp(-nd.x[i] * nd.x[i] * tau) * iw;
        }
    }
    const double tail_bound =
        magnitude * std::exp(-(op.nu * op.nu + static_cast<double>(kmax) * kmax) * tau) /
        (4.0 * std::numbers::pi * kmax * tau);
    if (!(tail_bound < 1e-10))
        throw TailBoundViolated(
            "regularized_trace_D0: continuum tail bound above 1e-10");
    double trace = disc + std::exp(-op.nu * op.nu * tau) * integral /
                              (2.0 * std::numbers::pi);
    // The continuum density-of-states difference carries a -1/2 point mass at
    // the spectral threshold p = 0 whenever the well reflects (R(0) = -1).
    // The smooth W integrand cannot see it: swapping the y and p integrals
    // moves exactly -R(0)/2 units of weight into the p -> 0 endpoint, so the
    // plain double integral overcounts by e^{-t nu^2/b^2}/2.  Reflectionless
    // wells (integer nu) instead end the continuum with a genuine zero-energy
    // half-bound state and need no adjustment.
    if (!reflectionless(op.nu))
        trace -= 0.5 * std::exp(-op.nu * op.nu * tau);
    return trace;
}

double trace_Dk_smallt(const geometry::WarpFunction& warp, double alpha,
                       double mu_k, double t) {
    if (warp.kind != geometry::WarpKind::Cusp)
        throw InvalidParameter(
            "trace_Dk_smallt: closed form available for the cusp warp only");
    if (!(alpha > 0.0) || !(mu_k > 0.0) || !(t > 0.0))
        throw InvalidParameter(
            "trace_Dk_smallt: alpha, mu_k and t must be positive");
    // Laplace evaluation of (4 pi t)^{-1/2} int exp(-t Q_k) dy across the
    // two exponential walls Q_k ~ (mu_k / 2^c) e^{c|y|/b}, c = 2 nu / alpha:
    // each wall integrates to (b/c) E_1(mu_k t / 2^c), and E_1's logarithm
    // plus the 2^c wall offset produce the bracket below.
    const double bracket =
        alpha / warp.nu * (std::log(mu_k * t) + std::numbers::egamma) -
        2.0 * std::numbers::ln2;
    return -warp.b / std::sqrt(4.0 * std::numbers::pi * t) * bracket;
}

}  // namespace warpedheat::spectral1d
