#pragma once

// Exact spectral theory of the one-dimensional operator
//   D0 = -d^2/dy^2 + (nu^2 - nu(nu+1)/cosh^2(y/b)) / b^2
// (the shifted Poschl-Teller well): bound states, Jost solutions, the
// transmission/reflection pair, resolvent, heat kernel, and the regularized
// heat trace.  Also the mode potentials Q_k = alpha^2 w'^2 - alpha w'' +
// mu_k e^{2w} that replace the well once a cross-section eigenvalue mu_k
// couples in, together with their small-time trace asymptotics.

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "warpedheat/geometry.hpp"

namespace warpedheat::spectral1d {

using Complex = std::complex<double>;

struct PoschlTellerOp {
    double nu;  // well strength; continuum threshold sits at nu^2/b^2
    double b;   // length scale of the well
};

// Pole of the transmission/reflection pair with its multiplicity.
struct Pole {
    double mu;
    int order;  // 1 = simple, 2 = double
};

struct ScatteringData {
    std::function<Complex(Complex)> T;
    std::function<Complex(Complex)> R;
    // Simple poles nu - j on (0, nu]; one per bound state.
    std::vector<double> poles_right;
    // Poles with Re mu < 0, sorted descending.  Empty at integer nu (the
    // candidate gamma poles cancel against denominator zeros); at
    // half-integer nu the -nu-1-m family becomes double.
    std::vector<Pole> poles_left;
};

struct DiscreteLevel {
    int j;
    double lambda;  // j (2 nu - j) / b^2
    double c;       // L2 normalization constant of the eigenfunction
};

struct SpectralDecomposition {
    std::vector<DiscreteLevel> discrete;  // j = 0 .. ceil(nu)-1
    int n_discrete;                       // = discrete.size() = ceil(nu)
    double continuum_threshold;           // nu^2 / b^2
};

enum class Side { Plus, Minus };

// (nu^2 - nu(nu+1)/cosh^2(y/b)) / b^2.
double potential_Q0(const PoschlTellerOp& op, double y);

// alpha^2 w'(y)^2 - alpha w''(y) + mu_k e^{2 w(y)} for any warp profile w;
// for the cusp warp this is the Q0 well plus mu_k cosh^{2 nu/alpha}(y/b).
double potential_Qk(const geometry::WarpFunction& warp, double alpha,
                    double mu_k, double y);

// Eigenvalues j(2nu-j)/b^2 for j = 0..ceil(nu)-1 (integer nu drops j = nu:
// that level merges with the continuum threshold), with normalizations
// c_j = sqrt((nu-j) Gamma(2nu-j+1) / j!) / sqrt(b) making the bound states
// unit L2 norm.
SpectralDecomposition discrete_spectrum(const PoschlTellerOp& op);

// Normalized bound state: c_j P^{j-nu}_nu(tanh(y/b)), evaluated through the
// exponentially stable |y| form and the exact (-1)^j parity.
double eigenfunction(const PoschlTellerOp& op, int j, double y);

// Jost solutions.  E_+(mu, y) is exp(mu y / b) as y -> +inf; E_-(mu, y) =
// E_+(mu, -y).  Throws PoleError within 1e-10 of a pole of the gamma
// prefactor (mu = nu - j or mu = -nu - 1 - m) and at nonpositive-integer mu,
// where this hypergeometric representation degenerates.
Complex jost_E(const PoschlTellerOp& op, Side side, Complex mu, double y);

// Transmission and reflection pair (T, R):
//   T(mu) = Gamma(mu+nu+1) Gamma(mu-nu) / (Gamma(mu+1) Gamma(mu)),
//   R(mu) = sin(pi nu)/sin(pi mu) * T(mu).
// R is evaluated through the reflection of 1/Gamma(mu), which removes the
// sin(pi mu) denominator; when |sin(pi nu)| < 1e-8 the analytic limit
// R = 0 is taken (reflectionless well).  Throws PoleError within 1e-10 of
// a pole of either expression.
std::pair<Complex, Complex> scattering(const PoschlTellerOp& op, Complex mu);

// Packaged coefficient functions plus the pole lists.  left_depth bounds the
// enumeration of the infinite left families.
ScatteringData scattering_data(const PoschlTellerOp& op, int left_depth = 8);

// Resolvent of D0 at spectral parameter lambda (principal branch
// mu = sqrt(nu^2 - lambda b^2), Re mu >= 0):
//   b / (2 mu T(mu)) E_+(mu, min(y,y')) E_-(mu, max(y,y')).
// Throws OnSpectrum within 1e-10 of the cut [nu^2/b^2, inf) or of a
// discrete eigenvalue.
Complex resolvent_G0(const PoschlTellerOp& op, Complex lambda, double y,
                     double yp);

// Diagonal continuum kernel at momentum p > 0:
//   sinh^2(pi p) / (sinh^2(pi p) + sin^2(pi nu)) * (Psi(p,y) + Psi(p,-y)),
// Psi(p,y) = |2F1(-nu, nu+1; 1+ip; (1+tanh(y/b))/2)|^2.  Tends to 2 as
// p -> inf; equals the Jost product E_+(ip,y)E_+(-ip,y)+E_-(ip,y)E_-(-ip,y).
double W_diagonal(const PoschlTellerOp& op, double p, double y);

// Heat kernel of D0: bound-state sum plus the continuum integral
// (1/b) int_0^inf dp/(2 pi) e^{-(nu^2+p^2) t/b^2} W(p; y, y'), truncated at
// p_max = sqrt(30/t) max(1, b).  Throws TailBoundViolated if the analytic
// tail bound exceeds 1e-10.
double heat_kernel_U0(const PoschlTellerOp& op, double t, double y, double yp);

// Regularized trace lim_{L->inf} int_{-L}^{L} [U0(t;y,y) - free diagonal] dy,
// the quantity a lattice trace difference converges to.  Evaluated as the
// bound-state sum plus int_0^inf dp/(2 pi) e^{-(nu^2+p^2) t/b^2} I_W(p), where
// I_W(p) is the y-integral of [W(p;y,y) - 2]/b, minus a threshold term
// e^{-t nu^2/b^2}/2 for reflecting (non-integer nu) wells: their continuum
// density of states carries a -1/2 point mass at p = 0 that the smooth I_W
// integrand does not capture.  I_W is independent of t and b; it is computed
// once per nu (body on |y| <= 15 b plus the closed-form integral of the
// oscillatory R(ip) e^{-2ip|y|/b} tail) and cached.
double regularized_trace_D0(const PoschlTellerOp& op, double t);

// Leading small-time trace of the confining mode operator
// D_k = -d^2/dy^2 + Q_k on the cusp warp:
//   -b (4 pi t)^{-1/2} [ (alpha/nu)(log(mu_k t) + gamma_E) - 2 log 2 ].
// The constant comes from integrating exp(-t Q_k) across the exponential
// walls: Q_k ~ (mu_k / 2^{2nu/alpha}) e^{2nu|y|/(alpha b)}, so each wall
// contributes (alpha b / (2 nu)) E_1(mu_k t / 2^{2nu/alpha}).
double trace_Dk_smallt(const geometry::WarpFunction& warp, double alpha,
                       double mu_k, double t);

}  // namespace warpedheat::spectral1d
