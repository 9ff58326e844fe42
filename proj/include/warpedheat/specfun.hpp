#pragma once

// Complex special functions used throughout: gamma, digamma, the Gauss
// hypergeometric series on [0,1) with the standard 1-x connection formula,
// and the associated Legendre function P^{-mu}_nu on (-1,1).

#include <complex>

namespace warpedheat::specfun {

using Complex = std::complex<double>;

// sin(pi z) / cos(pi z) with integer argument reduction on Re z, so they are
// exact at (half-)integers instead of inheriting the rounding of pi*z.
Complex sinpi(Complex z);
Complex cospi(Complex z);

// Gamma function, Lanczos rational approximation (g = 607/128, 15 terms)
// plus reflection for Re z < 1/2. Throws PoleError within 1e-12 of
// z = 0, -1, -2, ...
Complex gamma_complex(Complex z);

// 1/Gamma(z), entire: returns exactly 0 at the poles of Gamma.
Complex rgamma(Complex z);

// Digamma psi(z), reflection + recurrence + Bernoulli asymptotic series.
Complex digamma(Complex z);

// Gauss 2F1(a,b;c;x) for real x in [0,1). Direct series for x <= 1/2,
// connection formula in 1-x otherwise. Parameters a or b within 1e-9 of a
// nonpositive integer are snapped and the series terminates exactly.
// Throws PoleError if c is within 1e-12 of a nonpositive integer,
// NoConvergence if the 10000-term budget is exhausted or the connection
// formula degenerates (c-a-b within 1e-8 of an integer, non-terminating).
Complex hyp2f1(Complex a, Complex b, Complex c, double x);

// hyp2f1 evaluated from the distance to the right endpoint: computes
// F(a,b;c;1-w) for w in (0, 1/2]. Passing w directly keeps the w^{c-a-b}
// factor's log w (and hence its phase for complex exponents) accurate when
// 1-x would round to 1. Terminating series are summed at x = 1-w; otherwise
// the connection formula applies, with the same error conditions as hyp2f1.
Complex hyp2f1_near1(Complex a, Complex b, Complex c, double w);

// Associated Legendre function of the first kind, order -mu, degree nu:
//   P^{-mu}_nu(z) = (1/Gamma(1+mu)) ((1-z)/(1+z))^{mu/2}
//                    2F1(-nu, nu+1; 1+mu; (1-z)/2),   |z| < 1.
// The base (1-z)/(1+z) is positive real on the domain, so the principal
// branch of the power is the natural (real) one.
Complex legendre_P(Complex mu, double nu, double z);

}  // namespace warpedheat::specfun
