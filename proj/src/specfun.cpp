#include "warpedheat/specfun.hpp"

#include <cmath>
#include <cstdlib>

#include "warpedheat/errors.hpp"

namespace warpedheat::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Lanczos coefficients, g = 607/128 (Godfrey's 15-term set, ~15 significant
// digits on the right half plane).
constexpr double kLanczosG = 4.7421875;
constexpr double kLanczos[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

bool near_nonpositive_integer(Complex z, double tol) {
    if (std::abs(z.imag()) > tol) return false;
    double n = std::round(z.real());
    return n <= 0.5 && std::abs(z.real() - n) <= tol &&
           std::abs(Complex(z.real() - n, z.imag())) <= tol;
}

// Gamma on Re z >= 1/2 only.
Complex gamma_right(Complex z) {
    Complex a(kLanczos[0], 0.0);
    for (int k = 1; k < 15; ++k) a += kLanczos[k] / (z - 1.0 + double(k));
    Complex t = z + (kLanczosG - 0.5);
    return std::sqrt(2.0 * kPi) * std::pow(t, z - 0.5) * std::exp(-t) * a;
}

}  // namespace

Complex sinpi(Complex z) {
    double n = std::round(z.real());
    Complex r(z.real() - n, z.imag());
    Complex s = std::sin(kPi * r);
    return (std::fmod(n, 2.0) == 0.0) ? s : -s;
}

Complex cospi(Complex z) {
    double n = std::round(z.real());
    Complex r(z.real() - n, z.imag());
    Complex c = std::cos(kPi * r);
    return (std::fmod(n, 2.0) == 0.0) ? c : -c;
}

Complex gamma_complex(Complex z) {
    if (near_nonpositive_integer(z, 1e-12))
        throw PoleError("gamma_complex: argument at a pole", z);
    if (z.real() >= 0.5) return gamma_right(z);
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    return kPi / (sinpi(z) * gamma_right(1.0 - z));
}

Complex rgamma(Complex z) {
    if (near_nonpositive_integer(z, 1e-12)) return Complex(0.0, 0.0);
    if (z.real() >= 0.5) return 1.0 / gamma_right(z);
    return sinpi(z) * gamma_right(1.0 - z) / kPi;
}

Complex digamma(Complex z) {
    if (near_nonpositive_integer(z, 1e-12))
        throw PoleError("digamma: argument at a pole", z);
    Complex acc(0.0, 0.0);
    if (z.real() < 0.5) {
        // psi(z) = psi(1-z) - pi cot(pi z)
        acc -= kPi * cospi(z) / sinpi(z);
        z = 1.0 - z;
    }
    while (z.real() < 12.0) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    // Asymptotic series with B_2..B_14.
    Complex w2 = 1.0 / (z * z);
    Complex s(0.0, 0.0);
    constexpr double kBern[7] = {
        1.0 / 12.0,  -1.0 / 120.0,     1.0 / 252.0, -1.0 / 240.0,
        1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0,
    };
    Complex p = w2;
    for (double coef : kBern) {
        s += coef * p;
        p *= w2;
    }
    return acc + std::log(z) - 0.5 / z - s;
}

namespace {

// Direct series sum_k (a)_k (b)_k / ((c)_k k!) x^k.  Stops once two
// consecutive terms fall below 1e-16 |partial sum|.  terminate_at >= 0 sums
// exactly that many +1 terms (the polynomial case).
Complex hyp_series(Complex a, Complex b, Complex c, double x, long terminate_at) {
    Complex sum(1.0, 0.0);
    Complex term(1.0, 0.0);
    int small_streak = 0;
    const long cap = (terminate_at >= 0) ? terminate_at : 10000;
    for (long k = 0; k < cap; ++k) {
        term *= (a + double(k)) * (b + double(k)) /
                ((c + double(k)) * double(k + 1)) * x;
        sum += term;
        if (terminate_at < 0) {
            if (std::abs(term) < 1e-16 * std::abs(sum)) {
                if (++small_streak >= 2) return sum;
            } else {
                small_streak = 0;
            }
        }
    }
    if (terminate_at >= 0) return sum;
    throw NoConvergence("hyp2f1: series budget of 10000 terms exhausted");
}

// Index m >= 0 if z is within 1e-9 of -m, else -1.
long terminating_index(Complex z) {
    if (std::abs(z.imag()) > 1e-9) return -1;
    double n = std::round(z.real());
    if (n > 0.5 || std::abs(z.real() - n) > 1e-9) return -1;
    return static_cast<long>(-n);
}

// Connection formula in w = 1-x:
//   F(a,b;c;x) = G(c)G(c-a-b)/(G(c-a)G(c-b)) F(a,b;a+b-c+1;w)
//              + w^{c-a-b} G(c)G(a+b-c)/(G(a)G(b)) F(c-a,c-b;c-a-b+1;w)
Complex hyp_connection(Complex a, Complex b, Complex c, double w) {
    const Complex s = c - a - b;
    double sn = std::round(s.real());
    if (std::abs(s.imag()) <= 1e-8 && std::abs(s.real() - sn) <= 1e-8)
        throw NoConvergence(
            "hyp2f1: connection formula degenerate (c-a-b within 1e-8 of an "
            "integer) and series does not terminate");
    Complex gc = gamma_complex(c);
    Complex k1 = gc * gamma_complex(s) * rgamma(c - a) * rgamma(c - b);
    Complex k2 = gc * gamma_complex(-s) * rgamma(a) * rgamma(b);
    Complex f1 = hyp_series(a, b, a + b - c + 1.0, w, -1);
    Complex f2 = hyp_series(c - a, c - b, s + 1.0, w, -1);
    return k1 * f1 + std::pow(Complex(w, 0.0), s) * k2 * f2;
}

// a or b snapped to a nonpositive integer -m makes the series a polynomial;
// returns the term count, or -1 when neither parameter terminates.
long snap_terminating(Complex& a, Complex& b) {
    long ma = terminating_index(a);
    long mb = terminating_index(b);
    if (ma >= 0 && (mb < 0 || ma <= mb)) {
        a = Complex(double(-ma), 0.0);
        return ma;
    }
    if (mb >= 0) {
        b = Complex(double(-mb), 0.0);
        return mb;
    }
    return -1;
}

}  // namespace

Complex hyp2f1(Complex a, Complex b, Complex c, double x) {
    if (!(x >= 0.0 && x < 1.0))
        throw InvalidParameter("hyp2f1: x must lie in [0,1)");
    if (near_nonpositive_integer(c, 1e-12))
        throw PoleError("hyp2f1: c at a nonpositive integer", c);
    if (x == 0.0) return Complex(1.0, 0.0);

    long m = snap_terminating(a, b);
    if (m >= 0) return hyp_series(a, b, c, x, m);
    if (x <= 0.5) return hyp_series(a, b, c, x, -1);
    return hyp_connection(a, b, c, 1.0 - x);
}

Complex hyp2f1_near1(Complex a, Complex b, Complex c, double w) {
    if (!(w > 0.0 && w <= 0.5))
        throw InvalidParameter("hyp2f1_near1: w must lie in (0, 1/2]");
    if (near_nonpositive_integer(c, 1e-12))
        throw PoleError("hyp2f1_near1: c at a nonpositive integer", c);
    long m = snap_terminating(a, b);
    if (m >= 0) return hyp_series(a, b, c, 1.0 - w, m);
    return hyp_connection(a, b, c, w);
}

Complex legendre_P(Complex mu, double nu, double z) {
    if (!(z > -1.0 && z < 1.0))
        throw InvalidParameter("legendre_P: z must lie in (-1,1)");
    Complex f = hyp2f1(Complex(-nu, 0.0), Complex(nu + 1.0, 0.0), 1.0 + mu,
                       0.5 * (1.0 - z));
    // ((1-z)/(1+z))^{mu/2} on the positive real base.
    Complex pref = std::exp(0.5 * mu * std::log((1.0 - z) / (1.0 + z)));
    return rgamma(1.0 + mu) * pref * f;
}

}  // namespace warpedheat::specfun
