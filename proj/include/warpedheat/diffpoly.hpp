#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <string>
#include <vector>

namespace warpedheat::diffpoly {

using Rational = boost::multiprecision::cpp_rational;

// A monomial Q^{(m_1)} Q^{(m_2)} ... is stored as its derivative orders,
// sorted descending.  The empty vector is the constant monomial 1.
using Monomial = std::vector<int>;

// Polynomial in an abstract potential Q and its derivatives, with exact
// rational coefficients.  Canonical form: no zero coefficients.
struct DiffPoly {
    std::map<Monomial, Rational> terms;

    bool is_zero() const { return terms.empty(); }
    bool operator==(const DiffPoly&) const = default;
};

DiffPoly dp_const(const Rational& c);
DiffPoly dp_Q(int m = 0);  // the single variable Q^{(m)}

DiffPoly operator+(const DiffPoly& a, const DiffPoly& b);
DiffPoly operator-(const DiffPoly& a, const DiffPoly& b);
DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
DiffPoly operator*(const Rational& c, const DiffPoly& p);

// d/dy by the Leibniz rule: each factor Q^{(m)} steps to Q^{(m+1)}.
DiffPoly derivative(const DiffPoly& p);

// dimension of a monomial: 2 per factor plus one per derivative stroke
int weight(const Monomial& m);

// E p = p''' - 2 Q p' - 2 (Q p)'
DiffPoly apply_E(const DiffPoly& p);

// Exact q with q' = p and no constant term.  Solves the sparse linear system
// between graded monomial bases; throws NotExactDerivative if p is not a
// total derivative in the algebra.
DiffPoly antiderivative(const DiffPoly& p);

// c_0 = 1, d/dy c_k = k/(2(2k-1)) E c_{k-1}.  Cached; safe for concurrent
// callers (coefficients are published only when fully constructed).
const DiffPoly& heat_coefficient(int k);

// ct_k = sum_j binom(k,j) Q^j c_{k-j}; the derivative-free part cancels.
DiffPoly restructured_coefficient(int k);

// Numeric evaluation: q_derivs = {Q, Q', Q'', ...} at one point.  Throws
// InsufficientDerivatives if p uses a higher derivative than supplied.
double evaluate(const DiffPoly& p, const std::vector<double>& q_derivs);

// {u, u', ..., u^(m_max)} at y for u(y) = -nu(nu+1)/(b^2 cosh^2(y/b)),
// via the tanh-polynomial recursion for sech^2 derivatives.
std::vector<double> cusp_u_derivatives(double nu, double b, double y, int m_max);

// integral over the line of c_k evaluated on the subtracted cusp potential u;
// equals b^{1-2k} times a degree-2k polynomial in nu
double global_Ck_cusp(int k, double nu, double b);

// Stable text form, e.g. "+1 Q^2 -1/3 Q''"; derivatives above the third are
// written Q^(m).
std::string to_string(const DiffPoly& p);

}  // namespace warpedheat::diffpoly
