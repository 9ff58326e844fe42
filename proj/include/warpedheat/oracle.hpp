#pragma once

#include <functional>
#include <vector>

namespace warpedheat::oracle {

// uniform symmetric grid on [-L, L]; n odd so y = 0 is a node
struct Grid1D {
    double L;
    int n;
    double h;

    Grid1D(double L_, int n_);
    double node(int i) const { return -L + i * h; }
};

// symmetric tridiagonal operator on the n-2 interior nodes (Dirichlet ends);
// a single off-diagonal array keeps the matrix symmetric by construction
struct Tridiag {
    std::vector<double> diag;
    std::vector<double> off;
    double h = 0.0;

    int size() const { return static_cast<int>(diag.size()); }
};

// -d^2/dy^2 + Q by second-order central differences
Tridiag discretize(const std::function<double(double)>& Q, const Grid1D& grid);

struct EigenPair {
    double value;
    std::vector<double> vector;  // h-normalized: sum v_i^2 h = 1
};

// lowest `count` eigenpairs by Sturm bisection plus inverse iteration
std::vector<EigenPair> eigen_lowest(const Tridiag& op, int count);

// propagate delta data (1/h at the interior source node) with
// (I + tau/2 D) u_{m+1} = (I - tau/2 D) u_m.  The scheme is A-stable but
// not L-stable: the delta excites modes up to 4/h^2 whose amplification
// factor has modulus ~ exp(-t h^2 / tau^2) after all steps, so choose
// steps >= 5.5 sqrt(t)/h to damp the ringing below ~1e-13.
std::vector<double> crank_nicolson(const Tridiag& op, double t, int steps,
                                   int source_index);

enum class TraceMode { Full, Regularized };

// Full: sum exp(-t theta_i) over every lattice eigenvalue.
// Regularized: subtract the trace of the same-grid free operator with
// constant potential q_inf (its lattice spectrum is known in closed form),
// so discretization and boundary bias cancel between the two terms.
double trace_numeric(const Tridiag& op, double t, TraceMode mode,
                     double q_inf = 0.0);

}  // namespace warpedheat::oracle
