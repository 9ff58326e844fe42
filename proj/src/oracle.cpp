#include "warpedheat/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "warpedheat/errors.hpp"

namespace warpedheat::oracle {

namespace {

// eigenvalues of A strictly below x, by the Sturm / LDL^T pivot count
int sturm_count(const Tridiag& op, double x) {
    int count = 0;
    double d = 1.0;
    for (int i = 0; i < op.size(); ++i) {
        double b2 = (i > 0) ? op.off[i - 1] * op.off[i - 1] : 0.0;
        d = (op.diag[i] - x) - b2 / d;
        if (d == 0.0) d = -1e-300;
        if (d < 0.0) ++count;
    }
    return count;
}

// k-th (0-based) eigenvalue by bisection between Gershgorin bounds
double bisect_eigenvalue(const Tridiag& op, int k, double lo, double hi) {
    for (int iter = 0; iter < 300; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (sturm_count(op, mid) > k)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-13 * std::max(1.0, std::abs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

// Thomas solve of (A - shift I) v = r; overwrites r with the solution
void shifted_solve(const Tridiag& op, double shift, std::vector<double>& r) {
    int m = op.size();
    std::vector<double> c(m), dd(m);
    dd[0] = op.diag[0] - shift;
    if (dd[0] == 0.0) dd[0] = 1e-300;
    for (int i = 1; i < m; ++i) {
        c[i - 1] = op.off[i - 1] / dd[i - 1];
        dd[i] = (op.diag[i] - shift) - c[i - 1] * op.off[i - 1];
        if (dd[i] == 0.0) dd[i] = 1e-300;
    }
    for (int i = 1; i < m; ++i) r[i] -= c[i - 1] * r[i - 1];
    r[m - 1] /= dd[m - 1];
    for (int i = m - 2; i >= 0; --i) r[i] = (r[i] - op.off[i] * r[i + 1]) / dd[i];
}

double norm_h(const std::vector<double>& v, double h) {
    long double s = 0;
    for (double x : v) s += (long double)x * x;
    return std::sqrt((double)s * h);
}

}  // namespace

Grid1D::Grid1D(double L_, int n_) : L(L_), n(n_) {
    if (!(L > 0.0) || n < 3 || n % 2 == 0)
        throw InvalidParameter("Grid1D: need L > 0 and odd n >= 3");
    h = 2.0 * L / (n - 1);
}

Tridiag discretize(const std::function<double(double)>& Q, const Grid1D& grid) {
    int m = grid.n - 2;
    Tridiag op;
    op.h = grid.h;
    op.diag.resize(m);
    op.off.assign(m - 1, -1.0 / (grid.h * grid.h));
    for (int i = 0; i < m; ++i) {
        double q = Q(grid.node(i + 1));
        if (!std::isfinite(q)) throw InvalidParameter("discretize: Q not finite");
        op.diag[i] = 2.0 / (grid.h * grid.h) + q;
    }
    return op;
}

std::vector<EigenPair> eigen_lowest(const Tridiag& op, int count) {
    int m = op.size();
    if (count < 0 || count > m)
        throw InvalidParameter("eigen_lowest: count out of range");
    double lo = op.diag[0], hi = op.diag[0];
    for (int i = 0; i < m; ++i) {
        double r = (i > 0 ? std::abs(op.off[i - 1]) : 0.0) +
                   (i + 1 < m ? std::abs(op.off[i]) : 0.0);
        lo = std::min(lo, op.diag[i] - r);
        hi = std::max(hi, op.diag[i] + r);
    }
    double scale = std::max(std::abs(lo), std::abs(hi));

    std::vector<EigenPair> out;
    for (int k = 0; k < count; ++k) {
        double lambda = bisect_eigenvalue(op, k, lo, hi);
        // inverse iteration at a slightly detuned shift
        std::vector<double> v(m);
        for (int i = 0; i < m; ++i)
            v[i] = std::sin((k + 1) * M_PI * (i + 1) / (m + 1.0)) + 1e-3;
        double shift = lambda + 1e-10 * std::max(1.0, std::abs(lambda));
        bool ok = false;
        for (int iter = 0; iter < 8; ++iter) {
            shifted_solve(op, shift, v);
            double nrm = norm_h(v, op.h);
            for (double& x : v) x /= nrm;
            // residual ||A v - lambda v||_h against the operator scale
            long double res = 0;
            for (int i = 0; i < m; ++i) {
                double av = op.diag[i] * v[i];
                if (i > 0) av += op.off[i - 1] * v[i - 1];
                if (i + 1 < m) av += op.off[i] * v[i + 1];
                res += (long double)(av - lambda * v[i]) * (av - lambda * v[i]);
            }
            if (std::sqrt((double)res * op.h) <= 1e-10 * std::max(1.0, scale)) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ConvergenceFailure("eigen_lowest: inverse iteration stalled");
        // refine the eigenvalue with the Rayleigh quotient and fix the sign
        long double num = 0;
        for (int i = 0; i < m; ++i) {
            double av = op.diag[i] * v[i];
            if (i > 0) av += op.off[i - 1] * v[i - 1];
            if (i + 1 < m) av += op.off[i] * v[i + 1];
            num += (long double)av * v[i];
        }
        lambda = (double)num * op.h;
        int imax = 0;
        for (int i = 1; i < m; ++i)
            if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
        if (v[imax] < 0)
            for (double& x : v) x = -x;
        out.push_back({lambda, std::move(v)});
    }
    std::sort(out.begin(), out.end(),
              [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
    return out;
}

std::vector<double> crank_nicolson(const Tridiag& op, double t, int steps,
                                   int source_index) {
    int m = op.size();
    if (!(t > 0.0)) throw InvalidParameter("crank_nicolson: t must be positive");
    if (source_index < 0 || source_index >= m)
        throw InvalidParameter("crank_nicolson: source off the grid");
    if (steps < 10) throw StepBudget("crank_nicolson: need at least 10 steps");
    double tau = t / steps;
    double qmax = 0.0;
    for (int i = 0; i < m; ++i)
        qmax = std::max(qmax, std::abs(op.diag[i] - 2.0 / (op.h * op.h)));
    if (tau * qmax > 0.5)
        throw StepBudget("crank_nicolson: tau * max|Q| exceeds 0.5");

    std::vector<double> u(m, 0.0);
    u[source_index] = 1.0 / op.h;
    // (I + tau/2 A) factors once; right side applies (I - tau/2 A)
    Tridiag plus;
    plus.h = op.h;
    plus.diag.resize(m);
    plus.off.resize(m - 1);
    for (int i = 0; i < m; ++i) plus.diag[i] = 1.0 + 0.5 * tau * op.diag[i];
    for (int i = 0; i + 1 < m; ++i) plus.off[i] = 0.5 * tau * op.off[i];

    std::vector<double> rhs(m);
    for (int s = 0; s < steps; ++s) {
        for (int i = 0; i < m; ++i) {
            double av = op.diag[i] * u[i];
            if (i > 0) av += op.off[i - 1] * u[i - 1];
            if (i + 1 < m) av += op.off[i] * u[i + 1];
            rhs[i] = u[i] - 0.5 * tau * av;
        }
        shifted_solve(plus, 0.0, rhs);
        std::swap(u, rhs);
    }
    return u;
}

double trace_numeric(const Tridiag& op, double t, TraceMode mode, double q_inf) {
    if (!(t > 0.0)) throw InvalidParameter("trace_numeric: t must be positive");
    int m = op.size();
    Eigen::Map<const Eigen::VectorXd> diag(op.diag.data(), m);
    Eigen::Map<const Eigen::VectorXd> off(op.off.data(), m - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("trace_numeric: tridiagonal QL failed");
    long double total = 0;
    const auto& ev = solver.eigenvalues();
    for (int i = m - 1; i >= 0; --i) total += std::exp(-(long double)t * ev[i]);
    if (mode == TraceMode::Regularized) {
        // same-grid free operator: theta_j = q_inf + (4/h^2) sin^2(j pi / (2(m+1)))
        for (int j = m; j >= 1; --j) {
            double s = std::sin(j * M_PI / (2.0 * (m + 1)));
            total -= std::exp(-(long double)t *
                              (q_inf + 4.0 / (op.h * op.h) * s * s));
        }
    }
    return static_cast<double>(total);
}

}  // namespace warpedheat::oracle
