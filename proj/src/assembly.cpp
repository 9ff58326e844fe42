#include "warpedheat/assembly.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "json.hpp"
#include "warpedheat/diffpoly.hpp"
#include "warpedheat/errors.hpp"
#include "warpedheat/oracle.hpp"
#include "warpedheat/parallel.hpp"
#include "warpedheat/spectral1d.hpp"

namespace warpedheat::assembly {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

void check_warp(const ProductModel& m) {
    if (m.warp.kind != geometry::WarpKind::Cusp)
        throw InvalidParameter("assembly: cusp warp required");
    if (!(m.alpha > 0.0)) throw InvalidParameter("assembly: alpha must be positive");
}

void check_model(const ProductModel& m) {
    check_warp(m);
    if (m.cross.levels.empty())
        throw InvalidParameter("assembly: cross-section has no enumerated levels");
    if (std::abs(m.cross.levels.front().mu) > 1e-12)
        throw InvalidParameter(
            "assembly: first cross-section level must be the zero mode");
    if (m.k_max < 0 || m.k_max >= static_cast<int>(m.cross.levels.size()))
        throw InvalidParameter("assembly: k_max outside the enumerated levels");
}

// Grid sized so the confining wall reaches lam = 40/t + min Q_k before the
// Dirichlet edge, with margin_b extra widths beyond it.
oracle::Grid1D mode_grid(const ProductModel& m, double mu_k, double t,
                         double margin_b, double h_over_b, int n_cap) {
    const double b = m.warp.b, nu = m.warp.nu;
    const double c = 2.0 * nu / m.alpha;
    const double qk0 = (mu_k * b * b - nu) / (b * b);
    const double lam = 40.0 / t + std::max(0.0, qk0);
    double L = b / c * std::log(std::pow(2.0, c) * lam / mu_k) + margin_b * b;
    L = std::clamp(L, 6.0 * b, 60.0 * b);
    double h = std::min(h_over_b * b, 0.35 / std::sqrt(lam));
    int n = static_cast<int>(std::ceil(2.0 * L / h)) + 1;
    if (n % 2 == 0) ++n;
    n = std::clamp(n, 201, n_cap);
    return oracle::Grid1D(L, n);
}

double mode_trace(const ProductModel& m, double mu_k, double t) {
    const double b = m.warp.b, nu = m.warp.nu;
    const double qk0 = (mu_k * b * b - nu) / (b * b);
    if (t * qk0 > 45.0) return 0.0;  // below the e^{-45} floor
    auto grid = mode_grid(m, mu_k, t, 2.0, 0.02, 12001);
    // Flatten the wall once it towers over the active spectral window: states
    // up there weigh e^{-t Q} < e^{-2000}, but uncapped values (~1e6 against
    // the kinetic scale 2/h^2) make the QL eigeniteration fail erratically.
    const double q_cap = 40.0 / (grid.h * grid.h);
    auto op = oracle::discretize(
        [&](double y) {
            return std::min(
                q_cap, spectral1d::potential_Qk(m.warp, m.alpha, mu_k, y));
        },
        grid);
    return oracle::trace_numeric(op, t, oracle::TraceMode::Full);
}

struct ColumnKey {
    std::array<long long, 6> v;
    bool operator<(const ColumnKey& o) const { return v < o.v; }
};

long long keyed(double x) { return std::llround(x * 1e9); }

// Crank-Nicolson column of e^{-t D_k} from a delta at the node nearest yp,
// cached per (mu, t, yp, model) since the x-sum reuses it heavily.
const std::vector<double>& mode_column(const ProductModel& m, double mu,
                                       double t, double yp,
                                       oracle::Grid1D& grid_out) {
    static std::mutex guard;
    static std::map<ColumnKey, std::vector<double>> cache;
    auto grid = mode_grid(m, mu, t, 1.0, 0.002, 16001);
    grid_out = grid;
    ColumnKey key{{keyed(mu), std::llround(t * 1e12), keyed(yp),
                   keyed(m.warp.nu), keyed(m.warp.b), keyed(m.alpha)}};
    {
        std::lock_guard<std::mutex> lock(guard);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    // Wall cap as in mode_trace, but sized against the step budget: the
    // solver wants tau * max Q <= 1/2, so a cap of 2000/t costs ~4000 steps
    // while everything above it carries weight e^{-2000}.
    const double q_cap = 2000.0 / t;
    auto op = oracle::discretize(
        [&](double y) {
            return std::min(
                q_cap, spectral1d::potential_Qk(m.warp, m.alpha, mu, y));
        },
        grid);
    double qmax = 0.0;
    for (double dv : op.diag)
        qmax = std::max(qmax, std::abs(dv - 2.0 / (op.h * op.h)));
    int steps = std::max({10, static_cast<int>(std::ceil(5.5 * std::sqrt(t) / grid.h)),
                          static_cast<int>(std::ceil(2.0 * t * qmax)) + 1});
    int src = std::clamp(
        static_cast<int>(std::lround((yp + grid.L) / grid.h)) - 1, 0,
        grid.n - 3);
    auto u = oracle::crank_nicolson(op, t, steps, src);
    std::lock_guard<std::mutex> lock(guard);
    return cache.emplace(key, std::move(u)).first->second;
}

double column_at(const std::vector<double>& u, const oracle::Grid1D& g,
                 double y) {
    double s = (y + g.L) / g.h - 1.0;  // interior-node coordinate
    int i0 = static_cast<int>(std::floor(s));
    if (i0 < 0 || i0 + 1 >= static_cast<int>(u.size())) return 0.0;
    double w = s - i0;
    return (1.0 - w) * u[i0] + w * u[i0 + 1];
}

// lattice vectors of the torus with eigenvalue <= cap (k = 0 excluded)
void enumerate_modes(const std::vector<double>& radii, double cap,
                     std::vector<int>& k, size_t dim,
                     std::vector<std::vector<int>>& out) {
    if (dim == radii.size()) {
        for (int kj : k)
            if (kj != 0) {
                out.push_back(k);
                return;
            }
        return;
    }
    int bound = static_cast<int>(std::floor(radii[dim] * std::sqrt(cap) + 1e-9));
    for (int kj = -bound; kj <= bound; ++kj) {
        double used = kj * kj / (radii[dim] * radii[dim]);
        if (used > cap + 1e-12) continue;
        k[dim] = kj;
        // remaining budget handled by the same test at deeper levels
        enumerate_modes(radii, cap, k, dim + 1, out);
    }
    k[dim] = 0;
}

}  // namespace

TraceBreakdown heat_trace_M_breakdown(const ProductModel& model, double t) {
    check_model(model);
    if (!(t > 0.0)) throw InvalidParameter("heat_trace_M: t must be positive");
    const auto& lv = model.cross.levels;
    const double shift = model.warp.nu / (model.warp.b * model.warp.b);
    const double full = cross_spectrum::heat_trace_N(model.cross, t);
    double partial = 0.0;
    for (int k = 0; k <= model.k_max; ++k)
        partial += static_cast<double>(lv[k].d) * std::exp(-t * lv[k].mu);
    if (!(std::exp(t * shift) * (full - partial) <= 1e-8)) {
        double pre = 0.0;
        int found = -1;
        for (int k = 0; k < static_cast<int>(lv.size()); ++k) {
            pre += static_cast<double>(lv[k].d) * std::exp(-t * lv[k].mu);
            if (std::exp(t * shift) * (full - pre) <= 1e-8) {
                found = k;
                break;
            }
        }
        throw TruncationInsufficient(
            "heat_trace_M: omitted-mode bound exceeds 1e-8; raise k_max",
            found >= 0 ? static_cast<double>(found)
                       : static_cast<double>(lv.size()));
    }
    TraceBreakdown bd;
    bd.t = t;
    bd.trace_D0 = spectral1d::regularized_trace_D0(
        {model.warp.nu, model.warp.b}, t);
    auto traces = parallel::map_indexed<double>(model.k_max, [&](int i) {
        return mode_trace(model, lv[i + 1].mu, t);
    });
    double total = bd.trace_D0;
    for (int k = 1; k <= model.k_max; ++k) {
        bd.per_mode.push_back({k, lv[k].mu, lv[k].d, traces[k - 1]});
        total += static_cast<double>(lv[k].d) * traces[k - 1];
    }
    bd.trace_total = total;
    return bd;
}

double heat_trace_M_regularized(const ProductModel& model, double t) {
    return heat_trace_M_breakdown(model, t).trace_total;
}

std::string trace_json(const TraceBreakdown& bd) {
    nlohmann::json j;
    j["t"] = bd.t;
    j["trace_total"] = bd.trace_total;
    j["trace_D0"] = bd.trace_D0;
    j["per_mode"] = nlohmann::json::array();
    for (const auto& m : bd.per_mode)
        j["per_mode"].push_back(
            {{"k", m.k}, {"mu_k", m.mu}, {"d_k", m.d}, {"trace", m.trace}});
    return j.dump();
}

ShortTimeLaw trace_asymptotics_S1_S2(const ProductModel& model) {
    check_warp(model);
    if (model.cross.n != 3)
        throw UnsupportedCrossSection(
            "trace_asymptotics_S1_S2: cross-section log-determinant is "
            "available for 3-dimensional products only");
    auto zv = cross_spectrum::zeta0_and_residues(model.cross);
    const double zp = cross_spectrum::zeta_prime0(model.cross);
    const double pref = model.warp.b / std::sqrt(4.0 * std::numbers::pi);
    const double r = model.alpha / model.warp.nu;
    auto law = [&](double z0, double& s1, double& s2) {
        s1 = -pref * r * z0;
        s2 = pref * (r * zp -
                     (r * std::numbers::egamma - 2.0 * std::numbers::ln2) * z0);
    };
    ShortTimeLaw out;
    law(zv.zeta0_closed_form, out.S1, out.S2);
    law(zv.zeta0_continued, out.S1_continued, out.S2_continued);
    return out;
}

std::pair<double, double> heat_coeff_A01_M(const ProductModel& model) {
    check_warp(model);
    const auto& w = model.warp;
    const double al = model.alpha, nu = w.nu, b = w.b;
    const double Y0 = b * std::max(14.0, 30.0 / nu);
    double c00 = GK::integrate(
        [&](double y) { return std::exp(-2.0 * al * w.omega(y)); }, -Y0, Y0,
        12, 1e-11);
    double c12 = GK::integrate(
        [&](double y) {
            double o1 = w.omega1(y);
            return std::exp(-2.0 * al * w.omega(y)) * (al / 3.0) *
                   (2.0 * w.omega2(y) - (2.0 * al + 1.0) * o1 * o1);
        },
        -Y0, Y0, 12, 1e-11);
    double a0 = c00 * model.cross.vol_N;
    double curv = 0.0;
    if (model.cross.kind == cross_spectrum::CrossKind::Sphere) {
        // The cross-section curvature term needs the slower-decaying line
        // integral C10, finite only for alpha > 1; flat cross-sections skip it.
        if (al <= 1.0 + 1e-12)
            throw DivergentCoefficient(
                "heat_coeff_A01_M: the scalar-curvature line integral "
                "converges only for alpha > 1");
        const double decay = 2.0 * nu * (al - 1.0) / al;
        const double Y1 = b * std::clamp(30.0 / decay, 14.0, 2.0e4);
        double c10 = GK::integrate(
                         [&](double y) {
                             return std::exp(-2.0 * (al - 1.0) * w.omega(y));
                         },
                         -Y1, Y1, 15, 1e-11) /
                     6.0;
        const double n = model.cross.n;
        double f_int = model.cross.vol_N * (n - 1.0) * (n - 2.0) /
                       (model.cross.a * model.cross.a);
        curv = c10 * f_int;
    }
    return {a0, c12 * model.cross.vol_N + curv};
}

RemainderFit verify_short_time_identity(double nu, double b,
                                        const std::vector<double>& t_grid,
                                        int k_trunc) {
    if (!(nu > 0.0) || !(b > 0.0))
        throw InvalidParameter(
            "verify_short_time_identity: nu and b must be positive");
    if (k_trunc < 1 || k_trunc > 2)
        throw InvalidParameter("verify_short_time_identity: k_trunc must be 1 or 2");
    if (t_grid.size() < 2)
        throw InvalidParameter(
            "verify_short_time_identity: need at least two times for the fit");
    RemainderFit fit;
    fit.expected_exponent = k_trunc + 0.5;
    spectral1d::PoschlTellerOp op{nu, b};
    std::vector<double> lt, ld;
    for (double t : t_grid) {
        if (!(t > 0.0) || t > 0.5 * b * b * (1.0 + 1e-12))
            throw InvalidParameter(
                "verify_short_time_identity: times must lie in (0, b^2/2]");
        const double tau = t / (b * b);
        const double lhs = std::exp(nu * nu * tau) *
                           spectral1d::regularized_trace_D0(op, t);
        double rhs = 0.0;
        double fact = 1.0;
        for (int k = 1; k <= k_trunc; ++k) {
            fact *= k;
            rhs += std::pow(tau, k - 0.5) / fact *
                   diffpoly::global_Ck_cusp(k, nu, 1.0);
        }
        rhs /= std::sqrt(4.0 * std::numbers::pi);
        fit.tau.push_back(tau);
        fit.lhs.push_back(lhs);
        fit.rhs.push_back(rhs);
        lt.push_back(std::log(tau));
        ld.push_back(std::log(std::max(std::abs(lhs - rhs), 1e-300)));
    }
    const auto n = static_cast<double>(lt.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < lt.size(); ++i) {
        sx += lt[i];
        sy += ld[i];
        sxx += lt[i] * lt[i];
        sxy += lt[i] * ld[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.fitted_exponent = slope;
    fit.fitted_scale = std::exp((sy - slope * sx) / n);
    fit.ok = std::abs(slope - fit.expected_exponent) <= 0.3;
    return fit;
}

double heat_kernel_M_torus(const ProductModel& model, double t, double y,
                           const std::vector<double>& x, double yp,
                           const std::vector<double>& xp) {
    check_model(model);
    if (model.cross.kind != cross_spectrum::CrossKind::Torus)
        throw UnsupportedCrossSection(
            "heat_kernel_M_torus: pointwise product kernels are implemented "
            "for torus cross-sections only");
    if (!(t > 0.0)) throw InvalidParameter("heat_kernel_M_torus: t must be positive");
    const auto& radii = model.cross.radii;
    if (x.size() != radii.size() || xp.size() != radii.size())
        throw InvalidParameter(
            "heat_kernel_M_torus: point dimension must match the torus");
    const double nu = model.warp.nu, b = model.warp.b;
    double acc = spectral1d::heat_kernel_U0({nu, b}, t, y, yp);
    if (model.k_max > 0) {
        const double cap =
            model.cross.levels[std::min<size_t>(model.k_max,
                                                model.cross.levels.size() - 1)]
                .mu +
            1e-9;
        std::vector<std::vector<int>> modes;
        std::vector<int> k(radii.size(), 0);
        enumerate_modes(radii, cap, k, 0, modes);
        for (const auto& kv : modes) {
            double mu = 0.0, phase = 0.0;
            for (size_t j = 0; j < radii.size(); ++j) {
                mu += kv[j] * kv[j] / (radii[j] * radii[j]);
                phase += kv[j] * (x[j] - xp[j]) / radii[j];
            }
            if (mu > cap) continue;
            // Modes whose potential floor alone kills the weight are skipped
            // before paying for a Crank-Nicolson column.
            if (t * (mu * b * b - nu) / (b * b) > 45.0) continue;
            oracle::Grid1D grid(1.0, 3);
            const auto& u = mode_column(model, mu, t, yp, grid);
            acc += std::cos(phase) * column_at(u, grid, y);
        }
    }
    return std::exp(model.alpha * (model.warp.omega(y) + model.warp.omega(yp))) *
           acc / model.cross.vol_N;
}

}  // namespace warpedheat::assembly
