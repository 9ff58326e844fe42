#include "warpedheat/cross_spectrum.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "warpedheat/errors.hpp"

namespace warpedheat::cross_spectrum {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
using BigInt = boost::multiprecision::cpp_int;

constexpr long long kVectorBudget = 5'000'000;

long long sphere_multiplicity(int n, int k) {
    if (k == 0) return 1;
    BigInt num = 2 * k + n - 2;
    for (int i = 2; i <= k + n - 3; ++i) num *= i;
    BigInt den = 1;
    for (int i = 2; i <= n - 2; ++i) den *= i;
    for (int i = 2; i <= k; ++i) den *= i;
    return (num / den).convert_to<long long>();
}

// group a sorted eigenvalue list into (mu, multiplicity) levels
std::vector<Level> group_levels(std::vector<double>& mus) {
    std::sort(mus.begin(), mus.end());
    std::vector<Level> out;
    for (double m : mus) {
        if (!out.empty() && m - out.back().mu <= 1e-12 * std::max(1.0, m))
            out.back().d += 1;
        else
            out.push_back({m, 1});
    }
    return out;
}

// Weyl eigenvalue density prefactor: counting ~ c_w mu^alpha / alpha
double weyl_density_coeff(const CrossSpectrum& s) {
    return s.vol_N / (std::pow(4.0 * M_PI, s.alpha) * std::tgamma(s.alpha));
}

// sum f(mu, d) over levels with t*mu <= 45, smallest terms first
template <class F>
long double sum_levels(const std::vector<Level>& ls, double t, F f) {
    auto end = std::upper_bound(ls.begin(), ls.end(), 45.0 / t,
                                [](double v, const Level& l) { return v < l.mu; });
    long double acc = 0;
    for (auto it = std::make_reverse_iterator(end); it != ls.rend(); ++it)
        acc += f(it->mu, it->d);
    return acc;
}

// closed-form levels regenerated to the requested eigenvalue reach,
// independent of the cutoff the caller built the spectrum with
std::vector<Level> dense_levels(const CrossSpectrum& spec, double mu_max) {
    if (spec.kind == CrossKind::Sphere) {
        std::vector<Level> out;
        for (int k = 0;; ++k) {
            double mu = k * (k + spec.n - 2) / (spec.a * spec.a);
            if (mu > mu_max) break;
            out.push_back({mu, sphere_multiplicity(spec.n, k)});
        }
        return out;
    }
    return torus_spectrum(spec.radii, mu_max).levels;
}

double smallest_positive_mu(const std::vector<Level>& ls) {
    for (const auto& l : ls)
        if (l.mu > 0) return l.mu;
    throw InvalidParameter("spectrum has no positive eigenvalue");
}

// dim ker and the closed-form A_0, A_1
struct TraceModel {
    double q, a0, a1;
};

TraceModel trace_model(const CrossSpectrum& spec) {
    TraceModel m;
    m.q = 1.0;
    m.a0 = spec.vol_N;
    if (spec.kind == CrossKind::Sphere) {
        double scalar = (spec.n - 1.0) * (spec.n - 2.0) / (spec.a * spec.a);
        m.a1 = scalar / 6.0 * spec.vol_N;
    } else {
        m.a1 = 0.0;
    }
    return m;
}

// polynomial extrapolation to x = 0 through the given nodes
double neville_at_zero(const std::vector<double>& x, std::vector<double> y) {
    for (std::size_t lvl = 1; lvl < x.size(); ++lvl)
        for (std::size_t i = 0; i + lvl < x.size(); ++i)
            y[i] = (x[i + lvl] * y[i] - x[i] * y[i + 1]) / (x[i + lvl] - x[i]);
    return y[0];
}

}  // namespace

CrossSpectrum sphere_spectrum(int n, double a, int k_max) {
    if (n < 2 || !(a > 0.0) || k_max < 0)
        throw InvalidParameter("sphere_spectrum: need n >= 2, a > 0, k_max >= 0");
    CrossSpectrum s;
    s.kind = CrossKind::Sphere;
    s.n = n;
    s.a = a;
    s.alpha = (n - 1.0) / 2.0;
    s.vol_N = std::pow(a, 2.0 * s.alpha) * 2.0 *
              std::pow(M_PI, (2.0 * s.alpha + 1.0) / 2.0) /
              std::tgamma(s.alpha + 0.5);
    for (int k = 0; k <= k_max; ++k)
        s.levels.push_back({k * (k + n - 2.0) / (a * a), sphere_multiplicity(n, k)});
    s.cutoff = s.levels.back().mu;
    return s;
}

CrossSpectrum torus_spectrum(const std::vector<double>& radii, double norm_cutoff) {
    if (radii.empty() || !(norm_cutoff > 0.0))
        throw InvalidParameter("torus_spectrum: need radii and a positive cutoff");
    for (double a : radii)
        if (!(a > 0.0)) throw InvalidParameter("torus_spectrum: radii must be positive");

    long long count = 1;
    std::vector<int> bound(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) {
        bound[j] = static_cast<int>(std::floor(radii[j] * std::sqrt(norm_cutoff)));
        count *= 2LL * bound[j] + 1;
        if (count > kVectorBudget)
            throw CutoffTooLarge("torus_spectrum: lattice enumeration budget exceeded");
    }

    std::vector<double> mus;
    std::vector<int> k(radii.size(), 0);
    // odometer over the box, keeping vectors inside the ellipsoid
    for (std::size_t j = 0; j < radii.size(); ++j) k[j] = -bound[j];
    for (;;) {
        double mu = 0;
        for (std::size_t j = 0; j < radii.size(); ++j)
            mu += static_cast<double>(k[j]) * k[j] / (radii[j] * radii[j]);
        if (mu <= norm_cutoff) mus.push_back(mu);
        std::size_t j = 0;
        while (j < radii.size() && k[j] == bound[j]) {
            k[j] = -bound[j];
            ++j;
        }
        if (j == radii.size()) break;
        ++k[j];
    }

    CrossSpectrum s;
    s.kind = CrossKind::Torus;
    s.n = static_cast<int>(radii.size()) + 1;
    s.radii = radii;
    s.alpha = (s.n - 1.0) / 2.0;
    s.vol_N = 1.0;
    for (double a : radii) s.vol_N *= 2.0 * M_PI * a;
    s.levels = group_levels(mus);
    s.cutoff = norm_cutoff;
    return s;
}

double heat_trace_N(const CrossSpectrum& spec, double t) {
    if (!(t > 0.0)) throw InvalidParameter("heat_trace_N: t must be positive");
    long double partial = 0;
    for (auto it = spec.levels.rbegin(); it != spec.levels.rend(); ++it)
        partial += it->d * std::exp(-(long double)t * it->mu);
    double cw = weyl_density_coeff(spec);
    double tail = 3.0 * cw * std::pow(t, -spec.alpha) *
                      boost::math::tgamma(spec.alpha, t * spec.cutoff) +
                  spec.levels.back().d * std::exp(-t * spec.cutoff);
    double threshold = 1e-12 * std::max(1.0, static_cast<double>(partial));
    if (tail > threshold) {
        double needed = spec.cutoff + std::log(tail / threshold) / t;
        throw TruncationInsufficient("heat_trace_N: certified tail bound above 1e-12",
                                     needed);
    }
    return static_cast<double>(partial);
}

double zeta_N(const CrossSpectrum& spec, double s) {
    if (!(s > spec.alpha + 0.5))
        throw OutsideConvergence("zeta_N: need s > alpha + 1/2");
    long double partial = 0;
    for (auto it = spec.levels.rbegin(); it != spec.levels.rend(); ++it)
        if (it->mu > 0) partial += it->d * std::pow((long double)it->mu, -(long double)s);
    double cw = weyl_density_coeff(spec);
    double tail = cw * std::pow(spec.cutoff, spec.alpha - s) / (s - spec.alpha);
    double result = static_cast<double>(partial) + tail;
    double err = spec.levels.back().d * std::pow(spec.cutoff, -s);
    if (err > 1e-8 * std::abs(result)) {
        double needed = spec.cutoff * std::pow(err / (1e-8 * std::abs(result)), 1.0 / s);
        throw TruncationInsufficient("zeta_N: cutoff too small for 1e-8 relative error",
                                     needed);
    }
    return result;
}

ZetaValues zeta0_and_residues(const CrossSpectrum& spec) {
    ZetaValues out;
    TraceModel model = trace_model(spec);
    out.A_coeffs = {model.a0, model.a1};

    bool odd_n = (spec.n % 2 == 1);
    if (!odd_n) {
        out.zeta0_closed_form = 0.0;
    } else if (spec.kind == CrossKind::Torus) {
        // flat: every trace coefficient past the volume term vanishes
        out.zeta0_closed_form = 0.0;
    } else if (spec.n == 3) {
        out.zeta0_closed_form = model.a1 / (4.0 * M_PI);
    } else {
        throw UnsupportedCrossSection(
            "zeta0_and_residues: odd dimensions above 3 need higher trace coefficients");
    }
    out.zeta0 = out.zeta0_closed_form;

    // numeric continuation: Z(s) = Gamma(s-alpha+1)^{-1} Int t^{s-alpha} g(t) dt
    // with g = -d/dt [t^alpha * kernel-removed trace], then extrapolate
    // zeta(s) = Gamma(s-alpha)/Gamma(s) Z(s) to s = 0
    const double delta = 1e-3;
    const double alpha = spec.alpha;
    auto levels = dense_levels(spec, 90.0 / delta);
    // the transform acts on the kernel-removed trace; zero modes enter
    // only through the exact q alpha t^(alpha-1) term below
    while (!levels.empty() && levels.front().mu <= 0.0)
        levels.erase(levels.begin());
    auto g = [&](double t) {
        return static_cast<double>(
            sum_levels(levels, t, [&](double mu, long long d) {
                return d * std::exp(-(long double)t * mu) *
                       std::pow((long double)t, alpha - 1.0) * (mu * t - alpha);
            }));
    };
    double qa = model.q * alpha;
    double g0, g1;
    {
        double r1 = g(delta) - qa * std::pow(delta, alpha - 1.0);
        double r2 = g(delta / 2) - qa * std::pow(delta / 2, alpha - 1.0);
        g1 = (r1 - r2) / (delta / 2);
        g0 = r2 - g1 * delta / 2;
    }
    double T = 40.0 / smallest_positive_mu(levels);
    std::vector<double> nodes = {0.2, 0.1, 0.05, 0.025};
    std::vector<double> vals;
    for (double s : nodes) {
        auto integrand = [&](double t) { return std::pow(t, s - alpha) * g(t); };
        double body = GK::integrate(integrand, delta, std::min(1.0, T), 15, 1e-11);
        if (T > 1.0) body += GK::integrate(integrand, 1.0, T, 15, 1e-11);
        double head = qa * std::pow(delta, s) / s +
                      g0 * std::pow(delta, s - alpha + 1.0) / (s - alpha + 1.0) +
                      g1 * std::pow(delta, s - alpha + 2.0) / (s - alpha + 2.0);
        double z = (head + body) / std::tgamma(s - alpha + 1.0);
        double zeta = std::tgamma(s - alpha) / std::tgamma(s) * z;
        out.zeta_at[s] = zeta;
        // extrapolate with the simple pole at s = alpha removed; its
        // residue is the leading Weyl coefficient
        vals.push_back(zeta - weyl_density_coeff(spec) / (s - alpha));
    }
    out.zeta0_continued =
        neville_at_zero(nodes, vals) - weyl_density_coeff(spec) / alpha;
    return out;
}

double zeta_prime0(const CrossSpectrum& spec) {
    if (spec.n != 3)
        throw UnsupportedCrossSection("zeta_prime0: implemented for n = 3 only");
    const double delta = 1e-3;
    auto levels = dense_levels(spec, 90.0 / delta);
    // D(t) = d^2/dt^2 [t * trace]; zero modes drop out identically
    auto D = [&](double t) {
        return static_cast<double>(sum_levels(levels, t, [&](double mu, long long d) {
            return d * std::exp(-(long double)t * mu) * mu * (t * mu - 2.0);
        }));
    };
    // zeta(s) = [(s-1) Gamma(s+1)]^{-1} Int t^s D dt by two integrations by
    // parts, so zeta'(0) = -Int (log t + 1 + gamma) D dt
    double c = 1.0 + std::numbers::egamma;
    double h1 = (D(delta) - D(delta / 2)) / (delta / 2);
    double h0 = D(delta / 2) - h1 * delta / 2;
    double head = h0 * (delta * (std::log(delta) - 1.0) + c * delta) +
                  h1 * (delta * delta / 2.0 * std::log(delta) - delta * delta / 4.0 +
                        c * delta * delta / 2.0);
    double T = 40.0 / smallest_positive_mu(levels);
    auto f = [&](double t) { return (std::log(t) + c) * D(t); };
    double body = GK::integrate(f, delta, std::min(1.0, T), 15, 1e-11);
    if (T > 1.0) body += GK::integrate(f, 1.0, T, 15, 1e-11);
    return -(head + body);
}

std::string spectrum_csv(const CrossSpectrum& spec) {
    std::string out = "k,eigenvalue,multiplicity\n";
    char buf[80];
    for (std::size_t i = 0; i < spec.levels.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%lld\n", i, spec.levels[i].mu,
                      spec.levels[i].d);
        out += buf;
    }
    return out;
}

}  // namespace warpedheat::cross_spectrum
