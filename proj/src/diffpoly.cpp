#include "warpedheat/diffpoly.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <deque>
#include <functional>
#include <mutex>
#include <sstream>

#include "warpedheat/errors.hpp"

namespace warpedheat::diffpoly {

namespace {

using BigInt = boost::multiprecision::cpp_int;

void add_term(DiffPoly& p, const Monomial& key, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = p.terms.try_emplace(key, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) p.terms.erase(it);
    }
}

// all monomials of given weight and given factor count, keys descending
void monomials_of(int wt, int factors, int max_part, Monomial& cur,
                  std::vector<Monomial>& out) {
    if (factors == 0) {
        if (wt == 0) out.push_back(cur);
        return;
    }
    for (int part = std::min(max_part, wt - 2 * (factors - 1)); part >= 2; --part) {
        cur.push_back(part - 2);
        monomials_of(wt - part, factors - 1, part, cur, out);
        cur.pop_back();
    }
}

}  // namespace

int weight(const Monomial& m) {
    int w = 2 * static_cast<int>(m.size());
    for (int d : m) w += d;
    return w;
}

DiffPoly dp_const(const Rational& c) {
    DiffPoly p;
    add_term(p, {}, c);
    return p;
}

DiffPoly dp_Q(int m) {
    if (m < 0) throw InvalidParameter("dp_Q: derivative order must be >= 0");
    DiffPoly p;
    add_term(p, {m}, 1);
    return p;
}

DiffPoly operator+(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly r = a;
    for (const auto& [k, c] : b.terms) add_term(r, k, c);
    return r;
}

DiffPoly operator-(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly r = a;
    for (const auto& [k, c] : b.terms) add_term(r, k, -c);
    return r;
}

DiffPoly operator*(const Rational& c, const DiffPoly& p) {
    DiffPoly r;
    if (c == 0) return r;
    for (const auto& [k, v] : p.terms) r.terms.emplace(k, c * v);
    return r;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly r;
    for (const auto& [ka, ca] : a.terms) {
        for (const auto& [kb, cb] : b.terms) {
            Monomial k = ka;
            k.insert(k.end(), kb.begin(), kb.end());
            std::sort(k.begin(), k.end(), std::greater<int>());
            add_term(r, k, ca * cb);
        }
    }
    return r;
}

DiffPoly derivative(const DiffPoly& p) {
    DiffPoly r;
    for (const auto& [k, c] : p.terms) {
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (i > 0 && k[i] == k[i - 1]) continue;  // equal factors batched
            int rep = static_cast<int>(std::count(k.begin(), k.end(), k[i]));
            Monomial d = k;
            d[i] += 1;
            std::sort(d.begin(), d.end(), std::greater<int>());
            add_term(r, d, Rational(rep) * c);
        }
    }
    return r;
}

DiffPoly apply_E(const DiffPoly& p) {
    DiffPoly d1 = derivative(p);
    DiffPoly d3 = derivative(derivative(d1));
    DiffPoly q = dp_Q(0);
    return d3 - Rational(2) * (q * d1) - Rational(2) * derivative(q * p);
}

DiffPoly antiderivative(const DiffPoly& p) {
    // split the right-hand side by (weight, factor count): d/dy preserves the
    // factor count and raises the weight by one, so each block solves alone
    std::map<std::pair<int, int>, DiffPoly> blocks;
    for (const auto& [k, c] : p.terms)
        add_term(blocks[{weight(k), static_cast<int>(k.size())}], k, c);

    DiffPoly result;
    for (auto& [grade, rhs] : blocks) {
        auto [w, j] = grade;
        std::vector<Monomial> basis;
        Monomial scratch;
        if (w >= 1 && j >= 1) monomials_of(w - 1, j, w - 1, scratch, basis);
        if (basis.empty())
            throw NotExactDerivative("antiderivative: block with no candidate monomials");

        // images of the basis span the target space; index the targets
        std::map<Monomial, int> row_of;
        std::vector<DiffPoly> images;
        for (const auto& m : basis) {
            DiffPoly one;
            add_term(one, m, 1);
            images.push_back(derivative(one));
            for (const auto& [k, c] : images.back().terms)
                row_of.try_emplace(k, static_cast<int>(row_of.size()));
        }
        for (const auto& [k, c] : rhs.terms)
            row_of.try_emplace(k, static_cast<int>(row_of.size()));

        int rows = static_cast<int>(row_of.size());
        int cols = static_cast<int>(basis.size());
        std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(cols + 1));
        for (int c = 0; c < cols; ++c)
            for (const auto& [k, v] : images[c].terms) a[row_of[k]][c] = v;
        for (const auto& [k, v] : rhs.terms) a[row_of[k]][cols] = v;

        // exact Gauss elimination; leftover nonzero rhs rows mean p is not
        // a total derivative
        std::vector<int> pivot_col(rows, -1);
        int r = 0;
        for (int c = 0; c < cols && r < rows; ++c) {
            int pr = -1;
            for (int i = r; i < rows; ++i)
                if (a[i][c] != 0) { pr = i; break; }
            if (pr < 0) continue;
            std::swap(a[pr], a[r]);
            Rational inv = a[r][c];
            for (int cc = c; cc <= cols; ++cc) a[r][cc] /= inv;
            for (int i = 0; i < rows; ++i) {
                if (i == r || a[i][c] == 0) continue;
                Rational f = a[i][c];
                for (int cc = c; cc <= cols; ++cc) a[i][cc] -= f * a[r][cc];
            }
            pivot_col[r] = c;
            ++r;
        }
        for (int i = r; i < rows; ++i)
            if (a[i][cols] != 0)
                throw NotExactDerivative("antiderivative: inconsistent linear system");
        for (int i = 0; i < r; ++i)
            if (pivot_col[i] >= 0) add_term(result, basis[pivot_col[i]], a[i][cols]);
    }
    return result;
}

const DiffPoly& heat_coefficient(int k) {
    if (k < 0) throw InvalidParameter("heat_coefficient: k must be >= 0");
    static std::deque<DiffPoly> cache;  // deque: element addresses are stable
    static std::atomic<int> ready{-1};
    static std::mutex build;
    if (k <= ready.load(std::memory_order_acquire)) return cache[k];
    std::lock_guard lock(build);
    if (cache.empty()) {
        cache.push_back(dp_const(1));
        ready.store(0, std::memory_order_release);
    }
    while (static_cast<int>(cache.size()) <= k) {
        int n = static_cast<int>(cache.size());
        Rational f(n, 2 * (2 * n - 1));
        cache.push_back(antiderivative(f * apply_E(cache.back())));
        ready.store(n, std::memory_order_release);
    }
    return cache[k];
}

DiffPoly restructured_coefficient(int k) {
    if (k < 0) throw InvalidParameter("restructured_coefficient: k must be >= 0");
    DiffPoly sum;
    BigInt binom = 1;
    DiffPoly qpow = dp_const(1);
    for (int j = 0; j <= k; ++j) {
        sum = sum + Rational(binom) * (qpow * heat_coefficient(k - j));
        binom = binom * (k - j) / (j + 1);
        qpow = qpow * dp_Q(0);
    }
    return sum;
}

double evaluate(const DiffPoly& p, const std::vector<double>& q_derivs) {
    long double acc = 0;
    for (const auto& [k, c] : p.terms) {
        long double v = c.convert_to<double>();
        for (int m : k) {
            if (m >= static_cast<int>(q_derivs.size()))
                throw InsufficientDerivatives(
                    "evaluate: monomial needs derivative order " + std::to_string(m));
            v *= q_derivs[m];
        }
        acc += v;
    }
    return static_cast<double>(acc);
}

std::vector<double> cusp_u_derivatives(double nu, double b, double y, int m_max) {
    if (!(nu > 0.0) || !(b > 0.0))
        throw InvalidParameter("cusp_u_derivatives: nu, b must be positive");
    // d^m/dx^m sech^2 x = sech^2 x * P_m(tanh x) with
    // P_{m+1} = -2 tau P_m + (1 - tau^2) P_m'
    std::vector<std::vector<BigInt>> poly{{1}};
    for (int m = 0; m < m_max; ++m) {
        const auto& pm = poly.back();
        std::vector<BigInt> nx(pm.size() + 1);
        for (std::size_t i = 0; i < pm.size(); ++i) {
            nx[i + 1] -= 2 * pm[i];
            if (i >= 1) {
                nx[i - 1] += BigInt(i) * pm[i];
                nx[i + 1] -= BigInt(i) * pm[i];
            }
        }
        while (!nx.empty() && nx.back() == 0) nx.pop_back();
        poly.push_back(std::move(nx));
    }
    double x = y / b;
    double tau = std::tanh(x);
    double e = std::exp(-std::abs(x));
    double sech = 2.0 * e / (1.0 + e * e);
    double front = -nu * (nu + 1.0) / (b * b) * sech * sech;
    std::vector<double> out(m_max + 1);
    for (int m = 0; m <= m_max; ++m) {
        long double horner = 0;
        for (auto it = poly[m].rbegin(); it != poly[m].rend(); ++it)
            horner = horner * tau + it->convert_to<double>();
        out[m] = front * static_cast<double>(horner);
        front /= b;
    }
    return out;
}

double global_Ck_cusp(int k, double nu, double b) {
    if (k < 1) throw InvalidParameter("global_Ck_cusp: k must be >= 1");
    const DiffPoly& ck = heat_coefficient(k);
    int m_max = 0;
    for (const auto& [key, c] : ck.terms)
        for (int m : key) m_max = std::max(m_max, m);
    auto f = [&](double y) {
        return evaluate(ck, cusp_u_derivatives(nu, b, y, m_max));
    };
    double err = 0;
    double total = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, -45.0 * b, 45.0 * b, 15, 1e-11, &err);
    if (err > 1e-10 * std::max(std::abs(total), 1e-30))
        throw NoConvergence("global_Ck_cusp: quadrature error above budget");
    return total;
}

std::string to_string(const DiffPoly& p) {
    if (p.terms.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [key, c] : p.terms) {
        if (!first) out << ' ';
        first = false;
        Rational mag = (c < 0) ? Rational(-c) : c;
        out << (c < 0 ? '-' : '+') << mag.str();
        // factors ascending: Q before Q' before Q'' ...
        for (auto it = key.rbegin(); it != key.rend();) {
            int m = *it;
            int rep = 0;
            while (it != key.rend() && *it == m) { ++rep; ++it; }
            out << ' ' << 'Q';
            if (m >= 1 && m <= 3)
                for (int i = 0; i < m; ++i) out << '\'';
            else if (m >= 4)
                out << "^(" << m << ')';
            if (rep > 1) out << '^' << rep;
        }
    }
    return out.str();
}

}  // namespace warpedheat::diffpoly
