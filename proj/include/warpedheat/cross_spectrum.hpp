#pragma once

#include <map>
#include <string>
#include <vector>

namespace warpedheat::cross_spectrum {

enum class CrossKind { Sphere, Torus };

struct Level {
    double mu;     // eigenvalue of -Laplacian on N
    long long d;   // multiplicity
};

// Spectrum of the cross-section N: the round sphere S^{n-1} of radius a, or
// a flat torus with the given radii (dimension = radii count).
struct CrossSpectrum {
    CrossKind kind = CrossKind::Sphere;
    int n = 0;                   // dimension of the warped product, dim N = n-1
    double a = 0.0;              // sphere radius (Sphere only)
    std::vector<double> radii;   // torus radii (Torus only)
    std::vector<Level> levels;   // sorted strictly increasing in mu
    double cutoff = 0.0;         // largest eigenvalue enumerated
    double alpha = 0.0;          // (n-1)/2
    double vol_N = 0.0;
};

struct ZetaValues {
    std::map<double, double> zeta_at;  // sampled values (continuation nodes)
    double zeta0 = 0.0;                // alias of zeta0_closed_form
    // closed form: (4pi)^{-alpha} A_alpha / Gamma(alpha+1) for odd n, 0 for
    // even n; no kernel-mode subtraction
    double zeta0_closed_form = 0.0;
    // numeric Mellin continuation of the kernel-removed trace; differs from
    // the closed form by -dim ker = -1
    double zeta0_continued = 0.0;
    std::vector<double> A_coeffs;      // {A_0, A_1}
};

// levels k = 0..k_max of S^{n-1} radius a: mu = k(k+n-2)/a^2 with the
// standard harmonic multiplicities
CrossSpectrum sphere_spectrum(int n, double a, int k_max);

// all lattice modes with sum k_j^2/a_j^2 <= norm_cutoff, grouped by equal
// eigenvalue; throws CutoffTooLarge past the enumeration budget
CrossSpectrum torus_spectrum(const std::vector<double>& radii, double norm_cutoff);

// sum d_k e^{-t mu_k} with a certified Weyl-density tail bound; throws
// TruncationInsufficient (payload: needed cutoff) if the bound exceeds 1e-12
double heat_trace_N(const CrossSpectrum& spec, double t);

// Dirichlet series over positive modes plus integral tail correction,
// relative error <= 1e-8; requires s > alpha + 0.5
double zeta_N(const CrossSpectrum& spec, double s);

// A_0, A_1 and both zeta(0) conventions (closed form vs continued)
ZetaValues zeta0_and_residues(const CrossSpectrum& spec);

// derivative of the spectral zeta at 0 (log-determinant) for n = 3
// cross-sections, by the log-weighted integral of d^2/dt^2 [t * trace]
double zeta_prime0(const CrossSpectrum& spec);

// CSV with header "k,eigenvalue,multiplicity"
std::string spectrum_csv(const CrossSpectrum& spec);

}  // namespace warpedheat::cross_spectrum
