#ifndef PEMAP_HARMONIC_HPP
#define PEMAP_HARMONIC_HPP

#include <vector>

#include "pemap/types.hpp"

namespace pemap {

// Circle function u(theta) = sum_{k>=2} b_k sin(k theta) with
// b_k = 1 / (k sqrt(log k)). The coefficients satisfy k b_k -> 0, so u is
// continuous, while sum b_k diverges like 2 sqrt(log K): the conjugate series
// blows up at theta = 0. The disc extension is the power series
// H(z) = -i sum b_k z^k with u~ = Re H and v~ = Im H.

double sine_coeff(long long k);  // b_k, k >= 2

double boundary_u(double theta, long long K);

struct PoissonPair {
    double u = 0.0;
    double v = 0.0;
    long long K = 0;       // terms actually summed
    double tail = 0.0;     // geometric bound on the dropped tail
    bool truncated = false;  // K_max hit before the tail bound was met
};

// Harmonic extension and conjugate at z, |z| < 1, truncated adaptively so the
// dropped tail is below tail_tol (unless K_max cuts it short).
PoissonPair poisson_pair(cx z, double tail_tol = 1e-9, long long k_max = 100000000);

struct ConjugatePairConfig {
    double iota = 5e-5;
    double tail_tol = 1e-9;
    long long k_max = 600000000;
};

// h(Z) = iota (z^1, ..., z^M, exp(u~(z^1) + i v~(z^1))), p = M + 1 components.
std::vector<cx> eval_h(const SourceSignature& sig, const BlockedVector& Z,
                       const ConjugatePairConfig& cfg);

double h_norm_sq(const SourceSignature& sig, const BlockedVector& Z,
                 const ConjugatePairConfig& cfg);

struct GrowthRow {
    double r = 0.0;
    double v_tilde = 0.0;
    long long K = 0;
    double tail_bound = 0.0;
};

// Conjugate values along the ray of angle theta0, one row per radius. At
// theta0 = 0 the column is a sum of positive terms and grows without bound; at
// theta0 = pi it converges (alternating series).
std::vector<GrowthRow> conjugate_growth_report(const std::vector<double>& r_grid, double theta0,
                                               double tail_tol = 1e-9);

}  // namespace pemap

#endif
