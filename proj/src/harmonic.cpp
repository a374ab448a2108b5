#include "pemap/harmonic.hpp"

#include <algorithm>
#include <cmath>

namespace pemap {

double sine_coeff(long long k) {
    if (k < 2) throw std::invalid_argument("sine_coeff: k must be >= 2");
    const double kd = static_cast<double>(k);
    return 1.0 / (kd * std::sqrt(std::log(kd)));
}

double boundary_u(double theta, long long K) {
    if (K < 2) throw std::invalid_argument("boundary_u: K must be >= 2");
    double s = 0.0, comp = 0.0;
    for (long long k = 2; k <= K; ++k) {
        const double term = sine_coeff(k) * std::sin(static_cast<double>(k) * theta);
        const double y = term - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s;
}

namespace {

// b_k r^k decreases in k, so the dropped tail past K is below
// b_{K+1} r^{K+1} / (1 - r); for an alternating column the partial sums
// bracket the limit and the plain first-term bound applies.
double tail_bound_at(long long K, double r, bool alternating = false) {
    if (r >= 1.0) return 1e300;
    const double kd = static_cast<double>(K + 1);
    const double b = 1.0 / (kd * std::sqrt(std::log(kd)));
    const double head = b * std::exp(kd * std::log(r));
    return alternating ? head : head / (1.0 - r);
}

long long pick_truncation(double r, double tol, long long k_max, double* bound, bool* truncated,
                          bool alternating = false) {
    long long K = 64;
    while (K < k_max && tail_bound_at(K, r, alternating) >= tol) K *= 2;
    if (K >= k_max && tail_bound_at(k_max, r, alternating) >= tol) {
        *bound = tail_bound_at(k_max, r, alternating);
        *truncated = true;
        return k_max;
    }
    // Minimal K in (K/2, K] meeting the bound.
    long long lo = std::max<long long>(2, K / 2), hi = std::min(K, k_max);
    while (lo + 1 < hi) {
        const long long mid = lo + (hi - lo) / 2;
        if (tail_bound_at(mid, r, alternating) < tol)
            hi = mid;
        else
            lo = mid;
    }
    *bound = tail_bound_at(hi, r, alternating);
    *truncated = false;
    return hi;
}

}  // namespace

PoissonPair poisson_pair(cx z, double tail_tol, long long k_max) {
    const double r = std::abs(z);
    if (r >= 1.0) throw std::domain_error("poisson_pair: |z| must be < 1");
    PoissonPair out;
    if (r == 0.0) {
        out.K = 2;
        return out;
    }
    out.K = pick_truncation(r, tail_tol, k_max, &out.tail, &out.truncated);
    // H(z) = -i sum b_k z^k; u~ = Re H, v~ = Im H.
    if (z.imag() == 0.0) {
        // On the real axis the series is real: u~ = 0 and v~ = -sum b_k x^k.
        double s = 0.0, comp = 0.0;
        double zp = z.real();
        for (long long k = 2; k <= out.K; ++k) {
            zp *= z.real();
            const double term = sine_coeff(k) * zp;
            const double y = term - comp;
            const double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        out.u = 0.0;
        out.v = -s;
        return out;
    }
    cx sum{0.0, 0.0};
    cx zp = z;  // z^1
    for (long long k = 2; k <= out.K; ++k) {
        zp *= z;
        sum += sine_coeff(k) * zp;
    }
    const cx h = cx(0.0, -1.0) * sum;
    out.u = h.real();
    out.v = h.imag();
    return out;
}

std::vector<cx> eval_h(const SourceSignature& sig, const BlockedVector& Z,
                       const ConjugatePairConfig& cfg) {
    sig.check_dim(Z);
    const cx z1 = Z[0];
    if (std::abs(z1) >= 1.0) throw std::domain_error("eval_h: |z^1| must be < 1");
    const PoissonPair pp = poisson_pair(z1, cfg.tail_tol, cfg.k_max);
    std::vector<cx> h;
    h.reserve(Z.size() + 1);
    for (const cx& z : Z) h.push_back(cfg.iota * z);
    h.push_back(cfg.iota * std::exp(cx(pp.u, pp.v)));
    return h;
}

double h_norm_sq(const SourceSignature& sig, const BlockedVector& Z,
                 const ConjugatePairConfig& cfg) {
    const std::vector<cx> h = eval_h(sig, Z, cfg);
    return norm_sq(h);
}

std::vector<GrowthRow> conjugate_growth_report(const std::vector<double>& r_grid, double theta0,
                                               double tail_tol) {
    for (std::size_t i = 1; i < r_grid.size(); ++i)
        if (r_grid[i] <= r_grid[i - 1])
            throw std::invalid_argument("conjugate_growth_report: radii must increase");
    std::vector<GrowthRow> rows;
    const double c0 = std::cos(theta0);
    for (double r : r_grid) {
        if (r <= 0.0 || r >= 1.0)
            throw std::invalid_argument("conjugate_growth_report: radii must lie in (0,1)");
        GrowthRow row;
        row.r = r;
        bool truncated = false;
        row.K = pick_truncation(r, tail_tol, 8000000000ll, &row.tail_bound, &truncated,
                                /*alternating=*/c0 == -1.0);
        double s = 0.0, comp = 0.0;
        double rp = r;  // r^1
        if (c0 == 1.0 || c0 == -1.0) {
            // v~ = -sum b_k r^k (+-1)^k without trig calls.
            double sign = 1.0;  // (+-1)^2
            for (long long k = 2; k <= row.K; ++k) {
                rp *= r;
                const double kd = static_cast<double>(k);
                const double term = sign * rp / (kd * std::sqrt(std::log(kd)));
                const double y = term - comp;
                const double t = s + y;
                comp = (t - s) - y;
                s = t;
                if (c0 < 0.0) sign = -sign;
            }
        } else {
            for (long long k = 2; k <= row.K; ++k) {
                rp *= r;
                const double term =
                    sine_coeff(k) * rp * std::cos(static_cast<double>(k) * theta0);
                const double y = term - comp;
                const double t = s + y;
                comp = (t - s) - y;
                s = t;
            }
        }
        row.v_tilde = -s;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace pemap
