#ifndef PEMAP_TYPES_HPP
#define PEMAP_TYPES_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pemap {

using cx = std::complex<double>;

// Raised when a run configuration is structurally unusable.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when an empirical calibration contradicts the estimate it feeds.
class calibration_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a root search or audit cannot meet its numeric contract.
// `profile` carries the residual data that was seen before giving up.
class numerical_error : public std::runtime_error {
public:
    numerical_error(const std::string& what, std::string profile = {})
        : std::runtime_error(what), profile(std::move(profile)) {}
    std::string profile;
};

struct Tolerances {
    double boundary = 1e-10;  // membership tolerance for "on the boundary"
    double root = 1e-12;      // scalar root finding
};

// Integer power with exact association order.
inline double ipow(double x, int n) {
    if (n < 0) return 1.0 / ipow(x, -n);
    double r = 1.0;
    double b = x;
    while (n > 0) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

// Hermitian inner product, first argument linear: <a,b> = sum a_i conj(b_i).
inline cx hdot(const std::vector<cx>& a, const std::vector<cx>& b) {
    cx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
    return s;
}

inline double norm_sq(const std::vector<cx>& a) {
    double s = 0.0;
    for (const cx& z : a) s += std::norm(z);
    return s;
}

inline double dist(const std::vector<cx>& a, const std::vector<cx>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}

// A point of the source space carries no block structure of its own; the
// signature supplies offsets whenever blocks are needed.
using BlockedVector = std::vector<cx>;

// Source pseudoellipsoid  { sum_k ||z_(k)||^(2 alpha_k) + ||z_(s+1)||^2 < 1 }
// with block dimensions m_1..m_{s+1} and exponents alpha_1..alpha_s.
struct SourceSignature {
    std::vector<int> m;
    std::vector<int> alpha;
    std::vector<int> M;  // partial sums, M[0] = 0

    SourceSignature() = default;
    SourceSignature(std::vector<int> m_, std::vector<int> alpha_)
        : m(std::move(m_)), alpha(std::move(alpha_)) {
        if (m.empty() || alpha.size() + 1 != m.size())
            throw config_error("source signature: need len(alpha) = len(m) - 1");
        for (int mk : m)
            if (mk < 1) throw config_error("source signature: block dimensions must be >= 1");
        for (int ak : alpha)
            if (ak < 2) throw config_error("source signature: exponents must be >= 2");
        M.resize(m.size() + 1, 0);
        for (std::size_t k = 0; k < m.size(); ++k) M[k + 1] = M[k] + m[k];
    }

    int s() const { return static_cast<int>(alpha.size()); }
    int dim() const { return M.back(); }
    int block_begin(int k) const { return M[k]; }  // k is 0-based here
    int block_size(int k) const { return m[static_cast<std::size_t>(k)]; }
    int num_blocks() const { return static_cast<int>(m.size()); }

    double block_norm_sq(const BlockedVector& Z, int k) const {
        double s2 = 0.0;
        for (int g = M[k]; g < M[k + 1]; ++g) s2 += std::norm(Z[static_cast<std::size_t>(g)]);
        return s2;
    }

    void check_dim(const BlockedVector& Z) const {
        if (static_cast<int>(Z.size()) != dim())
            throw std::invalid_argument("vector dimension does not match signature");
    }
};

// Target pseudoellipsoid data: group sizes n_1..n_{t+1} (each >= 2), exponents
// beta_1..beta_t with the reading beta_{t+1} = 1, and p trailing components for
// the bounded holomorphic block. The mapping built here has 2 N_{t+1} + p
// components: each group contributes a twin pair of n_k-blocks sharing the
// exponent beta_k.
struct TargetSignature {
    std::vector<int> n;
    std::vector<int> beta;
    int p = 0;
    std::vector<int> N;  // partial sums of n, N[0] = 0

    TargetSignature() = default;
    TargetSignature(std::vector<int> n_, std::vector<int> beta_, int p_)
        : n(std::move(n_)), beta(std::move(beta_)), p(p_) {
        if (n.empty() || beta.size() + 1 != n.size())
            throw config_error("target signature: need len(beta) = len(n) - 1");
        for (int nk : n)
            if (nk < 2) throw config_error("target signature: group sizes must be >= 2");
        int t = static_cast<int>(beta.size());
        for (int bk : beta) {
            if (bk < 1) throw config_error("target signature: exponents must be >= 1");
            if (bk >= t + 1)
                throw config_error("target signature: requires max beta_k < t + 1");
        }
        if (p < 0) throw config_error("target signature: p must be >= 0");
        N.resize(n.size() + 1, 0);
        for (std::size_t k = 0; k < n.size(); ++k) N[k + 1] = N[k] + n[k];
    }

    int t() const { return static_cast<int>(beta.size()); }
    int num_groups() const { return static_cast<int>(n.size()); }
    int num_points() const { return N.back(); }           // physical net points
    int num_indices() const { return 2 * N.back(); }      // duplicated indices
    int total_components() const { return num_indices() + p; }

    // beta with the convention beta_{t+1} = 1; k is 0-based group index.
    int beta_k(int k) const {
        return k < t() ? beta[static_cast<std::size_t>(k)] : 1;
    }

    int beta_t_exponent() const { return t() >= 1 ? beta[static_cast<std::size_t>(t() - 1)] : 1; }

    int max_beta() const {
        int b = 1;
        for (int bk : beta) b = std::max(b, bk);
        return b;
    }

    // Component range of block f_(2k-1) (twin = false) or f_(2k) (twin = true),
    // 0-based k.
    int block_begin(int k, bool twin) const { return 2 * N[k] + (twin ? n[static_cast<std::size_t>(k)] : 0); }
    int block_size(int k) const { return n[static_cast<std::size_t>(k)]; }

    // Physical point behind a duplicated index in [0, 2 N_{t+1}).
    int point_of_index(int idx) const {
        for (int k = 0; k < num_groups(); ++k) {
            int lo = 2 * N[k];
            int hi = 2 * N[k + 1];
            if (idx >= lo && idx < hi) {
                int local = idx - lo;
                int nk = n[static_cast<std::size_t>(k)];
                return N[k] + (local % nk);
            }
        }
        throw std::invalid_argument("index out of range");
    }

    int group_of_index(int idx) const {
        for (int k = 0; k < num_groups(); ++k)
            if (idx >= 2 * N[k] && idx < 2 * N[k + 1]) return k;
        throw std::invalid_argument("index out of range");
    }

    bool is_twin_index(int idx) const {
        int k = group_of_index(idx);
        return idx - 2 * N[k] >= n[static_cast<std::size_t>(k)];
    }
};

}  // namespace pemap

#endif
