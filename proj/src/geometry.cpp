#include "pemap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pemap {

double eval_rho(const SourceSignature& sig, const BlockedVector& Z) {
    sig.check_dim(Z);
    const int s = sig.s();
    double r = -1.0;
    for (int k = 0; k < s; ++k)
        r += ipow(sig.block_norm_sq(Z, k), sig.alpha[static_cast<std::size_t>(k)]);
    r += sig.block_norm_sq(Z, s);
    return r;
}

BlockedVector gradient_n(const SourceSignature& sig, const BlockedVector& Z) {
    sig.check_dim(Z);
    const int s = sig.s();
    BlockedVector N(Z.size());
    for (int k = 0; k < s; ++k) {
        const int a = sig.alpha[static_cast<std::size_t>(k)];
        const double w = static_cast<double>(a) * ipow(sig.block_norm_sq(Z, k), a - 1);
        for (int g = sig.M[k]; g < sig.M[k + 1]; ++g)
            N[static_cast<std::size_t>(g)] = w * Z[static_cast<std::size_t>(g)];
    }
    for (int g = sig.M[s]; g < sig.M[s + 1]; ++g)
        N[static_cast<std::size_t>(g)] = Z[static_cast<std::size_t>(g)];
    return N;
}

double gradient_norm_sq(const SourceSignature& sig, const BlockedVector& Z) {
    sig.check_dim(Z);
    const int s = sig.s();
    double r = sig.block_norm_sq(Z, s);
    for (int k = 0; k < s; ++k) {
        const int a = sig.alpha[static_cast<std::size_t>(k)];
        const double nsq = sig.block_norm_sq(Z, k);
        // alpha^2 ||z||^(4 alpha - 2) = alpha^2 (||z||^2)^(2 alpha - 1)
        r += static_cast<double>(a) * static_cast<double>(a) * ipow(nsq, 2 * a - 1);
    }
    return r;
}

cx inner_wz(const SourceSignature& sig, const BlockedVector& W, const BlockedVector& Z,
            const Tolerances& tol) {
    sig.check_dim(W);
    sig.check_dim(Z);
    if (std::abs(eval_rho(sig, W)) > tol.boundary)
        throw std::invalid_argument("inner_wz: W is not on the boundary");
    const int s = sig.s();
    cx r{0.0, 0.0};
    for (int k = 0; k < s; ++k) {
        const int a = sig.alpha[static_cast<std::size_t>(k)];
        const double nsq = sig.block_norm_sq(W, k);
        cx zw{0.0, 0.0};
        for (int g = sig.M[k]; g < sig.M[k + 1]; ++g)
            zw += Z[static_cast<std::size_t>(g)] * std::conj(W[static_cast<std::size_t>(g)]);
        r += static_cast<double>(a) * (ipow(nsq, a) - ipow(nsq, a - 1) * zw);
    }
    cx zw{0.0, 0.0};
    for (int g = sig.M[s]; g < sig.M[s + 1]; ++g)
        zw += Z[static_cast<std::size_t>(g)] * std::conj(W[static_cast<std::size_t>(g)]);
    r += sig.block_norm_sq(W, s) - zw;
    return r;
}

double hessian_q(const SourceSignature& sig, const BlockedVector& P, const BlockedVector& v) {
    sig.check_dim(P);
    sig.check_dim(v);
    const int s = sig.s();
    double q = sig.block_norm_sq(v, s);
    for (int k = 0; k < s; ++k) {
        const int a = sig.alpha[static_cast<std::size_t>(k)];
        const double psq = sig.block_norm_sq(P, k);
        cx vp{0.0, 0.0};
        for (int g = sig.M[k]; g < sig.M[k + 1]; ++g)
            vp += v[static_cast<std::size_t>(g)] * std::conj(P[static_cast<std::size_t>(g)]);
        const double re = vp.real();
        const double outer = (a == 2) ? 1.0 : ipow(psq, a - 2);
        q += static_cast<double>(a) * outer *
             (2.0 * static_cast<double>(a - 1) * re * re + psq * sig.block_norm_sq(v, k));
    }
    return q;
}

double hessian_q_general(const SourceSignature& sig, const BlockedVector& P, const BlockedVector& v) {
    sig.check_dim(P);
    sig.check_dim(v);
    const int s = sig.s();
    // Holomorphic-holomorphic part: rho_{z^g z^d} = a (a-1) u^(a-2) conj(p^g) conj(p^d)
    // within a block, zero across blocks and in the last block.
    cx hh{0.0, 0.0};
    double hm = 0.0;  // mixed part, real by Hermitian symmetry
    for (int k = 0; k < s; ++k) {
        const int a = sig.alpha[static_cast<std::size_t>(k)];
        const double u = sig.block_norm_sq(P, k);
        const double c2 = static_cast<double>(a) * static_cast<double>(a - 1) *
                          ((a == 2) ? 1.0 : ipow(u, a - 2));
        const double c1 = static_cast<double>(a) * ipow(u, a - 1);
        for (int g = sig.M[k]; g < sig.M[k + 1]; ++g) {
            for (int d = sig.M[k]; d < sig.M[k + 1]; ++d) {
                const cx pg = P[static_cast<std::size_t>(g)];
                const cx pd = P[static_cast<std::size_t>(d)];
                hh += c2 * std::conj(pg) * std::conj(pd) * v[static_cast<std::size_t>(g)] *
                      v[static_cast<std::size_t>(d)];
                cx mixed = c2 * pd * std::conj(pg) * v[static_cast<std::size_t>(g)] *
                           std::conj(v[static_cast<std::size_t>(d)]);
                if (g == d) mixed += c1 * v[static_cast<std::size_t>(g)] * std::conj(v[static_cast<std::size_t>(d)]);
                hm += mixed.real();
            }
        }
    }
    for (int g = sig.M[s]; g < sig.M[s + 1]; ++g) hm += std::norm(v[static_cast<std::size_t>(g)]);
    return hh.real() + hm;
}

namespace {

BlockedVector chord_point(const BlockedVector& W, const BlockedVector& Z, double t) {
    BlockedVector P(W.size());
    for (std::size_t i = 0; i < W.size(); ++i) P[i] = (1.0 - t) * W[i] + t * Z[i];
    return P;
}

}  // namespace

double mean_value_t0(const SourceSignature& sig, const BlockedVector& W, const BlockedVector& Z,
                     const Tolerances& tol) {
    sig.check_dim(W);
    sig.check_dim(Z);
    if (std::abs(eval_rho(sig, W)) > tol.boundary || std::abs(eval_rho(sig, Z)) > tol.boundary)
        throw std::invalid_argument("mean_value_t0: endpoints must be on the boundary");
    if (dist(W, Z) < 1e-12) throw std::invalid_argument("mean_value_t0: W and Z coincide");

    BlockedVector v(W.size());
    for (std::size_t i = 0; i < W.size(); ++i) v[i] = W[i] - Z[i];
    const double target = 2.0 * inner_wz(sig, W, Z, tol).real();
    auto g = [&](double t) { return target - hessian_q(sig, chord_point(W, Z, t), v); };

    const int grid = 4096;
    double prev_t = 1e-9;
    double prev_g = g(prev_t);
    double lo = 0.0, hi = 0.0;
    bool found = false;
    double best_abs = std::abs(prev_g);
    double best_t = prev_t;
    for (int i = 1; i <= grid; ++i) {
        const double t = 1e-9 + (1.0 - 2e-9) * static_cast<double>(i) / grid;
        const double gt = g(t);
        if (std::abs(gt) < best_abs) {
            best_abs = std::abs(gt);
            best_t = t;
        }
        if ((prev_g <= 0.0 && gt >= 0.0) || (prev_g >= 0.0 && gt <= 0.0)) {
            lo = prev_t;
            hi = t;
            found = true;
            break;
        }
        prev_t = t;
        prev_g = gt;
    }
    if (!found) {
        std::ostringstream os;
        os << "min |residual| = " << best_abs << " at t = " << best_t;
        throw numerical_error("mean_value_t0: no sign change bracketed", os.str());
    }
    double glo = g(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((glo <= 0.0) == (gm <= 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    const double t0 = 0.5 * (lo + hi);
    if (std::abs(g(t0)) > 1e-9) {
        std::ostringstream os;
        os << "residual " << g(t0) << " at t0 = " << t0;
        throw numerical_error("mean_value_t0: bisection left a large residual", os.str());
    }
    return t0;
}

BlockedVector project_to_boundary(const SourceSignature& sig, const BlockedVector& direction,
                                  const Tolerances& tol) {
    sig.check_dim(direction);
    if (norm_sq(direction) < 1e-24)
        throw std::invalid_argument("project_to_boundary: zero direction");
    auto rho_at = [&](double c) {
        BlockedVector Z(direction.size());
        for (std::size_t i = 0; i < direction.size(); ++i) Z[i] = c * direction[i];
        return eval_rho(sig, Z);
    };
    double hi = 1.0;
    while (rho_at(hi) < 0.0) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (rho_at(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double c = 0.5 * (lo + hi);
    BlockedVector Z(direction.size());
    for (std::size_t i = 0; i < direction.size(); ++i) Z[i] = c * direction[i];
    if (std::abs(eval_rho(sig, Z)) > tol.root)
        throw numerical_error("project_to_boundary: residual above tolerance");
    return Z;
}

bool in_dilated_closure(const SourceSignature& sig, double tau, const BlockedVector& Z,
                        double slack) {
    if (tau < 1.0) throw std::invalid_argument("in_dilated_closure: tau must be >= 1");
    BlockedVector T(Z.size());
    for (std::size_t i = 0; i < Z.size(); ++i) T[i] = tau * Z[i];
    return eval_rho(sig, T) <= slack;
}

std::pair<DegenerateSpec, BlockedVector> degenerate_partner(const SourceSignature& sig,
                                                            const BlockedVector& W,
                                                            const std::vector<int>& S,
                                                            const Tolerances& tol) {
    sig.check_dim(W);
    if (std::abs(eval_rho(sig, W)) > tol.boundary)
        throw std::invalid_argument("degenerate_partner: W is not on the boundary");
    if (S.empty()) throw std::invalid_argument("degenerate_partner: S must be nonempty");
    for (int k : S) {
        if (k < 0 || k >= sig.s())
            throw std::invalid_argument("degenerate_partner: S must index alpha-blocks");
        if (sig.block_norm_sq(W, k) <= 0.0)
            throw std::invalid_argument("degenerate_partner: annihilated block is zero at W");
    }

    // Residual of the two-point boundary constraint; strictly decreasing in t0.
    auto residual = [&](double t0) {
        const double f = (1.0 - t0) / t0;
        double r = 0.0;
        for (int k : S) {
            const int a = sig.alpha[static_cast<std::size_t>(k)];
            const double x = ipow(sig.block_norm_sq(W, k), a);
            r += (ipow(f * f, a) - 1.0) * x;
        }
        return r;
    };
    double lo = 1e-9, hi = 1.0 - 1e-9;
    if (residual(lo) < 0.0 || residual(hi) > 0.0)
        throw numerical_error("degenerate_partner: constraint not bracketed");
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double t0 = 0.5 * (lo + hi);

    const double flip = (t0 - 1.0) / t0;
    BlockedVector Z = W;
    for (int k : S)
        for (int g = sig.M[k]; g < sig.M[k + 1]; ++g) Z[static_cast<std::size_t>(g)] *= flip;

    if (std::abs(eval_rho(sig, Z)) > tol.boundary)
        throw numerical_error("degenerate_partner: partner missed the boundary");
    BlockedVector v(W.size());
    for (std::size_t i = 0; i < W.size(); ++i) v[i] = W[i] - Z[i];
    const double q = hessian_q(sig, chord_point(W, Z, t0), v);
    if (std::abs(q) > 1e-9)
        throw numerical_error("degenerate_partner: chord Hessian did not degenerate");

    DegenerateSpec spec;
    spec.W = W;
    spec.S = S;
    spec.t0 = t0;
    spec.ell = sig.s() - static_cast<int>(S.size());
    return {spec, Z};
}

BlockedVector sample_boundary_point(const SourceSignature& sig, RandomStream& rs,
                                    const Tolerances& tol) {
    const int dim = sig.dim();
    for (;;) {
        BlockedVector d(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) d[static_cast<std::size_t>(i)] = cx(rs.gaussian(), rs.gaussian());
        if (norm_sq(d) < 1e-12) continue;
        return project_to_boundary(sig, d, tol);
    }
}

BoundaryNet sample_boundary_net(const SourceSignature& sig, const TargetSignature& tsig,
                                std::uint64_t seed, int density, const Tolerances& tol) {
    const int want = tsig.num_points();
    if (density < want)
        throw config_error("sample_boundary_net: density below the requested point count");

    RandomStream rs = RandomStream::derive(seed, "net");
    std::vector<BlockedVector> cand;
    cand.reserve(static_cast<std::size_t>(density));
    for (int i = 0; i < density; ++i) cand.push_back(sample_boundary_point(sig, rs, tol));

    // Greedy far-point subset; start from the first candidate, then repeatedly
    // take the candidate farthest from the current selection. Deterministic,
    // ties resolved by lowest index.
    std::vector<int> chosen{0};
    std::vector<double> min_dist(static_cast<std::size_t>(density));
    for (int i = 0; i < density; ++i) min_dist[static_cast<std::size_t>(i)] = dist(cand[static_cast<std::size_t>(i)], cand[0]);
    while (static_cast<int>(chosen.size()) < want) {
        int best = -1;
        double best_d = -1.0;
        for (int i = 0; i < density; ++i) {
            if (min_dist[static_cast<std::size_t>(i)] > best_d) {
                best_d = min_dist[static_cast<std::size_t>(i)];
                best = i;
            }
        }
        chosen.push_back(best);
        for (int i = 0; i < density; ++i)
            min_dist[static_cast<std::size_t>(i)] =
                std::min(min_dist[static_cast<std::size_t>(i)], dist(cand[static_cast<std::size_t>(i)], cand[static_cast<std::size_t>(best)]));
    }

    BoundaryNet net;
    net.seed = seed;
    net.density = density;
    net.group_sizes = tsig.n;
    for (int i : chosen) net.points.push_back(cand[static_cast<std::size_t>(i)]);

    double cover = 0.0, far = 0.0;
    for (const auto& c : cand) {
        double nearest = 1e300, farthest = 0.0;
        for (const auto& p : net.points) {
            const double d = dist(c, p);
            nearest = std::min(nearest, d);
            farthest = std::max(farthest, d);
        }
        cover = std::max(cover, nearest);
        far = std::max(far, farthest);
    }
    net.covering_radius = cover;
    net.max_pair_dist = far;
    return net;
}

}  // namespace pemap
