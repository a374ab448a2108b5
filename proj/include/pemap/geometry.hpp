#ifndef PEMAP_GEOMETRY_HPP
#define PEMAP_GEOMETRY_HPP

#include <utility>
#include <vector>

#include "pemap/rng.hpp"
#include "pemap/types.hpp"

namespace pemap {

// Source-domain geometry.
//
// Conventions used throughout:
//   rho(Z)   = sum_k ||z_(k)||^(2 alpha_k) + ||z_(s+1)||^2 - 1
//   N(Z)     = (d rho / d conj(z^1), ..., d rho / d conj(z^M)); component g in
//              an alpha-block k is alpha_k ||z_(k)||^(2(alpha_k - 1)) z^g, and
//              in the last block it is z^g itself.
//   <a,b>    = sum a^g conj(b^g)  (first slot linear)
//   Q_P(v)   = Re sum rho_{z z} v v + sum rho_{z zbar} v vbar, the real Hessian
//              form of rho at P. Along a chord h(t) = rho((1-t) W + t Z) one has
//              h''(t) = 2 Q_{(1-t)W+tZ}(W - Z), which is the identity every
//              chord estimate below leans on.

double eval_rho(const SourceSignature& sig, const BlockedVector& Z);

BlockedVector gradient_n(const SourceSignature& sig, const BlockedVector& Z);

// ||N(Z)||^2 in closed form: sum_k alpha_k^2 ||z_(k)||^(4 alpha_k - 2) + ||z_(s+1)||^2.
double gradient_norm_sq(const SourceSignature& sig, const BlockedVector& Z);

// <W - Z, N(W)> written out as an affine function of the holomorphic
// coordinates of Z. W must lie on the boundary (within tol.boundary).
cx inner_wz(const SourceSignature& sig, const BlockedVector& W, const BlockedVector& Z,
            const Tolerances& tol = {});

// Real Hessian form at P applied to v, block-wise closed form.
double hessian_q(const SourceSignature& sig, const BlockedVector& P, const BlockedVector& v);

// Same form assembled from the individual second partial derivatives. Kept as
// an independent route; tests hold the two within 1e-10 of each other.
double hessian_q_general(const SourceSignature& sig, const BlockedVector& P, const BlockedVector& v);

// Taylor mean-value point on a boundary chord: t0 in (0,1) with
// 2 Re<W - Z, N(W)> = Q_{(1-t0)W + t0 Z}(W - Z), found by a sign scan plus
// bisection. Throws numerical_error with the residual profile when no bracket
// shows up.
double mean_value_t0(const SourceSignature& sig, const BlockedVector& W, const BlockedVector& Z,
                     const Tolerances& tol = {});

// Scale a nonzero direction onto the boundary: the unique c > 0 with
// rho(c * direction) = 0.
BlockedVector project_to_boundary(const SourceSignature& sig, const BlockedVector& direction,
                                  const Tolerances& tol = {});

// Z in the closure of the tau-dilated domain E_tau.
bool in_dilated_closure(const SourceSignature& sig, double tau, const BlockedVector& Z,
                        double slack = 1e-12);

// A boundary pair (W, Z) for which the chord Hessian form degenerates:
// Z keeps the blocks outside S, flips the blocks in S by (t0-1)/t0, and keeps
// the last block. t0 solves the two-point boundary constraint by bisection.
struct DegenerateSpec {
    BlockedVector W;
    std::vector<int> S;  // annihilated alpha-blocks, 0-based, nonempty
    double t0 = 0.0;
    int ell = 0;         // number of alpha-blocks left intact
};

std::pair<DegenerateSpec, BlockedVector> degenerate_partner(const SourceSignature& sig,
                                                            const BlockedVector& W,
                                                            const std::vector<int>& S,
                                                            const Tolerances& tol = {});

// Gaussian direction on the real sphere of dimension 2 M, projected radially.
BlockedVector sample_boundary_point(const SourceSignature& sig, RandomStream& rs,
                                    const Tolerances& tol = {});

// Finite boundary net. Physical points are grouped by the target signature's
// group sizes; duplicated indices i and i + n_k refer to the same point.
struct BoundaryNet {
    std::vector<BlockedVector> points;  // N_{t+1} physical points, group-ordered
    std::vector<int> group_sizes;
    double covering_radius = 0.0;       // empirical, over the candidate probes
    double max_pair_dist = 0.0;         // largest candidate-to-point distance seen
    std::uint64_t seed = 0;
    int density = 0;

    const BlockedVector& point_of_index(const TargetSignature& tsig, int idx) const {
        return points[static_cast<std::size_t>(tsig.point_of_index(idx))];
    }
};

// Draw `density` candidates, keep a far-point subset of size N_{t+1}.
BoundaryNet sample_boundary_net(const SourceSignature& sig, const TargetSignature& tsig,
                                std::uint64_t seed, int density, const Tolerances& tol = {});

}  // namespace pemap

#endif
