#include "doctest.h"

#include <cmath>

#include "pemap/geometry.hpp"
#include "pemap/rng.hpp"

using namespace pemap;

namespace {

const SourceSignature kSig({1, 1}, {2});  // E(1,1;2)

BlockedVector vec2(cx a, cx b) { return BlockedVector{a, b}; }

// Boundary point with |z^1|^4 = |z^2|^2 = 1/2.
const double kA = std::pow(0.5, 0.25);
const double kB = std::sqrt(0.5);

double chord_second_derivative_fd(const SourceSignature& sig, const BlockedVector& P,
                                  const BlockedVector& v) {
    auto rho_at = [&](double t) {
        BlockedVector Z(P.size());
        for (std::size_t i = 0; i < P.size(); ++i) Z[i] = P[i] + t * v[i];
        return eval_rho(sig, Z);
    };
    const double h = 1e-4;
    return (rho_at(h) - 2.0 * rho_at(0.0) + rho_at(-h)) / (h * h);
}

}  // namespace

TEST_CASE("defining function") {
    CHECK(eval_rho(kSig, vec2(0, 0)) == doctest::Approx(-1.0));
    CHECK(eval_rho(kSig, vec2(0, 1)) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eval_rho(kSig, vec2(kA, kB)) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eval_rho(kSig, vec2(0.5, 0.5)) < 0.0);
    CHECK_THROWS_AS(eval_rho(kSig, BlockedVector{cx(0, 0)}), std::invalid_argument);
}

TEST_CASE("gradient") {
    const BlockedVector n1 = gradient_n(kSig, vec2(0, 1));
    CHECK(std::abs(n1[0]) == doctest::Approx(0.0));
    CHECK(std::abs(n1[1] - cx(1, 0)) < 1e-15);

    const BlockedVector n2 = gradient_n(kSig, vec2(kA, kB));
    CHECK(n2[0].real() == doctest::Approx(2.0 * kA * kA * kA).epsilon(1e-14));
    CHECK(n2[1].real() == doctest::Approx(kB).epsilon(1e-14));
    const double expect_nsq = 4.0 * std::pow(kA, 6) + kB * kB;
    CHECK(gradient_norm_sq(kSig, vec2(kA, kB)) == doctest::Approx(expect_nsq).epsilon(1e-14));
    CHECK(expect_nsq == doctest::Approx(1.91421).epsilon(1e-5));

    // last-block-only point: the gradient is the point itself
    const SourceSignature sig3({1, 2}, {3});
    BlockedVector Z{cx(0, 0), cx(0.3, 0.1), cx(0.2, -0.5)};
    const BlockedVector n3 = gradient_n(sig3, Z);
    CHECK(std::abs(n3[1] - Z[1]) < 1e-15);
    CHECK(std::abs(n3[2] - Z[2]) < 1e-15);

    // closed form of ||N||^2 against the componentwise norm
    RandomStream rs(11);
    for (int i = 0; i < 100; ++i) {
        const BlockedVector W = sample_boundary_point(kSig, rs);
        CHECK(gradient_norm_sq(kSig, W) ==
              doctest::Approx(norm_sq(gradient_n(kSig, W))).epsilon(1e-12));
    }
}

TEST_CASE("chord inner product") {
    CHECK(inner_wz(kSig, vec2(0, 1), vec2(0, 0)).real() == doctest::Approx(1.0));
    CHECK(std::abs(inner_wz(kSig, vec2(0, 1), vec2(0, 1))) < 1e-12);
    const cx r = inner_wz(kSig, vec2(kA, kB), vec2(-kA, kB));
    CHECK(r.real() == doctest::Approx(2.0).epsilon(1e-14));  // 4 a^4
    CHECK(std::abs(r.imag()) < 1e-15);
    CHECK_THROWS_AS(inner_wz(kSig, vec2(0.5, 0.5), vec2(0, 0)), std::invalid_argument);
}

TEST_CASE("chord inner product is affine in Z") {
    RandomStream rs(12);
    for (int i = 0; i < 200; ++i) {
        const BlockedVector W = sample_boundary_point(kSig, rs);
        const BlockedVector Z1 = sample_boundary_point(kSig, rs);
        const BlockedVector Z2 = sample_boundary_point(kSig, rs);
        const double c = rs.uniform(-1.0, 2.0);
        BlockedVector mix(Z1.size());
        for (std::size_t g = 0; g < Z1.size(); ++g) mix[g] = c * Z1[g] + (1.0 - c) * Z2[g];
        const cx lhs = inner_wz(kSig, W, mix);
        const cx rhs = c * inner_wz(kSig, W, Z1) + (1.0 - c) * inner_wz(kSig, W, Z2);
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("hessian form") {
    CHECK(hessian_q(kSig, vec2(kA, kB), vec2(0, 0)) == doctest::Approx(0.0));
    // last-block-only direction
    CHECK(hessian_q(kSig, vec2(0.3, 0.4), vec2(0, cx(0.5, 0.2))) ==
          doctest::Approx(std::norm(cx(0.5, 0.2))).epsilon(1e-14));

    // both routes and a finite-difference oracle agree at the worked point
    const BlockedVector P = vec2(kA, kB);
    const BlockedVector v = vec2(2.0 * kA, 0);
    const double q_closed = hessian_q(kSig, P, v);
    const double q_general = hessian_q_general(kSig, P, v);
    CHECK(q_closed == doctest::Approx(12.0).epsilon(1e-13));
    CHECK(q_general == doctest::Approx(12.0).epsilon(1e-13));
    CHECK(chord_second_derivative_fd(kSig, P, v) / 2.0 == doctest::Approx(q_closed).epsilon(1e-6));
}

TEST_CASE("hessian routes agree on random data") {
    const SourceSignature sig({2, 1, 2}, {2, 3});
    RandomStream rs(13);
    for (int i = 0; i < 200; ++i) {
        BlockedVector P(static_cast<std::size_t>(sig.dim())), v(static_cast<std::size_t>(sig.dim()));
        for (int g = 0; g < sig.dim(); ++g) {
            P[static_cast<std::size_t>(g)] = cx(rs.gaussian(), rs.gaussian()) * 0.5;
            v[static_cast<std::size_t>(g)] = cx(rs.gaussian(), rs.gaussian());
        }
        const double qc = hessian_q(sig, P, v);
        const double qg = hessian_q_general(sig, P, v);
        CHECK(qc == doctest::Approx(qg).epsilon(1e-10));
        CHECK(2.0 * qc == doctest::Approx(chord_second_derivative_fd(sig, P, v)).epsilon(1e-4));
    }
}

TEST_CASE("mean value point on a chord") {
    // Reflected pair: the identity has two symmetric roots; the scan finds the
    // lower one at (1 - 1/sqrt(3))/2.
    const BlockedVector W = vec2(kA, kB), Z = vec2(-kA, kB);
    const double t0 = mean_value_t0(kSig, W, Z);
    CHECK(t0 == doctest::Approx((1.0 - 1.0 / std::sqrt(3.0)) / 2.0).epsilon(1e-9));
    BlockedVector v = vec2(2.0 * kA, 0), P = vec2((1.0 - 2.0 * t0) * kA, kB);
    CHECK(std::abs(2.0 * inner_wz(kSig, W, Z).real() - hessian_q(kSig, P, v)) < 1e-9);

    // generic pairs
    RandomStream rs(14);
    for (int i = 0; i < 100; ++i) {
        const BlockedVector Wr = sample_boundary_point(kSig, rs);
        const BlockedVector Zr = sample_boundary_point(kSig, rs);
        if (dist(Wr, Zr) < 1e-3) continue;
        const double t = mean_value_t0(kSig, Wr, Zr);
        CHECK(t > 0.0);
        CHECK(t < 1.0);
    }
    CHECK_THROWS_AS(mean_value_t0(kSig, W, W), std::invalid_argument);
}

TEST_CASE("projection to the boundary") {
    const BlockedVector p1 = project_to_boundary(kSig, vec2(0, 2));
    CHECK(std::abs(p1[1] - cx(1, 0)) < 1e-12);
    const BlockedVector p2 = project_to_boundary(kSig, vec2(1, 0));
    CHECK(std::abs(p2[0] - cx(1, 0)) < 1e-12);
    const BlockedVector p3 = project_to_boundary(kSig, vec2(1, 1));
    const double c = std::sqrt((std::sqrt(5.0) - 1.0) / 2.0);
    CHECK(p3[0].real() == doctest::Approx(c).epsilon(1e-10));
    CHECK(c == doctest::Approx(0.78615).epsilon(1e-5));
    CHECK_THROWS_AS(project_to_boundary(kSig, vec2(0, 0)), std::invalid_argument);

    RandomStream rs(15);
    for (int i = 0; i < 10000; ++i) {
        const BlockedVector W = sample_boundary_point(kSig, rs);
        CHECK(std::abs(eval_rho(kSig, W)) < 1e-12);
    }
}

TEST_CASE("dilated closure membership") {
    CHECK(in_dilated_closure(kSig, 1.0, vec2(0, 0)));
    CHECK(in_dilated_closure(kSig, 7.0, vec2(0, 0)));
    CHECK(in_dilated_closure(kSig, 1.0, vec2(0, 1)));
    CHECK(!in_dilated_closure(kSig, 2.0, vec2(0, 1)));
    CHECK(in_dilated_closure(kSig, 3.0, vec2(0, 1.0 / 3.0)));
    CHECK_THROWS_AS(in_dilated_closure(kSig, 0.5, vec2(0, 0)), std::invalid_argument);
}

TEST_CASE("degenerate partner") {
    auto [spec, Z] = degenerate_partner(kSig, vec2(kA, kB), {0});
    CHECK(spec.t0 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(spec.ell == 0);
    CHECK(std::abs(Z[0] + cx(kA, 0)) < 1e-12);
    CHECK(std::abs(Z[1] - cx(kB, 0)) < 1e-12);
    CHECK(dist(vec2(kA, kB), Z) == doctest::Approx(2.0 * kA).epsilon(1e-12));
    CHECK(2.0 * kA == doctest::Approx(1.68179).epsilon(1e-5));

    CHECK_THROWS_AS(degenerate_partner(kSig, vec2(kA, kB), {}), std::invalid_argument);
    CHECK_THROWS_AS(degenerate_partner(kSig, vec2(0, 1), {0}), std::invalid_argument);

    // multi-block, mixed exponents, several annihilation patterns
    const SourceSignature sig({1, 1, 1}, {2, 3});
    RandomStream rs(16);
    for (int i = 0; i < 50; ++i) {
        const BlockedVector W = sample_boundary_point(sig, rs);
        for (const std::vector<int>& S : {std::vector<int>{0}, {1}, {0, 1}}) {
            bool ok = true;
            for (int k : S)
                if (sig.block_norm_sq(W, k) < 1e-8) ok = false;
            if (!ok) continue;
            auto [sp, Zp] = degenerate_partner(sig, W, S);
            CHECK(sp.t0 == doctest::Approx(0.5).epsilon(1e-12));
            CHECK(std::abs(eval_rho(sig, Zp)) < 1e-10);
        }
    }
}

TEST_CASE("boundary net") {
    const TargetSignature tsig({2, 2}, {1}, 0);
    const BoundaryNet net = sample_boundary_net(kSig, tsig, 7, 256);
    CHECK(net.points.size() == 4);
    for (const auto& p : net.points) CHECK(std::abs(eval_rho(kSig, p)) < 1e-10);

    // duplicated index arithmetic: eight indices over four points; the second
    // copy of group 1 starts at index 2 and points back to the first copy
    CHECK(tsig.num_indices() == 8);
    CHECK(tsig.point_of_index(0) == 0);
    CHECK(tsig.point_of_index(2) == 0);
    CHECK(tsig.point_of_index(3) == 1);
    CHECK(tsig.point_of_index(4) == 2);
    CHECK(tsig.point_of_index(6) == 2);
    CHECK(!tsig.is_twin_index(1));
    CHECK(tsig.is_twin_index(2));

    const BoundaryNet again = sample_boundary_net(kSig, tsig, 7, 256);
    for (std::size_t i = 0; i < net.points.size(); ++i)
        CHECK(dist(net.points[i], again.points[i]) == 0.0);

    CHECK(net.covering_radius > 0.0);
    CHECK(net.covering_radius < net.max_pair_dist);
    CHECK_THROWS_AS(sample_boundary_net(kSig, tsig, 7, 2), config_error);
}
