#include "doctest.h"

#include <cmath>

#include "pemap/geometry.hpp"
#include "pemap/harmonic.hpp"
#include "pemap/rng.hpp"

using namespace pemap;

namespace {
const SourceSignature kSig({1, 1}, {2});
}

TEST_CASE("circle function") {
    CHECK(boundary_u(0.0, 1000) == doctest::Approx(0.0));
    for (double th : {0.3, 1.1, 2.9}) {
        CHECK(boundary_u(th, 2000) == doctest::Approx(-boundary_u(-th, 2000)).epsilon(1e-13));
    }
    // uniform convergence: the sup over a grid moves by < 1e-3 between
    // truncation orders 1e4 and 1e5
    double worst = 0.0;
    for (int i = 0; i < 128; ++i) {
        const double th = -3.14159265358979 + 6.28318530717959 * i / 127.0;
        worst = std::max(worst, std::abs(boundary_u(th, 100000) - boundary_u(th, 10000)));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("disc extension and conjugate") {
    const PoissonPair origin = poisson_pair(cx(0, 0));
    CHECK(origin.u == 0.0);
    CHECK(origin.v == 0.0);

    // v~ along the positive real axis: negative and decreasing in r
    double prev = 0.0;
    for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const PoissonPair pp = poisson_pair(cx(r, 0));
        CHECK(pp.u == 0.0);
        CHECK(pp.v < prev);
        prev = pp.v;
    }
    CHECK_THROWS_AS(poisson_pair(cx(1.0, 0.0)), std::domain_error);

    // mean value property on small circles
    RandomStream rs(21);
    for (int i = 0; i < 10; ++i) {
        const cx z(rs.uniform(-0.6, 0.6), rs.uniform(-0.6, 0.6));
        const double rad = 0.05;
        double avg = 0.0;
        for (int k = 0; k < 64; ++k) {
            const double a = 6.283185307179586 * k / 64.0;
            avg += poisson_pair(z + rad * std::exp(cx(0, a))).u;
        }
        avg /= 64.0;
        CHECK(avg == doctest::Approx(poisson_pair(z).u).epsilon(1e-6));
    }

    // Cauchy-Riemann by finite differences
    const cx z0(0.31, -0.22);
    const double h = 1e-4;
    const double ux = (poisson_pair(z0 + cx(h, 0)).u - poisson_pair(z0 - cx(h, 0)).u) / (2 * h);
    const double uy = (poisson_pair(z0 + cx(0, h)).u - poisson_pair(z0 - cx(0, h)).u) / (2 * h);
    const double vx = (poisson_pair(z0 + cx(h, 0)).v - poisson_pair(z0 - cx(h, 0)).v) / (2 * h);
    const double vy = (poisson_pair(z0 + cx(0, h)).v - poisson_pair(z0 - cx(0, h)).v) / (2 * h);
    CHECK(ux == doctest::Approx(vy).epsilon(1e-5));
    CHECK(uy == doctest::Approx(-vx).epsilon(1e-5));

    // the exponential has modulus exp(u~) exactly
    const PoissonPair pp = poisson_pair(cx(0.4, 0.5));
    CHECK(std::abs(std::exp(cx(pp.u, pp.v))) == doctest::Approx(std::exp(pp.u)).epsilon(1e-15));
}

TEST_CASE("bounded holomorphic block") {
    ConjugatePairConfig cfg;
    cfg.iota = 0.05;

    const BlockedVector zero{cx(0, 0), cx(0, 0)};
    const std::vector<cx> h0 = eval_h(kSig, zero, cfg);
    CHECK(h0.size() == 3);  // p = M + 1
    CHECK(std::abs(h0[0]) == 0.0);
    CHECK(std::abs(h0[1]) == 0.0);
    CHECK(std::abs(h0[2] - cx(0.05, 0)) < 1e-15);
    CHECK(h_norm_sq(kSig, zero, cfg) == doctest::Approx(0.05 * 0.05).epsilon(1e-14));

    CHECK_THROWS_AS(eval_h(kSig, BlockedVector{cx(1, 0), cx(0, 0)}, cfg), std::domain_error);

    // sup ||h||^2 over boundary samples stays under iota^2 (sup||Z||^2 + sup e^(2u~))
    RandomStream rs(22);
    double sup_h = 0.0, sup_e2u = 0.0;
    for (int i = 0; i < 512; ++i) {
        const BlockedVector Z = sample_boundary_point(kSig, rs);
        if (std::abs(Z[0]) >= 1.0 - 1e-12) continue;
        sup_h = std::max(sup_h, h_norm_sq(kSig, Z, cfg));
        sup_e2u = std::max(sup_e2u, std::exp(2.0 * poisson_pair(Z[0]).u));
    }
    CHECK(sup_h <= 0.0025 * (2.0 + sup_e2u) + 1e-12);
    CHECK(sup_h < 0.976);  // initial budget of the default schedule

    // boundary continuity of ||h||^2 along rays
    for (double th : {0.0, 0.7, 2.1}) {
        const cx dir = std::exp(cx(0, th)) * 0.99;
        BlockedVector Z1{0.999 * dir, cx(0, 0)}, Z2{0.9999 * dir, cx(0, 0)};
        CHECK(std::abs(h_norm_sq(kSig, Z1, cfg) - h_norm_sq(kSig, Z2, cfg)) < 1e-3);
    }
}

TEST_CASE("conjugate growth along the singular ray") {
    const std::vector<double> grid{0.9, 0.99, 1.0 - 1e-4, 1.0 - 1e-6};
    const auto rows = conjugate_growth_report(grid, 0.0);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].v_tilde < 0.0);
        CHECK(rows[i].tail_bound < 1e-9);
        if (i) {
            CHECK(std::abs(rows[i].v_tilde) > std::abs(rows[i - 1].v_tilde));
            // more than a radian between successive scales
            CHECK(std::abs(rows[i].v_tilde - rows[i - 1].v_tilde) > 1.0);
        }
    }
    CHECK(std::abs(rows.back().v_tilde - rows.front().v_tilde) > 3.14159265);

    // alternating control ray: bounded, tiny oscillation in the tail
    const auto ctrl = conjugate_growth_report(grid, 3.14159265358979323846);
    for (const auto& row : ctrl) CHECK(std::abs(row.v_tilde) < 1.0);
    CHECK(std::abs(ctrl[3].v_tilde - ctrl[1].v_tilde) < 0.1);

    CHECK_THROWS_AS(conjugate_growth_report({0.9, 0.5}, 0.0), std::invalid_argument);
}
