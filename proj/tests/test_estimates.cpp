#include "doctest.h"

#include <cmath>

#include "pemap/estimates.hpp"

using namespace pemap;

namespace {
const SourceSignature kSig({1, 1}, {2});
const double kA = std::pow(0.5, 0.25);
const double kB = std::sqrt(0.5);
}  // namespace

TEST_CASE("degenerate-case constants") {
    auto [b1, b2] = bounds_b(kSig, 0.5, 0);
    CHECK(b1 == doctest::Approx(0.125 * 2.0 / std::sqrt(5.0)).epsilon(1e-15));
    CHECK(b1 == doctest::Approx(0.111803).epsilon(1e-5));
    CHECK(b2 == doctest::Approx(std::sqrt(2.0) * 2.0 * 0.125).epsilon(1e-15));
    CHECK(b2 == doctest::Approx(0.353553).epsilon(1e-5));

    // t0 -> 1 limit with one fully annihilated block of exponent 2
    auto [l1, l2] = bounds_b(kSig, 1.0 - 1e-12, 0);
    CHECK(l1 == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-9));
    CHECK(l2 == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));

    CHECK_THROWS_AS(bounds_b(kSig, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(bounds_b(kSig, 0.0, 0), std::invalid_argument);
}

TEST_CASE("chord ratio calibration on the ball") {
    // No alpha-blocks: the domain is the unit ball and the ratio is exactly
    // 1/2, so the margins land on 0.45 and 0.55.
    const SourceSignature ball({2}, {});
    auto [a1, a2] = calibrate_a(ball, 1000, 5);
    CHECK(a1 == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(a2 == doctest::Approx(0.55).epsilon(1e-12));

    auto [r1, r2] = calibrate_a(ball, 1000, 5);
    CHECK(a1 == r1);
    CHECK(a2 == r2);
}

TEST_CASE("chord ratio calibration on the default domain") {
    double qmin = 0.0, qmax = 0.0;
    auto [a1, a2] = calibrate_a(kSig, 2000, 42, 0.1, &qmin, &qmax);
    CHECK(qmin > 0.0);
    CHECK(a1 == doctest::Approx(0.9 * qmin));
    CHECK(a2 == doctest::Approx(1.1 * qmax));
    CHECK(a1 < a2);
    CHECK_THROWS_AS(calibrate_a(kSig, 10, 42), std::invalid_argument);
}

TEST_CASE("radius and ball scale") {
    // Equal exponents, numbers arranged so 4 beta^2 B2/B1 = 16: lambda = 2,
    // and with A2/A1 = 1 the coupling inequality holds exactly.
    const RLambda rl = choose_r_lambda(1.0, 1.0, 1.0, 4.0, 1, 2, 2);
    CHECK(rl.lambda == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rl.r == doctest::Approx(0.5));
    CHECK(rl.aabb_satisfied);

    // Distinct exponents: the left side grows as r shrinks, so a dyadic r
    // satisfying the inequality exists.
    const RLambda rd = choose_r_lambda(0.05, 1.0, 0.1, 0.5, 2, 2, 3);
    CHECK(rd.aabb_satisfied);
    CHECK(rd.r < 1.0);
    CHECK(rd.lambda >= std::sqrt(4.0 * 4.0 * 1.0 / 0.05) - 1e-12);

    // Equal exponents with a failing constant inequality: flagged, not fatal.
    const RLambda rf = choose_r_lambda(0.05, 1.0, 0.1, 0.5, 2, 2, 2);
    CHECK(!rf.aabb_satisfied);
    CHECK(rf.lambda == doctest::Approx(std::pow(16.0 * 5.0, 0.25)).epsilon(1e-14));
}

TEST_CASE("peak sharpness selection") {
    EstimateConstants c;
    c.A2 = 0.25;
    c.B2 = 0.3;
    c.beta_t = 1;
    c.r = 1.0 - 1e-16;  // r < 1 required; the example reads r = 1
    c.alpha_min = 2;
    CHECK(choose_nu(std::exp(-1.0), c) == doctest::Approx(1.01).epsilon(1e-12));

    // eta -> 1 sends nu to 0
    CHECK(choose_nu(1.0 - 1e-12, c) < 1e-10);

    // doubling beta_t quarters nu
    EstimateConstants c2 = c;
    c2.beta_t = 2;
    CHECK(choose_nu(0.5, c2) == doctest::Approx(choose_nu(0.5, c) / 4.0).epsilon(1e-12));

    // the completed selection also covers the generic branch
    EstimateConstants c3 = c;
    c3.A1 = 1e-3;
    c3.lambda = 2.0;
    std::string src;
    const double nu = far_field_nu(0.01, c3, &src);
    CHECK(nu >= choose_nu(0.01, c3));
    CHECK(nu >= 1.01 * std::log(100.0) / (c3.A1 * 4.0 * c3.r * c3.r) - 1e-9);
    CHECK(src == "nondegenerate_branch");
}

TEST_CASE("peak evaluation") {
    const BlockedVector W{cx(0, 0), cx(1, 0)};
    const PeakFunction pk = make_peak(kSig, W, 1.0);
    CHECK(std::abs(peak_eval(kSig, pk, W) - cx(1, 0)) < 1e-12);
    CHECK(std::abs(peak_eval(kSig, pk, BlockedVector{cx(0, 0), cx(0, 0)})) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

    const BlockedVector Wr{cx(kA, 0), cx(kB, 0)};
    const PeakFunction pr = make_peak(kSig, Wr, 1.0);
    const double expect = std::exp(-2.0 / std::sqrt(4.0 * std::pow(kA, 6) + kB * kB));
    CHECK(std::abs(peak_eval(kSig, pr, BlockedVector{cx(-kA, 0), cx(kB, 0)})) ==
          doctest::Approx(expect).epsilon(1e-13));
    CHECK(expect == doctest::Approx(0.23563).epsilon(2e-5));

    // overflow clamp
    const PeakFunction hot = make_peak(kSig, Wr, 1e6);
    bool clamped = false;
    (void)peak_eval(kSig, hot, BlockedVector{cx(-kA, 0), cx(kB, 0)}, &clamped);
    CHECK(clamped);
}

TEST_CASE("estimate audits on the default domain") {
    EstimateConstants c;
    c.alpha_min = c.alpha_max = 2;
    c.beta_t = 2;
    auto [b1, b2] = bounds_b(kSig, 0.5, 0);
    c.B1 = b1;
    c.B2 = b2;
    double qmin, qmax;
    auto [a1, a2] = calibrate_a(kSig, 2000, 42, 0.1, &qmin, &qmax);
    c.A1 = a1;
    c.A2 = a2;
    const RLambda rl = choose_r_lambda(c.A1, c.A2, c.B1, c.B2, c.beta_t, 2, 2);
    c.r = rl.r;
    c.lambda = rl.lambda;
    c.aabb_satisfied = rl.aabb_satisfied;
    c.eta = 0.01;
    c.nu = far_field_nu(c.eta, c);
    c.r0 = 2.4;

    const AuditReport chord = audit_chord_bounds(kSig, c, 2000, 42);
    CHECK(chord.ok());

    const TargetSignature tsig({2, 2, 2}, {2, 2}, 3);
    const BoundaryNet net = sample_boundary_net(kSig, tsig, 42, 512);
    const AuditReport far = audit_far_field(kSig, c, net, 2000, 42);
    CHECK(far.ok());
    CHECK(far.extremes.at("pairs_checked").get<long long>() > 0);
    CHECK(far.extremes.at("max_far_field").get<double>() < c.eta);

    const AuditReport env = audit_peak_envelope(kSig, c, net, 500, 42);
    CHECK(env.ok());
    CHECK(env.extremes.at("max_closed_domain_modulus").get<double>() <= 1.0 + 1e-12);
}

TEST_CASE("tampered constants are caught as violations") {
    EstimateConstants c;
    c.alpha_min = c.alpha_max = 2;
    c.beta_t = 2;
    auto [b1, b2] = bounds_b(kSig, 0.5, 0);
    c.B1 = b1;
    c.B2 = b2 / 2.0;  // degenerate upper bound cut in half
    auto [a1, a2] = calibrate_a(kSig, 2000, 42);
    c.A1 = a1;
    c.A2 = a2;
    const AuditReport rep = audit_chord_bounds(kSig, c, 2000, 42);
    CHECK(!rep.ok());
    bool degenerate_seen = false;
    for (const auto& v : rep.violations)
        if (v.at("kind") == "degenerate") degenerate_seen = true;
    CHECK(degenerate_seen);
}

TEST_CASE("dilated-domain lower bound") {
    for (double T : {1.0, 2.0}) {
        const AuditReport rep = audit_dilation_bound(kSig, T, 2000, 42);
        CHECK(rep.ok());
        CHECK(rep.extremes.at("min_re").get<double>() >= 1.0 - 1.0 / T - 1e-9);
        CHECK(rep.extremes.at("radial_equality_re").get<double>() ==
              doctest::Approx(1.0 - 1.0 / T).epsilon(1e-13));
        CHECK(rep.extremes.at("min_scalar_ratio").get<double>() >= 1.0 - 1e-9);
    }
    CHECK_THROWS_AS(audit_dilation_bound(kSig, 0.9, 100, 1), std::invalid_argument);
}
