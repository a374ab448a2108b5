#ifndef PEMAP_ESTIMATES_HPP
#define PEMAP_ESTIMATES_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pemap/geometry.hpp"
#include "pemap/types.hpp"

#include "json.hpp"

namespace pemap {

// Constants behind the chord estimates and the peak functions.
//
// A1, A2 bound Re<W-Z, N(W)/||N||> / ||W-Z||^2 over generic boundary pairs and
// are empirical (sampled extremes with a safety margin). B1, B2 are the closed
// forms for the degenerate-chord case. r and lambda fix the ball radius
// lambda*r used both for the far-field estimate and for the index sets of the
// construction steps.
struct EstimateConstants {
    double A1 = 0.0, A2 = 0.0;
    double B1 = 0.0, B2 = 0.0;
    double r = 0.0;
    double lambda = 0.0;
    double nu = 0.0;
    double eta = 0.0;
    double r0 = 0.0;  // upper bound on boundary pair distances
    int alpha_min = 0, alpha_max = 0;
    int beta_t = 1;
    // provenance
    bool aabb_satisfied = false;  // the radius-coupling inequality held as stated
    double q_min = 0.0, q_max = 0.0;
    std::uint64_t calib_seed = 0;
    int calib_samples = 0;
    std::string nu_source;  // which branch fixed nu

    nlohmann::json to_json() const;
    static EstimateConstants from_json(const nlohmann::json& j);
};

// Closed-form degenerate-chord bounds for a given mean-value parameter and
// number of surviving alpha-blocks.
std::pair<double, double> bounds_b(const SourceSignature& sig, double t0, int ell);

// Sampled extremes of q(W,Z) = Re<W-Z, N(W)/||N||> / ||W-Z||^2 over generic
// boundary pairs, widened by `margin`. Returns (A1, A2) and records the raw
// extremes through the out-parameters when given.
std::pair<double, double> calibrate_a(const SourceSignature& sig, int n_samples,
                                      std::uint64_t seed, double margin = 0.1,
                                      double* raw_min = nullptr, double* raw_max = nullptr);

struct RLambda {
    double r = 0.0;
    double lambda = 0.0;
    bool aabb_satisfied = false;
};

// Pick r and the ball-scale lambda. With distinct exponents the largest dyadic
// r satisfying the coupling inequality is taken; with equal exponents the
// inequality is r-free and r = 1/2. If it fails as a constant inequality the
// failure is flagged rather than fatal: nu selection later covers the
// nondegenerate branch directly from A1.
RLambda choose_r_lambda(double A1, double A2, double B1, double B2, int beta_t, int alpha_min,
                        int alpha_max);

// nu large enough that a unit-coefficient peak term stays below eta outside
// the lambda*r ball around its point, via the degenerate-branch threshold.
double choose_nu(double eta, const EstimateConstants& c);

// Same requirement including the nondegenerate branch A1 (lambda r)^2, which
// matters when the coupling inequality failed.
double far_field_nu(double eta, const EstimateConstants& c, std::string* source = nullptr);

struct PeakFunction {
    BlockedVector W;
    BlockedVector unit_normal;
    double norm_n = 0.0;  // ||N(W)||
    double nu = 0.0;
};

PeakFunction make_peak(const SourceSignature& sig, const BlockedVector& W, double nu,
                       const Tolerances& tol = {});

// exp(-nu <W - Z, N(W)> / ||N(W)||). The exponent's real part is clamped at
// +-700 and flagged through `clamped`.
cx peak_eval(const SourceSignature& sig, const PeakFunction& peak, const BlockedVector& Z,
             bool* clamped = nullptr, const Tolerances& tol = {});

// Sample-based audit result. `violations` holds one entry per failed check.
struct AuditReport {
    std::string lemma;  // which estimate was audited
    int n_samples = 0;
    std::uint64_t seed = 0;
    nlohmann::json violations = nlohmann::json::array();
    nlohmann::json extremes = nlohmann::json::object();
    bool ok() const { return violations.empty(); }
    nlohmann::json to_json() const;
};

// Two-sided chord bounds: A-family on generic pairs (same sample stream as the
// calibration), B-family on exact degenerate partners.
AuditReport audit_chord_bounds(const SourceSignature& sig, const EstimateConstants& c,
                               int n_samples, std::uint64_t seed);

// Far-field smallness: |gamma phi_i(Z)| < eta whenever ||W_i - Z|| > lambda r,
// audited at the worst admissible coefficient |gamma| = 1.
AuditReport audit_far_field(const SourceSignature& sig, const EstimateConstants& c,
                            const BoundaryNet& net, int n_samples, std::uint64_t seed);

// Lower bound Re<W-Z, N(W)/||N||> >= 1 - 1/T for Z in the closed T-dilated
// domain, plus the scalar inequality behind it on a simplex grid and the
// radial equality case.
AuditReport audit_dilation_bound(const SourceSignature& sig, double T, int n_samples,
                                 std::uint64_t seed);

// Peak modulus envelope: exp(-nu A' d^(2 alpha_max)) <= |phi| <= exp(-nu A1 d^2)
// with A' calibrated from the same stream; |phi| <= 1 on the closed domain.
AuditReport audit_peak_envelope(const SourceSignature& sig, const EstimateConstants& c,
                                const BoundaryNet& net, int n_samples, std::uint64_t seed);

}  // namespace pemap

#endif
