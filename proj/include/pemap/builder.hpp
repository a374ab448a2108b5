#ifndef PEMAP_BUILDER_HPP
#define PEMAP_BUILDER_HPP

#include <cstdint>
#include <vector>

#include "pemap/estimates.hpp"
#include "pemap/geometry.hpp"
#include "pemap/harmonic.hpp"
#include "pemap/types.hpp"

#include "json.hpp"

namespace pemap {

// Budget and perturbation schedule. a_l fixes the per-level norm ceiling via
// sum_k a_l^(2 beta_k) = 1 - delta_l, eps_l the size of the l-th layer,
// delta_l = 2 sum_{j>l} eps_j with eps_l = eps0 l^(-q). The exponent q is 3
// whenever 3 <= (2t+2)/max beta, otherwise it drops toward 2 and the
// divergence margin is recorded. Required simultaneously: sum sqrt(eps_l)
// finite, sum eps_l^(max beta/(2t+2)) divergent.
struct Schedule {
    int L = 0;
    double q = 3.0;
    double eps0 = 0.0;
    double sup_h_sq = 0.0;
    double divergence_margin = 0.0;
    std::vector<double> a;        // a[0..L]
    std::vector<double> eps;      // eps[0] unused, eps[1..L]
    std::vector<double> delta;    // delta[0..L]
    std::vector<double> sum_pow;  // sum_k a_l^(2 beta_k), equals 1 - delta_l
    std::vector<double> T;        // T[0] unused; filled by the construction

    nlohmann::json to_json() const;
    static Schedule from_json(const nlohmann::json& j);
};

double sum_pow_at(const TargetSignature& tsig, double a);
double solve_sum_pow(const TargetSignature& tsig, double target);

Schedule make_schedule(const TargetSignature& tsig, int L, double sup_h_sq, double eps0);

// Continuity budget eta for a step of size eps, from the worst-case count of
// in-ball and out-of-ball contributions per group.
double eta_from_eps(const TargetSignature& tsig, double eps);

// |||V|||^(2 beta): paired n_k-blocks with exponent beta_k, then the squared
// norm of the trailing p components.
double norm_beta(const TargetSignature& tsig, const std::vector<cx>& V);

// One construction layer: every duplicated index gets a coefficient gamma_i
// on the shared peak function of its physical point, all at sharpness nu.
struct Step {
    double a = 0.0;
    double eps = 0.0;
    double T = 0.0;
    double nu = 0.0;
    double eta = 0.0;
    std::vector<cx> gamma;  // one per duplicated index
    int clamped_zero = 0;   // negative coefficient brackets clamped to 0
    int clamped_unit = 0;   // |gamma| > 1 clamped to 1
};

// The truncated mapping F_L = F_0 + sum of layers, evaluable anywhere on the
// closed source domain (h needs |z^1| < 1).
struct MapState {
    SourceSignature sig;
    TargetSignature tsig;
    BoundaryNet net;
    ConjugatePairConfig h_cfg;
    std::vector<Step> layers;

    // cached linear forms: <W_p - Z, N(W_p)>/||N|| = (c0_p - sum_g lin_p[g] z^g)/||N||
    std::vector<std::vector<cx>> lin;
    std::vector<double> c0;
    std::vector<double> norm_n;

    cx peak_w(int phys, const BlockedVector& Z) const;

    // Target-shaped value of F with the first `upto` layers (-1 = all).
    std::vector<cx> eval(const BlockedVector& Z, int upto = -1) const;
    double norm_beta_of(const BlockedVector& Z, int upto = -1) const;
};

MapState make_state(const SourceSignature& sig, const TargetSignature& tsig,
                    const BoundaryNet& net, const ConjugatePairConfig& h_cfg);

// Point set with incremental layer evaluation; shared by the construction
// audits and the trend analysis.
struct ProbeBank {
    std::vector<BlockedVector> pts;
    std::vector<std::vector<cx>> w;   // [pt][phys]
    std::vector<double> h_sq;
    std::vector<std::vector<cx>> f;   // [pt][index], running partial sums

    void init(const MapState& st, std::vector<BlockedVector> points);
    void add_layer(const MapState& st, const Step& step);
    double block_norm_sq(const TargetSignature& tsig, int pt, int k, bool twin) const;
    double norm_beta_at(const TargetSignature& tsig, int pt) const;
    double max_component_abs(int pt) const;
};

std::vector<BlockedVector> sample_boundary_points(const SourceSignature& sig, int count,
                                                  std::uint64_t seed, const char* tag);

// Shell acceptance for level ell: walk the dyadic grid tau_j = 1 + 2^-j down
// from T_prev and return the first tau whose outer shell already carries
// |||F|||^(2 beta) >= boundary_min - 2^-ell at every sample.
double select_t(const MapState& state, int ell, double boundary_min, double T_prev,
                std::uint64_t seed, int n_samples);

// Coefficients of one layer from the current state. The index sets are
// evaluated at the net points themselves: sharp_i = same-group points whose
// lambda r ball contains W_i.
Step build_step(const MapState& state, double a, double eps, double T, double nu,
                double lambda_r);

struct StepDiag {
    int ell = 0;
    double T = 0.0;
    double nu = 0.0;
    double boundary_min = 0.0;
    double boundary_max = 0.0;
    double sum_a2beta = 0.0;
    int clamps = 0;
    double growth_margin = 0.0;        // eps + sum_pow[l-1] - boundary_max, needs > 0
    double max_half_group_sum = 0.0;   // max sum |g^i| over the dilated core
    double closed_domain_max = 0.0;    // max |||F_l|||^(2 beta) over all probes
    double max_component = 0.0;        // max |f^i| on the boundary probes
    double min_u = 0.0;
    double max_u = 0.0;
    double d_increment_min = 1e300;    // realized block increments where the
    double c_empirical = 0.0;          // smallness hypotheses held
    bool hypotheses_seen = false;
};

struct BuildInputs {
    SourceSignature sig;
    TargetSignature tsig;
    BoundaryNet net;
    EstimateConstants consts;
    Schedule schedule;
    ConjugatePairConfig h_cfg;
    int probes = 4096;
    int interior_probes = 1024;
    int shell_probes = 1024;
    std::uint64_t seed = 0;
};

struct BuildResult {
    MapState state;
    Schedule schedule;  // with T filled in
    std::vector<StepDiag> diag;
    double nu_base = 0.0;
    double f0_boundary_min = 0.0;  // min |||F_0|||^(2 beta) over the probes
    double f0_boundary_max = 0.0;
};

// The inductive run: per level select the shell, pick nu, place the layer,
// then audit growth, core smallness and the interior ceiling. Aborts with
// numerical_error if |||F_l|||^(2 beta) reaches sum_k a_l^(2 beta_k) anywhere.
BuildResult run_construction(const BuildInputs& in);

// Capped block functional of the trend analysis, with the cap read as a
// signed power so it stays monotone when the bracket is still negative.
double trend_cap(const TargetSignature& tsig, const Schedule& s, int k, int ell);

}  // namespace pemap

#endif
