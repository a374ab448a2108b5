#include "pemap/estimates.hpp"

#include <algorithm>
#include <cmath>

namespace pemap {

using nlohmann::json;

json EstimateConstants::to_json() const {
    json j;
    j["A1"] = A1;
    j["A2"] = A2;
    j["B1"] = B1;
    j["B2"] = B2;
    j["r"] = r;
    j["lambda"] = lambda;
    j["nu"] = nu;
    j["eta"] = eta;
    j["r0"] = r0;
    j["alpha_min"] = alpha_min;
    j["alpha_max"] = alpha_max;
    j["beta_t"] = beta_t;
    j["aabb_satisfied"] = aabb_satisfied;
    j["q_min"] = q_min;
    j["q_max"] = q_max;
    j["calib_seed"] = calib_seed;
    j["calib_samples"] = calib_samples;
    j["nu_source"] = nu_source;
    return j;
}

EstimateConstants EstimateConstants::from_json(const json& j) {
    EstimateConstants c;
    c.A1 = j.at("A1");
    c.A2 = j.at("A2");
    c.B1 = j.at("B1");
    c.B2 = j.at("B2");
    c.r = j.at("r");
    c.lambda = j.at("lambda");
    c.nu = j.at("nu");
    c.eta = j.at("eta");
    c.r0 = j.at("r0");
    c.alpha_min = j.at("alpha_min");
    c.alpha_max = j.at("alpha_max");
    c.beta_t = j.at("beta_t");
    c.aabb_satisfied = j.at("aabb_satisfied");
    c.q_min = j.at("q_min");
    c.q_max = j.at("q_max");
    c.calib_seed = j.at("calib_seed");
    c.calib_samples = j.at("calib_samples");
    c.nu_source = j.at("nu_source");
    return c;
}

std::pair<double, double> bounds_b(const SourceSignature& sig, double t0, int ell) {
    if (t0 <= 0.0 || t0 >= 1.0) throw std::invalid_argument("bounds_b: t0 must lie in (0,1)");
    if (ell < 0 || ell >= sig.s())
        throw std::invalid_argument("bounds_b: need at least one annihilated alpha-block");
    int amin = sig.alpha[0], amax = sig.alpha[0];
    double sum_a2 = 0.0;
    for (int a : sig.alpha) {
        amin = std::min(amin, a);
        amax = std::max(amax, a);
        sum_a2 += static_cast<double>(a) * static_cast<double>(a);
    }
    const double b1 = ipow(t0, 2 * amax - 1) * static_cast<double>(amin) /
                      (ipow(static_cast<double>(sig.s() - ell), amax - 1) * std::sqrt(sum_a2 + 1.0));
    const double b2 = std::sqrt(2.0) * static_cast<double>(amax) * ipow(t0, 2 * amin - 1);
    return {b1, b2};
}

namespace {

// One generic boundary pair and its chord ratio q. Shared by the calibration
// and the A-family audit so both see the same stream.
struct QSample {
    BlockedVector W, Z;
    double d = 0.0;
    double re = 0.0;  // Re<W-Z, N(W)/||N||>
    double q = 0.0;
};

QSample draw_q_sample(const SourceSignature& sig, RandomStream& rs) {
    QSample s;
    for (;;) {
        s.W = sample_boundary_point(sig, rs);
        s.Z = sample_boundary_point(sig, rs);
        s.d = dist(s.W, s.Z);
        if (s.d > 1e-6) break;
    }
    const double nn = std::sqrt(gradient_norm_sq(sig, s.W));
    s.re = inner_wz(sig, s.W, s.Z).real() / nn;
    s.q = s.re / (s.d * s.d);
    return s;
}

}  // namespace

std::pair<double, double> calibrate_a(const SourceSignature& sig, int n_samples,
                                      std::uint64_t seed, double margin, double* raw_min,
                                      double* raw_max) {
    if (n_samples < 1000) throw std::invalid_argument("calibrate_a: need at least 1000 samples");
    RandomStream rs = RandomStream::derive(seed, "calibA");
    double qmin = 1e300, qmax = -1e300;
    for (int i = 0; i < n_samples; ++i) {
        const QSample s = draw_q_sample(sig, rs);
        if (s.q <= 0.0)
            throw calibration_error("calibrate_a: nonpositive chord ratio at a generic pair");
        qmin = std::min(qmin, s.q);
        qmax = std::max(qmax, s.q);
    }
    if (raw_min) *raw_min = qmin;
    if (raw_max) *raw_max = qmax;
    return {(1.0 - margin) * qmin, (1.0 + margin) * qmax};
}

RLambda choose_r_lambda(double A1, double A2, double B1, double B2, int beta_t, int alpha_min,
                        int alpha_max) {
    if (A1 <= 0.0 || A2 <= 0.0 || B1 <= 0.0 || B2 <= 0.0)
        throw std::invalid_argument("choose_r_lambda: constants must be positive");
    const double bt2 = 4.0 * static_cast<double>(beta_t) * static_cast<double>(beta_t);
    const double rhs = std::sqrt(bt2 * A2 / A1);
    RLambda out;
    if (alpha_min == alpha_max) {
        out.r = 0.5;
        out.lambda = std::pow(bt2 * B2 / B1, 1.0 / (2.0 * alpha_max));
        out.aabb_satisfied = out.lambda >= rhs;
        return out;
    }
    for (int j = 1; j <= 60; ++j) {
        const double r = ipow(0.5, j);
        const double lhs =
            std::pow(bt2 * B2 * ipow(r, 2 * (alpha_min - alpha_max)) / B1, 1.0 / (2.0 * alpha_max));
        if (lhs >= rhs) {
            out.r = r;
            out.lambda = lhs;
            out.aabb_satisfied = true;
            return out;
        }
    }
    throw config_error("choose_r_lambda: no dyadic radius satisfies the coupling inequality");
}

double choose_nu(double eta, const EstimateConstants& c) {
    if (eta <= 0.0 || eta >= 1.0) throw std::invalid_argument("choose_nu: eta must lie in (0,1)");
    const double bt2 = static_cast<double>(c.beta_t) * static_cast<double>(c.beta_t);
    return 1.01 * std::log(1.0 / eta) /
           (4.0 * std::min(c.A2, c.B2) * bt2 * ipow(c.r, 2 * c.alpha_min));
}

double far_field_nu(double eta, const EstimateConstants& c, std::string* source) {
    const double nu_b = choose_nu(eta, c);
    const double lr = c.lambda * c.r;
    const double nu_a = 1.01 * std::log(1.0 / eta) / (c.A1 * lr * lr);
    if (source) *source = nu_a > nu_b ? "nondegenerate_branch" : "degenerate_branch";
    return std::max(nu_a, nu_b);
}

PeakFunction make_peak(const SourceSignature& sig, const BlockedVector& W, double nu,
                       const Tolerances& tol) {
    if (std::abs(eval_rho(sig, W)) > tol.boundary)
        throw std::invalid_argument("make_peak: W is not on the boundary");
    PeakFunction p;
    p.W = W;
    p.norm_n = std::sqrt(gradient_norm_sq(sig, W));
    p.unit_normal = gradient_n(sig, W);
    for (cx& z : p.unit_normal) z /= p.norm_n;
    p.nu = nu;
    return p;
}

cx peak_eval(const SourceSignature& sig, const PeakFunction& peak, const BlockedVector& Z,
             bool* clamped, const Tolerances& tol) {
    cx e = -peak.nu * inner_wz(sig, peak.W, Z, tol) / peak.norm_n;
    if (clamped) *clamped = false;
    if (e.real() > 700.0 || e.real() < -700.0) {
        e = cx(std::clamp(e.real(), -700.0, 700.0), e.imag());
        if (clamped) *clamped = true;
    }
    return std::exp(e);
}

json AuditReport::to_json() const {
    json j;
    j["lemma"] = lemma;
    j["n_samples"] = n_samples;
    j["seed"] = seed;
    j["violations"] = violations;
    j["extremes"] = extremes;
    return j;
}

AuditReport audit_chord_bounds(const SourceSignature& sig, const EstimateConstants& c,
                               int n_samples, std::uint64_t seed) {
    AuditReport rep;
    rep.lemma = "chord_bounds_two_sided";
    rep.n_samples = n_samples;
    rep.seed = seed;

    // A-family on the calibration stream.
    RandomStream rs = RandomStream::derive(seed, "calibA");
    double worst_lo = 1e300, worst_hi = -1e300;
    for (int i = 0; i < n_samples; ++i) {
        const QSample s = draw_q_sample(sig, rs);
        const double lo = c.A1 * s.d * s.d;
        const double hi = c.A2 * s.d * s.d;
        worst_lo = std::min(worst_lo, s.re - lo);
        worst_hi = std::max(worst_hi, s.re - hi);
        if (s.re < lo || s.re > hi) {
            rep.violations.push_back(
                {{"kind", "generic"}, {"re", s.re}, {"lo", lo}, {"hi", hi}, {"d", s.d}});
        }
    }
    rep.extremes["generic_min_margin_lo"] = worst_lo;
    rep.extremes["generic_max_margin_hi"] = worst_hi;

    // B-family on exact degenerate partners.
    RandomStream rd = RandomStream::derive(seed, "degenerate");
    double deg_lo = 1e300, deg_hi = -1e300;
    int made = 0;
    while (made < n_samples) {
        BlockedVector W = sample_boundary_point(sig, rd);
        std::vector<int> S;
        for (int k = 0; k < sig.s(); ++k)
            if (sig.block_norm_sq(W, k) > 1e-8 && (sig.s() == 1 || rd.uniform() < 0.5)) S.push_back(k);
        if (S.empty()) continue;
        auto [spec, Z] = degenerate_partner(sig, W, S);
        const double d = dist(W, Z);
        const double nn = std::sqrt(gradient_norm_sq(sig, W));
        const double re = inner_wz(sig, W, Z).real() / nn;
        const double lo = c.B1 * ipow(d, 2 * c.alpha_max);
        const double hi = c.B2 * ipow(d, 2 * c.alpha_min);
        deg_lo = std::min(deg_lo, re - lo);
        deg_hi = std::max(deg_hi, hi - re);
        const double slack = 1e-12 * std::max(1.0, re);
        if (re < lo - slack || re > hi + slack) {
            rep.violations.push_back(
                {{"kind", "degenerate"}, {"re", re}, {"lo", lo}, {"hi", hi}, {"d", d}});
        }
        ++made;
    }
    rep.extremes["degenerate_min_margin_lo"] = deg_lo;
    rep.extremes["degenerate_min_margin_hi"] = deg_hi;
    return rep;
}

AuditReport audit_far_field(const SourceSignature& sig, const EstimateConstants& c,
                            const BoundaryNet& net, int n_samples, std::uint64_t seed) {
    AuditReport rep;
    rep.lemma = "far_field_smallness";
    rep.n_samples = n_samples;
    rep.seed = seed;

    const double lr = c.lambda * c.r;
    std::vector<PeakFunction> peaks;
    for (const auto& W : net.points) peaks.push_back(make_peak(sig, W, c.nu));

    RandomStream rs = RandomStream::derive(seed, "farfield");
    double max_far = 0.0;
    long checked = 0;
    for (int i = 0; i < n_samples; ++i) {
        const BlockedVector Z = sample_boundary_point(sig, rs);
        for (const auto& pk : peaks) {
            if (dist(pk.W, Z) <= lr) continue;
            const double g = std::abs(peak_eval(sig, pk, Z));
            max_far = std::max(max_far, g);
            ++checked;
            if (g >= c.eta)
                rep.violations.push_back({{"kind", "generic"}, {"g", g}, {"d", dist(pk.W, Z)}});
        }
    }
    // Degenerate partners of the net points sit on the worst branch of the
    // estimate; include the ones that land in the far region.
    for (const auto& pk : peaks) {
        std::vector<int> S;
        for (int k = 0; k < sig.s(); ++k)
            if (sig.block_norm_sq(pk.W, k) > 1e-8) S.push_back(k);
        if (S.empty()) continue;
        auto [spec, Z] = degenerate_partner(sig, pk.W, S);
        (void)spec;
        if (dist(pk.W, Z) <= lr) continue;
        const double g = std::abs(peak_eval(sig, pk, Z));
        max_far = std::max(max_far, g);
        ++checked;
        if (g >= c.eta)
            rep.violations.push_back({{"kind", "degenerate"}, {"g", g}, {"d", dist(pk.W, Z)}});
    }
    rep.extremes["max_far_field"] = max_far;
    rep.extremes["pairs_checked"] = checked;
    rep.extremes["eta"] = c.eta;
    return rep;
}

AuditReport audit_dilation_bound(const SourceSignature& sig, double T, int n_samples,
                                 std::uint64_t seed) {
    if (T < 1.0) throw std::invalid_argument("audit_dilation_bound: T must be >= 1");
    AuditReport rep;
    rep.lemma = "dilated_domain_lower_bound";
    rep.n_samples = n_samples;
    rep.seed = seed;
    rep.extremes["T"] = T;

    const double bound = 1.0 - 1.0 / T;
    RandomStream rs = RandomStream::derive(seed, "dilation");
    double min_re = 1e300;
    for (int i = 0; i < n_samples; ++i) {
        const BlockedVector W = sample_boundary_point(sig, rs);
        BlockedVector Z = sample_boundary_point(sig, rs);
        const double cscale = rs.uniform() / T;
        for (cx& z : Z) z *= cscale;
        const double nn = std::sqrt(gradient_norm_sq(sig, W));
        const double re = inner_wz(sig, W, Z).real() / nn;
        min_re = std::min(min_re, re);
        if (re < bound - 1e-9)
            rep.violations.push_back({{"kind", "pair"}, {"re", re}, {"bound", bound}});
    }
    rep.extremes["min_re"] = min_re;

    // Scalar inequality on the simplex x_k = ||w_(k)||^(2 alpha_k), sum <= 1.
    RandomStream rg = RandomStream::derive(seed, "simplex");
    const int s = sig.s();
    double min_ratio = 1e300;
    for (int i = 0; i < n_samples; ++i) {
        std::vector<double> x(static_cast<std::size_t>(s));
        double total = 0.0;
        if (s == 1) {
            x[0] = static_cast<double>(i) / std::max(1, n_samples - 1);
            total = x[0];
        } else {
            for (double& v : x) {
                v = rg.uniform();
                total += v;
            }
            const double scale = rg.uniform() / std::max(total, 1e-300);
            total = 0.0;
            for (double& v : x) {
                v *= scale;
                total += v;
            }
        }
        if (total > 1.0) continue;
        double num = 1.0;
        double den = 1.0;
        for (int k = 0; k < s; ++k) {
            const double a = sig.alpha[static_cast<std::size_t>(k)];
            num += (a - 1.0) * x[static_cast<std::size_t>(k)];
            den += a * a * std::pow(x[static_cast<std::size_t>(k)], (2.0 * a - 1.0) / a) -
                   x[static_cast<std::size_t>(k)];
        }
        const double ratio = num / std::sqrt(den);
        min_ratio = std::min(min_ratio, ratio);
        if (ratio < 1.0 - 1e-9)
            rep.violations.push_back({{"kind", "scalar"}, {"ratio", ratio}});
    }
    rep.extremes["min_scalar_ratio"] = min_ratio;

    // Radial equality case at the last-block unit vector.
    BlockedVector W(static_cast<std::size_t>(sig.dim()), cx(0.0, 0.0));
    W.back() = cx(1.0, 0.0);
    BlockedVector Z = W;
    for (cx& z : Z) z /= T;
    const double re_eq = inner_wz(sig, W, Z).real() / std::sqrt(gradient_norm_sq(sig, W));
    rep.extremes["radial_equality_re"] = re_eq;
    if (std::abs(re_eq - bound) > 1e-12)
        rep.violations.push_back({{"kind", "equality"}, {"re", re_eq}, {"bound", bound}});
    return rep;
}

AuditReport audit_peak_envelope(const SourceSignature& sig, const EstimateConstants& c,
                                const BoundaryNet& net, int n_samples, std::uint64_t seed) {
    AuditReport rep;
    rep.lemma = "peak_modulus_envelope";
    rep.n_samples = n_samples;
    rep.seed = seed;

    std::vector<PeakFunction> peaks;
    for (const auto& W : net.points) peaks.push_back(make_peak(sig, W, c.nu));

    // First pass calibrates the weak-slope constant A' on the stream, the
    // second pass asserts the envelope on the same stream.
    double a_prime = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        RandomStream rs = RandomStream::derive(seed, "envelope");
        for (int i = 0; i < n_samples; ++i) {
            const BlockedVector Z = sample_boundary_point(sig, rs);
            for (const auto& pk : peaks) {
                const double d = dist(pk.W, Z);
                if (d < 1e-9) continue;
                const double re = inner_wz(sig, pk.W, Z).real() / pk.norm_n;
                if (pass == 0) {
                    a_prime = std::max(a_prime, re / ipow(d, 2 * c.alpha_max));
                } else {
                    const double phi = std::abs(peak_eval(sig, pk, Z));
                    const double lo = std::exp(-c.nu * 1.1 * a_prime * ipow(d, 2 * c.alpha_max));
                    const double hi = std::exp(-c.nu * c.A1 * d * d) + 1e-9;
                    if (phi < lo || phi > hi)
                        rep.violations.push_back({{"kind", "envelope"}, {"phi", phi}, {"lo", lo}, {"hi", hi}, {"d", d}});
                }
            }
        }
    }
    rep.extremes["A_prime"] = 1.1 * a_prime;
    rep.extremes["B_prime"] = c.A1;

    // Peak property on the closed domain.
    RandomStream ri = RandomStream::derive(seed, "envelope_interior");
    double max_mod = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        BlockedVector Z = sample_boundary_point(sig, ri);
        const double cscale = ri.uniform();
        for (cx& z : Z) z *= cscale;
        for (const auto& pk : peaks) {
            const double phi = std::abs(peak_eval(sig, pk, Z));
            max_mod = std::max(max_mod, phi);
            if (phi > 1.0 + 1e-12)
                rep.violations.push_back({{"kind", "peak_property"}, {"phi", phi}});
        }
    }
    rep.extremes["max_closed_domain_modulus"] = max_mod;
    return rep;
}

}  // namespace pemap
