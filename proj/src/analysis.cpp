#include "pemap/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace pemap {

using nlohmann::json;

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

}  // namespace

MultinomialCheck multinomial_bound_check(const std::vector<cx>& F, const std::vector<cx>& G,
                                         const std::vector<cx>& H, int alpha) {
    if (alpha < 1 || alpha > 3)
        throw std::invalid_argument("multinomial_bound_check: alpha must be 1, 2 or 3");
    if (F.size() != G.size() || F.size() != H.size())
        throw std::invalid_argument("multinomial_bound_check: dimension mismatch");
    const double nf = std::sqrt(norm_sq(F));
    if (nf > 1.0 + 1e-12)
        throw std::invalid_argument("multinomial_bound_check: requires ||F|| <= 1");
    const double ng = std::sqrt(norm_sq(G));
    const double nh = std::sqrt(norm_sq(H));

    std::vector<cx> sum(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) sum[i] = F[i] + G[i] + H[i];

    MultinomialCheck out;
    out.lhs = ipow(norm_sq(sum), alpha);
    double rhs = ipow(nf * nf, alpha);
    const int d = 2 * alpha;
    const double fd = factorial(d);
    for (int m1 = 0; m1 <= d; ++m1) {
        if (m1 == d) continue;
        for (int m2 = 0; m2 <= d - m1; ++m2) {
            const int m3 = d - m1 - m2;
            rhs += fd / (factorial(m1) * factorial(m2) * factorial(m3)) * ipow(ng, m2) * ipow(nh, m3);
        }
    }
    out.rhs = rhs;
    out.pass = out.lhs <= out.rhs + 1e-12;
    return out;
}

double trinomial_tail_enumerated(double x, double y, double z, int alpha) {
    const int d = 2 * alpha;
    const double fd = factorial(d);
    double s = 0.0;
    for (int m1 = 0; m1 <= d; ++m1) {
        if (m1 == d) continue;
        for (int m2 = 0; m2 <= d - m1; ++m2) {
            const int m3 = d - m1 - m2;
            s += fd / (factorial(m1) * factorial(m2) * factorial(m3)) * ipow(x, m1) * ipow(y, m2) *
                 ipow(z, m3);
        }
    }
    return s;
}

double trinomial_tail_closed(double x, double y, double z, int alpha) {
    return ipow(x + y + z, 2 * alpha) - ipow(x, 2 * alpha);
}

json TrendReport::to_json() const {
    json j;
    j["L"] = L;
    j["min_u"] = min_u;
    j["max_u"] = max_u;
    j["gap"] = gap;
    j["cap_branch"] = cap_branch;
    j["violations"] = violations;
    j["worst_dip"] = worst_dip;
    j["min_u_strictly_increasing_from_5"] = min_u_strictly_increasing_from_5;
    j["first_non_increase"] = first_non_increase;
    return j;
}

TrendReport capped_norm_trend(const MapState& state, const Schedule& sched,
                              const std::vector<BlockedVector>& probes, double slack) {
    const TargetSignature& tsig = state.tsig;
    const int L = static_cast<int>(state.layers.size());
    const int t = tsig.t();

    TrendReport rep;
    rep.L = L;
    rep.min_u.assign(static_cast<std::size_t>(L) + 1, 0.0);
    rep.max_u.assign(static_cast<std::size_t>(L) + 1, 0.0);
    rep.gap.assign(static_cast<std::size_t>(L) + 1, 0.0);
    rep.cap_branch.assign(static_cast<std::size_t>(L) + 1, 0);

    ProbeBank bank;
    bank.init(state, probes);

    std::vector<double> u_prev(probes.size(), 0.0);
    for (int ell = 1; ell <= L; ++ell) {
        bank.add_layer(state, state.layers[static_cast<std::size_t>(ell - 1)]);
        double mn = 1e300, mx = -1e300;
        int capped = 0;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            double u = 0.0;
            for (int k = 0; k <= t; ++k) {
                const double cap = trend_cap(tsig, sched, k, ell);
                for (int twin = 0; twin < 2; ++twin) {
                    const double nb =
                        ipow(bank.block_norm_sq(tsig, static_cast<int>(i), k, twin == 1),
                             tsig.beta_k(k));
                    if (cap < nb) {
                        u += cap;
                        ++capped;
                    } else {
                        u += nb;
                    }
                }
            }
            if (ell > 1) {
                const double dip = u_prev[i] - u;
                if (dip > rep.worst_dip) rep.worst_dip = dip;
                if (dip > slack) ++rep.violations;
            }
            u_prev[i] = u;
            mn = std::min(mn, u);
            mx = std::max(mx, u);
        }
        rep.min_u[static_cast<std::size_t>(ell)] = mn;
        rep.max_u[static_cast<std::size_t>(ell)] = mx;
        rep.gap[static_cast<std::size_t>(ell)] = 1.0 - mn;
        rep.cap_branch[static_cast<std::size_t>(ell)] = capped;
    }
    for (int ell = 5; ell < L; ++ell) {
        if (!(rep.min_u[static_cast<std::size_t>(ell + 1)] > rep.min_u[static_cast<std::size_t>(ell)])) {
            rep.min_u_strictly_increasing_from_5 = false;
            if (rep.first_non_increase == 0) rep.first_non_increase = ell + 1;
        }
    }
    return rep;
}

std::vector<RadialRow> radial_trace(const MapState& state, const BlockedVector& boundary_point,
                                    const std::vector<double>& r_grid) {
    std::vector<RadialRow> rows;
    for (double r : r_grid) {
        if (r < 0.0 || r >= 1.0)
            throw std::invalid_argument("radial_trace: radii must lie in [0, 1)");
        BlockedVector Z = boundary_point;
        for (cx& z : Z) z *= r;
        rows.push_back({r, state.norm_beta_of(Z)});
    }
    return rows;
}

json WitnessReport::to_json() const {
    json j;
    j["theta0"] = theta0;
    j["max_arg_diff"] = max_arg_diff;
    j["h_sq_variation"] = h_sq_variation;
    json rws = json::array();
    for (const auto& r : rows) rws.push_back({{"r", r.r}, {"arg_last", r.arg_last}, {"h_sq", r.h_sq}});
    j["rows"] = rws;
    return j;
}

WitnessReport nonextend_witness(const MapState& state, double theta0,
                                const std::vector<double>& r_grid, double tail_from) {
    WitnessReport rep;
    rep.theta0 = theta0;

    // Ray through the first-coordinate disc: z^1 = r e^(i theta0), the other
    // coordinates zero. Its endpoint is the boundary point (e^(i theta0), 0).
    const int dim = state.sig.dim();
    const cx dir = std::exp(cx(0.0, theta0));
    for (double r : r_grid) {
        if (r <= 0.0 || r >= 1.0)
            throw std::invalid_argument("nonextend_witness: radii must lie in (0,1)");
        BlockedVector Z(static_cast<std::size_t>(dim), cx{0.0, 0.0});
        Z[0] = r * dir;
        const std::vector<cx> FV = state.eval(Z);
        const cx last = FV.back();
        if (std::abs(last) <= 0.0)
            throw numerical_error("nonextend_witness: last component vanished on the ray");
        double hsq = 0.0;
        for (int i = state.tsig.num_indices(); i < state.tsig.total_components(); ++i)
            hsq += std::norm(FV[static_cast<std::size_t>(i)]);
        rep.rows.push_back({r, std::arg(last), hsq});
    }

    double hmin = 1e300, hmax = -1e300;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        if (rep.rows[i].r < tail_from) continue;
        hmin = std::min(hmin, rep.rows[i].h_sq);
        hmax = std::max(hmax, rep.rows[i].h_sq);
        for (std::size_t j = i + 1; j < rep.rows.size(); ++j) {
            if (rep.rows[j].r < tail_from) continue;
            double d = std::remainder(rep.rows[j].arg_last - rep.rows[i].arg_last,
                                      6.283185307179586476925286766559);
            rep.max_arg_diff = std::max(rep.max_arg_diff, std::abs(d));
        }
    }
    rep.h_sq_variation = (hmax >= hmin) ? hmax - hmin : 0.0;
    return rep;
}

double residual_tail_bound(const TargetSignature& tsig, const Schedule& sched, int ell) {
    if (ell < 1 || ell > sched.L)
        throw std::invalid_argument("residual_tail_bound: level out of range");
    // Remaining perturbation mass past ell (within and beyond the horizon):
    // sum_{j>ell} eps_j = eps0 * zeta-tail. Reuse delta = 2 eps0 tail.
    const double S = 0.5 * sched.delta[static_cast<std::size_t>(ell)];
    const double eps = sched.eps[static_cast<std::size_t>(ell)];
    double total = 0.0;
    for (int k = 0; k <= tsig.t(); ++k) {
        const int d = 2 * tsig.beta_k(k);
        const double fd = [&] {
            double f = 1.0;
            for (int i = 2; i <= d; ++i) f *= static_cast<double>(i);
            return f;
        }();
        auto fact = [](int n) {
            double f = 1.0;
            for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
            return f;
        };
        for (int m1 = 0; m1 <= d; ++m1) {
            if (m1 == d) continue;
            for (int m2 = 0; m2 <= d - m1; ++m2) {
                const int m3 = d - m1 - m2;
                const double coeff = fd / (fact(m1) * fact(m2) * fact(m3));
                if (m2 == 0) {
                    total += coeff * ipow(2.0 * S, m3);
                } else {
                    total += coeff * 2.0 * ipow(eps, m2);
                }
            }
        }
    }
    return total;
}

}  // namespace pemap
