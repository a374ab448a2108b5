#ifndef PEMAP_ANALYSIS_HPP
#define PEMAP_ANALYSIS_HPP

#include <vector>

#include "pemap/builder.hpp"
#include "pemap/types.hpp"

#include "json.hpp"

namespace pemap {

// ||F+G+H||^(2a) <= ||F||^(2a) + sum_{|mu|=2a, mu1 != 2a} (2a)!/mu! ||G||^mu2 ||H||^mu3,
// valid for ||F|| <= 1 (the mu1-powers of ||F|| are dropped from the sum).
struct MultinomialCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

MultinomialCheck multinomial_bound_check(const std::vector<cx>& F, const std::vector<cx>& G,
                                         const std::vector<cx>& H, int alpha);

// sum over |mu| = 2a, mu1 != 2a of (2a)!/mu! x^mu1 y^mu2 z^mu3, by explicit
// enumeration; equals (x+y+z)^(2a) - x^(2a).
double trinomial_tail_enumerated(double x, double y, double z, int alpha);
double trinomial_tail_closed(double x, double y, double z, int alpha);

// Monotone climb of the capped block functional u_l over a probe set.
struct TrendReport {
    int L = 0;
    std::vector<double> min_u;        // index l = 1..L (index 0 unused)
    std::vector<double> max_u;
    std::vector<double> gap;          // 1 - min_u
    std::vector<int> cap_branch;      // probes*blocks on the capped branch
    long long violations = 0;          // per-probe decreases beyond the slack
    double worst_dip = 0.0;
    bool min_u_strictly_increasing_from_5 = true;
    int first_non_increase = 0;
    nlohmann::json to_json() const;
};

TrendReport capped_norm_trend(const MapState& state, const Schedule& sched,
                              const std::vector<BlockedVector>& probes, double slack = 1e-9);

// Norm along a ray toward a boundary point.
struct RadialRow {
    double r = 0.0;
    double norm_beta = 0.0;
};
std::vector<RadialRow> radial_trace(const MapState& state, const BlockedVector& boundary_point,
                                    const std::vector<double>& r_grid);

// Boundary-phase witness: along z^1 = r e^(i theta0) the modulus of the last
// component stays continuous while its argument oscillates without settling
// when theta0 = 0.
struct WitnessRow {
    double r = 0.0;
    double arg_last = 0.0;
    double h_sq = 0.0;
};
struct WitnessReport {
    double theta0 = 0.0;
    std::vector<WitnessRow> rows;
    double max_arg_diff = 0.0;   // largest principal arg difference in the tail
    double h_sq_variation = 0.0; // over the same tail
    nlohmann::json to_json() const;
};

WitnessReport nonextend_witness(const MapState& state, double theta0,
                                const std::vector<double>& r_grid, double tail_from = 0.99);

// Residual-layer bound at level ell: the mu-sum over all groups with the
// fresh-layer factor eps_ell^mu2 and the remaining-tail factor
// (2 sum_{j>ell} eps_j)^mu3.
double residual_tail_bound(const TargetSignature& tsig, const Schedule& sched, int ell);

}  // namespace pemap

#endif
