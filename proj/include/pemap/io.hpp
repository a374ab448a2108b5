#ifndef PEMAP_IO_HPP
#define PEMAP_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pemap/builder.hpp"
#include "pemap/types.hpp"

#include "json.hpp"

namespace pemap {

// Flat key = value run configuration. Unknown keys are rejected so typos
// surface as configuration errors.
struct RunConfig {
    std::vector<int> m{1, 1};
    std::vector<int> alpha{2};
    std::vector<int> n{2, 2, 2};
    std::vector<int> beta{2, 2};
    int p = -1;  // -1: default M_{s+1} + 1
    int L = 20;
    std::uint64_t seed = 42;
    double eps0 = 0.01;
    double iota = 5e-5;
    int density = 4096;
    int probes = 4096;
    double eta = 0.01;
    double tail_tol = 1e-9;
    double boundary_tol = 1e-10;
    double root_tol = 1e-12;
    std::string out = "out";

    bool operator==(const RunConfig&) const = default;

    std::string emit() const;
    static RunConfig parse_text(const std::string& text);
    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;

    SourceSignature source() const { return SourceSignature(m, alpha); }
    TargetSignature target() const {
        const SourceSignature s(m, alpha);
        return TargetSignature(n, beta, p < 0 ? s.dim() + 1 : p);
    }
};

std::string fmt17(double x);

nlohmann::json vector_to_json(const BlockedVector& v);
BlockedVector vector_from_json(const nlohmann::json& j);

nlohmann::json net_to_json(const BoundaryNet& net);
BoundaryNet net_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const MapState& state, const EstimateConstants& consts,
                                  const Schedule& sched, double nu_base);

struct Checkpoint {
    MapState state;
    EstimateConstants consts;
    Schedule schedule;
    double nu_base = 0.0;
};

Checkpoint checkpoint_from_json(const nlohmann::json& j);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// CSV with a fixed header; cells are preformatted strings.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace pemap

#endif
