#ifndef PEMAP_DRIVER_HPP
#define PEMAP_DRIVER_HPP

#include <iosfwd>
#include <string>

#include "pemap/analysis.hpp"
#include "pemap/builder.hpp"
#include "pemap/estimates.hpp"
#include "pemap/io.hpp"

namespace pemap {

// Everything deterministic that the subcommands share: signatures, net and
// calibrated constants for a given configuration.
struct Experiment {
    RunConfig cfg;
    SourceSignature sig;
    TargetSignature tsig;
    BoundaryNet net;
    EstimateConstants consts;
    ConjugatePairConfig h_cfg;
};

Experiment prepare_experiment(const RunConfig& cfg);

// Exit codes: 0 clean, 1 violations or failed assertion, 2 unusable
// configuration.
int cmd_audit(const RunConfig& cfg, std::ostream& log);
int cmd_build(const RunConfig& cfg, std::ostream& log);
int cmd_trace(const RunConfig& cfg, const std::string& checkpoint_path, const std::string& mode,
              std::ostream& log);

// The full build pipeline, reused by cmd_build and the acceptance suite.
BuildResult build_pipeline(const Experiment& ex, double* sup_h_sq_out = nullptr);

}  // namespace pemap

#endif
