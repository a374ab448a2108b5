#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pemap/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pemap: proper holomorphic mappings between pseudoellipsoids"};
    app.require_subcommand(1);

    std::string config_path;
    std::string checkpoint_path;
    std::string mode = "radial";
    std::string out_override;
    std::uint64_t seed_override = 0;
    bool have_seed = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_override, "output directory override");
        sub->add_option("--seed", seed_override, "seed override")->each([&](const std::string&) {
            have_seed = true;
        });
    };

    CLI::App* audit = app.add_subcommand("audit", "run the estimate audits");
    add_common(audit);
    CLI::App* build = app.add_subcommand("build", "run the construction and checkpoint it");
    add_common(build);
    CLI::App* trace = app.add_subcommand("trace", "trace a built mapping");
    add_common(trace);
    trace->add_option("--checkpoint", checkpoint_path, "checkpoint to evaluate");
    trace->add_option("--mode", mode, "radial | nonextend | conjugate")
        ->check(CLI::IsMember({"radial", "nonextend", "conjugate"}));

    CLI11_PARSE(app, argc, argv);

    try {
        pemap::RunConfig cfg = pemap::RunConfig::load(config_path);
        if (!out_override.empty()) cfg.out = out_override;
        if (have_seed) cfg.seed = seed_override;

        if (app.got_subcommand(audit)) return pemap::cmd_audit(cfg, std::cout);
        if (app.got_subcommand(build)) return pemap::cmd_build(cfg, std::cout);
        if (app.got_subcommand(trace)) {
            if (mode != "conjugate" && checkpoint_path.empty()) {
                std::cerr << "trace: --checkpoint is required for mode " << mode << "\n";
                return 2;
            }
            return pemap::cmd_trace(cfg, checkpoint_path, mode, std::cout);
        }
    } catch (const pemap::config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
