#include "doctest.h"

#include <filesystem>

#include "pemap/driver.hpp"
#include "pemap/io.hpp"

using namespace pemap;

TEST_CASE("config round trip") {
    RunConfig c;
    c.m = {1, 2, 1};
    c.alpha = {2, 3};
    c.n = {3, 2, 2};
    c.beta = {2, 1};
    c.p = 5;
    c.L = 7;
    c.seed = 987654321;
    c.eps0 = 0.004;
    c.iota = 1.25e-4;
    c.density = 1000;
    c.probes = 500;
    c.eta = 0.02;
    c.out = "elsewhere";
    const RunConfig back = RunConfig::parse_text(c.emit());
    CHECK(back == c);

    CHECK_THROWS_AS(RunConfig::parse_text("bogus_key = 3\n"), config_error);
    CHECK_THROWS_AS(RunConfig::parse_text("no equals sign\n"), config_error);

    // comments and blank lines are fine
    const RunConfig d = RunConfig::parse_text("# comment\n\nL = 3 # trailing\n");
    CHECK(d.L == 3);
}

TEST_CASE("signature validation from config") {
    RunConfig c;
    c.beta = {3, 3};  // violates max beta < t + 1
    CHECK_THROWS_AS(c.target(), config_error);
    RunConfig c2;
    c2.n = {1, 2, 2};
    CHECK_THROWS_AS(c2.target(), config_error);
    RunConfig c3;
    c3.alpha = {1};
    CHECK_THROWS_AS(c3.source(), config_error);
    RunConfig ok;
    CHECK(ok.target().p == 3);  // default p = M+1
    CHECK(ok.target().total_components() == 15);
}

TEST_CASE("checkpoint round trip") {
    RunConfig cfg;
    cfg.L = 3;
    cfg.probes = 256;
    cfg.density = 512;
    const Experiment ex = prepare_experiment(cfg);
    const BuildResult res = build_pipeline(ex);

    const nlohmann::json j = checkpoint_to_json(res.state, ex.consts, res.schedule, res.nu_base);
    const Checkpoint cp = checkpoint_from_json(j);
    CHECK(cp.state.layers.size() == res.state.layers.size());
    CHECK(cp.nu_base == res.nu_base);
    CHECK(cp.schedule.L == res.schedule.L);

    // reloaded state evaluates identically
    RandomStream rs = RandomStream::derive(1, "roundtrip");
    for (int i = 0; i < 16; ++i) {
        BlockedVector Z = sample_boundary_point(ex.sig, rs);
        for (cx& z : Z) z *= 0.7;
        CHECK(cp.state.norm_beta_of(Z) == res.state.norm_beta_of(Z));
    }

    // serialization itself is stable
    CHECK(j.dump() ==
          checkpoint_to_json(res.state, ex.consts, res.schedule, res.nu_base).dump());
}

TEST_CASE("vector serialization") {
    const BlockedVector v{cx(1.5, -2.25), cx(0, 3e-17)};
    const BlockedVector back = vector_from_json(vector_to_json(v));
    REQUIRE(back.size() == v.size());
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == v[i]);
}

TEST_CASE("csv writer") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "pemap_test.csv").string();
    write_csv(path, {"a", "b"}, {{"1", fmt17(0.5)}, {"2", fmt17(1e-17)}});
    const std::string body = read_text_file(path);
    CHECK(body == "a,b\n1,0.5\n2,1.0000000000000001e-17\n");
    std::filesystem::remove(path);
}

TEST_CASE("experiment preparation") {
    RunConfig cfg;
    cfg.probes = 512;
    cfg.density = 512;
    const Experiment ex = prepare_experiment(cfg);
    CHECK(ex.consts.A1 > 0.0);
    CHECK(ex.consts.A1 < ex.consts.A2);
    CHECK(ex.consts.B1 == doctest::Approx(0.111803).epsilon(1e-5));
    CHECK(ex.consts.B2 == doctest::Approx(0.353553).epsilon(1e-5));
    CHECK(ex.consts.r == doctest::Approx(0.5));
    CHECK(ex.consts.lambda > 1.0);
    CHECK(ex.consts.nu > 0.0);
    CHECK(ex.net.points.size() == 6);
    CHECK(ex.consts.r0 >= ex.net.max_pair_dist);

    // constants serialize losslessly
    const EstimateConstants c2 = EstimateConstants::from_json(ex.consts.to_json());
    CHECK(c2.A1 == ex.consts.A1);
    CHECK(c2.nu == ex.consts.nu);
    CHECK(c2.aabb_satisfied == ex.consts.aabb_satisfied);
}
