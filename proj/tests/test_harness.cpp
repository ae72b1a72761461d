#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "uavsim/harness.hpp"

using namespace uavsim;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.episodes = 5;
    cfg.replicates = 1;
    cfg.policies = {PolicyKind::Constant, PolicyKind::Random};
    cfg.variants = {StateVariant::Basic};
    cfg.bs_densities_km2 = {5};
    cfg.build_densities_km2 = {500};
    cfg.log_step_episodes = {1, 5};
    cfg.window_lo = 1;
    cfg.window_hi = 5;
    return cfg;
}

}  // namespace

TEST_CASE("cell enumeration") {
    SUBCASE("default grid is 5 legs x 7 policy-variants") {
        ExperimentConfig cfg;
        cfg.replicates = 1;
        auto cells = enumerate_cells(cfg);
        CHECK(cells.size() == 35);  // 5 density legs x (3 baselines + 4 DQN variants)
    }

    SUBCASE("replicates multiply the grid") {
        ExperimentConfig cfg;
        cfg.replicates = 5;
        CHECK(enumerate_cells(cfg).size() == 175);
    }

    SUBCASE("empty policy list is an error") {
        ExperimentConfig cfg;
        cfg.policies.clear();
        CHECK_THROWS_AS(enumerate_cells(cfg), std::invalid_argument);
    }

    SUBCASE("one density varies per leg, the other is held at its median") {
        ExperimentConfig cfg;
        cfg.replicates = 1;
        for (const auto& cell : enumerate_cells(cfg)) {
            bool bs_fixed = cell.bs_density == cfg.bs_density_fixed;
            bool build_fixed = cell.build_density == cfg.build_density_fixed;
            CHECK((bs_fixed || build_fixed));
        }
    }
}

TEST_CASE("seed derivation") {
    // same topology seed across policies in a leg; distinct across legs
    CellSpec constant{5, 500, PolicyKind::Constant, StateVariant::Basic, 0};
    CellSpec dqn{5, 500, PolicyKind::Dqn, StateVariant::Basic, 0};
    CHECK(topology_seed(1, 5, 0) == topology_seed(1, 5, 0));
    CHECK(topology_seed(1, 5, 0) != topology_seed(1, 10, 0));
    CHECK(topology_seed(1, 5, 0) != topology_seed(1, 5, 1));
    CHECK(topology_seed(1, 5, 0) != topology_seed(2, 5, 0));
    CHECK(cell_seed(1, constant) != cell_seed(1, dqn));
}

TEST_CASE("run_cell") {
    ExperimentConfig cfg = small_config();

    SUBCASE("constant cell: all heights 100, finite throughput") {
        CellSpec spec{5, 500, PolicyKind::Constant, StateVariant::Basic, 0};
        auto result = run_cell(cfg, spec);
        CHECK(result.throughput_bits_hz.size() == 5);
        for (double t : result.throughput_bits_hz) {
            CHECK(t >= 0.0);
            CHECK(std::isfinite(t));
        }
        for (double h : result.mean_height_m) CHECK(h == 100.0);
        REQUIRE(result.step_logs.count(1) == 1);
        REQUIRE(result.step_logs.count(5) == 1);
        CHECK(result.step_logs.at(1).size() == 100);
    }

    SUBCASE("re-run is bit-identical") {
        CellSpec spec{5, 500, PolicyKind::Random, StateVariant::Basic, 0};
        auto a = run_cell(cfg, spec);
        auto b = run_cell(cfg, spec);
        CHECK(a.throughput_bits_hz == b.throughput_bits_hz);
        CHECK(a.topo_seed == b.topo_seed);
    }
}

TEST_CASE("sweep and CSV output") {
    ExperimentConfig cfg = small_config();

    SUBCASE("row counts") {
        auto result = sweep(cfg, 1);
        CHECK(result.failures.empty());
        std::istringstream episodes(episodes_csv(result));
        std::string line;
        std::getline(episodes, line);
        CHECK(line ==
              "cell_id,bs_density,build_density,policy,variant,seed,episode,throughput_bits_hz");
        int rows = 0;
        while (std::getline(episodes, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 2 * 5);  // cells x episodes

        std::istringstream steps(steps_csv(result));
        std::getline(steps, line);
        CHECK(line ==
              "cell_id,bs_density,build_density,policy,variant,seed,episode,step,x_m,h_m,action,sinr_db,se_bits_hz");
        rows = 0;
        while (std::getline(steps, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 2 * 2 * 100);  // cells x flagged episodes x steps
    }

    SUBCASE("jobs do not change the bytes") {
        auto a = sweep(cfg, 1);
        auto b = sweep(cfg, 4);
        CHECK(episodes_csv(a) == episodes_csv(b));
        CHECK(steps_csv(a) == steps_csv(b));
        CHECK(summary_csv(a, cfg) == summary_csv(b, cfg));
    }

    SUBCASE("summary means reproduce a hand computation") {
        auto result = sweep(cfg, 1);
        std::istringstream summary(summary_csv(result, cfg));
        std::string line;
        std::getline(summary, line);  // header
        for (const auto& cell : result.cells) {
            REQUIRE(std::getline(summary, line));
            std::vector<std::string> fields;
            std::stringstream ss(line);
            std::string f;
            while (std::getline(ss, f, ',')) fields.push_back(f);
            REQUIRE(fields.size() == 9);
            // mean over the window [1,5] is the mean of all 5 episodes
            double mean = 0;
            for (double t : cell.throughput_bits_hz) mean += t;
            mean /= cell.throughput_bits_hz.size();
            CHECK(std::stod(fields[6]) == doctest::Approx(mean).epsilon(1e-12));
        }
    }
}

TEST_CASE("replay verification") {
    ExperimentConfig cfg = small_config();
    auto result = sweep(cfg, 1);
    std::string steps = steps_csv(result);

    SUBCASE("pristine log verifies") {
        auto check = replay_verify(steps, cfg);
        CHECK(check.ok);
    }

    SUBCASE("tampered SE is caught with its row number") {
        // alter the last field of data row 3
        std::istringstream in(steps);
        std::ostringstream out;
        std::string line;
        int row = -1;  // header first
        while (std::getline(in, line)) {
            if (row == 2) {
                auto p = line.rfind(',');
                line = line.substr(0, p + 1) + "99.5";
            }
            out << line << "\n";
            ++row;
        }
        auto check = replay_verify(out.str(), cfg);
        CHECK(!check.ok);
        CHECK(check.bad_row == 3);
    }
}

TEST_CASE("config JSON round-trip") {
    ExperimentConfig cfg = small_config();
    cfg.master_seed = 42;
    cfg.radio.alpha_nlos = 3.5;
    cfg.agent.learning_rate = 5e-4;
    cfg.episode.k_nearest = 4;

    auto rt = config_from_json(config_to_json(cfg));
    CHECK(rt.master_seed == 42);
    CHECK(rt.episodes == cfg.episodes);
    CHECK(rt.policies == cfg.policies);
    CHECK(rt.radio.alpha_nlos == 3.5);
    CHECK(rt.agent.learning_rate == 5e-4);
    CHECK(rt.episode.k_nearest == 4);
    CHECK(rt.bs_densities_km2 == cfg.bs_densities_km2);
}
