#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "uavsim/harness.hpp"

namespace {

using namespace uavsim;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    return config_from_json(read_file(path));
}

int cmd_topology(const std::string& config_path, std::uint64_t seed, double bs_density,
                 double build_density, const std::string& out_path) {
    ExperimentConfig cfg = load_config(config_path);
    CityTopology topo = generate_topology(seed, bs_density, build_density, {cfg.area_side_m},
                                          cfg.building_area_m2, cfg.height_scale_m,
                                          cfg.bs_height_m);
    std::string doc = topology_to_json(topo);
    if (out_path.empty()) {
        std::cout << doc << "\n";
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << doc << "\n";
    }
    std::cerr << topo.bss.size() << " base stations, " << topo.buildings.count()
              << " buildings\n";
    return 0;
}

int cmd_run(ExperimentConfig cfg, const std::string& policy, const std::string& variant,
            double bs_density, double build_density, const std::string& out_dir) {
    cfg.policies = {policy_from_string(policy)};
    cfg.variants = {variant_from_string(variant)};
    cfg.bs_densities_km2 = {bs_density};
    cfg.build_densities_km2 = {};
    cfg.build_density_fixed = build_density;
    cfg.replicates = 1;

    SweepResult result = sweep(cfg, 1);
    write_outputs(result, cfg, out_dir);
    if (!result.failures.empty()) {
        for (const auto& f : result.failures) std::cerr << "failed: " << f << "\n";
        return 2;
    }
    std::cerr << "wrote " << out_dir << "/episodes.csv (" << cfg.episodes << " episodes)\n";
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
    SweepResult result = sweep(cfg, jobs);
    write_outputs(result, cfg, out_dir);
    for (const auto& f : result.failures) std::cerr << "failed: " << f << "\n";
    std::cerr << result.cells.size() - result.failures.size() << "/" << result.cells.size()
              << " cells completed -> " << out_dir << "\n";
    return result.failures.empty() ? 0 : 2;
}

int cmd_replay(const ExperimentConfig& cfg, const std::string& steps_path) {
    ReplayCheck check = replay_verify(read_file(steps_path), cfg);
    if (!check.ok) {
        std::cerr << "replay mismatch: " << check.message << "\n";
        return 2;
    }
    std::cerr << "replay ok: all logged spectral efficiencies reproduced\n";
    return 0;
}

int cmd_gradcheck(std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int inst = 0; inst < 10; ++inst) {
        QNetwork net = QNetwork::init({5, 16, 16, 3}, rng);
        QNetwork target;
        sync_target(net, target);
        std::vector<Transition> batch(8);
        std::vector<const Transition*> ptrs;
        for (auto& tr : batch) {
            tr.state.resize(5);
            tr.next_state.resize(5);
            for (auto& v : tr.state) v = rng.uniform(-1, 1);
            for (auto& v : tr.next_state) v = rng.uniform(-1, 1);
            tr.action = rng.uniform_int(3);
            tr.reward = rng.uniform(-1, 1);
            tr.done = rng.uniform() < 0.2;
            ptrs.push_back(&tr);
        }
        auto [loss, grads] = td_loss_and_grads(net, target, ptrs, 0.95);
        (void)loss;
        const double h = 1e-6;
        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            for (std::size_t k = 0; k < net.weights[l].size(); k += 37) {
                double saved = net.weights[l][k];
                net.weights[l][k] = saved + h;
                double lp = td_loss_and_grads(net, target, ptrs, 0.95).first;
                net.weights[l][k] = saved - h;
                double lm = td_loss_and_grads(net, target, ptrs, 0.95).first;
                net.weights[l][k] = saved;
                double fd = (lp - lm) / (2 * h);
                double g = grads.d_weights[l][k];
                double rel = std::abs(fd - g) / std::max({std::abs(fd), std::abs(g), 1e-8});
                worst = std::max(worst, rel);
            }
        }
    }
    std::printf("gradcheck max relative error: %.3e\n", worst);
    return worst <= 1e-4 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cellular-connected UAV height adaptation simulator"};
    app.require_subcommand(1);

    std::string config_path, out = "out", policy = "constant", variant = "basic";
    std::string steps_path, topo_out;
    std::uint64_t seed = 1;
    double bs_density = 5, build_density = 500;
    int jobs = 1, episodes = -1;

    auto* topo = app.add_subcommand("topology", "Generate a city topology and export it as JSON");
    topo->add_option("--config", config_path);
    topo->add_option("--seed", seed);
    topo->add_option("--bs-density", bs_density);
    topo->add_option("--build-density", build_density);
    topo->add_option("--out", topo_out);

    auto* run = app.add_subcommand("run", "Run a single experiment cell");
    run->add_option("--config", config_path);
    run->add_option("--seed", seed);
    run->add_option("--policy", policy);
    run->add_option("--variant", variant);
    run->add_option("--bs-density", bs_density);
    run->add_option("--build-density", build_density);
    run->add_option("--episodes", episodes);
    run->add_option("--out", out);

    auto* sw = app.add_subcommand("sweep", "Run the full density sweep grid");
    sw->add_option("--config", config_path);
    sw->add_option("--seed", seed);
    sw->add_option("--episodes", episodes);
    sw->add_option("--jobs", jobs);
    sw->add_option("--out", out);

    auto* rp = app.add_subcommand("replay", "Recompute spectral efficiency from a steps.csv");
    rp->add_option("--config", config_path);
    rp->add_option("--steps", steps_path)->required();

    auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of the TD-loss gradients");
    gc->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (topo->parsed()) return cmd_topology(config_path, seed, bs_density, build_density, topo_out);
        ExperimentConfig cfg = load_config(config_path);
        if (run->count("--seed") || sw->count("--seed")) cfg.master_seed = seed;
        if (episodes > 0) {
            cfg.episodes = episodes;
            cfg.log_step_episodes = {1, episodes};
            cfg.window_lo = std::max(1, episodes - 50);
            cfg.window_hi = episodes;
        }
        if (run->parsed()) return cmd_run(cfg, policy, variant, bs_density, build_density, out);
        if (sw->parsed()) return cmd_sweep(cfg, out, jobs);
        if (rp->parsed()) return cmd_replay(cfg, steps_path);
        if (gc->parsed()) return cmd_gradcheck(seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
