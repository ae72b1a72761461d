#include "uavsim/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace uavsim {

namespace {

constexpr const char* kVersion = "uavsim 0.1.0";

std::vector<std::pair<double, double>> density_legs(const ExperimentConfig& config) {
    std::vector<std::pair<double, double>> legs;
    auto add = [&](double bs, double build) {
        for (const auto& l : legs)
            if (l.first == bs && l.second == build) return;
        legs.emplace_back(bs, build);
    };
    for (double bs : config.bs_densities_km2) add(bs, config.build_density_fixed);
    for (double build : config.build_densities_km2) add(config.bs_density_fixed, build);
    return legs;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

double mean_of(const std::vector<double>& v, int lo, int hi) {  // 1-based inclusive
    double sum = 0;
    int n = 0;
    for (int i = lo; i <= hi && i <= static_cast<int>(v.size()); ++i) {
        sum += v[i - 1];
        ++n;
    }
    return n ? sum / n : 0.0;
}

double sd_of(const std::vector<double>& v, int lo, int hi) {
    double m = mean_of(v, lo, hi);
    double acc = 0;
    int n = 0;
    for (int i = lo; i <= hi && i <= static_cast<int>(v.size()); ++i) {
        acc += (v[i - 1] - m) * (v[i - 1] - m);
        ++n;
    }
    return n > 1 ? std::sqrt(acc / (n - 1)) : 0.0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    return fields;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string CellSpec::id() const {
    std::string vid = policy == PolicyKind::Dqn ? to_string(variant) : "-";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "bs%g_bld%g_%s_%s_r%d", bs_density, build_density,
                  to_string(policy).c_str(), vid.c_str(), replicate);
    return buf;
}

std::uint64_t topology_seed(std::uint64_t master_seed, double bs_density, int replicate) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "topo/bs=%.17g/rep=%d", bs_density, replicate);
    return derive_seed(master_seed, buf);
}

std::uint64_t cell_seed(std::uint64_t master_seed, const CellSpec& spec) {
    return derive_seed(master_seed, "cell/" + spec.id());
}

std::vector<CellSpec> enumerate_cells(const ExperimentConfig& config) {
    if (config.policies.empty()) throw std::invalid_argument("nothing to run: no policies");
    std::vector<CellSpec> cells;
    for (const auto& [bs, build] : density_legs(config)) {
        for (int rep = 0; rep < config.replicates; ++rep) {
            for (PolicyKind policy : config.policies) {
                if (policy == PolicyKind::Dqn) {
                    for (StateVariant variant : config.variants)
                        cells.push_back({bs, build, policy, variant, rep});
                } else {
                    cells.push_back({bs, build, policy, StateVariant::Basic, rep});
                }
            }
        }
    }
    return cells;
}

CellResult run_cell(const ExperimentConfig& config, const CellSpec& spec) {
    CellResult result;
    result.spec = spec;
    result.topo_seed = topology_seed(config.master_seed, spec.bs_density, spec.replicate);

    CityTopology topo = generate_topology(result.topo_seed, spec.bs_density, spec.build_density,
                                          {config.area_side_m}, config.building_area_m2,
                                          config.height_scale_m, config.bs_height_m);

    std::uint64_t cs = cell_seed(config.master_seed, spec);
    CellRngs rngs{Rng(derive_seed(cs, "explore")), Rng(derive_seed(cs, "replay")),
                  Rng(derive_seed(cs, "env"))};

    Policy policy;
    policy.kind = spec.policy;
    policy.variant = spec.variant;
    if (spec.policy == PolicyKind::Dqn) {
        Rng init_rng(derive_seed(cs, "net-init"));
        policy.agent = std::make_unique<DqnAgent>(observation_size(spec.variant, config.episode),
                                                  config.agent, init_rng);
    }

    result.throughput_bits_hz.reserve(config.episodes);
    result.mean_height_m.reserve(config.episodes);
    for (int ep = 1; ep <= config.episodes; ++ep) {
        EpisodeLog log = run_episode(policy, topo, config.radio, config.episode, rngs);
        result.throughput_bits_hz.push_back(log.throughput_bits_hz);
        double h_sum = 0;
        for (const auto& s : log.steps) h_sum += s.h_m;
        result.mean_height_m.push_back(log.steps.empty() ? 0.0 : h_sum / log.steps.size());
        for (int flagged : config.log_step_episodes)
            if (ep == flagged) result.step_logs[ep] = log.steps;
    }
    return result;
}

SweepResult sweep(const ExperimentConfig& config, int jobs) {
    std::vector<CellSpec> cells = enumerate_cells(config);
    if (jobs < 1) jobs = 1;

    SweepResult result;
    result.cells.resize(cells.size());
    std::vector<std::string> failures(cells.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            try {
                result.cells[i] = run_cell(config, cells[i]);
            } catch (const std::exception& e) {
                result.cells[i].spec = cells[i];
                failures[i] = cells[i].id() + ": " + e.what();
            }
        }
    };

    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (auto& f : failures)
        if (!f.empty()) result.failures.push_back(std::move(f));
    return result;
}

namespace {

void append_cell_prefix(std::string& out, const CellResult& cell) {
    out += cell.spec.id();
    out += ',';
    out += format_double(cell.spec.bs_density);
    out += ',';
    out += format_double(cell.spec.build_density);
    out += ',';
    out += to_string(cell.spec.policy);
    out += ',';
    out += cell.spec.policy == PolicyKind::Dqn ? to_string(cell.spec.variant) : "-";
    out += ',';
    out += std::to_string(cell.topo_seed);
}

}  // namespace

std::string episodes_csv(const SweepResult& result) {
    std::string out = "cell_id,bs_density,build_density,policy,variant,seed,episode,throughput_bits_hz\n";
    for (const auto& cell : result.cells) {
        for (std::size_t ep = 0; ep < cell.throughput_bits_hz.size(); ++ep) {
            append_cell_prefix(out, cell);
            out += ',';
            out += std::to_string(ep + 1);
            out += ',';
            out += format_double(cell.throughput_bits_hz[ep]);
            out += '\n';
        }
    }
    return out;
}

std::string steps_csv(const SweepResult& result) {
    std::string out =
        "cell_id,bs_density,build_density,policy,variant,seed,episode,step,x_m,h_m,action,sinr_db,se_bits_hz\n";
    for (const auto& cell : result.cells) {
        for (const auto& [ep, steps] : cell.step_logs) {
            for (const auto& s : steps) {
                append_cell_prefix(out, cell);
                out += ',';
                out += std::to_string(ep);
                out += ',';
                out += std::to_string(s.step);
                out += ',';
                out += format_double(s.x_m);
                out += ',';
                out += format_double(s.h_m);
                out += ',';
                out += std::to_string(s.action);
                out += ',';
                out += format_double(s.sinr_db);
                out += ',';
                out += format_double(s.se_bits_hz);
                out += '\n';
            }
        }
    }
    return out;
}

std::string summary_csv(const SweepResult& result, const ExperimentConfig& config) {
    std::string out =
        "cell_id,bs_density,build_density,policy,variant,seed,mean_throughput_bits_hz,sd_throughput_bits_hz,mean_height_m\n";
    for (const auto& cell : result.cells) {
        append_cell_prefix(out, cell);
        out += ',';
        out += format_double(mean_of(cell.throughput_bits_hz, config.window_lo, config.window_hi));
        out += ',';
        out += format_double(sd_of(cell.throughput_bits_hz, config.window_lo, config.window_hi));
        out += ',';
        out += format_double(mean_of(cell.mean_height_m, config.window_lo, config.window_hi));
        out += '\n';
    }
    return out;
}

void write_outputs(const SweepResult& result, const ExperimentConfig& config,
                   const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::filesystem::path dir(out_dir);
    write_file(dir / "episodes.csv", episodes_csv(result));
    write_file(dir / "steps.csv", steps_csv(result));
    write_file(dir / "summary.csv", summary_csv(result, config));

    nlohmann::json manifest;
    manifest["version"] = kVersion;
    manifest["config"] = nlohmann::json::parse(config_to_json(config));
    auto& cells = manifest["cells"] = nlohmann::json::array();
    for (const auto& cell : result.cells)
        cells.push_back({{"id", cell.spec.id()},
                         {"topology_seed", cell.topo_seed},
                         {"cell_seed", cell_seed(config.master_seed, cell.spec)}});
    manifest["failures"] = result.failures;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

ReplayCheck replay_verify(const std::string& steps_csv_text, const ExperimentConfig& config) {
    ReplayCheck check;
    std::istringstream in(steps_csv_text);
    std::string line;
    if (!std::getline(in, line)) {
        return {false, -1, "empty steps.csv"};
    }

    std::map<std::string, CityTopology> topo_cache;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 13) return {false, row, "malformed row (expected 13 fields)"};

        double bs_density = std::stod(f[1]);
        double build_density = std::stod(f[2]);
        std::uint64_t seed = std::stoull(f[5]);
        double x = std::stod(f[8]);
        double h = std::stod(f[9]);
        double logged_se = std::stod(f[12]);

        std::string key = f[1] + "/" + f[2] + "/" + f[5];
        auto it = topo_cache.find(key);
        if (it == topo_cache.end()) {
            it = topo_cache
                     .emplace(key, generate_topology(seed, bs_density, build_density,
                                                     {config.area_side_m}, config.building_area_m2,
                                                     config.height_scale_m, config.bs_height_m))
                     .first;
        }
        const CityTopology& topo = it->second;
        int serving = nearest_bs(topo, x, 0.0);
        double se = spectral_efficiency(sinr(topo, Point3{x, 0.0, h}, serving, config.radio));
        double tol = 1e-9 * std::max(1.0, std::abs(logged_se));
        if (!(std::abs(se - logged_se) <= tol)) {
            char msg[160];
            std::snprintf(msg, sizeof(msg),
                          "row %ld (%s): recomputed se %.17g != logged %.17g", row,
                          f[0].c_str(), se, logged_se);
            return {false, row, msg};
        }
    }
    return check;
}

std::string config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["bs_densities_km2"] = c.bs_densities_km2;
    j["build_densities_km2"] = c.build_densities_km2;
    j["bs_density_fixed"] = c.bs_density_fixed;
    j["build_density_fixed"] = c.build_density_fixed;
    j["episodes"] = c.episodes;
    std::vector<std::string> policies;
    for (auto p : c.policies) policies.push_back(to_string(p));
    j["policies"] = policies;
    std::vector<std::string> variants;
    for (auto v : c.variants) variants.push_back(to_string(v));
    j["variants"] = variants;
    j["master_seed"] = c.master_seed;
    j["replicates"] = c.replicates;
    j["window_lo"] = c.window_lo;
    j["window_hi"] = c.window_hi;
    j["log_step_episodes"] = c.log_step_episodes;
    j["area_side_m"] = c.area_side_m;
    j["building_area_m2"] = c.building_area_m2;
    j["height_scale_m"] = c.height_scale_m;
    j["bs_height_m"] = c.bs_height_m;
    j["radio"] = {{"tx_power_w", c.radio.tx_power_w},
                  {"near_field_c", c.radio.near_field_c},
                  {"alpha_los", c.radio.alpha_los},
                  {"alpha_nlos", c.radio.alpha_nlos},
                  {"noise_w", c.radio.noise_w},
                  {"beamwidth_rad", c.radio.beamwidth_rad},
                  {"bs_downtilt_rad", c.radio.bs_downtilt_rad},
                  {"n_elements", c.radio.n_elements},
                  {"element_spacing_wl", c.radio.element_spacing_wl}};
    j["episode"] = {{"steps_per_episode", c.episode.steps_per_episode},
                    {"speed_mps", c.episode.speed_mps},
                    {"dt_s", c.episode.dt_s},
                    {"travel_m", c.episode.travel_m},
                    {"h_init_m", c.episode.h_init_m},
                    {"h_min_m", c.episode.h_min_m},
                    {"h_max_m", c.episode.h_max_m},
                    {"dh_m", c.episode.dh_m},
                    {"k_nearest", c.episode.k_nearest},
                    {"x_start_m", c.episode.x_start_m}};
    j["agent"] = {{"hidden_dims", c.agent.hidden_dims},
                  {"learning_rate", c.agent.learning_rate},
                  {"gamma", c.agent.gamma},
                  {"batch_size", c.agent.batch_size},
                  {"buffer_capacity", c.agent.buffer_capacity},
                  {"min_fill", c.agent.min_fill},
                  {"target_sync_every", c.agent.target_sync_every},
                  {"epsilon_init", c.agent.epsilon_init},
                  {"epsilon_decay", c.agent.epsilon_decay},
                  {"epsilon_floor", c.agent.epsilon_floor}};
    return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentConfig c;
    auto get = [&](const char* key, auto& dst) {
        if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
    };
    get("bs_densities_km2", c.bs_densities_km2);
    get("build_densities_km2", c.build_densities_km2);
    get("bs_density_fixed", c.bs_density_fixed);
    get("build_density_fixed", c.build_density_fixed);
    get("episodes", c.episodes);
    if (j.contains("policies")) {
        c.policies.clear();
        for (const auto& p : j.at("policies")) c.policies.push_back(policy_from_string(p));
    }
    if (j.contains("variants")) {
        c.variants.clear();
        for (const auto& v : j.at("variants")) c.variants.push_back(variant_from_string(v));
    }
    get("master_seed", c.master_seed);
    get("replicates", c.replicates);
    get("window_lo", c.window_lo);
    get("window_hi", c.window_hi);
    get("log_step_episodes", c.log_step_episodes);
    get("area_side_m", c.area_side_m);
    get("building_area_m2", c.building_area_m2);
    get("height_scale_m", c.height_scale_m);
    get("bs_height_m", c.bs_height_m);
    if (j.contains("radio")) {
        const auto& r = j.at("radio");
        auto getr = [&](const char* key, auto& dst) {
            if (r.contains(key)) dst = r.at(key).get<std::decay_t<decltype(dst)>>();
        };
        getr("tx_power_w", c.radio.tx_power_w);
        getr("near_field_c", c.radio.near_field_c);
        getr("alpha_los", c.radio.alpha_los);
        getr("alpha_nlos", c.radio.alpha_nlos);
        getr("noise_w", c.radio.noise_w);
        getr("beamwidth_rad", c.radio.beamwidth_rad);
        getr("bs_downtilt_rad", c.radio.bs_downtilt_rad);
        getr("n_elements", c.radio.n_elements);
        getr("element_spacing_wl", c.radio.element_spacing_wl);
    }
    if (j.contains("episode")) {
        const auto& e = j.at("episode");
        auto gete = [&](const char* key, auto& dst) {
            if (e.contains(key)) dst = e.at(key).get<std::decay_t<decltype(dst)>>();
        };
        gete("steps_per_episode", c.episode.steps_per_episode);
        gete("speed_mps", c.episode.speed_mps);
        gete("dt_s", c.episode.dt_s);
        gete("travel_m", c.episode.travel_m);
        gete("h_init_m", c.episode.h_init_m);
        gete("h_min_m", c.episode.h_min_m);
        gete("h_max_m", c.episode.h_max_m);
        gete("dh_m", c.episode.dh_m);
        gete("k_nearest", c.episode.k_nearest);
        gete("x_start_m", c.episode.x_start_m);
    }
    if (j.contains("agent")) {
        const auto& a = j.at("agent");
        auto geta = [&](const char* key, auto& dst) {
            if (a.contains(key)) dst = a.at(key).get<std::decay_t<decltype(dst)>>();
        };
        geta("hidden_dims", c.agent.hidden_dims);
        geta("learning_rate", c.agent.learning_rate);
        geta("gamma", c.agent.gamma);
        geta("batch_size", c.agent.batch_size);
        geta("buffer_capacity", c.agent.buffer_capacity);
        geta("min_fill", c.agent.min_fill);
        geta("target_sync_every", c.agent.target_sync_every);
        geta("epsilon_init", c.agent.epsilon_init);
        geta("epsilon_decay", c.agent.epsilon_decay);
        geta("epsilon_floor", c.agent.epsilon_floor);
    }
    return c;
}

}  // namespace uavsim
