#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "uavsim/agent.hpp"

namespace uavsim {

struct ExperimentConfig {
    std::vector<double> bs_densities_km2{1, 5, 10};
    std::vector<double> build_densities_km2{100, 500, 1000};
    double bs_density_fixed = 5;
    double build_density_fixed = 500;
    int episodes = 300;
    std::vector<PolicyKind> policies{PolicyKind::Constant, PolicyKind::Random, PolicyKind::Genie,
                                     PolicyKind::Dqn};
    std::vector<StateVariant> variants{StateVariant::Basic, StateVariant::BS, StateVariant::Build,
                                       StateVariant::Complete};
    std::uint64_t master_seed = 1;
    int replicates = 5;
    int window_lo = 250;  // 1-based inclusive summary window
    int window_hi = 300;
    std::vector<int> log_step_episodes{1, 300};  // episodes with full step records

    double area_side_m = 5000;
    double building_area_m2 = 40;
    double height_scale_m = 20;
    double bs_height_m = 30;

    RadioParams radio;
    EpisodeConfig episode;
    AgentConfig agent;
};

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

// One (densities, policy, variant, replicate) work item.
struct CellSpec {
    double bs_density = 5;
    double build_density = 500;
    PolicyKind policy = PolicyKind::Constant;
    StateVariant variant = StateVariant::Basic;
    int replicate = 0;

    std::string id() const;
};

// The topology seed is shared by every policy in a density leg, so all
// approaches face the same world; agent streams come from the cell seed.
// It deliberately ignores building density: cells that differ only in
// building density then share the same BS layout, making that comparison a
// paired one instead of one across unrelated BS draws.
std::uint64_t topology_seed(std::uint64_t master_seed, double bs_density, int replicate);
std::uint64_t cell_seed(std::uint64_t master_seed, const CellSpec& spec);

struct CellResult {
    CellSpec spec;
    std::uint64_t topo_seed = 0;
    std::vector<double> throughput_bits_hz;           // one per episode
    std::vector<double> mean_height_m;                // one per episode
    std::map<int, std::vector<StepRecord>> step_logs;  // keyed by 1-based episode
};

std::vector<CellSpec> enumerate_cells(const ExperimentConfig& config);

CellResult run_cell(const ExperimentConfig& config, const CellSpec& spec);

struct SweepResult {
    std::vector<CellResult> cells;
    std::vector<std::string> failures;  // "cell_id: message"
};

SweepResult sweep(const ExperimentConfig& config, int jobs);

void write_outputs(const SweepResult& result, const ExperimentConfig& config,
                   const std::string& out_dir);

std::string episodes_csv(const SweepResult& result);
std::string steps_csv(const SweepResult& result);
std::string summary_csv(const SweepResult& result, const ExperimentConfig& config);

struct ReplayCheck {
    bool ok = true;
    long bad_row = -1;  // 1-based data row of the first mismatch
    std::string message;
};

// Recomputes spectral efficiency from the logged poses in a steps.csv and
// compares against the logged values (tolerance 1e-9).
ReplayCheck replay_verify(const std::string& steps_csv_text, const ExperimentConfig& config);

std::string format_double(double v);

}  // namespace uavsim
