#pragma once

#include <string>
#include <vector>

#include "uavsim/radio.hpp"
#include "uavsim/topology.hpp"

namespace uavsim {

enum class Action : int { Up = 0, Down = 1, Stay = 2 };

enum class StateVariant { Basic, BS, Build, Complete };

std::string to_string(StateVariant v);
StateVariant variant_from_string(const std::string& s);

struct EpisodeConfig {
    int steps_per_episode = 100;
    double speed_mps = 10.0;
    double dt_s = 1.0;
    double travel_m = 1000.0;
    double h_init_m = 100.0;
    double h_min_m = 20.0;
    double h_max_m = 200.0;
    double dh_m = 7.0;
    int k_nearest = 3;
    double x_start_m = -500.0;  // path runs to x_start + travel, y = 0

    void validate() const;
};

struct EnvState {
    int step_idx = 0;
    double x_m = 0;
    double h_m = 0;
    int serving_idx = -1;
    double sinr_db = 0;
};

struct Observation {
    StateVariant variant = StateVariant::Basic;
    std::vector<double> values;
};

struct StepResult {
    EnvState state;
    double reward = 0;  // bits/s/Hz
    bool done = false;
};

// Nearest-BS association by horizontal distance, ties to the lowest index.
int nearest_bs(const CityTopology& topo, double x, double y);

int observation_size(StateVariant variant, const EpisodeConfig& config);

EnvState reset(const CityTopology& topo, const RadioParams& params, const EpisodeConfig& config);

StepResult step(const EnvState& env, Action action, const CityTopology& topo,
                const RadioParams& params, const EpisodeConfig& config);

Observation observe(const EnvState& env, const CityTopology& topo, StateVariant variant,
                    const EpisodeConfig& config);

// Scans a 1 m height grid at the next x position and steps toward the best
// height; ties prefer the current height, then the lowest height.
Action genie_action(const EnvState& env, const CityTopology& topo, const RadioParams& params,
                    const EpisodeConfig& config);

// Height-grid argmax the genie steps toward; exposed for the direction tests.
double genie_best_height(const EnvState& env, const CityTopology& topo, const RadioParams& params,
                         const EpisodeConfig& config);

double sinr_to_db(double sinr_linear);

}  // namespace uavsim
