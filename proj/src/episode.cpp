#include "uavsim/episode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavsim {

namespace {

// Observation normalization bounds.
constexpr double kSinrDbMin = -20.0;
constexpr double kSinrDbMax = 60.0;
constexpr double kDistNormM = 2000.0;
constexpr double kBsDensMax = 10.0;
constexpr double kBuildDensMax = 1000.0;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double measure_sinr_db(const CityTopology& topo, double x, double h, int serving,
                       const RadioParams& params) {
    return sinr_to_db(sinr(topo, Point3{x, 0.0, h}, serving, params));
}

}  // namespace

std::string to_string(StateVariant v) {
    switch (v) {
        case StateVariant::Basic: return "basic";
        case StateVariant::BS: return "bs";
        case StateVariant::Build: return "build";
        case StateVariant::Complete: return "complete";
    }
    return "basic";
}

StateVariant variant_from_string(const std::string& s) {
    if (s == "basic") return StateVariant::Basic;
    if (s == "bs") return StateVariant::BS;
    if (s == "build") return StateVariant::Build;
    if (s == "complete") return StateVariant::Complete;
    throw std::invalid_argument("unknown state variant: " + s);
}

void EpisodeConfig::validate() const {
    if (std::abs(speed_mps * dt_s * steps_per_episode - travel_m) > 1e-9)
        throw std::invalid_argument("speed * dt * steps must equal travel distance");
    if (h_init_m < h_min_m || h_init_m > h_max_m)
        throw std::invalid_argument("initial height outside allowed range");
}

double sinr_to_db(double sinr_linear) {
    if (sinr_linear <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(sinr_linear);
}

int nearest_bs(const CityTopology& topo, double x, double y) {
    if (topo.bss.empty()) throw std::runtime_error("topology has no base stations");
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(topo.bss.size()); ++i) {
        double dx = topo.bss[i].x_m - x, dy = topo.bss[i].y_m - y;
        double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

int observation_size(StateVariant variant, const EpisodeConfig& config) {
    int n = 2 + config.k_nearest;
    if (variant == StateVariant::BS || variant == StateVariant::Complete) ++n;
    if (variant == StateVariant::Build || variant == StateVariant::Complete) ++n;
    return n;
}

EnvState reset(const CityTopology& topo, const RadioParams& params, const EpisodeConfig& config) {
    config.validate();
    EnvState env;
    env.step_idx = 0;
    env.x_m = config.x_start_m;
    env.h_m = config.h_init_m;
    env.serving_idx = nearest_bs(topo, env.x_m, 0.0);
    env.sinr_db = measure_sinr_db(topo, env.x_m, env.h_m, env.serving_idx, params);
    return env;
}

StepResult step(const EnvState& env, Action action, const CityTopology& topo,
                const RadioParams& params, const EpisodeConfig& config) {
    if (env.step_idx >= config.steps_per_episode)
        throw std::runtime_error("step called on a finished episode");

    StepResult res;
    res.state = env;
    double h = env.h_m;
    if (action == Action::Up) h += config.dh_m;
    else if (action == Action::Down) h -= config.dh_m;
    res.state.h_m = std::clamp(h, config.h_min_m, config.h_max_m);
    res.state.x_m = env.x_m + config.speed_mps * config.dt_s;
    res.state.step_idx = env.step_idx + 1;
    res.state.serving_idx = nearest_bs(topo, res.state.x_m, 0.0);
    double s = sinr(topo, Point3{res.state.x_m, 0.0, res.state.h_m}, res.state.serving_idx, params);
    res.state.sinr_db = sinr_to_db(s);
    res.reward = spectral_efficiency(s);
    res.done = res.state.step_idx == config.steps_per_episode;
    return res;
}

Observation observe(const EnvState& env, const CityTopology& topo, StateVariant variant,
                    const EpisodeConfig& config) {
    Observation obs;
    obs.variant = variant;
    obs.values.reserve(observation_size(variant, config));

    double db = std::clamp(env.sinr_db, kSinrDbMin, kSinrDbMax);
    obs.values.push_back((db - kSinrDbMin) / (kSinrDbMax - kSinrDbMin));
    obs.values.push_back(env.h_m / config.h_max_m);

    std::vector<double> dists;
    dists.reserve(topo.bss.size());
    for (const auto& bs : topo.bss) dists.push_back(std::hypot(bs.x_m - env.x_m, bs.y_m));
    std::sort(dists.begin(), dists.end());
    for (int k = 0; k < config.k_nearest; ++k) {
        if (k < static_cast<int>(dists.size()))
            obs.values.push_back(clamp01(dists[k] / kDistNormM));
        else
            obs.values.push_back(1.0);  // max-range sentinel
    }
    if (variant == StateVariant::BS || variant == StateVariant::Complete)
        obs.values.push_back(clamp01(topo.bs_density_km2 / kBsDensMax));
    if (variant == StateVariant::Build || variant == StateVariant::Complete)
        obs.values.push_back(clamp01(topo.build_density_km2 / kBuildDensMax));
    return obs;
}

double genie_best_height(const EnvState& env, const CityTopology& topo, const RadioParams& params,
                         const EpisodeConfig& config) {
    double x_next = env.x_m + config.speed_mps * config.dt_s;
    int serving = nearest_bs(topo, x_next, 0.0);

    // Blockage per BS is a step function of height here: the (x, y) of both
    // endpoints is fixed, and raising the UAV raises every interior point of
    // the segment, so a link that is clear at some height stays clear above
    // it.  Find each BS's lowest clear grid height once by bisection instead
    // of re-walking the lattice for all 181 candidate heights.
    int n_grid = static_cast<int>(std::floor(config.h_max_m - config.h_min_m + 1e-9)) + 1;
    std::vector<int> clear_from(topo.bss.size(), -1);  // grid index; n_grid means never clear
    auto blocked_at = [&](int bs, int k) {
        int& lo_clear = clear_from[bs];
        if (lo_clear < 0) {
            auto blocked = [&](int j) {
                return is_blocked(topo, Point3{x_next, 0.0, config.h_min_m + j}, topo.bss[bs]);
            };
            if (!blocked(0)) {
                lo_clear = 0;
            } else if (blocked(n_grid - 1)) {
                lo_clear = n_grid;
            } else {
                int lo = 0, hi = n_grid - 1;  // blocked at lo, clear at hi
                while (hi - lo > 1) {
                    int mid = (lo + hi) / 2;
                    (blocked(mid) ? lo : hi) = mid;
                }
                lo_clear = hi;
            }
        }
        return k < lo_clear;
    };

    // The SINR terms mirror sinr() exactly (same accumulation order) so that
    // the result is bit-identical to evaluating it height by height.
    double gain_uav = uav_antenna_gain(params.beamwidth_rad);
    double best_h = config.h_min_m;
    double best_val = -std::numeric_limits<double>::infinity();
    bool current_ties = false;
    for (int k = 0; k < n_grid; ++k) {
        double h = config.h_min_m + k;
        Point3 uav{x_next, 0.0, h};
        LinkGeometry serving_geom = link_geometry(uav, topo.bss[serving]);
        double signal = received_power(serving_geom, blocked_at(serving, k), gain_uav, params);
        double interference = 0.0;
        for (int i = 0; i < static_cast<int>(topo.bss.size()); ++i) {
            if (i == serving) continue;
            LinkGeometry g = link_geometry(uav, topo.bss[i]);
            if (!in_beam(serving_geom, g, params.beamwidth_rad)) continue;
            interference += received_power(g, blocked_at(i, k), gain_uav, params);
        }
        double v = signal / (interference + params.noise_w);
        if (v > best_val) {
            best_val = v;
            best_h = h;
            current_ties = (h == env.h_m);
        } else if (v == best_val && h == env.h_m) {
            current_ties = true;
        }
    }
    return current_ties ? env.h_m : best_h;
}

Action genie_action(const EnvState& env, const CityTopology& topo, const RadioParams& params,
                    const EpisodeConfig& config) {
    if (env.step_idx >= config.steps_per_episode)
        throw std::runtime_error("genie_action called on a finished episode");
    double h_star = genie_best_height(env, topo, params, config);
    if (h_star > env.h_m) return Action::Up;
    if (h_star < env.h_m) return Action::Down;
    return Action::Stay;
}

}  // namespace uavsim
