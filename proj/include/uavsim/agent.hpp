#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "uavsim/episode.hpp"
#include "uavsim/neural.hpp"
#include "uavsim/rng.hpp"

namespace uavsim {

enum class PolicyKind { Constant, Random, Genie, Dqn };

std::string to_string(PolicyKind k);
PolicyKind policy_from_string(const std::string& s);

// Ring buffer of transitions with uniform without-replacement batch sampling.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, std::size_t min_fill)
        : capacity_(capacity), min_fill_(min_fill) {}

    void push(Transition tr);
    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool ready() const { return storage_.size() >= min_fill_; }
    const Transition& at(std::size_t i) const { return storage_[i]; }

    std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

private:
    std::vector<Transition> storage_;
    std::size_t capacity_;
    std::size_t min_fill_;
    std::size_t next_ = 0;
};

struct EpsilonSchedule {
    double value = 1.0;
    double decay = 0.99;
    double floor = 0.001;

    void advance() { value = std::max(floor, value * decay); }
};

struct AgentConfig {
    std::vector<int> hidden_dims{64, 64};
    double learning_rate = 3e-4;
    double gamma = 0.95;
    std::size_t batch_size = 32;
    std::size_t buffer_capacity = 50000;
    std::size_t min_fill = 32;
    int target_sync_every = 200;
    double epsilon_init = 1.0;
    double epsilon_decay = 0.99;
    double epsilon_floor = 0.001;
};

class DqnAgent {
public:
    DqnAgent(int obs_size, const AgentConfig& config, Rng& init_rng);

    // Epsilon-greedy over the online network's Q-values.
    int select_action(const Observation& obs, Rng& explore_rng);

    // Appends the transition, decays epsilon, and runs one training batch
    // once the buffer holds at least min_fill transitions.
    void record_and_train(Transition tr, Rng& replay_rng);

    double epsilon() const { return epsilon_.value; }
    const QNetwork& network() const { return net_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    long train_steps() const { return train_steps_; }

private:
    AgentConfig config_;
    QNetwork net_;
    QNetwork target_;
    ReplayBuffer buffer_;
    EpsilonSchedule epsilon_;
    long train_steps_ = 0;
};

struct Policy {
    PolicyKind kind = PolicyKind::Constant;
    StateVariant variant = StateVariant::Basic;
    std::unique_ptr<DqnAgent> agent;  // only for Dqn
};

struct CellRngs {
    Rng explore;
    Rng replay;
    Rng env;
};

struct StepRecord {
    int step = 0;  // 1-based
    double x_m = 0;
    double h_m = 0;
    int action = 0;
    double sinr_db = 0;
    double se_bits_hz = 0;
};

struct EpisodeLog {
    std::vector<StepRecord> steps;
    double throughput_bits_hz = 0;  // sum of per-step spectral efficiency
};

int greedy_action(const std::vector<double>& q_values);

EpisodeLog run_episode(Policy& policy, const CityTopology& topo, const RadioParams& params,
                       const EpisodeConfig& config, CellRngs& rngs);

}  // namespace uavsim
