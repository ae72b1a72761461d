#include "uavsim/agent.hpp"

#include <algorithm>
#include <stdexcept>

namespace uavsim {

std::string to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::Constant: return "constant";
        case PolicyKind::Random: return "random";
        case PolicyKind::Genie: return "genie";
        case PolicyKind::Dqn: return "dqn";
    }
    return "constant";
}

PolicyKind policy_from_string(const std::string& s) {
    if (s == "constant") return PolicyKind::Constant;
    if (s == "random") return PolicyKind::Random;
    if (s == "genie") return PolicyKind::Genie;
    if (s == "dqn") return PolicyKind::Dqn;
    throw std::invalid_argument("unknown policy: " + s);
}

void ReplayBuffer::push(Transition tr) {
    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(tr));
    } else {
        storage_[next_] = std::move(tr);  // evict oldest
    }
    next_ = (next_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
    if (!ready()) throw std::runtime_error("replay buffer below min fill");
    n = std::min(n, storage_.size());
    // rejection sampling keeps indices distinct within the batch
    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    while (chosen.size() < n) {
        std::size_t j = static_cast<std::size_t>(rng.uniform() * storage_.size());
        if (std::find(chosen.begin(), chosen.end(), j) == chosen.end()) chosen.push_back(j);
    }
    std::vector<const Transition*> batch;
    batch.reserve(n);
    for (std::size_t j : chosen) batch.push_back(&storage_[j]);
    return batch;
}

DqnAgent::DqnAgent(int obs_size, const AgentConfig& config, Rng& init_rng)
    : config_(config), buffer_(config.buffer_capacity, config.min_fill) {
    std::vector<int> dims;
    dims.push_back(obs_size);
    for (int h : config.hidden_dims) dims.push_back(h);
    dims.push_back(3);
    net_ = QNetwork::init(dims, init_rng);
    sync_target(net_, target_);
    epsilon_ = {config.epsilon_init, config.epsilon_decay, config.epsilon_floor};
}

int greedy_action(const std::vector<double>& q_values) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(q_values.size()); ++i)
        if (q_values[i] > q_values[best]) best = i;  // ties keep the lowest index
    return best;
}

int DqnAgent::select_action(const Observation& obs, Rng& explore_rng) {
    if (explore_rng.uniform() < epsilon_.value) return explore_rng.uniform_int(3);
    return greedy_action(net_.forward(obs.values));
}

void DqnAgent::record_and_train(Transition tr, Rng& replay_rng) {
    buffer_.push(std::move(tr));
    epsilon_.advance();
    if (!buffer_.ready()) return;
    auto batch = buffer_.sample(config_.batch_size, replay_rng);
    auto [loss, grads] = td_loss_and_grads(net_, target_, batch, config_.gamma);
    (void)loss;
    optimizer_step(net_, grads, config_.learning_rate);
    ++train_steps_;
    if (train_steps_ % config_.target_sync_every == 0) sync_target(net_, target_);
}

EpisodeLog run_episode(Policy& policy, const CityTopology& topo, const RadioParams& params,
                       const EpisodeConfig& config, CellRngs& rngs) {
    EpisodeLog log;
    log.steps.reserve(config.steps_per_episode);

    EnvState env = reset(topo, params, config);
    Observation obs;
    if (policy.kind == PolicyKind::Dqn) obs = observe(env, topo, policy.variant, config);

    while (env.step_idx < config.steps_per_episode) {
        int action;
        switch (policy.kind) {
            case PolicyKind::Constant: action = static_cast<int>(Action::Stay); break;
            case PolicyKind::Random: action = rngs.explore.uniform_int(3); break;
            case PolicyKind::Genie:
                action = static_cast<int>(genie_action(env, topo, params, config));
                break;
            case PolicyKind::Dqn: action = policy.agent->select_action(obs, rngs.explore); break;
            default: throw std::logic_error("unhandled policy");
        }

        StepResult res = step(env, static_cast<Action>(action), topo, params, config);

        if (policy.kind == PolicyKind::Dqn) {
            Observation next_obs = observe(res.state, topo, policy.variant, config);
            Transition tr;
            tr.state = obs.values;
            tr.action = action;
            tr.reward = res.reward;
            tr.next_state = next_obs.values;
            tr.done = res.done;
            policy.agent->record_and_train(std::move(tr), rngs.replay);
            obs = std::move(next_obs);
        }

        env = res.state;
        log.steps.push_back({env.step_idx, env.x_m, env.h_m, action, env.sinr_db, res.reward});
        log.throughput_bits_hz += res.reward;
    }
    return log;
}

}  // namespace uavsim
