#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uavsim/rng.hpp"

namespace uavsim {

// Replay record: (state vector, action, reward, next state vector, done).
struct Transition {
    std::vector<double> state;
    int action = 0;
    double reward = 0;
    std::vector<double> next_state;
    bool done = false;
};

// Fully-connected ReLU network with identity output, plus Adam moments.
// weights[l] is (dims[l+1] x dims[l]) row-major.
struct QNetwork {
    std::vector<int> dims;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
    long adam_step = 0;

    static QNetwork init(const std::vector<int>& dims, Rng& rng);

    std::vector<double> forward(std::span<const double> input) const;
    std::size_t param_count() const;
};

struct Gradients {
    std::vector<std::vector<double>> d_weights;
    std::vector<std::vector<double>> d_biases;
};

// Mean squared TD error over the batch, with targets
// y = r + gamma * max_a' Q_target(s') (y = r on terminal transitions).
// Gradients are taken w.r.t. the online network only.
std::pair<double, Gradients> td_loss_and_grads(const QNetwork& net, const QNetwork& target,
                                               std::span<const Transition* const> batch,
                                               double gamma);

// Adam with beta1=0.9, beta2=0.999, eps=1e-8 and bias correction.
void optimizer_step(QNetwork& net, const Gradients& grads, double lr);

void sync_target(const QNetwork& net, QNetwork& target);

std::string network_to_json(const QNetwork& net);
QNetwork network_from_json(const std::string& text);

}  // namespace uavsim
