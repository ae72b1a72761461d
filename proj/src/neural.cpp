#include "uavsim/neural.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace uavsim {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// Activations per layer for one input, kept for the backward pass.
// acts[0] is the input, acts.back() the pre-activation output.
std::vector<std::vector<double>> forward_all(const QNetwork& net, std::span<const double> input) {
    std::vector<std::vector<double>> acts;
    acts.reserve(net.dims.size());
    acts.emplace_back(input.begin(), input.end());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        int rows = net.dims[l + 1], cols = net.dims[l];
        std::vector<double> out(rows);
        const auto& w = net.weights[l];
        const auto& prev = acts.back();
        for (int i = 0; i < rows; ++i) {
            double acc = net.biases[l][i];
            const double* wr = w.data() + static_cast<std::size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) acc += wr[j] * prev[j];
            out[i] = acc;
        }
        if (l + 1 < net.weights.size())
            for (double& v : out) v = std::max(v, 0.0);  // ReLU on hidden layers
        acts.push_back(std::move(out));
    }
    return acts;
}

}  // namespace

QNetwork QNetwork::init(const std::vector<int>& dims, Rng& rng) {
    if (dims.size() < 2) throw std::invalid_argument("network needs at least two layer dims");
    QNetwork net;
    net.dims = dims;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        std::size_t n = static_cast<std::size_t>(dims[l + 1]) * dims[l];
        double bound = std::sqrt(6.0 / (dims[l] + dims[l + 1]));
        std::vector<double> w(n);
        for (double& v : w) v = rng.uniform(-bound, bound);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(dims[l + 1], 0.0);
        net.m_w.emplace_back(n, 0.0);
        net.v_w.emplace_back(n, 0.0);
        net.m_b.emplace_back(dims[l + 1], 0.0);
        net.v_b.emplace_back(dims[l + 1], 0.0);
    }
    return net;
}

std::vector<double> QNetwork::forward(std::span<const double> input) const {
    if (static_cast<int>(input.size()) != dims.front())
        throw std::invalid_argument("input size does not match network input dim");
    return forward_all(*this, input).back();
}

std::size_t QNetwork::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

std::pair<double, Gradients> td_loss_and_grads(const QNetwork& net, const QNetwork& target,
                                               std::span<const Transition* const> batch,
                                               double gamma) {
    if (batch.empty()) throw std::invalid_argument("empty training batch");

    Gradients grads;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        grads.d_weights.emplace_back(net.weights[l].size(), 0.0);
        grads.d_biases.emplace_back(net.biases[l].size(), 0.0);
    }

    double loss = 0.0;
    double inv_n = 1.0 / batch.size();
    for (const Transition* tr : batch) {
        double y = tr->reward;
        if (!tr->done) {
            std::vector<double> q_next = target.forward(tr->next_state);
            y += gamma * *std::max_element(q_next.begin(), q_next.end());
        }

        auto acts = forward_all(net, tr->state);
        double q = acts.back()[tr->action];
        double err = q - y;
        loss += err * err * inv_n;

        // d(loss)/d(output): only the taken action's Q contributes.
        std::vector<double> delta(acts.back().size(), 0.0);
        delta[tr->action] = 2.0 * err * inv_n;

        for (std::size_t l = net.weights.size(); l-- > 0;) {
            int rows = net.dims[l + 1], cols = net.dims[l];
            const auto& prev = acts[l];
            for (int i = 0; i < rows; ++i) {
                double d = delta[i];
                if (d == 0.0) continue;
                grads.d_biases[l][i] += d;
                double* gw = grads.d_weights[l].data() + static_cast<std::size_t>(i) * cols;
                for (int j = 0; j < cols; ++j) gw[j] += d * prev[j];
            }
            if (l == 0) break;
            std::vector<double> prev_delta(cols, 0.0);
            for (int i = 0; i < rows; ++i) {
                double d = delta[i];
                if (d == 0.0) continue;
                const double* wr = net.weights[l].data() + static_cast<std::size_t>(i) * cols;
                for (int j = 0; j < cols; ++j) prev_delta[j] += d * wr[j];
            }
            // ReLU mask of the hidden layer output
            for (int j = 0; j < cols; ++j)
                if (prev[j] <= 0.0) prev_delta[j] = 0.0;
            delta = std::move(prev_delta);
        }
    }
    return {loss, std::move(grads)};
}

void optimizer_step(QNetwork& net, const Gradients& grads, double lr) {
    net.adam_step += 1;
    double bc1 = 1.0 - std::pow(kBeta1, net.adam_step);
    double bc2 = 1.0 - std::pow(kBeta2, net.adam_step);
    auto update = [&](std::vector<double>& p, std::vector<double>& m, std::vector<double>& v,
                      const std::vector<double>& g) {
        if (g.size() != p.size()) throw std::invalid_argument("gradient shape mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
            v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
            p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kAdamEps);
        }
    };
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        update(net.weights[l], net.m_w[l], net.v_w[l], grads.d_weights[l]);
        update(net.biases[l], net.m_b[l], net.v_b[l], grads.d_biases[l]);
    }
}

void sync_target(const QNetwork& net, QNetwork& target) {
    target.dims = net.dims;
    target.weights = net.weights;
    target.biases = net.biases;
}

std::string network_to_json(const QNetwork& net) {
    nlohmann::json j;
    j["dims"] = net.dims;
    j["weights"] = net.weights;
    j["biases"] = net.biases;
    j["m_w"] = net.m_w;
    j["v_w"] = net.v_w;
    j["m_b"] = net.m_b;
    j["v_b"] = net.v_b;
    j["adam_step"] = net.adam_step;
    return j.dump();
}

QNetwork network_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    QNetwork net;
    net.dims = j.at("dims").get<std::vector<int>>();
    net.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    net.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    net.m_w = j.at("m_w").get<std::vector<std::vector<double>>>();
    net.v_w = j.at("v_w").get<std::vector<std::vector<double>>>();
    net.m_b = j.at("m_b").get<std::vector<std::vector<double>>>();
    net.v_b = j.at("v_b").get<std::vector<std::vector<double>>>();
    net.adam_step = j.at("adam_step").get<long>();
    return net;
}

}  // namespace uavsim
