#pragma once

// Deep Q-learning on top of QNetwork: FIFO replay, quasi-static target
// network, RMSprop with global-norm gradient clipping, per-step epsilon decay.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <random>
#include <stdexcept>
#include <vector>

#include "orbitsplit/env.hpp"
#include "orbitsplit/nn.hpp"

namespace orbitsplit {

struct Transition {
    Vector s;
    int action = 0;
    double reward = 0.0;
    Vector s_next;
    bool terminal = false;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity_ == 0) throw std::invalid_argument("replay capacity must be positive");
    }

    void push(Transition t) {
        if (buf_.size() == capacity_) buf_.pop_front();
        buf_.push_back(std::move(t));
    }

    std::size_t size() const { return buf_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return buf_.at(i); }

    // Uniform sample of n distinct indices (partial Fisher-Yates).
    std::vector<std::size_t> sample_indices(std::size_t n, std::mt19937_64& rng) const {
        if (n > buf_.size()) throw std::invalid_argument("sample larger than buffer");
        std::vector<std::size_t> idx(buf_.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_int_distribution<std::size_t> d(i, idx.size() - 1);
            std::swap(idx[i], idx[d(rng)]);
        }
        idx.resize(n);
        return idx;
    }

private:
    std::deque<Transition> buf_;
    std::size_t capacity_;
};

struct AgentHyperparams {
    double mu = 0.9;                 // discount
    double learning_rate = 1e-3;
    double epsilon0 = 0.5;
    double epsilon_decay = 0.995;    // per step
    double epsilon_min = 0.0005;
    int batch_size = 32;
    int target_sync_period = 100;    // steps
    std::size_t replay_capacity = 200;
    double rms_decay = 0.99;
    double rms_epsilon = 1e-8;
    double grad_clip_norm = 10.0;
    int episodes = 500;
    std::uint64_t seed = 1;

    void validate() const {
        if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("agent discount mu must be in [0,1]");
        if (!(learning_rate > 0.0)) throw std::invalid_argument("agent learning_rate must be positive");
        if (epsilon0 < 0.0 || epsilon0 > 1.0) throw std::invalid_argument("agent epsilon0 must be in [0,1]");
        if (!(epsilon_decay > 0.0) || epsilon_decay >= 1.0) {
            throw std::invalid_argument("agent epsilon_decay must be in (0,1)");
        }
        if (epsilon_min < 0.0 || epsilon_min > epsilon0) {
            throw std::invalid_argument("agent epsilon_min must be in [0, epsilon0]");
        }
        if (batch_size < 1) throw std::invalid_argument("agent batch_size must be >= 1");
        if (static_cast<std::size_t>(batch_size) > replay_capacity) {
            throw std::invalid_argument("agent batch_size must not exceed replay_capacity");
        }
        if (target_sync_period < 1) throw std::invalid_argument("agent target_sync_period must be >= 1");
        if (replay_capacity == 0) throw std::invalid_argument("agent replay_capacity must be positive");
        if (!(rms_decay > 0.0) || rms_decay >= 1.0) throw std::invalid_argument("agent rms_decay must be in (0,1)");
        if (!(rms_epsilon > 0.0)) throw std::invalid_argument("agent rms_epsilon must be positive");
        if (!(grad_clip_norm > 0.0)) throw std::invalid_argument("agent grad_clip_norm must be positive");
        if (episodes < 1) throw std::invalid_argument("agent episodes must be >= 1");
    }
};

inline double epsilon_at(const AgentHyperparams& hp, long step) {
    return std::max(hp.epsilon_min, hp.epsilon0 * std::pow(hp.epsilon_decay, static_cast<double>(step)));
}

class RmsProp {
public:
    RmsProp(double lr, double decay, double eps) : lr_(lr), decay_(decay), eps_(eps) {}

    // v <- decay*v + (1-decay)*g^2 ; p <- p - lr*g/(sqrt(v)+eps)
    void apply(QNetwork& net, const QNetwork& grad) {
        for (std::size_t i = 0; i < net.layers().size(); ++i) {
            auto& layer = net.layers()[i];
            const auto& g = grad.layers()[i];
            auto& v = v_.layers()[i];
            v.w = (decay_ * v.w.array() + (1.0 - decay_) * g.w.array().square()).matrix();
            v.b = (decay_ * v.b.array() + (1.0 - decay_) * g.b.array().square()).matrix();
            layer.w.array() -= lr_ * g.w.array() / (v.w.array().sqrt() + eps_);
            layer.b.array() -= lr_ * g.b.array() / (v.b.array().sqrt() + eps_);
        }
    }

private:
    double lr_, decay_, eps_;
    QNetwork v_;  // zero-initialized accumulator with matching shapes
};

inline int select_action(const QNetwork& net, const Vector& encoding, double epsilon,
                         std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < epsilon) {
        std::uniform_int_distribution<int> d(0, kNumActions - 1);
        return d(rng);
    }
    return argmax_q(net.forward_one(encoding));
}

inline std::vector<double> td_targets(const std::vector<const Transition*>& batch,
                                      const QNetwork& target, double mu) {
    if (batch.empty()) throw std::invalid_argument("td_targets: empty batch");
    Matrix s_next(QNetwork::kInputDim, static_cast<Eigen::Index>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        s_next.col(static_cast<Eigen::Index>(i)) = batch[i]->s_next;
    }
    const Matrix q_next = target.forward(s_next);
    std::vector<double> x(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch[i]->terminal) {
            x[i] = batch[i]->reward;
        } else {
            x[i] = batch[i]->reward + mu * q_next.col(static_cast<Eigen::Index>(i)).maxCoeff();
        }
    }
    return x;
}

// One mini-batch update. Loss is the mean squared TD error with gradient only
// through the taken action's output; returns the pre-update loss.
inline double train_step(QNetwork& net, const QNetwork& target, const ReplayBuffer& buffer,
                         const AgentHyperparams& hp, RmsProp& opt, std::mt19937_64& rng) {
    if (buffer.size() < static_cast<std::size_t>(hp.batch_size)) {
        throw std::runtime_error("train_step: buffer smaller than batch");
    }
    const auto idx = buffer.sample_indices(static_cast<std::size_t>(hp.batch_size), rng);
    std::vector<const Transition*> batch;
    batch.reserve(idx.size());
    for (const std::size_t i : idx) batch.push_back(&buffer.at(i));

    const std::vector<double> x = td_targets(batch, target, hp.mu);

    Matrix s(QNetwork::kInputDim, static_cast<Eigen::Index>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        s.col(static_cast<Eigen::Index>(i)) = batch[i]->s;
    }
    QNetwork::Tape tape;
    const Matrix q = net.forward(s, tape);

    const double inv_b = 1.0 / static_cast<double>(batch.size());
    Matrix dq = Matrix::Zero(QNetwork::kOutputDim, static_cast<Eigen::Index>(batch.size()));
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Eigen::Index col = static_cast<Eigen::Index>(i);
        const double err = q(batch[i]->action, col) - x[i];
        loss += err * err * inv_b;
        dq(batch[i]->action, col) = 2.0 * err * inv_b;
    }

    QNetwork grad;
    net.backward(tape, dq, grad);

    const double norm = std::sqrt(grad.squared_norm());
    if (norm > hp.grad_clip_norm) grad.scale(hp.grad_clip_norm / norm);

    opt.apply(net, grad);
    return loss;
}

struct TrainStepLog {
    long step = 0;
    int episode = 0;
    double epsilon = 0.0;
    double reward = 0.0;
    double loss = 0.0;
    int action = 0;
    int placement = 0;
    int split = 0;
    double total_w = 0.0;
};

struct TrainingArtifacts {
    QNetwork net;
    std::vector<TrainStepLog> log;
    std::vector<long> sync_steps;
    long total_steps = 0;
};

// Episode loop: seeded random initial configuration, per-step epsilon decay,
// updates once the buffer holds a full batch, target sync every
// target_sync_period global steps (after the update that step).
inline TrainingArtifacts train(Environment& env, const AgentHyperparams& hp) {
    hp.validate();
    std::mt19937_64 rng(hp.seed);

    TrainingArtifacts out;
    out.net = QNetwork::random_init(rng());
    QNetwork target = out.net;
    ReplayBuffer buffer(hp.replay_capacity);
    RmsProp opt(hp.learning_rate, hp.rms_decay, hp.rms_epsilon);

    long t = 0;
    out.log.reserve(static_cast<std::size_t>(hp.episodes) * env.episode_length());
    for (int episode = 0; episode < hp.episodes; ++episode) {
        env.reset_random(rng);
        bool done = false;
        while (!done) {
            const Vector s = Eigen::Map<const Vector>(env.state().encoding.data(), kStateDim);
            const double eps = epsilon_at(hp, t);
            const int a = select_action(out.net, s, eps, rng);
            const auto res = env.step(Action::from_index(a));
            const Vector s2 = Eigen::Map<const Vector>(res.state.encoding.data(), kStateDim);
            buffer.push({s, a, res.reward.total, s2, res.done});

            double loss = 0.0;
            if (buffer.size() >= static_cast<std::size_t>(hp.batch_size)) {
                loss = train_step(out.net, target, buffer, hp, opt, rng);
            }

            out.log.push_back({t, episode, eps, res.reward.total, loss, a,
                               static_cast<int>(res.state.config.placement()),
                               res.state.config.split, res.state.power.total_w});
            ++t;
            if (t % hp.target_sync_period == 0) {
                target = out.net;
                out.sync_steps.push_back(t);
            }
            done = res.done;
        }
    }
    out.total_steps = t;
    return out;
}

struct EvalStep {
    long step = 0;
    double time_of_day_h = 0.0;
    double lambda_mbps = 0.0;
    int action = 0;
    int placement = 0;
    int split = 0;
    double reward_total = 0.0;
    double reward_base = 0.0;
    double total_w = 0.0;
    double norm_power = 0.0;
    bool feasible = false;
};

struct EvalResult {
    std::vector<EvalStep> steps;
    double discounted_return = 0.0;
    double sum_reward = 0.0;
    double mean_norm_power = 0.0;
};

// Greedy (epsilon = 0) rollout of a trained network for one episode.
inline EvalResult rollout_greedy(Environment& env, const QNetwork& net,
                                 const Configuration& initial, double mu) {
    env.reset(initial);
    EvalResult out;
    double discount = 1.0;
    long k = 0;
    while (!env.done()) {
        const Vector s = Eigen::Map<const Vector>(env.state().encoding.data(), kStateDim);
        const int a = argmax_q(net.forward_one(s));
        const auto res = env.step(Action::from_index(a));
        const auto rep = check_constraints(res.state.config, res.state.lambda_mbps, env.params());
        EvalStep step;
        step.step = k;
        step.time_of_day_h = res.state.time_of_day_h;
        step.lambda_mbps = res.state.lambda_mbps;
        step.action = a;
        step.placement = static_cast<int>(res.state.config.placement());
        step.split = res.state.config.split;
        step.reward_total = res.reward.total;
        step.reward_base = res.reward.base;
        step.total_w = res.state.power.total_w;
        step.norm_power = res.state.power.total_w / env.power_norm_w();
        step.feasible = rep.all_ok();
        out.steps.push_back(step);
        out.discounted_return += discount * res.reward.total;
        out.sum_reward += res.reward.total;
        out.mean_norm_power += step.norm_power;
        discount *= mu;
        ++k;
    }
    if (!out.steps.empty()) out.mean_norm_power /= static_cast<double>(out.steps.size());
    return out;
}

}  // namespace orbitsplit
