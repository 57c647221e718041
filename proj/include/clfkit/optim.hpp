#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace clfkit {

/// Cosine-annealing cycle schedule: the learning rate decays from alpha0
/// along a half cosine within each cycle of ⌈T/M⌉ epochs, then restarts.
struct ScheduleConfig {
    double alpha0 = 0.1;    ///< initial (and per-cycle peak) learning rate
    int total_epochs = 1;   ///< T
    int num_snapshots = 1;  ///< M, number of models captured along the run

    int cycle_length() const { return (total_epochs + num_snapshots - 1) / num_snapshots; }

    void validate() const {
        if (!(alpha0 > 0.0)) {
            throw std::invalid_argument("ScheduleConfig: alpha0 must be positive");
        }
        if (total_epochs < 1) {
            throw std::invalid_argument("ScheduleConfig: total_epochs must be >= 1");
        }
        if (num_snapshots < 1 || num_snapshots > total_epochs) {
            throw std::invalid_argument(
                "ScheduleConfig: num_snapshots must lie in [1, total_epochs]");
        }
    }
};

/// Learning rate for 1-based epoch t:
///   α(t) = α₀/2 · (cos(π · mod(t−1, C) / C) + 1),  C = ⌈T/M⌉.
/// α(t) equals α₀ exactly at every cycle start and never reaches zero.
inline double lr_at(const ScheduleConfig& cfg, int epoch) {
    cfg.validate();
    if (epoch < 1 || epoch > cfg.total_epochs) {
        throw std::invalid_argument("lr_at: epoch out of [1, total_epochs]");
    }
    const int cycle = cfg.cycle_length();
    const int pos = (epoch - 1) % cycle;
    constexpr double pi = 3.14159265358979323846;
    return cfg.alpha0 / 2.0 * (std::cos(pi * pos / cycle) + 1.0);
}

/// Epochs whose end-of-epoch weights join the ensemble: every multiple of the
/// cycle length up to T, plus T itself when T is not a multiple. The final
/// epoch is therefore always captured.
inline std::vector<int> snapshot_epochs(const ScheduleConfig& cfg) {
    cfg.validate();
    std::vector<int> epochs;
    const int cycle = cfg.cycle_length();
    for (int t = cycle; t <= cfg.total_epochs; t += cycle) {
        epochs.push_back(t);
    }
    if (epochs.empty() || epochs.back() != cfg.total_epochs) {
        epochs.push_back(cfg.total_epochs);
    }
    return epochs;
}

namespace detail {
inline void check_shapes(std::size_t params, std::size_t grads, std::size_t state,
                         const char* who) {
    if (params != grads || params != state) {
        throw std::invalid_argument(std::string(who) + ": parameter/gradient/state size mismatch");
    }
}
}  // namespace detail

/// Stochastic gradient descent with momentum:
///   v ← momentum·v − lr·g,  θ ← θ + v.
struct SgdMomentum {
    double lr;
    double momentum;
    std::vector<double> velocity;

    SgdMomentum(double lr_, double momentum_, std::size_t size)
        : lr(lr_), momentum(momentum_), velocity(size, 0.0) {
        if (!(lr > 0.0)) {
            throw std::invalid_argument("SgdMomentum: lr must be positive");
        }
        if (momentum < 0.0 || momentum >= 1.0) {
            throw std::invalid_argument("SgdMomentum: momentum must lie in [0,1)");
        }
    }

    void step(std::span<double> params, std::span<const double> grads) {
        detail::check_shapes(params.size(), grads.size(), velocity.size(), "SgdMomentum::step");
        for (std::size_t i = 0; i < params.size(); ++i) {
            velocity[i] = momentum * velocity[i] - lr * grads[i];
            params[i] += velocity[i];
        }
    }
};

/// Adam with bias correction.
struct Adam {
    double lr;
    double beta1;
    double beta2;
    double epsilon;
    long long step_count = 0;
    std::vector<double> m;
    std::vector<double> v;

    explicit Adam(std::size_t size, double lr_ = 1e-3, double beta1_ = 0.9, double beta2_ = 0.999,
                  double epsilon_ = 1e-8)
        : lr(lr_), beta1(beta1_), beta2(beta2_), epsilon(epsilon_), m(size, 0.0), v(size, 0.0) {
        if (!(lr > 0.0) || !(epsilon > 0.0)) {
            throw std::invalid_argument("Adam: lr and epsilon must be positive");
        }
        if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
            throw std::invalid_argument("Adam: betas must lie in [0,1)");
        }
    }

    void step(std::span<double> params, std::span<const double> grads) {
        detail::check_shapes(params.size(), grads.size(), m.size(), "Adam::step");
        ++step_count;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            params[i] -= lr * m_hat / (std::sqrt(v_hat) + epsilon);
        }
    }
};

}  // namespace clfkit
