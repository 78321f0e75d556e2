// Copyright 2026 The tdtree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tdtree/learn.hpp"

#include "tdtree/error.hpp"
#include "tdtree/random.hpp"
#include "tdtree/tolerances.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tdtree {

void TrainConfig::validate() const {
    if (batch_size == 0) {
        throw ConfigError("batch_size must be positive");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate must be positive");
    }
    if (max_epochs == 0) {
        throw ConfigError("max_epochs must be positive");
    }
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0 &&
          adam.epsilon > 0.0)) {
        throw ConfigError("Adam needs beta1, beta2 in [0, 1) and epsilon > 0");
    }
}

Adam::Adam(std::size_t size, double learning_rate, AdamConfig config)
    : lr_(learning_rate), cfg_(config), m_(size), v_(size) {}

void Adam::step(std::span<double> theta, std::span<const double> grad) {
    if (theta.size() != m_.size() || grad.size() != m_.size()) {
        throw DimensionError("Adam step size mismatch");
    }
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
        v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
        theta[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + cfg_.epsilon);
    }
}

bool EarlyStopper::update(double error) {
    improved_ = error < best_;
    if (improved_) {
        best_ = error;
        best_epoch_ = epoch_;
        stale_ = 0;
    } else {
        ++stale_;
    }
    ++epoch_;
    return cfg_.enabled && best_ < cfg_.threshold && stale_ >= cfg_.patience;
}

std::vector<CMatrix> loss_observables(LossKind kind, std::size_t classes, std::size_t n_qubits) {
    if (kind == LossKind::Hinge) {
        return {Observable::z(0).matrix(n_qubits)};
    }
    if (classes > (std::size_t{1} << n_qubits)) {
        throw CapacityError(
            fmt::format("{} classes exceed the {} basis states of {} qubits", classes,
                        std::size_t{1} << n_qubits, n_qubits));
    }
    std::vector<CMatrix> obs;
    for (std::size_t k = 0; k < classes; ++k) {
        obs.push_back(Observable::projector(k).matrix(n_qubits));
    }
    return obs;
}

namespace {

std::vector<StateVector> gather(std::span<const StateVector> states,
                                std::span<const std::size_t> idx) {
    std::vector<StateVector> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        out.push_back(states[i]);
    }
    return out;
}

void add_projector(CMatrix &r, const StateVector &psi, double c) {
    const auto a = psi.amplitudes();
    const std::size_t d = a.size();
    for (std::size_t i = 0; i < d; ++i) {
        const cplx ai = c * a[i];
        cplx *row = &r(i, 0);
        for (std::size_t j = 0; j < d; ++j) {
            row[j] += ai * std::conj(a[j]);
        }
    }
}

void check_data(const WeightedData &data) {
    if (data.states.size() != data.targets.size() || data.states.size() != data.weights.size()) {
        throw DimensionError("states, targets and weights differ in length");
    }
}

} // namespace

LossGrad hinge_loss(const CircuitModel &model, const ParamVector &theta, const WeightedData &data,
                    std::span<const std::size_t> batch) {
    check_data(data);
    const std::size_t n = model.ansatz.n_qubits();
    const auto obs = loss_observables(LossKind::Hinge, 2, n);
    const auto sub = gather(data.states, batch);
    const auto h = expectation_table(model, theta, obs, sub).front();

    CMatrix r(model.ansatz.dim(), model.ansatz.dim());
    double loss = 0.0;
    bool any_active = false;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const std::size_t m = batch[b];
        const int y = data.targets[m];
        if (y != 1 && y != -1) {
            throw InvariantError(fmt::format("hinge label {} is not -1 or +1", y));
        }
        const double w = data.weights[m];
        const double slack = 1.0 - y * h[b];
        if (slack > 0.0) {
            loss += w * slack;
        }
        if (slack > tol::hinge_margin && w != 0.0) {
            add_projector(r, sub[b], -w * y);
            any_active = true;
        }
    }
    LossGrad out{loss, std::vector<double>(theta.size())};
    if (any_active) {
        out.grad = adjoint_value_grad(model, theta, obs.front(), r).grad;
    }
    return out;
}

LossGrad cross_entropy_loss(const CircuitModel &model, const ParamVector &theta,
                            const WeightedData &data, std::span<const std::size_t> batch,
                            std::size_t classes) {
    check_data(data);
    const std::size_t n = model.ansatz.n_qubits();
    const auto obs = loss_observables(LossKind::CrossEntropy, classes, n);
    const auto sub = gather(data.states, batch);
    const auto h = expectation_table(model, theta, obs, sub);

    const std::size_t d = model.ansatz.dim();
    std::vector<CMatrix> r(classes, CMatrix(d, d));
    double loss = 0.0;
    std::vector<double> p(classes);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const std::size_t m = batch[b];
        const int y = data.targets[m];
        if (y < 0 || static_cast<std::size_t>(y) >= classes) {
            throw InvariantError(fmt::format("class label {} outside [0, {})", y, classes));
        }
        double hmax = h[0][b];
        for (std::size_t k = 1; k < classes; ++k) {
            hmax = std::max(hmax, h[k][b]);
        }
        double z = 0.0;
        for (std::size_t k = 0; k < classes; ++k) {
            p[k] = std::exp(h[k][b] - hmax);
            z += p[k];
        }
        const double w = data.weights[m];
        loss += w * (std::log(z) + hmax - h[static_cast<std::size_t>(y)][b]);
        if (w == 0.0) {
            continue;
        }
        for (std::size_t k = 0; k < classes; ++k) {
            const double coeff = w * (p[k] / z - (static_cast<std::size_t>(y) == k ? 1.0 : 0.0));
            add_projector(r[k], sub[b], coeff);
        }
    }
    LossGrad out{loss, std::vector<double>(theta.size())};
    for (std::size_t k = 0; k < classes; ++k) {
        const auto g = adjoint_value_grad(model, theta, obs[k], r[k]).grad;
        for (std::size_t j = 0; j < g.size(); ++j) {
            out.grad[j] += g[j];
        }
    }
    return out;
}

std::vector<int> predict_base(const CircuitModel &model, const BaseClassifier &clf,
                              std::span<const StateVector> states) {
    const auto obs = loss_observables(clf.kind, clf.classes, model.ansatz.n_qubits());
    const auto h = expectation_table(model, clf.theta, obs, states);
    std::vector<int> pred(states.size());
    for (std::size_t m = 0; m < states.size(); ++m) {
        if (clf.kind == LossKind::Hinge) {
            pred[m] = h[0][m] >= 0.0 ? 1 : -1;
            continue;
        }
        std::size_t best = 0;
        for (std::size_t k = 1; k < h.size(); ++k) {
            if (h[k][m] > h[best][m]) {
                best = k;
            }
        }
        pred[m] = static_cast<int>(best);
    }
    return pred;
}

double weighted_error(std::span<const int> predictions, std::span<const int> targets,
                      std::span<const double> weights) {
    if (predictions.size() != targets.size() || targets.size() != weights.size()) {
        throw DimensionError("weighted_error inputs differ in length");
    }
    double e = 0.0;
    for (std::size_t m = 0; m < targets.size(); ++m) {
        if (predictions[m] != targets[m]) {
            e += weights[m];
        }
    }
    return e;
}

BaseClassifier train_base(const CircuitModel &model, const WeightedData &data, LossKind kind,
                          std::size_t classes, const TrainConfig &config) {
    config.validate();
    check_data(data);
    if (data.states.empty()) {
        throw InvariantError("training data is empty");
    }
    double wsum = 0.0;
    for (double w : data.weights) {
        if (!(w >= 0.0)) {
            throw InvariantError("sample weights must be non-negative");
        }
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > tol::weight_sum) {
        throw InvariantError(fmt::format("sample weights sum to {}, expected 1", wsum));
    }

    Rng init_rng(config.seed, 0);
    Rng shuffle_rng(config.seed, 1);
    ParamVector theta = ParamVector::gaussian(model.ansatz.param_count(), init_rng);
    Adam adam(theta.size(), config.learning_rate, config.adam);
    EarlyStopper stopper(config.early_stop);

    BaseClassifier clf;
    clf.kind = kind;
    clf.classes = kind == LossKind::Hinge ? 2 : classes;
    clf.theta = theta;

    const std::size_t count = data.states.size();
    std::vector<std::size_t> order(count);
    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        shuffle_rng.shuffle(std::span<std::size_t>(order));
        for (std::size_t start = 0; start < count; start += config.batch_size) {
            const std::size_t stop = std::min(count, start + config.batch_size);
            const std::span<const std::size_t> batch(order.data() + start, stop - start);
            const LossGrad lg = kind == LossKind::Hinge
                                    ? hinge_loss(model, theta, data, batch)
                                    : cross_entropy_loss(model, theta, data, batch, classes);
            adam.step(theta.values(), lg.grad);
        }
        BaseClassifier probe;
        probe.kind = clf.kind;
        probe.classes = clf.classes;
        probe.theta = theta;
        const auto pred = predict_base(model, probe, data.states);
        const double err = weighted_error(pred, data.targets, data.weights);
        clf.epoch_errors.push_back(err);
        const bool halt = stopper.update(err);
        if (stopper.improved()) {
            clf.theta = theta;
            clf.best_epoch = epoch;
        }
        if (halt) {
            break;
        }
    }
    return clf;
}

} // namespace tdtree
