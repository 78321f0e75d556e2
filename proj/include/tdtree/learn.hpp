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

#pragma once

#include "tdtree/circuit.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace tdtree {

enum class LossKind { Hinge, CrossEntropy };

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct EarlyStopConfig {
    bool enabled = true;
    /// Stopping is allowed only once the best error is below this value.
    double threshold = 0.5;
    std::size_t patience = 10;
};

struct TrainConfig {
    std::size_t batch_size = 200;
    double learning_rate = 0.005;
    std::size_t max_epochs = 100;
    AdamConfig adam;
    EarlyStopConfig early_stop;
    std::uint64_t seed = 0;

    /// Throws ConfigError on non-positive sizes or rates.
    void validate() const;
};

class Adam {
  public:
    Adam(std::size_t size, double learning_rate, AdamConfig config = {});

    /// theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
    void step(std::span<double> theta, std::span<const double> grad);
    [[nodiscard]] std::size_t steps() const { return t_; }

  private:
    double lr_;
    AdamConfig cfg_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::size_t t_ = 0;
};

/**
 * @brief Tracks per-epoch error and decides when to stop.
 *
 * An epoch improves only if its error is strictly below the best so far. Stop
 * once the best error is below the threshold and `patience` consecutive
 * epochs have failed to improve.
 */
class EarlyStopper {
  public:
    explicit EarlyStopper(EarlyStopConfig config) : cfg_(config) {}

    /// Records one epoch; returns true when training should halt.
    bool update(double error);
    /// True when the last update set a new best.
    [[nodiscard]] bool improved() const { return improved_; }
    [[nodiscard]] double best() const { return best_; }
    /// Zero-based index of the best epoch.
    [[nodiscard]] std::size_t best_epoch() const { return best_epoch_; }
    [[nodiscard]] std::size_t stale() const { return stale_; }

  private:
    EarlyStopConfig cfg_;
    double best_ = std::numeric_limits<double>::infinity();
    std::size_t best_epoch_ = 0;
    std::size_t epoch_ = 0;
    std::size_t stale_ = 0;
    bool improved_ = false;
};

/// Encoded training samples with targets and AdaBoost weights. Hinge targets
/// are -1/+1; cross-entropy targets are class indices.
struct WeightedData {
    std::span<const StateVector> states;
    std::span<const int> targets;
    std::span<const double> weights;
};

struct LossGrad {
    double value;
    std::vector<double> grad;
};

/// Observables of a base classifier: Z on qubit 0 for hinge, |k><k| for k < K.
std::vector<CMatrix> loss_observables(LossKind kind, std::size_t classes, std::size_t n_qubits);

/// sum_m w_m max(0, 1 - y_m h_m) over `batch` (indices into data) and its gradient.
LossGrad hinge_loss(const CircuitModel &model, const ParamVector &theta, const WeightedData &data,
                    std::span<const std::size_t> batch);

/// sum_m w_m (-ln softmax(h_m)[y_m]) with h_mk = <Pi_k> and its gradient.
LossGrad cross_entropy_loss(const CircuitModel &model, const ParamVector &theta,
                            const WeightedData &data, std::span<const std::size_t> batch,
                            std::size_t classes);

/// A trained circuit. Hinge classifiers predict sign(<Z_1>) with sign(0) = +1;
/// cross-entropy classifiers predict argmax_k <Pi_k> (lowest k on ties).
struct BaseClassifier {
    LossKind kind = LossKind::Hinge;
    std::size_t classes = 2;
    ParamVector theta;
    /// Weighted 0-1 train error after each epoch.
    std::vector<double> epoch_errors;
    std::size_t best_epoch = 0;
    [[nodiscard]] std::size_t epochs_used() const { return epoch_errors.size(); }
};

/// Predicted targets (-1/+1 or class index) for each state.
std::vector<int> predict_base(const CircuitModel &model, const BaseClassifier &clf,
                              std::span<const StateVector> states);

/// Sum of weights of mispredicted samples.
double weighted_error(std::span<const int> predictions, std::span<const int> targets,
                      std::span<const double> weights);

/**
 * Mini-batch Adam training of one base classifier.
 *
 * theta starts i.i.d. standard normal from config.seed. Each epoch shuffles
 * the samples, steps over batches (the last may be short) with globally
 * normalized weights, then records the weighted train error. Returns the
 * parameters of the lowest recorded error.
 */
BaseClassifier train_base(const CircuitModel &model, const WeightedData &data, LossKind kind,
                          std::size_t classes, const TrainConfig &config);

} // namespace tdtree
