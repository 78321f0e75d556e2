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

#include "tdtree/learn.hpp"

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tdtree {

struct BoostConfig {
    std::size_t max_rounds = 150;
    /// Binary boosting stops once the error bound gamma_t drops below tau.
    double tau = 0.005;
};

enum class Termination { Converged, MaxRounds, WeakFail };
std::string to_string(Termination t);

struct BoostMember {
    BaseClassifier classifier;
    double alpha;
    double epsilon;
    std::uint64_t seed;
};

/**
 * @brief Trained AdaBoost ensemble.
 *
 * For binary ensembles gamma[t] = exp(-2 sum_{i<=t} (1/2 - eps_i)^2) over
 * stored members. weights[t] is the sample distribution member t was trained
 * on; weights.back() is the distribution after the last stored member.
 */
struct BoostEnsemble {
    bool binary = true;
    std::size_t classes = 2;
    std::vector<BoostMember> members;
    std::vector<double> gamma;
    std::vector<double> normalizers;
    std::vector<std::vector<double>> weights;
    Termination termination = Termination::MaxRounds;
    /// Error of the discarded round that ended boosting with WeakFail.
    double failed_epsilon = 0.0;
    /// Epochs of every trained base classifier, including a discarded one.
    std::size_t total_epochs = 0;

    [[nodiscard]] bool usable() const { return !members.empty(); }
};

/// alpha = 1/2 ln((1 - eps) / eps).
double binary_alpha(double epsilon);
/// alpha = ln((1 - eps) / eps) + ln(K - 1).
double multiclass_alpha(double epsilon, std::size_t classes);
/// Random-guess error (K - 1)/K: the weak-learner bound and the early-stop threshold.
double multiclass_threshold(std::size_t classes);
/// exp(-2 sum (1/2 - eps_i)^2).
double gamma_bound(std::span<const double> epsilons);

/// Labelled states for boosting; targets are -1/+1 (binary) or class indices.
struct BoostData {
    std::span<const StateVector> states;
    std::span<const int> targets;
};

/**
 * Binary AdaBoost with hinge-loss circuits.
 *
 * A round with eps >= 1/2 ends boosting with WeakFail and is discarded. A
 * round that drives gamma below tau is kept and ends boosting with Converged.
 * An exact eps = 0 is replaced by 1/(2M) when computing alpha. Member t trains with
 * seed derive_seed(base_seed, node_id, t).
 */
BoostEnsemble boost_binary(const CircuitModel &model, const BoostData &data,
                           const BoostConfig &boost, const TrainConfig &train,
                           std::uint64_t base_seed, std::uint64_t node_id = 0);

/// Multi-class AdaBoost (SAMME form) with cross-entropy circuits; a round with
/// eps >= (K - 1)/K ends boosting and is discarded.
BoostEnsemble boost_multiclass(const CircuitModel &model, const BoostData &data,
                               std::size_t classes, const BoostConfig &boost,
                               const TrainConfig &train, std::uint64_t base_seed,
                               std::uint64_t node_id = 0);

/// votes[t][m]: member t's prediction on state m.
std::vector<std::vector<int>> member_votes(const CircuitModel &model, const BoostEnsemble &ens,
                                           std::span<const StateVector> states);

struct BinaryPrediction {
    int label;
    double margin;
};

/// Prediction of the first `members` members from precomputed votes. The
/// margin is sum alpha_t h_t / sum alpha_t; sign(0) = +1.
std::vector<BinaryPrediction> combine_binary(const BoostEnsemble &ens,
                                             const std::vector<std::vector<int>> &votes,
                                             std::size_t members);
/// argmax_k sum alpha_t 1[h_t = k] of the first `members` members, lowest k on ties.
std::vector<int> combine_multiclass(const BoostEnsemble &ens,
                                    const std::vector<std::vector<int>> &votes,
                                    std::size_t members);

/// Throws RuntimeFailure on an ensemble without members.
std::vector<BinaryPrediction> predict_binary(const CircuitModel &model, const BoostEnsemble &ens,
                                             std::span<const StateVector> states);
std::vector<int> predict_multiclass(const CircuitModel &model, const BoostEnsemble &ens,
                                    std::span<const StateVector> states);

/// Checkpoints 1, 1 + step, 1 + 2 step, ... below size, then size itself.
std::vector<std::size_t> curve_checkpoints(std::size_t size, std::size_t step = 5);

/// (member count, accuracy) of truncated ensembles at each checkpoint.
std::vector<std::pair<std::size_t, double>>
accuracy_curve(const CircuitModel &model, const BoostEnsemble &ens, const BoostData &eval,
               std::span<const std::size_t> checkpoints);

/// CSV header and rows `t,epsilon_t,alpha_t,gamma_t,epochs_used`.
void write_round_log(std::ostream &out, const BoostEnsemble &ens, bool header = true);

} // namespace tdtree
