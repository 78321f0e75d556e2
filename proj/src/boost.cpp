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

#include "tdtree/boost.hpp"

#include "tdtree/error.hpp"
#include "tdtree/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace tdtree {

std::string to_string(Termination t) {
    switch (t) {
    case Termination::Converged:
        return "converged";
    case Termination::MaxRounds:
        return "max_rounds";
    case Termination::WeakFail:
        return "weak_fail";
    }
    return "?";
}

double binary_alpha(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw InvariantError(fmt::format("alpha undefined for epsilon = {}", epsilon));
    }
    return 0.5 * std::log((1.0 - epsilon) / epsilon);
}

double multiclass_alpha(double epsilon, std::size_t classes) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || classes < 2) {
        throw InvariantError(fmt::format("alpha undefined for epsilon = {}, K = {}", epsilon, classes));
    }
    return std::log((1.0 - epsilon) / epsilon) + std::log(static_cast<double>(classes - 1));
}

double multiclass_threshold(std::size_t classes) {
    return static_cast<double>(classes - 1) / static_cast<double>(classes);
}

double gamma_bound(std::span<const double> epsilons) {
    double s = 0.0;
    for (double e : epsilons) {
        s += (0.5 - e) * (0.5 - e);
    }
    return std::exp(-2.0 * s);
}

namespace {

void check_boost_data(const BoostData &data) {
    if (data.states.size() != data.targets.size()) {
        throw DimensionError("boosting states and targets differ in length");
    }
    if (data.states.empty()) {
        throw InvariantError("boosting data is empty");
    }
}

TrainConfig member_config(const TrainConfig &train, std::uint64_t base_seed, std::uint64_t node_id,
                          std::size_t round) {
    TrainConfig cfg = train;
    cfg.seed = derive_seed(base_seed, node_id, round);
    return cfg;
}

} // namespace

BoostEnsemble boost_binary(const CircuitModel &model, const BoostData &data,
                           const BoostConfig &boost, const TrainConfig &train,
                           std::uint64_t base_seed, std::uint64_t node_id) {
    check_boost_data(data);
    if (boost.max_rounds == 0) {
        throw ConfigError("max_rounds must be positive");
    }
    bool has_pos = false;
    bool has_neg = false;
    for (int y : data.targets) {
        if (y == 1) {
            has_pos = true;
        } else if (y == -1) {
            has_neg = true;
        } else {
            throw InvariantError(fmt::format("binary label {} is not -1 or +1", y));
        }
    }
    if (!has_pos || !has_neg) {
        throw InvariantError("binary boosting needs both labels present");
    }

    const std::size_t count = data.states.size();
    BoostEnsemble ens;
    ens.binary = true;
    ens.classes = 2;
    ens.weights.emplace_back(count, 1.0 / static_cast<double>(count));
    std::vector<double> eps_trace;
    ens.termination = Termination::MaxRounds;

    for (std::size_t t = 1; t <= boost.max_rounds; ++t) {
        const auto &w = ens.weights.back();
        const TrainConfig cfg = member_config(train, base_seed, node_id, t);
        BaseClassifier clf =
            train_base(model, {data.states, data.targets, w}, LossKind::Hinge, 2, cfg);
        ens.total_epochs += clf.epochs_used();
        const auto pred = predict_base(model, clf, data.states);
        const double eps = weighted_error(pred, data.targets, w);
        if (eps >= 0.5) {
            ens.termination = Termination::WeakFail;
            ens.failed_epsilon = eps;
            break;
        }
        eps_trace.push_back(eps);
        const double gamma = gamma_bound(eps_trace);
        const double alpha = binary_alpha(eps > 0.0 ? eps : 0.5 / static_cast<double>(count));

        std::vector<double> next(count);
        double z = 0.0;
        for (std::size_t m = 0; m < count; ++m) {
            next[m] = w[m] * std::exp(-alpha * data.targets[m] * pred[m]);
            z += next[m];
        }
        for (auto &v : next) {
            v /= z;
        }
        ens.members.push_back({std::move(clf), alpha, eps, cfg.seed});
        ens.gamma.push_back(gamma);
        ens.normalizers.push_back(z);
        ens.weights.push_back(std::move(next));
        if (gamma < boost.tau) {
            ens.termination = Termination::Converged;
            break;
        }
    }
    return ens;
}

BoostEnsemble boost_multiclass(const CircuitModel &model, const BoostData &data,
                               std::size_t classes, const BoostConfig &boost,
                               const TrainConfig &train, std::uint64_t base_seed,
                               std::uint64_t node_id) {
    check_boost_data(data);
    if (classes < 2) {
        throw InvariantError("multi-class boosting needs K >= 2");
    }
    if (boost.max_rounds == 0) {
        throw ConfigError("max_rounds must be positive");
    }
    const std::size_t count = data.states.size();
    const double limit = multiclass_threshold(classes);
    TrainConfig base_train = train;
    base_train.early_stop.threshold = limit;

    BoostEnsemble ens;
    ens.binary = false;
    ens.classes = classes;
    ens.weights.emplace_back(count, 1.0 / static_cast<double>(count));

    for (std::size_t t = 1; t <= boost.max_rounds; ++t) {
        const auto &w = ens.weights.back();
        const TrainConfig cfg = member_config(base_train, base_seed, node_id, t);
        BaseClassifier clf =
            train_base(model, {data.states, data.targets, w}, LossKind::CrossEntropy, classes, cfg);
        ens.total_epochs += clf.epochs_used();
        const auto pred = predict_base(model, clf, data.states);
        const double eps = weighted_error(pred, data.targets, w);
        if (eps >= limit) {
            ens.termination = Termination::WeakFail;
            ens.failed_epsilon = eps;
            break;
        }
        const double alpha =
            multiclass_alpha(eps > 0.0 ? eps : 0.5 / static_cast<double>(count), classes);
        std::vector<double> next(count);
        double z = 0.0;
        for (std::size_t m = 0; m < count; ++m) {
            next[m] = pred[m] != data.targets[m] ? w[m] * std::exp(alpha) : w[m];
            z += next[m];
        }
        for (auto &v : next) {
            v /= z;
        }
        ens.members.push_back({std::move(clf), alpha, eps, cfg.seed});
        ens.normalizers.push_back(z);
        ens.weights.push_back(std::move(next));
    }
    return ens;
}

std::vector<std::vector<int>> member_votes(const CircuitModel &model, const BoostEnsemble &ens,
                                           std::span<const StateVector> states) {
    std::vector<std::vector<int>> votes;
    votes.reserve(ens.members.size());
    for (const auto &m : ens.members) {
        votes.push_back(predict_base(model, m.classifier, states));
    }
    return votes;
}

std::vector<BinaryPrediction> combine_binary(const BoostEnsemble &ens,
                                             const std::vector<std::vector<int>> &votes,
                                             std::size_t members) {
    if (members == 0 || members > ens.members.size() || votes.size() < members) {
        throw RuntimeFailure(fmt::format("cannot combine {} of {} members", members,
                                         ens.members.size()));
    }
    const std::size_t count = votes.front().size();
    double total = 0.0;
    for (std::size_t t = 0; t < members; ++t) {
        total += ens.members[t].alpha;
    }
    std::vector<BinaryPrediction> out(count);
    for (std::size_t m = 0; m < count; ++m) {
        double s = 0.0;
        for (std::size_t t = 0; t < members; ++t) {
            s += ens.members[t].alpha * votes[t][m];
        }
        const double margin = s / total;
        out[m] = {margin >= 0.0 ? 1 : -1, margin};
    }
    return out;
}

std::vector<int> combine_multiclass(const BoostEnsemble &ens,
                                    const std::vector<std::vector<int>> &votes,
                                    std::size_t members) {
    if (members == 0 || members > ens.members.size() || votes.size() < members) {
        throw RuntimeFailure(fmt::format("cannot combine {} of {} members", members,
                                         ens.members.size()));
    }
    const std::size_t count = votes.front().size();
    std::vector<int> out(count);
    std::vector<double> score(ens.classes);
    for (std::size_t m = 0; m < count; ++m) {
        std::fill(score.begin(), score.end(), 0.0);
        for (std::size_t t = 0; t < members; ++t) {
            score[static_cast<std::size_t>(votes[t][m])] += ens.members[t].alpha;
        }
        out[m] = static_cast<int>(std::max_element(score.begin(), score.end()) - score.begin());
    }
    return out;
}

std::vector<BinaryPrediction> predict_binary(const CircuitModel &model, const BoostEnsemble &ens,
                                             std::span<const StateVector> states) {
    if (!ens.usable()) {
        throw RuntimeFailure("ensemble has no members");
    }
    return combine_binary(ens, member_votes(model, ens, states), ens.members.size());
}

std::vector<int> predict_multiclass(const CircuitModel &model, const BoostEnsemble &ens,
                                    std::span<const StateVector> states) {
    if (!ens.usable()) {
        throw RuntimeFailure("ensemble has no members");
    }
    return combine_multiclass(ens, member_votes(model, ens, states), ens.members.size());
}

std::vector<std::size_t> curve_checkpoints(std::size_t size, std::size_t step) {
    std::vector<std::size_t> out;
    if (size == 0) {
        return out;
    }
    for (std::size_t c = 1; c < size; c += step) {
        out.push_back(c);
    }
    out.push_back(size);
    return out;
}

std::vector<std::pair<std::size_t, double>>
accuracy_curve(const CircuitModel &model, const BoostEnsemble &ens, const BoostData &eval,
               std::span<const std::size_t> checkpoints) {
    check_boost_data(eval);
    const auto votes = member_votes(model, ens, eval.states);
    std::vector<std::pair<std::size_t, double>> out;
    std::vector<std::size_t> points(checkpoints.begin(), checkpoints.end());
    if (points.empty() || points.back() != ens.members.size()) {
        points.push_back(ens.members.size());
    }
    for (std::size_t c : points) {
        std::size_t correct = 0;
        if (ens.binary) {
            const auto pred = combine_binary(ens, votes, c);
            for (std::size_t m = 0; m < pred.size(); ++m) {
                correct += pred[m].label == eval.targets[m] ? 1 : 0;
            }
        } else {
            const auto pred = combine_multiclass(ens, votes, c);
            for (std::size_t m = 0; m < pred.size(); ++m) {
                correct += pred[m] == eval.targets[m] ? 1 : 0;
            }
        }
        out.emplace_back(c, static_cast<double>(correct) / static_cast<double>(eval.targets.size()));
    }
    return out;
}

void write_round_log(std::ostream &out, const BoostEnsemble &ens, bool header) {
    if (header) {
        out << "t,epsilon_t,alpha_t,gamma_t,epochs_used\n";
    }
    for (std::size_t t = 0; t < ens.members.size(); ++t) {
        const auto &m = ens.members[t];
        out << fmt::format("{},{:.17g},{:.17g},{},{}\n", t + 1, m.epsilon, m.alpha,
                           ens.binary ? fmt::format("{:.17g}", ens.gamma[t]) : std::string(),
                           m.classifier.epochs_used());
    }
}

} // namespace tdtree
