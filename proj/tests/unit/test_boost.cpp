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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace tdtree;
using Catch::Matchers::WithinAbs;

namespace {

BoostEnsemble ensemble_with_alphas(std::vector<double> alphas, bool binary = true) {
    BoostEnsemble e;
    e.binary = binary;
    e.classes = binary ? 2 : 3;
    for (double a : alphas) {
        e.members.push_back({BaseClassifier{}, a, 0.1, 0});
    }
    return e;
}

/// Two noisy 1-qubit clusters labelled -1/+1.
struct Toy {
    std::vector<StateVector> states;
    std::vector<int> targets;
};

Toy toy_data(std::uint64_t seed, std::size_t count) {
    Rng rng(seed);
    Toy t;
    for (std::size_t i = 0; i < count; ++i) {
        const int y = i % 2 == 0 ? 1 : -1;
        const double angle = (y > 0 ? 0.8 : 2.3) + 0.9 * (rng.uniform() - 0.5);
        t.states.push_back(StateVector(1, {std::cos(angle / 2), std::sin(angle / 2)}));
        t.targets.push_back(y);
    }
    return t;
}

TrainConfig small_train() {
    TrainConfig cfg;
    cfg.batch_size = 16;
    cfg.learning_rate = 0.05;
    cfg.max_epochs = 15;
    return cfg;
}

} // namespace

TEST_CASE("binary AdaBoost formulas", "[boost]") {
    CHECK_THAT(binary_alpha(0.25), WithinAbs(0.5 * std::log(3.0), 1e-15));
    CHECK_THAT(binary_alpha(0.25), WithinAbs(0.54931, 1e-5));
    const double eps = 0.25;
    const double alpha = binary_alpha(eps);
    const double z = (1 - eps) * std::exp(-alpha) + eps * std::exp(alpha);
    CHECK_THAT(z, WithinAbs(std::sqrt(3.0) / 2.0, 1e-15));
    const std::vector<double> three{0.4, 0.4, 0.4};
    CHECK_THAT(gamma_bound(three), WithinAbs(std::exp(-0.06), 1e-15));
    CHECK_THAT(gamma_bound(three), WithinAbs(0.94176, 1e-5));
    CHECK_THROWS_AS(binary_alpha(0.0), InvariantError);
}

TEST_CASE("multi-class AdaBoost formulas", "[boost]") {
    CHECK_THAT(multiclass_alpha(0.5, 3), WithinAbs(std::log(2.0), 1e-15));
    for (double eps : {0.1, 0.3, 0.45}) {
        CHECK_THAT(multiclass_alpha(eps, 2), WithinAbs(2 * binary_alpha(eps), 1e-14));
    }
}

TEST_CASE("binary combination examples", "[boost]") {
    const auto one = ensemble_with_alphas({0.7});
    const std::vector<std::vector<int>> v1{{1, -1}};
    const auto p1 = combine_binary(one, v1, 1);
    CHECK(p1[0].label == 1);
    CHECK(p1[1].label == -1);
    CHECK(p1[0].margin == 1.0);
    CHECK(p1[1].margin == -1.0);

    const auto two = ensemble_with_alphas({0.8, 0.2});
    const std::vector<std::vector<int>> v2{{1, -1, 1}, {-1, -1, 1}};
    const auto p2 = combine_binary(two, v2, 2);
    CHECK_THAT(p2[0].margin, WithinAbs(0.6, 1e-15));
    CHECK(p2[1].margin == -1.0);
    CHECK(p2[2].margin == 1.0);

    const auto tie = ensemble_with_alphas({0.5, 0.5});
    const std::vector<std::vector<int>> vt{{1}, {-1}};
    CHECK(combine_binary(tie, vt, 2)[0].label == 1); // sign(0) = +1
}

TEST_CASE("multi-class combination breaks ties to the lower class", "[boost]") {
    const auto e = ensemble_with_alphas({0.5, 0.5, 0.2}, false);
    const std::vector<std::vector<int>> votes{{2, 0}, {1, 0}, {1, 2}};
    const auto p = combine_multiclass(e, votes, 3);
    CHECK(p[0] == 1);
    CHECK(p[1] == 0);
    CHECK(combine_multiclass(e, votes, 2)[0] == 1);
}

TEST_CASE("curve checkpoints", "[boost]") {
    CHECK(curve_checkpoints(1) == std::vector<std::size_t>{1});
    CHECK(curve_checkpoints(12) == std::vector<std::size_t>{1, 6, 11, 12});
    CHECK(curve_checkpoints(11) == std::vector<std::size_t>{1, 6, 11});
}

TEST_CASE("binary boosting satisfies the AdaBoost identities", "[boost]") {
    const Toy data = toy_data(51, 60);
    const CircuitModel model{Ansatz(1, 1), {}};
    BoostConfig cfg;
    cfg.max_rounds = 8;
    const auto ens = boost_binary(model, {data.states, data.targets}, cfg, small_train(), 7, 3);
    REQUIRE(ens.usable());
    REQUIRE(ens.weights.size() == ens.members.size() + 1);
    std::vector<double> eps;
    const auto votes = member_votes(model, ens, data.states);
    for (std::size_t t = 0; t < ens.members.size(); ++t) {
        const auto &m = ens.members[t];
        CHECK(m.seed == derive_seed(7, 3, t + 1));
        eps.push_back(m.epsilon);
        CHECK_THAT(ens.gamma[t], WithinAbs(gamma_bound(eps), 1e-12));
        if (t > 0) {
            CHECK(ens.gamma[t] <= ens.gamma[t - 1]);
        }
        double wrong_before = 0.0;
        double wrong_after = 0.0;
        double sum_after = 0.0;
        for (std::size_t i = 0; i < data.states.size(); ++i) {
            const bool wrong = votes[t][i] != data.targets[i];
            wrong_before += wrong ? ens.weights[t][i] : 0.0;
            wrong_after += wrong ? ens.weights[t + 1][i] : 0.0;
            sum_after += ens.weights[t + 1][i];
        }
        CHECK_THAT(wrong_before, WithinAbs(m.epsilon, 1e-12));
        CHECK_THAT(sum_after, WithinAbs(1.0, 1e-12));
        if (m.epsilon > 0.0) {
            CHECK_THAT(wrong_after, WithinAbs(0.5, 1e-10));
            CHECK_THAT(ens.normalizers[t], WithinAbs(2 * std::sqrt(m.epsilon * (1 - m.epsilon)), 1e-12));
        }
        // Prefix train error is bounded by gamma_t.
        const auto pred = combine_binary(ens, votes, t + 1);
        double err = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            err += pred[i].label != data.targets[i] ? 1.0 : 0.0;
        }
        CHECK(err / static_cast<double>(pred.size()) <= ens.gamma[t]);
    }
    const auto again = boost_binary(model, {data.states, data.targets}, cfg, small_train(), 7, 3);
    CHECK(again.gamma == ens.gamma);

    std::ostringstream log;
    write_round_log(log, ens);
    CHECK(log.str().rfind("t,epsilon_t,alpha_t,gamma_t,epochs_used\n", 0) == 0);
}

TEST_CASE("a perfect base classifier converges with the clamped alpha", "[boost]") {
    // Separable by <Z>: |0> versus |1>.
    std::vector<StateVector> states;
    std::vector<int> targets;
    for (int i = 0; i < 10; ++i) {
        states.push_back(StateVector::basis(1, i % 2));
        targets.push_back(i % 2 == 0 ? 1 : -1);
    }
    const CircuitModel model{Ansatz(1, 1), {}};
    TrainConfig train = small_train();
    train.learning_rate = 0.2;
    train.max_epochs = 40;
    BoostConfig cfg;
    cfg.max_rounds = 30;
    const auto ens = boost_binary(model, {states, targets}, cfg, train, 1, 1);
    CHECK(ens.termination == Termination::Converged);
    CHECK(ens.gamma.back() < cfg.tau);
    for (const auto &m : ens.members) {
        if (m.epsilon == 0.0) {
            CHECK_THAT(m.alpha, WithinAbs(binary_alpha(1.0 / 20.0), 1e-15));
        }
    }
}

TEST_CASE("weak learners at chance end boosting", "[boost]") {
    // Identical states with opposite labels: no classifier beats 1/2.
    std::vector<StateVector> states(8, StateVector::basis(1, 0));
    std::vector<int> targets{1, -1, 1, -1, 1, -1, 1, -1};
    const CircuitModel model{Ansatz(1, 1), {}};
    const auto ens = boost_binary(model, {states, targets}, {}, small_train(), 1, 1);
    CHECK(ens.termination == Termination::WeakFail);
    CHECK_FALSE(ens.usable());
    CHECK(ens.failed_epsilon == 0.5);
    CHECK(ens.total_epochs > 0);
    CHECK_THROWS_AS(predict_binary(model, ens, states), RuntimeFailure);

    std::vector<int> bad{1, 1, 1, 1, 1, 1, 1, 1};
    CHECK_THROWS_AS(boost_binary(model, {states, bad}, {}, small_train(), 1, 1), InvariantError);
}

TEST_CASE("multi-class boosting reweights only mistakes", "[boost]") {
    std::vector<StateVector> states;
    std::vector<int> targets;
    for (int i = 0; i < 12; ++i) {
        states.push_back(StateVector::basis(2, static_cast<std::size_t>(i % 3)));
        targets.push_back(i % 3);
    }
    const CircuitModel model{Ansatz(2, 1), {}};
    BoostConfig cfg;
    cfg.max_rounds = 3;
    const auto ens = boost_multiclass(model, {states, targets}, 3, cfg, small_train(), 2, 0);
    REQUIRE(ens.usable());
    const auto votes = member_votes(model, ens, states);
    for (std::size_t t = 0; t < ens.members.size(); ++t) {
        const double z = ens.normalizers[t];
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (votes[t][i] == targets[i]) {
                CHECK_THAT(ens.weights[t + 1][i] * z, WithinAbs(ens.weights[t][i], 1e-15));
            }
        }
    }
    const auto curve = accuracy_curve(model, ens, {states, targets}, curve_checkpoints(ens.members.size()));
    const auto full = predict_multiclass(model, ens, states);
    double acc = 0.0;
    for (std::size_t i = 0; i < full.size(); ++i) {
        acc += full[i] == targets[i] ? 1.0 : 0.0;
    }
    CHECK(curve.back().second == acc / static_cast<double>(full.size()));
}
