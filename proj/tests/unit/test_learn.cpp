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
#include "tdtree/learn.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace tdtree;
using Catch::Matchers::WithinAbs;

namespace {

StateVector random_state(std::size_t n, Rng &rng) {
    std::vector<cplx> a(std::size_t{1} << n);
    double norm = 0.0;
    for (auto &x : a) {
        x = cplx(rng.normal(), rng.normal());
        norm += std::norm(x);
    }
    for (auto &x : a) {
        x /= std::sqrt(norm);
    }
    return StateVector(n, a);
}

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

template <typename F>
double central_difference(F &&f, const ParamVector &theta, std::size_t j, double d = 1e-5) {
    ParamVector p = theta;
    ParamVector m = theta;
    p[j] += d;
    m[j] -= d;
    return (f(p) - f(m)) / (2 * d);
}

} // namespace

TEST_CASE("Adam first iterates follow the bias-corrected recursion", "[learn]") {
    const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    Adam adam(2, lr);
    std::vector<double> theta{0.5, -1.0};
    const std::vector<std::vector<double>> grads{{0.2, -3.0}, {-0.1, 1.0}, {0.4, 0.5}};
    std::vector<double> ref = theta, m(2, 0.0), v(2, 0.0);
    for (std::size_t t = 1; t <= 3; ++t) {
        adam.step(theta, grads[t - 1]);
        for (std::size_t i = 0; i < 2; ++i) {
            m[i] = b1 * m[i] + (1 - b1) * grads[t - 1][i];
            v[i] = b2 * v[i] + (1 - b2) * grads[t - 1][i] * grads[t - 1][i];
            const double mh = m[i] / (1 - std::pow(b1, static_cast<double>(t)));
            const double vh = v[i] / (1 - std::pow(b2, static_cast<double>(t)));
            ref[i] -= lr * mh / (std::sqrt(vh) + eps);
            CHECK_THAT(theta[i], WithinAbs(ref[i], 1e-15));
        }
    }
    // First step moves each coordinate by lr against the gradient sign.
    Adam fresh(1, 0.005);
    std::vector<double> x{0.0};
    fresh.step(x, std::vector<double>{7.0});
    CHECK_THAT(x[0], WithinAbs(-0.005, 1e-10));
}

TEST_CASE("early stopping fires after exactly `patience` stale epochs", "[learn]") {
    EarlyStopper es({true, 0.5, 10});
    CHECK_FALSE(es.update(0.4));
    CHECK(es.improved());
    for (int i = 1; i < 10; ++i) {
        CHECK_FALSE(es.update(0.4)); // equal is not an improvement
    }
    CHECK(es.update(0.45));
    CHECK(es.stale() == 10);
    CHECK(es.best_epoch() == 0);

    // Above the threshold patience never fires.
    EarlyStopper high({true, 0.5, 3});
    for (int i = 0; i < 20; ++i) {
        CHECK_FALSE(high.update(0.6));
    }
    EarlyStopper off({false, 0.5, 1});
    off.update(0.1);
    CHECK_FALSE(off.update(0.2));
}

TEST_CASE("multi-class early-stop threshold is (K - 1)/K", "[learn]") {
    CHECK_THAT(multiclass_threshold(6), WithinAbs(5.0 / 6.0, 1e-15));
    CHECK_THAT(multiclass_threshold(2), WithinAbs(0.5, 1e-15));
}

TEST_CASE("hinge loss examples", "[learn]") {
    const CircuitModel model{Ansatz(1, 1), {}};
    const std::vector<StateVector> states{StateVector::basis(1, 0)};
    const std::vector<int> y{1};
    const std::vector<double> w{1.0};
    const WeightedData data{states, y, w};
    const auto batch = all_indices(1);

    const auto inactive = hinge_loss(model, ParamVector::zeros(3), data, batch); // h = 1
    CHECK_THAT(inactive.value, WithinAbs(0.0, 1e-15));
    for (double g : inactive.grad) {
        CHECK(g == 0.0);
    }
    // h = cos(pi/3) = 0.5
    const auto half = hinge_loss(model, ParamVector({0.0, std::numbers::pi / 3, 0.0}), data, batch);
    CHECK_THAT(half.value, WithinAbs(0.5, 1e-12));
    CHECK_THAT(half.grad[1], WithinAbs(std::sin(std::numbers::pi / 3), 1e-12));
}

TEST_CASE("cross-entropy loss examples", "[learn]") {
    const CircuitModel model{Ansatz(1, 1), {}};
    const std::vector<double> w{1.0};
    const auto batch = all_indices(1);
    const std::vector<StateVector> zero{StateVector::basis(1, 0)};
    const std::vector<int> y0{0};
    const auto a = cross_entropy_loss(model, ParamVector::zeros(3), {zero, y0, w}, batch, 2);
    CHECK_THAT(a.value, WithinAbs(-std::log(std::exp(1.0) / (std::exp(1.0) + 1.0)), 1e-12));
    CHECK_THAT(a.value, WithinAbs(0.31326, 1e-5));
    // Ry(pi/2)|0> gives equal populations: loss ln 2.
    const auto b = cross_entropy_loss(model, ParamVector({0.0, std::numbers::pi / 2, 0.0}), {zero, y0, w},
                                      batch, 2);
    CHECK_THAT(b.value, WithinAbs(std::log(2.0), 1e-12));
}

TEST_CASE("loss gradients agree with finite differences", "[learn]") {
    Rng rng(41);
    for (const auto &noise : {NoiseSpec::none(), NoiseSpec::depolarizing(0.1)}) {
        const CircuitModel model{Ansatz(3, 3), noise};
        std::vector<StateVector> states;
        std::vector<int> yb, yc;
        std::vector<double> w;
        for (int i = 0; i < 6; ++i) {
            states.push_back(random_state(3, rng));
            yb.push_back(i % 2 == 0 ? 1 : -1);
            yc.push_back(i % 3);
            w.push_back(rng.uniform(0.05, 1.0));
        }
        const auto batch = all_indices(states.size());
        const auto theta = ParamVector::gaussian(model.ansatz.param_count(), rng);
        const WeightedData hd{states, yb, w};
        const WeightedData cd{states, yc, w};
        const auto h = hinge_loss(model, theta, hd, batch);
        const auto c = cross_entropy_loss(model, theta, cd, batch, 3);
        for (std::size_t j = 0; j < theta.size(); ++j) {
            const double fh = central_difference(
                [&](const ParamVector &t) { return hinge_loss(model, t, hd, batch).value; }, theta, j);
            const double fc = central_difference(
                [&](const ParamVector &t) { return cross_entropy_loss(model, t, cd, batch, 3).value; }, theta, j);
            CHECK_THAT(h.grad[j], WithinAbs(fh, 1e-6));
            CHECK_THAT(c.grad[j], WithinAbs(fc, 1e-6));
        }
    }
}

TEST_CASE("train_base is deterministic and returns the best epoch", "[learn]") {
    Rng rng(42);
    std::vector<StateVector> states;
    std::vector<int> y;
    for (int i = 0; i < 20; ++i) {
        const int label = i % 2 == 0 ? 1 : -1;
        const double angle = (label > 0 ? 0.3 : 2.6) + 0.3 * rng.uniform();
        states.push_back(StateVector(1, {std::cos(angle / 2), std::sin(angle / 2)}));
        y.push_back(label);
    }
    const std::vector<double> w(20, 0.05);
    TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.learning_rate = 0.05;
    cfg.max_epochs = 30;
    cfg.seed = 99;
    const CircuitModel model{Ansatz(1, 2), {}};
    const auto a = train_base(model, {states, y, w}, LossKind::Hinge, 2, cfg);
    const auto b = train_base(model, {states, y, w}, LossKind::Hinge, 2, cfg);
    CHECK(std::vector<double>(a.theta.values().begin(), a.theta.values().end()) ==
          std::vector<double>(b.theta.values().begin(), b.theta.values().end()));
    CHECK(a.epoch_errors == b.epoch_errors);
    const auto best = *std::min_element(a.epoch_errors.begin(), a.epoch_errors.end());
    CHECK(a.epoch_errors[a.best_epoch] == best);
    CHECK_THAT(weighted_error(predict_base(model, a, states), y, w), WithinAbs(best, 1e-12));
}

TEST_CASE("train config validation", "[learn]") {
    TrainConfig cfg;
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.learning_rate = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
