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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the exit status is nonzero when any criterion fails. Matrix algebra in the
// oracles goes through Eigen so that it shares no code with the library.

#include "tdtree/experiment.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>

namespace {

using namespace tdtree;
using Eigen::MatrixXcd;

struct Outcome {
    bool pass;
    std::string detail;
};

MatrixXcd to_eigen(const CMatrix &m) {
    MatrixXcd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
        }
    }
    return e;
}

CMatrix from_eigen(const MatrixXcd &e) {
    CMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
        for (Eigen::Index j = 0; j < e.cols(); ++j) {
            m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
        }
    }
    return m;
}

MatrixXcd ginibre(std::size_t dim, Rng &rng) {
    const auto d = static_cast<Eigen::Index>(dim);
    MatrixXcd g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            g(i, j) = cplx(rng.normal(), rng.normal());
        }
    }
    return g;
}

DensityMatrix random_mixed(std::size_t n, Rng &rng) {
    const MatrixXcd g = ginibre(std::size_t{1} << n, rng);
    MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(from_eigen(0.5 * (rho + rho.adjoint())));
}

MatrixXcd random_unitary(std::size_t dim, Rng &rng) {
    Eigen::HouseholderQR<MatrixXcd> qr(ginibre(dim, rng));
    return qr.householderQ();
}

/// Half the trace norm through Eigen's Hermitian eigensolver.
double oracle_trace_distance(const MatrixXcd &a, const MatrixXcd &b) {
    const MatrixXcd d = a - b;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

StateVector random_pure(std::size_t n, Rng &rng) {
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

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1. CPTP suite.

Outcome cptp_suite() {
    Rng rng(101);
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        const double g = rng.uniform();
        const double p = rng.uniform();
        for (const auto &spec : {NoiseSpec::gad(g, p), NoiseSpec::depolarizing(p), NoiseSpec::reset(p)}) {
            MatrixXcd sum = MatrixXcd::Zero(2, 2);
            for (const auto &e : kraus_ops(spec)) {
                const MatrixXcd k = to_eigen(e);
                sum += k.adjoint() * k;
            }
            worst = std::max(worst, (sum - MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff());
        }
    }
    double worst_dep = 0.0;
    for (int i = 0; i < 10; ++i) {
        const auto rho = random_mixed(1, rng);
        const auto out = apply_channel(rho, NoiseSpec::depolarizing(1.0), 0);
        const MatrixXcd half = 0.5 * MatrixXcd::Identity(2, 2);
        worst_dep = std::max(worst_dep, (to_eigen(out.matrix()) - half).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-12 && worst_dep <= 1e-12,
            fmt::format("max |sum E'E - I| = {:.2e}, max |D_1(rho) - I/2| = {:.2e}", worst, worst_dep)};
}

// ---------------------------------------------------------------------------
// 2. Trace-distance metric suite.

Outcome trace_distance_suite() {
    Rng rng(102);
    bool symmetric = true;
    double self = 0.0, ortho = 0.0, triangle = 0.0, invariance = 0.0, oracle = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
        const auto a = random_mixed(n, rng);
        const auto b = random_mixed(n, rng);
        const auto c = random_mixed(n, rng);
        const double ab = trace_distance(a, b);
        symmetric = symmetric && ab == trace_distance(b, a);
        self = std::max(self, trace_distance(a, a));
        triangle = std::max(triangle, ab - trace_distance(a, c) - trace_distance(c, b));
        const MatrixXcd u = random_unitary(a.dim(), rng);
        const DensityMatrix ua(from_eigen(u * to_eigen(a.matrix()) * u.adjoint()));
        const DensityMatrix ub(from_eigen(u * to_eigen(b.matrix()) * u.adjoint()));
        invariance = std::max(invariance, std::abs(trace_distance(ua, ub) - ab));
        oracle = std::max(oracle, std::abs(ab - oracle_trace_distance(to_eigen(a.matrix()), to_eigen(b.matrix()))));

        // Orthogonal pure pair by Gram-Schmidt.
        const auto psi = random_pure(n, rng);
        const auto chi = random_pure(n, rng);
        cplx overlap = 0.0;
        for (std::size_t i = 0; i < psi.dim(); ++i) {
            overlap += std::conj(psi.amplitudes()[i]) * chi.amplitudes()[i];
        }
        std::vector<cplx> phi(psi.dim());
        double norm = 0.0;
        for (std::size_t i = 0; i < psi.dim(); ++i) {
            phi[i] = chi.amplitudes()[i] - overlap * psi.amplitudes()[i];
            norm += std::norm(phi[i]);
        }
        for (auto &x : phi) {
            x /= std::sqrt(norm);
        }
        const double d = trace_distance(DensityMatrix::pure(psi), DensityMatrix::pure(StateVector(n, phi)));
        ortho = std::max(ortho, std::abs(d - 1.0));
    }
    const bool pass = symmetric && self <= 1e-12 && ortho <= 1e-10 && triangle <= 1e-9 && invariance <= 1e-9 &&
                      oracle <= 1e-9;
    return {pass, fmt::format("symmetric={} self={:.1e} orthogonal={:.1e} triangle_excess={:.1e} "
                              "unitary={:.1e} vs_oracle={:.1e}",
                              symmetric, self, ortho, std::max(triangle, 0.0), invariance, oracle)};
}

// ---------------------------------------------------------------------------
// 3. Gradient suite.

/// Loss from per-sample expectations (outside the library's loss code).
double hinge_from(const std::vector<double> &h, const std::vector<int> &y, const std::vector<double> &w) {
    double s = 0.0;
    for (std::size_t m = 0; m < h.size(); ++m) {
        s += w[m] * std::max(0.0, 1.0 - y[m] * h[m]);
    }
    return s;
}

double ce_from(const std::vector<std::vector<double>> &h, const std::vector<int> &y, const std::vector<double> &w) {
    double s = 0.0;
    for (std::size_t m = 0; m < y.size(); ++m) {
        double z = 0.0;
        for (double v : h[m]) {
            z += std::exp(v);
        }
        s += w[m] * (std::log(z) - h[m][static_cast<std::size_t>(y[m])]);
    }
    return s;
}

Outcome gradient_suite() {
    Rng rng(103);
    const std::size_t n = 3, layers = 3, samples = 4, classes = 3;
    const Ansatz ansatz(n, layers);
    const CircuitModel model{ansatz, {}};
    double worst_ps_fd = 0.0;
    double worst_engine = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto theta = ParamVector::gaussian(ansatz.param_count(), rng);
        std::vector<StateVector> states;
        std::vector<int> yb, yc;
        std::vector<double> w;
        for (std::size_t m = 0; m < samples; ++m) {
            states.push_back(random_pure(n, rng));
            yb.push_back(rng.uniform() < 0.5 ? 1 : -1);
            yc.push_back(static_cast<int>(rng.below(classes)));
            w.push_back(rng.uniform(0.1, 1.0));
        }
        auto hinge_at = [&](const ParamVector &t) {
            std::vector<double> h;
            for (const auto &s : states) {
                h.push_back(expectation(apply_circuit(s, ansatz, t), Observable::z(0)));
            }
            return h;
        };
        auto ce_at = [&](const ParamVector &t) {
            std::vector<std::vector<double>> h;
            for (const auto &s : states) {
                const auto out = apply_circuit(s, ansatz, t);
                std::vector<double> row;
                for (std::size_t k = 0; k < classes; ++k) {
                    row.push_back(expectation(out, Observable::projector(k)));
                }
                h.push_back(row);
            }
            return h;
        };

        // Parameter-shift gradients of both losses by the chain rule.
        std::vector<double> ps_h(theta.size()), ps_c(theta.size());
        const auto h = hinge_at(theta);
        const auto hc = ce_at(theta);
        for (std::size_t m = 0; m < samples; ++m) {
            if (1.0 - yb[m] * h[m] > 0.0) {
                const auto g = param_shift_grad(states[m], ansatz, theta, Observable::z(0));
                for (std::size_t j = 0; j < theta.size(); ++j) {
                    ps_h[j] -= w[m] * yb[m] * g[j];
                }
            }
            double z = 0.0;
            for (double v : hc[m]) {
                z += std::exp(v);
            }
            for (std::size_t k = 0; k < classes; ++k) {
                const double coeff = w[m] * (std::exp(hc[m][k]) / z - (static_cast<int>(k) == yc[m] ? 1.0 : 0.0));
                const auto g = param_shift_grad(states[m], ansatz, theta, Observable::projector(k));
                for (std::size_t j = 0; j < theta.size(); ++j) {
                    ps_c[j] += coeff * g[j];
                }
            }
        }

        const std::vector<std::size_t> batch{0, 1, 2, 3};
        const auto engine_h = hinge_loss(model, theta, {states, yb, w}, batch);
        const auto engine_c = cross_entropy_loss(model, theta, {states, yc, w}, batch, classes);
        const double delta = 1e-5;
        for (std::size_t j = 0; j < theta.size(); ++j) {
            ParamVector p = theta, q = theta;
            p[j] += delta;
            q[j] -= delta;
            const double fd_h = (hinge_from(hinge_at(p), yb, w) - hinge_from(hinge_at(q), yb, w)) / (2 * delta);
            const double fd_c = (ce_from(ce_at(p), yc, w) - ce_from(ce_at(q), yc, w)) / (2 * delta);
            worst_ps_fd = std::max({worst_ps_fd, std::abs(ps_h[j] - fd_h), std::abs(ps_c[j] - fd_c)});
            worst_engine = std::max({worst_engine, std::abs(engine_h.grad[j] - ps_h[j]),
                                     std::abs(engine_c.grad[j] - ps_c[j])});
        }
    }
    return {worst_ps_fd <= 1e-6 && worst_engine <= 1e-6,
            fmt::format("max |shift - FD| = {:.2e}, max |adjoint engine - shift| = {:.2e}", worst_ps_fd,
                        worst_engine)};
}

// ---------------------------------------------------------------------------
// 4. AdaBoost theorem checks, accumulated over every binary ensemble of 5-7.

struct TheoremTally {
    std::size_t ensembles = 0;
    std::size_t rounds = 0;
    std::size_t zero_error_rounds = 0;
    double bound_excess = -1.0; // max(prefix error - gamma_t)
    double reweight = 0.0;      // max |sum w_{t+1} wrong_t - 1/2|
    double gamma = 0.0;         // max |gamma_t - exp(-2 sum (1/2 - eps)^2)|
    double epsilon = 0.0;       // max |eps_t - sum w_t wrong_t|

    [[nodiscard]] bool pass() const {
        return ensembles > 0 && bound_excess <= 0.0 && reweight <= 1e-10 && gamma <= 1e-12 && epsilon <= 1e-12;
    }
};

void check_binary_ensemble(const CircuitModel &circuit, const BoostEnsemble &ens,
                           const std::vector<StateVector> &states, const NodeData &local, TheoremTally &tally) {
    std::vector<StateVector> sub;
    for (std::size_t i : local.indices) {
        sub.push_back(states[i]);
    }
    const auto votes = member_votes(circuit, ens, sub);
    const std::size_t count = sub.size();
    ++tally.ensembles;
    double sq = 0.0;
    std::vector<double> score(count, 0.0);
    for (std::size_t t = 0; t < ens.members.size(); ++t) {
        ++tally.rounds;
        const double eps = ens.members[t].epsilon;
        double wrong_now = 0.0;
        double wrong_next = 0.0;
        for (std::size_t m = 0; m < count; ++m) {
            if (votes[t][m] != local.targets[m]) {
                wrong_now += ens.weights[t][m];
                wrong_next += ens.weights[t + 1][m];
            }
        }
        tally.epsilon = std::max(tally.epsilon, std::abs(eps - wrong_now));
        if (eps > 0.0) {
            tally.reweight = std::max(tally.reweight, std::abs(wrong_next - 0.5));
        } else {
            ++tally.zero_error_rounds;
        }
        sq += (0.5 - eps) * (0.5 - eps);
        tally.gamma = std::max(tally.gamma, std::abs(ens.gamma[t] - std::exp(-2.0 * sq)));

        double errors = 0.0;
        for (std::size_t m = 0; m < count; ++m) {
            score[m] += ens.members[t].alpha * votes[t][m];
            const int label = score[m] >= 0.0 ? 1 : -1;
            errors += label != local.targets[m] ? 1.0 : 0.0;
        }
        tally.bound_excess = std::max(tally.bound_excess, errors / static_cast<double>(count) - ens.gamma[t]);
    }
}

// ---------------------------------------------------------------------------
// 5-7. Full TTA runs.

struct RunResult {
    double train_accuracy;
    double test_accuracy;
    std::size_t internal_nodes;
    std::vector<std::string> status;
};

ExperimentConfig synthetic_config(std::size_t layers, NoiseSpec noise) {
    ExperimentConfig c;
    c.dataset.generator = "synthetic";
    c.dataset.synthetic.dim = 4;
    c.dataset.synthetic.classes = 3;
    c.dataset.synthetic.per_class_train = 200;
    c.dataset.synthetic.per_class_test = 100;
    c.encoding = EncodingSpec::angle(AngleGates::AllRy);
    c.n_qubits = 4;
    c.layers = layers;
    c.boost.tau = 0.005;
    c.method = Method::TTA;
    c.noise = noise;
    c.seed = 1;
    c.validate();
    return c;
}

ExperimentConfig annni_config() {
    ExperimentConfig c;
    c.dataset.generator = "annni";
    c.dataset.annni.n_qubits = 6;
    c.dataset.annni.per_class_train = 200;
    c.dataset.annni.per_class_test = 100;
    c.encoding = EncodingSpec::raw_state();
    c.n_qubits = 6;
    c.layers = 20;
    c.method = Method::TTA;
    c.seed = 1;
    c.validate();
    return c;
}

/// One repeat of the experiment pipeline (seed_r = seed + r), with the
/// theorem checks applied to every node ensemble.
RunResult run_tta(const ExperimentConfig &c, std::size_t repeat, TheoremTally &tally) {
    const std::uint64_t seed = c.seed + repeat;
    const CircuitModel circuit{Ansatz(c.n_qubits, c.layers), c.noise};
    const DataSplit data = make_data(c, seed);
    const EncodedSet train = encode_set(data.train, c.encoding, c.n_qubits);
    const EncodedSet test = encode_set(data.test, c.encoding, c.n_qubits);
    const TrainedModel model = train_model(c, circuit, train, data.train.class_count, data.train.class_values, seed);
    RunResult r{accuracy(predict_model(model, circuit, train.states), train.labels),
                accuracy(predict_model(model, circuit, test.states), test.labels), model.tree->tree.nodes.size(),
                {}};
    for (std::size_t i = 0; i < model.tree->ensembles.size(); ++i) {
        const auto &ens = model.tree->ensembles[i];
        check_binary_ensemble(circuit, ens, train.states, node_data(model.tree->tree.nodes[i], train.labels), tally);
        r.status.push_back(fmt::format("node {} {} members={}{}", i + 1, to_string(ens.termination),
                                       ens.members.size(),
                                       ens.termination == Termination::WeakFail
                                           ? fmt::format(" failed_epsilon={:.4f}", ens.failed_epsilon)
                                           : ""));
    }
    return r;
}

std::string describe_runs(const std::vector<RunResult> &runs) {
    std::string s;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        s += fmt::format("{}r{}: train {:.4f} test {:.4f}", r == 0 ? "" : "; ", r, runs[r].train_accuracy,
                         runs[r].test_accuracy);
    }
    return s;
}

void log_status(const std::string &label, const std::vector<RunResult> &runs) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
        for (const auto &line : runs[r].status) {
            fmt::print("      [{} r{}] {}\n", label, r, line);
        }
    }
}

Outcome synthetic_tta(TheoremTally &tally) {
    const auto c = synthetic_config(20, NoiseSpec::none());
    std::vector<RunResult> runs;
    bool pass = true;
    for (std::size_t r = 0; r < 3; ++r) {
        runs.push_back(run_tta(c, r, tally));
        pass = pass && runs.back().train_accuracy == 1.0 && runs.back().test_accuracy >= 0.99;
    }
    log_status("noiseless", runs);
    return {pass, describe_runs(runs)};
}

Outcome annni_tta(TheoremTally &tally) {
    const auto r = run_tta(annni_config(), 0, tally);
    log_status("annni", {r});
    return {r.train_accuracy == 1.0 && r.test_accuracy >= 0.97 && r.internal_nodes == 2,
            fmt::format("train {:.4f} test {:.4f} internal nodes {}", r.train_accuracy, r.test_accuracy,
                        r.internal_nodes)};
}

Outcome noise_robustness(TheoremTally &tally) {
    bool pass = true;
    std::string detail;
    auto sweep = [&](const std::string &label, std::size_t layers, NoiseSpec noise,
                     const std::function<bool(const RunResult &)> &ok) {
        const auto c = synthetic_config(layers, noise);
        std::vector<RunResult> runs;
        for (std::size_t r = 0; r < 3; ++r) {
            runs.push_back(run_tta(c, r, tally));
            pass = pass && ok(runs.back());
        }
        log_status(label, runs);
        detail += fmt::format("{}{} [{}]", detail.empty() ? "" : " | ", label, describe_runs(runs));
    };
    const auto test95 = [](const RunResult &r) { return r.test_accuracy >= 0.95; };
    sweep("depolarizing p=0.1", 20, NoiseSpec::depolarizing(0.1), test95);
    sweep("reset p=0.05", 20, NoiseSpec::reset(0.05), test95);
    // WeakFail is permitted at L = 20 and appears in the node log above.
    sweep("gad L=20", 20, NoiseSpec::gad(0.05, 0.05), [](const RunResult &) { return true; });
    sweep("gad L=10", 10, NoiseSpec::gad(0.05, 0.05), [](const RunResult &r) { return r.train_accuracy == 1.0; });
    return {pass, detail};
}

// ---------------------------------------------------------------------------
// 8. Classifier counts.

Outcome classifier_counts() {
    bool pass = true;
    std::string detail;
    for (std::size_t k = 3; k <= 10; ++k) {
        ExperimentConfig c = synthetic_config(20, NoiseSpec::none());
        c.dataset.synthetic.classes = k;
        c.dataset.synthetic.per_class_train = 10;
        c.dataset.synthetic.per_class_test = 1;
        const DataSplit data = make_data(c, c.seed);
        const EncodedSet train = encode_set(data.train, c.encoding, c.n_qubits);
        const auto tree = build_tree(class_means(train.states, train.labels, k), c.splitter);
        const std::size_t tta = tree.nodes.size();
        const std::size_t ovr = reduce_ovr(k).tasks.size();
        const std::size_t ovo = reduce_ovo(k).tasks.size();
        pass = pass && tta == k - 1 && ovr == k && ovo == k * (k - 1) / 2;
        detail += fmt::format("{}K={}:{}/{}/{}", k == 3 ? "TTA/OVR/OVO " : " ", k, tta, ovr, ovo);
    }
    return {pass, detail};
}

// ---------------------------------------------------------------------------
// 9. Brute-split optimality.

Outcome brute_split_optimality() {
    Rng rng(109);
    bool brute_ok = true;
    bool greedy_ok = true;
    double margin = std::numeric_limits<double>::infinity();
    std::size_t cases = 0;
    // K = 2 has a single split, which the tree scores without searching.
    for (std::size_t k = 3; k <= 6; ++k) {
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 1 + static_cast<std::size_t>(trial % 2);
            ClassMeans cm;
            std::vector<MatrixXcd> means;
            std::vector<double> counts;
            for (std::size_t c = 0; c < k; ++c) {
                cm.means.push_back(random_mixed(n, rng));
                cm.counts.push_back(1 + rng.below(20));
                means.push_back(to_eigen(cm.means.back().matrix()));
                counts.push_back(static_cast<double>(cm.counts.back()));
            }
            std::vector<int> classes(k);
            std::iota(classes.begin(), classes.end(), 0);
            const Partition best = max_binary_split_brute(cm, classes);

            // Every subset of size floor(K/2) against its complement.
            auto group = [&](std::uint32_t mask, bool inside) {
                MatrixXcd acc = MatrixXcd::Zero(means[0].rows(), means[0].cols());
                double total = 0.0;
                for (std::size_t c = 0; c < k; ++c) {
                    if (((mask >> c) & 1U) == (inside ? 1U : 0U)) {
                        acc += counts[c] * means[c];
                        total += counts[c];
                    }
                }
                return MatrixXcd(acc / total);
            };
            double top = 0.0;
            for (std::uint32_t mask = 0; mask < (1U << k); ++mask) {
                if (static_cast<std::size_t>(std::popcount(mask)) != k / 2) {
                    continue;
                }
                const double d = oracle_trace_distance(group(mask, true), group(mask, false));
                top = std::max(top, d);
                brute_ok = brute_ok && best.distance >= d - 1e-12;
            }
            margin = std::min(margin, best.distance - top);

            // Greedy seeds: first pair of maximal pairwise distance.
            double dmax = -1.0;
            std::pair<int, int> seeds{-1, -1};
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = i + 1; j < k; ++j) {
                    const double d = oracle_trace_distance(means[i], means[j]);
                    if (d > dmax + 1e-12) {
                        dmax = d;
                        seeds = {static_cast<int>(i), static_cast<int>(j)};
                    }
                }
            }
            GreedyTrace trace{};
            max_binary_split_greedy(cm, classes, &trace);
            greedy_ok = greedy_ok && trace.seed_minus == seeds.first && trace.seed_plus == seeds.second;
            ++cases;
        }
    }
    return {brute_ok && greedy_ok, fmt::format("{} collections, brute minus best enumerated = {:.1e}, "
                                               "greedy seeds match = {}",
                                               cases, margin, greedy_ok)};
}

// ---------------------------------------------------------------------------
// 10. Early-stopping study.

Outcome early_stopping_study() {
    ExperimentConfig c = synthetic_config(20, NoiseSpec::none());
    c.dataset.synthetic.classes = 2;
    const auto report = compare_early_stopping(c);
    const auto &on = report.with;
    const auto &off = report.without;
    const double dtrain = std::abs(on.train_accuracy - off.train_accuracy);
    const double dtest = std::abs(on.test_accuracy - off.test_accuracy);
    return {on.total_epochs < off.total_epochs && dtrain <= 0.01 + 1e-12 && dtest <= 0.01 + 1e-12,
            fmt::format("epochs {} vs {} (members {} vs {}); train {:.4f} vs {:.4f}; test {:.4f} vs {:.4f}",
                        on.total_epochs, off.total_epochs, on.members, off.members, on.train_accuracy,
                        off.train_accuracy, on.test_accuracy, off.test_accuracy)};
}

} // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const std::string &name, double limit_s, const std::function<Outcome()> &fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = fn();
        } catch (const std::exception &e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        const double s = seconds_since(t0);
        const bool in_time = limit_s <= 0.0 || s < limit_s;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        fmt::print("{} criterion {:>2} {}: {} ({:.2f} s{})\n", pass ? "PASS" : "FAIL", id, name, o.detail, s,
                   in_time ? "" : fmt::format(", over the {:.0f} s budget", limit_s));
        std::fflush(stdout);
    };

    TheoremTally tally;
    report(1, "CPTP channels", 1.0, cptp_suite);
    report(2, "trace-distance metric", 10.0, trace_distance_suite);
    report(3, "gradients", 60.0, gradient_suite);
    report(5, "synthetic TTA", 1800.0, [&] { return synthetic_tta(tally); });
    report(6, "ANNNI TTA", 3600.0, [&] { return annni_tta(tally); });
    report(7, "noise robustness", 0.0, [&] { return noise_robustness(tally); });
    report(4, "AdaBoost theorems over runs 5-7", 0.0, [&] {
        return Outcome{tally.pass(),
                       fmt::format("{} ensembles, {} rounds ({} with zero error); max(prefix error - gamma) = "
                                   "{:.3e}, reweight {:.1e}, gamma {:.1e}, epsilon {:.1e}",
                                   tally.ensembles, tally.rounds, tally.zero_error_rounds, tally.bound_excess,
                                   tally.reweight, tally.gamma, tally.epsilon)};
    });
    report(8, "classifier counts", 1.0, classifier_counts);
    report(9, "brute-split optimality", 10.0, brute_split_optimality);
    report(10, "early-stopping study", 0.0, early_stopping_study);
    fmt::print("{} criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
