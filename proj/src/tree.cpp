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

#include "tdtree/tree.hpp"

#include "tdtree/error.hpp"
#include "tdtree/parallel.hpp"
#include "tdtree/tolerances.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>

namespace tdtree {

ClassMeans class_means(std::span<const StateVector> states, std::span<const int> labels,
                       std::size_t classes) {
    if (states.size() != labels.size() || states.empty()) {
        throw DimensionError("class_means needs one label per state");
    }
    const std::size_t d = states.front().dim();
    std::vector<CMatrix> sums(classes, CMatrix(d, d));
    std::vector<std::size_t> counts(classes);
    for (std::size_t m = 0; m < states.size(); ++m) {
        const auto k = static_cast<std::size_t>(labels[m]);
        if (labels[m] < 0 || k >= classes) {
            throw InvariantError(fmt::format("label {} outside [0, {})", labels[m], classes));
        }
        const auto a = states[m].amplitudes();
        if (a.size() != d) {
            throw DimensionError("states of different dimension");
        }
        CMatrix &s = sums[k];
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                s(i, j) += a[i] * std::conj(a[j]);
            }
        }
        ++counts[k];
    }
    ClassMeans cm;
    for (std::size_t k = 0; k < classes; ++k) {
        if (counts[k] == 0) {
            throw InvariantError(fmt::format("class {} has no samples", k));
        }
        cm.means.emplace_back(sums[k] * cplx{1.0 / static_cast<double>(counts[k]), 0.0});
    }
    cm.counts = std::move(counts);
    return cm;
}

DensityMatrix group_mean(const ClassMeans &cm, std::span<const int> group) {
    if (group.empty()) {
        throw InvariantError("group mean of an empty class set");
    }
    const std::size_t d = cm.means.at(static_cast<std::size_t>(group.front())).dim();
    CMatrix sum(d, d);
    double total = 0.0;
    for (int k : group) {
        const auto idx = static_cast<std::size_t>(k);
        const auto w = static_cast<double>(cm.counts.at(idx));
        sum += cm.means.at(idx).matrix() * cplx{w, 0.0};
        total += w;
    }
    if (total == 0.0) {
        throw InvariantError("group mean over classes without samples");
    }
    return DensityMatrix(sum * cplx{1.0 / total, 0.0});
}

namespace {

std::vector<int> sorted_classes(std::span<const int> classes) {
    std::vector<int> c(classes.begin(), classes.end());
    std::sort(c.begin(), c.end());
    if (std::adjacent_find(c.begin(), c.end()) != c.end()) {
        throw InvariantError("duplicate class in split request");
    }
    return c;
}

Partition scored(const ClassMeans &cm, std::vector<int> minus, std::vector<int> plus) {
    Partition p{std::move(minus), std::move(plus), 0.0};
    p.distance = trace_distance(group_mean(cm, p.minus), group_mean(cm, p.plus));
    return p;
}

} // namespace

Partition max_binary_split_brute(const ClassMeans &cm, std::span<const int> classes) {
    const auto c = sorted_classes(classes);
    const std::size_t k = c.size();
    if (k < 3) {
        throw InvariantError("exhaustive split needs at least 3 classes");
    }
    const std::size_t left = k / 2;
    std::vector<std::size_t> pick(left);
    for (std::size_t i = 0; i < left; ++i) {
        pick[i] = i;
    }
    Partition best;
    bool have = false;
    while (true) {
        std::vector<int> minus;
        std::vector<int> plus;
        std::size_t p = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if (p < left && pick[p] == i) {
                minus.push_back(c[i]);
                ++p;
            } else {
                plus.push_back(c[i]);
            }
        }
        Partition cand = scored(cm, std::move(minus), std::move(plus));
        if (!have || cand.distance > best.distance + tol::split_tie) {
            best = std::move(cand);
            have = true;
        }
        // Next combination in lexicographic order.
        std::size_t i = left;
        while (i > 0 && pick[i - 1] == k - left + (i - 1)) {
            --i;
        }
        if (i == 0) {
            break;
        }
        ++pick[i - 1];
        for (std::size_t j = i; j < left; ++j) {
            pick[j] = pick[j - 1] + 1;
        }
    }
    return best;
}

Partition max_binary_split_greedy(const ClassMeans &cm, std::span<const int> classes,
                                  GreedyTrace *trace) {
    const auto c = sorted_classes(classes);
    const std::size_t k = c.size();
    if (k < 2) {
        throw InvariantError("a split needs at least 2 classes");
    }
    std::vector<double> dist(k * k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double v = trace_distance(cm.means.at(static_cast<std::size_t>(c[i])),
                                            cm.means.at(static_cast<std::size_t>(c[j])));
            dist[i * k + j] = v;
            dist[j * k + i] = v;
        }
    }
    std::size_t si = 0;
    std::size_t sj = 1;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            if (dist[i * k + j] > dist[si * k + sj]) {
                si = i;
                sj = j;
            }
        }
    }
    std::vector<int> minus{c[si]};
    std::vector<int> plus{c[sj]};
    for (std::size_t x = 0; x < k; ++x) {
        if (x == si || x == sj) {
            continue;
        }
        (dist[x * k + si] < dist[x * k + sj] ? minus : plus).push_back(c[x]);
    }
    std::sort(minus.begin(), minus.end());
    std::sort(plus.begin(), plus.end());
    if (trace != nullptr) {
        *trace = {c[si], c[sj]};
    }
    return scored(cm, std::move(minus), std::move(plus));
}

std::string to_string(SplitterKind kind) {
    switch (kind) {
    case SplitterKind::Brute:
        return "brute";
    case SplitterKind::Greedy:
        return "greedy";
    case SplitterKind::BruteUpTo:
        return "brute_up_to";
    }
    return "?";
}

SplitterKind splitter_kind_from_string(const std::string &name) {
    if (name == "brute") {
        return SplitterKind::Brute;
    }
    if (name == "greedy") {
        return SplitterKind::Greedy;
    }
    if (name == "brute_up_to" || name == "auto") {
        return SplitterKind::BruteUpTo;
    }
    throw ConfigError(fmt::format("unknown splitter '{}'", name));
}

TraceTree build_tree(const ClassMeans &cm, const Splitter &splitter) {
    const std::size_t k = cm.means.size();
    if (k < 2) {
        throw InvariantError("a tree needs at least 2 classes");
    }
    if (cm.counts.size() != k) {
        throw DimensionError("class means and counts differ in length");
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (cm.counts[c] == 0) {
            throw InvariantError(fmt::format("class {} has no samples", c));
        }
    }
    TraceTree tree;
    tree.classes = k;

    struct Pending {
        std::vector<int> classes;
        std::size_t parent;
        int branch;
    };
    std::deque<Pending> queue;
    std::vector<int> all(k);
    for (std::size_t c = 0; c < k; ++c) {
        all[c] = static_cast<int>(c);
    }
    queue.push_back({all, 0, 0});
    std::size_t next_id = 2;

    while (!queue.empty()) {
        Pending job = std::move(queue.front());
        queue.pop_front();
        TreeNode node;
        node.id = tree.nodes.size() + 1;
        node.classes = job.classes;
        node.parent = job.parent;
        node.branch = job.branch;
        for (int c : job.classes) {
            node.n_samples += cm.counts[static_cast<std::size_t>(c)];
        }
        const std::size_t size = job.classes.size();
        if (size == 2) {
            node.split = scored(cm, {job.classes[0]}, {job.classes[1]});
        } else if (splitter.kind == SplitterKind::Brute ||
                   (splitter.kind == SplitterKind::BruteUpTo && size <= splitter.brute_limit)) {
            node.split = max_binary_split_brute(cm, job.classes);
        } else {
            node.split = max_binary_split_greedy(cm, job.classes);
        }
        auto child = [&](const std::vector<int> &side, int branch) {
            TreeChild ch;
            if (side.size() == 1) {
                ch.leaf = true;
                ch.label = side.front();
            } else {
                ch.node = next_id++;
                queue.push_back({side, node.id, branch});
            }
            return ch;
        };
        node.minus_child = child(node.split.minus, -1);
        node.plus_child = child(node.split.plus, +1);
        tree.nodes.push_back(std::move(node));
    }
    return tree;
}

NodeData node_data(const TreeNode &node, std::span<const int> labels) {
    NodeData out;
    for (std::size_t m = 0; m < labels.size(); ++m) {
        const int y = labels[m];
        if (std::find(node.split.minus.begin(), node.split.minus.end(), y) != node.split.minus.end()) {
            out.indices.push_back(m);
            out.targets.push_back(-1);
        } else if (std::find(node.split.plus.begin(), node.split.plus.end(), y) !=
                   node.split.plus.end()) {
            out.indices.push_back(m);
            out.targets.push_back(1);
        }
    }
    return out;
}

namespace {

std::string join_classes(const std::vector<int> &c) {
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) {
        s += fmt::format("{}{}", i == 0 ? "" : " ", c[i]);
    }
    return s;
}

std::vector<StateVector> gather_states(std::span<const StateVector> states,
                                       const std::vector<std::size_t> &idx) {
    std::vector<StateVector> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        out.push_back(states[i]);
    }
    return out;
}

} // namespace

void write_tree_csv(std::ostream &out, const TraceTree &tree) {
    out << "node_id,K_minus,K_plus,trace_distance,n_samples,parent,branch\n";
    for (const auto &n : tree.nodes) {
        out << fmt::format("{},{},{},{:.17g},{},{},{}\n", n.id, join_classes(n.split.minus),
                           join_classes(n.split.plus), n.split.distance, n.n_samples, n.parent,
                           n.branch);
    }
}

TrainedTree train_tta(const CircuitModel &model, const TraceTree &tree,
                      std::span<const StateVector> states, std::span<const int> labels,
                      const BoostConfig &boost, const TrainConfig &train, std::uint64_t base_seed,
                      std::size_t threads) {
    if (states.size() != labels.size()) {
        throw DimensionError("states and labels differ in length");
    }
    TrainedTree out;
    out.tree = tree;
    out.ensembles.resize(tree.nodes.size());
    parallel_for(tree.nodes.size(), threads, [&](std::size_t i) {
        const TreeNode &node = tree.nodes[i];
        const NodeData nd = node_data(node, labels);
        const auto sub = gather_states(states, nd.indices);
        out.ensembles[i] = boost_binary(model, {sub, nd.targets}, boost, train, base_seed, node.id);
    });
    return out;
}

TreeVotes tree_votes(const CircuitModel &model, const TrainedTree &trained,
                     std::span<const StateVector> states) {
    TreeVotes votes;
    votes.reserve(trained.ensembles.size());
    for (const auto &ens : trained.ensembles) {
        votes.push_back(member_votes(model, ens, states));
    }
    return votes;
}

std::vector<BinaryPrediction> combine_or_abstain(const BoostEnsemble &ens,
                                                 const std::vector<std::vector<int>> &votes,
                                                 std::size_t samples, std::size_t members) {
    if (!ens.usable()) {
        return std::vector<BinaryPrediction>(samples, BinaryPrediction{1, 0.0});
    }
    const std::size_t use = members == 0 ? ens.members.size() : std::min(members, ens.members.size());
    auto out = combine_binary(ens, votes, use);
    if (out.size() != samples) {
        throw DimensionError("votes do not cover every sample");
    }
    return out;
}

std::vector<int> predict_tta(const TrainedTree &trained, const TreeVotes &votes,
                             std::size_t samples, std::size_t members) {
    const auto &nodes = trained.tree.nodes;
    if (votes.size() != nodes.size()) {
        throw DimensionError("votes do not match the tree");
    }
    std::vector<std::vector<BinaryPrediction>> node_pred(nodes.size());
    const std::size_t count = samples;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        node_pred[i] = combine_or_abstain(trained.ensembles[i], votes[i], samples, members);
    }
    std::vector<int> out(count);
    for (std::size_t m = 0; m < count; ++m) {
        std::size_t id = 1;
        while (true) {
            const TreeNode &n = nodes[id - 1];
            const TreeChild &ch = node_pred[id - 1][m].label < 0 ? n.minus_child : n.plus_child;
            if (ch.leaf) {
                out[m] = ch.label;
                break;
            }
            id = ch.node;
        }
    }
    return out;
}

std::vector<int> predict_tta(const CircuitModel &model, const TrainedTree &trained,
                             std::span<const StateVector> states) {
    return predict_tta(trained, tree_votes(model, trained, states), states.size(), 0);
}

std::string to_string(ReductionKind kind) {
    switch (kind) {
    case ReductionKind::OneVsRest:
        return "ovr";
    case ReductionKind::OneVsOne:
        return "ovo";
    case ReductionKind::Bitwise:
        return "bitwise";
    }
    return "?";
}

namespace {

std::vector<int> iota_values(std::size_t k) {
    std::vector<int> v(k);
    for (std::size_t i = 0; i < k; ++i) {
        v[i] = static_cast<int>(i);
    }
    return v;
}

} // namespace

Reduction reduce_ovr(std::size_t classes) {
    if (classes < 2) {
        throw InvariantError("a reduction needs at least 2 classes");
    }
    Reduction r{ReductionKind::OneVsRest, classes, iota_values(classes), {}};
    for (std::size_t k = 0; k < classes; ++k) {
        BinaryTask t;
        for (std::size_t j = 0; j < classes; ++j) {
            (j == k ? t.plus : t.minus).push_back(static_cast<int>(j));
        }
        r.tasks.push_back(std::move(t));
    }
    return r;
}

Reduction reduce_ovo(std::size_t classes) {
    if (classes < 2) {
        throw InvariantError("a reduction needs at least 2 classes");
    }
    Reduction r{ReductionKind::OneVsOne, classes, iota_values(classes), {}};
    for (std::size_t i = 0; i < classes; ++i) {
        for (std::size_t j = i + 1; j < classes; ++j) {
            r.tasks.push_back({{static_cast<int>(i)}, {static_cast<int>(j)}});
        }
    }
    return r;
}

Reduction reduce_bitwise(std::span<const int> class_values) {
    if (class_values.size() < 2) {
        throw InvariantError("a reduction needs at least 2 classes");
    }
    int max_value = 0;
    for (int v : class_values) {
        if (v < 0) {
            throw InvariantError("bitwise coding needs non-negative class values");
        }
        max_value = std::max(max_value, v);
    }
    const auto bits =
        std::max<std::size_t>(1, std::bit_width(static_cast<unsigned>(max_value)));
    Reduction r{ReductionKind::Bitwise, class_values.size(),
                std::vector<int>(class_values.begin(), class_values.end()),
                {}};
    for (std::size_t b = 0; b < bits; ++b) {
        const unsigned mask = 1U << (bits - 1 - b);
        BinaryTask t;
        for (std::size_t k = 0; k < class_values.size(); ++k) {
            ((static_cast<unsigned>(class_values[k]) & mask) != 0 ? t.plus : t.minus)
                .push_back(static_cast<int>(k));
        }
        r.tasks.push_back(std::move(t));
    }
    return r;
}

NodeData task_data(const BinaryTask &task, std::span<const int> labels) {
    TreeNode node;
    node.split.minus = task.minus;
    node.split.plus = task.plus;
    return node_data(node, labels);
}

std::vector<int> decode_reduction(const Reduction &reduction,
                                  const std::vector<std::vector<BinaryPrediction>> &task_predictions) {
    if (task_predictions.size() != reduction.tasks.size()) {
        throw DimensionError("one prediction vector per task expected");
    }
    const std::size_t count = task_predictions.empty() ? 0 : task_predictions.front().size();
    const std::size_t k = reduction.classes;
    std::vector<int> out(count);
    std::vector<double> score(k);
    for (std::size_t m = 0; m < count; ++m) {
        switch (reduction.kind) {
        case ReductionKind::OneVsRest:
        case ReductionKind::OneVsOne: {
            std::fill(score.begin(), score.end(), 0.0);
            if (reduction.kind == ReductionKind::OneVsRest) {
                for (std::size_t t = 0; t < reduction.tasks.size(); ++t) {
                    score[static_cast<std::size_t>(reduction.tasks[t].plus.front())] =
                        task_predictions[t][m].margin;
                }
            } else {
                for (std::size_t t = 0; t < reduction.tasks.size(); ++t) {
                    const auto &p = task_predictions[t][m];
                    const int winner =
                        p.label > 0 ? reduction.tasks[t].plus.front() : reduction.tasks[t].minus.front();
                    score[static_cast<std::size_t>(winner)] += std::abs(p.margin);
                }
            }
            out[m] = static_cast<int>(std::max_element(score.begin(), score.end()) - score.begin());
            break;
        }
        case ReductionKind::Bitwise: {
            unsigned code = 0;
            for (const auto &tp : task_predictions) {
                code = (code << 1) | (tp[m].label > 0 ? 1U : 0U);
            }
            int best = 0;
            int best_dist = -1;
            for (std::size_t c = 0; c < k; ++c) {
                const int dist = std::popcount(code ^ static_cast<unsigned>(reduction.class_values[c]));
                if (best_dist < 0 || dist < best_dist ||
                    (dist == best_dist &&
                     reduction.class_values[c] < reduction.class_values[static_cast<std::size_t>(best)])) {
                    best = static_cast<int>(c);
                    best_dist = dist;
                }
            }
            out[m] = best;
            break;
        }
        }
    }
    return out;
}

TrainedReduction train_reduction(const CircuitModel &model, const Reduction &reduction,
                                 std::span<const StateVector> states, std::span<const int> labels,
                                 const BoostConfig &boost, const TrainConfig &train,
                                 std::uint64_t base_seed, std::size_t threads) {
    if (states.size() != labels.size()) {
        throw DimensionError("states and labels differ in length");
    }
    TrainedReduction out;
    out.reduction = reduction;
    out.ensembles.resize(reduction.tasks.size());
    out.constant_label.assign(reduction.tasks.size(), 0);
    parallel_for(reduction.tasks.size(), threads, [&](std::size_t t) {
        const NodeData nd = task_data(reduction.tasks[t], labels);
        if (nd.targets.empty()) {
            throw InvariantError(fmt::format("reduction task {} has no samples", t + 1));
        }
        const bool mixed = std::any_of(nd.targets.begin(), nd.targets.end(),
                                       [&](int y) { return y != nd.targets.front(); });
        if (!mixed) {
            out.constant_label[t] = nd.targets.front();
            return;
        }
        const auto sub = gather_states(states, nd.indices);
        out.ensembles[t] = boost_binary(model, {sub, nd.targets}, boost, train, base_seed, t + 1);
    });
    return out;
}

std::vector<int> predict_reduction(const CircuitModel &model, const TrainedReduction &trained,
                                   std::span<const StateVector> states) {
    std::vector<std::vector<BinaryPrediction>> preds;
    for (std::size_t t = 0; t < trained.ensembles.size(); ++t) {
        if (trained.constant_label[t] != 0) {
            const int y = trained.constant_label[t];
            preds.emplace_back(states.size(), BinaryPrediction{y, static_cast<double>(y)});
        } else {
            const auto &e = trained.ensembles[t];
            preds.push_back(combine_or_abstain(e, member_votes(model, e, states), states.size(), 0));
        }
    }
    return decode_reduction(trained.reduction, preds);
}

} // namespace tdtree
