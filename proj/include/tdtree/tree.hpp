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

#include "tdtree/boost.hpp"

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace tdtree {

/// Per-class mean states and sample counts, indexed by dense label.
struct ClassMeans {
    std::vector<DensityMatrix> means;
    std::vector<std::size_t> counts;
};

/// rho_k = mean of |psi><psi| over class k. Throws InvariantError when a class is empty.
ClassMeans class_means(std::span<const StateVector> states, std::span<const int> labels,
                       std::size_t classes);

/// Count-weighted mean of the class means in `group`.
DensityMatrix group_mean(const ClassMeans &cm, std::span<const int> group);

/// Bipartition of a node's classes. `minus` goes to the -1 (left) branch.
struct Partition {
    std::vector<int> minus;
    std::vector<int> plus;
    double distance = 0.0;
};

/**
 * Exhaustive balanced split. Left sets of size floor(K/2) are visited in
 * lexicographic order; a candidate replaces the incumbent only when its group
 * trace distance is larger by more than tol::split_tie.
 */
Partition max_binary_split_brute(const ClassMeans &cm, std::span<const int> classes);

struct GreedyTrace {
    int seed_minus;
    int seed_plus;
};

/**
 * Greedy split. Seeds are the first pair (i < j) of maximal class-mean trace
 * distance; every other class, in ascending order, joins the minus side when
 * D(k, i*) < D(k, j*) and the plus side otherwise.
 */
Partition max_binary_split_greedy(const ClassMeans &cm, std::span<const int> classes,
                                  GreedyTrace *trace = nullptr);

enum class SplitterKind { Brute, Greedy, BruteUpTo };

struct Splitter {
    SplitterKind kind = SplitterKind::BruteUpTo;
    /// Largest class count still split exhaustively under BruteUpTo.
    std::size_t brute_limit = 12;
};

std::string to_string(SplitterKind kind);
SplitterKind splitter_kind_from_string(const std::string &name);

/// Child of an internal node: another internal node or a single-class leaf.
struct TreeChild {
    bool leaf = false;
    std::size_t node = 0; // internal node id
    int label = -1;       // leaf class
};

struct TreeNode {
    std::size_t id = 0;
    std::vector<int> classes;
    Partition split;
    std::size_t n_samples = 0;
    std::size_t parent = 0; // 0 for the root
    int branch = 0;         // -1 or +1 relative to the parent, 0 for the root
    TreeChild minus_child;
    TreeChild plus_child;
};

/// Binary tree over class sets; nodes[i].id == i + 1 in breadth-first order.
struct TraceTree {
    std::size_t classes = 0;
    std::vector<TreeNode> nodes;

    [[nodiscard]] const TreeNode &node(std::size_t id) const { return nodes.at(id - 1); }
};

TraceTree build_tree(const ClassMeans &cm, const Splitter &splitter = {});

/// Sample indices reaching `node` and their -1/+1 targets.
struct NodeData {
    std::vector<std::size_t> indices;
    std::vector<int> targets;
};
NodeData node_data(const TreeNode &node, std::span<const int> labels);

/// CSV `node_id,K_minus,K_plus,trace_distance,n_samples,parent,branch`,
/// class sets space-separated.
void write_tree_csv(std::ostream &out, const TraceTree &tree);

struct TrainedTree {
    TraceTree tree;
    std::vector<BoostEnsemble> ensembles; // one per node, same order
};

/**
 * Trains every node's binary ensemble on its local relabelled data. Nodes use
 * node_id in their member seeds, so results do not depend on `threads`.
 */
TrainedTree train_tta(const CircuitModel &model, const TraceTree &tree,
                      std::span<const StateVector> states, std::span<const int> labels,
                      const BoostConfig &boost, const TrainConfig &train, std::uint64_t base_seed,
                      std::size_t threads = 1);

/// votes[node][t][m] for every node ensemble.
using TreeVotes = std::vector<std::vector<std::vector<int>>>;
TreeVotes tree_votes(const CircuitModel &model, const TrainedTree &trained,
                     std::span<const StateVector> states);

/// Binary prediction of the first min(members, size) members (0 = all). An
/// ensemble without members abstains: margin 0, label +1.
std::vector<BinaryPrediction> combine_or_abstain(const BoostEnsemble &ens,
                                                 const std::vector<std::vector<int>> &votes,
                                                 std::size_t samples, std::size_t members);

/// Root-to-leaf traversal over `samples` states with every node combined by
/// combine_or_abstain.
std::vector<int> predict_tta(const TrainedTree &trained, const TreeVotes &votes,
                             std::size_t samples, std::size_t members = 0);
std::vector<int> predict_tta(const CircuitModel &model, const TrainedTree &trained,
                             std::span<const StateVector> states);

// ---------------------------------------------------------------------------
// Multi-class to binary reductions.

enum class ReductionKind { OneVsRest, OneVsOne, Bitwise };
std::string to_string(ReductionKind kind);

struct BinaryTask {
    std::vector<int> plus;  // dense labels mapped to +1
    std::vector<int> minus; // dense labels mapped to -1; others are excluded
};

struct Reduction {
    ReductionKind kind;
    std::size_t classes;
    std::vector<int> class_values;
    std::vector<BinaryTask> tasks;
};

/// K tasks; task k is {k} against the rest.
Reduction reduce_ovr(std::size_t classes);
/// K(K-1)/2 tasks; task (i, j), i < j, is {i} (+1) against {j}.
Reduction reduce_ovo(std::size_t classes);
/// ceil(log2(max value + 1)) tasks; task b is bit b of the raw class value,
/// most significant first, set bits mapped to +1.
Reduction reduce_bitwise(std::span<const int> class_values);

/// Task-local sample indices and targets.
NodeData task_data(const BinaryTask &task, std::span<const int> labels);

/**
 * Decodes per-task predictions into classes. OVR: argmax margin. OVO: each
 * pair's winner collects |margin|, argmax of totals. Bitwise: bits form a raw
 * value; an unused code maps to the class at least Hamming distance (smaller
 * label on ties). All ties go to the smaller label.
 */
std::vector<int> decode_reduction(const Reduction &reduction,
                                  const std::vector<std::vector<BinaryPrediction>> &task_predictions);

struct TrainedReduction {
    Reduction reduction;
    std::vector<BoostEnsemble> ensembles;
    /// Tasks whose local data holds one label only predict that label.
    std::vector<int> constant_label; // 0 when the task was trained
};

TrainedReduction train_reduction(const CircuitModel &model, const Reduction &reduction,
                                 std::span<const StateVector> states, std::span<const int> labels,
                                 const BoostConfig &boost, const TrainConfig &train,
                                 std::uint64_t base_seed, std::size_t threads = 1);

std::vector<int> predict_reduction(const CircuitModel &model, const TrainedReduction &trained,
                                   std::span<const StateVector> states);

} // namespace tdtree
