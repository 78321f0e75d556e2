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

#include "tdtree/datasets.hpp"
#include "tdtree/encode.hpp"
#include "tdtree/tree.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tdtree {

enum class Method { TTA, Single, MultiBoost, Bitwise, OVO, OVR };
std::string to_string(Method m);
Method method_from_string(const std::string &name);

struct DatasetConfig {
    std::string generator = "synthetic"; // synthetic | annni | file | idx
    SyntheticSpec synthetic;
    AnnniSpec annni;
    std::filesystem::path train_path;
    std::filesystem::path test_path;
    std::filesystem::path train_labels_path; // idx only
    std::filesystem::path test_labels_path;  // idx only
    IdxOptions idx;
    /// Fixed data seed; unset means the repeat seed.
    std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
    DatasetConfig dataset;
    EncodingSpec encoding = EncodingSpec::angle(AngleGates::AllRy);
    std::size_t n_qubits = 4;
    std::size_t layers = 20;
    TrainConfig train;
    BoostConfig boost;
    Method method = Method::TTA;
    Splitter splitter;
    NoiseSpec noise;
    std::size_t repeats = 1;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::filesystem::path output = "runs/out";

    /// Throws ConfigError on inconsistent settings.
    void validate() const;
};

/// Parses JSON text; errors carry "line:column" or the JSON pointer of the bad field.
ExperimentConfig parse_config(const std::string &text, const std::string &source = "<config>");
ExperimentConfig load_config(const std::filesystem::path &path);
std::string config_to_json(const ExperimentConfig &config);

struct DataSplit {
    LabeledSet train;
    LabeledSet test;
};

/// Generates or loads the configured data for `seed`.
DataSplit make_data(const ExperimentConfig &config, std::uint64_t seed);

struct EncodedSet {
    std::vector<StateVector> states;
    std::vector<int> labels;
};
EncodedSet encode_set(const LabeledSet &set, const EncodingSpec &spec, std::size_t n_qubits);

/// Any trained multi-class predictor.
struct TrainedModel {
    Method method = Method::TTA;
    std::size_t classes = 0;
    std::vector<int> class_values;
    std::optional<TrainedTree> tree;
    std::optional<TrainedReduction> reduction;
    std::optional<BoostEnsemble> multiboost;
    std::optional<BaseClassifier> single;

    /// Every binary or multi-class ensemble in training order.
    [[nodiscard]] std::vector<const BoostEnsemble *> ensembles() const;
    [[nodiscard]] std::size_t member_count() const;
};

TrainedModel train_model(const ExperimentConfig &config, const CircuitModel &circuit,
                         const EncodedSet &train, std::size_t classes,
                         const std::vector<int> &class_values, std::uint64_t seed);

/// Each ensemble truncated to min(members, size) members; 0 uses all.
std::vector<int> predict_model(const TrainedModel &model, const CircuitModel &circuit,
                               std::span<const StateVector> states, std::size_t members = 0);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

std::string model_to_json(const TrainedModel &model, const ExperimentConfig &config);
TrainedModel model_from_json(const std::string &text);

struct CurvePoint {
    std::string scope; // member | aggregate
    std::size_t node;  // 0 for aggregate
    std::size_t members;
    std::string split; // train | test
    double accuracy;
};

/// Member curves (node-local data) and aggregate curves at checkpoints 1, 6, 11, ...
std::vector<CurvePoint> compute_curves(const TrainedModel &model, const CircuitModel &circuit,
                                       const EncodedSet &train, const EncodedSet &test);

/// Writes curves.csv, rounds.csv, weights.csv and counts.csv into `dir`.
void emit_curves(const std::filesystem::path &dir, const TrainedModel &model,
                 const CircuitModel &circuit, const EncodedSet &train, const EncodedSet &test);

struct RunMetrics {
    std::size_t repeat;
    std::uint64_t seed;
    double train_accuracy;
    double test_accuracy;
    std::size_t members;
    std::size_t parameters;
    std::size_t epochs;
    std::size_t classifiers;
    std::vector<std::string> node_status;
};

struct Summary {
    double mean;
    double stddev;
    double min;
    double max;
};
/// Population standard deviation, so one repeat reports 0.
Summary summarize(std::span<const double> values);

/// Full pipeline for every repeat; writes per-run directories and aggregate metrics.
std::vector<RunMetrics> run_experiment(const ExperimentConfig &config);

struct EarlyStopVariant {
    bool early_stopping;
    std::size_t members;
    std::size_t total_epochs;
    double train_accuracy;
    double test_accuracy;
    Termination termination;
    std::vector<double> epsilons;
    std::vector<std::size_t> epochs;
};

struct EarlyStopReport {
    EarlyStopVariant with;
    EarlyStopVariant without;
};

/// Same seeded binary boosting with and without early stopping.
EarlyStopReport compare_early_stopping(const ExperimentConfig &config);
void write_early_stop_report(const std::filesystem::path &dir, const EarlyStopReport &report);

} // namespace tdtree
