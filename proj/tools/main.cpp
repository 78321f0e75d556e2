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

// tdtree command line: dataset generation, tree construction, training,
// evaluation, curve emission and the early-stopping study.

#include "tdtree/error.hpp"
#include "tdtree/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace tdtree;

struct Options {
    std::string config;
    std::string out;
    std::string model;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

ExperimentConfig resolve(const Options &opt) {
    ExperimentConfig c = opt.config.empty() ? ExperimentConfig{} : load_config(opt.config);
    if (opt.seed) {
        c.seed = *opt.seed;
    }
    if (opt.threads) {
        c.threads = *opt.threads;
    }
    if (!opt.out.empty()) {
        c.output = opt.out;
    }
    c.validate();
    return c;
}

std::string slurp(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError(fmt::format("cannot open {}", path.string()));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void gen_data(const Options &opt) {
    const ExperimentConfig c = resolve(opt);
    const DataSplit data = make_data(c, c.seed);
    std::filesystem::create_directories(c.output);
    write_dataset(c.output / "train.csv", data.train);
    write_dataset(c.output / "test.csv", data.test);
    fmt::print("wrote {} train and {} test samples ({} classes) to {}\n", data.train.size(),
               data.test.size(), data.train.class_count, c.output.string());
}

void build_tree_cmd(const Options &opt) {
    const ExperimentConfig c = resolve(opt);
    const DataSplit data = make_data(c, c.seed);
    const EncodedSet train = encode_set(data.train, c.encoding, c.n_qubits);
    const TraceTree tree =
        build_tree(class_means(train.states, train.labels, data.train.class_count), c.splitter);
    std::filesystem::create_directories(c.output);
    std::ofstream out(c.output / "tree.csv");
    write_tree_csv(out, tree);
    write_tree_csv(std::cout, tree);
}

void train_cmd(const Options &opt) {
    const ExperimentConfig c = resolve(opt);
    const auto runs = run_experiment(c);
    for (const auto &r : runs) {
        fmt::print("repeat {} seed {}: train {:.4f} test {:.4f} members {} epochs {}\n", r.repeat,
                   r.seed, r.train_accuracy, r.test_accuracy, r.members, r.epochs);
        for (std::size_t i = 0; i < r.node_status.size(); ++i) {
            fmt::print("  node {} {}\n", i + 1, r.node_status[i]);
        }
    }
    fmt::print("metrics written to {}\n", c.output.string());
}

/// Loads the model and regenerates the data split it was trained on.
std::pair<TrainedModel, DataSplit> load_run(const Options &opt, ExperimentConfig &c) {
    if (opt.model.empty()) {
        throw ConfigError("--model is required");
    }
    TrainedModel model = model_from_json(slurp(opt.model));
    DataSplit data = make_data(c, c.seed);
    if (data.train.class_values != model.class_values) {
        throw ConfigError("model classes do not match the configured dataset");
    }
    return {std::move(model), std::move(data)};
}

void eval_cmd(const Options &opt) {
    ExperimentConfig c = resolve(opt);
    const auto [model, data] = load_run(opt, c);
    const CircuitModel circuit{Ansatz(c.n_qubits, c.layers), c.noise};
    for (const auto *set : {&data.train, &data.test}) {
        const EncodedSet enc = encode_set(*set, c.encoding, c.n_qubits);
        const double acc = accuracy(predict_model(model, circuit, enc.states), enc.labels);
        fmt::print("{} accuracy {:.4f}\n", set == &data.train ? "train" : "test", acc);
    }
}

void curves_cmd(const Options &opt) {
    ExperimentConfig c = resolve(opt);
    const auto [model, data] = load_run(opt, c);
    const CircuitModel circuit{Ansatz(c.n_qubits, c.layers), c.noise};
    emit_curves(c.output, model, circuit, encode_set(data.train, c.encoding, c.n_qubits),
                encode_set(data.test, c.encoding, c.n_qubits));
    fmt::print("curves written to {}\n", c.output.string());
}

void early_stop_cmd(const Options &opt) {
    const ExperimentConfig c = resolve(opt);
    const EarlyStopReport report = compare_early_stopping(c);
    write_early_stop_report(c.output, report);
    for (const auto *v : {&report.with, &report.without}) {
        fmt::print("early stopping {}: members {} epochs {} train {:.4f} test {:.4f} ({})\n",
                   v->early_stopping ? "on " : "off", v->members, v->total_epochs,
                   v->train_accuracy, v->test_accuracy, to_string(v->termination));
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Trace-distance tree AdaBoost classifier on simulated quantum circuits"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", opt.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Output directory (overrides config)");
        sub->add_option("--seed", opt.seed, "Base seed (overrides config)");
        sub->add_option("--threads", opt.threads, "Worker threads (overrides config)")
            ->check(CLI::PositiveNumber);
    };
    struct Command {
        const char *name;
        const char *help;
        void (*run)(const Options &);
        bool needs_model;
    };
    const Command commands[] = {
        {"gen-data", "Generate the configured dataset as CSV", gen_data, false},
        {"build-tree", "Build the trace-distance tree and write tree.csv", build_tree_cmd, false},
        {"train", "Train and evaluate every repeat; write metrics and curves", train_cmd, false},
        {"eval", "Evaluate a saved model on the configured data", eval_cmd, true},
        {"curves", "Emit accuracy curves, round logs and weights for a saved model", curves_cmd,
         true},
        {"early-stop-study", "Compare boosting with and without early stopping", early_stop_cmd,
         false},
    };
    void (*selected)(const Options &) = nullptr;
    for (const auto &cmd : commands) {
        CLI::App *sub = app.add_subcommand(cmd.name, cmd.help);
        add_common(sub);
        if (cmd.needs_model) {
            sub->add_option("--model", opt.model, "model.json from a train run")
                ->required()
                ->check(CLI::ExistingFile);
        }
        sub->callback([&selected, run = cmd.run] { selected = run; });
    }

    CLI11_PARSE(app, argc, argv);
    try {
        selected(opt);
    } catch (const tdtree::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "fatal: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
