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

#include "tdtree/experiment.hpp"

#include "tdtree/error.hpp"
#include "tdtree/random.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tdtree {

using nlohmann::json;

std::string to_string(Method m) {
    switch (m) {
    case Method::TTA:
        return "tta";
    case Method::Single:
        return "single";
    case Method::MultiBoost:
        return "multiboost";
    case Method::Bitwise:
        return "bitwise";
    case Method::OVO:
        return "ovo";
    case Method::OVR:
        return "ovr";
    }
    return "?";
}

Method method_from_string(const std::string &name) {
    for (Method m : {Method::TTA, Method::Single, Method::MultiBoost, Method::Bitwise, Method::OVO,
                     Method::OVR}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw ConfigError(fmt::format("unknown method '{}'", name));
}

void ExperimentConfig::validate() const {
    train.validate();
    if (repeats == 0) {
        throw ConfigError("repeats must be at least 1");
    }
    if (threads == 0) {
        throw ConfigError("threads must be at least 1");
    }
    if (boost.max_rounds == 0) {
        throw ConfigError("boost.max_rounds must be positive");
    }
    if (!(boost.tau > 0.0 && boost.tau < 1.0)) {
        throw ConfigError("boost.tau must lie in (0, 1)");
    }
    try {
        noise.validate();
        Ansatz(n_qubits, layers);
    } catch (const Error &e) {
        throw ConfigError(e.what());
    }
    const auto &g = dataset.generator;
    if (g != "synthetic" && g != "annni" && g != "file" && g != "idx") {
        throw ConfigError(fmt::format("unknown dataset generator '{}'", g));
    }
    if (g == "annni" && encoding.kind != EncodingKind::RawState) {
        throw ConfigError("ANNNI data holds states; use the raw_state encoding");
    }
    if (g == "annni" && dataset.annni.n_qubits != n_qubits) {
        throw ConfigError("ANNNI chain length must equal ansatz.n_qubits");
    }
}

// ---------------------------------------------------------------------------
// Config parsing.

namespace {

/// Reads one JSON object, tracking its pointer and rejecting unknown keys.
class Reader {
  public:
    Reader(const json &j, std::string pointer) : j_(j), ptr_(std::move(pointer)) {
        if (!j_.is_object()) {
            fail("", "expected an object");
        }
    }

    ~Reader() = default;
    Reader(const Reader &) = delete;
    Reader &operator=(const Reader &) = delete;

    [[noreturn]] void fail(const std::string &key, const std::string &what) const {
        throw ConfigError(fmt::format("{}: {}", key.empty() ? (ptr_.empty() ? "/" : ptr_) : path(key), what));
    }

    [[nodiscard]] std::string path(const std::string &key) const { return ptr_ + "/" + key; }

    [[nodiscard]] bool has(const std::string &key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    template <typename T> void read(const std::string &key, T &out) {
        if (!has(key)) {
            return;
        }
        const json &v = j_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) {
                    fail(key, "expected a boolean");
                }
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<std::int64_t>() < 0 &&
                                               !v.is_number_unsigned())) {
                    fail(key, "expected a non-negative integer");
                }
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number()) {
                    fail(key, "expected a number");
                }
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) {
                    fail(key, "expected a string");
                }
            }
            out = v.get<T>();
        } catch (const json::exception &e) {
            fail(key, e.what());
        }
    }

    void read_path(const std::string &key, std::filesystem::path &out) {
        std::string s;
        read(key, s);
        if (!s.empty()) {
            out = s;
        }
    }

    void read_range(const std::string &key, double &lo, double &hi) {
        if (!has(key)) {
            return;
        }
        const json &v = j_.at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            fail(key, "expected [min, max]");
        }
        lo = v[0].get<double>();
        hi = v[1].get<double>();
    }

    void read_int_list(const std::string &key, std::vector<int> &out) {
        if (!has(key)) {
            return;
        }
        const json &v = j_.at(key);
        if (!v.is_array()) {
            fail(key, "expected an array of integers");
        }
        out.clear();
        for (const auto &e : v) {
            if (!e.is_number_integer()) {
                fail(key, "expected an array of integers");
            }
            out.push_back(e.get<int>());
        }
    }

    [[nodiscard]] const json *child(const std::string &key) {
        if (!has(key)) {
            return nullptr;
        }
        return &j_.at(key);
    }

    void finish() const {
        for (const auto &item : j_.items()) {
            if (seen_.count(item.key()) == 0) {
                fail(item.key(), "unknown field");
            }
        }
    }

  private:
    const json &j_;
    std::string ptr_;
    std::set<std::string> seen_;
};

void read_dataset_config(const json &j, const std::string &ptr, DatasetConfig &d) {
    Reader r(j, ptr);
    r.read("generator", d.generator);
    r.read("dim", d.synthetic.dim);
    r.read("classes", d.synthetic.classes);
    r.read("intervals", d.synthetic.intervals);
    std::size_t train = d.synthetic.per_class_train;
    std::size_t test = d.synthetic.per_class_test;
    r.read("per_class_train", train);
    r.read("per_class_test", test);
    d.synthetic.per_class_train = d.annni.per_class_train = train;
    d.synthetic.per_class_test = d.annni.per_class_test = test;
    r.read("n_qubits", d.annni.n_qubits);
    r.read_range("kappa", d.annni.kappa_min, d.annni.kappa_max);
    r.read_range("h", d.annni.h_min, d.annni.h_max);
    r.read("budget_factor", d.annni.budget_factor);
    r.read_path("train_path", d.train_path);
    r.read_path("test_path", d.test_path);
    r.read_path("train_labels_path", d.train_labels_path);
    r.read_path("test_labels_path", d.test_labels_path);
    r.read("resize", d.idx.resize);
    r.read_int_list("keep_classes", d.idx.classes);
    if (r.has("seed")) {
        std::uint64_t s = 0;
        r.read("seed", s);
        d.seed = s;
    }
    r.finish();
}

void read_train_config(const json &j, const std::string &ptr, TrainConfig &t) {
    Reader r(j, ptr);
    r.read("batch_size", t.batch_size);
    r.read("learning_rate", t.learning_rate);
    r.read("max_epochs", t.max_epochs);
    if (const json *a = r.child("adam")) {
        Reader ar(*a, r.path("adam"));
        ar.read("beta1", t.adam.beta1);
        ar.read("beta2", t.adam.beta2);
        ar.read("epsilon", t.adam.epsilon);
        ar.finish();
    }
    if (const json *e = r.child("early_stop")) {
        Reader er(*e, r.path("early_stop"));
        er.read("enabled", t.early_stop.enabled);
        er.read("threshold", t.early_stop.threshold);
        er.read("patience", t.early_stop.patience);
        er.finish();
    }
    r.finish();
}

template <typename Fn> auto wrap_enum(Reader &r, const std::string &key, Fn &&fn) {
    try {
        return fn();
    } catch (const Error &e) {
        r.fail(key, e.what());
    }
}

} // namespace

ExperimentConfig parse_config(const std::string &text, const std::string &source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(fmt::format("{}: {}", source, e.what()));
    }
    ExperimentConfig c;
    try {
        Reader r(root, "");
        if (const json *d = r.child("dataset")) {
            read_dataset_config(*d, "/dataset", c.dataset);
        }
        if (const json *e = r.child("encoding")) {
            Reader er(*e, "/encoding");
            std::string kind = to_string(c.encoding.kind);
            std::string gates = to_string(c.encoding.angle_gates);
            er.read("kind", kind);
            er.read("gates", gates);
            c.encoding.kind = wrap_enum(er, "kind", [&] { return encoding_kind_from_string(kind); });
            c.encoding.angle_gates =
                wrap_enum(er, "gates", [&] { return angle_gates_from_string(gates); });
            er.finish();
        }
        if (const json *a = r.child("ansatz")) {
            Reader ar(*a, "/ansatz");
            ar.read("n_qubits", c.n_qubits);
            ar.read("layers", c.layers);
            ar.finish();
        }
        if (const json *t = r.child("train")) {
            read_train_config(*t, "/train", c.train);
        }
        if (const json *b = r.child("boost")) {
            Reader br(*b, "/boost");
            br.read("max_rounds", c.boost.max_rounds);
            br.read("tau", c.boost.tau);
            br.finish();
        }
        if (r.has("method")) {
            std::string m;
            r.read("method", m);
            c.method = wrap_enum(r, "method", [&] { return method_from_string(m); });
        }
        if (const json *s = r.child("splitter")) {
            Reader sr(*s, "/splitter");
            std::string kind = to_string(c.splitter.kind);
            sr.read("kind", kind);
            sr.read("brute_limit", c.splitter.brute_limit);
            c.splitter.kind = wrap_enum(sr, "kind", [&] { return splitter_kind_from_string(kind); });
            sr.finish();
        }
        if (const json *n = r.child("noise")) {
            Reader nr(*n, "/noise");
            std::string kind = to_string(c.noise.kind);
            nr.read("kind", kind);
            nr.read("gamma", c.noise.gamma);
            nr.read("p", c.noise.p);
            c.noise.kind = wrap_enum(nr, "kind", [&] { return noise_kind_from_string(kind); });
            nr.finish();
        }
        r.read("repeats", c.repeats);
        r.read("seed", c.seed);
        r.read("threads", c.threads);
        r.read_path("output", c.output);
        r.finish();
        c.validate();
    } catch (const ConfigError &e) {
        throw ConfigError(fmt::format("{}: {}", source, e.what()));
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open config {}", path.string()));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string config_to_json(const ExperimentConfig &c) {
    json d = {{"generator", c.dataset.generator},
              {"dim", c.dataset.synthetic.dim},
              {"classes", c.dataset.synthetic.classes},
              {"intervals", c.dataset.synthetic.intervals},
              {"per_class_train", c.dataset.synthetic.per_class_train},
              {"per_class_test", c.dataset.synthetic.per_class_test},
              {"n_qubits", c.dataset.annni.n_qubits},
              {"kappa", {c.dataset.annni.kappa_min, c.dataset.annni.kappa_max}},
              {"h", {c.dataset.annni.h_min, c.dataset.annni.h_max}},
              {"budget_factor", c.dataset.annni.budget_factor},
              {"train_path", c.dataset.train_path.string()},
              {"test_path", c.dataset.test_path.string()},
              {"train_labels_path", c.dataset.train_labels_path.string()},
              {"test_labels_path", c.dataset.test_labels_path.string()},
              {"resize", c.dataset.idx.resize},
              {"keep_classes", c.dataset.idx.classes}};
    if (c.dataset.seed) {
        d["seed"] = *c.dataset.seed;
    }
    json j = {
        {"dataset", d},
        {"encoding", {{"kind", to_string(c.encoding.kind)}, {"gates", to_string(c.encoding.angle_gates)}}},
        {"ansatz", {{"n_qubits", c.n_qubits}, {"layers", c.layers}}},
        {"train",
         {{"batch_size", c.train.batch_size},
          {"learning_rate", c.train.learning_rate},
          {"max_epochs", c.train.max_epochs},
          {"adam", {{"beta1", c.train.adam.beta1}, {"beta2", c.train.adam.beta2}, {"epsilon", c.train.adam.epsilon}}},
          {"early_stop",
           {{"enabled", c.train.early_stop.enabled},
            {"threshold", c.train.early_stop.threshold},
            {"patience", c.train.early_stop.patience}}}}},
        {"boost", {{"max_rounds", c.boost.max_rounds}, {"tau", c.boost.tau}}},
        {"method", to_string(c.method)},
        {"splitter", {{"kind", to_string(c.splitter.kind)}, {"brute_limit", c.splitter.brute_limit}}},
        {"noise", {{"kind", to_string(c.noise.kind)}, {"gamma", c.noise.gamma}, {"p", c.noise.p}}},
        {"repeats", c.repeats},
        {"seed", c.seed},
        {"threads", c.threads},
        {"output", c.output.string()}};
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Data.

DataSplit make_data(const ExperimentConfig &config, std::uint64_t seed) {
    const auto &d = config.dataset;
    const std::uint64_t data_seed = d.seed.value_or(seed);
    if (d.generator == "synthetic") {
        auto [train, test] = gen_synthetic(d.synthetic, data_seed);
        return {std::move(train), std::move(test)};
    }
    if (d.generator == "annni") {
        auto [train, test] = gen_annni(d.annni, data_seed);
        return {std::move(train), std::move(test)};
    }
    if (d.generator == "file") {
        return {read_dataset(d.train_path), read_dataset(d.test_path)};
    }
    DataSplit s{load_idx(d.train_path, d.train_labels_path, d.idx),
                load_idx(d.test_path, d.test_labels_path, d.idx)};
    if (s.train.class_values != s.test.class_values) {
        throw FormatError("IDX train and test sets cover different classes");
    }
    return s;
}

EncodedSet encode_set(const LabeledSet &set, const EncodingSpec &spec, std::size_t n_qubits) {
    set.validate();
    return {encode_all(set.features, spec, n_qubits), set.labels};
}

// ---------------------------------------------------------------------------
// Models.

std::vector<const BoostEnsemble *> TrainedModel::ensembles() const {
    std::vector<const BoostEnsemble *> out;
    if (tree) {
        for (const auto &e : tree->ensembles) {
            out.push_back(&e);
        }
    }
    if (reduction) {
        for (const auto &e : reduction->ensembles) {
            out.push_back(&e);
        }
    }
    if (multiboost) {
        out.push_back(&*multiboost);
    }
    return out;
}

std::size_t TrainedModel::member_count() const {
    if (single) {
        return 1;
    }
    std::size_t n = 0;
    for (const auto *e : ensembles()) {
        n += e->members.size();
    }
    return n;
}

TrainedModel train_model(const ExperimentConfig &config, const CircuitModel &circuit,
                         const EncodedSet &train, std::size_t classes,
                         const std::vector<int> &class_values, std::uint64_t seed) {
    TrainedModel m;
    m.method = config.method;
    m.classes = classes;
    m.class_values = class_values;
    switch (config.method) {
    case Method::TTA: {
        const auto cm = class_means(train.states, train.labels, classes);
        const auto tree = build_tree(cm, config.splitter);
        m.tree = train_tta(circuit, tree, train.states, train.labels, config.boost, config.train,
                           seed, config.threads);
        break;
    }
    case Method::OVR:
    case Method::OVO:
    case Method::Bitwise: {
        const Reduction red = config.method == Method::OVR   ? reduce_ovr(classes)
                              : config.method == Method::OVO ? reduce_ovo(classes)
                                                             : reduce_bitwise(class_values);
        m.reduction = train_reduction(circuit, red, train.states, train.labels, config.boost,
                                      config.train, seed, config.threads);
        break;
    }
    case Method::MultiBoost:
        m.multiboost = boost_multiclass(circuit, {train.states, train.labels}, classes,
                                        config.boost, config.train, seed, 1);
        break;
    case Method::Single: {
        TrainConfig tc = config.train;
        tc.seed = derive_seed(seed, 0, 0);
        tc.early_stop.threshold = multiclass_threshold(classes);
        const std::vector<double> w(train.states.size(),
                                    1.0 / static_cast<double>(train.states.size()));
        m.single = train_base(circuit, {train.states, train.labels, w}, LossKind::CrossEntropy,
                              classes, tc);
        break;
    }
    }
    return m;
}

namespace {

using EnsembleVotes = std::vector<std::vector<std::vector<int>>>;

EnsembleVotes model_votes(const TrainedModel &model, const CircuitModel &circuit,
                          std::span<const StateVector> states) {
    EnsembleVotes out;
    for (const auto *e : model.ensembles()) {
        out.push_back(member_votes(circuit, *e, states));
    }
    return out;
}

std::size_t truncate(std::size_t members, const BoostEnsemble &e) {
    return members == 0 ? e.members.size() : std::min(members, e.members.size());
}

std::vector<int> predict_from_votes(const TrainedModel &model, const CircuitModel &circuit,
                                    std::span<const StateVector> states, const EnsembleVotes &votes,
                                    std::size_t members) {
    switch (model.method) {
    case Method::TTA:
        return predict_tta(*model.tree, votes, states.size(), members);
    case Method::OVR:
    case Method::OVO:
    case Method::Bitwise: {
        const auto &red = *model.reduction;
        std::vector<std::vector<BinaryPrediction>> preds;
        for (std::size_t t = 0; t < red.ensembles.size(); ++t) {
            if (red.constant_label[t] != 0) {
                const int y = red.constant_label[t];
                preds.emplace_back(states.size(), BinaryPrediction{y, static_cast<double>(y)});
                continue;
            }
            preds.push_back(combine_or_abstain(red.ensembles[t], votes[t], states.size(), members));
        }
        return decode_reduction(red.reduction, preds);
    }
    case Method::MultiBoost: {
        const auto &e = *model.multiboost;
        if (!e.usable()) {
            // No votes: every score is 0 and ties go to the lowest class.
            return std::vector<int>(states.size(), 0);
        }
        return combine_multiclass(e, votes.front(), truncate(members, e));
    }
    case Method::Single:
        return predict_base(circuit, *model.single, states);
    }
    return {};
}

} // namespace

std::vector<int> predict_model(const TrainedModel &model, const CircuitModel &circuit,
                               std::span<const StateVector> states, std::size_t members) {
    return predict_from_votes(model, circuit, states, model_votes(model, circuit, states), members);
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size() || truth.empty()) {
        throw DimensionError("accuracy needs equal, non-empty prediction and label vectors");
    }
    std::size_t ok = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ok += predicted[i] == truth[i] ? 1 : 0;
    }
    return static_cast<double>(ok) / static_cast<double>(truth.size());
}

// ---------------------------------------------------------------------------
// Model serialization.

namespace {

json classifier_json(const BaseClassifier &c) {
    return {{"kind", c.kind == LossKind::Hinge ? "hinge" : "cross_entropy"},
            {"classes", c.classes},
            {"theta", std::vector<double>(c.theta.values().begin(), c.theta.values().end())},
            {"epoch_errors", c.epoch_errors},
            {"best_epoch", c.best_epoch}};
}

BaseClassifier classifier_from(const json &j) {
    BaseClassifier c;
    c.kind = j.at("kind").get<std::string>() == "hinge" ? LossKind::Hinge : LossKind::CrossEntropy;
    c.classes = j.at("classes").get<std::size_t>();
    c.theta = ParamVector(j.at("theta").get<std::vector<double>>());
    c.epoch_errors = j.at("epoch_errors").get<std::vector<double>>();
    c.best_epoch = j.at("best_epoch").get<std::size_t>();
    return c;
}

json ensemble_json(const BoostEnsemble &e) {
    json members = json::array();
    for (const auto &m : e.members) {
        members.push_back({{"alpha", m.alpha},
                           {"epsilon", m.epsilon},
                           {"seed", m.seed},
                           {"classifier", classifier_json(m.classifier)}});
    }
    return {{"binary", e.binary},
            {"classes", e.classes},
            {"termination", to_string(e.termination)},
            {"failed_epsilon", e.failed_epsilon},
            {"total_epochs", e.total_epochs},
            {"gamma", e.gamma},
            {"normalizers", e.normalizers},
            {"members", members}};
}

Termination termination_from(const std::string &s) {
    for (Termination t : {Termination::Converged, Termination::MaxRounds, Termination::WeakFail}) {
        if (to_string(t) == s) {
            return t;
        }
    }
    throw FormatError(fmt::format("unknown termination '{}'", s));
}

BoostEnsemble ensemble_from(const json &j) {
    BoostEnsemble e;
    e.binary = j.at("binary").get<bool>();
    e.classes = j.at("classes").get<std::size_t>();
    e.termination = termination_from(j.at("termination").get<std::string>());
    e.failed_epsilon = j.at("failed_epsilon").get<double>();
    e.total_epochs = j.at("total_epochs").get<std::size_t>();
    e.gamma = j.at("gamma").get<std::vector<double>>();
    e.normalizers = j.at("normalizers").get<std::vector<double>>();
    for (const auto &m : j.at("members")) {
        e.members.push_back({classifier_from(m.at("classifier")), m.at("alpha").get<double>(),
                             m.at("epsilon").get<double>(), m.at("seed").get<std::uint64_t>()});
    }
    return e;
}

json child_json(const TreeChild &c) {
    return {{"leaf", c.leaf}, {"node", c.node}, {"label", c.label}};
}

TreeChild child_from(const json &j) {
    return {j.at("leaf").get<bool>(), j.at("node").get<std::size_t>(), j.at("label").get<int>()};
}

} // namespace

std::string model_to_json(const TrainedModel &model, const ExperimentConfig &config) {
    json j = {{"format", "tdtree-model"},
              {"version", 1},
              {"method", to_string(model.method)},
              {"classes", model.classes},
              {"class_values", model.class_values},
              {"n_qubits", config.n_qubits},
              {"layers", config.layers},
              {"encoding", {{"kind", to_string(config.encoding.kind)}, {"gates", to_string(config.encoding.angle_gates)}}},
              {"noise", {{"kind", to_string(config.noise.kind)}, {"gamma", config.noise.gamma}, {"p", config.noise.p}}}};
    if (model.tree) {
        json nodes = json::array();
        for (const auto &n : model.tree->tree.nodes) {
            nodes.push_back({{"id", n.id},
                             {"classes", n.classes},
                             {"minus", n.split.minus},
                             {"plus", n.split.plus},
                             {"distance", n.split.distance},
                             {"n_samples", n.n_samples},
                             {"parent", n.parent},
                             {"branch", n.branch},
                             {"minus_child", child_json(n.minus_child)},
                             {"plus_child", child_json(n.plus_child)}});
        }
        json ens = json::array();
        for (const auto &e : model.tree->ensembles) {
            ens.push_back(ensemble_json(e));
        }
        j["tree"] = {{"classes", model.tree->tree.classes}, {"nodes", nodes}, {"ensembles", ens}};
    }
    if (model.reduction) {
        const auto &r = *model.reduction;
        json tasks = json::array();
        for (const auto &t : r.reduction.tasks) {
            tasks.push_back({{"plus", t.plus}, {"minus", t.minus}});
        }
        json ens = json::array();
        for (const auto &e : r.ensembles) {
            ens.push_back(ensemble_json(e));
        }
        j["reduction"] = {{"kind", to_string(r.reduction.kind)},
                          {"tasks", tasks},
                          {"constant_label", r.constant_label},
                          {"ensembles", ens}};
    }
    if (model.multiboost) {
        j["multiboost"] = ensemble_json(*model.multiboost);
    }
    if (model.single) {
        j["single"] = classifier_json(*model.single);
    }
    return j.dump(1);
}

TrainedModel model_from_json(const std::string &text) {
    try {
        const json j = json::parse(text);
        if (j.at("format").get<std::string>() != "tdtree-model") {
            throw FormatError("not a tdtree model file");
        }
        TrainedModel m;
        m.method = method_from_string(j.at("method").get<std::string>());
        m.classes = j.at("classes").get<std::size_t>();
        m.class_values = j.at("class_values").get<std::vector<int>>();
        if (j.contains("tree")) {
            TrainedTree t;
            t.tree.classes = j["tree"].at("classes").get<std::size_t>();
            for (const auto &n : j["tree"].at("nodes")) {
                TreeNode node;
                node.id = n.at("id").get<std::size_t>();
                node.classes = n.at("classes").get<std::vector<int>>();
                node.split.minus = n.at("minus").get<std::vector<int>>();
                node.split.plus = n.at("plus").get<std::vector<int>>();
                node.split.distance = n.at("distance").get<double>();
                node.n_samples = n.at("n_samples").get<std::size_t>();
                node.parent = n.at("parent").get<std::size_t>();
                node.branch = n.at("branch").get<int>();
                node.minus_child = child_from(n.at("minus_child"));
                node.plus_child = child_from(n.at("plus_child"));
                t.tree.nodes.push_back(std::move(node));
            }
            for (const auto &e : j["tree"].at("ensembles")) {
                t.ensembles.push_back(ensemble_from(e));
            }
            m.tree = std::move(t);
        }
        if (j.contains("reduction")) {
            const auto &r = j["reduction"];
            TrainedReduction tr;
            const std::string kind = r.at("kind").get<std::string>();
            tr.reduction.kind = kind == "ovr"   ? ReductionKind::OneVsRest
                                : kind == "ovo" ? ReductionKind::OneVsOne
                                                : ReductionKind::Bitwise;
            tr.reduction.classes = m.classes;
            tr.reduction.class_values = m.class_values;
            for (const auto &t : r.at("tasks")) {
                tr.reduction.tasks.push_back(
                    {t.at("plus").get<std::vector<int>>(), t.at("minus").get<std::vector<int>>()});
            }
            tr.constant_label = r.at("constant_label").get<std::vector<int>>();
            for (const auto &e : r.at("ensembles")) {
                tr.ensembles.push_back(ensemble_from(e));
            }
            m.reduction = std::move(tr);
        }
        if (j.contains("multiboost")) {
            m.multiboost = ensemble_from(j["multiboost"]);
        }
        if (j.contains("single")) {
            m.single = classifier_from(j["single"]);
        }
        return m;
    } catch (const json::exception &e) {
        throw FormatError(fmt::format("malformed model file: {}", e.what()));
    }
}

// ---------------------------------------------------------------------------
// Curves.

namespace {

/// Local data of every ensemble in model.ensembles() order; global indices.
std::vector<NodeData> ensemble_data(const TrainedModel &model, std::span<const int> labels) {
    std::vector<NodeData> out;
    if (model.tree) {
        for (const auto &n : model.tree->tree.nodes) {
            out.push_back(node_data(n, labels));
        }
    }
    if (model.reduction) {
        for (const auto &t : model.reduction->reduction.tasks) {
            out.push_back(task_data(t, labels));
        }
    }
    if (model.multiboost) {
        NodeData all;
        for (std::size_t m = 0; m < labels.size(); ++m) {
            all.indices.push_back(m);
            all.targets.push_back(labels[m]);
        }
        out.push_back(std::move(all));
    }
    return out;
}

void member_curves(const TrainedModel &model, const EnsembleVotes &votes,
                   std::span<const int> labels, const std::string &split,
                   std::vector<CurvePoint> &out) {
    const auto ens = model.ensembles();
    const auto data = ensemble_data(model, labels);
    for (std::size_t i = 0; i < ens.size(); ++i) {
        const BoostEnsemble &e = *ens[i];
        if (!e.usable() || data[i].indices.empty()) {
            continue;
        }
        std::vector<std::vector<int>> local(votes[i].size());
        for (std::size_t t = 0; t < votes[i].size(); ++t) {
            for (std::size_t idx : data[i].indices) {
                local[t].push_back(votes[i][t][idx]);
            }
        }
        for (std::size_t c : curve_checkpoints(e.members.size())) {
            std::size_t ok = 0;
            if (e.binary) {
                const auto pred = combine_binary(e, local, c);
                for (std::size_t m = 0; m < pred.size(); ++m) {
                    ok += pred[m].label == data[i].targets[m] ? 1 : 0;
                }
            } else {
                const auto pred = combine_multiclass(e, local, c);
                for (std::size_t m = 0; m < pred.size(); ++m) {
                    ok += pred[m] == data[i].targets[m] ? 1 : 0;
                }
            }
            out.push_back({"member", i + 1, c, split,
                           static_cast<double>(ok) / static_cast<double>(data[i].indices.size())});
        }
    }
}

} // namespace

std::vector<CurvePoint> compute_curves(const TrainedModel &model, const CircuitModel &circuit,
                                       const EncodedSet &train, const EncodedSet &test) {
    std::vector<CurvePoint> out;
    for (const auto *set : {&train, &test}) {
        const std::string split = set == &train ? "train" : "test";
        if (model.single) {
            out.push_back({"aggregate", 0, 1, split,
                           accuracy(predict_base(circuit, *model.single, set->states), set->labels)});
            continue;
        }
        const auto votes = model_votes(model, circuit, set->states);
        member_curves(model, votes, set->labels, split, out);
        std::size_t largest = 0;
        for (const auto *e : model.ensembles()) {
            largest = std::max(largest, e->members.size());
        }
        for (std::size_t c : curve_checkpoints(largest)) {
            const auto pred = predict_from_votes(model, circuit, set->states, votes, c);
            out.push_back({"aggregate", 0, c, split, accuracy(pred, set->labels)});
        }
    }
    return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw FormatError(fmt::format("cannot write {}", path.string()));
    }
    return out;
}

} // namespace

void emit_curves(const std::filesystem::path &dir, const TrainedModel &model,
                 const CircuitModel &circuit, const EncodedSet &train, const EncodedSet &test) {
    std::filesystem::create_directories(dir);
    {
        auto out = open_out(dir / "curves.csv");
        out << "scope,node,members,split,accuracy\n";
        for (const auto &p : compute_curves(model, circuit, train, test)) {
            out << fmt::format("{},{},{},{},{:.4f}\n", p.scope, p.node, p.members, p.split, p.accuracy);
        }
    }
    const auto ens = model.ensembles();
    const auto data = ensemble_data(model, train.labels);
    {
        auto out = open_out(dir / "rounds.csv");
        out << "node,t,epsilon_t,alpha_t,gamma_t,epochs_used\n";
        for (std::size_t i = 0; i < ens.size(); ++i) {
            std::ostringstream body;
            write_round_log(body, *ens[i], false);
            std::istringstream lines(body.str());
            std::string line;
            while (std::getline(lines, line)) {
                out << (i + 1) << ',' << line << '\n';
            }
        }
    }
    {
        auto out = open_out(dir / "weights.csv");
        out << "node,sample,weight\n";
        for (std::size_t i = 0; i < ens.size(); ++i) {
            if (ens[i]->weights.empty()) {
                continue;
            }
            const auto &w = ens[i]->weights.back();
            for (std::size_t m = 0; m < w.size() && m < data[i].indices.size(); ++m) {
                out << fmt::format("{},{},{:.17g}\n", i + 1, data[i].indices[m], w[m]);
            }
        }
    }
    {
        const std::size_t per_member = circuit.ansatz.param_count();
        auto out = open_out(dir / "counts.csv");
        out << "node,members,parameters,termination,total_epochs\n";
        std::size_t total = 0;
        std::size_t epochs = 0;
        for (std::size_t i = 0; i < ens.size(); ++i) {
            out << fmt::format("{},{},{},{},{}\n", i + 1, ens[i]->members.size(),
                               ens[i]->members.size() * per_member, to_string(ens[i]->termination),
                               ens[i]->total_epochs);
            total += ens[i]->members.size();
            epochs += ens[i]->total_epochs;
        }
        if (model.single) {
            total = 1;
            epochs = model.single->epochs_used();
        }
        out << fmt::format("all,{},{},,{}\n", total, total * per_member, epochs);
    }
}

// ---------------------------------------------------------------------------
// Experiments.

Summary summarize(std::span<const double> values) {
    if (values.empty()) {
        throw InvariantError("summary of no values");
    }
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(values.size());
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return {mean, std::sqrt(var), *lo, *hi};
}

namespace {

CircuitModel circuit_for(const ExperimentConfig &config) {
    return {Ansatz(config.n_qubits, config.layers), config.noise};
}

std::size_t classifier_count(const TrainedModel &m) {
    if (m.tree) {
        return m.tree->tree.nodes.size();
    }
    if (m.reduction) {
        return m.reduction->reduction.tasks.size();
    }
    return 1;
}

} // namespace

std::vector<RunMetrics> run_experiment(const ExperimentConfig &config) {
    config.validate();
    std::filesystem::create_directories(config.output);
    {
        auto out = open_out(config.output / "config.json");
        out << config_to_json(config) << '\n';
    }
    const CircuitModel circuit = circuit_for(config);
    std::vector<RunMetrics> runs;
    for (std::size_t r = 0; r < config.repeats; ++r) {
        const std::uint64_t seed = config.seed + r;
        const DataSplit data = make_data(config, seed);
        const EncodedSet train = encode_set(data.train, config.encoding, config.n_qubits);
        const EncodedSet test = encode_set(data.test, config.encoding, config.n_qubits);
        const TrainedModel model = train_model(config, circuit, train, data.train.class_count,
                                               data.train.class_values, seed);

        RunMetrics rm{};
        rm.repeat = r;
        rm.seed = seed;
        rm.members = model.member_count();
        rm.parameters = rm.members * circuit.ansatz.param_count();
        rm.classifiers = classifier_count(model);
        for (const auto *e : model.ensembles()) {
            rm.epochs += e->total_epochs;
            rm.node_status.push_back(
                fmt::format("{}:{}", to_string(e->termination), e->members.size()));
        }
        if (model.single) {
            rm.epochs = model.single->epochs_used();
        }
        rm.train_accuracy = accuracy(predict_model(model, circuit, train.states), train.labels);
        rm.test_accuracy = accuracy(predict_model(model, circuit, test.states), test.labels);

        const auto dir = config.output / fmt::format("run_{}", r);
        std::filesystem::create_directories(dir);
        {
            auto out = open_out(dir / "model.json");
            out << model_to_json(model, config) << '\n';
        }
        if (model.tree) {
            auto out = open_out(dir / "tree.csv");
            write_tree_csv(out, model.tree->tree);
        }
        emit_curves(dir, model, circuit, train, test);
        {
            json mj = {{"repeat", r},
                       {"seed", seed},
                       {"train_accuracy", rm.train_accuracy},
                       {"test_accuracy", rm.test_accuracy},
                       {"members", rm.members},
                       {"parameters", rm.parameters},
                       {"epochs", rm.epochs},
                       {"classifiers", rm.classifiers},
                       {"node_status", rm.node_status}};
            auto out = open_out(dir / "metrics.json");
            out << mj.dump(2) << '\n';
        }
        runs.push_back(std::move(rm));
    }

    auto runs_csv = open_out(config.output / "runs.csv");
    runs_csv << "repeat,seed,train_accuracy,test_accuracy,members,parameters,epochs,classifiers\n";
    for (const auto &rm : runs) {
        runs_csv << fmt::format("{},{},{:.17g},{:.17g},{},{},{},{}\n", rm.repeat, rm.seed,
                                rm.train_accuracy, rm.test_accuracy, rm.members, rm.parameters,
                                rm.epochs, rm.classifiers);
    }
    auto metrics = open_out(config.output / "metrics.csv");
    metrics << "metric,mean,std,min,max\n";
    auto column = [&](const char *name, auto get, bool is_accuracy) {
        std::vector<double> v;
        for (const auto &rm : runs) {
            v.push_back(static_cast<double>(get(rm)));
        }
        const Summary s = summarize(v);
        if (is_accuracy) {
            metrics << fmt::format("{},{:.4f},{:.4f},{:.4f},{:.4f}\n", name, s.mean, s.stddev, s.min, s.max);
        } else {
            metrics << fmt::format("{},{},{},{},{}\n", name, s.mean, s.stddev, s.min, s.max);
        }
    };
    column("train_accuracy", [](const RunMetrics &m) { return m.train_accuracy; }, true);
    column("test_accuracy", [](const RunMetrics &m) { return m.test_accuracy; }, true);
    column("members", [](const RunMetrics &m) { return m.members; }, false);
    column("parameters", [](const RunMetrics &m) { return m.parameters; }, false);
    column("epochs", [](const RunMetrics &m) { return m.epochs; }, false);
    column("classifiers", [](const RunMetrics &m) { return m.classifiers; }, false);
    return runs;
}

EarlyStopReport compare_early_stopping(const ExperimentConfig &config) {
    config.validate();
    const DataSplit data = make_data(config, config.seed);
    if (data.train.class_count != 2) {
        throw ConfigError("the early-stopping study needs a 2-class dataset");
    }
    const CircuitModel circuit = circuit_for(config);
    EncodedSet train = encode_set(data.train, config.encoding, config.n_qubits);
    EncodedSet test = encode_set(data.test, config.encoding, config.n_qubits);
    for (auto *s : {&train, &test}) {
        for (auto &y : s->labels) {
            y = y == 0 ? -1 : 1;
        }
    }
    auto variant = [&](bool enabled) {
        TrainConfig tc = config.train;
        tc.early_stop.enabled = enabled;
        const BoostEnsemble e =
            boost_binary(circuit, {train.states, train.labels}, config.boost, tc, config.seed, 1);
        EarlyStopVariant v{};
        v.early_stopping = enabled;
        v.members = e.members.size();
        v.total_epochs = e.total_epochs;
        v.termination = e.termination;
        for (const auto &m : e.members) {
            v.epsilons.push_back(m.epsilon);
            v.epochs.push_back(m.classifier.epochs_used());
        }
        auto labels = [&](const EncodedSet &set) {
            std::vector<int> p;
            for (const auto &b : combine_or_abstain(e, member_votes(circuit, e, set.states),
                                                    set.states.size(), 0)) {
                p.push_back(b.label);
            }
            return p;
        };
        v.train_accuracy = accuracy(labels(train), train.labels);
        v.test_accuracy = accuracy(labels(test), test.labels);
        return v;
    };
    return {variant(true), variant(false)};
}

void write_early_stop_report(const std::filesystem::path &dir, const EarlyStopReport &report) {
    std::filesystem::create_directories(dir);
    auto out = open_out(dir / "early_stop.csv");
    out << "early_stopping,t,epsilon_t,epochs_used\n";
    for (const auto *v : {&report.with, &report.without}) {
        for (std::size_t t = 0; t < v->epsilons.size(); ++t) {
            out << fmt::format("{},{},{:.17g},{}\n", v->early_stopping ? 1 : 0, t + 1,
                               v->epsilons[t], v->epochs[t]);
        }
    }
    auto summary = open_out(dir / "early_stop_summary.csv");
    summary << "early_stopping,members,total_epochs,train_accuracy,test_accuracy,termination\n";
    for (const auto *v : {&report.with, &report.without}) {
        summary << fmt::format("{},{},{},{:.4f},{:.4f},{}\n", v->early_stopping ? 1 : 0, v->members,
                               v->total_epochs, v->train_accuracy, v->test_accuracy,
                               to_string(v->termination));
    }
}

} // namespace tdtree
