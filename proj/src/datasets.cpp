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

#include "tdtree/datasets.hpp"

#include "tdtree/error.hpp"
#include "tdtree/random.hpp"
#include "tdtree/tolerances.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace tdtree {

std::vector<std::size_t> LabeledSet::class_counts() const {
    std::vector<std::size_t> counts(class_count);
    for (int y : labels) {
        ++counts.at(static_cast<std::size_t>(y));
    }
    return counts;
}

void LabeledSet::validate() const {
    if (labels.empty()) {
        throw InvariantError("dataset has no samples");
    }
    if (features.size() != labels.size()) {
        throw InvariantError("feature and label counts differ");
    }
    if (class_values.size() != class_count) {
        throw InvariantError("class_values must have one entry per class");
    }
    const std::size_t d = features.front().size();
    for (std::size_t m = 0; m < labels.size(); ++m) {
        if (features[m].size() != d) {
            throw InvariantError(fmt::format("sample {} has {} features, expected {}", m,
                                             features[m].size(), d));
        }
        if (labels[m] < 0 || static_cast<std::size_t>(labels[m]) >= class_count) {
            throw InvariantError(fmt::format("sample {} label {} outside [0, {})", m, labels[m],
                                             class_count));
        }
    }
    if (!aux.empty() && aux.size() != labels.size()) {
        throw InvariantError("aux must have one entry per sample");
    }
}

namespace {

constexpr std::uint64_t kAssignStream = 0;
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kTestStream = 2;

std::vector<int> identity_values(std::size_t k) {
    std::vector<int> v(k);
    for (std::size_t i = 0; i < k; ++i) {
        v[i] = static_cast<int>(i);
    }
    return v;
}

std::size_t effective_intervals(const SyntheticSpec &spec) {
    return spec.intervals != 0 ? spec.intervals : std::max<std::size_t>(8, spec.classes);
}

LabeledSet synthetic_split(const SyntheticSpec &spec, const std::vector<int> &assignment,
                           std::size_t per_class, Rng &rng) {
    const std::size_t intervals = assignment.size();
    const double width = 2.0 * std::numbers::pi / static_cast<double>(intervals);
    std::vector<std::vector<std::size_t>> owned(spec.classes);
    for (std::size_t i = 0; i < intervals; ++i) {
        owned[static_cast<std::size_t>(assignment[i])].push_back(i);
    }
    LabeledSet set;
    set.class_count = spec.classes;
    set.class_values = identity_values(spec.classes);
    for (std::size_t k = 0; k < spec.classes; ++k) {
        for (std::size_t m = 0; m < per_class; ++m) {
            const std::size_t interval = owned[k][rng.below(owned[k].size())];
            const double lo = width * static_cast<double>(interval);
            std::vector<double> x(spec.dim);
            for (auto &v : x) {
                // Clamp guards the open upper end against rounding in lo + width * u.
                v = std::min(lo + width * rng.uniform(), std::nextafter(lo + width, lo));
            }
            set.features.push_back(std::move(x));
            set.labels.push_back(static_cast<int>(k));
        }
    }
    return set;
}

} // namespace

std::vector<int> synthetic_assignment(const SyntheticSpec &spec, std::uint64_t seed) {
    if (spec.classes < 2) {
        throw InvariantError("synthetic data needs at least 2 classes");
    }
    const std::size_t intervals = effective_intervals(spec);
    if (intervals < spec.classes) {
        throw InvariantError(fmt::format("{} intervals cannot cover {} classes", intervals,
                                         spec.classes));
    }
    Rng rng(seed, kAssignStream);
    const auto perm = random_permutation(intervals, rng);
    std::vector<int> assignment(intervals);
    for (std::size_t i = 0; i < intervals; ++i) {
        assignment[perm[i]] = i < spec.classes ? static_cast<int>(i)
                                               : static_cast<int>(rng.below(spec.classes));
    }
    return assignment;
}

std::pair<LabeledSet, LabeledSet> gen_synthetic(const SyntheticSpec &spec, std::uint64_t seed) {
    if (spec.dim == 0 || spec.per_class_train == 0 || spec.per_class_test == 0) {
        throw InvariantError("synthetic data needs positive dimension and counts");
    }
    const auto assignment = synthetic_assignment(spec, seed);
    Rng train_rng(seed, kTrainStream);
    Rng test_rng(seed, kTestStream);
    auto train = synthetic_split(spec, assignment, spec.per_class_train, train_rng);
    auto test = synthetic_split(spec, assignment, spec.per_class_test, test_rng);

    std::string assign_text;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        assign_text += fmt::format("{}{}", i == 0 ? "" : " ", assignment[i]);
    }
    const std::string prov =
        fmt::format("intervals={} assignment=[{}] sampling=per-coordinate", assignment.size(),
                    assign_text);
    for (auto *s : {&train, &test}) {
        s->generator = "synthetic";
        s->seed = seed;
        s->provenance = prov;
    }
    return {std::move(train), std::move(test)};
}

CMatrix annni_hamiltonian(std::size_t n_qubits, double kappa, double h) {
    if (n_qubits < 3) {
        throw InvariantError("ANNNI chain needs at least 3 sites");
    }
    if (n_qubits > tol::max_qubits) {
        throw CapacityError(fmt::format("ANNNI chain of {} sites exceeds {}", n_qubits,
                                        tol::max_qubits));
    }
    const std::size_t d = std::size_t{1} << n_qubits;
    CMatrix m(d, d);
    for (std::size_t s = 0; s < d; ++s) {
        double diag = 0.0;
        for (std::size_t i = 0; i < n_qubits; ++i) {
            diag += (s & qubit_mask(i, n_qubits)) != 0 ? -1.0 : 1.0;
        }
        m(s, s) = -h * diag;
        for (std::size_t i = 0; i + 1 < n_qubits; ++i) {
            const std::size_t flip = qubit_mask(i, n_qubits) | qubit_mask(i + 1, n_qubits);
            m(s ^ flip, s) += -1.0;
        }
        for (std::size_t i = 0; i + 2 < n_qubits; ++i) {
            const std::size_t flip = qubit_mask(i, n_qubits) | qubit_mask(i + 2, n_qubits);
            m(s ^ flip, s) += kappa;
        }
    }
    return m;
}

namespace {

void check_annni_domain(double kappa, double h) {
    if (!(kappa >= 0.0 && kappa < 1.0) || !(h >= 0.0) || !std::isfinite(h)) {
        throw InvariantError(
            fmt::format("ANNNI point (kappa={}, h={}) outside kappa in [0,1), h >= 0", kappa, h));
    }
}

} // namespace

double annni_h_ising(double kappa) {
    // ((1-k)/k)(1 - sqrt(A)) rewritten as 2(1-2k)/(1 + sqrt(A)); finite at k = 0.
    const double a = (1.0 - 3.0 * kappa + 4.0 * kappa * kappa) / (1.0 - kappa);
    return 2.0 * (1.0 - 2.0 * kappa) / (1.0 + std::sqrt(a));
}

double annni_h_commensurate(double kappa) {
    return 1.05 * std::sqrt(std::max(0.0, (kappa - 0.5) * (kappa - 0.1)));
}

int annni_phase_label(double kappa, double h) {
    check_annni_domain(kappa, h);
    if (kappa < 0.5) {
        return h < annni_h_ising(kappa) ? 1 : 2;
    }
    return h < annni_h_commensurate(kappa) ? 0 : 2;
}

double annni_boundary_distance(double kappa, double h) {
    check_annni_domain(kappa, h);
    return std::abs(h - (kappa < 0.5 ? annni_h_ising(kappa) : annni_h_commensurate(kappa)));
}

namespace {

LabeledSet annni_split(const AnnniSpec &spec, std::size_t per_class, Rng &rng) {
    LabeledSet set;
    set.class_count = 3;
    set.class_values = identity_values(3);
    std::array<std::size_t, 3> filled{};
    const std::size_t quota = 3 * per_class;
    const std::size_t budget = spec.budget_factor * quota;
    std::size_t draws = 0;
    while (set.size() < quota) {
        if (draws++ >= budget) {
            throw RuntimeFailure(fmt::format(
                "ANNNI sampling exhausted {} draws with phase counts ({}, {}, {}) of {} each",
                budget, filled[0], filled[1], filled[2], per_class));
        }
        const double kappa = rng.uniform(spec.kappa_min, spec.kappa_max);
        const double h = rng.uniform(spec.h_min, spec.h_max);
        const int label = annni_phase_label(kappa, h);
        if (filled[static_cast<std::size_t>(label)] >= per_class ||
            annni_boundary_distance(kappa, h) < tol::phase_boundary_margin) {
            continue;
        }
        const auto ground = eigsh_ground(annni_hamiltonian(spec.n_qubits, kappa, h));
        std::vector<double> x(ground.vector.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = ground.vector[i].real();
        }
        set.features.push_back(std::move(x));
        set.labels.push_back(label);
        set.aux.push_back({kappa, h});
        ++filled[static_cast<std::size_t>(label)];
    }
    return set;
}

} // namespace

std::pair<LabeledSet, LabeledSet> gen_annni(const AnnniSpec &spec, std::uint64_t seed) {
    if (spec.per_class_train == 0 || spec.per_class_test == 0) {
        throw InvariantError("ANNNI quotas must be positive");
    }
    if (!(spec.kappa_min >= 0.0 && spec.kappa_min <= spec.kappa_max && spec.kappa_max < 1.0 &&
          spec.h_min >= 0.0 && spec.h_min <= spec.h_max)) {
        throw InvariantError("ANNNI region must lie in kappa in [0,1), h >= 0");
    }
    Rng train_rng(seed, kTrainStream);
    Rng test_rng(seed, kTestStream);
    auto train = annni_split(spec, spec.per_class_train, train_rng);
    auto test = annni_split(spec, spec.per_class_test, test_rng);
    const std::string prov = fmt::format(
        "n={} kappa=[{}, {}] h=[{}, {}] boundary_margin={}", spec.n_qubits, spec.kappa_min,
        spec.kappa_max, spec.h_min, spec.h_max, tol::phase_boundary_margin);
    for (auto *s : {&train, &test}) {
        s->generator = "annni";
        s->seed = seed;
        s->provenance = prov;
    }
    return {std::move(train), std::move(test)};
}

std::vector<double> resize_area(const std::vector<double> &image, std::size_t rows,
                                std::size_t cols, std::size_t out) {
    if (image.size() != rows * cols || rows == 0 || cols == 0 || out == 0) {
        throw DimensionError("resize: image size does not match its shape");
    }
    // Output pixel (i, j) averages source area [i*rows/out, (i+1)*rows/out) x (same for cols).
    auto weights = [out](std::size_t src) {
        std::vector<std::vector<std::pair<std::size_t, double>>> w(out);
        const double scale = static_cast<double>(src) / static_cast<double>(out);
        for (std::size_t i = 0; i < out; ++i) {
            const double lo = static_cast<double>(i) * scale;
            const double hi = static_cast<double>(i + 1) * scale;
            for (auto s = static_cast<std::size_t>(std::floor(lo)); s < src && static_cast<double>(s) < hi;
                 ++s) {
                const double overlap =
                    std::min(hi, static_cast<double>(s + 1)) - std::max(lo, static_cast<double>(s));
                if (overlap > 0.0) {
                    w[i].emplace_back(s, overlap / scale);
                }
            }
        }
        return w;
    };
    const auto wr = weights(rows);
    const auto wc = weights(cols);
    std::vector<double> result(out * out);
    for (std::size_t i = 0; i < out; ++i) {
        for (std::size_t j = 0; j < out; ++j) {
            double s = 0.0;
            for (const auto &[r, a] : wr[i]) {
                for (const auto &[c, b] : wc[j]) {
                    s += a * b * image[r * cols + c];
                }
            }
            result[i * out + j] = s;
        }
    }
    return result;
}

namespace {

std::uint32_t read_be32(std::istream &in, const std::filesystem::path &path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char *>(b), 4)) {
        throw FormatError(fmt::format("{}: truncated IDX header", path.string()));
    }
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
           std::uint32_t{b[3]};
}

std::ifstream open_binary(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError(fmt::format("cannot open {}", path.string()));
    }
    return in;
}

} // namespace

LabeledSet load_idx(const std::filesystem::path &images, const std::filesystem::path &labels,
                    const IdxOptions &options) {
    auto img_in = open_binary(images);
    auto lbl_in = open_binary(labels);
    if (read_be32(img_in, images) != 0x00000803U) {
        throw FormatError(fmt::format("{}: bad IDX image magic", images.string()));
    }
    if (read_be32(lbl_in, labels) != 0x00000801U) {
        throw FormatError(fmt::format("{}: bad IDX label magic", labels.string()));
    }
    const std::size_t count = read_be32(img_in, images);
    const std::size_t rows = read_be32(img_in, images);
    const std::size_t cols = read_be32(img_in, images);
    const std::size_t label_count = read_be32(lbl_in, labels);
    if (count != label_count) {
        throw FormatError(
            fmt::format("IDX image count {} differs from label count {}", count, label_count));
    }
    if (rows == 0 || cols == 0) {
        throw FormatError("IDX images have zero size");
    }
    std::vector<unsigned char> pixels(rows * cols);
    std::vector<double> image(rows * cols);

    std::vector<std::vector<double>> feats;
    std::vector<int> raw;
    for (std::size_t m = 0; m < count; ++m) {
        if (!img_in.read(reinterpret_cast<char *>(pixels.data()),
                         static_cast<std::streamsize>(pixels.size()))) {
            throw FormatError(fmt::format("{}: truncated at image {}", images.string(), m));
        }
        char lbl = 0;
        if (!lbl_in.read(&lbl, 1)) {
            throw FormatError(fmt::format("{}: truncated at label {}", labels.string(), m));
        }
        const int y = static_cast<unsigned char>(lbl);
        if (!options.classes.empty() &&
            std::find(options.classes.begin(), options.classes.end(), y) == options.classes.end()) {
            continue;
        }
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            image[i] = pixels[i] / 255.0;
        }
        feats.push_back(options.resize == 0 ? image
                                            : resize_area(image, rows, cols, options.resize));
        raw.push_back(y);
    }
    if (raw.empty()) {
        throw FormatError("IDX load selected no samples");
    }
    std::vector<int> values = raw;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    LabeledSet set;
    set.features = std::move(feats);
    set.class_count = values.size();
    set.class_values = values;
    for (int y : raw) {
        set.labels.push_back(
            static_cast<int>(std::lower_bound(values.begin(), values.end(), y) - values.begin()));
    }
    set.generator = "idx";
    set.provenance = fmt::format("source={} {}x{} resize={} method=area-average",
                                 images.filename().string(), rows, cols,
                                 options.resize == 0 ? std::string("none")
                                                     : std::to_string(options.resize));
    set.validate();
    return set;
}

void write_dataset(const std::filesystem::path &path, const LabeledSet &set) {
    set.validate();
    std::ofstream out(path);
    if (!out) {
        throw FormatError(fmt::format("cannot write {}", path.string()));
    }
    out << fmt::format("# d={} K={} generator={} seed={}\n", set.dim(), set.class_count,
                       set.generator.empty() ? "unknown" : set.generator, set.seed);
    std::string line;
    for (std::size_t m = 0; m < set.size(); ++m) {
        line.clear();
        for (double v : set.features[m]) {
            line += fmt::format("{:.17g},", v);
        }
        line += std::to_string(set.class_values[static_cast<std::size_t>(set.labels[m])]);
        line += '\n';
        out << line;
    }
    if (!out) {
        throw FormatError(fmt::format("write to {} failed", path.string()));
    }
}

LabeledSet read_dataset(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError(fmt::format("cannot open {}", path.string()));
    }
    std::string header;
    std::getline(in, header);
    std::map<std::string, std::string> fields;
    {
        std::istringstream hs(header);
        std::string token;
        hs >> token;
        if (token != "#") {
            throw FormatError(fmt::format("{}:1: missing '# d=... K=...' header", path.string()));
        }
        while (hs >> token) {
            const auto eq = token.find('=');
            if (eq == std::string::npos) {
                throw FormatError(fmt::format("{}:1: malformed header field '{}'", path.string(), token));
            }
            fields[token.substr(0, eq)] = token.substr(eq + 1);
        }
    }
    for (const char *key : {"d", "K", "generator", "seed"}) {
        if (fields.find(key) == fields.end()) {
            throw FormatError(fmt::format("{}:1: header lacks '{}'", path.string(), key));
        }
    }
    std::size_t d = 0;
    std::size_t k = 0;
    LabeledSet set;
    try {
        d = std::stoul(fields["d"]);
        k = std::stoul(fields["K"]);
        set.seed = std::stoull(fields["seed"]);
    } catch (const std::exception &) {
        throw FormatError(fmt::format("{}:1: non-numeric header value", path.string()));
    }
    set.generator = fields["generator"];

    std::vector<int> raw;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<double> x;
        x.reserve(d);
        std::size_t start = 0;
        for (std::size_t i = 0; i < d; ++i) {
            const auto comma = line.find(',', start);
            if (comma == std::string::npos) {
                throw FormatError(fmt::format("{}:{}: expected {} features", path.string(), line_no, d));
            }
            try {
                x.push_back(std::stod(line.substr(start, comma - start)));
            } catch (const std::exception &) {
                throw FormatError(fmt::format("{}:{}: bad number in column {}", path.string(), line_no, i + 1));
            }
            start = comma + 1;
        }
        try {
            std::size_t used = 0;
            const std::string tail = line.substr(start);
            raw.push_back(std::stoi(tail, &used));
            if (used != tail.size()) {
                throw FormatError("");
            }
        } catch (const std::exception &) {
            throw FormatError(fmt::format("{}:{}: bad label", path.string(), line_no));
        }
        set.features.push_back(std::move(x));
    }
    if (raw.empty()) {
        throw FormatError(fmt::format("{}: no samples", path.string()));
    }
    const bool dense = std::all_of(raw.begin(), raw.end(), [k](int y) {
        return y >= 0 && static_cast<std::size_t>(y) < k;
    });
    if (dense) {
        set.class_values = identity_values(k);
        set.labels = raw;
    } else {
        std::vector<int> values = raw;
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        if (values.size() != k) {
            throw FormatError(fmt::format("{}: header K={} but {} distinct labels", path.string(),
                                          k, values.size()));
        }
        set.class_values = values;
        for (int y : raw) {
            set.labels.push_back(static_cast<int>(
                std::lower_bound(values.begin(), values.end(), y) - values.begin()));
        }
    }
    set.class_count = k;
    set.validate();
    return set;
}

} // namespace tdtree
