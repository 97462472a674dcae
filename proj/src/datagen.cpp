#include "unlbench/datagen.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "unlbench/errors.hpp"
#include "unlbench/textio.hpp"

namespace unlbench::datagen {

void DatasetSpec::validate() const {
    if (dim < 1) throw ConfigError("dataset.dim must be >= 1");
    if (superclasses < 1) throw ConfigError("dataset.superclasses must be >= 1");
    if (subclasses_per_superclass < 1) {
        throw ConfigError("dataset.subclasses_per_superclass must be >= 1");
    }
    if (superclasses * subclasses_per_superclass < 2) {
        throw ConfigError("dataset needs at least 2 subclasses in total");
    }
    if (train_per_subclass < 1) throw ConfigError("dataset.train_per_subclass must be >= 1");
    if (test_per_subclass < 1) throw ConfigError("dataset.test_per_subclass must be >= 1");
    if (!(cluster_spread > 0.0)) throw ConfigError("dataset.cluster_spread must be > 0");
    if (!(center_scale > 0.0)) throw ConfigError("dataset.center_scale must be > 0");
}

const char* to_string(ForgetTarget::Kind kind) {
    return kind == ForgetTarget::Kind::full_class ? "full_class" : "sub_class";
}

ForgetTarget::Kind target_kind_from_string(const std::string& s) {
    if (s == "full_class") return ForgetTarget::Kind::full_class;
    if (s == "sub_class") return ForgetTarget::Kind::sub_class;
    throw ConfigError("unknown target kind '" + s + "' (expected full_class or sub_class)");
}

namespace {

// Subclass-major fill: for each subclass, n examples at center + spread*noise.
void fill_examples(Dataset& ds, const DatasetSpec& spec,
                   const std::vector<std::vector<double>>& centers,
                   int per_subclass, seedkit::RngStream& stream) {
    for (int sc = 0; sc < spec.total_subclasses(); ++sc) {
        for (int k = 0; k < per_subclass; ++k) {
            LabeledExample ex;
            ex.features = seedkit::draw_gaussian(stream, static_cast<std::size_t>(spec.dim));
            for (int a = 0; a < spec.dim; ++a) {
                ex.features[static_cast<std::size_t>(a)] =
                    centers[static_cast<std::size_t>(sc)][static_cast<std::size_t>(a)] +
                    spec.cluster_spread * ex.features[static_cast<std::size_t>(a)];
            }
            ex.subclass = sc;
            ex.superclass = sc / spec.subclasses_per_superclass;
            ds.examples.push_back(std::move(ex));
        }
    }
}

}  // namespace

TrainTest generate(const DatasetSpec& spec, Seed seed) {
    spec.validate();

    auto center_stream = seedkit::derive_stream(seed, "centers");
    std::vector<std::vector<double>> centers;
    centers.reserve(static_cast<std::size_t>(spec.total_subclasses()));
    for (int sc = 0; sc < spec.total_subclasses(); ++sc) {
        auto c = seedkit::draw_gaussian(center_stream, static_cast<std::size_t>(spec.dim));
        for (double& v : c) v *= spec.center_scale;
        centers.push_back(std::move(c));
    }

    TrainTest out;
    for (Dataset* ds : {&out.train, &out.test}) {
        ds->dim = spec.dim;
        ds->n_superclasses = spec.superclasses;
        ds->n_subclasses = spec.total_subclasses();
    }
    out.train.examples.reserve(
        static_cast<std::size_t>(spec.total_subclasses() * spec.train_per_subclass));
    out.test.examples.reserve(
        static_cast<std::size_t>(spec.total_subclasses() * spec.test_per_subclass));

    auto train_stream = seedkit::derive_stream(seed, "train");
    fill_examples(out.train, spec, centers, spec.train_per_subclass, train_stream);
    auto test_stream = seedkit::derive_stream(seed, "test");
    fill_examples(out.test, spec, centers, spec.test_per_subclass, test_stream);
    return out;
}

int label_of(const LabeledExample& ex, LabelMode mode) {
    return mode == LabelMode::superclass ? ex.superclass : ex.subclass;
}

int n_labels(const Dataset& ds, LabelMode mode) {
    return mode == LabelMode::superclass ? ds.n_superclasses : ds.n_subclasses;
}

namespace {

bool matches_target(const LabeledExample& ex, const ForgetTarget& target) {
    if (target.kind == ForgetTarget::Kind::full_class) {
        return ex.superclass == target.id;
    }
    return ex.subclass == target.id;
}

void partition(const Dataset& ds, const ForgetTarget& target,
               std::vector<LabeledExample>& retain, std::vector<LabeledExample>& forget) {
    for (const auto& ex : ds.examples) {
        (matches_target(ex, target) ? forget : retain).push_back(ex);
    }
}

}  // namespace

ForgetSplit split_forget(const Dataset& train, const Dataset& test,
                         const ForgetTarget& target, LabelMode label_mode) {
    const int bound = target.kind == ForgetTarget::Kind::full_class ? train.n_superclasses
                                                                    : train.n_subclasses;
    if (target.id < 0 || target.id >= bound) {
        throw ConfigError("forget target id " + std::to_string(target.id) +
                          " out of range [0, " + std::to_string(bound) + ") for kind " +
                          to_string(target.kind));
    }

    ForgetSplit split;
    split.label_mode = label_mode;
    split.target = target;
    partition(train, target, split.retain_train, split.forget_train);
    partition(test, target, split.retain_test, split.forget_test);
    return split;
}

void write_csv(std::ostream& out, const Dataset& ds) {
    for (int a = 0; a < ds.dim; ++a) {
        out << 'x' << a << ',';
    }
    out << "superclass,subclass\n";
    for (const auto& ex : ds.examples) {
        for (const double v : ex.features) {
            out << textio::format_double(v) << ',';
        }
        out << ex.superclass << ',' << ex.subclass << '\n';
    }
}

Dataset read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("dataset csv: missing header");
    }
    const auto header = textio::split_csv_line(line);
    if (header.size() < 3 || header[header.size() - 2] != "superclass" ||
        header.back() != "subclass") {
        throw ConfigError("dataset csv: bad header");
    }
    Dataset ds;
    ds.dim = static_cast<int>(header.size()) - 2;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = textio::split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ConfigError("dataset csv: row width mismatch");
        }
        LabeledExample ex;
        ex.features.reserve(static_cast<std::size_t>(ds.dim));
        for (int a = 0; a < ds.dim; ++a) {
            ex.features.push_back(textio::parse_double(fields[static_cast<std::size_t>(a)]));
        }
        ex.superclass = static_cast<int>(textio::parse_i64(fields[fields.size() - 2]));
        ex.subclass = static_cast<int>(textio::parse_i64(fields.back()));
        ds.n_superclasses = std::max(ds.n_superclasses, ex.superclass + 1);
        ds.n_subclasses = std::max(ds.n_subclasses, ex.subclass + 1);
        ds.examples.push_back(std::move(ex));
    }
    return ds;
}

}  // namespace unlbench::datagen
