#include <doctest.h>

#include <map>
#include <sstream>

#include "oracles.hpp"
#include "unlbench/datagen.hpp"
#include "unlbench/errors.hpp"

using namespace unlbench::datagen;
using unlbench::ConfigError;
using unlbench::seedkit::Seed;

namespace {

DatasetSpec desk_spec() {
    DatasetSpec spec;
    spec.dim = 8;
    spec.superclasses = 4;
    spec.subclasses_per_superclass = 5;
    spec.train_per_subclass = 40;
    spec.test_per_subclass = 20;
    spec.cluster_spread = 0.15;
    spec.center_scale = 1.0;
    return spec;
}

bool same_examples(const Dataset& a, const Dataset& b) {
    if (a.examples.size() != b.examples.size()) return false;
    for (std::size_t k = 0; k < a.examples.size(); ++k) {
        if (a.examples[k].features != b.examples[k].features) return false;
        if (a.examples[k].superclass != b.examples[k].superclass) return false;
        if (a.examples[k].subclass != b.examples[k].subclass) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("generate produces the configured counts") {
    DatasetSpec spec = desk_spec();
    spec.superclasses = 2;
    spec.subclasses_per_superclass = 1;
    spec.train_per_subclass = 10;
    spec.test_per_subclass = 3;
    const auto data = generate(spec, Seed{5});
    CHECK(data.train.size() == 20);
    CHECK(data.test.size() == 2 * 3);
    for (const auto& ex : data.train.examples) {
        CHECK(ex.subclass / spec.subclasses_per_superclass == ex.superclass);
        CHECK(ex.features.size() == 8);
    }
}

TEST_CASE("generate is a pure function of (spec, seed)") {
    const auto a = generate(desk_spec(), Seed{77});
    const auto b = generate(desk_spec(), Seed{77});
    CHECK(same_examples(a.train, b.train));
    CHECK(same_examples(a.test, b.test));
    const auto c = generate(desk_spec(), Seed{78});
    CHECK_FALSE(same_examples(a.train, c.train));
}

TEST_CASE("desk-scale blobs are separable for a nearest-center classifier") {
    const auto data = generate(desk_spec(), Seed{424242});
    CHECK(oracles::nearest_center_accuracy(data.train, data.test) >= 0.95);
}

TEST_CASE("invalid specs are rejected") {
    DatasetSpec spec = desk_spec();
    spec.cluster_spread = 0.0;
    CHECK_THROWS_AS(generate(spec, Seed{1}), ConfigError);
    spec = desk_spec();
    spec.superclasses = 1;
    spec.subclasses_per_superclass = 1;
    CHECK_THROWS_AS(generate(spec, Seed{1}), ConfigError);
    spec = desk_spec();
    spec.train_per_subclass = 0;
    CHECK_THROWS_AS(generate(spec, Seed{1}), ConfigError);
}

TEST_CASE("split_forget partitions by full class") {
    DatasetSpec spec = desk_spec();
    spec.superclasses = 10;
    spec.subclasses_per_superclass = 1;
    spec.train_per_subclass = 10;
    const auto data = generate(spec, Seed{3});
    const auto split = split_forget(data.train, data.test,
                                    ForgetTarget{ForgetTarget::Kind::full_class, 3},
                                    LabelMode::superclass);
    CHECK(split.forget_train.size() == 10);
    CHECK(split.retain_train.size() == 90);
    for (const auto& ex : split.forget_train) CHECK(ex.superclass == 3);
    for (const auto& ex : split.retain_train) CHECK(ex.superclass != 3);
}

TEST_CASE("split_forget partitions by subclass") {
    const auto data = generate(desk_spec(), Seed{3});
    const auto split = split_forget(data.train, data.test,
                                    ForgetTarget{ForgetTarget::Kind::sub_class, 0},
                                    LabelMode::superclass);
    // one of C*M equal-sized subclasses
    CHECK(split.forget_train.size() == data.train.size() / 20);
    CHECK(split.retain_train.size() + split.forget_train.size() == data.train.size());
}

TEST_CASE("split parts reassemble to the originals") {
    const auto data = generate(desk_spec(), Seed{9});
    for (const auto target : {ForgetTarget{ForgetTarget::Kind::full_class, 1},
                              ForgetTarget{ForgetTarget::Kind::sub_class, 7}}) {
        const auto split = split_forget(data.train, data.test, target, LabelMode::superclass);
        // multiset equality via sorted (subclass, first feature) keys
        auto key_counts = [](const std::vector<LabeledExample>& xs) {
            std::map<std::pair<int, double>, int> counts;
            for (const auto& ex : xs) counts[{ex.subclass, ex.features[0]}] += 1;
            return counts;
        };
        auto combined = key_counts(split.retain_train);
        for (const auto& [key, count] : key_counts(split.forget_train)) combined[key] += count;
        CHECK(combined == key_counts(data.train.examples));
        CHECK(split.retain_test.size() + split.forget_test.size() == data.test.size());
    }
}

TEST_CASE("split_forget rejects out-of-range targets") {
    const auto data = generate(desk_spec(), Seed{3});
    CHECK_THROWS_AS(split_forget(data.train, data.test,
                                 ForgetTarget{ForgetTarget::Kind::full_class, 4},
                                 LabelMode::superclass),
                    ConfigError);
    CHECK_THROWS_AS(split_forget(data.train, data.test,
                                 ForgetTarget{ForgetTarget::Kind::sub_class, 20},
                                 LabelMode::superclass),
                    ConfigError);
    CHECK_THROWS_AS(split_forget(data.train, data.test,
                                 ForgetTarget{ForgetTarget::Kind::full_class, -1},
                                 LabelMode::superclass),
                    ConfigError);
}

TEST_CASE("csv round trip is bit exact") {
    DatasetSpec spec = desk_spec();
    spec.train_per_subclass = 3;
    const auto data = generate(spec, Seed{31});
    std::stringstream buffer;
    write_csv(buffer, data.train);
    const Dataset loaded = read_csv(buffer);
    CHECK(loaded.dim == data.train.dim);
    CHECK(same_examples(loaded, data.train));
}
