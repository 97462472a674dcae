#ifndef UNLBENCH_DATAGEN_HPP
#define UNLBENCH_DATAGEN_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "unlbench/seedkit.hpp"

namespace unlbench::datagen {

using seedkit::Seed;

// One synthetic point. Subclasses are numbered so that
// subclass / subclasses_per_superclass == superclass.
struct LabeledExample {
    std::vector<double> features;
    int superclass = 0;
    int subclass = 0;
};

// Which label the classifier predicts.
enum class LabelMode { superclass, subclass };

struct DatasetSpec {
    int dim = 8;
    int superclasses = 4;                // C
    int subclasses_per_superclass = 5;   // M
    int train_per_subclass = 40;
    int test_per_subclass = 20;
    double cluster_spread = 0.15;
    double center_scale = 1.0;

    int total_subclasses() const { return superclasses * subclasses_per_superclass; }
    void validate() const;  // throws ConfigError
};

// Generated examples plus the label-space bounds needed downstream.
struct Dataset {
    std::vector<LabeledExample> examples;
    int dim = 0;
    int n_superclasses = 0;
    int n_subclasses = 0;

    std::size_t size() const { return examples.size(); }
};

struct ForgetTarget {
    enum class Kind { full_class, sub_class };
    Kind kind = Kind::full_class;
    int id = 0;
};

const char* to_string(ForgetTarget::Kind kind);
ForgetTarget::Kind target_kind_from_string(const std::string& s);  // throws ConfigError

// Retain/forget partition of train and test sets for one unlearning target.
// Within each part the original example order is preserved.
struct ForgetSplit {
    std::vector<LabeledExample> retain_train;
    std::vector<LabeledExample> forget_train;
    std::vector<LabeledExample> retain_test;
    std::vector<LabeledExample> forget_test;
    LabelMode label_mode = LabelMode::superclass;
    ForgetTarget target;
};

// Gaussian blobs: one center per subclass (center_scale * standard normal),
// examples at center + cluster_spread * standard normal. Deterministic in
// (spec, seed); train and test use disjoint stream labels.
struct TrainTest {
    Dataset train;
    Dataset test;
};
TrainTest generate(const DatasetSpec& spec, Seed seed);

int label_of(const LabeledExample& ex, LabelMode mode);
int n_labels(const Dataset& ds, LabelMode mode);

ForgetSplit split_forget(const Dataset& train, const Dataset& test,
                         const ForgetTarget& target, LabelMode label_mode);

// CSV dump/load, header x0..x{d-1},superclass,subclass; row order preserved.
// Features print with shortest round-trip formatting, so load(dump(ds)) is
// bit-exact.
void write_csv(std::ostream& out, const Dataset& ds);
Dataset read_csv(std::istream& in);

}  // namespace unlbench::datagen

#endif
