#ifndef UNLBENCH_SWEEP_HPP
#define UNLBENCH_SWEEP_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "unlbench/datagen.hpp"
#include "unlbench/nncore.hpp"
#include "unlbench/seedkit.hpp"
#include "unlbench/unlearners.hpp"

namespace unlbench::sweep {

using datagen::DatasetSpec;
using datagen::ForgetTarget;
using datagen::LabelMode;
using nncore::Architecture;
using nncore::TrainConfig;
using seedkit::Seed;
using unlearners::UnlearnMethod;

// I training runs x J unlearning runs per method. Training seed i comes from
// derive(root, "train/i"), unlearning seed (i, j) from derive(root,
// "unlearn/i/j"); both plan shapes share one root, so their seed values may
// overlap (the emitted plan documents every value).
struct SweepPlan {
    int I = 1;
    int J = 1;
    std::vector<Seed> training_seeds;                 // I values, pairwise distinct
    std::vector<std::vector<Seed>> unlearning_seeds;  // I rows of J, distinct within a row
    std::vector<UnlearnMethod> methods;
    ForgetTarget target;
    LabelMode label_mode = LabelMode::superclass;
    Architecture arch;
    TrainConfig train_config;
    DatasetSpec dataset_spec;
    Seed dataset_seed;
    std::string protocol;  // "common_practice" or "recommended"

    void validate() const;  // throws ConfigError
};

// Everything except the protocol shape, shared by both plan constructors.
struct PlanInputs {
    std::vector<UnlearnMethod> methods;
    ForgetTarget target;
    LabelMode label_mode = LabelMode::superclass;
    Architecture arch;
    TrainConfig train_config;
    DatasetSpec dataset_spec;
    Seed dataset_seed;
};

// Case A: a single training seed with J unlearning seeds.
SweepPlan plan_common_practice(int J, Seed root, const PlanInputs& inputs);

// Case B: I (>= 2) training seeds, J unlearning seeds per training seed.
SweepPlan plan_recommended(int I, int J, Seed root, const PlanInputs& inputs);

// One realization of the metric vector for a (method, i, j) cell.
struct MetricRecord {
    std::string method;
    std::string hyper_digest;
    Seed train_seed;
    Seed unlearn_seed;
    double retain_train_acc = 0.0;
    double forget_train_acc = 0.0;
    double retain_test_acc = 0.0;
    double forget_test_acc = 0.0;
    double wall_ms = 0.0;  // excluded from every determinism contract
};

struct SweepGrid {
    SweepPlan plan;
    // records[m] holds I*J records for plan.methods[m], laid out i*J + j.
    std::vector<std::vector<MetricRecord>> records;
    int trainings_performed = 0;

    const MetricRecord& at(std::size_t method_idx, int i, int j) const;
};

struct RunOptions {
    int threads = 1;
    // When set: model checkpoints under <out_dir>/checkpoints, and on a cell
    // failure the completed records are flushed to
    // <out_dir>/results_partial.csv before the error propagates.
    std::string out_dir;
    std::function<void(const std::string& phase, int done, int total)> progress;
    std::function<void(const std::string& method, int i, int j)> on_cell_start;
};

// Algorithm: for each i train M_i once and cache it; for each method and j,
// unlearn from the cached M_i and evaluate all four accuracies. Cells are
// pure, so the grid is independent of the execution schedule.
SweepGrid run_sweep(const SweepPlan& plan, const RunOptions& options = {});

// I x J matrix of one metric for one method of the grid.
// Valid names: retain_train_acc, forget_train_acc, retain_test_acc, forget_test_acc.
std::vector<std::vector<double>> grid_metric(const SweepGrid& grid, std::size_t method_idx,
                                             const std::string& metric_name);
std::vector<std::vector<double>> grid_metric(const SweepGrid& grid,
                                             unlearners::MethodKind kind,
                                             const std::string& metric_name);

inline const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {
        "retain_train_acc", "forget_train_acc", "retain_test_acc", "forget_test_acc"};
    return names;
}

// Results CSV, one row per record:
// method,train_seed,unlearn_seed,target_kind,target_id,retain_train_acc,
// forget_train_acc,retain_test_acc,forget_test_acc,wall_ms,hyper_digest
void write_csv_header(std::ostream& out);
void write_record_csv(std::ostream& out, const MetricRecord& rec, const ForgetTarget& target);
void write_grid_csv(std::ostream& out, const SweepGrid& grid);

struct CsvRow {
    MetricRecord rec;
    ForgetTarget target;
};
std::vector<CsvRow> read_records_csv(std::istream& in);  // throws ConfigError on bad schema

}  // namespace unlbench::sweep

#endif
