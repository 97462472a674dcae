#include "unlbench/sweep.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "unlbench/errors.hpp"
#include "unlbench/textio.hpp"

namespace unlbench::sweep {

void SweepPlan::validate() const {
    if (I < 1) throw ConfigError("plan: I must be >= 1");
    if (J < 1) throw ConfigError("plan: J must be >= 1");
    if (static_cast<int>(training_seeds.size()) != I) {
        throw ConfigError("plan: expected exactly I training seeds");
    }
    std::set<std::uint64_t> train_values;
    for (const Seed s : training_seeds) train_values.insert(s.value);
    if (static_cast<int>(train_values.size()) != I) {
        throw ConfigError("plan: training seeds must be pairwise distinct");
    }
    if (static_cast<int>(unlearning_seeds.size()) != I) {
        throw ConfigError("plan: expected I rows of unlearning seeds");
    }
    for (const auto& row : unlearning_seeds) {
        if (static_cast<int>(row.size()) != J) {
            throw ConfigError("plan: each unlearning-seed row must have J entries");
        }
        std::set<std::uint64_t> row_values;
        for (const Seed s : row) row_values.insert(s.value);
        if (static_cast<int>(row_values.size()) != J) {
            throw ConfigError("plan: unlearning seeds must be distinct within a row");
        }
    }
    if (methods.empty()) throw ConfigError("plan: needs at least one method");
    for (const auto& m : methods) {
        m.validate();
        if (m.kind == unlearners::MethodKind::unsir &&
            target.kind != ForgetTarget::Kind::full_class) {
            throw ConfigError("plan: unsir supports full_class targets only");
        }
    }
    arch.validate();
    train_config.validate();
    dataset_spec.validate();
    if (arch.input_dim != dataset_spec.dim) {
        throw ConfigError("plan: arch.input_dim must equal dataset dim");
    }
    const int expected_classes = label_mode == LabelMode::superclass
                                     ? dataset_spec.superclasses
                                     : dataset_spec.total_subclasses();
    if (arch.n_classes != expected_classes) {
        throw ConfigError("plan: arch.n_classes must match the label space");
    }
}

namespace {

Seed derive_seed(Seed root, const std::string& label) {
    auto stream = seedkit::derive_stream(root, label);
    return Seed{stream.next_u64()};
}

SweepPlan make_plan(int I, int J, Seed root, const PlanInputs& inputs, std::string protocol) {
    SweepPlan plan;
    plan.I = I;
    plan.J = J;
    for (int i = 0; i < I; ++i) {
        plan.training_seeds.push_back(derive_seed(root, "train/" + std::to_string(i)));
        std::vector<Seed> row;
        for (int j = 0; j < J; ++j) {
            row.push_back(derive_seed(root, "unlearn/" + std::to_string(i) + "/" + std::to_string(j)));
        }
        plan.unlearning_seeds.push_back(std::move(row));
    }
    plan.methods = inputs.methods;
    plan.target = inputs.target;
    plan.label_mode = inputs.label_mode;
    plan.arch = inputs.arch;
    plan.train_config = inputs.train_config;
    plan.dataset_spec = inputs.dataset_spec;
    plan.dataset_seed = inputs.dataset_seed;
    plan.protocol = std::move(protocol);
    plan.validate();
    return plan;
}

}  // namespace

SweepPlan plan_common_practice(int J, Seed root, const PlanInputs& inputs) {
    if (J < 1) throw ConfigError("common_practice: J must be >= 1");
    return make_plan(1, J, root, inputs, "common_practice");
}

SweepPlan plan_recommended(int I, int J, Seed root, const PlanInputs& inputs) {
    if (I < 2) throw ConfigError("recommended: I must be >= 2 (use common_practice for I = 1)");
    if (J < 1) throw ConfigError("recommended: J must be >= 1");
    return make_plan(I, J, root, inputs, "recommended");
}

const MetricRecord& SweepGrid::at(std::size_t method_idx, int i, int j) const {
    return records.at(method_idx).at(static_cast<std::size_t>(i) * static_cast<std::size_t>(plan.J) +
                                     static_cast<std::size_t>(j));
}

namespace {

struct CellKey {
    std::size_t method_idx;
    int i;
    int j;
};

void run_parallel(int threads, std::size_t n_items, const std::function<void(std::size_t)>& work) {
    if (threads <= 1 || n_items <= 1) {
        for (std::size_t k = 0; k < n_items; ++k) work(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= n_items) return;
            try {
                work(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(threads, static_cast<int>(n_items));
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

void flush_partial(const std::string& out_dir, const SweepGrid& grid,
                   const std::vector<char>& done) {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    std::ofstream out(std::filesystem::path(out_dir) / "results_partial.csv");
    write_csv_header(out);
    std::size_t flat = 0;
    for (std::size_t m = 0; m < grid.records.size(); ++m) {
        for (const auto& rec : grid.records[m]) {
            if (done[flat]) write_record_csv(out, rec, grid.plan.target);
            ++flat;
        }
    }
}

}  // namespace

SweepGrid run_sweep(const SweepPlan& plan, const RunOptions& options) {
    plan.validate();
    const auto data = datagen::generate(plan.dataset_spec, plan.dataset_seed);
    const auto split = datagen::split_forget(data.train, data.test, plan.target, plan.label_mode);

    SweepGrid grid;
    grid.plan = plan;
    grid.records.assign(plan.methods.size(),
                        std::vector<MetricRecord>(static_cast<std::size_t>(plan.I) *
                                                  static_cast<std::size_t>(plan.J)));

    // Phase 1: each trained model exactly once, cached for every (method, j).
    std::vector<nncore::ModelParams> trained(static_cast<std::size_t>(plan.I));
    std::atomic<int> trained_done{0};
    run_parallel(options.threads, static_cast<std::size_t>(plan.I), [&](std::size_t i) {
        trained[i] = nncore::train(plan.arch, data.train.examples, plan.label_mode,
                                   plan.train_config, plan.training_seeds[i]);
        const int done = trained_done.fetch_add(1) + 1;
        if (options.progress) options.progress("train", done, plan.I);
    });
    grid.trainings_performed = plan.I;

    if (!options.out_dir.empty()) {
        const auto ckpt_dir = std::filesystem::path(options.out_dir) / "checkpoints";
        std::filesystem::create_directories(ckpt_dir);
        for (int i = 0; i < plan.I; ++i) {
            const auto path = ckpt_dir / (plan.protocol + "_i" + std::to_string(i) + "_seed" +
                                          std::to_string(plan.training_seeds[static_cast<std::size_t>(i)].value) +
                                          ".bin");
            std::ofstream out(path, std::ios::binary);
            nncore::save_checkpoint(out, trained[static_cast<std::size_t>(i)]);
        }
    }

    // Phase 2: all (method, i, j) cells; each is a pure function of its seeds.
    std::vector<CellKey> cells;
    cells.reserve(plan.methods.size() * static_cast<std::size_t>(plan.I) *
                  static_cast<std::size_t>(plan.J));
    for (std::size_t m = 0; m < plan.methods.size(); ++m) {
        for (int i = 0; i < plan.I; ++i) {
            for (int j = 0; j < plan.J; ++j) cells.push_back(CellKey{m, i, j});
        }
    }
    std::vector<char> done(cells.size(), 0);
    std::atomic<int> cells_done{0};

    try {
        run_parallel(options.threads, cells.size(), [&](std::size_t k) {
            const CellKey cell = cells[k];
            const auto& method = plan.methods[cell.method_idx];
            const Seed unlearn_seed =
                plan.unlearning_seeds[static_cast<std::size_t>(cell.i)][static_cast<std::size_t>(cell.j)];
            try {
                if (options.on_cell_start) options.on_cell_start(method.name(), cell.i, cell.j);
                const auto start = std::chrono::steady_clock::now();
                const auto unlearned =
                    unlearners::unlearn(method, trained[static_cast<std::size_t>(cell.i)], split,
                                        plan.arch, plan.train_config, unlearn_seed);
                MetricRecord rec;
                rec.method = method.name();
                rec.hyper_digest = method.hyper_digest();
                rec.train_seed = plan.training_seeds[static_cast<std::size_t>(cell.i)];
                rec.unlearn_seed = unlearn_seed;
                rec.retain_train_acc = nncore::accuracy(unlearned, split.retain_train, plan.label_mode);
                rec.forget_train_acc = nncore::accuracy(unlearned, split.forget_train, plan.label_mode);
                rec.retain_test_acc = nncore::accuracy(unlearned, split.retain_test, plan.label_mode);
                rec.forget_test_acc = nncore::accuracy(unlearned, split.forget_test, plan.label_mode);
                rec.wall_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
                grid.records[cell.method_idx][static_cast<std::size_t>(cell.i) *
                                                  static_cast<std::size_t>(plan.J) +
                                              static_cast<std::size_t>(cell.j)] = rec;
                done[k] = 1;
                const int n_done = cells_done.fetch_add(1) + 1;
                if (options.progress) {
                    options.progress("unlearn", n_done, static_cast<int>(cells.size()));
                }
            } catch (const CellError&) {
                throw;
            } catch (const std::exception& e) {
                throw CellError(method.name(), cell.i, cell.j, e.what());
            }
        });
    } catch (const CellError&) {
        flush_partial(options.out_dir, grid, done);
        throw;
    }
    return grid;
}

namespace {

double metric_value(const MetricRecord& rec, const std::string& name) {
    if (name == "retain_train_acc") return rec.retain_train_acc;
    if (name == "forget_train_acc") return rec.forget_train_acc;
    if (name == "retain_test_acc") return rec.retain_test_acc;
    if (name == "forget_test_acc") return rec.forget_test_acc;
    throw ConfigError("unknown metric '" + name + "'");
}

}  // namespace

std::vector<std::vector<double>> grid_metric(const SweepGrid& grid, std::size_t method_idx,
                                             const std::string& metric_name) {
    if (method_idx >= grid.records.size()) throw ConfigError("grid_metric: method index out of range");
    std::vector<std::vector<double>> matrix(static_cast<std::size_t>(grid.plan.I));
    for (int i = 0; i < grid.plan.I; ++i) {
        auto& row = matrix[static_cast<std::size_t>(i)];
        row.reserve(static_cast<std::size_t>(grid.plan.J));
        for (int j = 0; j < grid.plan.J; ++j) {
            row.push_back(metric_value(grid.at(method_idx, i, j), metric_name));
        }
    }
    return matrix;
}

std::vector<std::vector<double>> grid_metric(const SweepGrid& grid, unlearners::MethodKind kind,
                                             const std::string& metric_name) {
    for (std::size_t m = 0; m < grid.plan.methods.size(); ++m) {
        if (grid.plan.methods[m].kind == kind) return grid_metric(grid, m, metric_name);
    }
    throw ConfigError(std::string("grid_metric: method '") + unlearners::to_string(kind) +
                      "' not in plan");
}

void write_csv_header(std::ostream& out) {
    out << "method,train_seed,unlearn_seed,target_kind,target_id,retain_train_acc,"
           "forget_train_acc,retain_test_acc,forget_test_acc,wall_ms,hyper_digest\n";
}

void write_record_csv(std::ostream& out, const MetricRecord& rec, const ForgetTarget& target) {
    using textio::format_double;
    out << rec.method << ',' << rec.train_seed.value << ',' << rec.unlearn_seed.value << ','
        << datagen::to_string(target.kind) << ',' << target.id << ','
        << format_double(rec.retain_train_acc) << ',' << format_double(rec.forget_train_acc) << ','
        << format_double(rec.retain_test_acc) << ',' << format_double(rec.forget_test_acc) << ','
        << format_double(rec.wall_ms) << ',' << rec.hyper_digest << '\n';
}

void write_grid_csv(std::ostream& out, const SweepGrid& grid) {
    write_csv_header(out);
    for (std::size_t m = 0; m < grid.records.size(); ++m) {
        for (const auto& rec : grid.records[m]) {
            write_record_csv(out, rec, grid.plan.target);
        }
    }
}

std::vector<CsvRow> read_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("results csv: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = textio::split_csv_line(line);
    const std::vector<std::string> expected = {
        "method",          "train_seed",       "unlearn_seed",    "target_kind",
        "target_id",       "retain_train_acc", "forget_train_acc", "retain_test_acc",
        "forget_test_acc", "wall_ms",          "hyper_digest"};
    if (header.size() != expected.size()) {
        throw ConfigError("results csv: expected " + std::to_string(expected.size()) +
                          " columns, found " + std::to_string(header.size()));
    }
    for (std::size_t k = 0; k < expected.size(); ++k) {
        if (header[k] != expected[k]) {
            throw ConfigError("results csv: missing column '" + expected[k] + "' (found '" +
                              header[k] + "')");
        }
    }
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = textio::split_csv_line(line);
        if (fields.size() != expected.size()) {
            throw ConfigError("results csv: row width mismatch");
        }
        CsvRow row;
        row.rec.method = fields[0];
        row.rec.train_seed = Seed{textio::parse_u64(fields[1])};
        row.rec.unlearn_seed = Seed{textio::parse_u64(fields[2])};
        row.target.kind = datagen::target_kind_from_string(fields[3]);
        row.target.id = static_cast<int>(textio::parse_i64(fields[4]));
        row.rec.retain_train_acc = textio::parse_double(fields[5]);
        row.rec.forget_train_acc = textio::parse_double(fields[6]);
        row.rec.retain_test_acc = textio::parse_double(fields[7]);
        row.rec.forget_test_acc = textio::parse_double(fields[8]);
        row.rec.wall_ms = textio::parse_double(fields[9]);
        row.rec.hyper_digest = fields[10];
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace unlbench::sweep
