// Acceptance suite: runs every gate criterion against the frozen reference
// configuration and prints one PASS/FAIL line per criterion.
//
// Usage: acceptance_tests --cli <path-to-unlbench-binary> [--workdir <dir>]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "unlbench/config.hpp"
#include "unlbench/report.hpp"
#include "unlbench/stats.hpp"
#include "unlbench/sweep.hpp"
#include "unlbench/textio.hpp"

using namespace unlbench;
using seedkit::Seed;
using unlearners::MethodKind;

namespace {

// The frozen reference configuration: desk-scale full-class task, both
// protocols of the comparison (I=1,J=11 and I=11,J=1), all six methods.
const char* kReferenceConfig = R"json({
  "dataset": {"dim": 8, "superclasses": 4, "subclasses_per_superclass": 5,
              "train_per_subclass": 40, "test_per_subclass": 20,
              "cluster_spread": 0.15, "center_scale": 1.0, "seed": 424242},
  "targets": [{"kind": "full_class", "id": 2}],
  "arch": {"hidden": [32, 32]},
  "train": {"epochs": 60, "batch_size": 32, "learning_rate": 0.1,
            "momentum": 0.9, "l2": 0.0005},
  "methods": [
    {"kind": "retrain"},
    {"kind": "random_labels", "epochs_u": 5, "lr_u": 0.02, "batch": 32},
    {"kind": "unsir", "noise_steps": 5, "noise_lr": 0.05, "n_noise": 100,
     "impair_epochs": 2, "repair_epochs": 5, "lr_u": 0.6, "batch": 32},
    {"kind": "bad_teacher", "epochs_u": 5, "lr_u": 0.02, "batch": 32},
    {"kind": "ssd", "alpha": 3.0, "lam": 1.0},
    {"kind": "lfssd", "alpha": 3.0, "lam": 1.0}
  ],
  "protocol": {"mode": "both", "common_practice": {"J": 11},
               "recommended": {"I": 11, "J": 1}},
  "root_seed": 20260810
})json";

struct Context {
    std::string cli_path;
    std::filesystem::path workdir;
    cli::HarnessConfig config;

    // filled by the reference sweeps
    std::optional<sweep::SweepGrid> grid_a;
    std::optional<sweep::SweepGrid> grid_b;
    double sweep_seconds = 0.0;

    const sweep::SweepGrid& common_grid() {
        ensure_sweeps();
        return *grid_a;
    }
    const sweep::SweepGrid& recommended_grid() {
        ensure_sweeps();
        return *grid_b;
    }

    void ensure_sweeps() {
        if (grid_a) return;
        const auto plans = config.build_plans();
        sweep::RunOptions options;
        options.threads = 2;
        const auto start = std::chrono::steady_clock::now();
        grid_a = sweep::run_sweep(plans.at(0), options);
        grid_b = sweep::run_sweep(plans.at(1), options);
        sweep_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

struct Failure {
    std::string reason;
};

using CriterionResult = std::optional<Failure>;  // nullopt = pass

std::string fmt(double v) { return textio::format_double(v); }

// ---------------------------------------------------------------------------
// criterion 1: determinism dichotomy
// ---------------------------------------------------------------------------
CriterionResult criterion_determinism_dichotomy(Context& ctx, std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const auto plans = ctx.config.build_plans();
    const auto& plan = plans.at(0);  // common practice: I = 1, J = 11
    const auto data = datagen::generate(plan.dataset_spec, plan.dataset_seed);
    const auto split = datagen::split_forget(data.train, data.test, plan.target, plan.label_mode);
    const auto trained = nncore::train(plan.arch, data.train.examples, plan.label_mode,
                                       plan.train_config, plan.training_seeds[0]);

    for (const auto& method : plan.methods) {
        std::vector<nncore::ModelParams> models;
        std::vector<std::vector<double>> metric_rows(4);
        for (const Seed seed : plan.unlearning_seeds[0]) {
            auto u = unlearners::unlearn(method, trained, split, plan.arch, plan.train_config,
                                         seed);
            metric_rows[0].push_back(nncore::accuracy(u, split.retain_train, plan.label_mode));
            metric_rows[1].push_back(nncore::accuracy(u, split.forget_train, plan.label_mode));
            metric_rows[2].push_back(nncore::accuracy(u, split.retain_test, plan.label_mode));
            metric_rows[3].push_back(nncore::accuracy(u, split.forget_test, plan.label_mode));
            models.push_back(std::move(u));
        }
        int distinct = 0;
        for (std::size_t k = 0; k < models.size(); ++k) {
            bool is_new = true;
            for (std::size_t p = 0; p < k; ++p) {
                if (models[k].bit_equal(models[p])) {
                    is_new = false;
                    break;
                }
            }
            if (is_new) ++distinct;
        }
        if (method.deterministic()) {
            if (distinct != 1) {
                return Failure{method.name() + ": expected 11 bit-identical models, found " +
                               std::to_string(distinct) + " distinct"};
            }
            for (const auto& row : metric_rows) {
                if (stats::conditional_variance(row) != 0.0) {
                    return Failure{method.name() + ": conditional variance not exactly 0"};
                }
            }
        } else if (distinct < 2) {
            return Failure{method.name() + ": expected >= 2 distinct models across 11 seeds, found " +
                           std::to_string(distinct)};
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > 120.0) {
        return Failure{"runtime " + fmt(secs) + " s exceeds the 2 min budget"};
    }
    detail = "ssd/lfssd 11x bit-identical, others >= 2 distinct; " + fmt(secs) + " s";
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// criterion 2: variance decomposition identity
// ---------------------------------------------------------------------------
CriterionResult criterion_decomposition_identity(Context& ctx, std::string& detail) {
    auto check = [](const std::vector<std::vector<double>>& grid) -> std::optional<double> {
        const auto dec = stats::decompose(grid);
        const double err = std::abs(dec.total - (dec.between + dec.within));
        if (err > 1e-12 * std::max(dec.total, 1.0)) return err;
        return std::nullopt;
    };

    int produced = 0;
    for (const sweep::SweepGrid* grid : {&ctx.common_grid(), &ctx.recommended_grid()}) {
        for (std::size_t m = 0; m < grid->plan.methods.size(); ++m) {
            for (const auto& metric : sweep::metric_names()) {
                if (const auto err = check(sweep::grid_metric(*grid, m, metric))) {
                    return Failure{"produced grid " + grid->plan.methods[m].name() + "/" + metric +
                                   " violates the identity by " + fmt(*err)};
                }
                ++produced;
            }
        }
    }

    auto stream = seedkit::derive_stream(Seed{20260810}, "acceptance/grids");
    for (int rep = 0; rep < 1000; ++rep) {
        const auto rows = 1 + stream.next_below(20);
        const auto cols = 1 + stream.next_below(20);
        const double offset = stream.next_unit() * 100.0;
        std::vector<std::vector<double>> grid(rows);
        for (auto& row : grid) {
            row = seedkit::draw_uniform(stream, cols);
            for (double& v : row) v += offset;
        }
        if (const auto err = check(grid)) {
            return Failure{"random grid " + std::to_string(rep) + " (" + std::to_string(rows) +
                           "x" + std::to_string(cols) + ") violates the identity by " + fmt(*err)};
        }
    }
    detail = std::to_string(produced) + " produced grids + 1000 random grids within 1e-12";
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// criterion 3: wasserstein oracle + metric axioms
// ---------------------------------------------------------------------------
CriterionResult criterion_wasserstein_oracle(Context&, std::string& detail) {
    auto stream = seedkit::derive_stream(Seed{20260810}, "acceptance/w2");
    for (int rep = 0; rep < 100; ++rep) {
        const auto n = 1 + stream.next_below(6);
        const auto a = seedkit::draw_uniform(stream, n);
        const auto b = seedkit::draw_uniform(stream, n);
        const double closed =
            stats::wasserstein2(stats::EmpiricalDistribution(a), stats::EmpiricalDistribution(b));
        const double brute = oracles::w2_bruteforce(a, b);
        if (std::abs(closed - brute) > 1e-9) {
            return Failure{"pair " + std::to_string(rep) + ": closed form " + fmt(closed) +
                           " vs exhaustive " + fmt(brute)};
        }
    }
    for (int rep = 0; rep < 100; ++rep) {
        const auto n = 1 + stream.next_below(12);
        stats::EmpiricalDistribution a(seedkit::draw_uniform(stream, n));
        stats::EmpiricalDistribution b(seedkit::draw_uniform(stream, n));
        stats::EmpiricalDistribution c(seedkit::draw_uniform(stream, n));
        if (stats::wasserstein2(a, a) != 0.0) return Failure{"identity axiom failed"};
        if (stats::wasserstein2(a, b) != stats::wasserstein2(b, a)) {
            return Failure{"symmetry axiom failed"};
        }
        if (stats::wasserstein2(a, c) >
            stats::wasserstein2(a, b) + stats::wasserstein2(b, c) + 1e-12) {
            return Failure{"triangle inequality failed on triple " + std::to_string(rep)};
        }
    }
    detail = "100 pairs match the exhaustive pairing minimum; axioms hold on 100 triples";
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// criterion 4: gradient correctness
// ---------------------------------------------------------------------------
CriterionResult criterion_gradient_correctness(Context&, std::string& detail) {
    auto stream = seedkit::derive_stream(Seed{20260810}, "acceptance/grad");
    int tested = 0;
    int attempts = 0;
    double worst = 0.0;
    while (tested < 20) {
        if (++attempts > 400) return Failure{"could not draw 20 kink-free candidates"};
        nncore::Architecture arch;
        arch.input_dim = 2 + static_cast<int>(stream.next_below(4));
        const int depth = 1 + static_cast<int>(stream.next_below(2));
        for (int l = 0; l < depth; ++l) {
            arch.hidden.push_back(3 + static_cast<int>(stream.next_below(12)));
        }
        arch.n_classes = 2 + static_cast<int>(stream.next_below(4));

        nncore::ModelParams params = nncore::ModelParams::zeros_like(arch);
        for (auto& w : params.weights) {
            const auto draws = seedkit::draw_gaussian(stream, w.size());
            for (std::size_t k = 0; k < w.size(); ++k) w[k] = 0.6 * draws[k];
        }
        for (auto& b : params.biases) {
            const auto draws = seedkit::draw_gaussian(stream, b.size());
            for (std::size_t k = 0; k < b.size(); ++k) b[k] = 0.3 * draws[k];
        }
        std::vector<nncore::Sample> batch;
        const int batch_size = 2 + static_cast<int>(stream.next_below(5));
        for (int k = 0; k < batch_size; ++k) {
            nncore::Sample s;
            s.x = seedkit::draw_gaussian(stream, static_cast<std::size_t>(arch.input_dim));
            s.y = static_cast<int>(stream.next_below(static_cast<std::uint64_t>(arch.n_classes)));
            batch.push_back(std::move(s));
        }
        // central differences assume smoothness in a +-1e-5 neighbourhood
        if (oracles::min_kink_margin(params, batch) < 1e-3) continue;

        const double l2 = tested % 2 == 0 ? 0.0 : 1e-3;
        const auto lg = nncore::loss_and_grad(params, batch, l2);
        const auto numeric = oracles::finite_difference_grad(params, batch, l2, 1e-5);
        // relative error with a 1e-4 magnitude floor for near-zero entries
        double max_rel = 0.0;
        for (std::size_t l = 0; l < lg.grad.weights.size(); ++l) {
            for (std::size_t k = 0; k < lg.grad.weights[l].size(); ++k) {
                const double a = lg.grad.weights[l][k], n = numeric.weights[l][k];
                max_rel = std::max(max_rel,
                                   std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-4}));
            }
            for (std::size_t k = 0; k < lg.grad.biases[l].size(); ++k) {
                const double a = lg.grad.biases[l][k], n = numeric.biases[l][k];
                max_rel = std::max(max_rel,
                                   std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-4}));
            }
        }
        if (max_rel > 1e-5) {
            return Failure{"network " + std::to_string(tested) + ": max relative error " +
                           fmt(max_rel)};
        }
        worst = std::max(worst, max_rel);
        ++tested;
    }
    detail = "20 networks, worst relative error " + fmt(worst);
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// criterion 5: phenomenon reproduction
// ---------------------------------------------------------------------------
CriterionResult criterion_phenomenon(Context& ctx, std::string& detail) {
    ctx.ensure_sweeps();
    const auto& grid_a = ctx.common_grid();
    const auto& grid_b = ctx.recommended_grid();
    if (ctx.sweep_seconds > 600.0) {
        return Failure{"runtime " + fmt(ctx.sweep_seconds) + " s exceeds the 10 min budget"};
    }

    auto flat = [](const std::vector<std::vector<double>>& m) {
        std::vector<double> out;
        for (const auto& row : m) out.insert(out.end(), row.begin(), row.end());
        return out;
    };
    std::ostringstream note;
    for (const MethodKind kind : {MethodKind::ssd, MethodKind::lfssd}) {
        const auto fa = flat(sweep::grid_metric(grid_a, kind, "forget_test_acc"));
        const auto fb = flat(sweep::grid_metric(grid_b, kind, "forget_test_acc"));
        const auto [amin, amax] = std::minmax_element(fa.begin(), fa.end());
        const auto [bmin, bmax] = std::minmax_element(fb.begin(), fb.end());
        const double spread_a = *amax - *amin;
        const double spread_b = *bmax - *bmin;
        if (spread_a != 0.0) {
            return Failure{std::string(unlearners::to_string(kind)) +
                           ": common-practice forget spread " + fmt(spread_a) +
                           ", expected exactly 0"};
        }
        if (!(spread_b > 0.0)) {
            return Failure{std::string(unlearners::to_string(kind)) +
                           ": recommended-protocol forget spread is 0, expected > 0"};
        }
        const double w2 = stats::wasserstein2(stats::EmpiricalDistribution(fa),
                                              stats::EmpiricalDistribution(fb));
        if (!(w2 > 0.0)) {
            return Failure{std::string(unlearners::to_string(kind)) +
                           ": W2 between protocols is 0"};
        }
        note << unlearners::to_string(kind) << " spreadB=" << fmt(spread_b) << " w2=" << fmt(w2)
             << "; ";
    }

    double retrain_fte_max = 0.0;
    double retrain_rte_min = 1.0;
    for (const sweep::SweepGrid* grid : {&grid_a, &grid_b}) {
        for (std::size_t m = 0; m < grid->plan.methods.size(); ++m) {
            if (grid->plan.methods[m].kind != MethodKind::retrain) continue;
            for (const auto& rec : grid->records[m]) {
                retrain_fte_max = std::max(retrain_fte_max, rec.forget_test_acc);
                retrain_rte_min = std::min(retrain_rte_min, rec.retain_test_acc);
            }
        }
    }
    if (retrain_fte_max > 0.35) {
        return Failure{"retrain forget-test accuracy " + fmt(retrain_fte_max) + " exceeds 0.35"};
    }
    if (retrain_rte_min < 0.90) {
        return Failure{"retrain retain-test accuracy " + fmt(retrain_rte_min) + " below 0.90"};
    }
    note << "retrain fte<=" << fmt(retrain_fte_max) << " rte>=" << fmt(retrain_rte_min) << "; "
         << fmt(ctx.sweep_seconds) << " s";
    detail = note.str();
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// criterion 6: end-to-end determinism through the cli
// ---------------------------------------------------------------------------
int run_cli(const std::string& command) {
    const int status = std::system(command.c_str());
    if (status == -1) return -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -2;
}

std::string slurp_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string strip_wall_ms(const std::string& csv) {
    std::stringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        const auto fields = textio::split_csv_line(line);
        std::string rebuilt;
        for (std::size_t k = 0; k < fields.size(); ++k) {
            if (k == 9) continue;  // wall_ms column
            if (!rebuilt.empty()) rebuilt += ',';
            rebuilt += fields[k];
        }
        out += rebuilt + '\n';
    }
    return out;
}

CriterionResult criterion_end_to_end_determinism(Context& ctx, std::string& detail) {
    if (ctx.cli_path.empty()) {
        return Failure{"no --cli <path-to-unlbench> given"};
    }
    const auto config_path = ctx.workdir / "reference_config.json";
    {
        std::ofstream out(config_path);
        out << kReferenceConfig << '\n';
    }
    const auto log_path = ctx.workdir / "cli.log";
    const auto run = [&](const std::string& name, int threads) -> std::optional<std::string> {
        const auto out_dir = ctx.workdir / name;
        std::filesystem::remove_all(out_dir);
        const std::string cmd = ctx.cli_path + " sweep --config " + config_path.string() +
                                " --out " + out_dir.string() + " --threads " +
                                std::to_string(threads) + " >> " + log_path.string() + " 2>&1";
        if (run_cli(cmd) != 0) return "sweep exited nonzero for " + name;
        const std::string analyze = ctx.cli_path + " analyze --in " +
                                    (out_dir / "results_common_practice.csv").string() +
                                    " --in " +
                                    (out_dir / "results_recommended.csv").string() + " --out " +
                                    (out_dir / "analysis.json").string() + " >> " +
                                    log_path.string() + " 2>&1";
        if (run_cli(analyze) != 0) return "analyze exited nonzero for " + name;
        return std::nullopt;
    };

    // different thread counts must not affect any output byte
    if (const auto err = run("run1", 1)) return Failure{*err};
    if (const auto err = run("run2", 2)) return Failure{*err};

    for (const char* name : {"results_common_practice.csv", "results_recommended.csv"}) {
        const auto a = strip_wall_ms(slurp_file(ctx.workdir / "run1" / name));
        const auto b = strip_wall_ms(slurp_file(ctx.workdir / "run2" / name));
        if (a.empty() || a != b) {
            return Failure{std::string(name) + " differs between reruns (wall_ms excluded)"};
        }
    }
    const auto ja = slurp_file(ctx.workdir / "run1" / "analysis.json");
    const auto jb = slurp_file(ctx.workdir / "run2" / "analysis.json");
    if (ja.empty() || ja != jb) return Failure{"analysis.json differs between reruns"};
    detail = "sweep+analyze byte-identical across reruns (threads 1 vs 2)";
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// criterion 7: protocol shapes
// ---------------------------------------------------------------------------
CriterionResult criterion_protocol_shapes(Context& ctx, std::string& detail) {
    const auto plans = ctx.config.build_plans();
    if (plans.size() != 2) return Failure{"expected 2 plans, got " + std::to_string(plans.size())};

    const auto doc_a = cli::plan_to_json(plans[0]);
    const auto doc_b = cli::plan_to_json(plans[1]);
    if (doc_a["protocol"] != "common_practice" || doc_a["I"] != 1 || doc_a["J"] != 11 ||
        doc_a["training_seeds"].size() != 1 || doc_a["unlearning_seeds"][0].size() != 11) {
        return Failure{"common-practice plan is not the I=1, J=11 configuration"};
    }
    if (doc_b["protocol"] != "recommended" || doc_b["I"] != 11 || doc_b["J"] != 1 ||
        doc_b["training_seeds"].size() != 11) {
        return Failure{"recommended plan is not the I=11, J=1 configuration"};
    }
    for (const auto& row : doc_b["unlearning_seeds"]) {
        if (row.size() != 1) return Failure{"recommended plan row does not hold exactly 1 seed"};
    }
    std::set<std::uint64_t> train_values;
    for (const auto& v : doc_b["training_seeds"]) train_values.insert(v.get<std::uint64_t>());
    if (train_values.size() != 11) return Failure{"recommended training seeds not distinct"};
    detail = "emitted plans are exactly I=1,J=11 and I=11,J=1";
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    Context ctx;
    ctx.workdir = std::filesystem::temp_directory_path() / "unlbench_acceptance";
    for (int k = 1; k < argc; ++k) {
        const std::string arg = argv[k];
        if (arg == "--cli" && k + 1 < argc) ctx.cli_path = argv[++k];
        if (arg == "--workdir" && k + 1 < argc) ctx.workdir = argv[++k];
    }
    std::filesystem::remove_all(ctx.workdir);
    std::filesystem::create_directories(ctx.workdir);
    try {
        ctx.config = cli::parse_config(nlohmann::json::parse(kReferenceConfig));
    } catch (const std::exception& e) {
        std::cout << "FAIL criterion 0 reference-config: " << e.what() << '\n';
        return 1;
    }

    struct Criterion {
        int id;
        const char* name;
        std::function<CriterionResult(Context&, std::string&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "determinism-dichotomy", criterion_determinism_dichotomy},
        {2, "variance-decomposition-identity", criterion_decomposition_identity},
        {3, "wasserstein-oracle", criterion_wasserstein_oracle},
        {4, "gradient-correctness", criterion_gradient_correctness},
        {5, "phenomenon-reproduction", criterion_phenomenon},
        {6, "end-to-end-determinism", criterion_end_to_end_determinism},
        {7, "protocol-shapes", criterion_protocol_shapes},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        std::string detail;
        CriterionResult result;
        try {
            result = criterion.run(ctx, detail);
        } catch (const std::exception& e) {
            result = Failure{std::string("exception: ") + e.what()};
        }
        if (result) {
            ++failures;
            std::cout << "FAIL criterion " << criterion.id << ' ' << criterion.name << ": "
                      << result->reason << '\n';
        } else {
            std::cout << "PASS criterion " << criterion.id << ' ' << criterion.name;
            if (!detail.empty()) std::cout << " (" << detail << ')';
            std::cout << '\n';
        }
        std::cout.flush();
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all acceptance criteria passed\n";
    return 0;
}
