#include "unlbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "unlbench/config.hpp"
#include "unlbench/errors.hpp"
#include "unlbench/textio.hpp"

namespace unlbench::cli {

using nlohmann::ordered_json;

std::vector<double> MetricGrid::flat(const std::string& metric) const {
    const auto it = metrics.find(metric);
    if (it == metrics.end()) throw ConfigError("metric '" + metric + "' absent from grid");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(I) * static_cast<std::size_t>(J));
    for (const auto& row : it->second) out.insert(out.end(), row.begin(), row.end());
    return out;
}

namespace {

struct GroupKey {
    std::string target_kind;
    int target_id;
    std::string method;
    std::string digest;

    bool operator<(const GroupKey& other) const {
        return std::tie(target_kind, target_id, method, digest) <
               std::tie(other.target_kind, other.target_id, other.method, other.digest);
    }
};

struct SeedRows {
    seedkit::Seed train_seed;
    std::vector<const sweep::CsvRow*> rows;
};

MetricGrid build_grid(const GroupKey& key, const std::vector<SeedRows>& seed_rows,
                      std::string protocol) {
    MetricGrid grid;
    grid.protocol = std::move(protocol);
    grid.target.kind = datagen::target_kind_from_string(key.target_kind);
    grid.target.id = key.target_id;
    grid.method = key.method;
    grid.hyper_digest = key.digest;
    grid.I = static_cast<int>(seed_rows.size());
    grid.J = static_cast<int>(seed_rows.front().rows.size());
    for (const auto& name : sweep::metric_names()) {
        grid.metrics[name] = {};
    }
    for (const auto& sr : seed_rows) {
        grid.training_seeds.push_back(sr.train_seed);
        std::vector<double> rt, ft, rte, fte;
        for (const auto* row : sr.rows) {
            rt.push_back(row->rec.retain_train_acc);
            ft.push_back(row->rec.forget_train_acc);
            rte.push_back(row->rec.retain_test_acc);
            fte.push_back(row->rec.forget_test_acc);
        }
        grid.metrics["retain_train_acc"].push_back(std::move(rt));
        grid.metrics["forget_train_acc"].push_back(std::move(ft));
        grid.metrics["retain_test_acc"].push_back(std::move(rte));
        grid.metrics["forget_test_acc"].push_back(std::move(fte));
    }
    return grid;
}

std::vector<MetricGrid> grids_of_rows(const std::vector<sweep::CsvRow>& rows) {
    if (rows.empty()) throw ConfigError("results csv holds no records");

    std::vector<GroupKey> order;
    std::map<GroupKey, std::vector<SeedRows>> groups;
    for (const auto& row : rows) {
        GroupKey key{datagen::to_string(row.target.kind), row.target.id, row.rec.method,
                     row.rec.hyper_digest};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        auto& seed_rows = it->second;
        auto sub = std::find_if(seed_rows.begin(), seed_rows.end(), [&](const SeedRows& sr) {
            return sr.train_seed == row.rec.train_seed;
        });
        if (sub == seed_rows.end()) {
            seed_rows.push_back(SeedRows{row.rec.train_seed, {}});
            sub = seed_rows.end() - 1;
        }
        for (const auto* existing : sub->rows) {
            if (existing->rec.unlearn_seed == row.rec.unlearn_seed) {
                throw ConfigError(
                    "duplicate (train_seed, unlearn_seed) pair for method '" + row.rec.method +
                    "'; this usually means two protocols with colliding seeds were "
                    "concatenated into one csv - analyze the per-protocol csv files instead");
            }
        }
        sub->rows.push_back(&row);
    }

    std::vector<MetricGrid> grids;
    for (const auto& key : order) {
        const auto& seed_rows = groups.at(key);
        std::size_t multi = 0, single = 0;
        for (const auto& sr : seed_rows) {
            (sr.rows.size() > 1 ? multi : single) += 1;
        }
        const bool rectangular = std::all_of(
            seed_rows.begin(), seed_rows.end(),
            [&](const SeedRows& sr) { return sr.rows.size() == seed_rows.front().rows.size(); });
        if (rectangular) {
            grids.push_back(build_grid(key, seed_rows,
                                       seed_rows.size() == 1 ? "common_practice" : "recommended"));
        } else if (multi == 1 && single >= 2) {
            // One multi-seed row is a common-practice run; the singleton rows
            // form the recommended run.
            std::vector<SeedRows> common, recommended;
            for (const auto& sr : seed_rows) {
                (sr.rows.size() > 1 ? common : recommended).push_back(sr);
            }
            grids.push_back(build_grid(key, common, "common_practice"));
            grids.push_back(build_grid(key, recommended, "recommended"));
        } else {
            throw ConfigError("cannot infer protocols for method '" + key.method +
                              "': ambiguous grid shapes in one csv - analyze the per-protocol "
                              "csv files separately");
        }
    }
    return grids;
}

int protocol_rank(const std::string& p) {
    if (p == "common_practice") return 0;
    if (p == "recommended") return 1;
    return 2;
}

void sort_grids(std::vector<MetricGrid>& grids) {
    std::stable_sort(grids.begin(), grids.end(), [](const MetricGrid& a, const MetricGrid& b) {
        const auto key = [](const MetricGrid& g) {
            return std::make_tuple(protocol_rank(g.protocol), std::string(datagen::to_string(g.target.kind)),
                                   g.target.id, g.method, g.hyper_digest);
        };
        return key(a) < key(b);
    });
}

}  // namespace

std::vector<MetricGrid> reconstruct_grids(const std::vector<std::vector<sweep::CsvRow>>& csvs) {
    std::vector<MetricGrid> grids;
    for (const auto& rows : csvs) {
        auto part = grids_of_rows(rows);
        grids.insert(grids.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
    }
    std::set<std::tuple<std::string, std::string, int, std::string, std::string>> seen;
    for (const auto& g : grids) {
        const auto key = std::make_tuple(g.protocol, std::string(datagen::to_string(g.target.kind)),
                                         g.target.id, g.method, g.hyper_digest);
        if (!seen.insert(key).second) {
            throw ConfigError("duplicate grid for protocol '" + g.protocol + "', method '" +
                              g.method + "': the same protocol appears in more than one input");
        }
    }
    sort_grids(grids);
    return grids;
}

std::vector<MetricGrid> grids_of_sweep(const sweep::SweepGrid& grid) {
    std::vector<MetricGrid> out;
    for (std::size_t m = 0; m < grid.plan.methods.size(); ++m) {
        MetricGrid g;
        g.protocol = grid.plan.protocol;
        g.target = grid.plan.target;
        g.method = grid.plan.methods[m].name();
        g.hyper_digest = grid.plan.methods[m].hyper_digest();
        g.I = grid.plan.I;
        g.J = grid.plan.J;
        g.training_seeds = grid.plan.training_seeds;
        for (const auto& name : sweep::metric_names()) {
            g.metrics[name] = sweep::grid_metric(grid, m, name);
        }
        out.push_back(std::move(g));
    }
    sort_grids(out);
    return out;
}

namespace {

ordered_json quantile_json(const stats::QuantileSummary& q) {
    return {{"min", q.min}, {"q25", q.q25}, {"q50", q.q50}, {"q75", q.q75}, {"max", q.max}};
}

const MetricGrid* find_other_protocol(const std::vector<MetricGrid>& grids,
                                      const MetricGrid& grid) {
    for (const auto& other : grids) {
        if (&other == &grid) continue;
        if (other.protocol != grid.protocol && other.target.kind == grid.target.kind &&
            other.target.id == grid.target.id && other.method == grid.method &&
            other.hyper_digest == grid.hyper_digest) {
            return &other;
        }
    }
    return nullptr;
}

}  // namespace

nlohmann::ordered_json analyze_grids(const std::vector<MetricGrid>& grids) {
    ordered_json doc;
    doc["schema"] = "unlbench-analysis-v1";
    doc["conventions"] = {
        {"variance", "population (1/N) moments; total = between + within exactly"},
        {"quantiles", "linear interpolation between order statistics at (n-1)*q"},
        {"accuracy_domain", "fractions in [0, 1], never percentages"},
        {"subclass_forget_accuracy",
         "for sub_class targets the forget sets are scored against the superclass label, which "
         "other subclasses keep predictable"},
    };
    doc["groups"] = ordered_json::array();
    for (const auto& grid : grids) {
        ordered_json entry;
        entry["protocol"] = grid.protocol;
        entry["target_kind"] = datagen::to_string(grid.target.kind);
        entry["target_id"] = grid.target.id;
        entry["method"] = grid.method;
        entry["hyper_digest"] = grid.hyper_digest;
        entry["I"] = grid.I;
        entry["J"] = grid.J;
        ordered_json seeds = ordered_json::array();
        for (const auto& s : grid.training_seeds) seeds.push_back(s.value);
        entry["training_seeds"] = seeds;

        const MetricGrid* other = find_other_protocol(grids, grid);
        ordered_json metrics;
        for (const auto& name : sweep::metric_names()) {
            const auto& matrix = grid.metrics.at(name);
            const auto dec = stats::decompose(matrix);
            stats::EmpiricalDistribution dist(grid.flat(name));
            ordered_json m;
            m["v_total"] = dec.total;
            m["v_between"] = dec.between;
            m["v_within"] = dec.within;
            m["row_conditionals"] = dec.row_conditionals;
            m["quantiles"] = quantile_json(stats::summarize_quantiles(dist));
            if (other != nullptr) {
                stats::EmpiricalDistribution other_dist(other->flat(name));
                m["w2_vs_other_protocol"] = stats::wasserstein2(dist, other_dist);
            }
            metrics[name] = m;
        }
        entry["metrics"] = metrics;
        doc["groups"].push_back(entry);
    }
    return doc;
}

// ---------------------------------------------------------------------------
// SVG figures
// ---------------------------------------------------------------------------

double map_y(double value, double lo, double hi, double y_top, double y_bottom) {
    const double t = (value - lo) / (hi - lo);
    return y_bottom - t * (y_bottom - y_top);
}

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string px(double v) { return textio::format_double(round2(v)); }

std::string xml_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct SvgCanvas {
    std::ostringstream body;
    double width = 0, height = 0;

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0, const std::string& dash = "") {
        body << "  <line x1=\"" << px(x1) << "\" y1=\"" << px(y1) << "\" x2=\"" << px(x2)
             << "\" y2=\"" << px(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
             << px(stroke_width) << "\"";
        if (!dash.empty()) body << " stroke-dasharray=\"" << dash << "\"";
        body << "/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke) {
        body << "  <rect x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\"" << px(w)
             << "\" height=\"" << px(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
             << "\"/>\n";
    }

    void text(double x, double y, const std::string& content, double size = 11.0,
              const std::string& anchor = "middle") {
        body << "  <text x=\"" << px(x) << "\" y=\"" << px(y) << "\" font-size=\"" << px(size)
             << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">"
             << xml_escape(content) << "</text>\n";
    }

    std::string finish() const {
        std::ostringstream out;
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << px(width)
            << "\" height=\"" << px(height) << "\" viewBox=\"0 0 " << px(width) << ' '
            << px(height) << "\">\n"
            << body.str() << "</svg>\n";
        return out.str();
    }
};

struct PlotFrame {
    double left, right, top, bottom;  // pixel bounds of the data area
    double lo, hi;                    // value range mapped onto [bottom, top]

    double y(double v) const { return map_y(v, lo, hi, top, bottom); }
};

void draw_axes(SvgCanvas& svg, const PlotFrame& frame, const std::vector<double>& ticks,
               const std::string& y_label) {
    svg.line(frame.left, frame.top, frame.left, frame.bottom, "#000000");
    svg.line(frame.left, frame.bottom, frame.right, frame.bottom, "#000000");
    for (const double t : ticks) {
        const double y = frame.y(t);
        svg.line(frame.left - 4, y, frame.left, y, "#000000");
        svg.text(frame.left - 7, y + 3.5, textio::format_double(t), 10.0, "end");
    }
    svg.text(frame.left, frame.top - 8, y_label, 11.0, "start");
}

void draw_box(SvgCanvas& svg, const PlotFrame& frame, double x_center, double half_width,
              const stats::QuantileSummary& q, const std::string& fill) {
    const double y25 = frame.y(q.q25);
    const double y50 = frame.y(q.q50);
    const double y75 = frame.y(q.q75);
    const double ymin = frame.y(q.min);
    const double ymax = frame.y(q.max);
    // whiskers span the full data range
    svg.line(x_center, ymin, x_center, ymax, "#555555");
    svg.line(x_center - half_width * 0.6, ymin, x_center + half_width * 0.6, ymin, "#555555");
    svg.line(x_center - half_width * 0.6, ymax, x_center + half_width * 0.6, ymax, "#555555");
    svg.rect(x_center - half_width, y75, 2 * half_width, std::max(0.0, y25 - y75), fill,
             "#333333");
    svg.line(x_center - half_width, y50, x_center + half_width, y50, "#000000", 1.5);
}

struct Fig1Cell {
    std::optional<stats::QuantileSummary> common;
    std::optional<stats::QuantileSummary> recommended;
};

std::string target_slug(const datagen::ForgetTarget& target) {
    return std::string(datagen::to_string(target.kind)) + std::to_string(target.id);
}

}  // namespace

std::vector<std::string> write_report_svgs(const std::vector<MetricGrid>& grids,
                                           const std::string& out_dir) {
    if (grids.empty()) throw ConfigError("report: no grids to plot");
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;

    // Distinct targets and methods in deterministic order.
    std::vector<datagen::ForgetTarget> targets;
    std::vector<std::string> methods;
    for (const auto& g : grids) {
        if (std::none_of(targets.begin(), targets.end(), [&](const datagen::ForgetTarget& t) {
                return t.kind == g.target.kind && t.id == g.target.id;
            })) {
            targets.push_back(g.target);
        }
        if (std::find(methods.begin(), methods.end(), g.method) == methods.end()) {
            methods.push_back(g.method);
        }
    }
    std::sort(methods.begin(), methods.end());

    const bool both_protocols =
        std::any_of(grids.begin(), grids.end(),
                    [](const MetricGrid& g) { return g.protocol == "common_practice"; }) &&
        std::any_of(grids.begin(), grids.end(),
                    [](const MetricGrid& g) { return g.protocol == "recommended"; });

    // Fig. 1 analogue: per (metric, target) boxes per method and protocol.
    for (const auto& metric : sweep::metric_names()) {
        for (const auto& target : targets) {
            SvgCanvas svg;
            const double slot = 92.0;
            PlotFrame frame;
            frame.left = 56;
            frame.top = 34;
            frame.bottom = 270;
            frame.right = frame.left + slot * static_cast<double>(methods.size());
            frame.lo = 0.0;
            frame.hi = 1.0;
            svg.width = frame.right + 16;
            svg.height = 330;

            svg.text((frame.left + frame.right) / 2, 16,
                     metric + " - " + target_slug(target) + " (left box: one training seed, "
                     "right box: multiple training seeds)",
                     11.0);
            draw_axes(svg, frame, {0.0, 0.25, 0.5, 0.75, 1.0}, metric);

            // Retrain quantile guides across the plot (gold standard).
            const MetricGrid* retrain_grid = nullptr;
            for (const auto& g : grids) {
                if (g.method != "retrain" || !(g.target.kind == target.kind) ||
                    g.target.id != target.id) {
                    continue;
                }
                if (retrain_grid == nullptr || g.protocol == "recommended") retrain_grid = &g;
            }
            if (retrain_grid != nullptr) {
                stats::EmpiricalDistribution dist(retrain_grid->flat(metric));
                const auto q = stats::summarize_quantiles(dist);
                for (const double v : {q.q25, q.q50, q.q75}) {
                    svg.line(frame.left, frame.y(v), frame.right, frame.y(v), "#000000", 1.0,
                             "5,4");
                }
            }

            for (std::size_t m = 0; m < methods.size(); ++m) {
                const double x0 = frame.left + slot * (static_cast<double>(m) + 0.5);
                Fig1Cell cell;
                for (const auto& g : grids) {
                    if (g.method != methods[m] || !(g.target.kind == target.kind) ||
                        g.target.id != target.id) {
                        continue;
                    }
                    stats::EmpiricalDistribution dist(g.flat(metric));
                    const auto q = stats::summarize_quantiles(dist);
                    if (g.protocol == "common_practice") {
                        cell.common = q;
                    } else {
                        cell.recommended = q;
                    }
                }
                if (cell.common && cell.recommended) {
                    draw_box(svg, frame, x0 - 16, 13, *cell.common, "#9ecae1");
                    draw_box(svg, frame, x0 + 16, 13, *cell.recommended, "#fdae6b");
                } else if (cell.common) {
                    draw_box(svg, frame, x0, 13, *cell.common, "#9ecae1");
                } else if (cell.recommended) {
                    draw_box(svg, frame, x0, 13, *cell.recommended, "#fdae6b");
                }
                svg.text(x0, frame.bottom + 16, methods[m], 10.0);
            }

            const std::string name = "fig1_" + metric + "_" + target_slug(target) + ".svg";
            std::ofstream out(std::filesystem::path(out_dir) / name);
            out << svg.finish();
            written.push_back(name);
        }
    }

    // Fig. 2 analogue: per metric, the distribution over targets of the
    // between-protocol W2 distance, one box per method.
    if (both_protocols) {
        for (const auto& metric : sweep::metric_names()) {
            std::map<std::string, std::vector<double>> w2_by_method;
            for (const auto& g : grids) {
                if (g.protocol != "common_practice") continue;
                const MetricGrid* other = find_other_protocol(grids, g);
                if (other == nullptr) continue;
                stats::EmpiricalDistribution da(g.flat(metric));
                stats::EmpiricalDistribution db(other->flat(metric));
                w2_by_method[g.method].push_back(stats::wasserstein2(da, db));
            }
            if (w2_by_method.empty()) continue;

            double w2_max = 0.0;
            for (const auto& [method, values] : w2_by_method) {
                for (const double v : values) w2_max = std::max(w2_max, v);
            }

            SvgCanvas svg;
            const double slot = 92.0;
            PlotFrame frame;
            frame.left = 64;
            frame.top = 34;
            frame.bottom = 270;
            frame.right = frame.left + slot * static_cast<double>(w2_by_method.size());
            frame.lo = 0.0;
            frame.hi = w2_max > 0.0 ? w2_max * 1.15 : 1e-3;
            svg.width = frame.right + 16;
            svg.height = 330;

            svg.text((frame.left + frame.right) / 2, 16,
                     "w2 distance between protocols - " + metric + " (one value per target)",
                     11.0);
            draw_axes(svg, frame, {0.0, frame.hi / 2, frame.hi}, "w2");

            std::size_t m = 0;
            for (const auto& [method, values] : w2_by_method) {
                const double x0 = frame.left + slot * (static_cast<double>(m) + 0.5);
                stats::EmpiricalDistribution dist(values);
                draw_box(svg, frame, x0, 16, stats::summarize_quantiles(dist), "#a1d99b");
                svg.text(x0, frame.bottom + 16, method, 10.0);
                ++m;
            }

            const std::string name = "fig2_w2_" + metric + ".svg";
            std::ofstream out(std::filesystem::path(out_dir) / name);
            out << svg.finish();
            written.push_back(name);
        }
    }
    return written;
}

// ---------------------------------------------------------------------------
// Command entry points
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<sweep::CsvRow>> load_csvs(const std::vector<std::string>& paths) {
    if (paths.empty()) throw ConfigError("no input csv given");
    std::vector<std::vector<sweep::CsvRow>> csvs;
    for (const auto& path : paths) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open results csv '" + path + "'");
        csvs.push_back(sweep::read_records_csv(in));
    }
    return csvs;
}

}  // namespace

int cmd_sweep(const std::string& config_path, const std::string& out_dir, int threads,
              std::ostream& diag) {
    try {
        const HarnessConfig config = load_config_file(config_path);
        const std::string out = out_dir.empty() ? config.output_dir : out_dir;
        if (out.empty()) {
            throw ConfigError("no output directory: pass --out or set 'output' in the config");
        }
        if (threads < 1) throw ConfigError("--threads must be >= 1");

        std::filesystem::create_directories(out);
        {
            std::ofstream cfg(std::filesystem::path(out) / "config_used.json");
            cfg << config_to_json(config).dump(2) << '\n';
        }

        const auto plans = config.build_plans();
        {
            ordered_json plans_doc = ordered_json::array();
            for (const auto& plan : plans) plans_doc.push_back(plan_to_json(plan));
            std::ofstream pf(std::filesystem::path(out) / "plans.json");
            pf << plans_doc.dump(2) << '\n';
        }

        std::map<std::string, std::ofstream> csv_files;
        for (const auto& plan : plans) {
            if (!csv_files.contains(plan.protocol)) {
                auto path = std::filesystem::path(out) / ("results_" + plan.protocol + ".csv");
                csv_files.emplace(plan.protocol, std::ofstream(path));
                sweep::write_csv_header(csv_files.at(plan.protocol));
            }
        }

        for (const auto& plan : plans) {
            sweep::RunOptions options;
            options.threads = threads;
            options.out_dir = (std::filesystem::path(out) / "runs" / plan.protocol /
                               target_slug(plan.target))
                                  .string();
            diag << "sweep: protocol=" << plan.protocol << " target=" << target_slug(plan.target)
                 << " I=" << plan.I << " J=" << plan.J << " methods=" << plan.methods.size()
                 << '\n';
            const auto grid = sweep::run_sweep(plan, options);
            auto& csv = csv_files.at(plan.protocol);
            for (std::size_t m = 0; m < grid.records.size(); ++m) {
                for (const auto& rec : grid.records[m]) {
                    sweep::write_record_csv(csv, rec, plan.target);
                }
            }
        }
        for (auto& [protocol, file] : csv_files) {
            diag << "wrote " << (std::filesystem::path(out) / ("results_" + protocol + ".csv")).string()
                 << '\n';
        }
        // Single-protocol runs also get a plain results.csv alias. Both-mode
        // deliberately does not: the two plans share seed values, so their
        // concatenation cannot be split apart again.
        if (csv_files.size() == 1) {
            const auto src =
                std::filesystem::path(out) / ("results_" + csv_files.begin()->first + ".csv");
            csv_files.begin()->second.close();
            std::filesystem::copy_file(src, std::filesystem::path(out) / "results.csv",
                                       std::filesystem::copy_options::overwrite_existing);
        }
        return 0;
    } catch (const ConfigError& e) {
        diag << "config error: " << e.what() << '\n';
        return 2;
    } catch (const CellError& e) {
        diag << "sweep failed: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_analyze(const std::vector<std::string>& in_csvs, const std::string& out_json,
                std::ostream& diag) {
    try {
        const auto grids = reconstruct_grids(load_csvs(in_csvs));
        const auto doc = analyze_grids(grids);
        if (out_json.empty()) throw ConfigError("analyze: no output path given");
        std::ofstream out(out_json);
        if (!out) throw ConfigError("cannot write '" + out_json + "'");
        out << doc.dump(2) << '\n';
        diag << "wrote " << out_json << '\n';
        return 0;
    } catch (const ConfigError& e) {
        diag << "config error: " << e.what() << '\n';
        return 2;
    } catch (const MetricError& e) {
        diag << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_report(const std::vector<std::string>& in_csvs, const std::string& out_dir,
               std::ostream& diag) {
    try {
        const auto grids = reconstruct_grids(load_csvs(in_csvs));
        if (out_dir.empty()) throw ConfigError("report: no output directory given");
        const auto written = write_report_svgs(grids, out_dir);
        for (const auto& name : written) {
            diag << "wrote " << (std::filesystem::path(out_dir) / name).string() << '\n';
        }
        return 0;
    } catch (const ConfigError& e) {
        diag << "config error: " << e.what() << '\n';
        return 2;
    } catch (const MetricError& e) {
        diag << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace unlbench::cli
