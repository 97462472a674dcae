#include "unlbench/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "unlbench/errors.hpp"

namespace unlbench::cli {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(ProtocolConfig::Mode mode) {
    switch (mode) {
        case ProtocolConfig::Mode::common_practice: return "common_practice";
        case ProtocolConfig::Mode::recommended: return "recommended";
        case ProtocolConfig::Mode::both: return "both";
    }
    throw ConfigError("unknown protocol mode");
}

namespace {

// Tracks which keys have been consumed so that leftovers can be reported
// with their JSON path.
class StrictObject {
  public:
    StrictObject(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            throw ConfigError(path_ + ": expected a JSON object");
        }
    }

    ~StrictObject() = default;

    bool has(const std::string& key) const { return node_.contains(key); }

    const json& require(const std::string& key) {
        if (!node_.contains(key)) {
            throw ConfigError(path_ + ": missing required key '" + key + "'");
        }
        seen_.insert(key);
        return node_.at(key);
    }

    const json* optional(const std::string& key) {
        if (!node_.contains(key)) return nullptr;
        seen_.insert(key);
        return &node_.at(key);
    }

    int get_int(const std::string& key) { return as_int(require(key), key); }
    int get_int_or(const std::string& key, int fallback) {
        const json* v = optional(key);
        return v ? as_int(*v, key) : fallback;
    }
    double get_double(const std::string& key) { return as_double(require(key), key); }
    double get_double_or(const std::string& key, double fallback) {
        const json* v = optional(key);
        return v ? as_double(*v, key) : fallback;
    }
    std::uint64_t get_u64(const std::string& key) {
        const json& v = require(key);
        if (!v.is_number_unsigned() && !v.is_number_integer()) {
            throw ConfigError(path_ + "/" + key + ": expected an integer");
        }
        return v.get<std::uint64_t>();
    }
    std::string get_string(const std::string& key) {
        const json& v = require(key);
        if (!v.is_string()) throw ConfigError(path_ + "/" + key + ": expected a string");
        return v.get<std::string>();
    }
    std::string get_string_or(const std::string& key, const std::string& fallback) {
        const json* v = optional(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ConfigError(path_ + "/" + key + ": expected a string");
        return v->get<std::string>();
    }

    const std::string& path() const { return path_; }

    // Call once every expected key has been consumed.
    void reject_unknown() const {
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError(path_ + ": unknown key '" + key + "'");
            }
        }
    }

  private:
    int as_int(const json& v, const std::string& key) const {
        if (!v.is_number_integer() && !v.is_number_unsigned()) {
            throw ConfigError(path_ + "/" + key + ": expected an integer");
        }
        return v.get<int>();
    }
    double as_double(const json& v, const std::string& key) const {
        if (!v.is_number()) {
            throw ConfigError(path_ + "/" + key + ": expected a number");
        }
        return v.get<double>();
    }

    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

datagen::DatasetSpec parse_dataset(StrictObject& obj, seedkit::Seed& seed_out) {
    datagen::DatasetSpec spec;
    spec.dim = obj.get_int_or("dim", spec.dim);
    spec.superclasses = obj.get_int_or("superclasses", spec.superclasses);
    spec.subclasses_per_superclass =
        obj.get_int_or("subclasses_per_superclass", spec.subclasses_per_superclass);
    spec.train_per_subclass = obj.get_int_or("train_per_subclass", spec.train_per_subclass);
    spec.test_per_subclass = obj.get_int_or("test_per_subclass", spec.test_per_subclass);
    spec.cluster_spread = obj.get_double_or("cluster_spread", spec.cluster_spread);
    spec.center_scale = obj.get_double_or("center_scale", spec.center_scale);
    seed_out.value = obj.get_u64("seed");
    obj.reject_unknown();
    spec.validate();
    return spec;
}

unlearners::UnlearnMethod parse_method(const json& node, const std::string& path) {
    StrictObject obj(node, path);
    unlearners::UnlearnMethod method;
    method.kind = unlearners::method_kind_from_string(obj.get_string("kind"));
    auto& h = method.hyper;
    using unlearners::MethodKind;
    switch (method.kind) {
        case MethodKind::retrain:
            break;
        case MethodKind::random_labels:
        case MethodKind::bad_teacher:
            h.epochs_u = obj.get_int_or("epochs_u", h.epochs_u);
            h.lr_u = obj.get_double_or("lr_u", h.lr_u);
            h.batch = obj.get_int_or("batch", h.batch);
            break;
        case MethodKind::unsir:
            h.noise_steps = obj.get_int_or("noise_steps", h.noise_steps);
            h.noise_lr = obj.get_double_or("noise_lr", h.noise_lr);
            h.n_noise = obj.get_int_or("n_noise", h.n_noise);
            h.impair_epochs = obj.get_int_or("impair_epochs", h.impair_epochs);
            h.repair_epochs = obj.get_int_or("repair_epochs", h.repair_epochs);
            h.lr_u = obj.get_double_or("lr_u", h.lr_u);
            h.batch = obj.get_int_or("batch", h.batch);
            break;
        case MethodKind::ssd:
        case MethodKind::lfssd:
            h.alpha = obj.get_double_or("alpha", h.alpha);
            h.lam = obj.get_double_or("lam", h.lam);
            if (const json* b = obj.optional("baseline")) {
                const std::string s = b->get<std::string>();
                if (s == "full_train") {
                    h.baseline = unlearners::ImportanceBaseline::full_train;
                } else if (s == "retain_only") {
                    h.baseline = unlearners::ImportanceBaseline::retain_only;
                } else {
                    throw ConfigError(path + "/baseline: expected full_train or retain_only");
                }
            }
            break;
    }
    obj.reject_unknown();
    method.validate();
    return method;
}

ProtocolConfig parse_protocol(const json& node, const std::string& path) {
    StrictObject obj(node, path);
    ProtocolConfig protocol;
    const std::string mode = obj.get_string("mode");
    if (mode == "common_practice") {
        protocol.mode = ProtocolConfig::Mode::common_practice;
    } else if (mode == "recommended") {
        protocol.mode = ProtocolConfig::Mode::recommended;
    } else if (mode == "both") {
        protocol.mode = ProtocolConfig::Mode::both;
    } else {
        throw ConfigError(path + "/mode: expected common_practice, recommended or both");
    }

    const bool wants_common = protocol.mode != ProtocolConfig::Mode::recommended;
    const bool wants_recommended = protocol.mode != ProtocolConfig::Mode::common_practice;

    if (const json* c = obj.optional("common_practice")) {
        StrictObject cp(*c, path + "/common_practice");
        protocol.common_J = cp.get_int("J");
        cp.reject_unknown();
    } else if (wants_common) {
        throw ConfigError(path + ": missing 'common_practice' settings for mode " + mode);
    }
    if (const json* r = obj.optional("recommended")) {
        StrictObject rc(*r, path + "/recommended");
        protocol.recommended_I = rc.get_int("I");
        protocol.recommended_J = rc.get_int("J");
        rc.reject_unknown();
    } else if (wants_recommended) {
        throw ConfigError(path + ": missing 'recommended' settings for mode " + mode);
    }
    obj.reject_unknown();

    if (wants_common && protocol.common_J < 1) {
        throw ConfigError(path + "/common_practice/J: must be >= 1");
    }
    if (wants_recommended) {
        if (protocol.recommended_I < 1) {
            throw ConfigError(path + "/recommended/I: must be >= 1 (and >= 2 for this protocol)");
        }
        if (protocol.recommended_I < 2) {
            throw ConfigError(path + "/recommended/I: the recommended protocol requires I >= 2");
        }
        if (protocol.recommended_J < 1) {
            throw ConfigError(path + "/recommended/J: must be >= 1");
        }
    }
    return protocol;
}

}  // namespace

HarnessConfig parse_config(const json& doc) {
    StrictObject root(doc, "/");
    HarnessConfig config;

    {
        StrictObject dataset(root.require("dataset"), "/dataset");
        config.dataset_spec = parse_dataset(dataset, config.dataset_seed);
    }
    {
        const json& targets = root.require("targets");
        if (!targets.is_array() || targets.empty()) {
            throw ConfigError("/targets: expected a nonempty array");
        }
        for (std::size_t k = 0; k < targets.size(); ++k) {
            const std::string path = "/targets/" + std::to_string(k);
            StrictObject t(targets.at(k), path);
            datagen::ForgetTarget target;
            target.kind = datagen::target_kind_from_string(t.get_string("kind"));
            target.id = t.get_int("id");
            t.reject_unknown();
            const int bound = target.kind == datagen::ForgetTarget::Kind::full_class
                                  ? config.dataset_spec.superclasses
                                  : config.dataset_spec.total_subclasses();
            if (target.id < 0 || target.id >= bound) {
                throw ConfigError(path + "/id: out of range [0, " + std::to_string(bound) + ")");
            }
            config.targets.push_back(target);
        }
    }
    {
        StrictObject arch(root.require("arch"), "/arch");
        const json& hidden = arch.require("hidden");
        if (!hidden.is_array()) throw ConfigError("/arch/hidden: expected an array");
        for (const auto& h : hidden) {
            if (!h.is_number_integer() && !h.is_number_unsigned()) {
                throw ConfigError("/arch/hidden: expected integers");
            }
            config.hidden.push_back(h.get<int>());
        }
        arch.reject_unknown();
    }
    {
        StrictObject train(root.require("train"), "/train");
        auto& tc = config.train_config;
        tc.epochs = train.get_int_or("epochs", tc.epochs);
        tc.batch_size = train.get_int_or("batch_size", tc.batch_size);
        tc.learning_rate = train.get_double_or("learning_rate", tc.learning_rate);
        tc.momentum = train.get_double_or("momentum", tc.momentum);
        tc.l2 = train.get_double_or("l2", tc.l2);
        train.reject_unknown();
        tc.validate();
    }
    {
        const json& methods = root.require("methods");
        if (!methods.is_array() || methods.empty()) {
            throw ConfigError("/methods: expected a nonempty array");
        }
        for (std::size_t k = 0; k < methods.size(); ++k) {
            config.methods.push_back(
                parse_method(methods.at(k), "/methods/" + std::to_string(k)));
        }
    }
    config.protocol = parse_protocol(root.require("protocol"), "/protocol");
    config.root_seed.value = root.get_u64("root_seed");
    config.output_dir = root.get_string_or("output", "");
    root.reject_unknown();

    config.arch().validate();
    for (const auto& target : config.targets) {
        if (target.kind == datagen::ForgetTarget::Kind::sub_class) {
            for (const auto& m : config.methods) {
                if (m.kind == unlearners::MethodKind::unsir) {
                    throw ConfigError(
                        "/methods: unsir supports full_class targets only; remove it from "
                        "configs with sub_class targets");
                }
            }
        }
    }
    return config;
}

HarnessConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

nncore::Architecture HarnessConfig::arch() const {
    nncore::Architecture arch;
    arch.input_dim = dataset_spec.dim;
    arch.hidden = hidden;
    arch.n_classes = dataset_spec.superclasses;  // the harness predicts superclass labels
    return arch;
}

sweep::PlanInputs HarnessConfig::plan_inputs(const datagen::ForgetTarget& target) const {
    sweep::PlanInputs inputs;
    inputs.methods = methods;
    inputs.target = target;
    inputs.label_mode = datagen::LabelMode::superclass;
    inputs.arch = arch();
    inputs.train_config = train_config;
    inputs.dataset_spec = dataset_spec;
    inputs.dataset_seed = dataset_seed;
    return inputs;
}

std::vector<sweep::SweepPlan> HarnessConfig::build_plans() const {
    std::vector<sweep::SweepPlan> plans;
    const bool wants_common = protocol.mode != ProtocolConfig::Mode::recommended;
    const bool wants_recommended = protocol.mode != ProtocolConfig::Mode::common_practice;
    if (wants_common) {
        for (const auto& target : targets) {
            plans.push_back(sweep::plan_common_practice(protocol.common_J, root_seed,
                                                        plan_inputs(target)));
        }
    }
    if (wants_recommended) {
        for (const auto& target : targets) {
            plans.push_back(sweep::plan_recommended(protocol.recommended_I, protocol.recommended_J,
                                                    root_seed, plan_inputs(target)));
        }
    }
    return plans;
}

nlohmann::ordered_json config_to_json(const HarnessConfig& config) {
    ordered_json doc;
    doc["dataset"] = {{"dim", config.dataset_spec.dim},
                      {"superclasses", config.dataset_spec.superclasses},
                      {"subclasses_per_superclass", config.dataset_spec.subclasses_per_superclass},
                      {"train_per_subclass", config.dataset_spec.train_per_subclass},
                      {"test_per_subclass", config.dataset_spec.test_per_subclass},
                      {"cluster_spread", config.dataset_spec.cluster_spread},
                      {"center_scale", config.dataset_spec.center_scale},
                      {"seed", config.dataset_seed.value}};
    doc["targets"] = ordered_json::array();
    for (const auto& t : config.targets) {
        doc["targets"].push_back({{"kind", datagen::to_string(t.kind)}, {"id", t.id}});
    }
    doc["arch"] = {{"hidden", config.hidden}};
    doc["train"] = {{"epochs", config.train_config.epochs},
                    {"batch_size", config.train_config.batch_size},
                    {"learning_rate", config.train_config.learning_rate},
                    {"momentum", config.train_config.momentum},
                    {"l2", config.train_config.l2}};
    doc["methods"] = ordered_json::array();
    for (const auto& m : config.methods) {
        ordered_json entry;
        entry["kind"] = m.name();
        entry["hyper"] = m.hyper_description();
        entry["hyper_digest"] = m.hyper_digest();
        doc["methods"].push_back(entry);
    }
    ordered_json protocol;
    protocol["mode"] = to_string(config.protocol.mode);
    if (config.protocol.mode != ProtocolConfig::Mode::recommended) {
        protocol["common_practice"] = {{"J", config.protocol.common_J}};
    }
    if (config.protocol.mode != ProtocolConfig::Mode::common_practice) {
        protocol["recommended"] = {{"I", config.protocol.recommended_I},
                                   {"J", config.protocol.recommended_J}};
    }
    doc["protocol"] = protocol;
    doc["root_seed"] = config.root_seed.value;
    if (!config.output_dir.empty()) doc["output"] = config.output_dir;
    return doc;
}

nlohmann::ordered_json plan_to_json(const sweep::SweepPlan& plan) {
    ordered_json doc;
    doc["protocol"] = plan.protocol;
    doc["target"] = {{"kind", datagen::to_string(plan.target.kind)}, {"id", plan.target.id}};
    doc["I"] = plan.I;
    doc["J"] = plan.J;
    doc["training_seeds"] = ordered_json::array();
    for (const auto& s : plan.training_seeds) doc["training_seeds"].push_back(s.value);
    doc["unlearning_seeds"] = ordered_json::array();
    for (const auto& row : plan.unlearning_seeds) {
        ordered_json r = ordered_json::array();
        for (const auto& s : row) r.push_back(s.value);
        doc["unlearning_seeds"].push_back(r);
    }
    doc["methods"] = ordered_json::array();
    for (const auto& m : plan.methods) {
        doc["methods"].push_back({{"kind", m.name()},
                                  {"hyper", m.hyper_description()},
                                  {"hyper_digest", m.hyper_digest()}});
    }
    doc["arch"] = {{"input_dim", plan.arch.input_dim},
                   {"hidden", plan.arch.hidden},
                   {"n_classes", plan.arch.n_classes}};
    doc["train"] = {{"epochs", plan.train_config.epochs},
                    {"batch_size", plan.train_config.batch_size},
                    {"learning_rate", plan.train_config.learning_rate},
                    {"momentum", plan.train_config.momentum},
                    {"l2", plan.train_config.l2}};
    doc["dataset"] = {{"dim", plan.dataset_spec.dim},
                      {"superclasses", plan.dataset_spec.superclasses},
                      {"subclasses_per_superclass", plan.dataset_spec.subclasses_per_superclass},
                      {"train_per_subclass", plan.dataset_spec.train_per_subclass},
                      {"test_per_subclass", plan.dataset_spec.test_per_subclass},
                      {"cluster_spread", plan.dataset_spec.cluster_spread},
                      {"center_scale", plan.dataset_spec.center_scale},
                      {"seed", plan.dataset_seed.value}};
    return doc;
}

}  // namespace unlbench::cli
