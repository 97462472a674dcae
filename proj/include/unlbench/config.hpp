#ifndef UNLBENCH_CONFIG_HPP
#define UNLBENCH_CONFIG_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "unlbench/sweep.hpp"

namespace unlbench::cli {

struct ProtocolConfig {
    enum class Mode { common_practice, recommended, both };
    Mode mode = Mode::both;
    int common_J = 11;
    int recommended_I = 11;
    int recommended_J = 1;
};

const char* to_string(ProtocolConfig::Mode mode);

// Parsed, validated harness configuration. Unknown JSON keys are rejected
// anywhere in the document (a typo in a hyperparameter must not silently
// fall back to a default).
struct HarnessConfig {
    datagen::DatasetSpec dataset_spec;
    seedkit::Seed dataset_seed;
    std::vector<datagen::ForgetTarget> targets;
    std::vector<int> hidden;
    nncore::TrainConfig train_config;
    std::vector<unlearners::UnlearnMethod> methods;
    ProtocolConfig protocol;
    seedkit::Seed root_seed;
    std::string output_dir;  // optional; --out overrides

    nncore::Architecture arch() const;
    sweep::PlanInputs plan_inputs(const datagen::ForgetTarget& target) const;
    // All plans implied by the protocol mode, outer order: protocol, target.
    std::vector<sweep::SweepPlan> build_plans() const;
};

HarnessConfig parse_config(const nlohmann::json& doc);  // throws ConfigError
HarnessConfig load_config_file(const std::string& path);

// The configuration echoed back with every default filled in.
nlohmann::ordered_json config_to_json(const HarnessConfig& config);
nlohmann::ordered_json plan_to_json(const sweep::SweepPlan& plan);

}  // namespace unlbench::cli

#endif
