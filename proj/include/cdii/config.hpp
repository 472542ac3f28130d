#pragma once

#include "cdii/dataset.hpp"
#include "cdii/trainer.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace cdii {

/// One JSON document describing a whole experiment. Unknown keys are
/// rejected with their path; every field has a default, and the echoed form
/// (to_json) materializes all of them, including the derived noise seed.
struct ExperimentConfig {
    std::string example = "four_mode";
    std::string custom_gamma_csv;
    int n = 10000;
    int grid_res = 257;
    double gamma_floor = 0.1;
    double solver_tol = 1e-10;
    std::uint64_t seed = 0;
    NoiseSpec noise{NoiseSpec::Kind::Multiplicative, 0.01, 0};
    bool noise_seed_explicit = false;
    TrainConfig train;
    int eval_resolution = 257;
    std::string output_dir = "out";

    void validate() const;

    /// Resolved noise spec: unless set explicitly, the noise seed derives
    /// from the master seed.
    NoiseSpec resolved_noise() const;

    ExampleId example_id() const;

    nlohmann::json to_json() const;
};

/// Parses a config file, then applies `--set key=value` overrides (dotted
/// paths, values parsed as JSON literals), then the CDII_SEED environment
/// variable if present.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

/// Same, starting from the built-in defaults instead of a file.
ExperimentConfig default_config(const std::vector<std::string>& overrides = {});

ExperimentConfig config_from_json(nlohmann::json doc);

} // namespace cdii
