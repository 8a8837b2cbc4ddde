// Configuration-driven runs, manifests and canned figure recipes.
//
// A config is a JSON object:
//   {"command": "optimize", "seed": 7, "scale": "ci", "threads": 1, "output_dir": "out",
//    "model": {...overrides...}, "optimize": {...}}
// with exactly one parameter section named after the command. Unknown keys are errors.

#pragma once

#include "fmo/io.hpp"
#include "fmo/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fmo {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "FMO_OUTPUT_DIR";

enum class Scale { Ci, Paper };

struct ScaleCounts {
    int samples;
    int restarts;
    long max_evaluations;
};

ScaleCounts counts_for(Scale scale);
Scale scale_from_string(const std::string& s);
std::string to_string(Scale scale);

struct ExperimentConfig {
    std::string command;
    std::optional<std::uint64_t> seed;
    Scale scale{Scale::Ci};
    int threads{1};
    std::filesystem::path output_dir;
    ModelOverrides model;
    Json params = Json::object();  // the command's section

    static ExperimentConfig from_json(const Json& j);
    Json to_json() const;
};

// Output directory when none is configured: $FMO_OUTPUT_DIR or "fmo-out".
std::filesystem::path default_output_dir();

struct RunResult {
    std::vector<std::filesystem::path> outputs;
    std::string output_hash;  // over numeric outputs, independent of wall time
    Json summary;
};

// Validates the config, runs the command and writes outputs plus manifest.json.
// Throws ValidationError for bad configs and std::runtime_error for numerical failures.
RunResult run(const ExperimentConfig& config);

std::vector<std::string> figure_ids();

// Runs the canned configs for a figure into output_dir/<figure>.
RunResult reproduce(const std::string& figure, Scale scale, std::uint64_t seed, int threads,
                    const std::filesystem::path& output_dir);

}  // namespace fmo
