// JSON for pulses, results and model overrides; CSV writers at 17 significant digits.

#pragma once

#include "fmo/control.hpp"
#include "fmo/ensemble.hpp"
#include "fmo/model.hpp"
#include "fmo/propagator.hpp"
#include "fmo/pulse.hpp"
#include "fmo/thermo.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace fmo {

using Json = nlohmann::json;

Json to_json(const PulseParams& p);
PulseParams pulse_from_json(const Json& j);

Json to_json(const OptimizationResult& r);
OptimizationResult result_from_json(const Json& j);

Json to_json(const ModelOverrides& o);
ModelOverrides overrides_from_json(const Json& j);

// Throws ValidationError naming the first key of `j` not in `allowed`.
void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

PulseParams load_pulse(const std::filesystem::path& path);
void save_pulse(const std::filesystem::path& path, const PulseParams& p);

// Round-trip formatting of a double.
std::string format_number(double v);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);

private:
    std::ofstream out_;
    std::size_t columns_;
};

// t_ps, rho_ii (i = 0..8), re/im of rho_12, rho_34, rho_56, p_sink.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
// t_fs, f, E on `samples` points of [0, T].
void write_envelope_csv(const std::filesystem::path& path, const PulseParams& p, int samples = 1001);
void write_histogram_csv(const std::filesystem::path& path, const EnsembleDistribution& d);
void write_samples_csv(const std::filesystem::path& path, const std::vector<Orientation>& orientations,
                       const std::vector<double>& values);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
void write_grid_csv(const std::filesystem::path& path, const AngleGrid& g);

// FNV-1a 64-bit over the bytes of the given files, in order.
std::uint64_t hash_files(const std::vector<std::filesystem::path>& files);
std::string hex(std::uint64_t v);

}  // namespace fmo
