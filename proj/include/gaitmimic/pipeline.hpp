#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaitmimic/policy.hpp"
#include "gaitmimic/retarget.hpp"
#include "gaitmimic/types.hpp"

namespace gaitmimic {

/// One JSON document drives every subcommand, so a run is reproducible from
/// the config file plus the master seed. Output directories are runtime
/// arguments, not configuration, and never enter the config hash.
struct PipelineConfig {
    std::string trace_csv;
    std::string model_json;  // empty: built-in default model
    TaskMode task = TaskMode::kPeriodic;
    BuildOptions build;
    double speed_delta = 0.05;
    TrainConfig train;
    std::uint64_t master_seed = 1;

    void validate() const;
    std::string to_json() const;
    static PipelineConfig from_json(const std::string& text);
    static PipelineConfig from_file(const std::string& path);

    RobotModel load_model() const;
    GaitProgram build_program() const;
};

/// Dispatch one CLI invocation (arguments after the program name).
/// Returns 0 on success, 2 on usage errors, 1 on data errors.
int run_subcommand(const std::vector<std::string>& args);

/// Convert a prior subcommand's output into a tidy CSV plus a deterministic
/// SVG line chart. `kind` is one of decomposition, gait, rewards,
/// trajectory. The tidy CSV lands next to the SVG with a .csv extension.
void emit_plot_data(const std::string& kind, const std::string& input_path,
                    const std::string& output_path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace gaitmimic
