#pragma once

// End-to-end design run: build the problem from a RunConfig, solve, and
// write the plot-ready artifacts.

#include "nfwave/config.hpp"
#include "nfwave/nearfield.hpp"
#include "nfwave/solver.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

namespace nfwave {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kWaveformFile = "waveform.csv";
inline constexpr const char* kAngleCutFile = "beampattern_angle.csv";
inline constexpr const char* kRangeCutFile = "beampattern_range.csv";
inline constexpr const char* kCorrelationFile = "correlation.csv";
inline constexpr const char* kTraceFile = "trace.jsonl";

struct DesignProblem {
    SteeringContext ctx;
    DesiredBeampattern desired;
    WislProfile profile;
};

/// Delta pattern at (k1_star, k2_star) unless `desired` is given.
DesignProblem build_problem(const RunConfig& cfg, std::optional<DesiredBeampattern> desired = std::nullopt);

/// Reads "k1,k2,u,value" rows (1-based k1/k2, 0-based u; header required).
/// Cells not listed are zero. Throws ConfigError.
DesiredBeampattern load_desired_csv(const std::filesystem::path& path, const GridSpec& grid);

/// Writes the five artifact files into cfg.out_dir and returns their paths.
std::vector<std::filesystem::path> emit_outputs(const SolverState& state, const SteeringContext& ctx,
                                                const RunConfig& cfg);

struct DesignResult {
    SolverState state;
    std::vector<std::filesystem::path> files;
};

DesignResult run_design(const RunConfig& cfg, std::optional<DesiredBeampattern> desired = std::nullopt);

/// One JSON object (no trailing newline).
std::string trace_json(const TraceEntry& e);

}  // namespace nfwave
