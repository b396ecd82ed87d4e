#pragma once

// Run configuration: INI-style text with sections [array], [grid],
// [solver], [target], [output]; `key = value` lines; `#` comments.
//
//   [array]   M, N, fc_hz, bandwidth_hz, spacing_m (optional)
//   [grid]    K1, K2
//   [solver]  gamma, rho, epochs, inner_tol, inner_max, outer_tol, seed,
//             weights = uniform | [w_{-N+1}, ..., w_{N-1}]
//   [target]  k1_star, k2_star (1-based), desired_peak
//   [output]  out_dir
//
// Keys before the first section header are looked up in every section.

#include "nfwave/model.hpp"
#include "nfwave/solver.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nfwave {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    int num_antennas = 4;
    int code_length = 64;
    double carrier_hz = 1e9;
    double bandwidth_hz = 2e8;
    std::optional<double> spacing_m;
    int num_angles = 20;
    int num_ranges = 10;
    int k1_star = 15;
    int k2_star = 3;
    double desired_peak = 1.0;
    std::optional<std::vector<double>> weights;  // empty = uniform
    SolverConfig solver;
    std::string out_dir = "nfwave_out";

    bool operator==(const RunConfig&) const = default;
};

/// Parses and validates; throws ConfigError (all unknown keys are listed in one message).
RunConfig parse_config(std::string_view text);
RunConfig parse_config_file(const std::string& path);

/// Throws ConfigError.
void validate(const RunConfig& cfg);

/// Effective-config dump that parse_config reads back to an identical RunConfig.
std::string to_config_text(const RunConfig& cfg);

ArrayConfig array_config(const RunConfig& cfg);
WislProfile wisl_profile(const RunConfig& cfg);

/// 17 significant digits.
std::string format_double(double v);

}  // namespace nfwave
