#pragma once

// Cyclic power-method-like iterations (CyPMLI) over two coupled waveform
// copies X1, X2. Each half-cycle fixes one copy, builds R(X_fixed), loads it
// with lambda_m and runs the phase-projection update
//
//     vec(X) <- exp(j arg( (lambda_m I - R) vec(X) + mu vec(X_fixed) ))
//
// where the momentum weight mu is rho (absolute scaling) or rho * lambda_m
// (loading scaling, the default).

#include "nfwave/correlation.hpp"
#include "nfwave/model.hpp"
#include "nfwave/nearfield.hpp"
#include "nfwave/objective.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nfwave {

enum class PenaltyScaling {
    Loading,   // momentum = rho * lambda_m
    Absolute,  // momentum = rho
};

struct SolverConfig {
    double gamma = 0.5;
    double rho = 2.0;
    int epochs = 200;
    double inner_tol = 1e-5;
    int inner_max = 100;
    double outer_tol = 1e-6;
    std::uint64_t seed = 1;
    PenaltyScaling penalty_scaling = PenaltyScaling::Loading;
    double lambda_tol = 1e-7;
    int lambda_max_iters = 5000;

    bool operator==(const SolverConfig&) const = default;
};

/// Throws std::invalid_argument with a field-specific message.
void validate(const SolverConfig& cfg);

/// exp(j w), w i.i.d. uniform on [0, 2 pi) from a seeded 64-bit Mersenne
/// twister using the top 53 bits of each draw.
WaveformMatrix init_waveform(int code_length, int num_antennas, std::uint64_t seed);

/// Entrywise exp(j arg(w)); exact zeros map to 1.
CVector phase_project(const CVector& w);

struct InnerResult {
    CVector v;
    int iterations = 0;
    bool converged = false;
};

/// Generic PMLI on C^dim: v <- phase_project(loaded v + momentum * anchor)
/// until ||v_new - v|| / sqrt(dim) < tol or max_iters. `observer` sees every
/// iterate, starting with `start`.
InnerResult pmli_iterate(const LinearMap& loaded, const CVector& anchor, double momentum, CVector start,
                         double tol, int max_iters,
                         const std::function<void(const CVector&)>& observer = {});

/// vᴴ A v + 2 momentum Re(anchorᴴ v): the quantity PMLI ascends for PSD A.
double augmented_objective(const LinearMap& loaded, const CVector& anchor, double momentum,
                           const CVector& v);

/// One PMLI solve of X_var against the fixed reference the operator was built on.
/// The operator's lambda must already be set.
WaveformMatrix pmli_inner(const WaveformMatrix& x_fixed, const WaveformMatrix& x_var,
                          const CombinedOperator& op, double momentum, const SolverConfig& cfg,
                          int* iterations = nullptr);

struct TraceEntry {
    int epoch = 0;            // 0 for the initial record
    std::string half;         // "init", "x2" or "x1"
    double combined = 0.0;    // gamma * matching + (1 - gamma) * wisl_quadratic
    double matching = 0.0;    // sum (Phat - P)^2
    double wisl_quadratic = 0.0;  // sum_k ||X^H J_k X||_F^2
    double wisl = 0.0;        // direct correlation-domain WISL
    double copy_gap = 0.0;    // ||X1 - X2||_F
    double lambda_m = 0.0;
    int inner_iterations = 0;
};

struct SolverState {
    WaveformMatrix x1;
    WaveformMatrix x2;
    double lambda_m = 0.0;
    std::vector<TraceEntry> trace;
    std::vector<std::string> warnings;
    int epochs_run = 0;
    bool converged = false;

    /// The reported solution.
    const WaveformMatrix& solution() const { return x1; }
    double normalized_gap() const;
};

/// Objective components of one waveform.
TraceEntry evaluate(const CMatrix& x, const BeampatternOperator& beam, const WislOperator& wisl_op,
                    double gamma);

SolverState cypmli(const SteeringContext& ctx, const DesiredBeampattern& desired,
                   const WislProfile& profile, const SolverConfig& cfg);

}  // namespace nfwave
