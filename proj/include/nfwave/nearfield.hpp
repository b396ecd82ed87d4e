#pragma once

// Near-field geometry: element-to-target distances, Fresnel steering
// vectors, DFT spectra and the discretized angle x range x bin beampattern.

#include "nfwave/model.hpp"

namespace nfwave {

/// Exact distance from element `element` (0-based; element 0 is the
/// reference) to a target at range p and sine-angle theta:
/// sqrt(p^2 + (e d)^2 - 2 p e d theta). Throws std::domain_error on a
/// negative radicand or invalid inputs.
double exact_distance(double p, double theta, int element, double spacing);

/// Second-order Fresnel expansion p - e d theta + (e d)^2 (1 - theta^2) / (2p).
double fresnel_distance(double p, double theta, int element, double spacing);

/// Fresnel-approximated near-field steering vector, entries of modulus 1/sqrt(M).
/// `p` is in normalized range units (scaled by config.range_unit_m).
CVector steering_vector(double p, double theta, const ArrayConfig& config);

/// Precomputed discretized steering vectors alpha(k1, k2, u) = exp(-j 2 pi f) a*(theta, p),
/// f = u / (N Ts).
class SteeringContext {
public:
    SteeringContext(ArrayConfig config, GridSpec grid);

    const ArrayConfig& config() const { return config_; }
    const GridSpec& grid() const { return grid_; }
    double fraunhofer() const { return fraunhofer_; }

    int num_antennas() const { return config_.num_antennas; }
    int code_length() const { return config_.code_length; }

    std::size_t cell_index(int a, int r, int u) const {
        return (static_cast<std::size_t>(a) * grid_.num_ranges + r) * grid_.num_bins + u;
    }
    /// Column of length M.
    auto alpha(int a, int r, int u) const {
        return alpha_.col(static_cast<Eigen::Index>(cell_index(a, r, u)));
    }
    auto alpha(std::size_t cell) const { return alpha_.col(static_cast<Eigen::Index>(cell)); }

    const CMatrix& alpha_table() const { return alpha_; }

private:
    ArrayConfig config_;
    GridSpec grid_;
    double fraunhofer_ = 0.0;
    CMatrix alpha_;  // M x (K1 K2 N)
};

/// Throws std::invalid_argument when grid bins differ from the code length.
SteeringContext build_steering_context(const ArrayConfig& config, const GridSpec& grid);

/// DFT vector f_u with entries exp(-j 2 pi n u / N).
CVector dft_vector(int code_length, int bin);

/// y_u = X^T f_u, length M.
CVector spectrum_bin(const CMatrix& x, int bin);

/// Per-antenna DFT: row u of the result is y_u^T = (X^T f_u)^T, so the
/// result is N x M with entry (u, m) = sum_n x_m(n) exp(-j 2 pi n u / N).
CMatrix dft_spectrum(const CMatrix& x);

/// |alpha^H X^T f_u|^2. Throws std::out_of_range on a bad index.
double beampattern_point(const CMatrix& x, const SteeringContext& ctx, int a, int r, int u);

/// All cells, same layout as GridField.
GridField beampattern_grid(const CMatrix& x, const SteeringContext& ctx);

}  // namespace nfwave
