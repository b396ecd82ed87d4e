#pragma once

// Core domain types: array geometry, discretization grids, unimodular
// waveform matrices, desired beampatterns and WISL lag-weight profiles.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace nfwave {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;

/// Uniform linear array and signal parameters.
///
/// `range_unit_m` is the physical length of one normalized range unit; the
/// steering phase uses p * range_unit_m together with the spacing in meters.
struct ArrayConfig {
    int num_antennas = 4;
    int code_length = 64;
    double carrier_hz = 1e9;
    double bandwidth_hz = 2e8;
    double wave_speed = kSpeedOfLight;
    double spacing_m = 0.0;
    double range_unit_m = 1.0;

    double sampling_interval() const { return 1.0 / bandwidth_hz; }
    double wavelength() const { return wave_speed / carrier_hz; }
    double aperture() const { return (num_antennas - 1) * spacing_m; }
    /// 2 D^2 / lambda; zero for a single element.
    double fraunhofer_distance() const;

    bool operator==(const ArrayConfig&) const = default;
};

/// Half wavelength of the highest in-band frequency.
double default_spacing(double carrier_hz, double bandwidth_hz, double wave_speed = kSpeedOfLight);

/// Validates and fills the default spacing when `spacing_m` is empty.
/// Throws std::invalid_argument on non-positive parameters.
ArrayConfig make_array_config(int num_antennas, int code_length, double carrier_hz,
                              double bandwidth_hz, std::optional<double> spacing_m = std::nullopt,
                              double wave_speed = kSpeedOfLight);

void validate(const ArrayConfig& config);

/// Angle / range / frequency discretization. Nodes are stored 0-based:
/// angle index a corresponds to k1 = a + 1, so phi[a] = pi((a+1)/K1 - 1/2).
struct GridSpec {
    int num_angles = 0;
    int num_ranges = 0;
    int num_bins = 0;
    std::vector<double> phi;
    std::vector<double> theta;
    std::vector<double> range;

    std::size_t num_cells() const {
        return static_cast<std::size_t>(num_angles) * num_ranges * num_bins;
    }
};

GridSpec build_grid(int num_angles, int num_ranges, int num_bins);

/// N x M matrix of unit-modulus entries; column m is the code of antenna m.
/// Storage is column-major so vec() stacks antenna columns.
class WaveformMatrix {
public:
    static constexpr double kTolerance = 1e-12;

    WaveformMatrix() = default;
    /// Throws std::invalid_argument unless every entry has modulus 1 within kTolerance.
    explicit WaveformMatrix(CMatrix entries);

    /// Entry (n, m) = exp(j * phases(n, m)).
    static WaveformMatrix from_phases(const RMatrix& phases);

    int code_length() const { return static_cast<int>(entries_.rows()); }
    int num_antennas() const { return static_cast<int>(entries_.cols()); }

    const CMatrix& matrix() const { return entries_; }
    cplx operator()(int n, int m) const { return entries_(n, m); }

    /// vec(X): length N*M, column-stacked.
    CVector vec() const;
    static WaveformMatrix from_vec(const CVector& v, int code_length, int num_antennas);

    /// Phases in [0, 2*pi).
    RMatrix phases() const;

    bool operator==(const WaveformMatrix& other) const { return entries_ == other.entries_; }

private:
    CMatrix entries_;
};

bool is_unimodular(const CMatrix& x, double tol = WaveformMatrix::kTolerance);

/// Real field over the (angle, range, bin) grid, flat in (a, r, u) order.
class GridField {
public:
    GridField() = default;
    GridField(int num_angles, int num_ranges, int num_bins, double fill = 0.0);

    int num_angles() const { return num_angles_; }
    int num_ranges() const { return num_ranges_; }
    int num_bins() const { return num_bins_; }
    std::size_t size() const { return values_.size(); }

    std::size_t index(int a, int r, int u) const {
        return (static_cast<std::size_t>(a) * num_ranges_ + r) * num_bins_ + u;
    }
    double& at(int a, int r, int u) { return values_[index(a, r, u)]; }
    double at(int a, int r, int u) const { return values_[index(a, r, u)]; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

private:
    int num_angles_ = 0;
    int num_ranges_ = 0;
    int num_bins_ = 0;
    std::vector<double> values_;
};

/// Nonnegative target beampattern.
class DesiredBeampattern {
public:
    /// Throws std::invalid_argument on a negative or non-finite entry.
    explicit DesiredBeampattern(GridField values);

    /// `peak` at (target_angle, target_range) for every bin, zero elsewhere (0-based indices).
    static DesiredBeampattern delta(const GridSpec& grid, int target_angle, int target_range,
                                    double peak);

    const GridField& field() const { return values_; }
    double at(int a, int r, int u) const { return values_.at(a, r, u); }
    /// Sum of squared desired values (the constant term of the matching objective).
    double energy() const;

private:
    GridField values_;
};

/// Lag weights omega_k for k = -N+1 .. N-1, the Toeplitz weight matrix
/// Gamma(i, j) = omega_{j-i}, and the 2N spectral vectors beta_k
/// (column k-1 of `beta`, entry n = exp(j 2 pi n (k-1) / 2N)).
struct WislProfile {
    int code_length = 0;
    std::vector<double> weights;
    RMatrix gamma;
    CMatrix beta;

    double weight(int lag) const { return weights[static_cast<std::size_t>(lag + code_length - 1)]; }
    bool symmetric() const;
};

/// `weights` must hold 2N-1 entries ordered from lag -N+1 to N-1.
WislProfile build_wisl_profile(const std::vector<double>& weights, int code_length);
WislProfile uniform_wisl_profile(int code_length);

/// vec(V^T) for V = unvec(v) as rows x cols; an index permutation.
CVector apply_commutation(const CVector& v, int rows, int cols);

}  // namespace nfwave
