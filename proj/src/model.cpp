#include "nfwave/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nfwave {

double ArrayConfig::fraunhofer_distance() const {
    const double d = aperture();
    return 2.0 * d * d / wavelength();
}

double default_spacing(double carrier_hz, double bandwidth_hz, double wave_speed) {
    return wave_speed / (2.0 * (carrier_hz + bandwidth_hz / 2.0));
}

void validate(const ArrayConfig& c) {
    if (c.num_antennas < 1) throw std::invalid_argument("number of antennas must be >= 1");
    if (c.code_length < 1) throw std::invalid_argument("code length must be >= 1");
    if (!(c.carrier_hz > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
    if (!(c.bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (!(c.wave_speed > 0.0)) throw std::invalid_argument("wave speed must be positive");
    if (!(c.spacing_m > 0.0)) throw std::invalid_argument("element spacing must be positive");
    if (!(c.range_unit_m > 0.0)) throw std::invalid_argument("range unit must be positive");
}

ArrayConfig make_array_config(int num_antennas, int code_length, double carrier_hz,
                              double bandwidth_hz, std::optional<double> spacing_m,
                              double wave_speed) {
    ArrayConfig c;
    c.num_antennas = num_antennas;
    c.code_length = code_length;
    c.carrier_hz = carrier_hz;
    c.bandwidth_hz = bandwidth_hz;
    c.wave_speed = wave_speed;
    c.spacing_m = spacing_m ? *spacing_m : default_spacing(carrier_hz, bandwidth_hz, wave_speed);
    validate(c);
    return c;
}

GridSpec build_grid(int num_angles, int num_ranges, int num_bins) {
    if (num_angles < 1 || num_ranges < 1 || num_bins < 1)
        throw std::invalid_argument("grid sizes K1, K2 and N must all be >= 1");
    GridSpec g;
    g.num_angles = num_angles;
    g.num_ranges = num_ranges;
    g.num_bins = num_bins;
    g.phi.resize(num_angles);
    g.theta.resize(num_angles);
    g.range.resize(num_ranges);
    for (int a = 0; a < num_angles; ++a) {
        g.phi[a] = kPi * (static_cast<double>(a + 1) / num_angles - 0.5);
        g.theta[a] = std::sin(g.phi[a]);
    }
    for (int r = 0; r < num_ranges; ++r) g.range[r] = static_cast<double>(r + 1) / num_ranges;
    return g;
}

bool is_unimodular(const CMatrix& x, double tol) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!(std::abs(std::abs(x.data()[i]) - 1.0) <= tol)) return false;
    return true;
}

WaveformMatrix::WaveformMatrix(CMatrix entries) : entries_(std::move(entries)) {
    if (entries_.size() == 0) throw std::invalid_argument("waveform matrix must be non-empty");
    if (!is_unimodular(entries_)) throw std::invalid_argument("waveform entries must be unimodular");
}

WaveformMatrix WaveformMatrix::from_phases(const RMatrix& phases) {
    CMatrix x(phases.rows(), phases.cols());
    for (Eigen::Index m = 0; m < phases.cols(); ++m)
        for (Eigen::Index n = 0; n < phases.rows(); ++n) x(n, m) = std::polar(1.0, phases(n, m));
    return WaveformMatrix(std::move(x));
}

CVector WaveformMatrix::vec() const {
    return Eigen::Map<const CVector>(entries_.data(), entries_.size());
}

WaveformMatrix WaveformMatrix::from_vec(const CVector& v, int code_length, int num_antennas) {
    if (v.size() != static_cast<Eigen::Index>(code_length) * num_antennas)
        throw std::invalid_argument("vec length does not match N*M");
    return WaveformMatrix(Eigen::Map<const CMatrix>(v.data(), code_length, num_antennas));
}

RMatrix WaveformMatrix::phases() const {
    RMatrix out(entries_.rows(), entries_.cols());
    for (Eigen::Index m = 0; m < entries_.cols(); ++m)
        for (Eigen::Index n = 0; n < entries_.rows(); ++n) {
            double p = std::arg(entries_(n, m));
            if (p < 0.0) p += 2.0 * kPi;
            if (p >= 2.0 * kPi) p = 0.0;
            out(n, m) = p;
        }
    return out;
}

GridField::GridField(int num_angles, int num_ranges, int num_bins, double fill)
    : num_angles_(num_angles), num_ranges_(num_ranges), num_bins_(num_bins) {
    if (num_angles < 1 || num_ranges < 1 || num_bins < 1)
        throw std::invalid_argument("grid field dimensions must be >= 1");
    values_.assign(static_cast<std::size_t>(num_angles) * num_ranges * num_bins, fill);
}

DesiredBeampattern::DesiredBeampattern(GridField values) : values_(std::move(values)) {
    for (double v : values_.values())
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("desired beampattern entries must be finite and >= 0");
}

DesiredBeampattern DesiredBeampattern::delta(const GridSpec& grid, int target_angle,
                                             int target_range, double peak) {
    if (target_angle < 0 || target_angle >= grid.num_angles)
        throw std::out_of_range("target angle index out of range");
    if (target_range < 0 || target_range >= grid.num_ranges)
        throw std::out_of_range("target range index out of range");
    GridField f(grid.num_angles, grid.num_ranges, grid.num_bins);
    for (int u = 0; u < grid.num_bins; ++u) f.at(target_angle, target_range, u) = peak;
    return DesiredBeampattern(std::move(f));
}

double DesiredBeampattern::energy() const {
    double s = 0.0;
    for (double v : values_.values()) s += v * v;
    return s;
}

bool WislProfile::symmetric() const {
    for (int k = 1; k < code_length; ++k)
        if (weight(k) != weight(-k)) return false;
    return true;
}

WislProfile build_wisl_profile(const std::vector<double>& weights, int code_length) {
    if (code_length < 1) throw std::invalid_argument("code length must be >= 1");
    const auto expected = static_cast<std::size_t>(2 * code_length - 1);
    if (weights.size() != expected)
        throw std::invalid_argument("weight profile must have 2N-1 = " + std::to_string(expected) +
                                    " entries, got " + std::to_string(weights.size()));
    WislProfile p;
    p.code_length = code_length;
    p.weights = weights;
    const int n = code_length;
    p.gamma.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p.gamma(i, j) = p.weight(j - i);
    p.beta.resize(n, 2 * n);
    for (int k = 0; k < 2 * n; ++k)
        for (int t = 0; t < n; ++t)
            p.beta(t, k) = std::polar(1.0, 2.0 * kPi * static_cast<double>(t) * k / (2.0 * n));
    return p;
}

WislProfile uniform_wisl_profile(int code_length) {
    if (code_length < 1) throw std::invalid_argument("code length must be >= 1");
    return build_wisl_profile(std::vector<double>(2 * code_length - 1, 1.0), code_length);
}

CVector apply_commutation(const CVector& v, int rows, int cols) {
    if (rows < 1 || cols < 1 || v.size() != static_cast<Eigen::Index>(rows) * cols)
        throw std::invalid_argument("commutation: vector length must equal rows*cols");
    CVector out(v.size());
    // V(i, j) sits at j*rows + i; its transpose entry (j, i) sits at i*cols + j.
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) out(static_cast<Eigen::Index>(i) * cols + j) = v(j * rows + i);
    return out;
}

}  // namespace nfwave
