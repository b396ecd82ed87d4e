#include "nfwave/nearfield.hpp"

#include <cmath>
#include <stdexcept>

namespace nfwave {

namespace {

void check_geometry(double p, double theta, int element, double spacing) {
    if (!std::isfinite(p) || !std::isfinite(theta) || !std::isfinite(spacing))
        throw std::domain_error("distance: non-finite input");
    if (element < 0) throw std::domain_error("distance: element index must be >= 0");
    if (theta < -1.0 || theta > 1.0) throw std::domain_error("distance: theta must lie in [-1, 1]");
}

}  // namespace

double exact_distance(double p, double theta, int element, double spacing) {
    check_geometry(p, theta, element, spacing);
    const double off = element * spacing;
    const double radicand = p * p + off * off - 2.0 * p * off * theta;
    if (radicand < 0.0) throw std::domain_error("exact_distance: negative radicand");
    return std::sqrt(radicand);
}

double fresnel_distance(double p, double theta, int element, double spacing) {
    check_geometry(p, theta, element, spacing);
    if (p == 0.0) throw std::domain_error("fresnel_distance: range must be non-zero");
    const double off = element * spacing;
    const double zeta = (1.0 - theta * theta) / (2.0 * p);
    return p - off * theta + off * off * zeta;
}

CVector steering_vector(double p, double theta, const ArrayConfig& config) {
    if (!(p > 0.0)) throw std::domain_error("steering_vector: range must be positive");
    if (theta < -1.0 || theta > 1.0) throw std::domain_error("steering_vector: theta must lie in [-1, 1]");
    const int m_count = config.num_antennas;
    const double range = p * config.range_unit_m;
    const double k0 = 2.0 * kPi * config.carrier_hz / config.wave_speed;
    const double zeta = (1.0 - theta * theta) / (2.0 * range);
    const double d = config.spacing_m;
    const double scale = 1.0 / std::sqrt(static_cast<double>(m_count));
    CVector a(m_count);
    for (int e = 0; e < m_count; ++e) {
        const double phase = -k0 * range + k0 * (e * d * theta - e * e * d * d * zeta);
        a(e) = std::polar(scale, phase);
    }
    return a;
}

SteeringContext::SteeringContext(ArrayConfig config, GridSpec grid)
    : config_(std::move(config)), grid_(std::move(grid)) {
    validate(config_);
    if (grid_.num_bins != config_.code_length)
        throw std::invalid_argument("grid frequency bins must equal the code length N");
    fraunhofer_ = config_.num_antennas > 1 ? config_.fraunhofer_distance() : 0.0;
    const int n = config_.code_length;
    const double ts = config_.sampling_interval();
    alpha_.resize(config_.num_antennas, static_cast<Eigen::Index>(grid_.num_cells()));
    for (int a = 0; a < grid_.num_angles; ++a)
        for (int r = 0; r < grid_.num_ranges; ++r) {
            const CVector conj_a = steering_vector(grid_.range[r], grid_.theta[a], config_).conjugate();
            for (int u = 0; u < n; ++u) {
                const double f = u / (n * ts);
                alpha_.col(static_cast<Eigen::Index>(cell_index(a, r, u))) =
                    std::polar(1.0, -2.0 * kPi * f) * conj_a;
            }
        }
}

SteeringContext build_steering_context(const ArrayConfig& config, const GridSpec& grid) {
    return SteeringContext(config, grid);
}

CVector dft_vector(int code_length, int bin) {
    CVector f(code_length);
    for (int n = 0; n < code_length; ++n) {
        // reduce n*u mod N first so the phase stays exact for large products
        const long long idx = (static_cast<long long>(n) * bin) % code_length;
        f(n) = std::polar(1.0, -2.0 * kPi * static_cast<double>(idx) / code_length);
    }
    return f;
}

CVector spectrum_bin(const CMatrix& x, int bin) {
    const auto n_len = static_cast<int>(x.rows());
    const CVector f = dft_vector(n_len, bin);
    CVector y = CVector::Zero(x.cols());
    for (Eigen::Index m = 0; m < x.cols(); ++m)
        for (int n = 0; n < n_len; ++n) y(m) += x(n, m) * f(n);
    return y;
}

CMatrix dft_spectrum(const CMatrix& x) {
    const auto n_len = static_cast<int>(x.rows());
    CMatrix y(n_len, x.cols());
    for (int u = 0; u < n_len; ++u) y.row(u) = spectrum_bin(x, u).transpose();
    return y;
}

double beampattern_point(const CMatrix& x, const SteeringContext& ctx, int a, int r, int u) {
    const auto& g = ctx.grid();
    if (a < 0 || a >= g.num_angles || r < 0 || r >= g.num_ranges || u < 0 || u >= g.num_bins)
        throw std::out_of_range("beampattern_point: cell index out of range");
    if (x.rows() != ctx.code_length() || x.cols() != ctx.num_antennas())
        throw std::invalid_argument("beampattern_point: waveform shape mismatch");
    const CVector y = spectrum_bin(x, u);
    return std::norm(ctx.alpha(a, r, u).dot(y));
}

GridField beampattern_grid(const CMatrix& x, const SteeringContext& ctx) {
    if (x.rows() != ctx.code_length() || x.cols() != ctx.num_antennas())
        throw std::invalid_argument("beampattern_grid: waveform shape mismatch");
    const auto& g = ctx.grid();
    const CMatrix y = dft_spectrum(x);
    GridField out(g.num_angles, g.num_ranges, g.num_bins);
    for (int u = 0; u < g.num_bins; ++u) {
        const CVector yu = y.row(u).transpose();
        for (int a = 0; a < g.num_angles; ++a)
            for (int r = 0; r < g.num_ranges; ++r) out.at(a, r, u) = std::norm(ctx.alpha(a, r, u).dot(yu));
    }
    return out;
}

}  // namespace nfwave
