#pragma once

// Time-domain auto/cross-correlation of waveform columns and the weighted
// integrated sidelobe level computed from direct sums.

#include "nfwave/model.hpp"

namespace nfwave {

/// r_{m m'}(k) = sum_l x_m(l) conj(x_{m'}(l + k)) for k >= 0 and
/// conj(r_{m' m}(-k)) for k < 0. Antenna indices are 0-based.
/// Throws std::out_of_range when |k| >= N or an antenna index is invalid.
cplx cross_correlation(const CMatrix& x, int m, int m_prime, int lag);

/// All correlations r[m][m'][k + N - 1] plus the uniform ISL / WISL totals.
struct CorrelationSet {
    int code_length = 0;
    int num_antennas = 0;
    std::vector<cplx> values;
    double isl = 0.0;  // auto sidelobes + every cross lag, unit weights

    cplx at(int m, int m_prime, int lag) const {
        return values[(static_cast<std::size_t>(m) * num_antennas + m_prime) * (2 * code_length - 1) +
                      static_cast<std::size_t>(lag + code_length - 1)];
    }
};

CorrelationSet compute_correlations(const CMatrix& x);

/// sum_m sum_{k != 0} w_k^2 |r_mm(k)|^2 + sum_m sum_{m' != m} sum_k w_k^2 |r_mm'(k)|^2.
double wisl(const CMatrix& x, const WislProfile& profile);

inline constexpr double kCorrelationFloorDb = -300.0;

/// 20 log10(|r_{m m'}(k)| / N), floored at -300 dB. Same layout as CorrelationSet::values.
std::vector<double> correlation_level_db(const CMatrix& x);

/// Largest autocorrelation sidelobe of column m in dB relative to the mainlobe.
double peak_sidelobe_db(const CMatrix& x, int m);

}  // namespace nfwave
