#include "nfwave/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nfwave {

cplx cross_correlation(const CMatrix& x, int m, int m_prime, int lag) {
    const auto n = static_cast<int>(x.rows());
    const auto m_count = static_cast<int>(x.cols());
    if (m < 0 || m >= m_count || m_prime < 0 || m_prime >= m_count)
        throw std::out_of_range("cross_correlation: antenna index out of range");
    if (lag <= -n || lag >= n) throw std::out_of_range("cross_correlation: |lag| must be < N");
    if (lag < 0) return std::conj(cross_correlation(x, m_prime, m, -lag));
    cplx acc = 0.0;
    for (int l = 0; l + lag < n; ++l) acc += x(l, m) * std::conj(x(l + lag, m_prime));
    return acc;
}

CorrelationSet compute_correlations(const CMatrix& x) {
    CorrelationSet set;
    set.code_length = static_cast<int>(x.rows());
    set.num_antennas = static_cast<int>(x.cols());
    const int n = set.code_length;
    set.values.reserve(static_cast<std::size_t>(set.num_antennas) * set.num_antennas * (2 * n - 1));
    for (int m = 0; m < set.num_antennas; ++m)
        for (int mp = 0; mp < set.num_antennas; ++mp)
            for (int k = -n + 1; k < n; ++k) {
                const cplx r = cross_correlation(x, m, mp, k);
                set.values.push_back(r);
                if (m != mp || k != 0) set.isl += std::norm(r);
            }
    return set;
}

double wisl(const CMatrix& x, const WislProfile& profile) {
    const auto n = static_cast<int>(x.rows());
    const auto m_count = static_cast<int>(x.cols());
    if (profile.code_length != n) throw std::invalid_argument("wisl: profile length mismatch");
    double total = 0.0;
    for (int m = 0; m < m_count; ++m)
        for (int mp = 0; mp < m_count; ++mp)
            for (int k = -n + 1; k < n; ++k) {
                if (m == mp && k == 0) continue;
                const double w = profile.weight(k);
                if (w == 0.0) continue;
                total += w * w * std::norm(cross_correlation(x, m, mp, k));
            }
    return total;
}

std::vector<double> correlation_level_db(const CMatrix& x) {
    const auto set = compute_correlations(x);
    const double n = static_cast<double>(set.code_length);
    std::vector<double> out;
    out.reserve(set.values.size());
    for (const cplx& r : set.values) {
        const double mag = std::abs(r);
        out.push_back(mag > 0.0 ? std::max(20.0 * std::log10(mag / n), kCorrelationFloorDb)
                                : kCorrelationFloorDb);
    }
    return out;
}

double peak_sidelobe_db(const CMatrix& x, int m) {
    const auto n = static_cast<int>(x.rows());
    double peak = 0.0;
    for (int k = 1; k < n; ++k) peak = std::max(peak, std::abs(cross_correlation(x, m, m, k)));
    return peak > 0.0 ? std::max(20.0 * std::log10(peak / n), kCorrelationFloorDb) : kCorrelationFloorDb;
}

}  // namespace nfwave
