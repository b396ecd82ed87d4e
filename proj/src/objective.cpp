#include "nfwave/objective.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace nfwave {

namespace {

// Neumaier-compensated complex accumulator.
struct CompensatedSum {
    double re = 0.0, im = 0.0, c_re = 0.0, c_im = 0.0;

    static void add(double& sum, double& comp, double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    void operator+=(cplx x) {
        add(re, c_re, x.real());
        add(im, c_im, x.imag());
    }
    cplx value() const { return {re + c_re, im + c_im}; }
};

CMatrix as_matrix(const CVector& v, int n, int m) {
    if (v.size() != static_cast<Eigen::Index>(n) * m)
        throw std::invalid_argument("operator: vector length must equal N*M");
    return Eigen::Map<const CMatrix>(v.data(), n, m);
}

CVector as_vector(const CMatrix& x) { return Eigen::Map<const CVector>(x.data(), x.size()); }

}  // namespace

// ---------------------------------------------------------------------------
// BeampatternOperator

BeampatternOperator::BeampatternOperator(const SteeringContext& ctx, const DesiredBeampattern& desired)
    : ctx_(&ctx), desired_(&desired), n_(ctx.code_length()), m_(ctx.num_antennas()) {
    const auto& g = ctx.grid();
    const auto& f = desired.field();
    if (f.num_angles() != g.num_angles || f.num_ranges() != g.num_ranges || f.num_bins() != g.num_bins)
        throw std::invalid_argument("desired beampattern shape must be K1 x K2 x N");
    dft_.resize(n_, n_);
    for (int u = 0; u < n_; ++u) dft_.row(u) = dft_vector(n_, u).transpose();
}

CVector BeampatternOperator::cell_vector(int a, int r, int u) const {
    const CVector f = dft_.row(u).transpose();
    const auto alpha = ctx_->alpha(a, r, u);
    CVector g(dim());
    for (int m = 0; m < m_; ++m) g.segment(static_cast<Eigen::Index>(m) * n_, n_) = alpha(m) * f.conjugate();
    return g;
}

cplx BeampatternOperator::cell_response(const CVector& v, int a, int r, int u) const {
    const CMatrix vm = as_matrix(v, n_, m_);
    const CVector y = vm.transpose() * dft_.row(u).transpose();
    return ctx_->alpha(a, r, u).dot(y);
}

CVector BeampatternOperator::apply_G(const CVector& v, int a, int r, int u) const {
    const auto& g = ctx_->grid();
    if (a < 0 || a >= g.num_angles || r < 0 || r >= g.num_ranges || u < 0 || u >= g.num_bins)
        throw std::out_of_range("apply_G: cell index out of range");
    return cell_response(v, a, r, u) * cell_vector(a, r, u);
}

std::vector<cplx> BeampatternOperator::responses(const CMatrix& v) const {
    const CMatrix y = dft_ * v;
    const auto& g = ctx_->grid();
    std::vector<cplx> out(g.num_cells());
    for (int a = 0; a < g.num_angles; ++a)
        for (int r = 0; r < g.num_ranges; ++r)
            for (int u = 0; u < n_; ++u) {
                const std::size_t c = ctx_->cell_index(a, r, u);
                out[c] = ctx_->alpha(c).dot(y.row(u).transpose());
            }
    return out;
}

CMatrix BeampatternOperator::synthesize(const CMatrix& z) const { return dft_.adjoint() * z; }

BeampatternOperator::Bound BeampatternOperator::bind(const CMatrix& x_ref) const {
    if (x_ref.rows() != n_ || x_ref.cols() != m_)
        throw std::invalid_argument("apply_Ghat: reference waveform shape mismatch");
    Bound b;
    b.op_ = this;
    const auto c = responses(x_ref);
    const auto& desired = desired_->field().values();
    b.weights_.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) b.weights_[i] = std::norm(c[i]) - 2.0 * desired[i];
    return b;
}

CVector BeampatternOperator::Bound::apply(const CVector& v) const {
    const auto& op = *op_;
    const CMatrix vm = as_matrix(v, op.n_, op.m_);
    const CMatrix y = op.dft_ * vm;
    const auto& g = op.ctx_->grid();
    CMatrix z(op.n_, op.m_);
    std::vector<CompensatedSum> acc(static_cast<std::size_t>(op.m_));
    for (int u = 0; u < op.n_; ++u) {
        for (auto& s : acc) s = CompensatedSum{};
        const CVector yu = y.row(u).transpose();
        for (int a = 0; a < g.num_angles; ++a)
            for (int r = 0; r < g.num_ranges; ++r) {
                const std::size_t c = op.ctx_->cell_index(a, r, u);
                const double w = weights_[c];
                if (w == 0.0) continue;
                const auto alpha = op.ctx_->alpha(c);
                const cplx s = w * alpha.dot(yu);
                for (int m = 0; m < op.m_; ++m) acc[static_cast<std::size_t>(m)] += s * alpha(m);
            }
        for (int m = 0; m < op.m_; ++m) z(u, m) = acc[static_cast<std::size_t>(m)].value();
    }
    return as_vector(op.synthesize(z));
}

double BeampatternOperator::matching_error(const CMatrix& x) const {
    const auto c = responses(x);
    const auto& desired = desired_->field().values();
    CompensatedSum acc;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double e = desired[i] - std::norm(c[i]);
        acc += e * e;
    }
    return acc.value().real();
}

// ---------------------------------------------------------------------------
// WISL operator

std::vector<CMatrix> build_j_matrices(const WislProfile& profile) {
    const int n = profile.code_length;
    std::vector<CMatrix> out;
    out.reserve(static_cast<std::size_t>(2 * n));
    for (int k = 0; k < 2 * n; ++k) {
        const CVector b = profile.beta.col(k);
        CMatrix j = b * b.adjoint();
        out.push_back(j.cwiseProduct(profile.gamma.cast<cplx>()));
    }
    return out;
}

WislOperator::WislOperator(const WislProfile& profile) : profile_(&profile), j_(build_j_matrices(profile)) {}

CMatrix WislOperator::gram(const CMatrix& x) const {
    const int n = code_length();
    if (x.rows() != n) throw std::invalid_argument("wisl gram: waveform length mismatch");
    const CMatrix outer = x * x.adjoint();
    CMatrix q = CMatrix::Zero(n, n);
    for (const auto& j : j_) q.noalias() += j.adjoint() * (outer * j);
    // symmetrize away rounding so downstream Hermitian assumptions hold exactly
    return (q + q.adjoint()) * 0.5;
}

double WislOperator::quadratic(const CMatrix& x) const {
    if (x.rows() != code_length()) throw std::invalid_argument("wisl quadratic: waveform length mismatch");
    double total = 0.0;
    for (const auto& j : j_) total += (x.adjoint() * j * x).squaredNorm();
    return total;
}

CMatrix build_wisl_gram(const CMatrix& x, const WislProfile& profile) {
    return WislOperator(profile).gram(x);
}

CVector apply_J(const CMatrix& q, const CVector& v) {
    const auto n = q.rows();
    if (q.cols() != n || n == 0 || v.size() % n != 0)
        throw std::invalid_argument("apply_J: vector length must be a multiple of the Gram size");
    const auto m = v.size() / n;
    const CMatrix out = q * Eigen::Map<const CMatrix>(v.data(), n, m);
    return as_vector(out);
}

// ---------------------------------------------------------------------------
// Combined operator

CombinedOperator::CombinedOperator(const BeampatternOperator& beam, const WislOperator& wisl,
                                   const CMatrix& x_ref, double gamma)
    : beam_(&beam), gamma_(gamma), x_ref_(x_ref) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0,1]");
    if (x_ref.rows() != beam.code_length() || x_ref.cols() != beam.num_antennas())
        throw std::invalid_argument("combined operator: reference shape mismatch");
    if (gamma_ > 0.0) ghat_ = beam.bind(x_ref_);
    q_ = gamma_ < 1.0 ? wisl.gram(x_ref_) : CMatrix::Zero(x_ref.rows(), x_ref.rows());
}

CVector CombinedOperator::apply_R(const CVector& v) const {
    if (v.size() != dim()) throw std::invalid_argument("apply_R: vector length must equal N*M");
    CVector out = CVector::Zero(v.size());
    if (gamma_ > 0.0) out += gamma_ * ghat_.apply(v);
    if (gamma_ < 1.0) out += (1.0 - gamma_) * apply_J(q_, v);
    return out;
}

CVector CombinedOperator::apply_loaded(const CVector& v) const { return lambda_ * v - apply_R(v); }

LinearMap CombinedOperator::r_map() const {
    return {dim(), [this](const CVector& v) { return apply_R(v); }, {}};
}

LinearMap CombinedOperator::loaded_map() const {
    return {dim(), [this](const CVector& v) { return apply_loaded(v); }, {}};
}

// ---------------------------------------------------------------------------
// Largest-eigenvalue estimation

namespace {

CVector start_vector(Eigen::Index dim, const CVector& warm) {
    if (warm.size() == dim && warm.norm() > 0.0) return warm.normalized();
    std::mt19937_64 gen(0x9e3779b97f4a7c15ULL);
    CVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double re = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
        const double im = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
        v(i) = {re, im};
    }
    return v.normalized();
}

}  // namespace

LambdaEstimate estimate_lambda_max(const LinearMap& op, double tol, int max_iters, const CVector& warm) {
    if (op.dim <= 0 || !op.apply) throw std::invalid_argument("estimate_lambda_max: empty operator");
    if (max_iters < 1) throw std::invalid_argument("estimate_lambda_max: max_iters must be >= 1");
    const auto hermitian = [&op](const CVector& v) -> CVector {
        if (!op.apply_adjoint) return op.apply(v);
        return 0.5 * (op.apply(v) + op.apply_adjoint(v));
    };

    LambdaEstimate est;
    bool converged = false;

    // Phase 1: spectral radius.
    CVector v = start_vector(op.dim, warm);
    double radius = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        const CVector w = hermitian(v);
        const double s = w.norm();
        ++est.iterations;
        if (s == 0.0) {
            radius = 0.0;
            converged = true;
            break;
        }
        v = w / s;
        if (it > 0 && std::abs(s - radius) <= tol * s) {
            radius = s;
            converged = true;
            break;
        }
        radius = s;
    }
    est.spectral_radius = radius;
    if (radius == 0.0) {
        est.value = 0.0;
        est.rayleigh = 0.0;
        est.converged = converged;
        est.eigvec = v;
        return est;
    }

    // Phase 2: top eigenvalue of H + s I, which is PSD up to the radius error.
    bool converged2 = false;
    v = start_vector(op.dim, warm);
    double q = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        const CVector hv = hermitian(v);
        ++est.iterations;
        const double q_new = v.dot(hv).real();
        const CVector w = hv + radius * v;
        const double nw = w.norm();
        if (nw == 0.0) {
            q = q_new;
            converged2 = true;
            break;
        }
        v = w / nw;
        if (it > 0 && std::abs(q_new - q) <= tol * radius) {
            q = q_new;
            converged2 = true;
            break;
        }
        q = q_new;
    }
    // Rayleigh quotient of the final iterate.
    q = std::max(q, v.dot(hermitian(v)).real());

    est.rayleigh = q;
    est.eigvec = v;
    est.converged = converged && converged2;
    if (est.converged)
        est.value = q > 0.0 ? q * kLambdaSafety : q + (kLambdaSafety - 1.0) * radius;
    else
        est.value = q > 0.0 ? q * 1.5 : q + 0.5 * radius;
    return est;
}

}  // namespace nfwave
