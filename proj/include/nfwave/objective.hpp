#pragma once

// Matrix-free operators of the beampattern-matching / WISL program on
// C^{NM} (vec(X), column-major):
//
//   G_cell v    = (alpha^H V^T f_u) * vec(conj(f_u) alpha^T)
//   Ghat(X) v   = sum_cells [ G vec(X) vec(X)^H G - 2 Phat G ] v
//   J(X) v      = vec(Q(X) V),  Q(X) = sum_k J_k^H X X^H J_k
//   R(X)        = gamma Ghat(X) + (1 - gamma) J(X)
//
// No NM x NM matrix is ever formed. Operators keep references to the
// steering context / profile they were built from; those must outlive them.

#include "nfwave/model.hpp"
#include "nfwave/nearfield.hpp"

#include <functional>

namespace nfwave {

/// A linear map on C^dim. When `apply_adjoint` is empty the map is taken to
/// be Hermitian.
struct LinearMap {
    Eigen::Index dim = 0;
    std::function<CVector(const CVector&)> apply;
    std::function<CVector(const CVector&)> apply_adjoint;
};

class BeampatternOperator {
public:
    BeampatternOperator(const SteeringContext& ctx, const DesiredBeampattern& desired);

    const SteeringContext& context() const { return *ctx_; }
    const DesiredBeampattern& desired() const { return *desired_; }
    int code_length() const { return n_; }
    int num_antennas() const { return m_; }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(n_) * m_; }

    /// g = vec(conj(f_u) alpha^T) for one cell.
    CVector cell_vector(int a, int r, int u) const;
    /// alpha^H V^T f_u.
    cplx cell_response(const CVector& v, int a, int r, int u) const;
    /// G v for one cell; O(NM).
    CVector apply_G(const CVector& v, int a, int r, int u) const;

    /// alpha^H V^T f_u for every cell, GridField layout.
    std::vector<cplx> responses(const CMatrix& v) const;

    /// Ghat(x_ref) bound to one reference waveform; caches the per-cell
    /// weights P_cell(x_ref) - 2 Phat_cell.
    class Bound {
    public:
        CVector apply(const CVector& v) const;
        const std::vector<double>& weights() const { return weights_; }

    private:
        friend class BeampatternOperator;
        const BeampatternOperator* op_ = nullptr;
        std::vector<double> weights_;
    };

    Bound bind(const CMatrix& x_ref) const;
    CVector apply_Ghat(const CMatrix& x_ref, const CVector& v) const { return bind(x_ref).apply(v); }

    /// sum_cells (Phat - P(x))^2.
    double matching_error(const CMatrix& x) const;

private:
    // sum_u conj(f_u) z_u^T as an N x M matrix, z given as N x M (row u = z_u^T).
    CMatrix synthesize(const CMatrix& z) const;

    const SteeringContext* ctx_;
    const DesiredBeampattern* desired_;
    int n_;
    int m_;
    CMatrix dft_;  // N x N, (u, n) = exp(-j 2 pi n u / N)
};

class WislOperator {
public:
    explicit WislOperator(const WislProfile& profile);

    const WislProfile& profile() const { return *profile_; }
    int code_length() const { return profile_->code_length; }
    /// J_k = (beta_k beta_k^H) o Gamma for k = 0 .. 2N-1 (the k-th vector, 0-based).
    const CMatrix& j_matrix(int k) const { return j_[static_cast<std::size_t>(k)]; }

    /// Q(x) = sum_k J_k^H x x^H J_k, Hermitian PSD.
    CMatrix gram(const CMatrix& x) const;
    /// sum_k ||x^H J_k x||_F^2 from direct Frobenius norms.
    double quadratic(const CMatrix& x) const;

private:
    const WislProfile* profile_;
    std::vector<CMatrix> j_;
};

/// J_k for every k, built from the profile.
std::vector<CMatrix> build_j_matrices(const WislProfile& profile);
CMatrix build_wisl_gram(const CMatrix& x, const WislProfile& profile);
/// vec(Q V) = (I_M kron Q) v. Throws std::invalid_argument on a shape mismatch.
CVector apply_J(const CMatrix& q, const CVector& v);

/// R(X_ref) = gamma Ghat(X_ref) + (1 - gamma) J(X_ref) and its diagonal
/// loading lambda_m I - R.
class CombinedOperator {
public:
    CombinedOperator(const BeampatternOperator& beam, const WislOperator& wisl, const CMatrix& x_ref,
                     double gamma);

    double gamma() const { return gamma_; }
    const CMatrix& reference() const { return x_ref_; }
    const CMatrix& gram() const { return q_; }
    Eigen::Index dim() const { return x_ref_.size(); }

    CVector apply_R(const CVector& v) const;
    /// lambda_m v - R v.
    CVector apply_loaded(const CVector& v) const;

    void set_lambda(double lambda) { lambda_ = lambda; }
    double lambda() const { return lambda_; }

    LinearMap r_map() const;
    LinearMap loaded_map() const;

private:
    const BeampatternOperator* beam_;
    double gamma_;
    CMatrix x_ref_;
    BeampatternOperator::Bound ghat_;
    CMatrix q_;
    double lambda_ = 0.0;
};

struct LambdaEstimate {
    double value = 0.0;            // loading value lambda_m (safety factor applied)
    double rayleigh = 0.0;         // largest-eigenvalue estimate of the Hermitian part
    double spectral_radius = 0.0;  // shift used for the second phase
    bool converged = true;
    int iterations = 0;
    CVector eigvec;
};

inline constexpr double kLambdaSafety = 1.05;

/// Upper estimate of the largest eigenvalue of (A + A^H)/2 by power
/// iteration on the shifted map H + s I, s the spectral radius estimate.
/// `warm` (if non-empty) seeds both phases. On non-convergence within
/// `max_iters` the last estimate is inflated by 1.5 and `converged` is false.
LambdaEstimate estimate_lambda_max(const LinearMap& op, double tol, int max_iters,
                                   const CVector& warm = CVector());

}  // namespace nfwave
