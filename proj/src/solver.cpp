#include "nfwave/solver.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace nfwave {

void validate(const SolverConfig& cfg) {
    if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0,1]");
    if (!(cfg.rho >= 0.0) || !std::isfinite(cfg.rho)) throw std::invalid_argument("rho must be >= 0");
    if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (!(cfg.inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be positive");
    if (cfg.inner_max < 1) throw std::invalid_argument("inner_max must be >= 1");
    if (!(cfg.outer_tol >= 0.0)) throw std::invalid_argument("outer_tol must be >= 0");
    if (!(cfg.lambda_tol > 0.0)) throw std::invalid_argument("lambda_tol must be positive");
    if (cfg.lambda_max_iters < 1) throw std::invalid_argument("lambda_max_iters must be >= 1");
}

WaveformMatrix init_waveform(int code_length, int num_antennas, std::uint64_t seed) {
    if (code_length < 1 || num_antennas < 1)
        throw std::invalid_argument("init_waveform: N and M must be >= 1");
    std::mt19937_64 gen(seed);
    RMatrix phases(code_length, num_antennas);
    for (int m = 0; m < num_antennas; ++m)
        for (int n = 0; n < code_length; ++n)
            phases(n, m) = 2.0 * kPi * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
    return WaveformMatrix::from_phases(phases);
}

CVector phase_project(const CVector& w) {
    CVector out(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double mag = std::abs(w(i));
        out(i) = mag > 0.0 ? w(i) / mag : cplx(1.0, 0.0);
    }
    return out;
}

InnerResult pmli_iterate(const LinearMap& loaded, const CVector& anchor, double momentum, CVector start,
                         double tol, int max_iters, const std::function<void(const CVector&)>& observer) {
    if (anchor.size() != start.size() || start.size() != loaded.dim)
        throw std::invalid_argument("pmli: dimension mismatch");
    InnerResult res;
    res.v = std::move(start);
    if (observer) observer(res.v);
    const double scale = std::sqrt(static_cast<double>(res.v.size()));
    for (int it = 0; it < max_iters; ++it) {
        CVector next = phase_project(loaded.apply(res.v) + momentum * anchor);
        const double change = (next - res.v).norm() / scale;
        res.v = std::move(next);
        ++res.iterations;
        if (observer) observer(res.v);
        if (change < tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

double augmented_objective(const LinearMap& loaded, const CVector& anchor, double momentum,
                           const CVector& v) {
    return v.dot(loaded.apply(v)).real() + 2.0 * momentum * anchor.dot(v).real();
}

WaveformMatrix pmli_inner(const WaveformMatrix& x_fixed, const WaveformMatrix& x_var,
                          const CombinedOperator& op, double momentum, const SolverConfig& cfg,
                          int* iterations) {
    if (x_fixed.code_length() != x_var.code_length() || x_fixed.num_antennas() != x_var.num_antennas())
        throw std::invalid_argument("pmli_inner: waveform shapes differ");
    const auto res = pmli_iterate(op.loaded_map(), x_fixed.vec(), momentum, x_var.vec(), cfg.inner_tol,
                                  cfg.inner_max);
    if (iterations) *iterations = res.iterations;
    return WaveformMatrix::from_vec(res.v, x_var.code_length(), x_var.num_antennas());
}

double SolverState::normalized_gap() const {
    const auto& a = x1.matrix();
    return (a - x2.matrix()).norm() / std::sqrt(static_cast<double>(a.size()));
}

TraceEntry evaluate(const CMatrix& x, const BeampatternOperator& beam, const WislOperator& wisl_op,
                    double gamma) {
    TraceEntry e;
    e.matching = beam.matching_error(x);
    e.wisl_quadratic = wisl_op.quadratic(x);
    e.combined = gamma * e.matching + (1.0 - gamma) * e.wisl_quadratic;
    e.wisl = wisl(x, wisl_op.profile());
    return e;
}

namespace {

struct HalfStep {
    WaveformMatrix updated;
    double lambda = 0.0;
    int inner_iterations = 0;
};

class Cycle {
public:
    Cycle(const BeampatternOperator& beam, const WislOperator& wisl_op, const SolverConfig& cfg,
          SolverState& state)
        : beam_(beam), wisl_(wisl_op), cfg_(cfg), state_(state) {}

    HalfStep update(const WaveformMatrix& fixed, const WaveformMatrix& var) {
        CombinedOperator op(beam_, wisl_, fixed.matrix(), cfg_.gamma);
        const auto est = estimate_lambda_max(op.r_map(), cfg_.lambda_tol, cfg_.lambda_max_iters, warm_);
        warm_ = est.eigvec;
        if (!est.converged)
            state_.warnings.push_back("lambda_max estimation did not converge within " +
                                      std::to_string(cfg_.lambda_max_iters) + " iterations");
        op.set_lambda(est.value);
        const double momentum =
            cfg_.penalty_scaling == PenaltyScaling::Loading ? cfg_.rho * est.value : cfg_.rho;
        HalfStep h;
        h.lambda = est.value;
        h.updated = pmli_inner(fixed, var, op, momentum, cfg_, &h.inner_iterations);
        return h;
    }

private:
    const BeampatternOperator& beam_;
    const WislOperator& wisl_;
    const SolverConfig& cfg_;
    SolverState& state_;
    CVector warm_;
};

}  // namespace

SolverState cypmli(const SteeringContext& ctx, const DesiredBeampattern& desired,
                   const WislProfile& profile, const SolverConfig& cfg) {
    validate(cfg);
    const int n = ctx.code_length();
    const int m = ctx.num_antennas();
    if (profile.code_length != n) throw std::invalid_argument("cypmli: WISL profile length mismatch");
    const BeampatternOperator beam(ctx, desired);
    const WislOperator wisl_op(profile);

    SolverState state;
    state.x1 = init_waveform(n, m, cfg.seed);
    state.x2 = state.x1;

    auto record = [&](int epoch, const char* half, const WaveformMatrix& x, double lambda, int inner) {
        TraceEntry e = evaluate(x.matrix(), beam, wisl_op, cfg.gamma);
        e.epoch = epoch;
        e.half = half;
        e.copy_gap = (state.x1.matrix() - state.x2.matrix()).norm();
        e.lambda_m = lambda;
        e.inner_iterations = inner;
        state.trace.push_back(e);
        return e.combined;
    };

    double previous = record(0, "init", state.x1, 0.0, 0);
    Cycle cycle(beam, wisl_op, cfg, state);
    for (int t = 0; t < cfg.epochs; ++t) {
        auto h2 = cycle.update(state.x1, state.x2);
        state.x2 = std::move(h2.updated);
        record(t + 1, "x2", state.x2, h2.lambda, h2.inner_iterations);

        auto h1 = cycle.update(state.x2, state.x1);
        state.x1 = std::move(h1.updated);
        state.lambda_m = h1.lambda;
        const double current = record(t + 1, "x1", state.x1, h1.lambda, h1.inner_iterations);

        state.epochs_run = t + 1;
        const double denom = std::max(std::abs(previous), 1e-300);
        if (std::abs(previous - current) / denom < cfg.outer_tol) {
            state.converged = true;
            break;
        }
        previous = current;
    }
    return state;
}

}  // namespace nfwave
