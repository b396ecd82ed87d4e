#include "nfwave/objective.hpp"

#include "dense_oracles.hpp"
#include "nfwave/correlation.hpp"
#include "nfwave/solver.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace nfwave;

namespace {

struct Problem {
    ArrayConfig array;
    SteeringContext ctx;
    DesiredBeampattern desired;
    WislProfile profile;

    Problem(int m, int n, int k1, int k2, double peak = 1.0)
        : array(make_array_config(m, n, 1e9, 2e8)),
          ctx(array, build_grid(k1, k2, n)),
          desired(DesiredBeampattern::delta(ctx.grid(), k1 - 1, 0, peak)),
          profile(uniform_wisl_profile(n)) {}
};

CVector random_vector(Eigen::Index dim, std::mt19937_64& gen) {
    std::normal_distribution<double> d;
    CVector v(dim);
    for (auto& c : v) c = cplx(d(gen), d(gen));
    return v;
}

LinearMap dense_map(const CMatrix& a) {
    LinearMap op;
    op.dim = a.rows();
    op.apply = [a](const CVector& v) { return CVector(a * v); };
    op.apply_adjoint = [a](const CVector& v) { return CVector(a.adjoint() * v); };
    return op;
}

CMatrix random_psd(int dim, std::mt19937_64& gen) {
    CMatrix b(dim, dim);
    for (int j = 0; j < dim; ++j) b.col(j) = random_vector(dim, gen);
    return b * b.adjoint();
}

}  // namespace

TEST_CASE("apply_G against the dense factorization") {
    std::mt19937_64 gen(1);
    for (int n = 1; n <= 4; ++n)
        for (int m = 1; m <= 2; ++m) {
            Problem pr(m, n, 2, 2);
            BeampatternOperator op(pr.ctx, pr.desired);
            for (int a = 0; a < 2; ++a)
                for (int r = 0; r < 2; ++r)
                    for (int u = 0; u < n; ++u) {
                        const CMatrix g = oracle::dense_G(pr.ctx.alpha(a, r, u), n, u);
                        const CVector v = random_vector(n * m, gen);
                        CHECK(oracle::max_rel_error(op.apply_G(v, a, r, u), g * v) <= 1e-12);
                        CHECK((op.cell_vector(a, r, u) * op.cell_vector(a, r, u).adjoint() - g).norm() <=
                              1e-12 * g.norm());
                    }
        }
}

TEST_CASE("apply_G: quadratic form is the beampattern, null responses map to zero") {
    Problem pr(2, 2, 3, 2);
    BeampatternOperator op(pr.ctx, pr.desired);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const WaveformMatrix x = init_waveform(2, 2, seed);
        const CVector v = x.vec();
        for (int u = 0; u < 2; ++u) {
            const cplx q = v.dot(op.apply_G(v, 1, 1, u));
            const double p = beampattern_point(x.matrix(), pr.ctx, 1, 1, u);
            CHECK(std::abs(q.real() - p) <= 1e-12 * p);
            CHECK(std::abs(q.imag()) <= 1e-12 * p);
        }
    }
    // a vector orthogonal to the cell vector has zero response
    const CVector g = op.cell_vector(0, 0, 1);
    CVector v = CVector::Ones(4);
    v -= g * (g.dot(v) / g.squaredNorm());
    CHECK(op.apply_G(v, 0, 0, 1).norm() <= 1e-14);
    CHECK_THROWS_AS(op.apply_G(v, 3, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(op.apply_G(CVector::Ones(3), 0, 0, 0), std::invalid_argument);
}

TEST_CASE("apply_Ghat against the dense sum") {
    std::mt19937_64 gen(2);
    for (int n = 1; n <= 4; ++n)
        for (int m = 1; m <= 2; ++m) {
            Problem pr(m, n, 2, 2, 0.7);
            BeampatternOperator op(pr.ctx, pr.desired);
            const CMatrix x = init_waveform(n, m, 40 + n * m).matrix();
            const CVector xv = Eigen::Map<const CVector>(x.data(), x.size());
            const CMatrix dense = oracle::dense_Ghat(pr.ctx, pr.desired, xv);
            for (int t = 0; t < 3; ++t) {
                const CVector v = random_vector(n * m, gen);
                CHECK(oracle::max_rel_error(op.apply_Ghat(x, v), dense * v) <= 1e-10);
            }
        }
}

TEST_CASE("quartic identity") {
    Problem pr(2, 4, 2, 2, 3.0);
    BeampatternOperator op(pr.ctx, pr.desired);
    const double phat2 = pr.desired.energy();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const WaveformMatrix x = init_waveform(4, 2, seed);
        const CVector v = x.vec();
        const cplx q = v.dot(op.apply_Ghat(x.matrix(), v));
        const double rhs = oracle::matching_error_direct(pr.ctx, pr.desired, x.matrix());
        CHECK(std::abs(q.real() + phat2 - rhs) <= 1e-8 * rhs);
        CHECK(std::abs(q.imag()) <= 1e-10 * std::abs(q));
        CHECK(op.matching_error(x.matrix()) == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("Ghat special cases") {
    SUBCASE("zero desired pattern gives sum P^2") {
        Problem pr(2, 4, 2, 2, 0.0);
        BeampatternOperator op(pr.ctx, pr.desired);
        const WaveformMatrix x = init_waveform(4, 2, 3);
        const GridField bp = beampattern_grid(x.matrix(), pr.ctx);
        double sum_p2 = 0.0;
        for (double p : bp.values()) sum_p2 += p * p;
        const double q = x.vec().dot(op.apply_Ghat(x.matrix(), x.vec())).real();
        CHECK(q >= 0.0);
        CHECK(q == doctest::Approx(sum_p2).epsilon(1e-12));
    }
    SUBCASE("single-cell grid reproduces (P - Phat)^2 - Phat^2") {
        const auto cfg = make_array_config(1, 1, 1e9, 2e8);
        const SteeringContext ctx(cfg, build_grid(1, 1, 1));
        const auto desired = DesiredBeampattern::delta(ctx.grid(), 0, 0, 0.4);
        BeampatternOperator op(ctx, desired);
        CVector v(1);
        v << std::polar(1.0, 0.9);
        CMatrix x(1, 1);
        x(0, 0) = v(0);
        // M = N = 1: P = |alpha|^2 |x|^2 = 1
        const double p = beampattern_point(x, ctx, 0, 0, 0);
        CHECK(p == doctest::Approx(1.0).epsilon(1e-14));
        const double q = v.dot(op.apply_Ghat(x, v)).real();
        CHECK(q == doctest::Approx((p - 0.4) * (p - 0.4) - 0.16).epsilon(1e-14));
    }
    SUBCASE("quadratic form is real for arbitrary v") {
        Problem pr(2, 4, 2, 2, 5.0);
        BeampatternOperator op(pr.ctx, pr.desired);
        std::mt19937_64 gen(4);
        const CMatrix x = init_waveform(4, 2, 9).matrix();
        for (int t = 0; t < 10; ++t) {
            const CVector v = random_vector(8, gen);
            const cplx q = v.dot(op.apply_Ghat(x, v));
            CHECK(std::abs(q.imag()) <= 1e-10 * std::abs(q));
        }
    }
}

TEST_CASE("build_wisl_gram") {
    SUBCASE("scalar case") {
        const auto p = build_wisl_profile({1.0}, 1);
        const auto j = build_j_matrices(p);
        CHECK(j.size() == 2);
        CHECK(j[0](0, 0) == cplx(1, 0));
        CHECK(j[1](0, 0) == cplx(1, 0));
        CMatrix x(1, 1);
        x(0, 0) = 1.0;
        CHECK(std::abs(build_wisl_gram(x, p)(0, 0) - cplx(2, 0)) < 1e-15);
    }
    SUBCASE("zero waveform") {
        const auto p = uniform_wisl_profile(4);
        CHECK(build_wisl_gram(CMatrix::Zero(4, 2), p).norm() == 0.0);
    }
    SUBCASE("matches dense J_k and is Hermitian PSD") {
        std::mt19937_64 gen(5);
        for (int n = 1; n <= 6; ++n) {
            std::vector<double> w(2 * n - 1);
            std::uniform_real_distribution<double> d(-1.0, 1.0);
            for (auto& v : w) v = d(gen);
            const auto p = build_wisl_profile(w, n);
            const auto j = build_j_matrices(p);
            for (int k = 0; k < 2 * n; ++k) CHECK((j[k] - oracle::dense_Jk(p, k)).norm() <= 1e-13 * (1 + j[k].norm()));
            const CMatrix x = init_waveform(n, 2, 60 + n).matrix();
            const CMatrix q = build_wisl_gram(x, p);
            const CMatrix qd = oracle::dense_Q(x, p);
            CHECK((q - qd).norm() <= 1e-12 * qd.norm());
            CHECK((q - q.adjoint()).norm() <= 1e-12 * q.norm());
            Eigen::SelfAdjointEigenSolver<CMatrix> es(q);
            CHECK(es.eigenvalues().minCoeff() >= -1e-8 * q.norm());
        }
    }
}

TEST_CASE("apply_J") {
    std::mt19937_64 gen(6);
    SUBCASE("identity Gram") {
        const CVector v = random_vector(12, gen);
        CHECK(apply_J(CMatrix::Identity(4, 4), v) == v);
    }
    SUBCASE("dense I_M kron Q") {
        for (int n = 1; n <= 4; ++n)
            for (int m = 1; m <= 2; ++m) {
                const auto p = uniform_wisl_profile(n);
                const CMatrix x = init_waveform(n, m, 70 + n * m).matrix();
                const CMatrix dense = oracle::dense_J(x, p);
                const CVector v = random_vector(n * m, gen);
                CHECK(oracle::max_rel_error(apply_J(build_wisl_gram(x, p), v), dense * v) <= 1e-12);
            }
    }
    SUBCASE("quadratic form equals the Frobenius sum") {
        for (int n = 1; n <= 6; ++n)
            for (int m = 1; m <= 3; ++m) {
                const auto p = uniform_wisl_profile(n);
                const WislOperator op(p);
                const WaveformMatrix x = init_waveform(n, m, 80 + n * m);
                const CVector v = x.vec();
                double direct = 0.0;
                for (int k = 0; k < 2 * n; ++k)
                    direct += (x.matrix().adjoint() * oracle::dense_Jk(p, k) * x.matrix()).squaredNorm();
                const double q = v.dot(apply_J(op.gram(x.matrix()), v)).real();
                CHECK(std::abs(q - direct) <= 1e-10 * direct);
                CHECK(op.quadratic(x.matrix()) == doctest::Approx(direct).epsilon(1e-12));
            }
    }
    SUBCASE("shape mismatch") { CHECK_THROWS_AS(apply_J(CMatrix::Identity(3, 3), CVector::Ones(4)), std::invalid_argument); }
}

TEST_CASE("CombinedOperator") {
    Problem pr(2, 4, 2, 2, 2.0);
    BeampatternOperator beam(pr.ctx, pr.desired);
    WislOperator wisl_op(pr.profile);
    const CMatrix x = init_waveform(4, 2, 12).matrix();
    std::mt19937_64 gen(7);
    const CVector v1 = random_vector(8, gen), v2 = random_vector(8, gen);

    SUBCASE("gamma endpoints") {
        CombinedOperator g1(beam, wisl_op, x, 1.0);
        CHECK(oracle::max_rel_error(g1.apply_R(v1), beam.apply_Ghat(x, v1)) <= 1e-15);
        CombinedOperator g0(beam, wisl_op, x, 0.0);
        CHECK(oracle::max_rel_error(g0.apply_R(v1), apply_J(build_wisl_gram(x, pr.profile), v1)) <= 1e-15);
    }
    SUBCASE("linearity") {
        CombinedOperator op(beam, wisl_op, x, 0.3);
        const cplx a(0.7, -1.1), b(-2.0, 0.4);
        CHECK(oracle::max_rel_error(op.apply_R(a * v1 + b * v2), a * op.apply_R(v1) + b * op.apply_R(v2)) <= 1e-12);
    }
    SUBCASE("dense R") {
        CombinedOperator op(beam, wisl_op, x, 0.5);
        const CVector xv = Eigen::Map<const CVector>(x.data(), x.size());
        const CMatrix dense = 0.5 * oracle::dense_Ghat(pr.ctx, pr.desired, xv) + 0.5 * oracle::dense_J(x, pr.profile);
        CHECK(oracle::max_rel_error(op.apply_R(v1), dense * v1) <= 1e-10);
    }
    SUBCASE("diagonal-loading identity") {
        CombinedOperator op(beam, wisl_op, x, 0.5);
        const auto est = estimate_lambda_max(op.r_map(), 1e-9, 5000);
        op.set_lambda(est.value);
        for (std::uint64_t s = 1; s <= 5; ++s) {
            const CVector v = init_waveform(4, 2, 200 + s).vec();
            const double loaded = v.dot(op.apply_loaded(v)).real();
            const double plain = v.dot(op.apply_R(v)).real();
            const double expect = est.value * 8 - plain;
            CHECK(std::abs(loaded - expect) <= 1e-10 * std::abs(expect));
            CHECK(loaded >= 0.0);
        }
    }
    SUBCASE("invalid gamma") {
        CHECK_THROWS_WITH_AS(CombinedOperator(beam, wisl_op, x, 1.5), "gamma must lie in [0,1]", std::invalid_argument);
        CHECK_THROWS_AS(CombinedOperator(beam, wisl_op, x, -0.1), std::invalid_argument);
    }
}

TEST_CASE("estimate_lambda_max") {
    SUBCASE("identity") {
        LinearMap id{5, [](const CVector& v) { return v; }, {}};
        const auto e = estimate_lambda_max(id, 1e-10, 1000);
        CHECK(e.converged);
        CHECK(e.value == doctest::Approx(1.05).epsilon(1e-6));
    }
    SUBCASE("diag(1,2,3)") {
        CMatrix d = CMatrix::Zero(3, 3);
        d.diagonal() << 1, 2, 3;
        const auto e = estimate_lambda_max(dense_map(d), 1e-12, 10000);
        CHECK(e.converged);
        CHECK(e.value == doctest::Approx(3.15).epsilon(1e-6));
        CHECK(e.rayleigh == doctest::Approx(3.0).epsilon(1e-6));
    }
    SUBCASE("random PSD against a dense eigensolver") {
        std::mt19937_64 gen(8);
        for (int t = 0; t < 5; ++t) {
            const CMatrix a = random_psd(8, gen);
            Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
            const double top = es.eigenvalues().maxCoeff();
            const auto e = estimate_lambda_max(dense_map(a), 1e-12, 20000);
            CHECK(e.converged);
            CHECK(std::abs(e.rayleigh - top) <= 1e-6 * top);
            CHECK(e.value == doctest::Approx(kLambdaSafety * e.rayleigh));
        }
    }
    SUBCASE("indefinite Hermitian: largest, not largest-magnitude") {
        CMatrix d = CMatrix::Zero(3, 3);
        d.diagonal() << -10, 1, 2;
        const auto e = estimate_lambda_max(dense_map(d), 1e-12, 20000);
        CHECK(e.rayleigh == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(e.value >= 2.0);
    }
    SUBCASE("non-Hermitian map uses the Hermitian part") {
        CMatrix a(2, 2);
        a << 1, 2, 0, 1;  // Hermitian part [[1,1],[1,1]], top eigenvalue 2
        const auto e = estimate_lambda_max(dense_map(a), 1e-12, 20000);
        CHECK(e.rayleigh == doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("iteration cap flags non-convergence and inflates") {
        std::mt19937_64 gen(9);
        const CMatrix a = random_psd(20, gen);
        const auto e = estimate_lambda_max(dense_map(a), 1e-15, 1);
        CHECK_FALSE(e.converged);
        CHECK(e.value == doctest::Approx(1.5 * e.rayleigh));
    }
}
