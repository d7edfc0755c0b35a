#include <random>

#include "doctest.h"
#include "pqsd/models.hpp"

using namespace pqsd;

namespace {

std::vector<cplx> random_state(int d, std::mt19937& rng) {
    std::normal_distribution<double> g;
    std::vector<cplx> v(d);
    for (auto& z : v) z = cplx(g(rng), g(rng));
    return v;
}

}  // namespace

TEST_CASE("dimensions, validation and default initial states") {
    CHECK(ModelSpec::two_level(0.2).dimension() == 2);
    CHECK(ModelSpec::qutrit(1.0, 1.4).dimension() == 3);
    CHECK(ModelSpec::multi_level(0.2, 7).dimension() == 8);
    CHECK_THROWS(ModelSpec::qutrit(1.0, 0.0).validate());
    CHECK_THROWS(ModelSpec::multi_level(0.2, 0).validate());
    const auto psi0 = ModelSpec::multi_level(0.2, 3).default_initial_state();
    REQUIRE(psi0.size() == 4);
    double norm = 0.0;
    for (const cplx& a : psi0) norm += std::norm(a);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(psi0[0] == psi0[3]);
}

TEST_CASE("system Hamiltonian diagonals") {
    double d2[2], d3[3], d4[4];
    ModelSpec::two_level(0.0).hsys_diagonal(3.0, d2);
    CHECK(d2[0] == -1.5);
    CHECK(d2[1] == 1.5);
    ModelSpec::qutrit(0.0, 1.0).hsys_diagonal(2.0, d3);
    CHECK(d3[0] == 0.0);   // |1>
    CHECK(d3[1] == -2.0);  // |0>
    CHECK(d3[2] == 2.0);   // |2>
    ModelSpec::multi_level(0.0, 3).hsys_diagonal(1.5, d4);
    CHECK(d4[0] == -1.5);
    for (int n = 1; n <= 3; ++n) CHECK(d4[n] == 1.5);
}

TEST_CASE("coefficient Riccati right-hand sides") {
    const CorrelationSpec corr{2.0, 0.5};  // drive = 0.5
    const double E = 0.7;
    const cplx iE(0.0, E);

    CoeffState s;
    s.f[0] = cplx(0.3, -0.1);
    SUBCASE("two-level") {
        const CoeffState d = coeff_rhs(ModelSpec::two_level(0.0), corr, s, E);
        const cplx F = s.f[0];
        CHECK(std::abs(d.f[0] - (0.5 + (-0.5 + iE) * F + F * F)) < 1e-15);
    }
    SUBCASE("qutrit") {
        s.f[1] = cplx(-0.2, 0.4);
        s.count = 2;
        const CoeffState d = coeff_rhs(ModelSpec::qutrit(0.0, 2.0), corr, s, E);
        const cplx F1 = s.f[0], F2 = s.f[1];
        CHECK(std::abs(d.f[0] - (0.5 * 4.0 + (-0.5 + iE) * F1 + F1 * F1 - F1 * F2)) < 1e-15);
        CHECK(std::abs(d.f[1] - (0.5 * 4.0 + (-0.5 + iE) * F2 + F2 * F2)) < 1e-15);
        CHECK(d.count == 2);
    }
    SUBCASE("multi-level") {
        const CoeffState d = coeff_rhs(ModelSpec::multi_level(0.0, 5), corr, s, E);
        const cplx F = s.f[0];
        CHECK(std::abs(d.f[0] - (0.5 + (-0.5 + 2.0 * iE) * F + 5.0 * F * F)) < 1e-15);
    }
}

TEST_CASE("the N = 1 coefficient equation matches two-level at doubled detuning") {
    // The (1+1)-level gap is 2E while the two-level gap is E, so the flows
    // coincide under E -> 2E.
    const CorrelationSpec corr{1.3, 0.7};
    std::mt19937 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
        CoeffState s;
        s.f[0] = cplx(g(rng), g(rng));
        const double E = g(rng);
        const CoeffState a = coeff_rhs(ModelSpec::multi_level(0.0, 1), corr, s, E);
        const CoeffState b = coeff_rhs(ModelSpec::two_level(0.0), corr, s, 2.0 * E);
        CHECK(a.f[0] == b.f[0]);
    }
}

TEST_CASE("effective Hamiltonian entries") {
    const cplx i(0.0, 1.0);
    const cplx z(0.4, -0.9);
    CoeffState s;
    s.f[0] = cplx(0.2, 0.1);
    s.f[1] = cplx(-0.3, 0.5);

    SUBCASE("two-level") {
        const Eigen::MatrixXcd H = effective_hamiltonian(ModelSpec::two_level(0.0), s, z, 1.2);
        CHECK(H(0, 0) == cplx(-0.6));
        CHECK(H(0, 1) == i * z);
        CHECK(H(1, 0) == cplx(0.0));
        CHECK(H(1, 1) == cplx(0.6) - i * s.f[0]);
    }
    SUBCASE("qutrit") {
        s.count = 2;
        const Eigen::MatrixXcd H = effective_hamiltonian(ModelSpec::qutrit(0.0, 1.5), s, z, 2.0);
        CHECK(H(0, 0) == -i * s.f[0]);
        CHECK(H(0, 2) == i * (1.5 * z));
        CHECK(H(1, 0) == i * (1.5 * z));
        CHECK(H(1, 1) == cplx(-2.0));
        CHECK(H(2, 2) == cplx(2.0) - i * s.f[1]);
        CHECK(H(0, 1) == cplx(0.0));
        CHECK(H(2, 0) == cplx(0.0));
    }
    SUBCASE("multi-level") {
        const Eigen::MatrixXcd H = effective_hamiltonian(ModelSpec::multi_level(0.0, 3), s, z, 0.8);
        CHECK(H(0, 0) == cplx(-0.8));
        for (int n = 1; n <= 3; ++n) {
            CHECK(H(0, n) == i * z);
            CHECK(H(n, 0) == cplx(0.0));
            for (int m = 1; m <= 3; ++m)
                CHECK(H(n, m) == (n == m ? cplx(0.8) : cplx(0.0)) - i * s.f[0]);
        }
    }
}

TEST_CASE("matrix-free stepper agrees with the dense matrix for all families") {
    std::mt19937 rng(7);
    std::normal_distribution<double> g;
    const std::vector<ModelSpec> models = {ModelSpec::two_level(0.3),
                                           ModelSpec::qutrit(0.5, 1.2),
                                           ModelSpec::multi_level(0.1, 7)};
    for (const ModelSpec& m : models) {
        for (int trial = 0; trial < 20; ++trial) {
            CoeffState s;
            s.f[0] = cplx(g(rng), g(rng));
            s.f[1] = cplx(g(rng), g(rng));
            s.count = (m.family == ModelFamily::Qutrit) ? 2 : 1;
            const cplx z(g(rng), g(rng));
            const double E = g(rng);
            const std::vector<cplx> psi = random_state(m.dimension(), rng);
            std::vector<cplx> out(psi.size());
            apply_minus_i_heff(m, s, z, E, psi, out);

            const Eigen::MatrixXcd H = effective_hamiltonian(m, s, z, E);
            Eigen::Map<const Eigen::VectorXcd> v(psi.data(), psi.size());
            const Eigen::VectorXcd ref = cplx(0.0, -1.0) * (H * v);
            for (int k = 0; k < ref.size(); ++k) CHECK(std::abs(out[k] - ref[k]) < 1e-13);
        }
    }
}

TEST_CASE("with zero noise and zero coefficients H_eff is the bare Hamiltonian") {
    const CoeffState zero;
    for (const ModelSpec& m :
         {ModelSpec::two_level(0.4), ModelSpec::qutrit(0.4, 1.0), ModelSpec::multi_level(0.4, 4)}) {
        const double E = 0.4;
        const Eigen::MatrixXcd H = effective_hamiltonian(m, zero, cplx(0.0), E);
        std::vector<double> diag(m.dimension());
        m.hsys_diagonal(E, diag);
        for (int a = 0; a < m.dimension(); ++a)
            for (int b = 0; b < m.dimension(); ++b)
                CHECK(H(a, b) == (a == b ? cplx(diag[a]) : cplx(0.0)));
    }
}

TEST_CASE("cached coefficient series solves the Riccati flow") {
    // Gamma = 0 kills the drive, so F stays 0; with a drive, compare against a
    // direct fine-step integration at a few times.
    const ModelSpec m = ModelSpec::two_level(0.5);
    const Detuning det{0.5, {}};
    const TimeGrid half = TimeGrid::uniform(0.0, 2.0, 5e-4).with_midpoints();
    const CorrelationSpec off{0.0, 1.0};
    const CoeffSeries zero = solve_coefficients(m, off, det, half);
    for (const auto& v : zero.values) CHECK(v[0] == cplx(0.0));

    const CorrelationSpec corr{1.0, 0.5};
    const CoeffSeries series = solve_coefficients(m, corr, det, half);
    // reference: plain RK4 at twice the resolution
    const TimeGrid fine = TimeGrid::uniform(0.0, 2.0, 1.25e-4);
    Rhs rhs = [&](double, const std::vector<cplx>& y, std::vector<cplx>& dy) {
        CoeffState s;
        s.f[0] = y[0];
        dy[0] = coeff_rhs(m, corr, s, 0.5).f[0];
    };
    const VectorSeries ref = rk4_integrate(rhs, {cplx(0.0)}, fine);
    CHECK(std::abs(series.values.back()[0] - ref.values.back()[0]) < 1e-10);
}
