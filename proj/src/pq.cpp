#include "pqsd/pq.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace pqsd {

namespace {

constexpr cplx kI{0.0, 1.0};

/// plain (non-conjugating) row-vector times vector
cplx rowdot(const Eigen::RowVectorXcd& r, const Eigen::VectorXcd& v) { return (r * v)(0, 0); }

bool is_diagonal(const Eigen::MatrixXcd& A) {
    for (Eigen::Index r = 0; r < A.rows(); ++r)
        for (Eigen::Index c = 0; c < A.cols(); ++c)
            if (r != c && std::abs(A(r, c)) > 1e-14) return false;
    return true;
}

/// exp(scale * D) with a diagonal fast path.
Eigen::MatrixXcd block_exp(const Eigen::MatrixXcd& D, cplx scale) {
    if (is_diagonal(D)) {
        Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(D.rows(), D.cols());
        for (Eigen::Index r = 0; r < D.rows(); ++r) E(r, r) = std::exp(scale * D(r, r));
        return E;
    }
    return (scale * D).exp();
}

}  // namespace

Eigen::MatrixXcd PQBlocks::reassemble(std::size_t k) const {
    const auto n = static_cast<Eigen::Index>(qdim());
    Eigen::MatrixXcd H(n + 1, n + 1);
    H(0, 0) = h[k];
    H.block(0, 1, 1, n) = R[k];
    H.block(1, 0, n, 1) = W[k];
    H.block(1, 1, n, n) = D[k];
    return H;
}

Eigen::MatrixXcd p_rotation(const Eigen::VectorXcd& p) {
    const Eigen::Index d = p.size();
    const double nrm = p.norm();
    if (!(nrm > 0)) throw std::invalid_argument("p_rotation: zero p_basis");
    const Eigen::VectorXcd pn = p / nrm;

    // Householder reflection to beta*e1, then a diagonal phase to land on e1.
    const cplx p0 = pn(0);
    const cplx beta = (std::abs(p0) > 0) ? -p0 / std::abs(p0) : cplx(-1.0, 0.0);
    Eigen::VectorXcd v = pn;
    v(0) -= beta;
    const double vv = v.squaredNorm();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Identity(d, d);
    if (vv > 1e-28) H -= (2.0 / vv) * (v * v.adjoint());
    H.row(0) *= std::conj(beta);
    return H;
}

PQBlocks partition(const MatrixSeries& heff_half, const Eigen::VectorXcd& p_basis) {
    if (heff_half.values.empty() || heff_half.grid.size() % 2 == 0)
        throw std::invalid_argument("partition: series must live on a half-step grid");
    PQBlocks blocks;
    blocks.p_basis = p_basis / p_basis.norm();
    blocks.rotation = p_rotation(p_basis);
    blocks.half_grid = heff_half.grid;
    blocks.grid = heff_half.grid.subsample(2);

    const Eigen::Index d = p_basis.size();
    const Eigen::Index n = d - 1;
    const std::size_t m = heff_half.values.size();
    blocks.h.resize(m);
    blocks.R.resize(m);
    blocks.W.resize(m);
    blocks.D.resize(m);
    const Eigen::MatrixXcd& U = blocks.rotation;
    for (std::size_t k = 0; k < m; ++k) {
        const Eigen::MatrixXcd Hr = U * heff_half.values[k] * U.adjoint();
        blocks.h[k] = Hr(0, 0);
        blocks.R[k] = Hr.block(0, 1, 1, n);
        blocks.W[k] = Hr.block(1, 0, n, 1);
        blocks.D[k] = Hr.block(1, 1, n, n);
    }
    return blocks;
}

Eigen::MatrixXcd propagator(const PQBlocks& blocks, std::size_t s, std::size_t t) {
    if (s > t) throw std::invalid_argument("propagator: need s <= t");
    const auto n = static_cast<Eigen::Index>(blocks.qdim());
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Identity(n, n);
    for (std::size_t c = s; c < t; ++c) {
        const double h = blocks.grid.t(c + 1) - blocks.grid.t(c);
        G = block_exp(blocks.D[2 * c + 1], -kI * h) * G;
    }
    return G;
}

std::vector<Eigen::MatrixXcd> propagator_columns(const PQBlocks& blocks, std::size_t from) {
    const auto n = static_cast<Eigen::Index>(blocks.qdim());
    const std::size_t m = blocks.grid.size();
    std::vector<Eigen::MatrixXcd> G;
    G.reserve(m - from);
    G.push_back(Eigen::MatrixXcd::Identity(n, n));
    for (std::size_t c = from; c + 1 < m; ++c) {
        const double h = blocks.grid.t(c + 1) - blocks.grid.t(c);
        G.push_back(block_exp(blocks.D[2 * c + 1], -kI * h) * G.back());
    }
    return G;
}

std::vector<Eigen::MatrixXcd> multilevel_propagator_closed(int N, const CoeffSeries& coeffs,
                                                           const Detuning& detuning,
                                                           const TimeGrid& grid) {
    if (N < 1) throw std::invalid_argument("multilevel_propagator_closed: N >= 1");
    std::vector<Eigen::MatrixXcd> G;
    G.reserve(grid.size());
    cplx intF = 0.0;  // midpoint cumulative, matching the stepped product exactly
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (k > 0) {
            const double h = grid.t(k) - grid.t(k - 1);
            intF += h * coeffs.values[2 * (k - 1) + 1][0];
        }
        const cplx Ebar = std::exp(-kI * detuning.integral(grid.t(k)));
        const cplx FbarN = std::exp(-static_cast<double>(N) * intF);
        const cplx diag = (Ebar * FbarN + static_cast<double>(N - 1) * Ebar) / static_cast<double>(N);
        const cplx off = (Ebar * FbarN - Ebar) / static_cast<double>(N);
        Eigen::MatrixXcd Gk = Eigen::MatrixXcd::Constant(N, N, off);
        for (int j = 0; j < N; ++j) Gk(j, j) = diag;
        G.push_back(std::move(Gk));
    }
    return G;
}

namespace {

/// Per-cell midpoint data for the P solvers.
struct MidpointData {
    std::vector<cplx> h_m;
    std::vector<Eigen::RowVectorXcd> u_m;  ///< R(t_m) G(t_m, 0)
    std::vector<Eigen::VectorXcd> v_m;     ///< G(t_m, 0)^{-1} W(t_m)
    std::vector<cplx> inh_m;               ///< R(t_m) G(t_m, 0) Q0
};

MidpointData midpoint_data(const PQBlocks& blocks, const Eigen::VectorXcd& Q0) {
    const auto n = static_cast<Eigen::Index>(blocks.qdim());
    const std::size_t cells = blocks.grid.size() - 1;
    MidpointData md;
    md.h_m.resize(cells);
    md.u_m.resize(cells);
    md.v_m.resize(cells);
    md.inh_m.resize(cells);
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd Ginv = Eigen::MatrixXcd::Identity(n, n);
    for (std::size_t c = 0; c < cells; ++c) {
        const double h = blocks.grid.t(c + 1) - blocks.grid.t(c);
        const std::size_t m = 2 * c + 1;
        const Eigen::MatrixXcd half_step = block_exp(blocks.D[m], -kI * (0.5 * h));
        const Eigen::MatrixXcd half_step_inv = block_exp(blocks.D[m], kI * (0.5 * h));
        const Eigen::MatrixXcd G_mid = half_step * G;
        const Eigen::MatrixXcd Ginv_mid = Ginv * half_step_inv;
        md.h_m[c] = blocks.h[m];
        md.u_m[c] = blocks.R[m] * G_mid;
        md.v_m[c] = Ginv_mid * blocks.W[m];
        md.inh_m[c] = rowdot(md.u_m[c], Q0);
        G = half_step * G_mid;
        Ginv = Ginv_mid * half_step_inv;
    }
    return md;
}

}  // namespace

ComplexSeries solve_p(const PQBlocks& blocks, cplx P0, const Eigen::VectorXcd& Q0) {
    const auto n = static_cast<Eigen::Index>(blocks.qdim());
    if (Q0.size() != n) throw std::invalid_argument("solve_p: Q0 dimension mismatch");
    const MidpointData md = midpoint_data(blocks, Q0);
    const std::size_t cells = blocks.grid.size() - 1;

    ComplexSeries out;
    out.grid = blocks.grid;
    out.values.resize(blocks.grid.size());
    out.values[0] = P0;

    Eigen::VectorXcd S = Eigen::VectorXcd::Zero(n);  // midpoint cumulative of v(s) P(s)
    cplx P = P0;
    for (std::size_t c = 0; c < cells; ++c) {
        const double h = blocks.grid.t(c + 1) - blocks.grid.t(c);
        auto rhs = [&](cplx Pm) {
            // memory integral up to the cell midpoint
            const Eigen::VectorXcd C = S + (0.25 * h) * (md.v_m[c] * (P + Pm));
            const cplx mem = rowdot(md.u_m[c], C);
            return -kI * md.h_m[c] * Pm - mem - kI * md.inh_m[c];
        };
        cplx Pm = P + 0.5 * h * rhs(P);
        Pm = P + 0.5 * h * rhs(Pm);
        P += h * rhs(Pm);
        S += h * (md.v_m[c] * Pm);
        if (!std::isfinite(P.real()) || !std::isfinite(P.imag()))
            throw std::runtime_error("solve_p: non-finite P amplitude");
        out.values[c + 1] = P;
    }
    return out;
}

ComplexSeries formal_solution_p(const PQBlocks& blocks, cplx P0, const Eigen::VectorXcd& Q0) {
    const auto n = static_cast<Eigen::Index>(blocks.qdim());
    if (Q0.size() != n) throw std::invalid_argument("formal_solution_p: Q0 dimension mismatch");
    const MidpointData md = midpoint_data(blocks, Q0);
    const std::size_t cells = blocks.grid.size() - 1;

    // kernel check on a subsampled set of (t, s) pairs
    const std::size_t stride = std::max<std::size_t>(1, cells / 256);
    for (std::size_t a = 0; a < cells; a += stride)
        for (std::size_t b = 0; b <= a; b += stride)
            if (std::abs(rowdot(md.u_m[a], md.v_m[b])) > 1e-10)
                throw std::invalid_argument(
                    "formal_solution_p: nonzero memory kernel detected; use solve_p");

    ComplexSeries out;
    out.grid = blocks.grid;
    out.values.resize(blocks.grid.size());
    cplx int_h = 0.0, J = 0.0;
    out.values[0] = P0;
    for (std::size_t c = 0; c < cells; ++c) {
        const double h = blocks.grid.t(c + 1) - blocks.grid.t(c);
        const cplx int_h_mid = int_h + 0.5 * h * md.h_m[c];
        J += h * md.inh_m[c] * std::exp(kI * int_h_mid);
        int_h += h * md.h_m[c];
        out.values[c + 1] = (P0 - kI * J) * std::exp(-kI * int_h);
    }
    return out;
}

}  // namespace pqsd
