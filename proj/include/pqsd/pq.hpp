#pragma once

#include "pqsd/models.hpp"

namespace pqsd {

/// Feshbach block decomposition of H_eff for a chosen P direction, sampled on
/// the half-step grid (full-grid point k sits at half index 2k; cell midpoints
/// at 2k+1 feed the propagator and the P solver).
/// W and R are not mutually conjugate in general.
struct PQBlocks {
    Eigen::VectorXcd p_basis;
    Eigen::MatrixXcd rotation;  ///< unitary U with U p_basis = e1
    TimeGrid half_grid;
    TimeGrid grid;  ///< full integration grid (even half indices)
    std::vector<cplx> h;
    std::vector<Eigen::RowVectorXcd> R;
    std::vector<Eigen::VectorXcd> W;
    std::vector<Eigen::MatrixXcd> D;

    std::size_t qdim() const { return W.empty() ? 0 : static_cast<std::size_t>(W[0].size()); }
    /// Block reassembly (h,R;W,D) at half index k, in the rotated frame.
    Eigen::MatrixXcd reassemble(std::size_t k) const;
};

/// Deterministic Householder-style unitary sending p to the first coordinate.
Eigen::MatrixXcd p_rotation(const Eigen::VectorXcd& p);

/// Rotate every H_eff sample with the canonical unitary and slice blocks.
/// The series must live on a half-step grid (odd length).
PQBlocks partition(const MatrixSeries& heff_half, const Eigen::VectorXcd& p_basis);

/// Time-ordered propagator G(t,s) of the Q block, from the product of
/// per-cell midpoint exponentials exp(-i D(t_mid) dt). s and t are full-grid
/// indices, s <= t.
Eigen::MatrixXcd propagator(const PQBlocks& blocks, std::size_t s, std::size_t t);

/// G(t_k, t_from) for every full-grid k >= from (cumulative products).
std::vector<Eigen::MatrixXcd> propagator_columns(const PQBlocks& blocks, std::size_t from = 0);

/// Closed-form multi-level propagator G(t_k, 0) of the commuting Q generator
/// D = E*I - i*F*J (J the all-ones matrix), built from the midpoint-cumulative
/// integral of F and the exact integral of E. Bit-compatible with the stepped
/// product up to matrix-exponential roundoff.
std::vector<Eigen::MatrixXcd> multilevel_propagator_closed(int N, const CoeffSeries& coeffs,
                                                           const Detuning& detuning,
                                                           const TimeGrid& grid);

/// Closed one-dimensional stochastic master equation for P(t):
///   i dP/dt = h P - i Int_0^t Gtilde(t,s) P(s) ds + R(t) G(t,0) Q(0),
/// with Gtilde(t,s) = R(t) G(t,s) W(s). Second-order implicit-midpoint
/// stepping; the memory integral uses the running midpoint cumulative of
/// G(s,0)^{-1} W(s) P(s), so the total work is O(M N^2).
ComplexSeries solve_p(const PQBlocks& blocks, cplx P0, const Eigen::VectorXcd& Q0);

/// Kernel-free formal solution
///   P(t) = [P0 - i Int_0^t R(s) G(s,0) Q(0) e^{+i Int h} ds] e^{-i Int_0^t h}.
/// Rejects blocks whose memory kernel is not identically zero (checked on a
/// subsampled set of (t,s) pairs against 1e-10).
ComplexSeries formal_solution_p(const PQBlocks& blocks, cplx P0, const Eigen::VectorXcd& Q0);

}  // namespace pqsd
