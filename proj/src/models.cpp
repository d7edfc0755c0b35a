#include "pqsd/models.hpp"

#include <stdexcept>

namespace pqsd {

ModelSpec ModelSpec::two_level(double omega) {
    ModelSpec m;
    m.family = ModelFamily::TwoLevel;
    m.omega = omega;
    return m;
}

ModelSpec ModelSpec::qutrit(double omega, double kappa) {
    ModelSpec m;
    m.family = ModelFamily::Qutrit;
    m.omega = omega;
    m.kappa = kappa;
    return m;
}

ModelSpec ModelSpec::multi_level(double omega, int N) {
    ModelSpec m;
    m.family = ModelFamily::MultiLevel;
    m.omega = omega;
    m.N = N;
    return m;
}

int ModelSpec::dimension() const {
    switch (family) {
        case ModelFamily::TwoLevel: return 2;
        case ModelFamily::Qutrit: return 3;
        case ModelFamily::MultiLevel: return N + 1;
    }
    return 0;
}

void ModelSpec::validate() const {
    if (family == ModelFamily::Qutrit && !(kappa > 0))
        throw std::invalid_argument("ModelSpec: kappa must be > 0 for the qutrit");
    if (family == ModelFamily::MultiLevel && N < 1)
        throw std::invalid_argument("ModelSpec: N must be >= 1");
}

std::vector<cplx> ModelSpec::default_initial_state() const {
    const int d = dimension();
    return std::vector<cplx>(d, cplx(1.0 / std::sqrt(static_cast<double>(d)), 0.0));
}

void ModelSpec::hsys_diagonal(double E, std::span<double> out) const {
    switch (family) {
        case ModelFamily::TwoLevel:
            // symmetric split E1 = -E0 = E/2
            out[0] = -0.5 * E;
            out[1] = 0.5 * E;
            break;
        case ModelFamily::Qutrit:
            // basis (|1>, |0>, |2>); H_sys = E(|2><2| - |0><0|)
            out[0] = 0.0;
            out[1] = -E;
            out[2] = E;
            break;
        case ModelFamily::MultiLevel:
            out[0] = -E;
            for (int n = 1; n <= N; ++n) out[n] = E;
            break;
    }
}

CoeffState coeff_rhs(const ModelSpec& model, const CorrelationSpec& corr, const CoeffState& state,
                     double E) {
    const double drive = 0.5 * corr.Gamma * corr.gamma;
    const cplx iE(0.0, E);
    CoeffState d;
    switch (model.family) {
        case ModelFamily::TwoLevel: {
            const cplx F = state.f[0];
            d.f[0] = drive + (-corr.gamma + iE) * F + F * F;
            d.count = 1;
            break;
        }
        case ModelFamily::Qutrit: {
            const cplx F1 = state.f[0], F2 = state.f[1];
            const double k2 = model.kappa * model.kappa;
            d.f[0] = drive * k2 + (-corr.gamma + iE) * F1 + F1 * F1 - F1 * F2;
            d.f[1] = drive * k2 + (-corr.gamma + iE) * F2 + F2 * F2;
            d.count = 2;
            break;
        }
        case ModelFamily::MultiLevel: {
            const cplx F = state.f[0];
            d.f[0] = drive + (-corr.gamma + 2.0 * iE) * F + static_cast<double>(model.N) * F * F;
            d.count = 1;
            break;
        }
    }
    return d;
}

CoeffSeries solve_coefficients(const ModelSpec& model, const CorrelationSpec& corr,
                               const Detuning& detuning, const TimeGrid& half_grid) {
    model.validate();
    corr.validate();
    const int nc = (model.family == ModelFamily::Qutrit) ? 2 : 1;
    std::vector<cplx> y0(nc, 0.0);
    PiecewiseRhs rhs = [&](double, double t_cell, const std::vector<cplx>& y,
                           std::vector<cplx>& dy) {
        CoeffState s;
        s.f[0] = y[0];
        if (nc == 2) s.f[1] = y[1];
        s.count = nc;
        const CoeffState d = coeff_rhs(model, corr, s, detuning.at(t_cell));
        dy[0] = d.f[0];
        if (nc == 2) dy[1] = d.f[1];
    };
    const VectorSeries sol = rk4_integrate(rhs, y0, half_grid);
    CoeffSeries out;
    out.half_grid = half_grid;
    out.count = nc;
    out.values.resize(sol.values.size());
    for (std::size_t k = 0; k < sol.values.size(); ++k) {
        out.values[k][0] = sol.values[k][0];
        out.values[k][1] = (nc == 2) ? sol.values[k][1] : cplx(0.0);
    }
    return out;
}

Eigen::MatrixXcd effective_hamiltonian(const ModelSpec& model, const CoeffState& state, cplx z_star,
                                       double E) {
    const cplx i(0.0, 1.0);
    const int d = model.dimension();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(d, d);
    switch (model.family) {
        case ModelFamily::TwoLevel:
            H(0, 0) = -0.5 * E;
            H(0, 1) = i * z_star;
            H(1, 1) = 0.5 * E - i * state.f[0];
            break;
        case ModelFamily::Qutrit: {
            // basis (|1>, |0>, |2>), noise-free approximation (U_z dropped)
            const cplx kz = model.kappa * z_star;
            H(0, 0) = -i * state.f[0];
            H(0, 2) = i * kz;
            H(1, 0) = i * kz;
            H(1, 1) = -E;
            H(2, 2) = E - i * state.f[1];
            break;
        }
        case ModelFamily::MultiLevel: {
            const cplx F = state.f[0];
            H(0, 0) = -E;
            for (int n = 1; n <= model.N; ++n) {
                H(0, n) = i * z_star;
                for (int m = 1; m <= model.N; ++m) H(n, m) = (n == m ? cplx(E) : cplx(0.0)) - i * F;
            }
            break;
        }
    }
    return H;
}

void apply_minus_i_heff(const ModelSpec& model, const CoeffState& state, cplx z_star, double E,
                        std::span<const cplx> psi, std::span<cplx> out) {
    const cplx i(0.0, 1.0);
    switch (model.family) {
        case ModelFamily::TwoLevel: {
            const cplx F = state.f[0];
            out[0] = i * (0.5 * E) * psi[0] + z_star * psi[1];
            out[1] = (-i * (0.5 * E) - F) * psi[1];
            break;
        }
        case ModelFamily::Qutrit: {
            const cplx kz = model.kappa * z_star;
            out[0] = -state.f[0] * psi[0] + kz * psi[2];
            out[1] = kz * psi[0] + i * E * psi[1];
            out[2] = (-i * E - state.f[1]) * psi[2];
            break;
        }
        case ModelFamily::MultiLevel: {
            const cplx F = state.f[0];
            cplx sum = 0.0;
            for (int n = 1; n <= model.N; ++n) sum += psi[n];
            out[0] = i * E * psi[0] + z_star * sum;
            const cplx damp = F * sum;
            for (int n = 1; n <= model.N; ++n) out[n] = -i * E * psi[n] - damp;
            break;
        }
    }
}

MatrixSeries effective_hamiltonian_series(const ModelSpec& model, const CoeffSeries& coeffs,
                                          const NoisePath& noise_half, const Detuning& detuning) {
    if (noise_half.grid.points() != coeffs.half_grid.points())
        throw std::invalid_argument("effective_hamiltonian_series: noise/coefficient grid mismatch");
    MatrixSeries out;
    out.grid = coeffs.half_grid;
    out.values.resize(coeffs.values.size());
    for (std::size_t k = 0; k < coeffs.values.size(); ++k)
        out.values[k] = effective_hamiltonian(model, coeffs.at(k), noise_half.samples[k],
                                              detuning.at(coeffs.half_grid.t(k)));
    return out;
}

}  // namespace pqsd
