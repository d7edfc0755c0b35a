#pragma once

#include "pqsd/numerics.hpp"

namespace pqsd {

/// Periodic rectangular pulse train: c(t) = psi/delta inside the windows
/// (n*tau - delta, n*tau], n >= 1, and 0 elsewhere. Windows are half-open on
/// the left, closed on the right; the measure-zero endpoint convention is
/// fixed so that grid sampling is deterministic.
struct PulseTrain {
    double tau = 0.0;    ///< pulse period, units 1/Gamma
    double delta = 0.0;  ///< pulse duration per period
    double psi = 0.0;    ///< dimensionless pulse area; amplitude = psi/delta
    bool enabled = false;

    void validate() const;
};

/// c(t) at time t (>= 0). Zero for a disabled train.
double pulse_value(const PulseTrain& train, double t);

/// E(t) = omega + c(t).
double effective_detuning(double omega, const PulseTrain& train, double t);

/// Exact integral of c over [0, t] (closed form; no quadrature).
double pulse_area(const PulseTrain& train, double t);

/// Exact integral of E = omega + c over [0, t].
inline double detuning_integral(double omega, const PulseTrain& train, double t) {
    return omega * t + pulse_area(train, t);
}

/// All pulse edges n*tau - delta and n*tau inside (0, t_end).
std::vector<double> pulse_edges(const PulseTrain& train, double t_end);

/// Integration grid with every pulse edge as an exact grid point and uniform
/// spacing <= dt_nominal inside each smooth interval. Rejects trains whose
/// windows cannot hold two steps.
TimeGrid aligned_grid(const PulseTrain& train, double t_end, double dt_nominal);

/// Bare frequency plus pulse train, with the sampling conventions the
/// integrators need: discontinuous c is read at the midpoint of the current
/// integration cell, and the phase integral of E is exact.
struct Detuning {
    double omega = 0.0;
    PulseTrain train;

    double at(double t) const { return effective_detuning(omega, train, t); }
    double in_cell(double t_lo, double t_hi) const {
        return effective_detuning(omega, train, 0.5 * (t_lo + t_hi));
    }
    double integral(double t) const { return detuning_integral(omega, train, t); }
};

}  // namespace pqsd
