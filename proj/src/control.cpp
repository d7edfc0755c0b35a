#include "pqsd/control.hpp"

#include <cmath>
#include <stdexcept>

namespace pqsd {

void PulseTrain::validate() const {
    if (!enabled) return;
    if (!(tau > 0) || !(delta > 0)) throw std::invalid_argument("PulseTrain: tau, delta must be > 0");
    if (delta > tau * (1.0 + 1e-12)) throw std::invalid_argument("PulseTrain: delta must not exceed tau");
    if (!(psi > 0)) throw std::invalid_argument("PulseTrain: psi must be > 0");
}

double pulse_value(const PulseTrain& train, double t) {
    if (!train.enabled || t <= 0) return 0.0;
    // candidate window index: smallest n with t <= n*tau
    const double n = std::ceil(t / train.tau - 1e-12);
    if (n < 1) return 0.0;
    const double lo = n * train.tau - train.delta;
    return (t > lo) ? train.psi / train.delta : 0.0;
}

double effective_detuning(double omega, const PulseTrain& train, double t) {
    return omega + pulse_value(train, t);
}

double pulse_area(const PulseTrain& train, double t) {
    if (!train.enabled || t <= 0) return 0.0;
    const double m = std::floor(t / train.tau + 1e-12);  // complete windows 1..m
    double area = m * train.psi;
    const double lo = (m + 1) * train.tau - train.delta;  // partial window m+1
    if (t > lo) area += (train.psi / train.delta) * (t - lo);
    return area;
}

std::vector<double> pulse_edges(const PulseTrain& train, double t_end) {
    std::vector<double> edges;
    if (!train.enabled) return edges;
    for (int n = 1;; ++n) {
        const double lo = n * train.tau - train.delta;
        const double hi = n * train.tau;
        if (lo >= t_end - 1e-12) break;
        if (lo > 1e-12) edges.push_back(lo);
        if (hi < t_end - 1e-12) edges.push_back(hi);
        if (hi >= t_end - 1e-12) break;
    }
    return edges;
}

TimeGrid aligned_grid(const PulseTrain& train, double t_end, double dt_nominal) {
    if (!(t_end > 0)) throw std::invalid_argument("aligned_grid: t_end must be > 0");
    if (train.enabled) {
        train.validate();
        if (train.delta < 2 * dt_nominal || train.tau < 2 * dt_nominal)
            throw std::invalid_argument(
                "aligned_grid: pulse window shorter than two steps; reduce run.dt below "
                "min(delta, tau)/2");
    }
    return TimeGrid::with_breakpoints(0.0, t_end, dt_nominal, pulse_edges(train, t_end));
}

}  // namespace pqsd
