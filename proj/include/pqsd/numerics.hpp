#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace pqsd {

using cplx = std::complex<double>;

/// Discretization of [t_start, t_end]. Strictly increasing, first/last point
/// pinned, max spacing <= dt_nominal. Breakpoints requested at construction
/// (pulse edges) appear exactly as grid points; spacing is uniform between
/// consecutive breakpoints.
class TimeGrid {
public:
    TimeGrid() = default;
    TimeGrid(std::vector<double> points, double dt_nominal);

    /// Uniform grid on [t_start, t_end].
    static TimeGrid uniform(double t_start, double t_end, double dt_nominal);
    /// Grid hitting every breakpoint exactly, uniform in between.
    static TimeGrid with_breakpoints(double t_start, double t_end, double dt_nominal,
                                     const std::vector<double>& breakpoints);

    std::size_t size() const { return points_.size(); }
    double t(std::size_t i) const { return points_[i]; }
    double t_start() const { return points_.front(); }
    double t_end() const { return points_.back(); }
    double dt_nominal() const { return dt_nominal_; }
    const std::vector<double>& points() const { return points_; }

    /// Grid with the midpoint of every interval inserted (noise half-step grid).
    /// Point 2k of the result is point k of *this.
    TimeGrid with_midpoints() const;

    /// Subsampled grid keeping every stride-th point plus the final one.
    /// Returns the kept indices through `kept` when non-null.
    TimeGrid subsample(std::size_t stride, std::vector<std::size_t>* kept = nullptr) const;

private:
    std::vector<double> points_;
    double dt_nominal_ = 0.0;
};

/// Scalar complex samples on a grid.
struct ComplexSeries {
    TimeGrid grid;
    std::vector<cplx> values;
};

/// Vector-valued samples on a grid (one state vector per grid point).
struct VectorSeries {
    TimeGrid grid;
    std::vector<std::vector<cplx>> values;
};

using Rhs = std::function<void(double t, const std::vector<cplx>& y, std::vector<cplx>& dy)>;

/// Same signature plus the midpoint of the enclosing integration interval.
/// Piecewise-constant coefficients (the pulse train) must be sampled at
/// t_cell, never at the stage time: grid intervals never straddle a pulse
/// edge, so the cell midpoint identifies the correct branch.
using PiecewiseRhs =
    std::function<void(double t, double t_cell, const std::vector<cplx>& y, std::vector<cplx>& dy)>;

/// Classical fixed-step RK4 over the (possibly non-uniform) grid.
/// Throws std::runtime_error naming the blow-up time if the state goes non-finite.
VectorSeries rk4_integrate(const Rhs& rhs, const std::vector<cplx>& y0, const TimeGrid& grid);
VectorSeries rk4_integrate(const PiecewiseRhs& rhs, const std::vector<cplx>& y0, const TimeGrid& grid);

/// result[0] = 0, result[k] = trapezoid accumulation of `series` up to point k.
ComplexSeries cumulative_trapezoid(const ComplexSeries& series);
std::vector<cplx> cumulative_trapezoid(const TimeGrid& grid, std::span<const cplx> values);
std::vector<double> cumulative_trapezoid(const TimeGrid& grid, std::span<const double> values);

/// Composite-Simpson accumulation over full-grid cells, with the integrand
/// sampled on the half-step grid (values_half[2k] sits at full-grid point k).
/// Result lives on the full grid.
std::vector<cplx> cumulative_simpson_half(const TimeGrid& full_grid, std::span<const cplx> values_half);

/// Trapezoid weight of node i on the domain [grid.t(0), grid.t(k)].
/// w_i = (h_{i-1} + h_i)/2 clipped to the domain.
double trapezoid_weight(const TimeGrid& grid, std::size_t i, std::size_t k);

bool all_finite(std::span<const cplx> v);

}  // namespace pqsd
