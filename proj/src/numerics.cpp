#include "pqsd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pqsd {

namespace {
constexpr double kBreakTol = 1e-12;
}

TimeGrid::TimeGrid(std::vector<double> points, double dt_nominal)
    : points_(std::move(points)), dt_nominal_(dt_nominal) {
    if (points_.size() < 2) throw std::invalid_argument("TimeGrid: need at least 2 points");
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i] > points_[i - 1]))
            throw std::invalid_argument("TimeGrid: points must be strictly increasing");
        if (points_[i] - points_[i - 1] > dt_nominal_ * (1.0 + 1e-9))
            throw std::invalid_argument("TimeGrid: spacing exceeds dt_nominal");
    }
}

TimeGrid TimeGrid::uniform(double t_start, double t_end, double dt_nominal) {
    return with_breakpoints(t_start, t_end, dt_nominal, {});
}

TimeGrid TimeGrid::with_breakpoints(double t_start, double t_end, double dt_nominal,
                                    const std::vector<double>& breakpoints) {
    if (!(t_end > t_start)) throw std::invalid_argument("TimeGrid: t_end must exceed t_start");
    if (!(dt_nominal > 0)) throw std::invalid_argument("TimeGrid: dt_nominal must be positive");

    std::vector<double> anchors{t_start};
    std::vector<double> sorted = breakpoints;
    std::sort(sorted.begin(), sorted.end());
    for (double b : sorted) {
        if (b <= t_start + kBreakTol || b >= t_end - kBreakTol) continue;
        if (b - anchors.back() > kBreakTol) anchors.push_back(b);
    }
    anchors.push_back(t_end);

    std::vector<double> pts;
    pts.push_back(t_start);
    for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
        const double lo = anchors[a], hi = anchors[a + 1];
        const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / dt_nominal - 1e-9));
        const double h = (hi - lo) / static_cast<double>(std::max<std::size_t>(n, 1));
        for (std::size_t k = 1; k < std::max<std::size_t>(n, 1); ++k)
            pts.push_back(lo + h * static_cast<double>(k));
        pts.push_back(hi);
    }
    return TimeGrid(std::move(pts), dt_nominal);
}

TimeGrid TimeGrid::with_midpoints() const {
    std::vector<double> pts;
    pts.reserve(2 * points_.size() - 1);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        pts.push_back(points_[i]);
        pts.push_back(0.5 * (points_[i] + points_[i + 1]));
    }
    pts.push_back(points_.back());
    return TimeGrid(std::move(pts), dt_nominal_);
}

TimeGrid TimeGrid::subsample(std::size_t stride, std::vector<std::size_t>* kept) const {
    if (stride == 0) throw std::invalid_argument("TimeGrid: stride must be >= 1");
    std::vector<double> pts;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < points_.size(); i += stride) {
        pts.push_back(points_[i]);
        idx.push_back(i);
    }
    if (idx.back() != points_.size() - 1) {
        pts.push_back(points_.back());
        idx.push_back(points_.size() - 1);
    }
    if (kept) *kept = std::move(idx);
    return TimeGrid(std::move(pts), dt_nominal_ * static_cast<double>(stride));
}

bool all_finite(std::span<const cplx> v) {
    for (const cplx& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

namespace {

VectorSeries rk4_impl(const PiecewiseRhs& rhs, const std::vector<cplx>& y0, const TimeGrid& grid) {
    const std::size_t n = y0.size();
    VectorSeries out;
    out.grid = grid;
    out.values.resize(grid.size());
    out.values[0] = y0;

    std::vector<cplx> y = y0, k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double a = grid.t(i), b = grid.t(i + 1);
        const double h = b - a, tc = 0.5 * (a + b);
        rhs(a, tc, y, k1);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        rhs(tc, tc, tmp, k2);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        rhs(tc, tc, tmp, k3);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + h * k3[j];
        rhs(b, tc, tmp, k4);
        for (std::size_t j = 0; j < n; ++j)
            y[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        if (!all_finite(y)) {
            std::ostringstream msg;
            msg << "rk4_integrate: non-finite state at t = " << b
                << " (stiffness or Riccati singularity)";
            throw std::runtime_error(msg.str());
        }
        out.values[i + 1] = y;
    }
    return out;
}

}  // namespace

VectorSeries rk4_integrate(const Rhs& rhs, const std::vector<cplx>& y0, const TimeGrid& grid) {
    return rk4_impl([&rhs](double t, double, const std::vector<cplx>& y,
                           std::vector<cplx>& dy) { rhs(t, y, dy); },
                    y0, grid);
}

VectorSeries rk4_integrate(const PiecewiseRhs& rhs, const std::vector<cplx>& y0, const TimeGrid& grid) {
    return rk4_impl(rhs, y0, grid);
}

std::vector<cplx> cumulative_trapezoid(const TimeGrid& grid, std::span<const cplx> values) {
    if (values.size() != grid.size())
        throw std::invalid_argument("cumulative_trapezoid: size mismatch");
    std::vector<cplx> out(values.size());
    out[0] = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (grid.t(i) - grid.t(i - 1)) * (values[i] + values[i - 1]);
    return out;
}

std::vector<double> cumulative_trapezoid(const TimeGrid& grid, std::span<const double> values) {
    if (values.size() != grid.size())
        throw std::invalid_argument("cumulative_trapezoid: size mismatch");
    std::vector<double> out(values.size());
    out[0] = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (grid.t(i) - grid.t(i - 1)) * (values[i] + values[i - 1]);
    return out;
}

ComplexSeries cumulative_trapezoid(const ComplexSeries& series) {
    return ComplexSeries{series.grid, cumulative_trapezoid(series.grid, series.values)};
}

std::vector<cplx> cumulative_simpson_half(const TimeGrid& full_grid, std::span<const cplx> values_half) {
    if (values_half.size() != 2 * full_grid.size() - 1)
        throw std::invalid_argument("cumulative_simpson_half: expected half-step samples");
    std::vector<cplx> out(full_grid.size());
    out[0] = 0.0;
    for (std::size_t k = 0; k + 1 < full_grid.size(); ++k) {
        const double h = full_grid.t(k + 1) - full_grid.t(k);
        out[k + 1] = out[k] + (h / 6.0) * (values_half[2 * k] + 4.0 * values_half[2 * k + 1] +
                                           values_half[2 * k + 2]);
    }
    return out;
}

double trapezoid_weight(const TimeGrid& grid, std::size_t i, std::size_t k) {
    double w = 0.0;
    if (i > 0) w += 0.5 * (grid.t(i) - grid.t(i - 1));
    if (i < k) w += 0.5 * (grid.t(i + 1) - grid.t(i));
    return w;
}

}  // namespace pqsd
