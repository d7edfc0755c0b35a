#include "pqsd/noise.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pqsd/rng.hpp"

namespace pqsd {

void CorrelationSpec::validate() const {
    if (Gamma < 0) throw std::invalid_argument("CorrelationSpec: Gamma must be >= 0");
    if (!(gamma > 0)) throw std::invalid_argument("CorrelationSpec: gamma must be > 0");
}

double CorrelationSpec::alpha(double t, double s) const {
    return variance() * std::exp(-gamma * std::abs(t - s));
}

OuStepCoeffs ou_step_coeffs(const CorrelationSpec& spec, double delta) {
    const double decay = std::exp(-spec.gamma * delta);
    // total innovation variance (Gamma*gamma/2)(1 - decay^2), split evenly
    // between real and imaginary parts
    const double var = spec.variance() * (1.0 - decay * decay);
    return {decay, std::sqrt(0.5 * var)};
}

NoisePath sample_path(const CorrelationSpec& spec, const TimeGrid& grid, std::uint64_t seed,
                      double innovation_scale) {
    spec.validate();
    NoisePath path;
    path.grid = grid;
    path.seed = seed;
    path.samples.resize(grid.size());

    if (spec.Gamma == 0.0) return path;  // zero variance forces the zero path

    Xoshiro256pp rng(seed);
    const double sd0 = std::sqrt(0.5 * spec.variance()) * innovation_scale;
    auto [g0, g1] = rng.gaussian_pair();
    cplx z(sd0 * g0, sd0 * g1);
    path.samples[0] = z;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const auto c = ou_step_coeffs(spec, grid.t(k) - grid.t(k - 1));
        auto [n0, n1] = rng.gaussian_pair();
        const double sd = c.innovation_sd * innovation_scale;
        z = c.decay * z + cplx(sd * n0, sd * n1);
        path.samples[k] = z;
    }
    return path;
}

namespace {

CorrelationEstimate estimate_moment(const std::vector<NoisePath>& paths, std::size_t i,
                                    std::size_t j, bool conjugate_j) {
    if (paths.size() < 100)
        throw std::invalid_argument("estimate_correlation: need at least 100 paths");
    const auto& g0 = paths.front().grid.points();
    for (const auto& p : paths) {
        if (p.grid.points() != g0)
            throw std::invalid_argument("estimate_correlation: mismatched grids");
        if (i >= p.samples.size() || j >= p.samples.size())
            throw std::invalid_argument("estimate_correlation: index out of range");
    }
    // samples store z*_t, so z_{t_i} = conj(samples[i])
    cplx sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& p : paths) {
        const cplx zj = conjugate_j ? p.samples[j] : std::conj(p.samples[j]);
        const cplx v = std::conj(p.samples[i]) * zj;
        sum += v;
        sum_sq += std::norm(v);
    }
    const auto n = static_cast<double>(paths.size());
    const cplx mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - std::norm(mean));
    return {mean, std::sqrt(var / n)};
}

}  // namespace

CorrelationEstimate estimate_correlation(const std::vector<NoisePath>& paths, std::size_t i,
                                         std::size_t j) {
    return estimate_moment(paths, i, j, /*conjugate_j=*/true);
}

CorrelationEstimate estimate_pseudo_correlation(const std::vector<NoisePath>& paths, std::size_t i,
                                                std::size_t j) {
    return estimate_moment(paths, i, j, /*conjugate_j=*/false);
}

void write_path_csv(std::ostream& os, const NoisePath& path) {
    os << "t,re_zstar,im_zstar\n";
    for (std::size_t k = 0; k < path.samples.size(); ++k)
        os << path.grid.t(k) << ',' << path.samples[k].real() << ',' << path.samples[k].imag()
           << '\n';
}

std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t state = master_seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    return splitmix64(state);
}

}  // namespace pqsd
