#pragma once

#include <span>
#include <vector>

namespace photonstat::numerics {

/// A profile sampled on a uniform grid: value i sits at origin + i * step.
struct SampledProfile {
    double origin = 0.0;
    double step = 1.0;
    std::vector<double> values;

    double x(std::size_t i) const { return origin + static_cast<double>(i) * step; }
    double area() const;  ///< trapezoidal
};

/// Continuous convolution (f * g)(x) = integral f(u) g(x - u) du, discretised
/// on the common grid. The result lives on the grid of length
/// |f| + |g| - 1 starting at f.origin + g.origin, so the area is preserved
/// to trapezoidal accuracy. Rejects differing steps and profiles that do not
/// decay below 1e-6 of their peak at both edges.
SampledProfile convolve_profiles(const SampledProfile& f, const SampledProfile& g);

/// "Same"-mode discrete convolution with a centred odd-length kernel that
/// sums to one; used by forward models (detector jitter, instrument
/// response). No edge-decay requirement.
std::vector<double> convolve_same(std::span<const double> signal, std::span<const double> kernel);

/// Unit-sum Gaussian kernel with the given sigma in grid steps, truncated at
/// +-half_width_sigmas * sigma. sigma <= 0 yields the identity kernel {1}.
std::vector<double> gaussian_kernel(double sigma_steps, double half_width_sigmas = 6.0);

/// Full width at half maximum of a sampled single-peaked profile, from
/// linear interpolation of the half-maximum crossings.
double fwhm(const SampledProfile& p);

}  // namespace photonstat::numerics
