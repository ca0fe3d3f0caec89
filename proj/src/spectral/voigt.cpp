#include "photonstat/spectral/voigt.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace photonstat::spectral {

namespace {

using boost::math::constants::pi;
using boost::math::quadrature::gauss_kronrod;

constexpr double kFwhmToSigma = 0.42466090014400953;

}  // namespace

double lorentzian(double x, double fwhm) {
    const double g = 0.5 * fwhm;
    return g / (pi<double>() * (x * x + g * g));
}

double gaussian(double x, double fwhm) {
    const double s = fwhm * kFwhmToSigma;
    return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * pi<double>()));
}

double voigt(double x, double lorentzian_fwhm, double gaussian_fwhm) {
    if (!(lorentzian_fwhm >= 0.0) || !(gaussian_fwhm >= 0.0) || (lorentzian_fwhm == 0.0 && gaussian_fwhm == 0.0)) {
        throw std::invalid_argument("voigt: widths must be >= 0 and not both zero");
    }
    if (gaussian_fwhm == 0.0) return lorentzian(x, lorentzian_fwhm);
    if (lorentzian_fwhm == 0.0) return gaussian(x, gaussian_fwhm);
    if (gaussian_fwhm < 1e-4 * lorentzian_fwhm) {
        // A Gaussian this narrow only adds (sigma^2 / 2) L''(x); the next
        // term is below 1e-16 relative. Quadrature is slow here.
        const double s = gaussian_fwhm * kFwhmToSigma;
        const double g = 0.5 * lorentzian_fwhm;
        const double d = x * x + g * g;
        return lorentzian(x, lorentzian_fwhm) + 0.5 * s * s * g * (6.0 * x * x - 2.0 * g * g) / (pi<double>() * d * d * d);
    }

    // G(u) L(x - u) over the Gaussian's support; beyond 40 sigma the
    // integrand is below 1e-300 of its peak. Splitting at the two peaks
    // (u = 0 and u = x) keeps the adaptive rule from missing a narrow one.
    const double reach = 40.0 * gaussian_fwhm * kFwhmToSigma;
    auto f = [&](double u) { return gaussian(u, gaussian_fwhm) * lorentzian(x - u, lorentzian_fwhm); };
    auto piece = [&](double a, double b) {
        if (!(b > a)) return 0.0;
        return gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-11);
    };
    const double lo = std::min(0.0, x), hi = std::max(0.0, x);
    if (hi <= -reach || lo >= reach) return piece(-reach, reach);
    const double a = std::max(lo, -reach), b = std::min(hi, reach);
    return piece(-reach, a) + piece(a, b) + piece(b, reach);
}

double voigt_fwhm(double lorentzian_fwhm, double gaussian_fwhm) {
    if (gaussian_fwhm == 0.0) return lorentzian_fwhm;
    if (lorentzian_fwhm == 0.0) return gaussian_fwhm;
    const double half = 0.5 * voigt(0.0, lorentzian_fwhm, gaussian_fwhm);
    // The half-width lies between half of either component width and the
    // sum of the two.
    const double lo = 0.5 * std::max(lorentzian_fwhm, gaussian_fwhm) * 0.5;
    const double hi = lorentzian_fwhm + gaussian_fwhm;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        [&](double x) { return voigt(x, lorentzian_fwhm, gaussian_fwhm) - half; }, lo, hi,
        boost::math::tools::eps_tolerance<double>(50), iters);
    return r.first + r.second;
}

}  // namespace photonstat::spectral
