#pragma once

namespace photonstat::spectral {

/// Unit-area Lorentzian of full width `fwhm`.
double lorentzian(double x, double fwhm);

/// Unit-area Gaussian of full width `fwhm`.
double gaussian(double x, double fwhm);

/// Unit-area Voigt profile, the convolution of a Lorentzian (FWHM
/// lorentzian_fwhm) with a Gaussian (FWHM gaussian_fwhm), evaluated by
/// adaptive Gauss-Kronrod quadrature to a relative error of about 1e-9.
/// Either width may be zero; both zero is rejected (std::invalid_argument).
double voigt(double x, double lorentzian_fwhm, double gaussian_fwhm);

/// Full width at half maximum of the Voigt profile, found by bracketing the
/// half-maximum crossing.
double voigt_fwhm(double lorentzian_fwhm, double gaussian_fwhm);

}  // namespace photonstat::spectral
