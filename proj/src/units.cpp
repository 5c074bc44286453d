#include "homlab/units.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "homlab/errors.hpp"

namespace homlab {

double SpectralGaussian::center_omega_rad_s() const {
  return 2.0 * std::numbers::pi * kSpeedOfLight / center_wavelength_m;
}

void SpectralGaussian::validate() const {
  if (!(center_wavelength_m > 0.0))
    throw ValidationError("SpectralGaussian: center wavelength must be > 0");
  if (!(rms_bandwidth_rad_s >= 0.0))
    throw ValidationError("SpectralGaussian: rms bandwidth must be >= 0");
  if (rms_bandwidth_rad_s / center_omega_rad_s() >= kNarrowbandLimit)
    throw ValidationError(
        "SpectralGaussian: bandwidth/center ratio breaks the narrowband "
        "assumption (>= 0.1)");
}

void PulseGaussian::validate() const {
  if (!(rms_duration_s > 0.0))
    throw ValidationError("PulseGaussian: rms duration must be > 0");
  if (!(rms_bandwidth_rad_s >= 0.0))
    throw ValidationError("PulseGaussian: rms bandwidth must be >= 0");
}

double rms_omega_from_nm(double center_nm, double rms_nm) {
  if (!(center_nm > 0.0))
    throw ValidationError("rms_omega_from_nm: center wavelength must be > 0");
  if (!(rms_nm >= 0.0))
    throw ValidationError("rms_omega_from_nm: rms width must be >= 0");
  if (rms_nm / center_nm >= kNarrowbandLimit)
    throw ValidationError(
        "rms_omega_from_nm: rms/center = " + std::to_string(rms_nm / center_nm) +
        " breaks the narrowband assumption (>= 0.1)");
  const double center_m = center_nm * 1e-9;
  const double rms_m = rms_nm * 1e-9;
  return 2.0 * std::numbers::pi * kSpeedOfLight * rms_m / (center_m * center_m);
}

double rms_nm_from_omega(const SpectralGaussian& s) {
  s.validate();
  const double lam = s.center_wavelength_m;
  return s.rms_bandwidth_rad_s * lam * lam /
         (2.0 * std::numbers::pi * kSpeedOfLight) * 1e9;
}

SpectralGaussian spectral_from_nm(double center_nm, double rms_nm) {
  SpectralGaussian s{center_nm * 1e-9, rms_omega_from_nm(center_nm, rms_nm)};
  s.validate();
  return s;
}

double fwhm_from_rms(double rms) {
  if (!(rms >= 0.0)) throw ValidationError("fwhm_from_rms: rms must be >= 0");
  return kFwhmPerRms * rms;
}

double rms_from_fwhm(double fwhm) {
  if (!(fwhm >= 0.0)) throw ValidationError("rms_from_fwhm: fwhm must be >= 0");
  return fwhm / kFwhmPerRms;
}

double time_bandwidth_product(const PulseGaussian& p) {
  p.validate();
  return p.rms_duration_s * p.rms_bandwidth_rad_s;
}

}  // namespace homlab
