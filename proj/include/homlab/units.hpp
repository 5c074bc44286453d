#pragma once

namespace homlab {

inline constexpr double kSpeedOfLight = 299792458.0;       // m/s, exact
inline constexpr double kFwhmPerRms = 2.3548200450309493;  // 2*sqrt(2 ln 2)
inline constexpr double kNarrowbandLimit = 0.1;            // max rms/center ratio

// Gaussian optical spectrum: centre wavelength plus the r.m.s. width of the
// *intensity* spectrum in angular frequency. All spectral quantities are kept
// in rad/s internally; nanometres appear only at I/O boundaries.
struct SpectralGaussian {
  double center_wavelength_m = 0.0;
  double rms_bandwidth_rad_s = 0.0;

  double center_omega_rad_s() const;
  void validate() const;
};

// Gaussian pulse: r.m.s. duration of the intensity envelope plus the matching
// spectral width. A transform-limited pair satisfies sigma_t * sigma_w = 1/2.
struct PulseGaussian {
  double rms_duration_s = 0.0;
  double rms_bandwidth_rad_s = 0.0;

  void validate() const;
};

// sigma_w = 2*pi*c*rms_nm / center_nm^2. Requires the narrowband regime
// rms/center < 0.1; wider spectra invalidate the linearized conversion.
double rms_omega_from_nm(double center_nm, double rms_nm);

// Inverse of rms_omega_from_nm, for reporting in nm.
double rms_nm_from_omega(const SpectralGaussian& s);

SpectralGaussian spectral_from_nm(double center_nm, double rms_nm);

double fwhm_from_rms(double rms);
double rms_from_fwhm(double fwhm);

double time_bandwidth_product(const PulseGaussian& p);

}  // namespace homlab
