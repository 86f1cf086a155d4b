#pragma once

namespace nvpair {

// Frequency units throughout: MHz, Gauss, nm, microseconds.
struct PhysicalConstants {
  double gamma_e = 2.8025;       // MHz/G
  double gamma_c13 = 1.0705e-3;  // MHz/G
  double d0_ee = 52.04;          // MHz nm^3, electron-electron point dipole

  // Electron-13C dipolar constant; fixed by the ratio of gyromagnetic ratios.
  [[nodiscard]] double d0_en() const { return d0_ee * gamma_c13 / gamma_e; }

  // Throws InvalidArgument unless every constant is strictly positive.
  void validate() const;
};

}  // namespace nvpair
