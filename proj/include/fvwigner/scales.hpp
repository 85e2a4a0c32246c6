#pragma once

#include <cmath>
#include <string>

#include "fvwigner/errors.hpp"

namespace fvw {

/// Physical constants of a run. e and B only enter through omega_c = eB/m.
struct PhysicalScales {
  double hbar = 1.0;
  double mass = 1.0;
  double c = 1.0;
  double omega_c = 0.0;

  /// hbar = mass = c = 1 with omega_c chosen so that b = hbar omega_c / mc^2.
  static PhysicalScales canonical(double b = 0.0) {
    PhysicalScales s;
    s.omega_c = b;
    s.validate();
    return s;
  }

  void validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw DomainError("hbar must be > 0");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("mass must be > 0");
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("c must be > 0");
    if (!(omega_c >= 0.0) || !std::isfinite(omega_c)) throw DomainError("omega_c must be >= 0");
  }

  double rest_energy() const { return mass * c * c; }

  /// Dimensionless field strength hbar omega_c / (m c^2); b = 1 is the critical field.
  double b() const { return hbar * omega_c / rest_energy(); }

  /// Squared oscillator length a^2 = hbar / (m omega_c).
  double oscillator_length2() const {
    if (!(omega_c > 0.0)) throw DomainError("oscillator length needs omega_c > 0");
    return hbar / (mass * omega_c);
  }
  double oscillator_length() const { return std::sqrt(oscillator_length2()); }

  /// Slow modulation frequency hbar omega_c^2 / (m c^2).
  double modulation_frequency() const { return hbar * omega_c * omega_c / rest_energy(); }
};

}  // namespace fvw
