#pragma once

#include <complex>

#include "ecp/state.hpp"

namespace ecp {

// Cavity and atom parameters, all in one common angular-frequency unit.
struct CavityParams {
  double kappa = 1.0;    // cavity damping rate, > 0
  double gamma = 0.0;    // atomic decay rate
  double omega_c = 0.0;  // cavity field frequency
  double omega_0 = 0.0;  // atomic transition frequency
  double omega_p = 0.0;  // input photon frequency
  double g = 0.0;        // atom-cavity coupling strength; 0 = empty cavity

  void validate() const;
};

// Reflection phases and magnitudes for the coupled (phi) and empty-cavity
// (phi0) responses, plus the polarization rotation angles they induce.
struct FaradayPhases {
  double phi = 0.0;          // arg r(omega_p), principal value in (-pi, pi]
  double phi0 = 0.0;         // arg r0(omega_p)
  double mag = 1.0;          // |r(omega_p)|
  double mag0 = 1.0;         // |r0(omega_p)|; unit modulus by construction
  double theta_minus = 0.0;  // (phi0 - phi) / 2
  double theta_plus = 0.0;   // (phi - phi0) / 2
};

// Input-output reflection coefficient of the coupled atom-cavity system.
std::complex<double> reflection_coefficient(const CavityParams& p);

// Reflection off the uncoupled (g = 0) cavity; always unit modulus.
std::complex<double> empty_cavity_coefficient(const CavityParams& p);

// Computes both phases. Throws PurePhaseApproxViolated when |r| deviates
// from 1 by more than tol_mag, i.e. when absorption is too strong to treat
// the reflection as a pure phase shift. tol_mag must lie in (0, 0.5].
FaradayPhases faraday_phases(const CavityParams& p, double tol_mag);

// Joint (photon, atom) phase table: the polarization that couples to the
// atom's sublevel picks up e^{i phi}, the other one e^{i phi0}.
JointPhaseTable interaction_gate(const FaradayPhases& phases);

// The exact table at the phi = pi, phi0 = pi/2 operating point:
// {(L,gL): -1, (R,gL): i, (L,gR): i, (R,gR): -1}. Protocol rounds use this.
JointPhaseTable ideal_interaction_gate();

// Parameters realizing the (phi, phi0) = (pi, pi/2) operating point:
// omega_0 = omega_c, omega_p = omega_c - kappa/2, g = kappa/2, gamma = 0.
CavityParams operating_point(double kappa, double omega_c);

// Maps an angle to the principal interval (-pi, pi].
double wrap_angle(double a);

// |wrap(a - b)|: distance on the circle, for comparing principal-value
// phases near the +-pi seam.
double angular_distance(double a, double b);

}  // namespace ecp
