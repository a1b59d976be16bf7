#include "ecp/cavity.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace ecp {

void CavityParams::validate() const {
  if (!(kappa > 0.0))
    fail(ErrorKind::InvalidArgument, "kappa must be positive");
  if (gamma < 0.0 || g < 0.0)
    fail(ErrorKind::InvalidArgument, "gamma and g must be nonnegative");
  if (!std::isfinite(kappa) || !std::isfinite(gamma) || !std::isfinite(g) ||
      !std::isfinite(omega_c) || !std::isfinite(omega_0) ||
      !std::isfinite(omega_p))
    fail(ErrorKind::InvalidArgument, "cavity parameters must be finite");
}

std::complex<double> reflection_coefficient(const CavityParams& p) {
  p.validate();
  const std::complex<double> i(0.0, 1.0);
  const auto cavity = i * (p.omega_c - p.omega_p);
  const auto atom = i * (p.omega_0 - p.omega_p) + 0.5 * p.gamma;
  const auto num = (cavity - 0.5 * p.kappa) * atom + p.g * p.g;
  const auto den = (cavity + 0.5 * p.kappa) * atom + p.g * p.g;
  if (std::abs(den) <= 1e-30)
    fail(ErrorKind::SingularDenominator,
         "reflection coefficient denominator vanishes for these parameters");
  return num / den;
}

std::complex<double> empty_cavity_coefficient(const CavityParams& p) {
  p.validate();
  const std::complex<double> i(0.0, 1.0);
  const auto detune = i * (p.omega_c - p.omega_p);
  return (detune - 0.5 * p.kappa) / (detune + 0.5 * p.kappa);
}

FaradayPhases faraday_phases(const CavityParams& p, double tol_mag) {
  if (!(tol_mag > 0.0 && tol_mag <= 0.5))
    fail(ErrorKind::InvalidArgument, "tol_mag must lie in (0, 0.5]");
  const auto r = reflection_coefficient(p);
  const auto r0 = empty_cavity_coefficient(p);

  FaradayPhases out;
  out.mag = std::abs(r);
  out.mag0 = std::abs(r0);
  // wrap_angle keeps the documented (-pi, pi] range: std::arg returns -pi
  // for a negative-zero imaginary part
  out.phi = wrap_angle(std::arg(r));
  out.phi0 = wrap_angle(std::arg(r0));
  out.theta_minus = 0.5 * (out.phi0 - out.phi);
  out.theta_plus = -out.theta_minus;

  if (std::abs(1.0 - out.mag) > tol_mag) {
    std::ostringstream msg;
    msg << "|r| = " << out.mag << " deviates from 1 by more than tol_mag = "
        << tol_mag << "; the reflection is not a pure phase shift here";
    fail(ErrorKind::PurePhaseApproxViolated, msg.str());
  }
  return out;
}

JointPhaseTable interaction_gate(const FaradayPhases& phases) {
  const auto coupled = std::polar(1.0, phases.phi);
  const auto uncoupled = std::polar(1.0, phases.phi0);
  JointPhaseTable table;
  table[{BasisSymbol::L, BasisSymbol::GroundL}] = coupled;
  table[{BasisSymbol::R, BasisSymbol::GroundL}] = uncoupled;
  table[{BasisSymbol::L, BasisSymbol::GroundR}] = uncoupled;
  table[{BasisSymbol::R, BasisSymbol::GroundR}] = coupled;
  return table;
}

JointPhaseTable ideal_interaction_gate() {
  JointPhaseTable table;
  table[{BasisSymbol::L, BasisSymbol::GroundL}] = Amplitude(-1.0, 0.0);
  table[{BasisSymbol::R, BasisSymbol::GroundL}] = Amplitude(0.0, 1.0);
  table[{BasisSymbol::L, BasisSymbol::GroundR}] = Amplitude(0.0, 1.0);
  table[{BasisSymbol::R, BasisSymbol::GroundR}] = Amplitude(-1.0, 0.0);
  return table;
}

CavityParams operating_point(double kappa, double omega_c) {
  CavityParams p;
  p.kappa = kappa;
  p.gamma = 0.0;
  p.omega_c = omega_c;
  p.omega_0 = omega_c;
  p.omega_p = omega_c - 0.5 * kappa;
  p.g = 0.5 * kappa;
  p.validate();
  return p;
}

double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::remainder(a, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

double angular_distance(double a, double b) {
  return std::abs(wrap_angle(a - b));
}

}  // namespace ecp
