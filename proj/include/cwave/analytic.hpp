#ifndef CWAVE_ANALYTIC_HPP
#define CWAVE_ANALYTIC_HPP

#include "cwave/core.hpp"

#include <utility>

namespace cwave {

// Isolated two-level system (main/aux) starting in the main guide.
std::pair<Complex, Complex> two_state_evolve(double J0, double t);

// Wavenumbers of the stationary scattering state.
//
// k0 is the incident wavenumber in x < 0. In the step region the main/aux
// populations exchange on the scale k1 while the state propagates (Allowed)
// or decays (Forbidden) on the scale k2. The two satisfy k1 * k2 = m J0 and,
// exactly, k1^2 + k2^2 = 2 m |delta|. The approximate branch drops k1^2 from
// the second relation (valid for |delta| >> J0).
struct Wavenumbers {
  double k0 = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  bool exact = false;
};

struct WavenumberOptions {
  bool exact = false;
  // Minimum |delta| / J0 accepted by the approximate branch.
  double guard_ratio = 2.0;
};

Wavenumbers wavenumbers(const PhysicalParams& params, const EnergySpec& spec,
                        const WavenumberOptions& opts = {});

struct MatchingCoefficients {
  Complex c_i;
  Complex c_r;
  Complex a;
  Complex b;  // aux amplitude: -i a (Allowed) or -a (Forbidden)
};

// Amplitudes fixed by continuity of psi_m and its derivative at x = 0.
MatchingCoefficients matching_coefficients(const Wavenumbers& k, Regime regime, Complex a);

// Stationary scattering state sampled on the grid. Plane-wave states are not
// normalizable; only densities relative to |a|^2 carry meaning.
FieldPair stationary_state(const PhysicalParams& params, const EnergySpec& spec, const Grid& grid,
                           Complex a, const WavenumberOptions& opts = {});

// Same, from precomputed wavenumbers.
FieldPair stationary_state(const Wavenumbers& k, Regime regime, const Grid& grid, Complex a);

struct PaProfile {
  RealArray pa;
  MaskArray valid;  // false where the total density is zero; pa is NaN there
};

// Fraction of the local density in the auxiliary guide.
PaProfile pa_profile(const FieldPair& field);

// Speed inferred from the population build-up scale: sqrt(2 |delta| / m).
double apparent_speed(double delta, double m);

}  // namespace cwave

#endif  // CWAVE_ANALYTIC_HPP
