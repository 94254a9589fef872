#include "cwave/analytic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cwave {

namespace {
constexpr Complex kI(0.0, 1.0);
}

std::pair<Complex, Complex> two_state_evolve(double J0, double t) {
  if (!(t >= 0.0)) throw InputError("two-state evolution needs t >= 0");
  const double phase = J0 * t;
  return {Complex(std::cos(phase), 0.0), Complex(0.0, -std::sin(phase))};
}

Wavenumbers wavenumbers(const PhysicalParams& params, const EnergySpec& spec,
                        const WavenumberOptions& opts) {
  params.validate();
  const double m = params.m;
  const double J0 = params.J0;
  const double abs_delta = std::abs(spec.delta);
  if (!(abs_delta > 0.0)) throw InputError("wavenumbers need a nonzero detuning");

  Wavenumbers k;
  k.k0 = std::sqrt(2.0 * m * spec.E);
  k.exact = opts.exact;

  if (opts.exact) {
    // k2^4 - 2 m |delta| k2^2 + (m J0)^2 = 0, larger root. In the Forbidden
    // regime k1 and k2 are the decay-constant magnitudes and obey the same
    // quartic; real roots need |delta| >= J0.
    if (abs_delta < J0) {
      std::ostringstream msg;
      msg << "exact dispersion has no real root for |delta|=" << abs_delta << " < J0=" << J0
          << " (crossover regime)";
      throw InputError(msg.str());
    }
    const double ratio = J0 / abs_delta;
    const double k2_sq = m * abs_delta * (1.0 + std::sqrt(1.0 - ratio * ratio));
    k.k2 = std::sqrt(k2_sq);
  } else {
    if (J0 > 0.0 && abs_delta < opts.guard_ratio * J0) {
      std::ostringstream msg;
      msg << "|delta|/J0 = " << abs_delta / J0 << " is below the guard " << opts.guard_ratio
          << "; the approximation k2^2 = 2 m |delta| needs |delta| >> J0"
          << " (use the exact dispersion or lower guard_ratio)";
      throw InputError(msg.str());
    }
    k.k2 = std::sqrt(2.0 * m * abs_delta);
  }
  k.k1 = m * J0 / k.k2;
  return k;
}

MatchingCoefficients matching_coefficients(const Wavenumbers& k, Regime regime, Complex a) {
  MatchingCoefficients c;
  c.a = a;
  const double ratio = k.k2 / k.k0;
  if (regime == Regime::Allowed) {
    c.c_i = 0.5 * (1.0 + ratio) * a;
    c.c_r = 0.5 * (1.0 - ratio) * a;
    c.b = -kI * a;
  } else {
    c.c_i = 0.5 * (1.0 + kI * ratio) * a;
    c.c_r = 0.5 * (1.0 - kI * ratio) * a;
    c.b = -a;
  }
  return c;
}

FieldPair stationary_state(const Wavenumbers& k, Regime regime, const Grid& grid, Complex a) {
  const MatchingCoefficients c = matching_coefficients(k, regime, a);
  FieldPair f(grid);
  for (Eigen::Index i = 0; i < grid.n(); ++i) {
    const double x = grid.x(i);
    if (x < 0.0) {
      f.psi_m(i) = c.c_i * std::exp(kI * (k.k0 * x)) + c.c_r * std::exp(-kI * (k.k0 * x));
    } else if (regime == Regime::Allowed) {
      const Complex carrier = std::exp(kI * (k.k2 * x));
      f.psi_m(i) = c.a * std::cos(k.k1 * x) * carrier;
      f.psi_a(i) = c.b * std::sin(k.k1 * x) * carrier;
    } else {
      const double decay = std::exp(-k.k2 * x);
      f.psi_m(i) = c.a * (std::cosh(k.k1 * x) * decay);
      f.psi_a(i) = c.b * (std::sinh(k.k1 * x) * decay);
    }
  }
  return f;
}

FieldPair stationary_state(const PhysicalParams& params, const EnergySpec& spec, const Grid& grid,
                           Complex a, const WavenumberOptions& opts) {
  return stationary_state(wavenumbers(params, spec, opts), spec.regime, grid, a);
}

PaProfile pa_profile(const FieldPair& field) {
  const RealArray main = field.density_main();
  const RealArray aux = field.density_aux();
  const RealArray total = main + aux;
  PaProfile out{RealArray(total.size()), MaskArray(total.size())};
  for (Eigen::Index i = 0; i < total.size(); ++i) {
    out.valid(i) = total(i) > 0.0;
    out.pa(i) = out.valid(i) ? aux(i) / total(i) : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double apparent_speed(double delta, double m) {
  if (delta == 0.0) throw InputError("apparent speed is undefined at delta = 0");
  if (!(m > 0.0)) throw InputError("mass must be positive");
  return std::sqrt(2.0 * std::abs(delta) / m);
}

}  // namespace cwave
