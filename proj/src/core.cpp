#include "cwave/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cwave {

PhysicalParams::PhysicalParams(double mass, double step, double coupling)
    : m(mass), V0(step), J0(coupling) {
  validate();
}

void PhysicalParams::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw InputError("mass m must be positive and finite");
  if (!(V0 > 0.0) || !std::isfinite(V0)) throw InputError("step potential V0 must be positive and finite");
  if (!(J0 >= 0.0) || !std::isfinite(J0)) throw InputError("coupling J0 must be non-negative and finite");
}

std::string to_string(Regime r) { return r == Regime::Allowed ? "allowed" : "forbidden"; }

std::string to_string(Sector s) { return s == Sector::Main ? "main" : "aux"; }

EnergySpec energy_spec(const PhysicalParams& params, double E) {
  params.validate();
  if (!(E > 0.0) || !std::isfinite(E)) throw InputError("energy E must be positive and finite");
  EnergySpec spec;
  spec.E = E;
  spec.delta = E - params.V0 + params.J0;
  if (std::abs(spec.delta) <= 1e-12 * params.V0) {
    throw InputError("detuning E - V0 + J0 is zero: the crossover between regimes is unsupported");
  }
  spec.regime = spec.delta > 0.0 ? Regime::Allowed : Regime::Forbidden;
  return spec;
}

EnergySpec energy_spec_from_delta(const PhysicalParams& params, double delta) {
  EnergySpec spec = energy_spec(params, delta + params.V0 - params.J0);
  // Keep the requested detuning bit-exact rather than the round-tripped value.
  spec.delta = delta;
  return spec;
}

Grid::Grid(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
  if (n < 3) throw InputError("grid needs at least 3 nodes");
  if (!(x_max > x_min)) throw InputError("grid bounds must satisfy x_min < x_max");
  dx_ = (x_max - x_min) / static_cast<double>(n - 1);
  const double steps_to_zero = -x_min / dx_;
  const double rounded = std::round(steps_to_zero);
  if (rounded < 0.0 || rounded > static_cast<double>(n - 1) ||
      std::abs(steps_to_zero - rounded) > 1e-9) {
    std::ostringstream msg;
    msg << "grid [" << x_min << ", " << x_max << "] with n=" << n
        << " has no node at x=0 (the step location)";
    throw InputError(msg.str());
  }
  origin_ = static_cast<Eigen::Index>(rounded);
}

Grid Grid::with_spacing(double x_min, double x_max, double dx) {
  if (!(dx > 0.0)) throw InputError("grid spacing must be positive");
  if (!(x_min <= 0.0 && x_max >= 0.0)) throw InputError("grid must contain x=0");
  const auto left = static_cast<long long>(std::ceil(-x_min / dx - 1e-9));
  const auto right = static_cast<long long>(std::ceil(x_max / dx - 1e-9));
  const auto n = static_cast<std::size_t>(left + right + 1);
  return Grid(-static_cast<double>(left) * dx, static_cast<double>(right) * dx, n);
}

RealArray Grid::coordinates() const {
  RealArray x(n());
  for (Eigen::Index i = 0; i < n(); ++i) x(i) = this->x(i);
  return x;
}

Eigen::Index Grid::nearest(double x) const {
  const double idx = std::round(x / dx_) + static_cast<double>(origin_);
  if (idx <= 0.0) return 0;
  if (idx >= static_cast<double>(n_ - 1)) return n() - 1;
  return static_cast<Eigen::Index>(idx);
}

void FieldPair::enforce_wall() {
  psi_a.head(grid.origin() + 1).setZero();
}

void FieldPair::check_invariants() const {
  if (psi_m.size() != grid.n() || psi_a.size() != grid.n()) {
    throw InputError("field arrays do not match the grid size");
  }
  for (Eigen::Index i = 0; i < grid.origin(); ++i) {
    if (psi_a(i) != Complex(0.0, 0.0)) throw InputError("psi_a must vanish for x < 0");
  }
}

double PotentialProfile::max_abs() const {
  double v = 0.0;
  for (Eigen::Index i = 0; i < v_m.size(); ++i) {
    v = std::max(v, std::abs(v_m(i)));
    v = std::max(v, std::abs(v_i(i)));
    if (!wall_mask(i)) v = std::max(v, std::abs(v_a(i)));
  }
  return v;
}

PotentialProfile build_potential(const PhysicalParams& params, const Grid& grid) {
  params.validate();
  const Eigen::Index n = grid.n();
  const Eigen::Index o = grid.origin();
  const double step = params.V0 - params.J0;
  PotentialProfile p{grid, RealArray::Zero(n), RealArray::Zero(n), RealArray::Zero(n),
                     MaskArray::Constant(n, false)};
  p.v_a.head(o).setConstant(std::numeric_limits<double>::infinity());
  p.wall_mask.head(o + 1).setConstant(true);
  p.v_m.tail(n - o).setConstant(step);
  p.v_a.tail(n - o).setConstant(step);
  p.v_i.tail(n - o).setConstant(params.J0);
  return p;
}

}  // namespace cwave
